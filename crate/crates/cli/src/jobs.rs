//! The commands behind the binary, callable without spawning a process.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use commbounds::classical::{
    classical_bound, enum_encoder_vertices_dist, enum_encoder_vertices_symbolic, enum_vertices_dim,
    facet_check, facet_enumerate_dim, raw_vertex_count,
};
use commbounds::corpus::{self, Inequality};
use commbounds::hierarchy::{hierarchy_upper_bound, HierarchyOptions, Variant};
use commbounds::model::{behavior_from_strategy, evaluate_functional, rat_to_f64, Constraint, QuantumStrategy, Scenario};
use commbounds::polytope::text::write_h;
use commbounds::sdp::SdpStatus;
use commbounds::seesaw::{guessing_probability, run_seesaw, SeesawConfig};
use commbounds::{Error, Result};
use num_rational::Rational64;
use rayon::prelude::*;

use crate::record::ResultRecord;
use crate::strategy::{self, StrategyFile};

/// Slack used when comparing bounds computed in floating point.
pub const SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Classical,
    Seesaw,
    Hierarchy,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(Method::Classical),
            "seesaw" => Ok(Method::Seesaw),
            "hierarchy" => Ok(Method::Hierarchy),
            _ => Err(Error::Parse(format!("unknown method `{s}` (classical, seesaw, hierarchy)"))),
        }
    }
}

/// Where the inequality comes from. Exactly one source.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Named(String),
    File(PathBuf),
}

impl Source {
    pub fn from_flags(name: Option<String>, file: Option<PathBuf>) -> Result<Self> {
        match (name, file) {
            (Some(n), None) => Ok(Source::Named(n)),
            (None, Some(f)) => Ok(Source::File(f)),
            (None, None) => Err(Error::Validation("give --ineq or --ineq-file".into())),
            (Some(_), Some(_)) => Err(Error::Validation("give only one of --ineq and --ineq-file".into())),
        }
    }

    pub fn load(&self) -> Result<Inequality> {
        match self {
            Source::Named(n) => corpus::named(n).cloned(),
            Source::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
                corpus::parse_inequality(&text)
            }
        }
    }
}

/// Constraint parameters given on the command line; unset fields keep the
/// inequality's own values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Params {
    pub d: Option<usize>,
    pub d1: Option<Rational64>,
    pub d2: Option<Rational64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub source: Source,
    pub method: Method,
    pub params: Params,
    pub restarts: usize,
    pub seed: u64,
    pub variant: Variant,
}

impl JobSpec {
    pub fn new(source: Source, method: Method) -> Self {
        JobSpec { source, method, params: Params::default(), restarts: 100, seed: 0, variant: Variant::Paper }
    }
}

/// The scenario a job actually runs in.
#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub scenario: Scenario,
    /// Dimension constraint, if any.
    pub dim: Option<usize>,
    /// State dimension used by the seesaw.
    pub seesaw_d: usize,
}

pub fn setting(ineq: &Inequality, p: &Params) -> Result<Setting> {
    let s = &ineq.scenario;
    match &s.constraint {
        Constraint::Dimension { d } => {
            if p.d1.is_some() || p.d2.is_some() {
                return Err(Error::Validation(format!("{} is dimension-bounded; D1/D2 do not apply", ineq.label())));
            }
            let d = p.d.unwrap_or(*d);
            Ok(Setting { scenario: s.with_dimension(d)?, dim: Some(d), seesaw_d: d })
        }
        Constraint::Distinguishability { d1, d2, .. } => {
            let scenario = Scenario::distinguishability(s.nx, s.ny, s.nz, p.d1.unwrap_or(*d1), p.d2.unwrap_or(*d2))?;
            Ok(Setting { scenario, dim: p.d, seesaw_d: p.d.unwrap_or(2) })
        }
    }
}

fn d_pair(s: &Scenario) -> (Option<String>, Option<String>) {
    match &s.constraint {
        Constraint::Dimension { .. } => (None, None),
        Constraint::Distinguishability { d1, d2, .. } => (Some(d1.to_string()), Some(d2.to_string())),
    }
}

/// Published value for this method and setting, when the corpus records one
/// and the setting is the published one.
fn paper_value(ineq: &Inequality, st: &Setting, method: Method) -> Option<f64> {
    if st.scenario.constraint != ineq.scenario.constraint && st.scenario.is_distinguishability() {
        return None;
    }
    let key = match method {
        Method::Classical if st.scenario.is_distinguishability() || st.dim == Some(2) => "classical".to_string(),
        Method::Classical => return None,
        Method::Seesaw => format!("seesaw_d{}", st.seesaw_d),
        Method::Hierarchy if st.scenario.is_distinguishability() => return None,
        Method::Hierarchy => format!("hierarchy_d{}", st.dim?),
    };
    ineq.reference(&key)
}

#[derive(Debug, Clone)]
pub struct BoundOutcome {
    pub record: ResultRecord,
    /// Exact classical bound of the setting.
    pub classical: Rational64,
    pub verdict: Option<String>,
    pub notes: Vec<String>,
    /// Best strategy found by the seesaw.
    pub strategy: Option<QuantumStrategy>,
}

fn elapsed_ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn seesaw_config(job: &JobSpec, st: &Setting) -> SeesawConfig {
    SeesawConfig { d: st.seesaw_d, restarts: job.restarts, seed: job.seed, ..SeesawConfig::default() }
}

/// Runs one method on an already loaded inequality.
pub fn bound_for(ineq: &Inequality, job: &JobSpec) -> Result<BoundOutcome> {
    let st = setting(ineq, &job.params)?;
    let f = &ineq.functional;
    let classical = classical_bound(&st.scenario, f)?.value;
    let classical_f = rat_to_f64(&classical);
    let (d1, d2) = d_pair(&st.scenario);
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut strategy = None;
    let (method_name, value, d, seed) = match job.method {
        Method::Classical => ("classical".to_string(), classical_f, st.dim, None),
        Method::Seesaw => {
            let r = run_seesaw(&st.scenario, f, &seesaw_config(job, &st))?;
            notes.push(format!("best restart {} after {} rounds", r.restart_index, r.trace.len()));
            strategy = Some(r.strategy);
            ("seesaw".to_string(), r.value, Some(st.seesaw_d), Some(job.seed))
        }
        Method::Hierarchy => {
            let opts = HierarchyOptions { variant: job.variant, dimension: st.dim };
            let r = hierarchy_upper_bound(&st.scenario, f, &opts)?;
            if st.scenario.is_distinguishability() && st.dim.is_none() && job.variant == Variant::Paper {
                notes.push(
                    "literal scalar distinguishability constraints without a dimension: genuine strategies \
                     of dimension >= 2 violate them, so this value is not a guaranteed upper bound; \
                     use --d or --variant extended for a sound relaxation"
                        .into(),
                );
            }
            if r.status != SdpStatus::Optimal {
                notes.push(format!(
                    "relaxation ended with status {}; reporting the dual objective {:.9}, a valid upper bound",
                    r.status, r.dual_value
                ));
            }
            let name = match job.variant {
                Variant::Paper => "hierarchy",
                Variant::Extended => "hierarchy-extended",
            };
            (name.to_string(), r.value, st.dim, None)
        }
    };
    let wall_ms = elapsed_ms(start);
    let verdict = match job.method {
        Method::Classical => None,
        Method::Seesaw if value > classical_f + SLACK => Some("quantum advantage: yes".to_string()),
        Method::Seesaw => Some("quantum advantage: no".to_string()),
        Method::Hierarchy if value <= classical_f + SLACK => Some("quantum advantage: no".to_string()),
        Method::Hierarchy => Some("quantum advantage: not excluded (upper bound above classical)".to_string()),
    };
    let record = ResultRecord {
        ineq: ineq.label().to_string(),
        d,
        d1,
        d2,
        method: method_name,
        value,
        classical: Some(classical_f),
        paper_value: paper_value(ineq, &st, job.method),
        seed,
        wall_ms,
    };
    Ok(BoundOutcome { record, classical, verdict, notes, strategy })
}

pub fn cmd_bound(job: &JobSpec) -> Result<BoundOutcome> {
    bound_for(&job.source.load()?, job)
}

#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub record: ResultRecord,
    pub file: StrategyFile,
    /// Every defect found, file-level and operator-level.
    pub issues: Vec<String>,
}

impl VerifyOutcome {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Reads a strategy from a path, or from the bundled set by name.
pub fn load_strategy(arg: &str) -> Result<StrategyFile> {
    match std::fs::read_to_string(arg) {
        Ok(text) => strategy::parse_strategy(&text),
        Err(_) => match strategy::bundled(arg) {
            Some(text) => strategy::parse_strategy(text),
            None => Err(Error::Parse(format!(
                "`{arg}` is neither a readable file nor a bundled strategy ({})",
                strategy::bundled_names().collect::<Vec<_>>().join(", ")
            ))),
        },
    }
}

/// Evaluates a strategy on an inequality and lists everything wrong with it.
pub fn cmd_verify(file: StrategyFile, ineq: &Inequality) -> Result<VerifyOutcome> {
    let start = Instant::now();
    let s = &file.strategy;
    if s.shape() != ineq.scenario.shape() {
        return Err(Error::Dimension(format!(
            "strategy has shape {:?}, {} needs {:?}",
            s.shape(),
            ineq.label(),
            ineq.scenario.shape()
        )));
    }
    let mut issues = file.warnings.clone();
    issues.extend(s.issues());
    if let Constraint::Distinguishability { d1, d2, .. } = &ineq.scenario.constraint {
        for (who, states, limit) in [("Alice", &s.alice_states, d1), ("Bob", &s.bob_states, d2)] {
            let p = guessing_probability(states)?;
            if p > rat_to_f64(limit) + SLACK {
                issues.push(format!("{who}'s states are guessed with probability {p:.6}, above the limit {limit}"));
            }
        }
    }
    let value = evaluate_functional(&ineq.functional, &behavior_from_strategy(s)?)?;
    let (d1, d2) = d_pair(&ineq.scenario);
    let (da, db) = s.dims();
    // The distinguishability classical bound needs a vertex enumeration; verify stays cheap without it.
    let classical = if ineq.scenario.is_distinguishability() {
        None
    } else {
        Some(rat_to_f64(&classical_bound(&ineq.scenario, &ineq.functional)?.value))
    };
    let record = ResultRecord {
        ineq: ineq.label().to_string(),
        d: Some(da.max(db)),
        d1,
        d2,
        method: "verify".into(),
        value,
        classical,
        paper_value: ineq.reference(&format!("seesaw_d{}", da.max(db))),
        seed: None,
        wall_ms: elapsed_ms(start),
    };
    Ok(VerifyOutcome { record, file, issues })
}

/// Parses `2..5`, `2..=5` or a single `3`.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("bad range `{s}` (use 2..5 or 3)"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = if let Some((a, b)) = s.split_once("..=") {
        (num(a)?, num(b)?)
    } else if let Some((a, b)) = s.split_once("..") {
        (num(a)?, num(b)?)
    } else {
        let v = num(s)?;
        (v, v)
    };
    if lo > hi || lo < 2 {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub inequalities: Vec<Inequality>,
    pub dims: Vec<usize>,
    pub methods: Vec<Method>,
    pub restarts: usize,
    pub seed: u64,
    pub variant: Variant,
    pub params: Params,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub records: Vec<ResultRecord>,
    pub notes: Vec<String>,
}

/// One row per (inequality, d, method). For distinguishability inequalities
/// `d` is the seesaw state dimension; the hierarchy is reported without a
/// dimension constraint and again with `d` imposed.
pub fn cmd_scan(spec: &ScanSpec) -> Result<ScanOutcome> {
    let mut jobs = Vec::new();
    for (i, ineq) in spec.inequalities.iter().enumerate() {
        let dist = ineq.scenario.is_distinguishability();
        for &d in &spec.dims {
            for &m in &spec.methods {
                let with_d = Params { d: Some(d), ..spec.params };
                let without_d = Params { d: None, ..spec.params };
                let wanted = match (dist, m) {
                    (true, Method::Classical) => vec![without_d],
                    (true, Method::Hierarchy) => vec![without_d, with_d],
                    _ => vec![with_d],
                };
                for p in wanted {
                    // Rows that do not depend on d appear once.
                    if !jobs.contains(&(i, m, p)) {
                        jobs.push((i, m, p));
                    }
                }
            }
        }
    }
    let results: Vec<Result<BoundOutcome>> = jobs
        .par_iter()
        .map(|(i, m, params)| {
            let job = JobSpec {
                source: Source::Named(String::new()),
                method: *m,
                params: *params,
                restarts: spec.restarts,
                seed: spec.seed,
                variant: spec.variant,
            };
            bound_for(&spec.inequalities[*i], &job)
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    let mut notes = Vec::new();
    for ((i, m, p), r) in jobs.iter().zip(results) {
        let o = r?;
        for n in o.notes.iter().filter(|_| *m == Method::Hierarchy) {
            notes.push(format!("{} d={:?}: {n}", spec.inequalities[*i].label(), p.d));
        }
        records.push(o.record);
    }
    Ok(ScanOutcome { records, notes })
}

/// Every breach of classical ≤ seesaw(d) ≤ hierarchy(d) (+ slack) in a scan.
pub fn ordering_violations(records: &[ResultRecord]) -> Vec<String> {
    let mut out = Vec::new();
    for s in records.iter().filter(|r| r.method == "seesaw") {
        if let Some(c) = s.classical {
            if s.value < c - SLACK {
                out.push(format!("{} d={:?}: seesaw {} below classical {c}", s.ineq, s.d, s.value));
            }
        }
        let bounds = records.iter().filter(|h| {
            h.ineq == s.ineq && h.method.starts_with("hierarchy") && (h.d == s.d || (h.d.is_none() && h.d1.is_some()))
        });
        for h in bounds {
            if s.value > h.value + SLACK {
                out.push(format!(
                    "{} d={:?}: seesaw {} above {} {} (d={:?})",
                    s.ineq, s.d, s.value, h.method, h.value, h.d
                ));
            }
        }
    }
    out
}

/// Classical vertex data of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexReport {
    Dimension { raw: u128, distinct: usize },
    Distinguishability { alice: usize, bob: usize, symbolic: usize, raw: u128 },
}

pub fn cmd_vertices(s: &Scenario) -> Result<VertexReport> {
    match &s.constraint {
        Constraint::Dimension { .. } => {
            let v = enum_vertices_dim(s)?;
            Ok(VertexReport::Dimension { raw: raw_vertex_count(s)?, distinct: v.distinct.len() })
        }
        Constraint::Distinguishability { d1, d2, .. } => {
            let a = enum_encoder_vertices_dist(s.nx, *d1)?.len();
            let b = enum_encoder_vertices_dist(s.ny, *d2)?.len();
            let symbolic = enum_encoder_vertices_symbolic(s.nx)?.len();
            // Encoder pairs times deterministic decoders on 2^(n-1) messages each.
            let ma = 1u32 << (s.nx - 1);
            let mb = 1u32 << (s.ny - 1);
            let raw = (a as u128) * (b as u128) * (s.nz as u128).pow(ma * mb);
            Ok(VertexReport::Distinguishability { alice: a, bob: b, symbolic, raw })
        }
    }
}

impl std::fmt::Display for VertexReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexReport::Dimension { raw, distinct } => {
                write!(f, "raw deterministic strategies: {raw}\ndistinct vertices: {distinct}")
            }
            VertexReport::Distinguishability { alice, bob, symbolic, raw } => write!(
                f,
                "encoder vertices: Alice {alice}, Bob {bob}\nencoder vertices with D as a coordinate: {symbolic}\nencoder pairs times decoders: {raw}"
            ),
        }
    }
}

/// Result of checking one inequality against its classical polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetRow {
    pub label: String,
    pub valid: bool,
    pub tight: bool,
    pub facet: bool,
    pub max_value: Rational64,
    pub rhs: Rational64,
    pub tight_dim: isize,
    pub polytope_dim: usize,
}

impl FacetRow {
    /// Dimension-bounded rows must be facets; distinguishability rows valid and tight.
    pub fn passes(&self, dist: bool) -> bool {
        if dist {
            self.valid && self.tight
        } else {
            self.facet
        }
    }
}

pub fn facet_row(ineq: &Inequality) -> Result<FacetRow> {
    let (d1, d2) = match &ineq.scenario.constraint {
        Constraint::Distinguishability { d1, d2, .. } => (Some(*d1), Some(*d2)),
        Constraint::Dimension { .. } => (None, None),
    };
    let c = facet_check(&ineq.scenario, &ineq.functional, d1, d2)?;
    Ok(FacetRow {
        label: ineq.label().to_string(),
        valid: c.valid,
        tight: c.is_tight(),
        facet: c.is_facet(),
        max_value: c.max_value,
        rhs: c.rhs,
        tight_dim: c.tight_dim,
        polytope_dim: c.polytope_dim,
    })
}

/// Full facet list of a dimension-bounded scenario as H-representation text.
pub fn cmd_facets(s: &Scenario) -> Result<(usize, String)> {
    let h = facet_enumerate_dim(s)?;
    Ok((h.inequalities.len(), write_h(&h)))
}
