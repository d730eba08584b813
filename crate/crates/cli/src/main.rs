use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use commbounds::corpus::{self, parse_rational, Inequality};
use commbounds::hierarchy::Variant;
use commbounds::model::Scenario;
use commbounds::Result;
use commbounds_cli::jobs::{self, Method, Params, ScanSpec, Source};
use commbounds_cli::record::{self, Format, ResultRecord};
use commbounds_cli::strategy::strategy_to_json;
use num_rational::Rational64;

/// Classical and quantum bounds for two-sender, one-receiver communication games.
///
/// Set COMMBOUNDS_THREADS to limit the number of worker threads.
#[derive(Parser)]
#[command(name = "commbounds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound one inequality with one method.
    Bound(BoundArgs),
    /// Evaluate an explicit strategy file and validate it.
    Verify(VerifyArgs),
    /// Seesaw and hierarchy values over a range of dimensions.
    Scan(ScanArgs),
    /// Count classical vertices of a scenario.
    Vertices(ScenarioArgs),
    /// Facet enumeration, or facet checks of bundled inequalities.
    Facets(FacetArgs),
    /// List the bundled inequalities.
    List,
}

#[derive(Args)]
struct IneqArgs {
    /// Bundled inequality, by name (I1..I6) or row id (432-17).
    #[arg(long)]
    ineq: Option<String>,
    /// Inequality in the JSON file format.
    #[arg(long)]
    ineq_file: Option<PathBuf>,
}

impl IneqArgs {
    fn source(&self) -> Result<Source> {
        Source::from_flags(self.ineq.clone(), self.ineq_file.clone())
    }
}

#[derive(Args)]
struct ConstraintArgs {
    /// Dimension bound (seesaw state dimension for distinguishability games).
    #[arg(long)]
    d: Option<usize>,
    /// Distinguishability bound of the first sender, e.g. 2/3.
    #[arg(long = "D1", value_parser = rational)]
    d1: Option<Rational64>,
    /// Distinguishability bound of the second sender.
    #[arg(long = "D2", value_parser = rational)]
    d2: Option<Rational64>,
}

impl ConstraintArgs {
    fn params(&self) -> Params {
        Params { d: self.d, d1: self.d1, d2: self.d2 }
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Seesaw restarts.
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hierarchy variant: paper or extended.
    #[arg(long, default_value = "paper")]
    variant: Variant,
}

#[derive(Args)]
struct OutputArgs {
    /// Write records here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// text, csv or json.
    #[arg(long, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    ineq: IneqArgs,
    /// classical, seesaw or hierarchy.
    #[arg(long)]
    method: Method,
    #[command(flatten)]
    constraint: ConstraintArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Save the best seesaw strategy as a strategy file.
    #[arg(long)]
    strategy_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Strategy file path, or a bundled strategy name (i1, i2, i3, i5, i6, ...).
    #[arg(long)]
    strategy: String,
    /// Defaults to the inequality named inside the strategy file.
    #[command(flatten)]
    ineq: IneqArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    ineq: IneqArgs,
    /// Every bundled dimension-bounded inequality.
    #[arg(long)]
    all: bool,
    /// Every row of one bundled table (322, 422, 323, 432, 332d).
    #[arg(long)]
    table: Option<String>,
    /// Dimensions, e.g. 2..5.
    #[arg(long, default_value = "2..3")]
    d_range: String,
    /// Comma-separated methods.
    #[arg(long, default_value = "classical,seesaw,hierarchy", value_delimiter = ',')]
    methods: Vec<Method>,
    /// Distinguishability bound of the first sender for distinguishability rows.
    #[arg(long = "D1", value_parser = rational)]
    d1: Option<Rational64>,
    /// Distinguishability bound of the second sender.
    #[arg(long = "D2", value_parser = rational)]
    d2: Option<Rational64>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    ineq: IneqArgs,
    /// Scenario as nx,ny,nz.
    #[arg(long)]
    scenario: Option<String>,
    #[command(flatten)]
    constraint: ConstraintArgs,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario> {
        if let Some(text) = &self.scenario {
            let n: Vec<usize> = text
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| commbounds::Error::Parse(format!("bad scenario `{text}` (use nx,ny,nz)")))?;
            let [nx, ny, nz] = n[..] else {
                return Err(commbounds::Error::Parse(format!("bad scenario `{text}` (use nx,ny,nz)")));
            };
            let c = &self.constraint;
            return match (c.d1, c.d2) {
                (Some(d1), Some(d2)) => Scenario::distinguishability(nx, ny, nz, d1, d2),
                (None, None) => Scenario::dimension(nx, ny, nz, c.d.unwrap_or(2)),
                _ => Err(commbounds::Error::Validation("give both --D1 and --D2".into())),
            };
        }
        let ineq = self.ineq.source()?.load()?;
        Ok(jobs::setting(&ineq, &self.constraint.params())?.scenario)
    }
}

#[derive(Args)]
struct FacetArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Check every row of one bundled table instead.
    #[arg(long)]
    table: Option<String>,
    /// Write the facet list here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn rational(s: &str) -> std::result::Result<Rational64, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// What went wrong, for the exit code.
enum Failure {
    Error(commbounds::Error),
    /// The command ran but found problems it already reported.
    Reported,
}

impl From<commbounds::Error> for Failure {
    fn from(e: commbounds::Error) -> Self {
        Failure::Error(e)
    }
}

type Run = std::result::Result<(), Failure>;

fn write_output(text: &str, out: &Option<PathBuf>) -> Run {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Error(commbounds::Error::Parse(format!("{}: {e}", p.display())))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Notes go to stdout for text output and to stderr otherwise.
fn note(format: Format, line: &str) {
    if format == Format::Text {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn emit(records: &[ResultRecord], o: &OutputArgs) -> Run {
    write_output(&record::render(records, o.format), &o.out)
}

fn bound(a: BoundArgs) -> Run {
    let job = jobs::JobSpec {
        source: a.ineq.source()?,
        method: a.method,
        params: a.constraint.params(),
        restarts: a.solver.restarts,
        seed: a.solver.seed,
        variant: a.solver.variant,
    };
    let o = jobs::cmd_bound(&job)?;
    emit(std::slice::from_ref(&o.record), &a.output)?;
    note(a.output.format, &format!("classical bound: {}", o.classical));
    for n in &o.notes {
        note(a.output.format, n);
    }
    if let Some(v) = &o.verdict {
        note(a.output.format, v);
    }
    if let (Some(path), Some(s)) = (&a.strategy_out, &o.strategy) {
        write_output(&strategy_to_json(s, Some(&o.record.ineq)), &Some(path.clone()))?;
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Run {
    let file = jobs::load_strategy(&a.strategy)?;
    let ineq = match (&a.ineq.ineq, &a.ineq.ineq_file, &file.inequality) {
        (None, None, Some(name)) => corpus::named(name)?.clone(),
        _ => a.ineq.source()?.load()?,
    };
    let o = jobs::cmd_verify(file, &ineq)?;
    emit(std::slice::from_ref(&o.record), &a.output)?;
    if o.is_valid() {
        note(a.output.format, "strategy is valid");
        return Ok(());
    }
    eprintln!("warning: strategy failed validation; the value above is the raw computed value");
    for issue in &o.issues {
        eprintln!("  - {issue}");
    }
    Err(Failure::Reported)
}

fn scan_inequalities(a: &ScanArgs) -> Result<Vec<Inequality>> {
    let picked = [a.all, a.table.is_some(), a.ineq.ineq.is_some() || a.ineq.ineq_file.is_some()];
    if picked.iter().filter(|b| **b).count() != 1 {
        return Err(commbounds::Error::Validation("give exactly one of --ineq, --ineq-file, --table, --all".into()));
    }
    if a.all {
        return Ok(corpus::all().iter().filter(|i| !i.scenario.is_distinguishability()).cloned().collect());
    }
    if let Some(t) = &a.table {
        let rows: Vec<Inequality> = corpus::table(t).into_iter().cloned().collect();
        if rows.is_empty() {
            return Err(commbounds::Error::UnknownInequality(format!("table {t}")));
        }
        return Ok(rows);
    }
    Ok(vec![a.ineq.source()?.load()?])
}

fn scan(a: ScanArgs) -> Run {
    let spec = ScanSpec {
        inequalities: scan_inequalities(&a)?,
        dims: jobs::parse_range(&a.d_range)?,
        methods: a.methods.clone(),
        restarts: a.solver.restarts,
        seed: a.solver.seed,
        variant: a.solver.variant,
        params: Params { d: None, d1: a.d1, d2: a.d2 },
    };
    let o = jobs::cmd_scan(&spec)?;
    emit(&o.records, &a.output)?;
    for n in &o.notes {
        eprintln!("{n}");
    }
    let bad = jobs::ordering_violations(&o.records);
    if bad.is_empty() {
        note(a.output.format, "ordering classical <= seesaw <= hierarchy holds on every row");
        return Ok(());
    }
    for b in &bad {
        eprintln!("ordering violated: {b}");
    }
    Err(Failure::Reported)
}

fn vertices(a: ScenarioArgs) -> Run {
    println!("{}", jobs::cmd_vertices(&a.scenario()?)?);
    Ok(())
}

fn facets(a: FacetArgs) -> Run {
    let rows: Vec<&Inequality> = match (&a.table, &a.scenario.ineq.ineq, &a.scenario.ineq.ineq_file) {
        (Some(t), _, _) => corpus::table(t),
        (None, Some(_), _) | (None, _, Some(_)) => {
            let ineq = a.scenario.ineq.source()?.load()?;
            return check_rows(&[ineq]);
        }
        (None, None, None) => {
            let (n, text) = jobs::cmd_facets(&a.scenario.scenario()?)?;
            eprintln!("{n} facets");
            return write_output(&text, &a.out);
        }
    };
    if rows.is_empty() {
        return Err(commbounds::Error::UnknownInequality(format!("table {}", a.table.unwrap_or_default())).into());
    }
    check_rows(&rows.into_iter().cloned().collect::<Vec<_>>())
}

fn check_rows(rows: &[Inequality]) -> Run {
    let mut ok = true;
    for ineq in rows {
        let r = jobs::facet_row(ineq)?;
        let pass = r.passes(ineq.scenario.is_distinguishability());
        ok &= pass;
        println!(
            "{} {}: valid={} tight={} facet={} max={} rhs={} tight_dim={} dim={}",
            if pass { "ok  " } else { "FAIL" },
            r.label,
            r.valid,
            r.tight,
            r.facet,
            r.max_value,
            r.rhs,
            r.tight_dim,
            r.polytope_dim
        );
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Reported)
    }
}

fn list() -> Run {
    for i in corpus::all() {
        let name = i.name.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
        let refs: Vec<String> = i.reference.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{}{name}: {}", i.id, refs.join(" "));
    }
    Ok(())
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("COMMBOUNDS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bound(a) => bound(a),
        Command::Verify(a) => verify(a),
        Command::Scan(a) => scan(a),
        Command::Vertices(a) => vertices(a),
        Command::Facets(a) => facets(a),
        Command::List => list(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Reported) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
