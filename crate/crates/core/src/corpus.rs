//! Bundled inequalities and the JSON inequality format.
//!
//! ```json
//! {"id": "322-1", "name": "I1",
//!  "scenario": {"nx": 3, "ny": 2, "nz": 2},
//!  "constraint": {"type": "dimension", "d": 2},
//!  "terms": [{"x": 1, "y": 2, "z": 1, "c": -1}],
//!  "rhs": {"const": 2, "d1": 0, "d2": 0}}
//! ```
//! Inputs `x`, `y` are 1-based. Outcome `z` runs over 0..nz, with 0 the
//! label usually left implicit. Coefficients accept integers, decimals or
//! `"p/q"` strings.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Constraint, Functional, Rhs, Scenario};

const FILES: &[(&str, &str)] = &[
    ("322", include_str!("../corpus/322.json")),
    ("422", include_str!("../corpus/422.json")),
    ("323", include_str!("../corpus/323.json")),
    ("432", include_str!("../corpus/432.json")),
    ("332d", include_str!("../corpus/332d.json")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational64> {
        match self {
            Number::Int(i) => Ok(Rational64::from_integer(*i)),
            Number::Float(f) => decimal_to_rational(&format!("{f}")),
            Number::Text(s) => parse_rational(s),
        }
    }

    pub fn from_rational(r: Rational64) -> Self {
        if r.is_integer() {
            Number::Int(r.to_integer())
        } else {
            Number::Text(r.to_string())
        }
    }
}

fn decimal_to_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::Parse(format!("not a number: `{s}`"));
    let s = s.trim();
    if s.contains(['e', 'E']) {
        let f: f64 = s.parse().map_err(|_| bad())?;
        return Rational64::approximate_float(f).ok_or_else(bad);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if frac.len() > 17 {
        let f: f64 = s.parse().map_err(|_| bad())?;
        return Rational64::approximate_float(f).ok_or_else(bad);
    }
    let digits = format!("{int}{frac}");
    let num: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
    let r = Rational64::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Parses `"3"`, `"-2/3"`, or `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let q: i64 = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        if q == 0 {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational64::new(p, q));
    }
    decimal_to_rational(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ConstraintSpec {
    Dimension {
        d: usize,
    },
    Distinguishability {
        #[serde(rename = "D1")]
        d1: Number,
        #[serde(rename = "D2")]
        d2: Number,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub c: Number,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhsSpec {
    #[serde(rename = "const")]
    pub constant: Number,
    #[serde(default = "zero_number")]
    pub d1: Number,
    #[serde(default = "zero_number")]
    pub d2: Number,
}

fn zero_number() -> Number {
    Number::Int(0)
}

/// On-disk form of one inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalitySpec {
    #[serde(default)]
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub scenario: ScenarioSpec,
    pub constraint: ConstraintSpec,
    pub terms: Vec<TermSpec>,
    pub rhs: RhsSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub reference: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub marked: bool,
}

/// A parsed inequality ready for computation.
#[derive(Debug, Clone, PartialEq)]
pub struct Inequality {
    pub id: String,
    pub name: Option<String>,
    pub scenario: Scenario,
    pub functional: Functional,
    /// Published values keyed like `classical`, `seesaw_d2`, `hierarchy_d3`.
    pub reference: BTreeMap<String, f64>,
    pub marked: bool,
}

impl Inequality {
    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.id)
    }

    pub fn reference(&self, key: &str) -> Option<f64> {
        self.reference.get(key).copied()
    }

    pub fn to_spec(&self) -> InequalitySpec {
        let s = &self.scenario;
        let constraint = match &s.constraint {
            Constraint::Dimension { d } => ConstraintSpec::Dimension { d: *d },
            Constraint::Distinguishability { d1, d2, .. } => ConstraintSpec::Distinguishability {
                d1: Number::from_rational(*d1),
                d2: Number::from_rational(*d2),
            },
        };
        InequalitySpec {
            id: self.id.clone(),
            name: self.name.clone(),
            scenario: ScenarioSpec { nx: s.nx, ny: s.ny, nz: s.nz },
            constraint,
            terms: self
                .functional
                .terms()
                .map(|(x, y, z, c)| TermSpec { x: x + 1, y: y + 1, z, c: Number::from_rational(c) })
                .collect(),
            rhs: RhsSpec {
                constant: Number::from_rational(self.functional.rhs.constant),
                d1: Number::from_rational(self.functional.rhs.d1),
                d2: Number::from_rational(self.functional.rhs.d2),
            },
            reference: self.reference.clone(),
            marked: self.marked,
        }
    }
}

impl InequalitySpec {
    pub fn build(&self) -> Result<Inequality> {
        let ScenarioSpec { nx, ny, nz } = self.scenario;
        let scenario = match &self.constraint {
            ConstraintSpec::Dimension { d } => Scenario::dimension(nx, ny, nz, *d)?,
            ConstraintSpec::Distinguishability { d1, d2 } => {
                Scenario::distinguishability(nx, ny, nz, d1.to_rational()?, d2.to_rational()?)?
            }
        };
        let mut f = Functional::zeros(nx, ny, nz);
        for t in &self.terms {
            if t.x == 0 || t.x > nx || t.y == 0 || t.y > ny || t.z >= nz {
                return Err(Error::Parse(format!(
                    "term ({}, {}, {}) outside scenario ({nx},{ny},{nz}); x and y are 1-based, z is 0-based",
                    t.x, t.y, t.z
                )));
            }
            f.add(t.x - 1, t.y - 1, t.z, t.c.to_rational()?);
        }
        f.rhs = Rhs {
            constant: self.rhs.constant.to_rational()?,
            d1: self.rhs.d1.to_rational()?,
            d2: self.rhs.d2.to_rational()?,
        };
        f.check_scenario(&scenario)?;
        Ok(Inequality {
            id: self.id.clone(),
            name: self.name.clone(),
            scenario,
            functional: f,
            reference: self.reference.clone(),
            marked: self.marked,
        })
    }
}

pub fn parse_inequality(json: &str) -> Result<Inequality> {
    let spec: InequalitySpec = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    spec.build()
}

pub fn parse_inequality_list(json: &str) -> Result<Vec<Inequality>> {
    let specs: Vec<InequalitySpec> = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    specs.iter().map(InequalitySpec::build).collect()
}

pub fn to_json(ineq: &Inequality) -> String {
    serde_json::to_string(&ineq.to_spec()).expect("inequality serializes")
}

/// Every bundled inequality, grouped by table in the order (3,2,2), (4,2,2),
/// (3,2,3), (4,3,2), (3,3,2) distinguishability.
pub fn all() -> &'static [Inequality] {
    static CORPUS: OnceLock<Vec<Inequality>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        FILES
            .iter()
            .flat_map(|(tag, text)| {
                parse_inequality_list(text).unwrap_or_else(|e| panic!("bundled corpus {tag} is malformed: {e}"))
            })
            .collect()
    })
}

/// Rows of one bundled table: `"322"`, `"422"`, `"323"`, `"432"` or `"332d"`.
pub fn table(tag: &str) -> Vec<&'static Inequality> {
    let prefix = format!("{tag}-");
    all().iter().filter(|i| i.id.starts_with(&prefix)).collect()
}

pub fn table_tags() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(t, _)| *t)
}

/// Looks up by short name (`I1`..`I6`, case-insensitive) or row id (`432-17`).
pub fn named(key: &str) -> Result<&'static Inequality> {
    all()
        .iter()
        .find(|i| i.id.eq_ignore_ascii_case(key) || i.name.as_deref().is_some_and(|n| n.eq_ignore_ascii_case(key)))
        .ok_or_else(|| Error::UnknownInequality(key.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes() {
        let sizes: Vec<usize> = table_tags().map(|t| table(t).len()).collect();
        assert_eq!(sizes, vec![2, 3, 6, 53, 54]);
    }

    #[test]
    fn named_lookup() {
        for n in ["I1", "I2", "I3", "I4", "I5", "I6", "i4"] {
            named(n).unwrap();
        }
        assert_eq!(named("I1").unwrap().id, "322-1");
        assert!(matches!(named("I9"), Err(Error::UnknownInequality(_))));
    }

    #[test]
    fn rational_tokens() {
        assert_eq!(parse_rational("2/3").unwrap(), Rational64::new(2, 3));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational64::new(-1, 4));
        assert_eq!(parse_rational("7").unwrap(), Rational64::from_integer(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn json_round_trip() {
        for ineq in all() {
            let back = parse_inequality(&to_json(ineq)).unwrap();
            assert_eq!(&back, ineq);
        }
    }

    #[test]
    fn out_of_range_term_rejected() {
        let bad = r#"{"scenario":{"nx":2,"ny":2,"nz":2},"constraint":{"type":"dimension","d":2},
            "terms":[{"x":3,"y":1,"z":1,"c":1}],"rhs":{"const":1}}"#;
        assert!(matches!(parse_inequality(bad), Err(Error::Parse(_))));
    }
}
