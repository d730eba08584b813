//! Strategy files.
//!
//! ```json
//! {"inequality": "I1",
//!  "alice": [[[1, 0], [0, 0]], ...],
//!  "bob":   [[[1, 0], [0, 0]], ...],
//!  "povm":  ["complement", {"vectors": [[[0, 0], [0, 0], [0, 0], [1, 0]]], "weights": [1]}]}
//! ```
//! Complex numbers are `[re, im]` pairs. A state is either a ket (list of
//! pairs) or a density matrix (list of rows). A POVM element is a matrix on
//! the joint space, a weighted sum of projectors `{"vectors", "weights"}`, or
//! the string `"complement"` (identity minus the other elements; at most one).

use commbounds::model::QuantumStrategy;
use commbounds::numerics::{ComplexMatrix, C64};
use commbounds::{Error, Result};
use serde_json::{json, Value};

const BUNDLED: &[(&str, &str)] = &[
    ("i1", include_str!("../strategies/i1.json")),
    ("i1_printed", include_str!("../strategies/i1_printed.json")),
    ("i2", include_str!("../strategies/i2.json")),
    ("i3", include_str!("../strategies/i3.json")),
    ("i5", include_str!("../strategies/i5.json")),
    ("i5_printed", include_str!("../strategies/i5_printed.json")),
    ("i6", include_str!("../strategies/i6.json")),
];

/// Names of the bundled strategy files.
pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// Text of a bundled strategy file, by name (`i1`, `I5_printed`, ...).
pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| n.eq_ignore_ascii_case(name)).map(|(_, t)| *t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyFile {
    pub inequality: Option<String>,
    pub note: Option<String>,
    pub strategy: QuantumStrategy,
    /// Defects visible only in the file itself, such as unnormalized kets.
    pub warnings: Vec<String>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn complex(v: &Value, what: &str) -> Result<C64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(bad(format!("{what}: complex entries must be [re, im] numbers"))),
        },
        _ => Err(bad(format!("{what}: complex entries must be [re, im] pairs"))),
    }
}

fn ket(v: &Value, what: &str) -> Result<Vec<C64>> {
    let items = v.as_array().ok_or_else(|| bad(format!("{what}: expected a list")))?;
    items.iter().map(|e| complex(e, what)).collect()
}

/// Depth of nesting below `v`: 2 for a ket, 3 for a matrix.
fn depth(v: &Value) -> usize {
    match v {
        Value::Array(a) => 1 + a.first().map_or(0, depth),
        _ => 0,
    }
}

fn matrix(v: &Value, what: &str) -> Result<ComplexMatrix> {
    let rows = v.as_array().ok_or_else(|| bad(format!("{what}: expected a matrix")))?;
    let n = rows.len();
    let mut data = Vec::with_capacity(n * n);
    for row in rows {
        let r = ket(row, what)?;
        if r.len() != n {
            return Err(bad(format!("{what}: matrix is not square")));
        }
        data.extend(r);
    }
    ComplexMatrix::new(n, n, data)
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn state(v: &Value, what: &str, warnings: &mut Vec<String>) -> Result<ComplexMatrix> {
    match depth(v) {
        2 => {
            let k = ket(v, what)?;
            let n = norm_sqr(&k);
            if (n - 1.0).abs() > 1e-9 {
                warnings.push(format!("{what} ket has squared norm {n:.9}"));
            }
            Ok(ComplexMatrix::outer(&k))
        }
        3 => matrix(v, what),
        _ => Err(bad(format!("{what}: expected a ket or a density matrix"))),
    }
}

enum Element {
    Complement,
    Effect(ComplexMatrix),
}

fn element(v: &Value, what: &str, warnings: &mut Vec<String>) -> Result<Element> {
    match v {
        Value::String(s) if s == "complement" => Ok(Element::Complement),
        Value::Object(o) => {
            let vectors = o
                .get("vectors")
                .and_then(Value::as_array)
                .ok_or_else(|| bad(format!("{what}: expected a `vectors` list")))?;
            let weights: Vec<f64> = match o.get("weights") {
                None => vec![1.0; vectors.len()],
                Some(w) => w
                    .as_array()
                    .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
                    .ok_or_else(|| bad(format!("{what}: `weights` must be numbers")))?,
            };
            if weights.len() != vectors.len() || vectors.is_empty() {
                return Err(bad(format!("{what}: needs as many weights as vectors, and at least one")));
            }
            let mut acc: Option<ComplexMatrix> = None;
            for (k, (vec, w)) in vectors.iter().zip(&weights).enumerate() {
                let kv = ket(vec, what)?;
                let n = norm_sqr(&kv);
                if (n - 1.0).abs() > 1e-9 {
                    warnings.push(format!("{what} vector {} has squared norm {n:.9}", k + 1));
                }
                let term = ComplexMatrix::outer(&kv).scale(*w);
                acc = Some(match acc {
                    None => term,
                    Some(a) => {
                        if a.rows() != term.rows() {
                            return Err(bad(format!("{what}: vectors have different lengths")));
                        }
                        &a + &term
                    }
                });
            }
            Ok(Element::Effect(acc.expect("at least one vector")))
        }
        _ if depth(v) == 3 => Ok(Element::Effect(matrix(v, what)?)),
        _ => Err(bad(format!("{what}: expected a matrix, a vectors object or \"complement\""))),
    }
}

pub fn parse_strategy(text: &str) -> Result<StrategyFile> {
    let root: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let field = |k: &str| root.get(k).and_then(Value::as_array).ok_or_else(|| bad(format!("missing `{k}` list")));
    let mut warnings = Vec::new();
    let mut states = |k: &str, who: &str| -> Result<Vec<ComplexMatrix>> {
        field(k)?
            .iter()
            .enumerate()
            .map(|(i, v)| state(v, &format!("{who} state {}", i + 1), &mut warnings))
            .collect()
    };
    let alice_states = states("alice", "Alice")?;
    let bob_states = states("bob", "Bob")?;

    let elements = field("povm")?
        .iter()
        .enumerate()
        .map(|(z, v)| element(v, &format!("effect M_{z}"), &mut warnings))
        .collect::<Result<Vec<_>>>()?;
    let holes = elements.iter().filter(|e| matches!(e, Element::Complement)).count();
    if holes > 1 {
        return Err(bad("at most one POVM element may be \"complement\""));
    }
    let n = elements
        .iter()
        .find_map(|e| match e {
            Element::Effect(m) => Some(m.rows()),
            Element::Complement => None,
        })
        .unwrap_or_else(|| {
            let d = |s: &[ComplexMatrix]| s.first().map_or(0, |m| m.rows());
            d(&alice_states) * d(&bob_states)
        });
    let mut rest = ComplexMatrix::identity(n);
    for e in &elements {
        if let Element::Effect(m) = e {
            if m.rows() != n {
                return Err(Error::Dimension("POVM elements have different sizes".into()));
            }
            rest = &rest - m;
        }
    }
    let povm = elements
        .into_iter()
        .map(|e| match e {
            Element::Complement => rest.clone(),
            Element::Effect(m) => m,
        })
        .collect();

    let text_field = |k: &str| root.get(k).and_then(Value::as_str).map(str::to_string);
    Ok(StrategyFile {
        inequality: text_field("inequality"),
        note: text_field("note"),
        strategy: QuantumStrategy { alice_states, bob_states, povm },
        warnings,
    })
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let n = m.rows();
    Value::Array((0..n).map(|i| Value::Array((0..m.cols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())).collect())
}

/// Writes every operator as an explicit matrix.
pub fn strategy_to_json(s: &QuantumStrategy, inequality: Option<&str>) -> String {
    let list = |ms: &[ComplexMatrix]| Value::Array(ms.iter().map(matrix_json).collect());
    let mut root = json!({
        "alice": list(&s.alice_states),
        "bob": list(&s.bob_states),
        "povm": list(&s.povm),
    });
    if let Some(name) = inequality {
        root["inequality"] = json!(name);
    }
    serde_json::to_string_pretty(&root).expect("strategy serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_files_parse() {
        for name in bundled_names() {
            let f = parse_strategy(bundled(name).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(f.strategy.povm[0].rows(), 4, "{name}");
        }
    }

    #[test]
    fn round_trip() {
        let f = parse_strategy(bundled("i3").unwrap()).unwrap();
        let back = parse_strategy(&strategy_to_json(&f.strategy, Some("I3"))).unwrap();
        assert_eq!(back.inequality.as_deref(), Some("I3"));
        for (a, b) in f.strategy.povm.iter().zip(&back.strategy.povm) {
            assert!(a.max_abs_diff(b) < 1e-15);
        }
    }

    #[test]
    fn rejects_two_complements() {
        let t = r#"{"alice": [[[1,0],[0,0]]], "bob": [[[1,0],[0,0]]], "povm": ["complement", "complement"]}"#;
        assert!(parse_strategy(t).is_err());
    }

    #[test]
    fn unnormalized_vectors_are_reported() {
        let f = parse_strategy(bundled("i6").unwrap()).unwrap();
        assert!(f.warnings.iter().any(|w| w.contains("squared norm")), "{:?}", f.warnings);
    }
}
