//! Result records and their CSV / JSON / text forms.

use std::fmt::Write as _;
use std::str::FromStr;

use commbounds::{Error, Result};
use serde::{Deserialize, Serialize};

/// One computed number. Column order is fixed so reports diff cleanly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub ineq: String,
    pub d: Option<usize>,
    #[serde(rename = "D1")]
    pub d1: Option<String>,
    #[serde(rename = "D2")]
    pub d2: Option<String>,
    pub method: String,
    pub value: f64,
    pub classical: Option<f64>,
    pub paper_value: Option<f64>,
    pub seed: Option<u64>,
    pub wall_ms: u64,
}

pub const CSV_HEADER: &str = "ineq,d,D1,D2,method,value,classical,paper_value,seed,wall_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!("unknown format `{s}` (text, csv, json)"))),
        }
    }
}

pub fn to_csv(records: &[ResultRecord]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("record serializes");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8");
    format!("{CSV_HEADER}\n{body}")
}

pub fn from_csv(text: &str) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Parse(format!("CSV header must be `{CSV_HEADER}`")));
    }
    r.deserialize().map(|row| row.map_err(|e| Error::Parse(e.to_string()))).collect()
}

pub fn to_json(records: &[ResultRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize") + "\n"
}

pub fn from_json(text: &str) -> Result<Vec<ResultRecord>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

pub fn to_text(records: &[ResultRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let constraint = match (&r.d, &r.d1, &r.d2) {
            (Some(d), None, None) => format!("d={d}"),
            (d, d1, d2) => format!("D1={} D2={} d={}", opt(d1), opt(d2), opt(d)),
        };
        let _ = write!(out, "{} [{}] {}: {:.6}", r.ineq, constraint, r.method, r.value);
        if let Some(c) = r.classical {
            let _ = write!(out, "  classical {c}");
        }
        if let Some(p) = r.paper_value {
            let _ = write!(out, "  reference {p}");
        }
        let _ = writeln!(out, "  ({} ms)", r.wall_ms);
    }
    out
}

pub fn render(records: &[ResultRecord], format: Format) -> String {
    match format {
        Format::Text => to_text(records),
        Format::Csv => to_csv(records),
        Format::Json => to_json(records),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ResultRecord> {
        vec![
            ResultRecord {
                ineq: "I1".into(),
                d: Some(2),
                d1: None,
                d2: None,
                method: "seesaw".into(),
                value: 1.0 + 2f64.sqrt(),
                classical: Some(2.0),
                paper_value: Some(2.4142),
                seed: Some(7),
                wall_ms: 12,
            },
            ResultRecord {
                ineq: "I6".into(),
                d: None,
                d1: Some("2/3".into()),
                d2: Some("2/3".into()),
                method: "hierarchy".into(),
                value: 7.212_655_207_096_805,
                classical: Some(5.0),
                paper_value: None,
                seed: None,
                wall_ms: 300,
            },
        ]
    }

    #[test]
    fn csv_round_trip() {
        let text = to_csv(&sample());
        assert!(text.starts_with(CSV_HEADER));
        let back = from_csv(&text).unwrap();
        assert_eq!(back, sample());
        assert_eq!(to_csv(&back), text);
    }

    #[test]
    fn json_round_trip() {
        let text = to_json(&sample());
        let back = from_json(&text).unwrap();
        assert_eq!(back, sample());
        assert_eq!(to_json(&back), text);
    }
}
