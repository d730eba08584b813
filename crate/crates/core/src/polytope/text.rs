//! Plain-text H and V representations.
//!
//! H rows read `b  -a_1 ... -a_n`, meaning `b - a·x >= 0`; a leading `=` marks
//! an equality. V rows read `1  x_1 ... x_n`. Entries are integers or `p/q`.
//! `#` starts a comment.
//!
//! ```text
//! # unit square
//! 0  1  0
//! 1 -1  0
//! 0  0  1
//! 1  0 -1
//! ```

use std::fmt::Write;

use num_traits::{One, Zero};

use super::{HPolytope, HalfSpace, VPolytope, Q};
use crate::error::{Error, Result};

fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn parse_q(tok: &str) -> Result<Q> {
    tok.parse::<Q>().map_err(|_| Error::Parse(format!("not a rational number: `{tok}`")))
}

fn rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn write_h(h: &HPolytope) -> String {
    let mut s = format!("# H-representation, dimension {}\n", h.dim);
    let _ = writeln!(s, "# {} equalities, {} inequalities", h.equalities.len(), h.inequalities.len());
    for (mark, list) in [("= ", &h.equalities), ("", &h.inequalities)] {
        for hs in list {
            let mut cols = vec![fmt_q(&hs.b)];
            cols.extend(hs.a.iter().map(|c| fmt_q(&-c)));
            let _ = writeln!(s, "{mark}{}", cols.join(" "));
        }
    }
    s
}

pub fn parse_h(text: &str) -> Result<HPolytope> {
    let mut out: Option<HPolytope> = None;
    for (line, l) in rows(text) {
        let (eq, body) = match l.strip_prefix('=') {
            Some(rest) => (true, rest),
            None => (false, l),
        };
        let vals: Vec<Q> = body.split_whitespace().map(parse_q).collect::<Result<_>>()?;
        if vals.is_empty() {
            return Err(Error::Parse(format!("line {line}: empty row")));
        }
        let h = out.get_or_insert_with(|| HPolytope::new(vals.len() - 1));
        if vals.len() != h.dim + 1 {
            return Err(Error::Parse(format!("line {line}: expected {} columns, got {}", h.dim + 1, vals.len())));
        }
        let hs = HalfSpace::new(vals[1..].iter().map(|c| -c).collect(), vals[0].clone());
        if eq {
            h.equalities.push(hs);
        } else {
            h.inequalities.push(hs);
        }
    }
    out.ok_or_else(|| Error::Parse("no rows".into()))
}

pub fn write_v(v: &VPolytope) -> String {
    let mut s = format!("# V-representation, dimension {}\n# {} vertices\n", v.dim, v.vertices.len());
    for x in &v.vertices {
        let mut cols = vec!["1".to_string()];
        cols.extend(x.iter().map(fmt_q));
        let _ = writeln!(s, "{}", cols.join(" "));
    }
    s
}

pub fn parse_v(text: &str) -> Result<VPolytope> {
    let mut dim = None;
    let mut vertices = Vec::new();
    for (line, l) in rows(text) {
        let vals: Vec<Q> = l.split_whitespace().map(parse_q).collect::<Result<_>>()?;
        let Some((lead, rest)) = vals.split_first() else { continue };
        if !lead.is_one() {
            return Err(Error::Parse(format!(
                "line {line}: vertex rows start with 1{}",
                if lead.is_zero() { "; rays are not supported" } else { "" }
            )));
        }
        let d = *dim.get_or_insert(rest.len());
        if rest.len() != d {
            return Err(Error::Parse(format!("line {line}: expected {} columns, got {}", d + 1, vals.len())));
        }
        vertices.push(rest.to_vec());
    }
    Ok(VPolytope::new(dim.ok_or_else(|| Error::Parse("no rows".into()))?, vertices))
}
