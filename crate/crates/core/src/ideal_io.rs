//! Ideal file formats.
//!
//! JSON:
//! ```json
//! {"p": 101, "n_vars": 3, "variables": ["x0", "x1", "x2"],
//!  "quadrics": [[{"exps": [1, 1, 0], "c": 3}, {"exps": [0, 0, 2], "c": -1}]]}
//! ```
//! Text: one polynomial per line such as `3*x0*x1 - x2^2`. Lines starting
//! with `#` are comments, except the directives `# p: 101` and
//! `# vars: x0 x1 x2` which the writer emits so files round-trip.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactla::PrimeField;
use crate::polyring::{Poly, QuadricIdeal};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub exps: Vec<u32>,
    pub c: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct IdealJson {
    pub p: u64,
    pub n_vars: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variables: Option<Vec<String>>,
    pub quadrics: Vec<Vec<TermJson>>,
}

pub fn ideal_to_json(ideal: &QuadricIdeal) -> IdealJson {
    let f = ideal.field();
    let quadrics = ideal
        .generator_polys()
        .iter()
        .map(|q| {
            q.terms
                .iter()
                .map(|(e, &c)| TermJson {
                    exps: e.clone(),
                    c: f.to_signed(c),
                })
                .collect()
        })
        .collect();
    IdealJson {
        p: f.p(),
        n_vars: ideal.n_vars(),
        variables: ideal.variables().map(|v| v.to_vec()),
        quadrics,
    }
}

pub fn ideal_from_json(j: &IdealJson) -> Result<QuadricIdeal> {
    let f = PrimeField::new(j.p)?;
    let mut polys = Vec::with_capacity(j.quadrics.len());
    for q in &j.quadrics {
        let mut p = Poly::zero(j.n_vars);
        for t in q {
            if t.exps.len() != j.n_vars {
                return Err(Error::Parse(format!(
                    "term has {} exponents, expected {}",
                    t.exps.len(),
                    j.n_vars
                )));
            }
            p.add_term(f, t.exps.clone(), f.from_i64(t.c));
        }
        polys.push(p);
    }
    let ideal = QuadricIdeal::from_polys(f, j.n_vars, &polys)?;
    match &j.variables {
        Some(v) => ideal.with_variables(v.clone()),
        None => Ok(ideal),
    }
}

pub fn write_json(ideal: &QuadricIdeal) -> String {
    serde_json::to_string(&ideal_to_json(ideal)).expect("ideal serializes")
}

pub fn read_json(s: &str) -> Result<QuadricIdeal> {
    let j: IdealJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    ideal_from_json(&j)
}

/// SHA-256 of the canonical JSON encoding, hex encoded.
pub fn ideal_hash(ideal: &QuadricIdeal) -> String {
    hex::encode(Sha256::digest(write_json(ideal).as_bytes()))
}

pub fn format_poly(f: PrimeField, p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    // BTreeMap iterates ascending; reverse to lead with the largest monomial.
    for (k, (e, &c)) in p.terms.iter().rev().enumerate() {
        let v = f.to_signed(c);
        let (neg, mag) = (v < 0, v.unsigned_abs());
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        for (i, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => factors.push(names[i].clone()),
                _ => factors.push(format!("{}^{}", names[i], x)),
            }
        }
        if mag != 1 || factors.is_empty() {
            factors.insert(0, mag.to_string());
        }
        out.push_str(&factors.join("*"));
    }
    out
}

pub fn write_text(ideal: &QuadricIdeal) -> String {
    let names = ideal.variable_names();
    let f = ideal.field();
    let mut s = format!("# p: {}\n# vars: {}\n", f.p(), names.join(" "));
    for q in ideal.generator_polys() {
        s.push_str(&format_poly(f, &q, &names));
        s.push('\n');
    }
    s
}

/// Parses the text format. Without a `# vars:` directive the variables are
/// `x0 .. x{n-1}` with `n` one more than the largest index used; without
/// `# p:` the given default modulus applies.
pub fn read_text(s: &str, default_p: u64) -> Result<QuadricIdeal> {
    let mut p = default_p;
    let mut names: Option<Vec<String>> = None;
    let mut lines = Vec::new();
    for raw in s.lines() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim();
            if let Some(v) = c.strip_prefix("p:") {
                p = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad modulus directive: {raw}")))?;
            } else if let Some(v) = c.strip_prefix("vars:") {
                names = Some(v.split_whitespace().map(str::to_string).collect());
            }
            continue;
        }
        lines.push(line.to_string());
    }
    let f = PrimeField::new(p)?;
    let parsed: Vec<Vec<(i64, Vec<(String, u32)>)>> =
        lines.iter().map(|l| parse_terms(l)).collect::<Result<_>>()?;
    let names = match names {
        Some(n) => n,
        None => {
            let mut max = None;
            for terms in &parsed {
                for (_, fs) in terms {
                    for (name, _) in fs {
                        let idx = name
                            .strip_prefix('x')
                            .and_then(|d| d.parse::<usize>().ok())
                            .ok_or_else(|| {
                                Error::Parse(format!(
                                    "unknown variable {name} (declare names with '# vars:')"
                                ))
                            })?;
                        max = Some(max.map_or(idx, |m: usize| m.max(idx)));
                    }
                }
            }
            let n = max.map_or(0, |m| m + 1);
            (0..n).map(|i| format!("x{i}")).collect()
        }
    };
    let n = names.len();
    let mut polys = Vec::with_capacity(parsed.len());
    for terms in parsed {
        let mut poly = Poly::zero(n);
        for (c, fs) in terms {
            let mut e = vec![0u32; n];
            for (name, k) in fs {
                let i = names
                    .iter()
                    .position(|x| *x == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name}")))?;
                e[i] += k;
            }
            poly.add_term(f, e, f.from_i64(c));
        }
        polys.push(poly);
    }
    QuadricIdeal::from_polys(f, n, &polys)?.with_variables(names)
}

type Term = (i64, Vec<(String, u32)>);

fn parse_terms(line: &str) -> Result<Vec<Term>> {
    let compact: String = line.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for i in 1..=bytes.len() {
        if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^') {
            terms.push(parse_term(&compact[start..i])?);
            start = i;
        }
    }
    Ok(terms)
}

fn parse_term(t: &str) -> Result<Term> {
    let (sign, body) = match t.as_bytes().first() {
        Some(b'-') => (-1i64, &t[1..]),
        Some(b'+') => (1, &t[1..]),
        _ => (1, t),
    };
    if body.is_empty() {
        return Err(Error::Parse(format!("empty term in '{t}'")));
    }
    let mut coeff = 1i64;
    let mut factors = Vec::new();
    for factor in body.split('*') {
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in '{t}'")));
        }
        if factor.chars().all(|c| c.is_ascii_digit()) {
            let v: i64 = factor
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient '{factor}'")))?;
            coeff = coeff
                .checked_mul(v)
                .ok_or_else(|| Error::Parse(format!("coefficient overflow in '{t}'")))?;
            continue;
        }
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => (
                n,
                e.parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad exponent in '{factor}'")))?,
            ),
            None => (factor, 1),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse(format!("bad variable name '{name}'")));
        }
        factors.push((name.to_string(), exp));
    }
    Ok((sign * coeff, factors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let src = "# a comment\n3*x0*x1 - x2^2\nx0^2 + 2*x1*x2\n";
        let ideal = read_text(src, 101).unwrap();
        assert_eq!(ideal.n_vars(), 3);
        assert_eq!(ideal.num_quadrics(), 2);
        let again = read_text(&write_text(&ideal), 7).unwrap();
        assert_eq!(again, ideal);
    }

    #[test]
    fn json_round_trip() {
        let ideal = read_text("# vars: a b c\na*b - c^2\n", 101).unwrap();
        let j = write_json(&ideal);
        assert_eq!(read_json(&j).unwrap(), ideal);
        assert_eq!(ideal_hash(&ideal), ideal_hash(&read_json(&j).unwrap()));
    }

    #[test]
    fn rejects_non_quadrics() {
        assert!(read_text("x0*x1*x2\n", 101).is_err());
        assert!(read_text("x0 + x1\n", 101).is_err());
        assert!(read_text("x0**x1\n", 101).is_err());
    }
}
