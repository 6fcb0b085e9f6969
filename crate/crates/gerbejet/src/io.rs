//! Text and JSON input. Polynomials are written as sums of terms such as
//! `3/2*x1^2*s12 - x2 + 1/3`; indices in names and JSON are 1-based.

use num_traits::{One, Zero};
use pform_core::rational::{self, Rational};
use serde::{Deserialize, Serialize};

use crate::connection::GerbeConnection;
use crate::error::{JetError, Result};
use crate::poly::{JetPoly, JetSpace};
use crate::special::FormField;

fn bad(msg: String) -> JetError {
    JetError::Invalid(msg)
}

/// 1-based digits of an index such as the `12` in `s12`.
fn digits(s: &str, whole: &str) -> Result<Vec<usize>> {
    s.chars()
        .map(|c| c.to_digit(10).filter(|&d| d >= 1).map(|d| d as usize - 1))
        .collect::<Option<Vec<_>>>()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| bad(format!("bad index in {whole:?}")))
}

/// Variable index and sign of a name like `x3`, `s2` or `s21`.
fn variable(space: JetSpace, name: &str) -> Result<(usize, i64)> {
    if let Some(rest) = name.strip_prefix('x') {
        let mu: usize = rest.parse().map_err(|_| bad(format!("bad variable {name:?}")))?;
        if mu == 0 || mu > space.n {
            return Err(bad(format!("{name:?} is out of range for n = {}", space.n)));
        }
        return Ok((mu - 1, 1));
    }
    if let Some(rest) = name.strip_prefix('s') {
        let idx = digits(rest, name)?;
        if idx.len() != space.p || idx.iter().any(|&i| i >= space.n) {
            return Err(bad(format!("{name:?} is not an s variable for n = {}, p = {}", space.n, space.p)));
        }
        return space.s_var(&idx).ok_or_else(|| bad(format!("{name:?} vanishes identically")));
    }
    Err(bad(format!("unknown variable {name:?}")))
}

fn parse_term(space: JetSpace, term: &str) -> Result<(Vec<u8>, Rational)> {
    let mut e = vec![0u8; space.num_vars()];
    let mut c = Rational::one();
    for factor in term.split('*').map(str::trim) {
        if factor.is_empty() {
            return Err(bad(format!("empty factor in {term:?}")));
        }
        if factor.starts_with(|ch: char| ch.is_ascii_digit()) {
            c *= rational::parse(factor).map_err(bad)?;
            continue;
        }
        let (name, power) = match factor.split_once('^') {
            Some((n, k)) => (n.trim(), k.trim().parse::<u8>().map_err(|_| bad(format!("bad power in {factor:?}")))?),
            None => (factor, 1),
        };
        let (v, sign) = variable(space, name)?;
        e[v] = e[v].checked_add(power).ok_or_else(|| bad(format!("power too large in {term:?}")))?;
        if sign < 0 && power % 2 == 1 {
            c = -c;
        }
    }
    Ok((e, c))
}

/// Parse a scalar polynomial.
pub fn parse_poly(space: JetSpace, text: &str) -> Result<JetPoly> {
    let text = text.trim();
    if text.is_empty() {
        return Err(bad("empty polynomial".into()));
    }
    // a sign separates terms unless it follows `*`, `^` or `/`
    let mut terms: Vec<(bool, String)> = Vec::new();
    let (mut neg, mut cur, mut last) = (false, String::new(), None::<char>);
    for ch in text.chars() {
        if (ch == '+' || ch == '-') && !matches!(last, Some('*' | '^' | '/')) {
            if last.is_some() {
                if cur.trim().is_empty() {
                    return Err(bad(format!("dangling sign in {text:?}")));
                }
                terms.push((neg, std::mem::take(&mut cur)));
            }
            neg = ch == '-';
            last = Some(ch);
            continue;
        }
        if !ch.is_whitespace() {
            last = Some(ch);
        }
        cur.push(ch);
    }
    if cur.trim().is_empty() {
        return Err(bad(format!("dangling sign in {text:?}")));
    }
    terms.push((neg, cur));
    let mut out = Vec::with_capacity(terms.len());
    for (neg, t) in terms {
        let (e, c) = parse_term(space, &t)?;
        out.push((e, vec![if neg { -c } else { c }]));
    }
    JetPoly::from_terms(space, 1, out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AEntry {
    pub a: usize,
    pub nu: usize,
    pub poly: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaEntry {
    pub sigma: usize,
    pub tau: usize,
    pub nu: usize,
    pub poly: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BEntry {
    pub a: usize,
    pub s: Vec<usize>,
    pub poly: String,
}

/// `{"A": [...], "Gamma": [...], "B": [...]}`; every list is optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionSpec {
    #[serde(default, rename = "A")]
    pub a: Vec<AEntry>,
    #[serde(default, rename = "Gamma")]
    pub gamma: Vec<GammaEntry>,
    #[serde(default, rename = "B")]
    pub b: Vec<BEntry>,
}

fn index(i: usize, bound: usize, what: &str) -> Result<usize> {
    if i == 0 || i > bound {
        return Err(bad(format!("{what} index {i} is outside 1..={bound}")));
    }
    Ok(i - 1)
}

impl ConnectionSpec {
    pub fn build(&self, space: JetSpace, dim_g: usize) -> Result<GerbeConnection> {
        let n = space.n;
        let mut conn = GerbeConnection::zero(space, dim_g);
        for e in &self.a {
            let (a, nu) = (index(e.a, dim_g, "algebra")?, index(e.nu, n, "direction")?);
            let p = conn.a(a, nu).add(&parse_poly(space, &e.poly)?)?;
            conn.set_a(a, nu, p)?;
        }
        for e in &self.gamma {
            let (s, t, nu) = (index(e.sigma, n, "direction")?, index(e.tau, n, "direction")?, index(e.nu, n, "direction")?);
            let p = conn.gamma(s, t, nu).add(&parse_poly(space, &e.poly)?)?;
            conn.set_gamma(s, t, nu, p)?;
        }
        for e in &self.b {
            let a = index(e.a, dim_g, "algebra")?;
            if e.s.len() != space.p {
                return Err(bad(format!("B index {:?} needs {} entries", e.s, space.p)));
            }
            let s = e.s.iter().map(|&i| index(i, n, "direction")).collect::<Result<Vec<_>>>()?;
            if space.s_var(&s).is_none() {
                return Err(bad(format!("B index {:?} has a repeated direction", e.s)));
            }
            let p = conn.b(a, &s).add(&parse_poly(space, &e.poly)?)?;
            conn.set_b(a, &s, p)?;
        }
        Ok(conn)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormEntry {
    pub a: usize,
    pub idx: Vec<usize>,
    pub poly: String,
}

/// Antisymmetric form: each entry sets one component and its permutations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    pub rank: usize,
    pub components: Vec<FormEntry>,
}

impl FormSpec {
    pub fn build(&self, space: JetSpace, dim_g: usize) -> Result<FormField> {
        let mut f = FormField::zero(space, self.rank, dim_g);
        for e in &self.components {
            let a = index(e.a, dim_g, "algebra")?;
            if e.idx.len() != self.rank {
                return Err(bad(format!("form index {:?} needs {} entries", e.idx, self.rank)));
            }
            let idx = e.idx.iter().map(|&i| index(i, space.n, "direction")).collect::<Result<Vec<_>>>()?;
            let p = f.get(a, &idx).add(&parse_poly(space, &e.poly)?)?;
            f.set_antisymmetric(a, &idx, p)?;
        }
        Ok(f)
    }
}

/// Inverse of [`parse_poly`] for scalar polynomials.
pub fn format_poly(p: &JetPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (e, w) in p.terms() {
        let c = &w[0];
        if c.is_zero() {
            continue;
        }
        let mono = p.monomial_name(e);
        let neg = c < &Rational::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        out.push_str(match (out.is_empty(), neg) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        });
        if mono == "1" {
            out.push_str(&mag.to_string());
        } else if mag.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{mag}*{mono}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pform_core::rational::{frac, int};

    fn sp() -> JetSpace {
        JetSpace::new(3, 2, 6).unwrap()
    }

    #[test]
    fn parses_terms() {
        let s = sp();
        let p = parse_poly(s, "3/2*x1^2*s12 - x2 + 1/3").unwrap();
        let x1 = JetPoly::x(s, 0);
        let want = x1
            .mul(&x1)
            .unwrap()
            .mul(&JetPoly::s(s, &[0, 1]))
            .unwrap()
            .scale(&frac(3, 2))
            .sub(&JetPoly::x(s, 1))
            .unwrap()
            .add(&JetPoly::scalar(s, frac(1, 3)))
            .unwrap();
        assert_eq!(p, want);
        assert_eq!(parse_poly(s, "-s21").unwrap(), JetPoly::s(s, &[0, 1]));
        assert!(parse_poly(s, "x3 * -2").is_err());
        assert_eq!(parse_poly(s, "-4/6").unwrap(), JetPoly::scalar(s, frac(-2, 3)));
    }

    #[test]
    fn rejects_garbage() {
        let s = sp();
        for t in ["", "x4", "s11", "s123", "y1", "x1 +", "x1*", "2/0", "x0"] {
            assert!(parse_poly(s, t).is_err(), "{t:?}");
        }
    }

    #[test]
    fn round_trip() {
        let s = sp();
        for t in ["0", "x1", "-3/2*x1^2*s13 + 7", "s23 - x2*x3"] {
            let p = parse_poly(s, t).unwrap();
            assert_eq!(parse_poly(s, &format_poly(&p)).unwrap(), p, "{t}");
        }
    }

    #[test]
    fn connection_json() {
        let s = sp();
        let spec: ConnectionSpec = serde_json::from_str(
            r#"{"A": [{"a": 1, "nu": 2, "poly": "x1"}], "B": [{"a": 1, "s": [2, 1], "poly": "1/2"}]}"#,
        )
        .unwrap();
        let c = spec.build(s, 1).unwrap();
        assert_eq!(c.a(0, 1), &JetPoly::x(s, 0));
        assert_eq!(c.b(0, &[0, 1]), JetPoly::scalar(s, frac(-1, 2)));
        assert!(serde_json::from_str::<ConnectionSpec>(r#"{"C": []}"#).is_err());
        let bad_idx: ConnectionSpec = serde_json::from_str(r#"{"A": [{"a": 2, "nu": 1, "poly": "1"}]}"#).unwrap();
        assert!(bad_idx.build(s, 1).is_err());
    }

    #[test]
    fn form_json() {
        let s = sp();
        let spec: FormSpec =
            serde_json::from_str(r#"{"rank": 3, "components": [{"a": 1, "idx": [2, 1, 3], "poly": "2"}]}"#).unwrap();
        let f = spec.build(s, 1).unwrap();
        assert_eq!(f.get(0, &[0, 1, 2]), &JetPoly::scalar(s, int(-2)));
    }
}
