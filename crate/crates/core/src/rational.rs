//! Exact rational scalars and their `"p/q"` string encoding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

/// Integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// `num / den` as a rational. Panics on a zero denominator.
pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Parse `"p"`, `"-p"` or `"p/q"`.
pub fn parse(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
            let q: BigInt = q.trim().parse().map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
            if q.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Rational::new(p, q)
        }
        None => Rational::from_integer(s.parse().map_err(|e| format!("bad integer {s:?}: {e}"))?),
    };
    Ok(r)
}

pub fn format(r: &Rational) -> String {
    r.to_string()
}

/// Serde adapters: a single rational as a `"p/q"` string.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        format(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapters: `Vec<Rational>` as an array of strings.
pub mod serde_rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Serde adapters: a dense rational matrix as nested string arrays.
pub mod serde_rat_mat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|row| row.iter().map(format).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|row| row.iter().map(|s| parse(s).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

/// Serde adapters: rank-3 rational arrays.
pub mod serde_rat_cube {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Vec<Rational>>], s: S) -> Result<S::Ok, S::Error> {
        m.iter()
            .map(|plane| {
                plane.iter().map(|row| row.iter().map(format).collect::<Vec<_>>()).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Vec<Vec<Vec<Rational>>>, D::Error> {
        let v = Vec::<Vec<Vec<String>>>::deserialize(d)?;
        v.iter()
            .map(|plane| {
                plane
                    .iter()
                    .map(|row| {
                        row.iter().map(|s| parse(s).map_err(serde::de::Error::custom)).collect()
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("3/6").unwrap(), frac(1, 2));
        assert_eq!(parse("-4").unwrap(), int(-4));
        assert_eq!(parse(" 7 / -14 ").unwrap(), frac(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn formats_as_p_over_q() {
        assert_eq!(format(&frac(2, -6)), "-1/3");
        assert_eq!(format(&int(5)), "5");
    }
}
