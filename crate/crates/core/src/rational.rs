//! Exact rationals and their `p/q` text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

pub type Q = BigRational;

/// `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Debug, thiserror::Error)]
#[error("bad rational literal {0:?} (expected P/Q)")]
pub struct ParseQError(pub String);

/// Parses `P/Q` or a bare integer. Decimals are rejected on purpose.
pub fn parse_q(s: &str) -> Result<Q, ParseQError> {
    let t = s.trim();
    let err = || ParseQError(s.to_string());
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| err())?;
    let d = BigInt::from_str(d).map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Q::new(n, d))
}

/// Always `p/q`, even for integers, so every emitted value parses the same way.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Fractional part in [0, 1).
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

pub fn is_nonneg_integer(x: &Q) -> bool {
    x.is_integer() && !x.is_negative()
}

/// Integer square root test on a rational that must itself be an integer.
pub fn is_integer_square(x: &Q) -> bool {
    if !is_nonneg_integer(x) {
        return false;
    }
    let n = x.to_integer();
    let s = n.sqrt();
    &s * &s == n
}

/// Square root of a rational if it is a rational square.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer().clone(), x.denom().clone());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (&sn * &sn == n && &sd * &sd == d).then(|| Q::new(sn, sd))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn one() -> Q {
    Q::one()
}

pub fn zero() -> Q {
    Q::zero()
}

/// serde adapter: rationals travel as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_vec {
    use super::*;
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse_q(s).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_q("5/46").unwrap(), q(5, 46));
        assert_eq!(parse_q("-10/4").unwrap(), q(-5, 2));
        assert_eq!(parse_q("7").unwrap(), qi(7));
        assert!(parse_q("0.5").is_err());
        assert!(parse_q("1/0").is_err());
        assert_eq!(fmt_q(&q(16, 1)), "16/1");
        assert_eq!(fmt_q(&q(-15, 11)), "-15/11");
    }

    #[test]
    fn squares() {
        assert!(is_integer_square(&qi(16)));
        assert!(!is_integer_square(&qi(2)));
        assert!(!is_integer_square(&q(1, 4)));
        assert_eq!(rational_sqrt(&q(9, 49)), Some(q(3, 7)));
        assert_eq!(rational_sqrt(&q(2, 9)), None);
    }

    #[test]
    fn fractional_part_of_negative() {
        assert_eq!(frac(&q(-1, 3)), q(2, 3));
    }
}
