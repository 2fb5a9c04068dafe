//! Exact rational arithmetic.  Every coordinate, endpoint, and measure in the
//! crate is a [`Q`]; floating point never appears in any judgment.
//!
//! Serialized form is a decimal-free string: `"3"`, `"-3"`, or `"7/2"`.  That
//! keeps registry and transcript files exact and byte-stable.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Exact rational number (arbitrary precision).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub BigRational);

impl Q {
    pub fn from_int(n: i64) -> Q {
        Q(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; panics on a zero denominator (callers pass literals).
    pub fn frac(num: i64, den: i64) -> Q {
        Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Q {
        Q(BigRational::zero())
    }

    pub fn one() -> Q {
        Q(BigRational::one())
    }

    /// 1 / 2^k, the measure granule the dual-game ledgers are built from.
    pub fn half_pow(k: u32) -> Q {
        Q(BigRational::new(BigInt::one(), BigInt::from(2u8).pow(k)))
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Midpoint of `self` and `other`.
    pub fn mid(&self, other: &Q) -> Q {
        Q((&self.0 + &other.0) / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn abs(&self) -> Q {
        Q(self.0.abs())
    }

    /// Ceiling, as an (integer-valued) rational.
    pub fn ceil(&self) -> Q {
        Q(self.0.ceil())
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Q {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_int = |t: &str| BigInt::from_str(t.trim()).map_err(|e| format!("bad integer {t:?}: {e}"));
        match s.split_once('/') {
            None => Ok(Q(BigRational::from_integer(parse_int(s)?))),
            Some((n, d)) => {
                let den = parse_int(d)?;
                if den.is_zero() {
                    return Err(format!("zero denominator in {s:?}"));
                }
                Ok(Q(BigRational::new(parse_int(n)?, den)))
            }
        }
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Q::from_str(&s).map_err(de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl std::ops::$tr for &Q {
            type Output = Q;
            fn $m(self, rhs: &Q) -> Q {
                Q((&self.0).$m(&rhs.0))
            }
        }
        impl std::ops::$tr for Q {
            type Output = Q;
            fn $m(self, rhs: Q) -> Q {
                Q(self.0.$m(rhs.0))
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_strings() {
        for s in ["0", "-3", "7/2", "-9/4", "1000000000000000000000/7"] {
            let q: Q = s.parse().unwrap();
            assert_eq!(q.to_string(), s);
        }
        // Non-canonical input normalizes.
        let q: Q = "4/2".parse().unwrap();
        assert_eq!(q.to_string(), "2");
    }

    #[test]
    fn exact_ledger_sum() {
        // Σ_{n<128} 1/2^{n+3} stays strictly below 1/4 — the bound the
        // finite-open ledger relies on, at full 128-round depth.
        let mut acc = Q::zero();
        for n in 0..128u32 {
            acc = &acc + &Q::half_pow(n + 3);
        }
        assert!(acc < Q::frac(1, 4));
        assert!(acc > Q::frac(2, 9));
    }

    #[test]
    fn mid_is_strictly_between() {
        let a = Q::frac(1, 3);
        let b = Q::frac(1, 2);
        let m = a.mid(&b);
        assert!(a < m && m < b);
        assert_eq!(m, Q::frac(5, 12));
    }
}
