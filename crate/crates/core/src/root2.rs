//! Exact arithmetic in ℚ[√2].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Rational};

/// `a + b·√2` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Root2Scalar {
    pub a: Rational,
    pub b: Rational,
}

impl Root2Scalar {
    pub fn new(a: Rational, b: Rational) -> Self {
        Root2Scalar { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        Root2Scalar { a, b: Rational::zero() }
    }

    pub fn integer(v: i64) -> Self {
        Self::rational(rational::int(v))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `(√2)^k`.
    pub fn sqrt2_pow(k: i64) -> Self {
        let half = k.div_euclid(2);
        if k.rem_euclid(2) == 0 {
            Self::rational(rational::pow2(half))
        } else {
            Root2Scalar {
                a: Rational::zero(),
                b: rational::pow2(half),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of `a + b√2`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            _ => {
                // opposite signs: compare a² with 2b²
                let a2 = &self.a * &self.a;
                let b2 = &self.b * &self.b * rational::int(2);
                let mag = a2.cmp(&b2);
                if sa == Ordering::Greater {
                    mag
                } else {
                    mag.reverse()
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Root2Scalar {
            a: &self.a * r,
            b: &self.b * r,
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.a) + rational::to_f64(&self.b) * std::f64::consts::SQRT_2
    }
}

impl PartialOrd for Root2Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Root2Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl Add for Root2Scalar {
    type Output = Root2Scalar;
    fn add(self, o: Root2Scalar) -> Root2Scalar {
        Root2Scalar {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl Sub for Root2Scalar {
    type Output = Root2Scalar;
    fn sub(self, o: Root2Scalar) -> Root2Scalar {
        Root2Scalar {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }
}

impl Neg for Root2Scalar {
    type Output = Root2Scalar;
    fn neg(self) -> Root2Scalar {
        Root2Scalar { a: -self.a, b: -self.b }
    }
}

impl Mul for Root2Scalar {
    type Output = Root2Scalar;
    fn mul(self, o: Root2Scalar) -> Root2Scalar {
        let two = rational::int(2);
        Root2Scalar {
            a: &self.a * &o.a + &self.b * &o.b * two,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl fmt::Display for Root2Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√2", self.b),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{} - {}√2", self.a, -&self.b)
                } else {
                    write!(f, "{} + {}√2", self.a, self.b)
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Root2Doc {
    a: String,
    b: String,
    #[serde(default, skip_deserializing)]
    decimal: f64,
}

impl Serialize for Root2Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Root2Doc {
            a: rational::to_text(&self.a),
            b: rational::to_text(&self.b),
            decimal: self.to_f64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Root2Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = Root2Doc::deserialize(d)?;
        Ok(Root2Scalar {
            a: rational::parse(&doc.a).map_err(serde::de::Error::custom)?,
            b: rational::parse(&doc.b).map_err(serde::de::Error::custom)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn sqrt2_powers() {
        assert_eq!(Root2Scalar::sqrt2_pow(2), Root2Scalar::integer(2));
        assert_eq!(Root2Scalar::sqrt2_pow(1), Root2Scalar::new(int(0), int(1)));
        assert_eq!(Root2Scalar::sqrt2_pow(-1), Root2Scalar::new(int(0), ratio(1, 2)));
        assert_eq!(Root2Scalar::sqrt2_pow(-3), Root2Scalar::new(int(0), ratio(1, 4)));
        let s = Root2Scalar::sqrt2_pow(1);
        assert_eq!(s.clone() * s, Root2Scalar::integer(2));
    }

    #[test]
    fn signs_near_cancellation() {
        // 99 - 70√2 ≈ 0.00505 > 0, 140 - 99√2 ≈ -0.007 < 0
        assert_eq!(Root2Scalar::new(int(99), int(-70)).signum(), Ordering::Greater);
        assert_eq!(Root2Scalar::new(int(140), int(-99)).signum(), Ordering::Less);
        assert_eq!(Root2Scalar::new(int(-99), int(70)).signum(), Ordering::Less);
        assert_eq!(Root2Scalar::zero().signum(), Ordering::Equal);
    }

    #[test]
    fn json_form() {
        let v = Root2Scalar::new(ratio(1, 2), int(-3));
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("\"a\":\"1/2\"") && text.contains("\"b\":\"-3/1\""));
        assert_eq!(serde_json::from_str::<Root2Scalar>(&text).unwrap(), v);
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..200).prop_map(|(p, q)| ratio(p, q))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn product_identity(a in small(), b in small(), c in small(), d in small()) {
            let x = Root2Scalar::new(a.clone(), b.clone());
            let y = Root2Scalar::new(c.clone(), d.clone());
            let p = x * y;
            prop_assert_eq!(p.a, &a * &c + &b * &d * int(2));
            prop_assert_eq!(p.b, &a * &d + &b * &c);
        }

        #[test]
        fn sign_agrees_with_high_precision(a in small(), b in small()) {
            let x = Root2Scalar::new(a.clone(), b.clone());
            // compare against a decimal evaluation carried in 1e-50 fixed point
            let scale = num_bigint::BigInt::from(10u32).pow(50);
            let sqrt2 = (num_bigint::BigInt::from(2) * &scale * &scale).sqrt();
            let num = a.numer() * b.denom() * &scale + b.numer() * a.denom() * sqrt2;
            let expected = num.sign();
            let got = x.signum();
            let agrees = match expected {
                num_bigint::Sign::Plus => got == Ordering::Greater,
                num_bigint::Sign::Minus => got == Ordering::Less,
                num_bigint::Sign::NoSign => got == Ordering::Equal,
            };
            // the truncated √2 can only mislead when the value is within 1e-49
            prop_assert!(agrees || num.magnitude() < &num_bigint::BigUint::from(10u32));
        }
    }
}
