//! Exact number types: arbitrary-precision rationals and n-adic rationals m / n^e,
//! plus the small amount of elementary number theory the rest of the crate needs.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("invalid base {0}: must be at least 2")]
    InvalidBase(u64),
    #[error("{n} and {m} are not coprime")]
    NotCoprime { n: u64, m: BigUint },
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("parse error at byte {pos} in {input:?}: {msg}")]
    Parse {
        input: String,
        pos: usize,
        msg: String,
    },
}

fn parse_err(input: &str, pos: usize, msg: &str) -> NumError {
    NumError::Parse {
        input: input.to_string(),
        pos,
        msg: msg.to_string(),
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// n^k as an exact rational; k may be negative.
pub fn pow_n(n: u32, k: i64) -> Rational {
    let p = BigInt::from(n).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Exact logarithm: Some(k) iff x = n^k.
pub fn log_n(x: &Rational, n: u32) -> Option<i64> {
    if !x.is_positive() {
        return None;
    }
    let num = x.numer().magnitude().clone();
    let den = x.denom().magnitude().clone();
    let bn = BigUint::from(n);
    let exact_power = |mut v: BigUint| -> Option<i64> {
        let mut k = 0i64;
        while v > BigUint::one() {
            let (q, r) = v.div_rem(&bn);
            if !r.is_zero() {
                return None;
            }
            v = q;
            k += 1;
        }
        Some(k)
    };
    if den.is_one() {
        exact_power(num)
    } else if num.is_one() {
        exact_power(den).map(|k| -k)
    } else {
        None
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let t = s.trim();
    let (ps, qs, qpos) = match t.find('/') {
        Some(i) => (&t[..i], &t[i + 1..], i + 1),
        None => (t, "1", t.len()),
    };
    let p = BigInt::from_str(ps).map_err(|_| parse_err(s, 0, "expected integer numerator"))?;
    let q = BigInt::from_str(qs).map_err(|_| parse_err(s, qpos, "expected integer denominator"))?;
    if q.is_zero() {
        return Err(parse_err(s, qpos, "zero denominator"));
    }
    Ok(Rational::new(p, q))
}

pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Serde adapter writing rationals as "p/q" strings.
pub mod rational_text {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub mod rational_text_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = xs.iter().map(format_rational).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod rational_text_pairs {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[(Rational, Rational)], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[String; 2]> = xs
            .iter()
            .map(|(a, b)| [format_rational(a), format_rational(b)])
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Rational, Rational)>, D::Error> {
        let v = Vec::<[String; 2]>::deserialize(d)?;
        v.iter()
            .map(|[a, b]| {
                Ok((
                    parse_rational(a).map_err(serde::de::Error::custom)?,
                    parse_rational(b).map_err(serde::de::Error::custom)?,
                ))
            })
            .collect()
    }
}

/// m / n^e with n ∤ m unless e = 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NAdic {
    base: u32,
    mantissa: BigInt,
    exponent: u32,
}

impl NAdic {
    pub fn new(base: u32, mantissa: BigInt, exponent: u32) -> Result<Self, NumError> {
        if base < 2 {
            return Err(NumError::InvalidBase(base as u64));
        }
        let mut m = mantissa;
        let mut e = exponent;
        let bn = BigInt::from(base);
        while e > 0 {
            let (q, r) = m.div_rem(&bn);
            if !r.is_zero() {
                break;
            }
            m = q;
            e -= 1;
        }
        Ok(NAdic {
            base,
            mantissa: m,
            exponent: e,
        })
    }

    pub fn zero(base: u32) -> Self {
        NAdic {
            base,
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(
            self.mantissa.clone(),
            BigInt::from(self.base).pow(self.exponent),
        )
    }

    fn same_base(&self, other: &NAdic) -> Result<(), NumError> {
        if self.base != other.base {
            Err(NumError::BaseMismatch(self.base, other.base))
        } else {
            Ok(())
        }
    }

    fn from_value(base: u32, x: Rational) -> NAdic {
        is_nadic(&x, base)
            .expect("base already validated")
            .expect("closed under ring operations")
    }

    pub fn checked_add(&self, other: &NAdic) -> Result<NAdic, NumError> {
        self.same_base(other)?;
        Ok(Self::from_value(self.base, self.to_rational() + other.to_rational()))
    }

    pub fn checked_sub(&self, other: &NAdic) -> Result<NAdic, NumError> {
        self.same_base(other)?;
        Ok(Self::from_value(self.base, self.to_rational() - other.to_rational()))
    }

    pub fn checked_mul(&self, other: &NAdic) -> Result<NAdic, NumError> {
        self.same_base(other)?;
        Ok(Self::from_value(self.base, self.to_rational() * other.to_rational()))
    }

    pub fn checked_cmp(&self, other: &NAdic) -> Result<Ordering, NumError> {
        self.same_base(other)?;
        Ok(self.to_rational().cmp(&other.to_rational()))
    }
}

impl fmt::Display for NAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.mantissa, self.base, self.exponent)
    }
}

impl FromStr for NAdic {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let slash = s
            .find('/')
            .ok_or_else(|| parse_err(s, s.len(), "expected '/' in m/n^e"))?;
        let caret = s[slash..]
            .find('^')
            .map(|i| i + slash)
            .ok_or_else(|| parse_err(s, s.len(), "expected '^' in m/n^e"))?;
        let m = BigInt::from_str(s[..slash].trim())
            .map_err(|_| parse_err(s, 0, "expected integer mantissa"))?;
        let n: u32 = s[slash + 1..caret]
            .trim()
            .parse()
            .map_err(|_| parse_err(s, slash + 1, "expected base"))?;
        let e: u32 = s[caret + 1..]
            .trim()
            .parse()
            .map_err(|_| parse_err(s, caret + 1, "expected non-negative exponent"))?;
        NAdic::new(n, m, e)
    }
}

impl Serialize for NAdic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NAdic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn check_base(n: u32) -> Result<(), NumError> {
    if n < 2 {
        Err(NumError::InvalidBase(n as u64))
    } else {
        Ok(())
    }
}

/// The NAdic form of x iff every prime factor of its denominator divides n.
pub fn is_nadic(x: &Rational, n: u32) -> Result<Option<NAdic>, NumError> {
    check_base(n)?;
    let den = x.denom().magnitude().clone();
    let bn = BigUint::from(n);
    let mut d = den.clone();
    let mut e = 0u32;
    let mut scale = BigUint::one();
    while !d.is_one() {
        let g = d.gcd(&bn);
        if g.is_one() {
            return Ok(None);
        }
        d /= &g;
        e += 1;
        scale *= &bn;
    }
    // x = numer / den and den | n^e; mantissa = numer * n^e / den.
    let factor = BigInt::from_biguint(Sign::Plus, scale / &den);
    let m = x.numer() * factor;
    Ok(Some(NAdic::new(n, m, e)?))
}

pub fn is_nadic_value(x: &Rational, n: u32) -> bool {
    matches!(is_nadic(x, n), Ok(Some(_)))
}

/// Smallest o ≥ 1 with n^o ≡ 1 (mod m).
pub fn mult_order(n: u64, m: &BigUint) -> Result<u64, NumError> {
    check_base(n.min(u32::MAX as u64) as u32)?;
    if m.is_one() || m.is_zero() {
        return Ok(1);
    }
    let bn = BigUint::from(n);
    if !bn.gcd(m).is_one() {
        return Err(NumError::NotCoprime { n, m: m.clone() });
    }
    let base = &bn % m;
    let mut acc = base.clone();
    let mut o = 1u64;
    while !acc.is_one() {
        acc = (acc * &base) % m;
        o += 1;
    }
    Ok(o)
}

/// q = q' · d with gcd(q', n) = 1 and the primes of d dividing n; returns (q', ℓ)
/// where ℓ is the least exponent with d | n^ℓ.
pub fn coprime_part(q: &BigUint, n: u32) -> (BigUint, u32) {
    let bn = BigUint::from(n);
    let mut qp = q.clone();
    let mut d = BigUint::one();
    loop {
        let g = qp.gcd(&bn);
        if g.is_one() {
            break;
        }
        qp /= &g;
        d *= &g;
    }
    let mut l = 0u32;
    let mut p = BigUint::one();
    while !(&p % &d).is_zero() {
        p *= &bn;
        l += 1;
    }
    (qp, l)
}

/// Least-denominator n-adic in the open interval (lo, hi), ties broken by least numerator.
pub fn simplest_nadic_between(lo: &Rational, hi: &Rational, n: u32) -> Rational {
    assert!(lo < hi, "empty interval");
    let mut e = 0u32;
    loop {
        let scale = BigInt::from(n).pow(e);
        let m = (lo * Rational::from_integer(scale.clone())).floor().to_integer() + 1;
        let cand = Rational::new(m, scale);
        if &cand < hi {
            return cand;
        }
        e += 1;
    }
}

/// Largest n-adic with denominator n^e that is < x (or ≤ x when `inclusive`).
pub fn nadic_below(x: &Rational, n: u32, e: u32, inclusive: bool) -> Rational {
    let scale = BigInt::from(n).pow(e);
    let y = x * Rational::from_integer(scale.clone());
    let mut m = y.floor().to_integer();
    if !inclusive && Rational::from_integer(m.clone()) == y {
        m -= 1;
    }
    Rational::new(m, scale)
}

/// Smallest n-adic with denominator n^e that is > x (or ≥ x when `inclusive`).
pub fn nadic_above(x: &Rational, n: u32, e: u32, inclusive: bool) -> Rational {
    let scale = BigInt::from(n).pow(e);
    let y = x * Rational::from_integer(scale.clone());
    let mut m = y.ceil().to_integer();
    if !inclusive && Rational::from_integer(m.clone()) == y {
        m += 1;
    }
    Rational::new(m, scale)
}

pub fn to_i64(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn euler_phi(mut m: u64) -> u64 {
        let mut result = m;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                while m % p == 0 {
                    m /= p;
                }
                result -= result / p;
            }
            p += 1;
        }
        if m > 1 {
            result -= result / m;
        }
        result
    }

    #[test]
    fn is_nadic_examples() {
        let x = is_nadic(&rat(3, 8), 2).unwrap().unwrap();
        assert_eq!((x.mantissa().clone(), x.exponent()), (BigInt::from(3), 3));
        assert!(is_nadic(&rat(1, 3), 2).unwrap().is_none());
        let y = is_nadic(&rat(5, 36), 6).unwrap().unwrap();
        assert_eq!((y.mantissa().clone(), y.exponent()), (BigInt::from(5), 2));
        assert_eq!(is_nadic(&rat(1, 2), 1), Err(NumError::InvalidBase(1)));
        // 1/4 in base 6 needs 6^2 = 36 = 9 * 4
        let z = is_nadic(&rat(1, 4), 6).unwrap().unwrap();
        assert_eq!(z.to_rational(), rat(1, 4));
        assert_eq!(z.exponent(), 2);
    }

    #[test]
    fn mult_order_examples() {
        assert_eq!(mult_order(2, &BigUint::from(3u32)).unwrap(), 2);
        assert_eq!(mult_order(5, &BigUint::one()).unwrap(), 1);
        assert_eq!(mult_order(3, &BigUint::from(8u32)).unwrap(), 2);
        assert!(matches!(
            mult_order(2, &BigUint::from(6u32)),
            Err(NumError::NotCoprime { .. })
        ));
    }

    #[test]
    fn coprime_part_examples() {
        assert_eq!(coprime_part(&BigUint::from(12u32), 2), (BigUint::from(3u32), 2));
        assert_eq!(coprime_part(&BigUint::from(8u32), 2), (BigUint::from(1u32), 3));
        assert_eq!(coprime_part(&BigUint::from(45u32), 3), (BigUint::from(5u32), 2));
        assert_eq!(coprime_part(&BigUint::from(4u32), 6), (BigUint::from(1u32), 2));
    }

    #[test]
    fn nadic_text_round_trip() {
        let x: NAdic = "6/2^3".parse().unwrap();
        assert_eq!(x.to_string(), "3/2^2");
        assert_eq!("0/2^0".parse::<NAdic>().unwrap(), NAdic::zero(2));
        assert!(matches!("3/2".parse::<NAdic>(), Err(NumError::Parse { .. })));
        let j = serde_json::to_string(&x).unwrap();
        assert_eq!(j, "\"3/2^2\"");
        assert_eq!(serde_json::from_str::<NAdic>(&j).unwrap(), x);
    }

    #[test]
    fn cross_base_is_an_error() {
        let a = NAdic::new(2, BigInt::from(1), 1).unwrap();
        let b = NAdic::new(3, BigInt::from(1), 1).unwrap();
        assert_eq!(a.checked_add(&b), Err(NumError::BaseMismatch(2, 3)));
        let c = a.checked_add(&a).unwrap();
        assert_eq!(c.to_rational(), int(1));
    }

    #[test]
    fn log_n_exact() {
        assert_eq!(log_n(&rat(1, 8), 2), Some(-3));
        assert_eq!(log_n(&int(9), 3), Some(2));
        assert_eq!(log_n(&int(1), 5), Some(0));
        assert_eq!(log_n(&rat(3, 2), 2), None);
        assert_eq!(log_n(&int(-2), 2), None);
    }

    #[test]
    fn simplest_between() {
        assert_eq!(simplest_nadic_between(&rat(1, 3), &rat(1, 2), 2), rat(3, 8));
        assert_eq!(simplest_nadic_between(&rat(0, 1), &rat(1, 1), 3), rat(1, 3));
        assert_eq!(simplest_nadic_between(&rat(1, 5), &rat(1, 4), 2), rat(7, 32));
    }

    #[test]
    fn mult_order_divides_phi() {
        for n in [2u64, 3, 5, 6, 10] {
            for m in 2..2000u64 {
                if num_integer::gcd(n, m) != 1 {
                    continue;
                }
                let o = mult_order(n, &BigUint::from(m)).unwrap();
                assert_eq!(euler_phi(m) % o, 0, "n={n} m={m}");
            }
        }
    }

    proptest! {
        #[test]
        fn nadic_round_trip(m in -100000i64..100000, e in 0u32..12, n in 2u32..8) {
            let x = NAdic::new(n, BigInt::from(m), e).unwrap();
            let back = is_nadic(&x.to_rational(), n).unwrap().unwrap();
            prop_assert_eq!(back, x.clone());
            let txt: NAdic = x.to_string().parse().unwrap();
            prop_assert_eq!(txt, x);
        }

        #[test]
        fn is_nadic_matches_denominator_divisibility(p in -500i64..500, q in 1i64..500, n in 2u32..13) {
            let x = rat(p, q);
            let den = x.denom().magnitude().clone();
            let bits = den.bits() as u32;
            let divides = (0..=bits).any(|k| (BigUint::from(n).pow(k) % &den).is_zero());
            prop_assert_eq!(is_nadic(&x, n).unwrap().is_some(), divides);
        }

        #[test]
        fn rational_text_round_trip(p in -10000i64..10000, q in 1i64..10000) {
            let x = rat(p, q);
            prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }
}
