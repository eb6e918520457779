//! Exact rational arithmetic helpers.
//!
//! Every weight, dual value and LP coefficient in the crate is a
//! [`Rational`]; nothing is ever rounded.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// `p/q` as a rational. Panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `p`, `p/q`, or a plain decimal such as `-1.25` into an exact
/// rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.chars().all(|c| c.is_ascii_digit())
            || !frac.chars().all(|c| c.is_ascii_digit())
            || (whole_digits.is_empty() && frac.is_empty())
        {
            return None;
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().ok()?
        };
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(num, den));
    }
    let p: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(p))
}

/// Canonical text form: `p` for integers, `p/q` otherwise (always reduced).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering rounded half away from zero to `places` digits.
pub fn to_decimal(r: &Rational, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = r * Rational::from_integer(scale.clone());
    let abs = scaled.abs();
    let (q, rem) = abs.numer().div_rem(abs.denom());
    let twice = rem * 2;
    let rounded = if &twice >= abs.denom() { q + 1 } else { q };
    let negative = r.is_negative() && !rounded.is_zero();
    let digits = rounded.to_string();
    let body = if places == 0 {
        digits
    } else {
        let padded = format!("{:0>width$}", digits, width = places + 1);
        let (int_part, frac_part) = padded.split_at(padded.len() - places);
        format!("{int_part}.{frac_part}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

pub fn sum<'a>(items: impl IntoIterator<Item = &'a Rational>) -> Rational {
    items.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

pub fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

/// Smallest integer k with k^root >= x, for x >= 0.
pub(crate) fn ceil_root(x: &Rational, root: u32) -> BigInt {
    assert!(!x.is_negative());
    if x.is_zero() {
        return BigInt::zero();
    }
    // k^root * den >= num
    let num = x.numer();
    let den = x.denom();
    let fits = |k: &BigInt| num_traits::pow(k.clone(), root as usize) * den >= *num;
    let mut hi = BigInt::one();
    while !fits(&hi) {
        hi *= 2;
    }
    let mut lo = BigInt::zero();
    // invariant: !fits(lo) or lo == 0 ; fits(hi)
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) / 2;
        if fits(&mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if fits(&lo) {
        lo
    } else {
        hi
    }
}

/// Rescales the values to integers over their common denominator, which is
/// returned alongside. `None` unless every scaled value and any sum of up to
/// `terms` of them fit comfortably in an `i128`.
pub(crate) fn scaled_i128<'a>(
    values: impl IntoIterator<Item = &'a Rational>,
    terms: usize,
) -> Option<(Vec<i128>, BigInt)> {
    let values: Vec<&Rational> = values.into_iter().collect();
    let mut lcm = BigInt::one();
    for v in &values {
        lcm = lcm.lcm(v.denom());
    }
    let limit = BigInt::from(i128::MAX >> 8) / BigInt::from(terms.max(1));
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        let scaled = v.numer() * (&lcm / v.denom());
        if scaled.abs() > limit {
            return None;
        }
        out.push(i128::try_from(&scaled).ok()?);
    }
    Some((out, lcm))
}

/// Exact ordered scalar used by the combinatorial kernels: either scaled
/// `i128` integers (fast path) or [`Rational`].
pub(crate) trait Scalar:
    Clone
    + Ord
    + std::fmt::Debug
    + Zero
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Neg<Output = Self>
{
    /// Exact half. Integer callers guarantee evenness.
    fn halve(&self) -> Self;
    fn to_rational(&self) -> Rational;
}

impl Scalar for i128 {
    fn halve(&self) -> Self {
        debug_assert!(self % 2 == 0, "odd value {self} halved");
        self / 2
    }
    fn to_rational(&self) -> Rational {
        Rational::from_integer(BigInt::from(*self))
    }
}

impl Scalar for Rational {
    fn halve(&self) -> Self {
        self / BigInt::from(2)
    }
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/2"), Some(rat(3, 2)));
        assert_eq!(parse_rational("-6/4"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("1.25"), Some(rat(5, 4)));
        assert_eq!(parse_rational("-0.5"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-3, 6)), "-1/2");
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(to_decimal(&rat(100, 3), 4), "33.3333");
        assert_eq!(to_decimal(&rat(2, 3), 2), "0.67");
        assert_eq!(to_decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(to_decimal(&int(5), 0), "5");
        assert_eq!(to_decimal(&rat(1, 1000), 2), "0.00");
    }

    #[test]
    fn ceil_roots() {
        assert_eq!(ceil_root(&int(16), 4), BigInt::from(2));
        assert_eq!(ceil_root(&int(17), 4), BigInt::from(3));
        assert_eq!(ceil_root(&int(2), 2), BigInt::from(2));
        assert_eq!(ceil_root(&rat(1, 4), 2), BigInt::from(1));
        assert_eq!(ceil_root(&int(0), 2), BigInt::from(0));
    }

    #[test]
    fn scaling_keeps_order() {
        let vals = [rat(1, 2), rat(-1, 3), int(2)];
        assert_eq!(scaled_i128(vals.iter(), 10), Some((vec![3, -2, 12], BigInt::from(6))));
        let huge = [Rational::from_integer(num_traits::pow(BigInt::from(10), 40))];
        assert_eq!(scaled_i128(huge.iter(), 1), None);
    }
}
