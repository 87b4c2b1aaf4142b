//! Exact rationals and the float crossover.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidBehavior(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// `"p/q"`, or `"p"` for integers.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents plus the best semiconvergent).
pub fn snap(x: f64, max_den: u64) -> Rational {
    assert!(x.is_finite(), "cannot snap a non-finite value");
    assert!(max_den >= 1);
    let neg = x < 0.0;
    let mut rest = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let cap = max_den as u128;
    loop {
        let a = rest.floor();
        if a > 1e18 {
            break;
        }
        let a = a as u128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > cap {
            // Semiconvergent with the largest admissible coefficient.
            let k = (cap - q0) / q1;
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let semi = ps as f64 / qs as f64;
            let conv = p1 as f64 / q1 as f64;
            if (semi - x.abs()).abs() < (conv - x.abs()).abs() {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = rest - a as f64;
        if frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse(" 3 ").unwrap(), int(3));
        assert_eq!(parse("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn format_round_trip() {
        for r in [ratio(1, 3), int(0), int(1), ratio(-7, 4)] {
            assert_eq!(parse(&format(&r)).unwrap(), r);
        }
    }

    #[test]
    fn snap_recovers_simple_fractions() {
        assert_eq!(snap(1.0 / 3.0, 1_000_000), ratio(1, 3));
        assert_eq!(snap(0.0, 1_000_000), int(0));
        assert_eq!(snap(1.0, 1_000_000), int(1));
        assert_eq!(snap(-0.125, 1_000_000), ratio(-1, 8));
        assert_eq!(snap(std::f64::consts::PI, 1000), ratio(355, 113));
    }

    #[test]
    fn snap_error_is_small() {
        for &x in &[0.0901699437494742, 0.2573712277818, 1e-7, 0.999999] {
            let r = snap(x, 1_000_000);
            assert!(r.denom() <= &BigInt::from(1_000_000u64));
            assert!((to_f64(&r) - x).abs() <= 1e-6, "{x} -> {r}");
            let fine = snap(x, 1_000_000_000_000);
            assert!((to_f64(&fine) - x).abs() < 1e-12, "{x} -> {fine}");
        }
    }
}
