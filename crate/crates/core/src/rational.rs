//! Exact rational parsing and JSON helpers.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"p/q"`, integers and plain decimals (`"0.25"`, `"-1.5"`) exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let den = num::pow(BigInt::from(10), frac.len());
    let mut r = BigRational::new(num, den);
    let scale = BigRational::from_integer(num::pow(BigInt::from(10), exponent.unsigned_abs() as usize));
    if exponent >= 0 {
        r *= scale;
    } else {
        r /= scale;
    }
    Ok(if neg { -r } else { r })
}

/// Reads a JSON number or string as an exact rational. Floats are taken at
/// their shortest decimal representation.
pub fn rational_from_json(v: &serde_json::Value) -> Result<BigRational> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        serde_json::Value::Number(n) => parse_rational(&n.to_string()),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

pub fn is_strictly_between(r: &BigRational, lo: &BigRational, hi: &BigRational) -> bool {
    (r - lo).is_positive() && (hi - r).is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("1/3").unwrap(), q(1, 3));
        assert_eq!(parse_rational(" -2/4 ").unwrap(), q(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(parse_rational("1e3").unwrap(), q(1000, 1));
        assert_eq!(parse_rational("2.5e-2").unwrap(), q(1, 40));
        assert!(parse_rational("1e").is_err());
    }

    #[test]
    fn json_values() {
        assert_eq!(rational_from_json(&serde_json::json!("2/6")).unwrap(), q(1, 3));
        assert_eq!(rational_from_json(&serde_json::json!(0.125)).unwrap(), q(1, 8));
        assert_eq!(rational_from_json(&serde_json::json!(3)).unwrap(), q(3, 1));
        assert!(rational_from_json(&serde_json::json!(null)).is_err());
    }
}
