//! Exact rational arithmetic helpers.
//!
//! Utilities and OWA weights are stored as `Ratio<i128>`. Hot loops work on
//! integer numerators scaled to a common denominator, so sums of products are
//! plain `i128` arithmetic; instance construction checks the worst-case
//! magnitude up front so those loops cannot overflow.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Parses an integer (`12`), a decimal (`0.8`, `.5`, `-3.25`) or a fraction (`2/3`).
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num
            .trim()
            .parse()
            .map_err(|_| format!("invalid numerator in `{s}`"))?;
        let den: i128 = den
            .trim()
            .parse()
            .map_err(|_| format!("invalid denominator in `{s}`"))?;
        if den == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Ratio::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("invalid number `{s}`"));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(format!("invalid number `{s}`"));
    }
    let too_big = || format!("number `{s}` is too large");
    let digits = format!("{int_part}{frac_part}");
    let numer: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| too_big())?
    };
    let denom = 10i128
        .checked_pow(frac_part.len() as u32)
        .ok_or_else(too_big)?;
    let value = Ratio::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// `77`, `154/3`, `-1/2`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering for formats that cannot carry fractions (LP files).
/// Exact when the reduced denominator has only factors 2 and 5.
pub fn format_decimal(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut d = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d == 1 {
        let places = twos.max(fives);
        if let Some(scale) = 10i128.checked_pow(places) {
            if let Some(scaled) = r.numer().checked_mul(scale / r.denom()) {
                let sign = if scaled < 0 { "-" } else { "" };
                let abs = scaled.abs();
                let p = scale;
                let frac = format!("{:0width$}", abs % p, width = places as usize);
                return format!("{sign}{}.{}", abs / p, frac.trim_end_matches('0'));
            }
        }
    }
    format!("{}", to_f64(r))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// Values rescaled to integers over one shared denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Scaled {
    pub values: Vec<i128>,
    pub denom: i128,
}

impl Scaled {
    pub fn new(values: &[Rational]) -> Result<Self> {
        let mut denom: i128 = 1;
        for v in values {
            let g = denom.gcd(v.denom());
            denom = (denom / g).checked_mul(*v.denom()).ok_or_else(overflow)?;
        }
        let values = values
            .iter()
            .map(|v| {
                v.numer()
                    .checked_mul(denom / v.denom())
                    .ok_or_else(overflow)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Scaled { values, denom })
    }

    pub fn max_abs(&self) -> i128 {
        self.values.iter().map(|v| v.abs()).max().unwrap_or(0)
    }
}

fn overflow() -> Error {
    Error::Overflow("common denominator does not fit in 128 bits".into())
}

/// Checks that sums of up to `terms` products `a * b` with `|a| <= max_a`,
/// `|b| <= max_b` stay comfortably inside `i128`, with a factor 4 of
/// headroom for differences and accumulated gains.
pub(crate) fn check_product_range(max_a: i128, max_b: i128, terms: u128) -> Result<()> {
    let fits = max_a
        .checked_mul(max_b)
        .and_then(|p| u128::try_from(p).ok())
        .and_then(|p| p.checked_mul(terms.max(1)))
        .and_then(|p| p.checked_mul(4))
        .map(|p| p <= i128::MAX as u128)
        .unwrap_or(false);
    if fits {
        Ok(())
    } else {
        Err(Error::Overflow(
            "utility and OWA magnitudes too large for exact scoring".into(),
        ))
    }
}

pub(crate) fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

pub(crate) fn ceil_to_usize(r: &Rational) -> usize {
    let c = r.ceil();
    if c.is_zero() || c.is_negative() {
        0
    } else {
        c.to_integer() as usize
    }
}

pub(crate) fn floor_to_usize(r: &Rational) -> usize {
    let f = r.floor();
    if f.is_negative() {
        0
    } else {
        f.to_integer() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Ratio::new(n, d)
    }

    #[test]
    fn parses_integers_decimals_and_fractions() {
        assert_eq!(parse_rational("12").unwrap(), q(12, 1));
        assert_eq!(parse_rational("0.8").unwrap(), q(4, 5));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-3.25").unwrap(), q(-13, 4));
        assert_eq!(parse_rational("2/3").unwrap(), q(2, 3));
        assert_eq!(parse_rational("5.").unwrap(), q(5, 1));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1.2.3", "1e5", "-", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn formats() {
        assert_eq!(format_rational(&q(77, 1)), "77");
        assert_eq!(format_rational(&q(154, 3)), "154/3");
        assert_eq!(format_decimal(&q(1, 8)), "0.125");
        assert_eq!(format_decimal(&q(-5, 2)), "-2.5");
        assert_eq!(format_decimal(&q(7, 1)), "7");
    }

    #[test]
    fn scaling_uses_common_denominator() {
        let s = Scaled::new(&[q(1, 2), q(1, 3), q(2, 1)]).unwrap();
        assert_eq!(s.denom, 6);
        assert_eq!(s.values, vec![3, 2, 12]);
    }

    #[test]
    fn product_range() {
        assert!(check_product_range(1 << 40, 1 << 40, 1 << 20).is_ok());
        assert!(check_product_range(1 << 62, 1 << 62, 1 << 10).is_err());
    }
}
