//! OWA vector families and structural classification.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::model::OwaVector;
use crate::number::{format_rational, parse_rational, Rational};

/// Named OWA families. All vectors are unnormalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OwaFamily {
    /// A single 1 at position `k` (1-based).
    KMedian(usize),
    /// `k` ones followed by zeros.
    KBest(usize),
    /// `a + (K-1)b, a + (K-2)b, ..., a`.
    Aprog { a: Rational, b: Rational },
    /// `p^(K-1), ..., p, 1`.
    Gprog { p: Rational },
    /// `1, 1/2, ..., 1/K`.
    Harmonic,
    /// `lambda, 0, ..., 0, 1 - lambda`.
    Hurwicz { lambda: Rational },
}

impl OwaFamily {
    /// Parses the token form used in instance files, e.g. `["aprog", "0", "1"]`.
    /// `aprog` accepts a single parameter and then uses `b = 1`.
    pub fn parse(tokens: &[&str]) -> std::result::Result<Self, String> {
        let (name, params) = tokens.split_first().ok_or("missing OWA family name")?;
        let num = |i: usize| -> std::result::Result<Rational, String> {
            params
                .get(i)
                .ok_or_else(|| format!("`{name}` expects more parameters"))
                .and_then(|t| parse_rational(t))
        };
        let int = |i: usize| -> std::result::Result<usize, String> {
            params
                .get(i)
                .ok_or_else(|| format!("`{name}` expects more parameters"))
                .and_then(|t| t.parse().map_err(|_| format!("invalid integer `{t}`")))
        };
        let (family, arity) = match *name {
            "kmed" => (OwaFamily::KMedian(int(0)?), 1),
            "kbest" => (OwaFamily::KBest(int(0)?), 1),
            "aprog" => {
                let a = num(0)?;
                let b = if params.len() > 1 { num(1)? } else { Rational::one() };
                (OwaFamily::Aprog { a, b }, params.len().clamp(1, 2))
            }
            "gprog" => (OwaFamily::Gprog { p: num(0)? }, 1),
            "harmonic" => (OwaFamily::Harmonic, 0),
            "hurwicz" => (OwaFamily::Hurwicz { lambda: num(0)? }, 1),
            other => return Err(format!("unknown OWA family `{other}`")),
        };
        if params.len() > arity {
            return Err(format!("too many parameters for `{name}`"));
        }
        Ok(family)
    }
}

impl fmt::Display for OwaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OwaFamily::KMedian(k) => write!(f, "kmed {k}"),
            OwaFamily::KBest(k) => write!(f, "kbest {k}"),
            OwaFamily::Aprog { a, b } => {
                write!(f, "aprog {} {}", format_rational(a), format_rational(b))
            }
            OwaFamily::Gprog { p } => write!(f, "gprog {}", format_rational(p)),
            OwaFamily::Harmonic => write!(f, "harmonic"),
            OwaFamily::Hurwicz { lambda } => write!(f, "hurwicz {}", format_rational(lambda)),
        }
    }
}

pub fn make_owa(family: &OwaFamily, k: usize) -> Result<OwaVector> {
    if k == 0 {
        return Err(Error::InvalidParameter("OWA length must be at least 1".into()));
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let alpha = match family {
        OwaFamily::KMedian(pos) | OwaFamily::KBest(pos) if *pos == 0 || *pos > k => {
            return Err(Error::InvalidParameter(format!(
                "{family}: position must be in 1..={k}"
            )))
        }
        OwaFamily::KMedian(pos) => (1..=k).map(|i| if i == *pos { one } else { zero }).collect(),
        OwaFamily::KBest(pos) => (1..=k).map(|i| if i <= *pos { one } else { zero }).collect(),
        OwaFamily::Aprog { a, b } => {
            if *a < zero || *b <= zero {
                return Err(Error::InvalidParameter(
                    "aprog needs a >= 0 and b > 0".into(),
                ));
            }
            (0..k)
                .rev()
                .map(|i| *a + *b * Rational::from_integer(i as i128))
                .collect()
        }
        OwaFamily::Gprog { p } => {
            if *p <= one {
                return Err(Error::InvalidParameter("gprog needs p > 1".into()));
            }
            geometric(*p, k)?
        }
        OwaFamily::Harmonic => (1..=k).map(|i| Ratio::new(1, i as i128)).collect(),
        OwaFamily::Hurwicz { lambda } => {
            if *lambda < zero || *lambda > one {
                return Err(Error::InvalidParameter("hurwicz needs lambda in [0, 1]".into()));
            }
            if k < 2 {
                return Err(Error::InvalidParameter("hurwicz needs K >= 2".into()));
            }
            let mut v = vec![zero; k];
            v[0] = *lambda;
            v[k - 1] = one - *lambda;
            v
        }
    };
    OwaVector::new(alpha)
}

fn geometric(p: Rational, k: usize) -> Result<Vec<Rational>> {
    let mut v = Vec::with_capacity(k);
    let mut cur = Rational::one();
    for _ in 0..k {
        v.push(cur);
        let numer = cur.numer().checked_mul(*p.numer());
        let denom = cur.denom().checked_mul(*p.denom());
        cur = match (numer, denom) {
            (Some(n), Some(d)) => Ratio::new(n, d),
            _ if v.len() == k => cur,
            _ => return Err(Error::Overflow(format!("gprog entries for K = {k}"))),
        };
    }
    v.reverse();
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OwaClass {
    pub nonincreasing: bool,
    pub constant: bool,
    /// Smallest `l` such that entries `l+1..=K` are all zero (at least 1).
    pub nonzero_prefix_len: usize,
}

pub fn classify(alpha: &OwaVector) -> OwaClass {
    let a = alpha.as_slice();
    let nonincreasing = a.windows(2).all(|w| w[0] >= w[1]);
    let constant = a.windows(2).all(|w| w[0] == w[1]);
    let nonzero_prefix_len = a
        .iter()
        .rposition(|v| !v.is_zero())
        .map_or(1, |i| i + 1);
    OwaClass {
        nonincreasing,
        constant,
        nonzero_prefix_len,
    }
}

/// `lambda` if the vector has Hurwicz shape `(c*lambda, 0, ..., 0, c*(1-lambda))`
/// for some scale `c > 0`.
pub fn hurwicz_lambda(alpha: &OwaVector) -> Option<Rational> {
    let a = alpha.as_slice();
    let k = a.len();
    if k < 2 || a[1..k - 1].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let total = a[0] + a[k - 1];
    (!total.is_zero()).then(|| a[0] / total)
}

/// `k` if the vector is `c * (1, ..., 1, 0, ..., 0)` with `k` leading entries, `c > 0`.
pub fn top_k_best(alpha: &OwaVector) -> Option<usize> {
    let a = alpha.as_slice();
    let c = a[0];
    if c.is_zero() {
        return None;
    }
    let k = a.iter().take_while(|v| **v == c).count();
    a[k..].iter().all(|v| v.is_zero()).then_some(k)
}

/// `p` if the vector is `c * (p^(K-1), ..., 1)` for some `p > 1`, `c > 0`.
pub fn geometric_ratio(alpha: &OwaVector) -> Option<Rational> {
    let a = alpha.as_slice();
    if a.len() < 2 || a.iter().any(|v| v.is_zero()) {
        return None;
    }
    let p = a[0] / a[1];
    (p > Rational::one() && a.windows(2).all(|w| w[0] / w[1] == p)).then_some(p)
}

/// A geometric-progression OWA with everything after the first `ell` entries zeroed.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub owa: OwaVector,
    /// Number of retained entries, capped at K.
    pub ell: usize,
    /// `ceil(log_p(2 / epsilon))` before capping.
    pub uncapped_ell: usize,
}

/// Truncates `gprog[p]` of length `k` after `ceil(log_p(2/epsilon))` entries.
/// The retained prefix holds at least `1 - epsilon/2` of the total weight.
pub fn truncate_geometric(p: Rational, epsilon: Rational, k: usize) -> Result<Truncation> {
    if p <= Rational::one() {
        return Err(Error::InvalidParameter("p must exceed 1".into()));
    }
    if epsilon <= Rational::zero() || epsilon >= Rational::one() {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
    }
    let uncapped_ell = ceil_log(p, Rational::from_integer(2) / epsilon);
    let ell = uncapped_ell.min(k);
    let full = make_owa(&OwaFamily::Gprog { p }, k)?;
    let mut alpha = full.as_slice().to_vec();
    for v in alpha.iter_mut().skip(ell) {
        *v = Rational::zero();
    }
    Ok(Truncation {
        owa: OwaVector::new(alpha)?,
        ell,
        uncapped_ell,
    })
}

/// Smallest `t >= 0` with `base^t >= target`, in exact arithmetic.
fn ceil_log(base: Rational, target: Rational) -> usize {
    let big = |r: Rational| BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
    let (base, target) = (big(base), big(target));
    let mut power = BigRational::one();
    let mut t = 0;
    while power < target {
        power *= &base;
        t += 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Ratio::new(n, d)
    }
    fn ints(v: &[i128]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    #[test]
    fn dictionary_vectors() {
        let h = make_owa(&OwaFamily::Harmonic, 3).unwrap();
        assert_eq!(h.as_slice(), &[q(1, 1), q(1, 2), q(1, 3)]);
        let g = make_owa(&OwaFamily::Gprog { p: q(2, 1) }, 3).unwrap();
        assert_eq!(g.as_slice(), &ints(&[4, 2, 1])[..]);
        let hw = make_owa(&OwaFamily::Hurwicz { lambda: q(1, 1) }, 4).unwrap();
        let med = make_owa(&OwaFamily::KMedian(1), 4).unwrap();
        assert_eq!(hw, med);
        assert_eq!(hw.as_slice(), &ints(&[1, 0, 0, 0])[..]);
        let ap = make_owa(&OwaFamily::Aprog { a: q(1, 1), b: q(2, 1) }, 3).unwrap();
        assert_eq!(ap.as_slice(), &ints(&[5, 3, 1])[..]);
        let kb = make_owa(&OwaFamily::KBest(2), 4).unwrap();
        assert_eq!(kb.as_slice(), &ints(&[1, 1, 0, 0])[..]);
        let hz = make_owa(&OwaFamily::Hurwicz { lambda: q(3, 10) }, 3).unwrap();
        assert_eq!(hz.as_slice(), &[q(3, 10), q(0, 1), q(7, 10)]);
    }

    #[test]
    fn parameter_domains() {
        let bad = [
            (OwaFamily::KMedian(0), 3),
            (OwaFamily::KBest(4), 3),
            (OwaFamily::Aprog { a: q(-1, 1), b: q(1, 1) }, 3),
            (OwaFamily::Aprog { a: q(0, 1), b: q(0, 1) }, 3),
            (OwaFamily::Gprog { p: q(1, 1) }, 3),
            (OwaFamily::Hurwicz { lambda: q(3, 2) }, 3),
            (OwaFamily::Hurwicz { lambda: q(1, 2) }, 1),
        ];
        for (fam, k) in bad {
            assert!(make_owa(&fam, k).is_err(), "{fam}");
        }
    }

    #[test]
    fn classification() {
        let c = classify(&OwaVector::new(ints(&[2, 1, 0])).unwrap());
        assert!(c.nonincreasing && !c.constant);
        assert_eq!(c.nonzero_prefix_len, 2);
        let c = classify(&OwaVector::new(ints(&[1, 1, 1])).unwrap());
        assert!(c.constant && c.nonincreasing);
        assert_eq!(c.nonzero_prefix_len, 3);
        let c = classify(&make_owa(&OwaFamily::KMedian(2), 3).unwrap());
        assert!(!c.nonincreasing);
        assert_eq!(c.nonzero_prefix_len, 2);
    }

    #[test]
    fn family_round_trip_through_text() {
        for fam in [
            OwaFamily::KMedian(2),
            OwaFamily::KBest(3),
            OwaFamily::Aprog { a: q(1, 2), b: q(3, 1) },
            OwaFamily::Gprog { p: q(3, 2) },
            OwaFamily::Harmonic,
            OwaFamily::Hurwicz { lambda: q(1, 4) },
        ] {
            let text = fam.to_string();
            let tokens: Vec<&str> = text.split_whitespace().collect();
            assert_eq!(OwaFamily::parse(&tokens).unwrap(), fam);
        }
        assert_eq!(
            OwaFamily::parse(&["aprog", "2"]).unwrap(),
            OwaFamily::Aprog { a: q(2, 1), b: q(1, 1) }
        );
        assert!(OwaFamily::parse(&["harmonic", "1"]).is_err());
        assert!(OwaFamily::parse(&["zipf"]).is_err());
    }

    #[test]
    fn shape_detection() {
        let v = OwaVector::new(ints(&[2, 0, 0, 1])).unwrap();
        assert_eq!(hurwicz_lambda(&v), Some(q(2, 3)));
        let v = OwaVector::new(ints(&[3, 3, 0])).unwrap();
        assert_eq!(top_k_best(&v), Some(2));
        assert_eq!(top_k_best(&OwaVector::new(ints(&[2, 1, 0])).unwrap()), None);
        let v = OwaVector::new(ints(&[27, 9, 3])).unwrap();
        assert_eq!(geometric_ratio(&v), Some(q(3, 1)));
        assert_eq!(geometric_ratio(&OwaVector::new(ints(&[3, 2, 1])).unwrap()), None);
    }

    #[test]
    fn truncation_examples() {
        let t = truncate_geometric(q(2, 1), q(1, 2), 10).unwrap();
        assert_eq!(t.ell, 2);
        let mut expected = ints(&[512, 256]);
        expected.extend(std::iter::repeat(q(0, 1)).take(8));
        assert_eq!(t.owa.as_slice(), &expected[..]);

        let t = truncate_geometric(q(2, 1), q(1, 100), 20).unwrap();
        assert_eq!(t.ell, 8);

        // ell would be 8 but K = 5: untruncated.
        let t = truncate_geometric(q(2, 1), q(1, 100), 5).unwrap();
        assert_eq!(t.ell, 5);
        assert_eq!(t.uncapped_ell, 8);
        assert_eq!(t.owa, make_owa(&OwaFamily::Gprog { p: q(2, 1) }, 5).unwrap());
    }

    #[test]
    fn truncation_keeps_weight() {
        for (p, eps, k) in [(q(2, 1), q(1, 2), 10), (q(3, 2), q(1, 10), 25), (q(5, 1), q(1, 3), 12)] {
            let t = truncate_geometric(p, eps, k).unwrap();
            let full = make_owa(&OwaFamily::Gprog { p }, k).unwrap();
            let kept: Rational = t.owa.as_slice().iter().sum();
            let total: Rational = full.as_slice().iter().sum();
            assert!(kept / total >= Rational::one() - eps / 2);
        }
    }
}
