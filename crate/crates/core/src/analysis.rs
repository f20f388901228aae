//! Closed-form approximation bounds, the Lambert W function, and CSV tables
//! of bound values over parameter grids. Plain `f64` throughout.

use std::fmt::{self, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::OwaVector;
use crate::number::to_f64;

/// Principal branch of Lambert W for `x >= 0`: the `w >= 0` with `w e^w = x`.
///
/// Halley iteration from `ln(1 + x)` (below `e`) or `ln x - ln ln x` (above).
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "lambert_w needs a nonnegative argument, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let mut w = if x < std::f64::consts::E {
        x.ln_1p()
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundFamily {
    /// `beta * (1 - exp(-gamma K / ell))`
    Slots,
    /// `beta * (1 - ell * exp(-gamma K / ell^2))`
    Segmented,
    /// `1 - 2 W(K/ell) / (K/ell)`
    BordaLambert,
    /// `(alpha_1 + ... + alpha_K) / (K alpha_1)`
    KbestProxy,
    /// `1 - 1/e`
    GreedyGeneral,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 5] = [
        BoundFamily::Slots,
        BoundFamily::Segmented,
        BoundFamily::BordaLambert,
        BoundFamily::KbestProxy,
        BoundFamily::GreedyGeneral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundFamily::Slots => "slots",
            BoundFamily::Segmented => "segmented",
            BoundFamily::BordaLambert => "borda-lambert",
            BoundFamily::KbestProxy => "kbest-proxy",
            BoundFamily::GreedyGeneral => "greedy-general",
        }
    }
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        BoundFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = BoundFamily::ALL.iter().map(|f| f.name()).collect();
                format!("unknown bound family '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundQuery {
    pub family: BoundFamily,
    pub beta: f64,
    pub gamma: f64,
    pub k: usize,
    pub ell: usize,
    /// Needed only by [`BoundFamily::KbestProxy`].
    pub owa: Option<OwaVector>,
}

impl BoundQuery {
    pub fn new(family: BoundFamily, beta: f64, gamma: f64, k: usize, ell: usize) -> Self {
        BoundQuery {
            family,
            beta,
            gamma,
            k,
            ell,
            owa: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    /// Clamped to `[0, 1]`.
    pub value: f64,
    /// The raw formula was negative, so the bound says nothing.
    pub vacuous: bool,
}

impl Bound {
    fn clamp(raw: f64) -> Bound {
        Bound {
            value: raw.clamp(0.0, 1.0),
            vacuous: raw < 0.0,
        }
    }
}

fn unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")))
    }
}

pub fn bound(q: &BoundQuery) -> Result<Bound> {
    let needs_ell = matches!(
        q.family,
        BoundFamily::Slots | BoundFamily::Segmented | BoundFamily::BordaLambert
    );
    if needs_ell && (q.ell == 0 || q.k < q.ell) {
        return Err(Error::InvalidParameter(format!(
            "need K >= ell >= 1, got K = {}, ell = {}",
            q.k, q.ell
        )));
    }
    let (k, ell) = (q.k as f64, q.ell as f64);
    let raw = match q.family {
        BoundFamily::Slots => {
            unit("beta", q.beta)?;
            unit("gamma", q.gamma)?;
            q.beta * (1.0 - (-q.gamma * k / ell).exp())
        }
        BoundFamily::Segmented => {
            unit("beta", q.beta)?;
            unit("gamma", q.gamma)?;
            q.beta * (1.0 - ell * (-q.gamma * k / (ell * ell)).exp())
        }
        BoundFamily::BordaLambert => borda_lambert(k / ell)?,
        BoundFamily::KbestProxy => {
            let owa = q.owa.as_ref().ok_or_else(|| {
                Error::InvalidParameter("kbest-proxy bound needs the OWA vector".into())
            })?;
            let a = owa.as_slice();
            if a[0] <= crate::number::Rational::from_integer(0) {
                return Err(Error::InvalidParameter("alpha_1 must be positive".into()));
            }
            to_f64(&(owa.sum() / (a[0] * crate::number::Rational::from_integer(a.len() as i128))))
        }
        BoundFamily::GreedyGeneral => crate::greedy::greedy_ratio(),
    };
    Ok(Bound::clamp(raw))
}

fn borda_lambert(t: f64) -> Result<f64> {
    Ok(1.0 - 2.0 * lambert_w(t)? / t)
}

/// The `gamma` balancing both loss terms of the Borda analysis, `W(K/ell) * ell / K`,
/// with the matching rank threshold `floor(gamma * m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuggestedGamma {
    pub gamma: f64,
    pub x: usize,
}

pub fn suggested_gamma(k: usize, ell: usize, m: usize) -> Result<SuggestedGamma> {
    if ell == 0 || k < ell {
        return Err(Error::InvalidParameter(format!(
            "need K >= ell >= 1, got K = {k}, ell = {ell}"
        )));
    }
    let t = k as f64 / ell as f64;
    let gamma = lambert_w(t)? / t;
    Ok(SuggestedGamma {
        gamma,
        x: (gamma * m as f64).floor() as usize,
    })
}

/// Axis values for [`bound_curves`]; rows iterate beta, then gamma, then K/ell.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub k_over_ell: Vec<f64>,
    /// Used by the segmented family, whose bound depends on ell itself.
    pub ell: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            beta: vec![1.0],
            gamma: vec![0.5],
            k_over_ell: vec![1.0],
            ell: 1,
        }
    }
}

fn parse_axis(spec: &str) -> std::result::Result<Vec<f64>, String> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("'{s}' is not a number"))
    };
    if spec.trim().is_empty() {
        return Ok(Vec::new());
    }
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [lo, hi, count] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| format!("'{count}' is not a point count"))?;
            Ok(match count {
                0 => Vec::new(),
                1 => vec![lo],
                c => (0..c)
                    .map(|i| lo + (hi - lo) * i as f64 / (c - 1) as f64)
                    .collect(),
            })
        }
        [_] => spec.split(',').map(num).collect(),
        _ => Err(format!("axis '{spec}' is neither a list nor lo:hi:count")),
    }
}

impl FromStr for Grid {
    type Err = String;

    /// `beta=0:1:5;gamma=0.1,0.5;kl=1,2;ell=2`. Axes are comma lists or
    /// `lo:hi:count` ranges; omitted axes keep their defaults.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut grid = Grid::default();
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("grid part '{part}' lacks '='"))?;
            match key.trim() {
                "beta" => grid.beta = parse_axis(value)?,
                "gamma" => grid.gamma = parse_axis(value)?,
                "kl" | "k_over_ell" => grid.k_over_ell = parse_axis(value)?,
                "ell" => {
                    grid.ell = value
                        .trim()
                        .parse()
                        .map_err(|_| format!("ell '{value}' is not a positive integer"))?
                }
                other => return Err(format!("unknown grid axis '{other}'")),
            }
        }
        if grid.ell == 0 {
            return Err("ell must be at least 1".into());
        }
        Ok(grid)
    }
}

/// Bound for one grid point, with `K/ell` given directly.
pub fn curve_value(family: BoundFamily, beta: f64, gamma: f64, k_over_ell: f64, ell: usize) -> Result<f64> {
    let ell = ell as f64;
    let raw = match family {
        BoundFamily::Slots => beta * (1.0 - (-gamma * k_over_ell).exp()),
        BoundFamily::Segmented => beta * (1.0 - ell * (-gamma * k_over_ell / ell).exp()),
        BoundFamily::BordaLambert => borda_lambert(k_over_ell)?,
        BoundFamily::GreedyGeneral => crate::greedy::greedy_ratio(),
        BoundFamily::KbestProxy => {
            return Err(Error::InvalidParameter(
                "kbest-proxy depends on the OWA vector, not on a grid".into(),
            ))
        }
    };
    Ok(Bound::clamp(raw).value)
}

/// CSV with header `beta,gamma,k_over_ell,bound`.
pub fn bound_curves(family: BoundFamily, grid: &Grid) -> Result<String> {
    let mut out = String::from("beta,gamma,k_over_ell,bound\n");
    for &beta in &grid.beta {
        for &gamma in &grid.gamma {
            for &kl in &grid.k_over_ell {
                let b = curve_value(family, beta, gamma, kl, grid.ell)?;
                let _ = writeln!(out, "{beta},{gamma},{kl},{b}");
            }
        }
    }
    Ok(out)
}

/// The `beta` at which the slots bound equals `target` for the given
/// `gamma` and `K/ell`, if it is at most 1.
pub fn iso_beta(target: f64, gamma: f64, k_over_ell: f64) -> Option<f64> {
    let beta = target / (1.0 - (-gamma * k_over_ell).exp());
    (beta.is_finite() && beta <= 1.0).then_some(beta)
}

/// CSV with header `target,gamma,k_over_ell,beta`: points on the slots
/// bound's level set `target`. Unreachable points are skipped.
pub fn iso_curves(target: f64, grid: &Grid) -> String {
    let mut out = String::from("target,gamma,k_over_ell,beta\n");
    for &kl in &grid.k_over_ell {
        for &gamma in &grid.gamma {
            if let Some(beta) = iso_beta(target, gamma, kl) {
                let _ = writeln!(out, "{target},{gamma},{kl},{beta}");
            }
        }
    }
    out
}
