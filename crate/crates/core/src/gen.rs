//! Seeded random instances. All generators draw from ChaCha8, so a seed
//! reproduces the same instance on every platform.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{approval_profile, borda_profile, Instance, UtilityMatrix};
use crate::owa::OwaFamily;

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityKind {
    /// Integers drawn uniformly from `0..=max`.
    Uniform { max: u32 },
    /// Each item approved independently with probability `rate`.
    Approval { rate: f64 },
    /// Borda scores of a uniformly random ranking per agent.
    Borda,
}

impl UtilityKind {
    pub fn name(&self) -> &'static str {
        match self {
            UtilityKind::Uniform { .. } => "uniform",
            UtilityKind::Approval { .. } => "approval",
            UtilityKind::Borda => "borda",
        }
    }
}

impl fmt::Display for UtilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UtilityKind {
    type Err = String;

    /// `uniform`, `approval` or `borda`, with default parameters.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(UtilityKind::Uniform { max: 10 }),
            "approval" => Ok(UtilityKind::Approval { rate: 0.5 }),
            "borda" => Ok(UtilityKind::Borda),
            _ => Err(format!(
                "unknown kind '{s}' (expected uniform, approval or borda)"
            )),
        }
    }
}

pub fn random_utilities(kind: UtilityKind, n: usize, m: usize, rng: &mut GenRng) -> Result<UtilityMatrix> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("n and m must be positive".into()));
    }
    match kind {
        UtilityKind::Uniform { max } => {
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..m).map(|_| i64::from(rng.gen_range(0..=max))).collect())
                .collect();
            UtilityMatrix::from_integers(&rows)
        }
        UtilityKind::Approval { rate } => {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::InvalidParameter(format!(
                    "approval rate must lie in [0, 1], got {rate}"
                )));
            }
            let approvals: Vec<Vec<usize>> = (0..n)
                .map(|_| (0..m).filter(|_| rng.gen_bool(rate)).collect())
                .collect();
            approval_profile(&approvals, m)
        }
        UtilityKind::Borda => {
            let rankings: Vec<Vec<usize>> = (0..n)
                .map(|_| {
                    let mut r: Vec<usize> = (0..m).collect();
                    r.shuffle(rng);
                    r
                })
                .collect();
            borda_profile(&rankings, m)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: UtilityKind,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub family: OwaFamily,
    pub seed: u64,
}

/// Random utilities of the requested kind under a named OWA family.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    let u = random_utilities(spec.kind, spec.n, spec.m, &mut rng(spec.seed))?;
    Instance::with_family(u, spec.family.clone(), spec.k)
}
