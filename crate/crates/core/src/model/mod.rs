//! Core domain types: utility matrices, OWA vectors, instances and winner
//! sets, plus the approval/Borda profile builders and non-finicky parameters.

mod preflib;
mod text;

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::number::{self, check_product_range, is_nonnegative, Rational, Scaled};
use crate::owa::{make_owa, OwaFamily};
use crate::scoring;

pub use preflib::{parse_preflib_soc, PreflibProfile};
pub use text::{parse_instance, serialize_instance};

/// `n x m` nonnegative intrinsic utilities, row per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityMatrix {
    n: usize,
    m: usize,
    values: Vec<Rational>,
    scaled: Scaled,
}

impl UtilityMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::InvalidInstance(
                "need at least one agent and one item".into(),
            ));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::InvalidInstance(format!(
                "agent {} has {} utilities, expected {m}",
                i + 1,
                rows[i].len()
            )));
        }
        let values: Vec<Rational> = rows.into_iter().flatten().collect();
        if let Some(pos) = values.iter().position(|v| !is_nonnegative(v)) {
            return Err(Error::InvalidInstance(format!(
                "negative utility for agent {}, item a{}",
                pos / m + 1,
                pos % m + 1
            )));
        }
        let scaled = Scaled::new(&values)?;
        Ok(UtilityMatrix {
            n,
            m,
            values,
            scaled,
        })
    }

    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.as_ref()
                        .iter()
                        .map(|&v| Rational::from_integer(v as i128))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, agent: usize, item: usize) -> Rational {
        self.values[agent * self.m + item]
    }

    pub fn row(&self, agent: usize) -> &[Rational] {
        &self.values[agent * self.m..(agent + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.values.chunks(self.m)
    }

    /// Highest utility any agent gives to any item.
    pub fn u_max(&self) -> Rational {
        self.values.iter().copied().max().unwrap_or_else(Rational::zero)
    }

    /// Total utility of each item over all agents.
    pub fn column_sums(&self) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); self.m];
        for row in self.rows() {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    /// Utilities of one agent as integers over [`Self::scale_denom`].
    pub(crate) fn scaled_row(&self, agent: usize) -> &[i128] {
        &self.scaled.values[agent * self.m..(agent + 1) * self.m]
    }

    pub(crate) fn scale_denom(&self) -> i128 {
        self.scaled.denom
    }

    pub(crate) fn scaled_max(&self) -> i128 {
        self.scaled.max_abs()
    }
}

/// OWA weights `alpha_1..alpha_K`, all nonnegative. Not normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwaVector {
    alpha: Vec<Rational>,
    scaled: Scaled,
}

impl OwaVector {
    pub fn new(alpha: Vec<Rational>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidInstance("OWA vector is empty".into()));
        }
        if let Some(i) = alpha.iter().position(|v| !is_nonnegative(v)) {
            return Err(Error::InvalidInstance(format!(
                "negative OWA weight at position {}",
                i + 1
            )));
        }
        let scaled = Scaled::new(&alpha)?;
        Ok(OwaVector { alpha, scaled })
    }

    pub fn from_integers(alpha: &[i64]) -> Result<Self> {
        Self::new(
            alpha
                .iter()
                .map(|&v| Rational::from_integer(v as i128))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn sum(&self) -> Rational {
        self.alpha.iter().sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.alpha.iter().all(Zero::is_zero)
    }

    /// The first `len` entries (may be all zero).
    pub fn prefix(&self, len: usize) -> Result<OwaVector> {
        if len == 0 || len > self.len() {
            return Err(Error::InvalidParameter(format!(
                "prefix length {len} outside 1..={}",
                self.len()
            )));
        }
        OwaVector::new(self.alpha[..len].to_vec())
    }

    /// Every entry multiplied by `c > 0`.
    pub fn scaled_by(&self, c: Rational) -> Result<OwaVector> {
        OwaVector::new(self.alpha.iter().map(|a| a * c).collect())
    }

    pub(crate) fn scaled_values(&self) -> &[i128] {
        &self.scaled.values
    }

    pub(crate) fn scale_denom(&self) -> i128 {
        self.scaled.denom
    }

    pub(crate) fn scaled_max(&self) -> i128 {
        self.scaled.max_abs()
    }
}

impl fmt::Display for OwaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.alpha.iter().map(number::format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Utilities, OWA vector and committee size `K` (= OWA length).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    utilities: UtilityMatrix,
    owa: OwaVector,
    family: Option<OwaFamily>,
}

impl Instance {
    pub fn new(utilities: UtilityMatrix, owa: OwaVector) -> Result<Self> {
        let k = owa.len();
        if k > utilities.m() {
            return Err(Error::InvalidInstance(format!(
                "K exceeds item count (K = {k}, m = {})",
                utilities.m()
            )));
        }
        if owa.is_all_zero() {
            return Err(Error::InvalidInstance("all-zero OWA vector".into()));
        }
        check_scoring_range(&utilities, &owa)?;
        Ok(Instance {
            utilities,
            owa,
            family: None,
        })
    }

    /// Builds the OWA from a named family; the family is kept for serialization.
    pub fn with_family(utilities: UtilityMatrix, family: OwaFamily, k: usize) -> Result<Self> {
        if k > utilities.m() {
            return Err(Error::InvalidInstance(format!(
                "K exceeds item count (K = {k}, m = {})",
                utilities.m()
            )));
        }
        let owa = make_owa(&family, k)?;
        let mut inst = Instance::new(utilities, owa)?;
        inst.family = Some(family);
        Ok(inst)
    }

    /// Same utilities, different OWA vector (and therefore possibly different K).
    pub fn with_owa(&self, owa: OwaVector) -> Result<Instance> {
        Instance::new(self.utilities.clone(), owa)
    }

    pub fn n(&self) -> usize {
        self.utilities.n()
    }

    pub fn m(&self) -> usize {
        self.utilities.m()
    }

    pub fn k(&self) -> usize {
        self.owa.len()
    }

    pub fn utilities(&self) -> &UtilityMatrix {
        &self.utilities
    }

    pub fn owa(&self) -> &OwaVector {
        &self.owa
    }

    pub fn family(&self) -> Option<&OwaFamily> {
        self.family.as_ref()
    }
}

pub(crate) fn check_scoring_range(u: &UtilityMatrix, owa: &OwaVector) -> Result<()> {
    let terms = (u.n() as u128) * (owa.len().max(1) as u128);
    check_product_range(u.scaled_max(), owa.scaled_max(), terms)?;
    u.scale_denom()
        .checked_mul(owa.scale_denom())
        .map(|_| ())
        .ok_or_else(|| Error::Overflow("score denominator does not fit in 128 bits".into()))
}

/// A size-K committee (sorted, 0-based item indices) with its score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinnerSet {
    items: Vec<usize>,
    score: Rational,
}

impl WinnerSet {
    /// Validates `items` against the instance and scores it under the instance OWA.
    pub fn new(inst: &Instance, mut items: Vec<usize>) -> Result<Self> {
        items.sort_unstable();
        if items.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("committee has repeated items".into()));
        }
        if items.len() != inst.k() {
            return Err(Error::InvalidParameter(format!(
                "committee has {} items, K = {}",
                items.len(),
                inst.k()
            )));
        }
        let score = scoring::committee_score(inst, &items, None)?.total;
        Ok(WinnerSet { items, score })
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn score(&self) -> Rational {
        self.score
    }

    /// `a1 a2 a6` style labels.
    pub fn labels(&self) -> String {
        item_labels(&self.items)
    }
}

impl fmt::Display for WinnerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} / {}", self.labels(), number::format_rational(&self.score))
    }
}

pub fn item_labels(items: &[usize]) -> String {
    items
        .iter()
        .map(|i| format!("a{}", i + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

/// 0/1 utilities: 1 exactly where an agent approves the item.
pub fn approval_profile(approvals: &[Vec<usize>], m: usize) -> Result<UtilityMatrix> {
    let rows = approvals
        .iter()
        .map(|set| {
            let mut row = vec![Rational::zero(); m];
            for &j in set {
                *row.get_mut(j).ok_or(Error::IndexOutOfRange { index: j, m })? = Rational::one();
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    UtilityMatrix::new(rows)
}

/// Borda utilities from complete rankings (best first): the item in
/// position `r` (1-based) gets `m - r`.
pub fn borda_profile(rankings: &[Vec<usize>], m: usize) -> Result<UtilityMatrix> {
    let rows = rankings
        .iter()
        .enumerate()
        .map(|(agent, ranking)| {
            if ranking.len() != m {
                return Err(Error::InvalidInstance(format!(
                    "ranking of agent {} has {} items, expected {m}",
                    agent + 1,
                    ranking.len()
                )));
            }
            let mut row = vec![None; m];
            for (pos, &item) in ranking.iter().enumerate() {
                let slot = row
                    .get_mut(item)
                    .ok_or(Error::IndexOutOfRange { index: item, m })?;
                if slot.is_some() {
                    return Err(Error::InvalidInstance(format!(
                        "ranking of agent {} repeats item a{}",
                        agent + 1,
                        item + 1
                    )));
                }
                *slot = Some(Rational::from_integer((m - 1 - pos) as i128));
            }
            Ok(row.into_iter().map(|v| v.unwrap()).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    UtilityMatrix::new(rows)
}

/// `(beta, gamma)` such that every agent has utility at least `beta * u_max`
/// for at least `ceil(gamma * m)` items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonFinickyParams {
    pub beta: Rational,
    pub gamma: Rational,
}

impl NonFinickyParams {
    pub fn of(u: &UtilityMatrix, gamma: Rational) -> Result<Self> {
        Ok(NonFinickyParams {
            beta: nonfinicky_beta(u, gamma)?,
            gamma,
        })
    }
}

/// Largest `beta` for which the utilities are `(beta, gamma)`-non-finicky:
/// the minimum over agents of their `ceil(gamma * m)`-th largest utility,
/// divided by the global maximum utility.
pub fn nonfinicky_beta(u: &UtilityMatrix, gamma: Rational) -> Result<Rational> {
    if gamma <= Rational::zero() || gamma > Rational::one() {
        return Err(Error::InvalidParameter("gamma must lie in (0, 1]".into()));
    }
    let u_max = u.u_max();
    if u_max.is_zero() {
        return Err(Error::InvalidInstance("no positive utility".into()));
    }
    let t = number::ceil_to_usize(&(gamma * Rational::from_integer(u.m() as i128))).max(1);
    let worst = u
        .rows()
        .map(|row| {
            let mut sorted = row.to_vec();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            sorted[t - 1]
        })
        .min()
        .expect("at least one agent");
    Ok(worst / u_max)
}
