//! Committee evaluation, greedy marginal gains and the submodularity checker.
//!
//! A committee's score is the sum over agents of the OWA applied to the
//! agent's utilities for the committee, sorted nonincreasingly. For sets
//! smaller than K the first `|W|` OWA entries are used; for larger sets the
//! full vector is applied to the agent's top K.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{check_scoring_range, Instance, OwaVector, UtilityMatrix};
use crate::number::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreBreakdown {
    pub total: Rational,
    pub per_agent: Vec<Rational>,
    /// Each agent's utilities for the committee, nonincreasing.
    pub per_agent_sorted_utilities: Vec<Vec<Rational>>,
}

/// Integer-scaled scorer for one utility matrix and one weight vector.
pub(crate) struct Scorer<'a> {
    u: &'a UtilityMatrix,
    alpha: &'a [i128],
    denom: i128,
}

impl<'a> Scorer<'a> {
    pub fn new(u: &'a UtilityMatrix, owa: &'a OwaVector) -> Result<Self> {
        check_scoring_range(u, owa)?;
        Ok(Scorer {
            u,
            alpha: owa.scaled_values(),
            denom: u.scale_denom() * owa.scale_denom(),
        })
    }

    pub fn for_instance(inst: &'a Instance) -> Self {
        // Instance construction already ran the range check.
        let (u, owa) = (inst.utilities(), inst.owa());
        Scorer {
            u,
            alpha: owa.scaled_values(),
            denom: u.scale_denom() * owa.scale_denom(),
        }
    }

    pub fn alpha(&self) -> &[i128] {
        self.alpha
    }

    /// OWA value of one agent for `items`, using the first `min(|items|, K)` weights.
    pub fn agent_value(&self, agent: usize, items: &[usize], buf: &mut Vec<i128>) -> i128 {
        let row = self.u.scaled_row(agent);
        buf.clear();
        buf.extend(items.iter().map(|&j| row[j]));
        buf.sort_unstable_by(|a, b| b.cmp(a));
        buf.iter().zip(self.alpha).map(|(u, a)| u * a).sum()
    }

    pub fn total(&self, items: &[usize], buf: &mut Vec<i128>) -> i128 {
        (0..self.u.n()).map(|i| self.agent_value(i, items, buf)).sum()
    }

    pub fn to_rational(&self, v: i128) -> Rational {
        Rational::new(v, self.denom)
    }
}

fn check_items(items: &[usize], m: usize) -> Result<()> {
    if let Some(&index) = items.iter().find(|&&j| j >= m) {
        return Err(Error::IndexOutOfRange { index, m });
    }
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter("committee has repeated items".into()));
    }
    Ok(())
}

/// Scores `items` under the instance OWA, or under `owa_override` (whose
/// length must equal `|items|`; pass a prefix to score partial committees).
pub fn committee_score(
    inst: &Instance,
    items: &[usize],
    owa_override: Option<&OwaVector>,
) -> Result<ScoreBreakdown> {
    let owa = owa_override.unwrap_or(inst.owa());
    if items.len() != owa.len() {
        return Err(Error::InvalidParameter(format!(
            "committee has {} items but the OWA vector has {} entries",
            items.len(),
            owa.len()
        )));
    }
    check_items(items, inst.m())?;
    let u = inst.utilities();
    let scorer = Scorer::new(u, owa)?;
    let mut buf = Vec::with_capacity(items.len());
    let mut total = 0i128;
    let mut per_agent = Vec::with_capacity(u.n());
    let mut sorted_utils = Vec::with_capacity(u.n());
    for agent in 0..u.n() {
        let v = scorer.agent_value(agent, items, &mut buf);
        total += v;
        per_agent.push(scorer.to_rational(v));
        let mut row: Vec<Rational> = items.iter().map(|&j| u.get(agent, j)).collect();
        row.sort_unstable_by(|a, b| b.cmp(a));
        sorted_utils.push(row);
    }
    Ok(ScoreBreakdown {
        total: scorer.to_rational(total),
        per_agent,
        per_agent_sorted_utilities: sorted_utils,
    })
}

/// Score of a set of any size: first `min(|set|, K)` OWA entries applied to
/// each agent's best `min(|set|, K)` items. The empty set scores 0.
pub fn set_value(inst: &Instance, items: &[usize]) -> Result<Rational> {
    check_items(items, inst.m())?;
    let scorer = Scorer::for_instance(inst);
    Ok(scorer.to_rational(scorer.total(items, &mut Vec::new())))
}

/// Gain of adding `a` to a partial committee `w` (`|w| < K`): the
/// prefix-`(|w|+1)` score of `w + a` minus the prefix-`|w|` score of `w`.
pub fn marginal_gain(inst: &Instance, w: &[usize], a: usize) -> Result<Rational> {
    check_items(w, inst.m())?;
    check_items(&[a], inst.m())?;
    if w.contains(&a) {
        return Err(Error::InvalidParameter(format!(
            "item a{} is already in the committee",
            a + 1
        )));
    }
    if w.len() >= inst.k() {
        return Err(Error::InvalidParameter(format!(
            "committee already has K = {} items",
            inst.k()
        )));
    }
    let scorer = Scorer::for_instance(inst);
    let mut buf = Vec::new();
    let before = scorer.total(w, &mut buf);
    let mut with = w.to_vec();
    with.push(a);
    let after = scorer.total(&with, &mut buf);
    Ok(scorer.to_rational(after - before))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubmodularMode {
    /// Every triple `W ⊆ W'`, `a ∉ W'`; fails if `3^m` exceeds `budget`.
    Exhaustive { budget: u128 },
    /// `samples` random triples drawn from a seeded ChaCha8 stream.
    Sampled { samples: usize, seed: u64 },
}

impl SubmodularMode {
    pub const DEFAULT_EXHAUSTIVE_BUDGET: u128 = 4_782_969; // 3^14
}

/// Gains of adding `a` to `w` and to `w_prime`. Submodularity requires
/// `lhs >= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub w: Vec<usize>,
    pub w_prime: Vec<usize>,
    pub a: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Witness {
    pub fn is_violation(&self) -> bool {
        self.lhs < self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubmodularityCheck {
    Ok { triples_checked: u128 },
    Violated(Witness),
}

/// Gains for one triple; errors unless `w ⊆ w_prime` and `a ∉ w_prime`.
pub fn evaluate_triple(
    inst: &Instance,
    w: &[usize],
    w_prime: &[usize],
    a: usize,
) -> Result<Witness> {
    check_items(w_prime, inst.m())?;
    check_items(&[a], inst.m())?;
    if !w.iter().all(|x| w_prime.contains(x)) {
        return Err(Error::InvalidParameter("W must be a subset of W'".into()));
    }
    if w_prime.contains(&a) {
        return Err(Error::InvalidParameter("a must lie outside W'".into()));
    }
    let gain = |s: &[usize]| -> Result<Rational> {
        let mut with = s.to_vec();
        with.push(a);
        Ok(set_value(inst, &with)? - set_value(inst, s)?)
    };
    let mut w_sorted = w.to_vec();
    w_sorted.sort_unstable();
    let mut wp_sorted = w_prime.to_vec();
    wp_sorted.sort_unstable();
    Ok(Witness {
        lhs: gain(&w_sorted)?,
        rhs: gain(&wp_sorted)?,
        w: w_sorted,
        w_prime: wp_sorted,
        a,
    })
}

fn mask_items(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|b| mask >> b & 1 == 1).collect()
}

pub fn check_submodular(inst: &Instance, mode: SubmodularMode) -> Result<SubmodularityCheck> {
    check_submodular_with(inst, mode, Exec::default())
}

/// Searches for `W ⊆ W'`, `a ∉ W'` with `gain(W, a) < gain(W', a)`.
/// Exhaustive mode reports the first violation in the order
/// (W' by bitmask, then W by bitmask, then a), whatever `exec` is.
pub fn check_submodular_with(
    inst: &Instance,
    mode: SubmodularMode,
    exec: Exec,
) -> Result<SubmodularityCheck> {
    let m = inst.m();
    let scorer = Scorer::for_instance(inst);
    match mode {
        SubmodularMode::Exhaustive { budget } => {
            let required = 3u128.checked_pow(m as u32).unwrap_or(u128::MAX);
            if required > budget || m >= 30 {
                return Err(Error::BudgetExceeded { required, budget });
            }
            let full = 1usize << m;
            let table: Vec<i128> = exec.map_range(full, |mask| {
                scorer.total(&mask_items(mask), &mut Vec::new())
            });
            let found = exec.find_map_first(full, |wp| {
                let mut sub = 0usize;
                loop {
                    for a in (0..m).filter(|a| wp >> a & 1 == 0) {
                        let bit = 1 << a;
                        let lhs = table[sub | bit] - table[sub];
                        let rhs = table[wp | bit] - table[wp];
                        if lhs < rhs {
                            return Some(Witness {
                                w: mask_items(sub),
                                w_prime: mask_items(wp),
                                a,
                                lhs: scorer.to_rational(lhs),
                                rhs: scorer.to_rational(rhs),
                            });
                        }
                    }
                    if sub == wp {
                        return None;
                    }
                    sub = (sub.wrapping_sub(wp)) & wp;
                }
            });
            Ok(match found {
                Some(w) => SubmodularityCheck::Violated(w),
                None => SubmodularityCheck::Ok {
                    triples_checked: required,
                },
            })
        }
        SubmodularMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut buf = Vec::new();
            let mut checked = 0u128;
            for _ in 0..samples {
                let a = rng.gen_range(0..m);
                let wp: Vec<usize> = (0..m).filter(|&j| j != a && rng.gen_bool(0.5)).collect();
                let w: Vec<usize> = wp.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                checked += 1;
                let gain = |s: &[usize], buf: &mut Vec<i128>| {
                    let mut with = s.to_vec();
                    with.push(a);
                    scorer.total(&with, buf) - scorer.total(s, buf)
                };
                let lhs = gain(&w, &mut buf);
                let rhs = gain(&wp, &mut buf);
                if lhs < rhs {
                    return Ok(SubmodularityCheck::Violated(Witness {
                        w,
                        w_prime: wp,
                        a,
                        lhs: scorer.to_rational(lhs),
                        rhs: scorer.to_rational(rhs),
                    }));
                }
            }
            Ok(SubmodularityCheck::Ok {
                triples_checked: checked,
            })
        }
    }
}
