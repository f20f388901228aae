//! Free-slot greedy, the segmented multi-round algorithm and the PTAS for
//! geometric-progression OWA vectors, all aimed at non-finicky utilities.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::brute_force;
use crate::exec::Exec;
use crate::model::{nonfinicky_beta, Instance, WinnerSet};
use crate::number::{floor_to_usize, to_f64, Rational};
use crate::owa::{classify, geometric_ratio, truncate_geometric};

/// `rank(j, a)`: how many items agent `j` strictly prefers to `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFunction {
    ranks: Vec<Vec<usize>>,
}

impl RankFunction {
    pub fn new(inst: &Instance) -> Self {
        let u = inst.utilities();
        let ranks = (0..u.n())
            .map(|j| {
                let row = u.scaled_row(j);
                row.iter()
                    .map(|ua| row.iter().filter(|ub| *ub > ua).count())
                    .collect()
            })
            .collect();
        RankFunction { ranks }
    }

    pub fn get(&self, agent: usize, item: usize) -> usize {
        self.ranks[agent][item]
    }

    pub fn row(&self, agent: usize) -> &[usize] {
        &self.ranks[agent]
    }
}

/// Agent `j`'s items from most to least preferred, equal utilities by index.
pub fn preference_order(inst: &Instance, agent: usize) -> Vec<usize> {
    let row = inst.utilities().scaled_row(agent);
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].cmp(&row[a]).then(a.cmp(&b)));
    order
}

/// One slot held by an item: `slot` is 0-based within the agent's `ell` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Occupant {
    pub item: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotsState {
    pub x: usize,
    pub ell: usize,
    /// Free slots per agent.
    pub free: Vec<usize>,
    pub occupied: Vec<Vec<Occupant>>,
}

impl SlotsState {
    pub fn free_total(&self) -> usize {
        self.free.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotsIteration {
    pub iteration: usize,
    /// Agents with a free slot that rank each item below `x`; `None` once chosen.
    pub coverage: Vec<Option<usize>>,
    pub chosen: usize,
    /// State after the slots of this iteration were filled.
    pub state: SlotsState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotsOutcome {
    pub winners: WinnerSet,
    pub ranks: RankFunction,
    pub iterations: Vec<SlotsIteration>,
    /// `gamma` rounded down to the rank threshold actually used, `x / m`.
    pub effective_gamma: Rational,
    pub beta: Rational,
    /// `beta * (1 - exp(-effective_gamma * K / ell))`.
    pub guarantee: f64,
}

impl SlotsOutcome {
    /// Whether every iteration satisfies `n_i <= ell * n * (1 - x/(ell*m))^i`,
    /// `n_i` being the total number of free slots after iteration `i`.
    pub fn free_slot_decay_holds(&self) -> bool {
        let Some(first) = self.iterations.first() else {
            return true;
        };
        let (x, ell) = (first.state.x, first.state.ell);
        let n = first.state.free.len();
        let m = self.winners_m();
        free_slot_decay_holds(
            self.iterations.iter().map(|it| it.state.free_total()),
            n,
            m,
            x,
            ell,
        )
    }

    fn winners_m(&self) -> usize {
        self.iterations[0].coverage.len()
    }
}

/// Checks `n_i * (ell*m)^i <= ell * n * (ell*m - x)^i` for `i = 1, 2, ...`.
pub fn free_slot_decay_holds(
    free_after: impl IntoIterator<Item = usize>,
    n: usize,
    m: usize,
    x: usize,
    ell: usize,
) -> bool {
    let lm = BigInt::from(ell * m);
    let lmx = BigInt::from(ell * m) - BigInt::from(x);
    let mut lhs_pow = BigInt::one();
    let mut rhs_pow = BigInt::one();
    free_after.into_iter().all(|ni| {
        lhs_pow *= &lm;
        rhs_pow *= &lmx;
        BigInt::from(ni) * &lhs_pow <= BigInt::from(ell * n) * &rhs_pow
    })
}

/// Non-finicky `beta`, taken as 0 when no utility is positive (every committee scores 0).
fn beta_of(inst: &Instance, gamma: Rational) -> Result<Rational> {
    if inst.utilities().u_max().is_zero() {
        return Ok(Rational::zero());
    }
    nonfinicky_beta(inst.utilities(), gamma)
}

fn gamma_in_range(gamma: Rational) -> Result<()> {
    if gamma <= Rational::zero() || gamma > Rational::one() {
        return Err(Error::InvalidParameter("gamma must lie in (0, 1]".into()));
    }
    Ok(())
}

fn check_ell(inst: &Instance, ell: usize) -> Result<()> {
    if ell == 0 || ell > inst.k() {
        return Err(Error::InvalidParameter(format!(
            "ell must lie in 1..={}, got {ell}",
            inst.k()
        )));
    }
    let len = classify(inst.owa()).nonzero_prefix_len;
    if len > ell {
        return Err(Error::Precondition(format!(
            "OWA vector has nonzero entries beyond position {ell} (last nonzero at {len})"
        )));
    }
    Ok(())
}

pub fn slots_greedy(inst: &Instance, gamma: Rational, ell: usize) -> Result<SlotsOutcome> {
    slots_greedy_with(inst, gamma, ell, Exec::default())
}

/// K rounds; each picks the item that the most agents with a free slot rank
/// below `x = floor(gamma * m)`, and fills one slot of each such agent.
pub fn slots_greedy_with(
    inst: &Instance,
    gamma: Rational,
    ell: usize,
    exec: Exec,
) -> Result<SlotsOutcome> {
    gamma_in_range(gamma)?;
    check_ell(inst, ell)?;
    if !classify(inst.owa()).nonincreasing {
        return Err(Error::Precondition(
            "slots requires a nonincreasing OWA vector".into(),
        ));
    }
    let (n, m, k) = (inst.n(), inst.m(), inst.k());
    let x = floor_to_usize(&(gamma * Rational::from_integer(m as i128)));
    if x < ell {
        return Err(Error::Precondition(format!(
            "gamma too small for ell: floor(gamma * m) = {x} < {ell}"
        )));
    }
    let ranks = RankFunction::new(inst);
    let mut state = SlotsState {
        x,
        ell,
        free: vec![ell; n],
        occupied: vec![Vec::new(); n],
    };
    let mut chosen = vec![false; m];
    let mut items = Vec::with_capacity(k);
    let mut iterations = Vec::with_capacity(k);

    for iteration in 1..=k {
        let coverage: Vec<Option<usize>> = exec.map_range(m, |a| {
            (!chosen[a]).then(|| {
                (0..n)
                    .filter(|&j| state.free[j] > 0 && ranks.get(j, a) < x)
                    .count()
            })
        });
        let mut best: Option<(usize, usize)> = None;
        for (a, c) in coverage.iter().enumerate() {
            if let Some(c) = *c {
                if best.map_or(true, |(_, bc)| c > bc) {
                    best = Some((a, c));
                }
            }
        }
        let (a, _) = best.expect("K <= m leaves a candidate");
        chosen[a] = true;
        items.push(a);
        for j in 0..n {
            if state.free[j] > 0 && ranks.get(j, a) < x {
                let slot = ell - state.free[j];
                state.occupied[j].push(Occupant { item: a, slot });
                state.free[j] -= 1;
            }
        }
        iterations.push(SlotsIteration {
            iteration,
            coverage,
            chosen: a,
            state: state.clone(),
        });
    }

    let effective_gamma = Rational::new(x as i128, m as i128);
    let beta = beta_of(inst, effective_gamma)?;
    let exponent = to_f64(&effective_gamma) * k as f64 / ell as f64;
    Ok(SlotsOutcome {
        winners: WinnerSet::new(inst, items)?,
        ranks,
        iterations,
        effective_gamma,
        beta,
        guarantee: to_f64(&beta) * (1.0 - (-exponent).exp()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentRound {
    /// 1-based round, also the segment index.
    pub round: usize,
    /// Agents still in play at the start of the round.
    pub candidates: Vec<usize>,
    pub picked: Vec<usize>,
    /// Agents whose segment holds a committee item after the round.
    pub survivors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentedOutcome {
    pub winners: WinnerSet,
    pub x: usize,
    /// Items allowed per round, `floor(K / ell)`.
    pub per_round: usize,
    pub rounds: Vec<SegmentRound>,
    /// Items added at the end to reach K.
    pub padding: Vec<usize>,
    /// `ell * x / m`.
    pub effective_gamma: Rational,
    pub beta: Rational,
    /// `beta * (1 - ell * exp(-effective_gamma * ell * per_round / ell^2))`, floored at 0.
    pub guarantee: f64,
}

pub fn segmented_solve(inst: &Instance, gamma: Rational, ell: usize) -> Result<SegmentedOutcome> {
    segmented_solve_with(inst, gamma, ell, Exec::default())
}

/// `ell` rounds over consecutive blocks of `x = floor(gamma * m / ell)`
/// positions in each agent's preference order. Round `i` greedily picks up to
/// `floor(K / ell)` items covering the most surviving agents in block `i`;
/// only covered agents survive to the next round.
pub fn segmented_solve_with(
    inst: &Instance,
    gamma: Rational,
    ell: usize,
    exec: Exec,
) -> Result<SegmentedOutcome> {
    gamma_in_range(gamma)?;
    check_ell(inst, ell)?;
    let (n, m, k) = (inst.n(), inst.m(), inst.k());
    let x = floor_to_usize(&(gamma * Rational::new(m as i128, ell as i128)));
    if x == 0 {
        return Err(Error::Precondition(format!(
            "gamma too small for ell: floor(gamma * m / ell) = 0 for ell = {ell}"
        )));
    }
    let per_round = k / ell;
    // segment[j][a]: 0-based block of item a in agent j's order.
    let segment: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            let mut seg = vec![0; m];
            for (pos, &a) in preference_order(inst, j).iter().enumerate() {
                seg[a] = pos / x;
            }
            seg
        })
        .collect();

    let mut chosen = vec![false; m];
    let mut items: Vec<usize> = Vec::with_capacity(k);
    let mut alive: Vec<usize> = (0..n).collect();
    let mut rounds = Vec::with_capacity(ell);
    for round in 1..=ell {
        let s = round - 1;
        let mut covered: Vec<bool> = alive
            .iter()
            .map(|&j| items.iter().any(|&a| segment[j][a] == s))
            .collect();
        let mut picked = Vec::new();
        while picked.len() < per_round {
            let counts: Vec<usize> = exec.map_range(m, |a| {
                if chosen[a] {
                    return 0;
                }
                alive
                    .iter()
                    .zip(&covered)
                    .filter(|(&j, &c)| !c && segment[j][a] == s)
                    .count()
            });
            let (a, best) = counts
                .iter()
                .enumerate()
                .fold((0, 0), |acc, (a, &c)| if c > acc.1 { (a, c) } else { acc });
            if best == 0 {
                break;
            }
            chosen[a] = true;
            items.push(a);
            picked.push(a);
            for (c, &j) in covered.iter_mut().zip(&alive) {
                *c |= segment[j][a] == s;
            }
        }
        let survivors: Vec<usize> = alive
            .iter()
            .zip(&covered)
            .filter(|(_, &c)| c)
            .map(|(&j, _)| j)
            .collect();
        rounds.push(SegmentRound {
            round,
            candidates: alive.clone(),
            picked,
            survivors: survivors.clone(),
        });
        alive = survivors;
    }
    let padding: Vec<usize> = (0..m).filter(|&a| !chosen[a]).take(k - items.len()).collect();
    items.extend(&padding);

    let effective_gamma = Rational::new((ell * x) as i128, m as i128);
    let beta = beta_of(inst, effective_gamma)?;
    let exponent = to_f64(&effective_gamma) * (ell * per_round) as f64 / (ell * ell) as f64;
    let guarantee = to_f64(&beta) * (1.0 - ell as f64 * (-exponent).exp()).max(0.0);
    Ok(SegmentedOutcome {
        winners: WinnerSet::new(inst, items)?,
        x,
        per_round,
        rounds,
        padding,
        effective_gamma,
        beta,
        guarantee,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GprogPath {
    Segmented,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GprogOutcome {
    /// Scored under the full, untruncated vector.
    pub winners: WinnerSet,
    pub path: GprogPath,
    /// Prefix length kept by the truncation.
    pub ell: usize,
    pub beta: Rational,
    /// Lower bound on the achieved fraction of the optimum.
    pub guarantee: f64,
}

/// `(1 - epsilon)`-approximation for `gprog[p]` on `(1, gamma)`-non-finicky
/// utilities: truncate after `ceil(log_p(2/epsilon))` entries, then run the
/// segmented algorithm when its loss `ell * exp(-gamma K / ell^2)` is below
/// `epsilon / 2`, and brute force otherwise.
pub fn gprog_ptas(
    inst: &Instance,
    epsilon: Rational,
    gamma: Rational,
    budget: u128,
) -> Result<GprogOutcome> {
    gamma_in_range(gamma)?;
    let p = geometric_ratio(inst.owa())
        .ok_or_else(|| Error::Precondition("gprog-ptas requires a gprog[p] OWA vector".into()))?;
    let trunc = truncate_geometric(p, epsilon, inst.k())?;
    let ell = trunc.ell;
    let m = inst.m();
    let half_eps = to_f64(&epsilon) / 2.0;

    let x = floor_to_usize(&(gamma * Rational::new(m as i128, ell as i128)));
    let per_round = inst.k() / ell;
    let segmented_fits = x > 0 && per_round > 0 && {
        let g_eff = (ell * x) as f64 / m as f64;
        let exponent = g_eff * (ell * per_round) as f64 / (ell * ell) as f64;
        ell as f64 * (-exponent).exp() < half_eps
    };

    if segmented_fits {
        let truncated = inst.with_owa(trunc.owa)?;
        let out = segmented_solve(&truncated, gamma, ell)?;
        Ok(GprogOutcome {
            winners: WinnerSet::new(inst, out.winners.items().to_vec())?,
            path: GprogPath::Segmented,
            ell,
            beta: out.beta,
            guarantee: out.guarantee * (1.0 - half_eps),
        })
    } else {
        Ok(GprogOutcome {
            winners: brute_force(inst, budget)?,
            path: GprogPath::BruteForce,
            ell,
            beta: beta_of(inst, gamma)?,
            guarantee: 1.0,
        })
    }
}
