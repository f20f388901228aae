//! The submodular greedy and solvers built by swapping in a simpler OWA:
//! the Hurwicz reduction to 1-best, the K-best proxy, and the PTAS for
//! (K-f)-best vectors.

use std::f64::consts::E;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{brute_force, top_items_by_total};
use crate::exec::Exec;
use crate::model::{Instance, WinnerSet};
use crate::nonfinicky::slots_greedy;
use crate::number::{to_f64, Rational};
use crate::owa::{classify, hurwicz_lambda, make_owa, top_k_best, OwaFamily};
use crate::scoring::Scorer;

/// `1 - 1/e`.
pub fn greedy_ratio() -> f64 {
    1.0 - 1.0 / E
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyIteration {
    /// 1-based iteration number, equal to the prefix length in use.
    pub iteration: usize,
    pub score_before: Rational,
    /// Gain per item; `None` for items already chosen.
    pub gains: Vec<Option<Rational>>,
    pub chosen: usize,
    /// Score of the committee so far under the prefix OWA of this iteration.
    pub score_after: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GreedyTrace {
    pub iterations: Vec<GreedyIteration>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub winners: WinnerSet,
    pub trace: GreedyTrace,
    /// `1 - 1/e` for nonincreasing OWA vectors, otherwise `None` (heuristic run).
    pub guarantee: Option<f64>,
}

pub fn greedy_solve(inst: &Instance) -> Result<GreedyOutcome> {
    greedy_solve_with(inst, Exec::default())
}

/// K rounds; each adds the item with the largest marginal gain under the
/// growing OWA prefix, lowest index on ties.
pub fn greedy_solve_with(inst: &Instance, exec: Exec) -> Result<GreedyOutcome> {
    let (n, m, k) = (inst.n(), inst.m(), inst.k());
    let scorer = Scorer::for_instance(inst);
    let alpha = scorer.alpha();
    let u = inst.utilities();

    // Each agent's utilities for the chosen items, nonincreasing.
    let mut tops: Vec<Vec<i128>> = vec![Vec::with_capacity(k); n];
    let mut chosen = vec![false; m];
    let mut items = Vec::with_capacity(k);
    let mut running = 0i128;
    let mut trace = GreedyTrace::default();

    for iteration in 1..=k {
        let gains: Vec<Option<i128>> = exec.map_range(m, |a| {
            if chosen[a] {
                return None;
            }
            let mut gain = 0i128;
            for (agent, top) in tops.iter().enumerate() {
                let ua = u.scaled_row(agent)[a];
                let p = top.partition_point(|&x| x >= ua);
                gain += alpha[p] * ua;
                for (q, s) in top.iter().enumerate().skip(p) {
                    gain += (alpha[q + 1] - alpha[q]) * s;
                }
            }
            Some(gain)
        });
        let (best, best_gain) = gains
            .iter()
            .enumerate()
            .filter_map(|(a, g)| g.map(|g| (a, g)))
            .fold(None, |acc: Option<(usize, i128)>, (a, g)| match acc {
                Some((_, bg)) if bg >= g => acc,
                _ => Some((a, g)),
            })
            .expect("K <= m leaves a candidate");

        let score_before = scorer.to_rational(running);
        running += best_gain;
        chosen[best] = true;
        items.push(best);
        for (agent, top) in tops.iter_mut().enumerate() {
            let ua = u.scaled_row(agent)[best];
            let p = top.partition_point(|&x| x >= ua);
            top.insert(p, ua);
        }
        trace.iterations.push(GreedyIteration {
            iteration,
            score_before,
            gains: gains
                .iter()
                .map(|g| g.map(|g| scorer.to_rational(g)))
                .collect(),
            chosen: best,
            score_after: scorer.to_rational(running),
        });
    }

    let winners = WinnerSet::new(inst, items)?;
    debug_assert_eq!(winners.score(), scorer.to_rational(running));
    let guarantee = classify(inst.owa()).nonincreasing.then(greedy_ratio);
    Ok(GreedyOutcome {
        winners,
        trace,
        guarantee,
    })
}

/// Solver used on the 1-best companion instance of a Hurwicz instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OneBestSolver {
    Greedy,
    Brute { budget: u128 },
    /// Free-slot greedy with one slot per agent.
    Slots { gamma: Rational },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HurwiczOutcome {
    pub winners: WinnerSet,
    pub lambda: Rational,
    /// Ratio of the inner 1-best solver.
    pub inner_guarantee: f64,
    /// `lambda * inner_guarantee`.
    pub guarantee: f64,
}

/// Solves the 1-best companion instance and scores its answer under the
/// Hurwicz vector. Accepts any positive rescaling of `(lambda, 0, ..., 0, 1 - lambda)`.
pub fn hurwicz_solve(inst: &Instance, inner: OneBestSolver) -> Result<HurwiczOutcome> {
    let lambda = hurwicz_lambda(inst.owa()).ok_or_else(|| {
        Error::Precondition("OWA vector is not of Hurwicz shape (lambda, 0, ..., 0, 1 - lambda)".into())
    })?;
    let companion = inst.with_owa(make_owa(&OwaFamily::KBest(1), inst.k())?)?;
    let (items, inner_guarantee) = match inner {
        OneBestSolver::Greedy => {
            let out = greedy_solve(&companion)?;
            (out.winners.items().to_vec(), greedy_ratio())
        }
        OneBestSolver::Brute { budget } => {
            (brute_force(&companion, budget)?.items().to_vec(), 1.0)
        }
        OneBestSolver::Slots { gamma } => {
            let out = slots_greedy(&companion, gamma, 1)?;
            (out.winners.items().to_vec(), out.guarantee)
        }
    };
    Ok(HurwiczOutcome {
        winners: WinnerSet::new(inst, items)?,
        lambda,
        inner_guarantee,
        guarantee: to_f64(&lambda) * inner_guarantee,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxyOutcome {
    pub winners: WinnerSet,
    /// `(alpha_1 + ... + alpha_K) / (K * alpha_1)`.
    pub guaranteed_ratio: Rational,
}

/// Optimal committee for the constant OWA of the same length, scored under
/// the real (nonincreasing) vector.
pub fn kbest_proxy_solve(inst: &Instance) -> Result<ProxyOutcome> {
    if !classify(inst.owa()).nonincreasing {
        return Err(Error::Precondition(
            "kbest-proxy requires a nonincreasing OWA vector".into(),
        ));
    }
    let alpha = inst.owa().as_slice();
    let ratio = inst.owa().sum() / (alpha[0] * Rational::from_integer(inst.k() as i128));
    Ok(ProxyOutcome {
        winners: top_items_by_total(inst),
        guaranteed_ratio: ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtasPath {
    /// `(K-f)/K >= 1 - epsilon`: the constant-OWA optimum suffices.
    KBest,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PtasOutcome {
    pub winners: WinnerSet,
    pub path: PtasPath,
    /// Ratio guaranteed by the chosen path (1 for brute force).
    pub guaranteed_ratio: Rational,
}

/// `(1 - epsilon)`-approximation for `(K-f)`-best vectors (`c * (1,...,1,0,...,0)`).
pub fn ptas_solve(inst: &Instance, epsilon: Rational, budget: u128) -> Result<PtasOutcome> {
    if epsilon <= Rational::zero() || epsilon >= Rational::one() {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
    }
    let kept = top_k_best(inst.owa())
        .ok_or_else(|| Error::Precondition("ptas requires a (K-f)-best OWA vector".into()))?;
    let ratio = Rational::new(kept as i128, inst.k() as i128);
    if ratio >= Rational::one() - epsilon {
        Ok(PtasOutcome {
            winners: top_items_by_total(inst),
            path: PtasPath::KBest,
            guaranteed_ratio: ratio,
        })
    } else {
        Ok(PtasOutcome {
            winners: brute_force(inst, budget)?,
            path: PtasPath::BruteForce,
            guaranteed_ratio: Rational::one(),
        })
    }
}
