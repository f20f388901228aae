//! One entry point over every solver, returning a uniform report.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{brute_force_with, kbest_solve, DEFAULT_BUDGET};
use crate::exec::Exec;
use crate::greedy::{
    greedy_solve_with, hurwicz_solve, kbest_proxy_solve, ptas_solve, GreedyTrace, OneBestSolver,
    PtasPath,
};
use crate::model::{Instance, WinnerSet};
use crate::nonfinicky::{
    gprog_ptas, segmented_solve_with, slots_greedy_with, GprogPath, SegmentRound, SlotsIteration,
};
use crate::number::{format_decimal, format_rational, to_f64, Rational};
use crate::owa::classify;
use crate::scoring::committee_score;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Brute,
    KBest,
    Greedy,
    Hurwicz,
    KbestProxy,
    Ptas,
    Slots,
    Segmented,
    GprogPtas,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Brute,
        Algorithm::KBest,
        Algorithm::Greedy,
        Algorithm::Hurwicz,
        Algorithm::KbestProxy,
        Algorithm::Ptas,
        Algorithm::Slots,
        Algorithm::Segmented,
        Algorithm::GprogPtas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Brute => "brute",
            Algorithm::KBest => "kbest",
            Algorithm::Greedy => "greedy",
            Algorithm::Hurwicz => "hurwicz",
            Algorithm::KbestProxy => "kbest-proxy",
            Algorithm::Ptas => "ptas",
            Algorithm::Slots => "slots",
            Algorithm::Segmented => "segmented",
            Algorithm::GprogPtas => "gprog-ptas",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}'"))
    }
}

/// Which 1-best solver the Hurwicz reduction calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerSolver {
    #[default]
    Greedy,
    Brute,
    Slots,
}

impl FromStr for InnerSolver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "greedy" => Ok(InnerSolver::Greedy),
            "brute" => Ok(InnerSolver::Brute),
            "slots" => Ok(InnerSolver::Slots),
            _ => Err(format!("unknown inner solver '{s}' (expected greedy, brute or slots)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub epsilon: Option<Rational>,
    pub gamma: Option<Rational>,
    /// Defaults to the OWA vector's nonzero prefix length.
    pub ell: Option<usize>,
    pub inner: InnerSolver,
    pub budget: u128,
    pub exec: Exec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            epsilon: None,
            gamma: None,
            ell: None,
            inner: InnerSolver::default(),
            budget: DEFAULT_BUDGET,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Trace {
    Greedy(GreedyTrace),
    Slots(Vec<SlotsIteration>),
    Segmented(Vec<SegmentRound>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub winners: WinnerSet,
    /// Proven fraction of the optimum; `None` when the run has no guarantee.
    pub guarantee: Option<f64>,
    /// Extra facts about the run, as ordered key/value pairs.
    pub details: Vec<(&'static str, String)>,
    pub trace: Option<Trace>,
}

fn required<T: Copy>(v: Option<T>, flag: &str, algo: Algorithm) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("{algo} needs --{flag}")))
}

pub fn solve(inst: &Instance, algorithm: Algorithm, opts: &SolveOptions) -> Result<SolveReport> {
    let ell = opts.ell.unwrap_or(classify(inst.owa()).nonzero_prefix_len);
    let mut details = Vec::new();
    let mut trace = None;
    let (winners, guarantee) = match algorithm {
        Algorithm::Brute => (brute_force_with(inst, opts.budget, opts.exec)?, Some(1.0)),
        Algorithm::KBest => (kbest_solve(inst)?, Some(1.0)),
        Algorithm::Greedy => {
            let out = greedy_solve_with(inst, opts.exec)?;
            if out.guarantee.is_none() {
                details.push(("note", "OWA vector is not nonincreasing; no guarantee".into()));
            }
            trace = Some(Trace::Greedy(out.trace));
            (out.winners, out.guarantee)
        }
        Algorithm::Hurwicz => {
            let inner = match opts.inner {
                InnerSolver::Greedy => OneBestSolver::Greedy,
                InnerSolver::Brute => OneBestSolver::Brute { budget: opts.budget },
                InnerSolver::Slots => OneBestSolver::Slots {
                    gamma: required(opts.gamma, "gamma", algorithm)?,
                },
            };
            let out = hurwicz_solve(inst, inner)?;
            details.push(("lambda", format_rational(&out.lambda)));
            details.push(("inner_guarantee", out.inner_guarantee.to_string()));
            (out.winners, Some(out.guarantee))
        }
        Algorithm::KbestProxy => {
            let out = kbest_proxy_solve(inst)?;
            details.push(("ratio", format_rational(&out.guaranteed_ratio)));
            (out.winners, Some(to_f64(&out.guaranteed_ratio)))
        }
        Algorithm::Ptas => {
            let eps = required(opts.epsilon, "epsilon", algorithm)?;
            let out = ptas_solve(inst, eps, opts.budget)?;
            let path = match out.path {
                PtasPath::KBest => "kbest",
                PtasPath::BruteForce => "brute",
            };
            details.push(("path", path.into()));
            details.push(("ratio", format_rational(&out.guaranteed_ratio)));
            (out.winners, Some(to_f64(&out.guaranteed_ratio)))
        }
        Algorithm::Slots => {
            let gamma = required(opts.gamma, "gamma", algorithm)?;
            let out = slots_greedy_with(inst, gamma, ell, opts.exec)?;
            details.push(("ell", ell.to_string()));
            details.push(("x", out.iterations[0].state.x.to_string()));
            details.push(("beta", format_decimal(&out.beta)));
            details.push(("free_slot_decay", out.free_slot_decay_holds().to_string()));
            trace = Some(Trace::Slots(out.iterations));
            (out.winners, Some(out.guarantee))
        }
        Algorithm::Segmented => {
            let gamma = required(opts.gamma, "gamma", algorithm)?;
            let out = segmented_solve_with(inst, gamma, ell, opts.exec)?;
            details.push(("ell", ell.to_string()));
            details.push(("x", out.x.to_string()));
            details.push(("beta", format_decimal(&out.beta)));
            trace = Some(Trace::Segmented(out.rounds));
            (out.winners, Some(out.guarantee))
        }
        Algorithm::GprogPtas => {
            let eps = required(opts.epsilon, "epsilon", algorithm)?;
            let gamma = required(opts.gamma, "gamma", algorithm)?;
            let out = gprog_ptas(inst, eps, gamma, opts.budget)?;
            let path = match out.path {
                GprogPath::Segmented => "segmented",
                GprogPath::BruteForce => "brute",
            };
            details.push(("path", path.into()));
            details.push(("ell", out.ell.to_string()));
            details.push(("beta", format_decimal(&out.beta)));
            (out.winners, Some(out.guarantee))
        }
    };
    let rescored = committee_score(inst, winners.items(), None)?.total;
    assert_eq!(rescored, winners.score(), "reported score must match a fresh evaluation");
    Ok(SolveReport {
        algorithm,
        winners,
        guarantee,
        details,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata::*;

    #[test]
    fn dispatch_reproduces_examples() {
        let r = solve(&example1_instance(&[2, 1, 0]), Algorithm::Brute, &SolveOptions::default()).unwrap();
        assert_eq!(r.winners.to_string(), "a1 a2 a6 / 77");
        let opts = SolveOptions {
            gamma: Some(Rational::new(1, 2)),
            ell: Some(2),
            ..SolveOptions::default()
        };
        let r = solve(&exjl_instance(&[2, 1, 0]), Algorithm::Slots, &opts).unwrap();
        assert_eq!(r.winners.to_string(), "a1 a3 a4 / 83");
        assert!(matches!(r.trace, Some(Trace::Slots(_))));
    }

    #[test]
    fn missing_flags_are_reported() {
        let err = solve(&exjl_instance(&[2, 1, 0]), Algorithm::Slots, &SolveOptions::default()).unwrap_err();
        assert!(err.to_string().contains("--gamma"));
        assert!(solve(&exjl_instance(&[1, 1, 0]), Algorithm::Ptas, &SolveOptions::default()).is_err());
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
    }
}
