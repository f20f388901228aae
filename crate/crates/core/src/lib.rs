//! Solvers for OWA-based committee selection.
//!
//! `n` agents hold nonnegative intrinsic utilities for `m` items. A committee
//! of `K` items gives each agent the ordered weighted average of its
//! utilities for the committee (weights applied to the utilities sorted from
//! best to worst); the goal is a committee with maximum total over agents.
//!
//! The crate provides exact solvers ([`exact`]), the submodular greedy and
//! reductions to simpler OWAs ([`greedy`]), free-slot algorithms for
//! non-finicky utilities ([`nonfinicky`]), an ILP exporter and verifier
//! ([`ilp`]) and closed-form approximation bounds ([`analysis`]).
//!
//! Scores are exact rationals. Data-parallel inner loops run on rayon when
//! the `parallel` feature (default) is enabled; see [`Exec`].

pub mod analysis;
pub mod error;
pub mod exact;
pub mod exec;
pub mod gen;
pub mod greedy;
pub mod ilp;
pub mod model;
pub mod nonfinicky;
pub mod number;
pub mod owa;
pub mod scoring;
pub mod solve;

#[cfg(test)]
mod testdata;

pub use error::{Error, Result};
pub use exec::Exec;
pub use model::{
    approval_profile, borda_profile, nonfinicky_beta, parse_instance, serialize_instance, Instance,
    NonFinickyParams, OwaVector, UtilityMatrix, WinnerSet,
};
pub use number::Rational;
pub use owa::{classify, make_owa, OwaClass, OwaFamily};
pub use scoring::{committee_score, marginal_gain, ScoreBreakdown};
