//! Exact computation of the Harer-Zagier numbers `ε_g(d')`: the number of
//! ways to glue the sides of a `2d'`-gon in pairs so that the resulting
//! closed orientable surface has genus `g`.
//!
//! The crate computes these counts by four independent routes and
//! cross-validates them:
//!
//! * [`hzpipeline::epsilon_formula`] — the closed Harer-Zagier formula,
//!   evaluated with exact truncated series over rationals;
//! * [`gluing::epsilon_bruteforce`] — enumeration of all `(2d'-1)!!`
//!   side pairings, binned by genus;
//! * [`hurwitz`] — Grothendieck-dessin and strictly monotone Hurwitz
//!   counts in the group algebra of `S_{2d'}`, tied together by the
//!   Jucys correspondence;
//! * [`fock::epsilon_fock`] — vacuum expectations of energy operators on
//!   the free-fermion Fock space.
//!
//! All arithmetic is exact: coefficients are arbitrary-precision
//! rationals, series are truncated with explicit windows, and reading a
//! coefficient outside the window an operation can vouch for is a hard
//! error rather than a silent zero.
//!
//! The crate is `no_std` (it requires `alloc`); IO, the CLI, and file
//! formats live in the companion `hz-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod fock;
pub mod gluing;
pub mod hurwitz;
pub mod hzpipeline;
pub mod rational;
pub mod series;
pub mod symgroup;

pub use rational::Rational;

use alloc::string::String;
use core::fmt;

/// Errors shared by the library modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Series inversion requires the lowest-order part to be a single
    /// monomial with a nonzero coefficient.
    NonInvertibleSeries,
    /// A coefficient was requested beyond the truncation window of a
    /// series, i.e. the stored data cannot vouch for its value.
    OutsideTruncationWindow { detail: String },
    /// A substitution or expansion would need series data beyond the
    /// available truncation window.
    WindowOverflow { detail: String },
    /// A size-limited computation was asked to exceed its guardrail.
    GuardrailExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    /// Two objects that must live over the same ground set do not.
    SizeMismatch { left: usize, right: usize },
    /// The vacuum expectation `<E_0(0)>` was reached; `ς(0) = 0` makes it
    /// divergent, and a well-formed pipeline never evaluates it.
    DivergentExpectation,
    /// An exact computation that must produce an integer produced a
    /// proper fraction; this indicates an internal bug.
    NonIntegralResult { detail: String },
    /// Invalid argument at an API boundary.
    Domain { detail: String },
    /// Expression parse error, with a character position.
    Parse {
        position: usize,
        expected: String,
        found: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonInvertibleSeries => write!(f, "non-invertible series"),
            Error::OutsideTruncationWindow { detail } => {
                write!(f, "outside truncation window: {detail}")
            }
            Error::WindowOverflow { detail } => write!(f, "window overflow: {detail}"),
            Error::GuardrailExceeded {
                what,
                requested,
                limit,
            } => write!(
                f,
                "guardrail exceeded: {what} = {requested} is above the configured limit {limit}"
            ),
            Error::SizeMismatch { left, right } => {
                write!(f, "size mismatch: {left} vs {right}")
            }
            Error::DivergentExpectation => write!(f, "divergent expectation <E_0(0)>"),
            Error::NonIntegralResult { detail } => write!(f, "non-integral result: {detail}"),
            Error::Domain { detail } => write!(f, "{detail}"),
            Error::Parse {
                position,
                expected,
                found,
            } => write!(
                f,
                "parse error at position {position}: expected {expected}, found {found}"
            ),
        }
    }
}

impl core::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Size guardrails for the enumeration-heavy operations.
///
/// The defaults keep every computation at desk scale; raise them
/// explicitly if you own the machine time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` for which group-algebra computations in `S_n` are
    /// permitted (dense elements have up to `n!` terms).
    pub symmetric_group_n: usize,
    /// Largest `d'` for which all `(2d'-1)!!` polygon side-pairings may
    /// be enumerated.
    pub gluing_dprime: usize,
    /// Largest `n = 2d'` for the direct monotone-factorization search.
    pub direct_search_n: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            symmetric_group_n: 10,
            gluing_dprime: 8,
            direct_search_n: 8,
        }
    }
}

impl Limits {
    /// Raise every guardrail to at least `n`.
    pub fn forced(n: usize) -> Self {
        let d = Limits::default();
        Limits {
            symmetric_group_n: d.symmetric_group_n.max(n),
            gluing_dprime: d.gluing_dprime.max(n),
            direct_search_n: d.direct_search_n.max(n),
        }
    }
}
