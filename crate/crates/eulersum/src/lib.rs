//! Exact evaluation of Euler-type series built from harmonic numbers and
//! shifted linear denominators.
//!
//! The crate turns a formal series `Σ_{k≥1} Σᵢ cᵢ · Π H_{k+m}^e / Π (k+a)^p`
//! into an exact closed form over zeta values. The pipeline:
//!
//! - [`term`]: exact summand representations ([`GeneralTerm`],
//!   [`CanonicalTerm`], [`SeriesExpression`]) with a pointwise evaluator.
//! - [`pfd`]: partial fraction decomposition of shifted-linear denominator
//!   products.
//! - [`normalize`]: rewrites any summand as a rational combination of
//!   canonical terms `H_{k+m}^ℓ/(k+m)^n` with matching shifts.
//! - [`table`]: exact harmonic numbers, finite prefix sums
//!   `P(ℓ,n,m) = Σ_{j≤m} H_j^ℓ/j^n`, and a knowledge base of full Euler
//!   sums `E(ℓ,n) = Σ_j H_j^ℓ/j^n` as closed forms.
//! - [`engine`]: groups canonical terms by `(ℓ, n)`, decides convergence,
//!   and evaluates every group through the identity
//!   `Σ_k H_{k+m}^ℓ/(k+m)^n = E(ℓ,n) − P(ℓ,n,m)`, with the `E` term
//!   cancelling exactly when a group's coefficients sum to zero
//!   (telescoping).
//! - [`closed_form`]: the target algebra — rational constants, zeta
//!   monomials, and named Euler-sum constants — with text/LaTeX/JSON
//!   formatting and an opt-in even-zeta-to-π reduction.
//! - [`parse`]: the expression grammar used by the CLI and by table
//!   extension files.
//!
//! All core arithmetic is generic over an exact rational scalar (see
//! [`scalar::Scalar`]); [`Rational`] is the default arbitrary-precision
//! instantiation.

pub mod bernoulli;
pub mod closed_form;
pub mod engine;
pub mod normalize;
pub mod parse;
pub mod pfd;
pub mod scalar;
pub mod table;
pub mod term;

/// Default exact scalar: arbitrary-precision rational.
pub type Rational = num::BigRational;

/// Fixed-width exact scalar. Fast, but panics on overflow; suitable for
/// small inputs only (the pointwise oracle at k ≈ 20 already overflows it
/// for quartic harmonic products).
pub type Rational128 = num::rational::Ratio<i128>;

pub use closed_form::{ClosedForm, ClosedFormError, FormatStyle, PiForm, SymbolicSum, ZetaMonomial};
pub use engine::{
    check_convergence, evaluate_group, evaluate_series, group_canonical, normalized_groups,
    CanonicalGroup, EngineError, EvalOptions,
};
pub use normalize::{normalize, normalize_with_stats, shift_harmonic, NormalizeError, ShiftedHarmonic};
pub use parse::{parse_closed_form, parse_series, ParseError, ParseErrorKind};
pub use pfd::partial_fraction;
pub use scalar::Scalar;
pub use table::{harmonic_number, EulerSumKey, EulerTable, TableError};
pub use term::{
    CanonicalTerm, DenominatorFactor, GeneralTerm, HarmonicFactor, SeriesExpression, TermError,
};
