//! Exact credences: first-order hyperreals, tail-summable branch sequences
//! and priors on the raven tree.

pub mod hyperreal;
pub mod prior;
pub mod tail;

pub use hyperreal::{fmt_rational, hyper_arith, pow2_inv, rat, rational_to_f64, HyperOp, HyperReal, Rational};
pub use prior::{presets, total_mass, RavenPrior};
pub use tail::{tail_sum, ExactOrBounds, Geometric, Support, TailSequence, TermSearch};
