//! The q-deformed Plancherel growth process on the Young lattice.
//!
//! Exact measures and transition kernels on Young diagrams, q-moments and
//! the q-deformed Markov–Krein correspondence, the moment ODE that governs
//! the growth, the implicit equation for the limiting diagram's R-function,
//! and infinitesimal growth of rectangular diagrams.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagrams;
pub mod dynamics;
pub mod error;
pub mod growth;
pub mod kernel;
pub mod limitshape;
pub mod moments;
pub mod qmeasure;
pub mod rsk;

pub use diagrams::{HookData, InterlacingDiagram, Partition};
pub use error::{Error, Result};
pub use kernel::{GrowthTrajectory, TransitionWeights};
pub use moments::{DiscreteMeasure, MomentKind, MomentVector};
pub use qmeasure::QParam;
