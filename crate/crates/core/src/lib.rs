//! Expected walking distance of a piecer repairing broken threads along a
//! spinning mule.
//!
//! * [`closed_form`]: single-stroke expectation by direct summation when a
//!   fixed number of threads break.
//! * [`breakage`]: thread patterns and the three breakage distributions.
//! * [`piecer`]: walk semantics and finite-horizon value iteration over
//!   repeated strokes.
//! * [`plts`]: probabilistic transition systems, bisimulation and quotients.
//! * [`simulate`]: Monte Carlo cross-check of the value iteration.
//!
//! Everything numeric is generic over [`Scalar`]: use [`Exact`] for
//! rational results and `f64` for speed.

pub mod breakage;
pub mod closed_form;
mod error;
pub mod numerics;
pub mod piecer;
pub mod plts;
pub mod simulate;

pub use breakage::{BreakageSummary, SummaryDistribution, Thread, ThreadPattern};
pub use closed_form::{ClosedFormInstance, DeltaBreakdown};
pub use error::{Error, Result};
pub use numerics::{Exact, NumberMode, Prob, Scalar};
pub use piecer::{ModelKind, MuleModel, RoundChoice, ValueTable};
pub use plts::{Label, Partition, Plts};
