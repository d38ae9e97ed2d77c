//! Topological entropy of non-autonomous interval systems through subshifts of finite type.
//!
//! The crate links three views of the same quantity:
//!
//! * the subshift side: transition matrices, allowable words and `log ρ(A)`;
//! * the system side: piecewise-linear maps `f_n` and covers `V_1, …, V_N`
//!   whose covering relations realize a transition matrix;
//! * direct measurement: growth of `(n, ε)`-separated sets.
//!
//! [`bounds`] turns verified covering relations into certified entropy bounds,
//! [`coding`] builds the maps between the two sides, and [`entropy`] measures.

pub mod bounds;
pub mod coding;
pub mod entropy;
pub mod expansion;
pub mod interval;
pub mod subshift;
pub mod system;
pub mod transition;

pub use bounds::{
    certify_conjugacy, certify_lower_bound, certify_upper_bound, matrix_lower_bound, BoundError,
    Certificate, Claim, Condition, MatrixBound, Status,
};
pub use coding::{itinerary, CodedPoint, Coder, CodingError, Itinerary, NestedRefinement};
pub use entropy::{
    bowen_distance, estimate_entropy, separated_count, Candidates, EntropyError, EntropyEstimate,
    EstimateConfig, Evaluation, GrowthCurve, GrowthRow,
};
pub use expansion::{
    derive_matrix, estimate_constants, verify_exact_covering, verify_expansion, CoverConfig,
    CoverFile, ExpansionError, ExpansionReport, SlopeConstants, Witness,
};
pub use interval::{Interval, IntervalError};
pub use subshift::{Cylinder, SequenceError, SymbolSequence};
pub use system::{Extension, PiecewiseLinearMap, StepSpec, SystemError, SystemModel};
pub use transition::{CountMatrix, MatrixError, MatrixFile, TransitionMatrix};
