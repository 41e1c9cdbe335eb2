pub mod cli;
pub mod constructions;
pub mod error;
pub mod lie;
pub mod operator;
pub mod optim;
pub mod quotient;
pub mod report;
pub mod rng;
pub mod space;
pub mod suite;

pub use error::{Error, Result};
pub use lie::{detect_components, lie_basis, verify_skew, LieBasis};
pub use operator::{
    adjoint, numerical_radius, numerical_radius_closed, op_norm, Direction, Estimate, Operator,
    Witness,
};
pub use space::{DualityPair, Gauge2d, SpaceSpec};
pub use quotient::{
    estimate_index, estimate_index_with, estimate_second_index, estimate_second_index_dual_pair,
    estimate_second_index_with, quotient_norm,
    quotient_norm_with, IndexEstimate, QuotientOptions, SearchOptions,
};
