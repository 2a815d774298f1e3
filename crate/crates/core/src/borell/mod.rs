//! The discrete Borell constant `C₀(K, p)`, sampled estimates of `C_q(K)`,
//! explicit bounds on both, and pass/fail verifiers that report measured
//! implied constants.

mod c0;
mod cq;
mod meanwidth;
mod report;
mod verify;

pub use c0::{c0, c0_upper_bound, c0_upper_bound_check, shell_bound_check, C0Detail, C0Profile, C0UpperBound};
pub use cq::{cq_estimate, geometric_p_grid, rotation_sample, BorellConstants, CqArgmax, CQ_STREAM};
pub use meanwidth::{
    smallest_admissible_n, verify_meanwidth_discrete, MeanWidthMode, MeanWidthParams, MEANWIDTH_STREAM,
};
pub use report::{borell_proof_constant, InequalityReport, ReferenceConstants, FLOAT_REL_TOL};
pub use verify::{
    borell_from_profile, holder_check, paley_zygmund_check, paley_zygmund_from_profile, union_bound_check,
    verify_discrete_bm, verify_discrete_borell, BorellVerification,
};
