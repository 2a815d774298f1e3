//! Monte Carlo on the continuous side: Haar rotations, uniform points in
//! bodies, random symmetric polytopes and centroid/floating-body supports.
//!
//! All randomness flows from [`RngStream`]s; parallel work is keyed by
//! substream index so results do not depend on the thread count.

mod haar;
mod meanwidth;
mod rng;
mod uniform;

pub use haar::haar_rotation;
pub use meanwidth::{
    centroid_support, centroid_support_closed_form, empirical_floating_quantile, floating_body_support, mean_width_centroid,
    random_polytope_mean_width, CentroidMethod, MeanWidthEstimate, CENTROID_BATCHES,
};
pub use rng::{sphere_direction, RngStream};
pub use uniform::{uniform_in_body, uniform_samples, SamplerMode, UniformSampler, MIN_ACCEPTANCE, PROBE_TRIALS};
