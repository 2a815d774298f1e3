use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexBody, Label, Rotation, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lattice::{enumerate, expected_max, moment};
use crate::linalg;
use crate::sampling::{haar_rotation, RngStream};

use super::cq::{cq_estimate, rotation_sample};
use super::report::{float_le, InequalityReport, ReferenceConstants};

/// Stream id for the Haar average in [`verify_meanwidth_discrete`].
pub const MEANWIDTH_STREAM: u64 = 0x6d77;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanWidthMode {
    Upper,
    Lower,
}

/// Inputs of the rotation-averaged lattice mean-width checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanWidthParams {
    pub n_samples: u64,
    pub mode: MeanWidthMode,
    /// Upper end of the `p` range in `C_q` (lower mode only).
    pub q: f64,
    pub rotations: usize,
    pub seed: u64,
    /// Use the identity as the first of the `rotations` matrices.
    pub include_identity: bool,
    /// Haar samples and `p`-grid size behind the `C_q` estimate (lower mode).
    pub cq_rotations: usize,
    pub cq_grid: usize,
    pub constants: ReferenceConstants,
}

impl MeanWidthParams {
    pub fn new(n_samples: u64, mode: MeanWidthMode, rotations: usize, seed: u64) -> Self {
        MeanWidthParams {
            n_samples,
            mode,
            q: 1.0,
            rotations,
            seed,
            include_identity: false,
            cq_rotations: 64,
            cq_grid: 4,
            constants: ReferenceConstants::default(),
        }
    }
}

fn rotations_for(n: usize, params: &MeanWidthParams) -> Vec<Rotation> {
    let stream = RngStream::new(params.seed, MEANWIDTH_STREAM);
    if params.include_identity {
        rotation_sample(n, params.rotations - 1, &stream)
    } else {
        (0..params.rotations).map(|i| haar_rotation(&stream.substream(i as u64), n)).collect()
    }
}

/// Per-rotation `(E max_{i<=N} |x_i,n|, m_{order}(UK), max |x_n|)`.
fn per_rotation(body: &ConvexBody, rotations: Vec<Rotation>, n_samples: u64, order: f64) -> Result<Vec<[f64; 3]>> {
    let rows: Vec<Result<[f64; 3]>> = rotations
        .into_par_iter()
        .map(|u| {
            let rotated = ConvexBody::rotated(u, body.clone())?;
            let dist = enumerate(&rotated)?.distribution().map_err(|_| Error::EmptyLattice)?;
            Ok([expected_max(&dist, n_samples)?, moment(&dist, order)?.root, dist.max_value() as f64])
        })
        .collect();
    rows.into_iter().collect()
}

fn average(rows: &[[f64; 3]], k: usize) -> f64 {
    let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
    linalg::pairwise_sum(&col) / col.len() as f64
}

/// Smallest integer `N >= (C·c)²`.
pub fn smallest_admissible_n(cq: f64, scale: f64) -> u64 {
    (scale * cq).powi(2).ceil() as u64
}

/// Rotation-averaged expected maximum of `N` lattice samples against the
/// rotation-averaged `log N` moment (upper), or against `c·` the
/// `log N / (2 log(C·C_q))` moment (lower).
pub fn verify_meanwidth_discrete(body: &ConvexBody, params: &MeanWidthParams) -> Result<InequalityReport> {
    if params.rotations == 0 {
        return Err(Error::RotationBudgetZero);
    }
    let n = body.dim();
    let big_n = params.n_samples;
    let consts = params.constants;
    match params.mode {
        MeanWidthMode::Upper => {
            if big_n < 3 {
                return Err(Error::PreconditionViolated(format!("N = {big_n} must be at least 3")));
            }
            if body.classify(&vec![0.0; n], DEFAULT_TOL).label == Label::Outside {
                return Err(Error::OriginOutside);
            }
            let order = (big_n as f64).ln();
            let rows = per_rotation(body, rotations_for(n, params), big_n, order)?;
            let a = average(&rows, 0);
            let b = average(&rows, 1);
            let implied = if b == 0.0 { 0.0 } else { a / b };
            Ok(InequalityReport::decided(
                "meanwidth-upper",
                a,
                consts.meanwidth_upper * b,
                implied,
                float_le(implied, consts.meanwidth_upper),
            )
            .inexact()
            .with_body(body)
            .with("n_samples", big_n)
            .with("moment_order", order)
            .with("avg_expected_max", a)
            .with("avg_moment", b)
            .with("max_projection", rows.iter().map(|r| r[2]).fold(0.0, f64::max))
            .with("rotations", params.rotations)
            .with("seed", params.seed))
        }
        MeanWidthMode::Lower => {
            let radii = body.radii()?;
            if radii.inner < 1.0 - 1e-12 {
                return Err(Error::BallNotContained(radii.inner));
            }
            let cq = cq_estimate(body, params.q, params.cq_rotations, params.cq_grid, params.seed)?;
            let scale = consts.lower_scale;
            let low = (scale * cq.cq_estimate).powi(2);
            if (big_n as f64) < low || (big_n as f64).ln() > params.q {
                return Err(Error::PreconditionViolated(format!(
                    "need (C·C_q)² = {low} <= N = {big_n} <= e^q = {}",
                    params.q.exp()
                )));
            }
            let order = (big_n as f64).ln() / (2.0 * (scale * cq.cq_estimate).ln());
            let rows = per_rotation(body, rotations_for(n, params), big_n, order)?;
            let a = average(&rows, 0);
            let m = average(&rows, 1);
            let implied = a / m;
            Ok(InequalityReport::decided(
                "meanwidth-lower",
                consts.meanwidth_lower * m,
                a,
                implied,
                float_le(consts.meanwidth_lower, implied),
            )
            .inexact()
            .with_body(body)
            .with("n_samples", big_n)
            .with("moment_order", order)
            .with("avg_expected_max", a)
            .with("avg_moment", m)
            .with("cq_estimate", cq.cq_estimate)
            .with("cq_note", "estimate (lower bound)")
            .with("q", params.q)
            .with("rotations", params.rotations)
            .with("seed", params.seed))
        }
    }
}
