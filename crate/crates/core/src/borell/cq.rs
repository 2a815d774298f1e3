use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{ConvexBody, Rotation};
use crate::error::{Error, Result};
use crate::sampling::{haar_rotation, RngStream};

use super::c0::C0Profile;

/// Stream id for the rotations explored by [`cq_estimate`].
pub const CQ_STREAM: u64 = 0x6371;

/// Where the sampled maximum of `C₀(UK, p)` was attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CqArgmax {
    /// 0 is the identity; `i >= 1` is the `i`-th Haar sample.
    pub rotation_index: usize,
    pub p: f64,
}

/// `C₀(K, ·)` at the identity and a sampled lower estimate of `C_q(K)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorellConstants {
    /// `C₀(K, 1)`.
    pub c0: f64,
    /// Largest `C₀(UK, p)` seen: an estimate (lower bound) of `C_q(K)`.
    pub cq_estimate: f64,
    pub rotation_budget: usize,
    pub p_grid: Vec<f64>,
    pub argmax: CqArgmax,
    pub seed: u64,
}

/// `q^{i/(m−1)}` for `i = 0..m`; just `[1]` when `q = 1`.
pub fn geometric_p_grid(q: f64, size: usize) -> Result<Vec<f64>> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::PreconditionViolated(format!("q = {q} must be at least 1")));
    }
    if q == 1.0 {
        return Ok(vec![1.0]);
    }
    let m = size.max(2);
    let mut grid: Vec<f64> = (0..m).map(|i| q.powf(i as f64 / (m - 1) as f64)).collect();
    grid[0] = 1.0;
    grid[m - 1] = q;
    Ok(grid)
}

/// The identity followed by `count` Haar rotations, one substream each.
pub fn rotation_sample(n: usize, count: usize, stream: &RngStream) -> Vec<Rotation> {
    std::iter::once(Rotation::identity(n))
        .chain((0..count).map(|i| haar_rotation(&stream.substream(i as u64), n)))
        .collect()
}

/// `max C₀(UK, p)` over the identity plus `rotations` Haar samples and a
/// geometric grid of `p` in `[1, q]`.
///
/// Rotation `i` always uses substream `i`, so a larger budget with the same
/// seed sees a superset of rotations.
pub fn cq_estimate(
    body: &ConvexBody,
    q: f64,
    rotations: usize,
    p_grid_size: usize,
    seed: u64,
) -> Result<BorellConstants> {
    let radii = body.radii()?;
    if radii.inner < 1.0 - 1e-12 {
        return Err(Error::BallNotContained(radii.inner));
    }
    let p_grid = geometric_p_grid(q, p_grid_size)?;
    let n = body.dim();
    let sample = rotation_sample(n, rotations, &RngStream::new(seed, CQ_STREAM));
    let rows: Vec<Result<Vec<f64>>> = sample
        .into_par_iter()
        .map(|u| {
            let rotated = ConvexBody::rotated(u, body.clone())?;
            let profile = C0Profile::of(&rotated)?;
            p_grid.iter().map(|&p| profile.value(p)).collect()
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut best = (f64::NEG_INFINITY, CqArgmax { rotation_index: 0, p: 1.0 });
    for (i, row) in rows.iter().enumerate() {
        for (&p, &v) in p_grid.iter().zip(row) {
            if v > best.0 {
                best = (v, CqArgmax { rotation_index: i, p });
            }
        }
    }
    Ok(BorellConstants {
        c0: rows[0][0],
        cq_estimate: best.0,
        rotation_budget: rotations,
        p_grid,
        argmax: best.1,
        seed,
    })
}
