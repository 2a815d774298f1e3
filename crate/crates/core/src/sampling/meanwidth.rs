use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use libm::lgamma;
use num::traits::Zero;

use crate::bodies::{BoxBall, ConvexBody};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{rational_to_f64, Scalar};

use super::{sphere_direction, uniform_samples, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanWidthEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_point_samples: usize,
    pub n_direction_samples: usize,
    pub n_polytope_replicates: usize,
}

/// Mean and standard error of the mean, summed pairwise in index order.
fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = linalg::pairwise_sum(values) / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = linalg::pairwise_sum(&dev) / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// `E w(K_N)` for `K_N = conv{±X_1..±X_N}`, estimated as the replicate
/// average of `avg_θ max_i |⟨X_i, θ⟩|`.
///
/// Each replicate draws its points and directions from its own substream.
/// With a single replicate the standard error falls back to the spread over
/// directions.
pub fn random_polytope_mean_width(
    body: &ConvexBody,
    n_points: usize,
    replicates: usize,
    dirs: usize,
    stream: &RngStream,
) -> Result<MeanWidthEstimate> {
    if n_points == 0 || replicates == 0 || dirs == 0 {
        return Err(Error::ZeroBudget);
    }
    let n = body.dim();
    let per_replicate: Vec<Result<(f64, Vec<f64>)>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let sub = stream.substream(r as u64);
            let pts = uniform_samples(body, &sub.substream(0), n_points)?;
            let mut rng = sub.substream(1).rng();
            let widths: Vec<f64> = (0..dirs)
                .map(|_| {
                    let theta = sphere_direction(&mut rng, n);
                    pts.iter().map(|x| linalg::dot(x, &theta).abs()).fold(0.0, f64::max)
                })
                .collect();
            Ok((linalg::pairwise_sum(&widths) / dirs as f64, widths))
        })
        .collect();
    let per_replicate = per_replicate.into_iter().collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = per_replicate.iter().map(|(v, _)| *v).collect();
    let (value, mut stderr) = mean_stderr(&values);
    if replicates == 1 {
        stderr = mean_stderr(&per_replicate[0].1).1;
    }
    Ok(MeanWidthEstimate {
        value,
        stderr,
        n_point_samples: n_points,
        n_direction_samples: dirs,
        n_polytope_replicates: replicates,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum CentroidMethod {
    /// Riemann sum over `(λK) ∩ Zⁿ`, rescaled by `1/λ`.
    Lattice { lambda: Scalar },
    MonteCarlo { samples: usize, stream: RngStream },
}

/// `h_{Z_p(K)}(θ) = (E|⟨X, θ⟩|^p)^{1/p}` for `X` uniform on `K`.
pub fn centroid_support(body: &ConvexBody, p: f64, theta: &[f64], method: &CentroidMethod) -> Result<f64> {
    if theta.len() != body.dim() {
        return Err(Error::InvalidBody("direction has wrong dimension".into()));
    }
    if theta.iter().all(|&t| t == 0.0) || theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::ZeroDirection);
    }
    if !(p >= 1.0) {
        return Err(Error::PreconditionViolated(format!("p = {p} must be >= 1")));
    }
    match method {
        CentroidMethod::Lattice { lambda } => {
            let scaled = ConvexBody::scaled(lambda.clone(), body.clone())?;
            let set = crate::lattice::enumerate(&scaled)?;
            if set.count() == 0 {
                return Err(Error::EmptyLattice);
            }
            let l = lambda.value();
            let terms = set.points().iter().map(|x| {
                let xf: Vec<f64> = x.iter().map(|&v| v as f64 / l).collect();
                linalg::dot(&xf, theta).abs().powf(p)
            });
            Ok((linalg::compensated_sum(terms) / set.count() as f64).powf(1.0 / p))
        }
        CentroidMethod::MonteCarlo { samples, stream } => {
            if *samples == 0 {
                return Err(Error::ZeroBudget);
            }
            let pts = uniform_samples(body, stream, *samples)?;
            Ok(moment_along(&pts, theta, p))
        }
    }
}

/// Closed-form `h_{Z_p(K)}(e_n)` for axis boxes and centered balls, when `K`
/// reduces to one of them.
pub fn centroid_support_closed_form(body: &ConvexBody, p: f64) -> Option<f64> {
    let form = BoxBall::of(body)?;
    let n = form.dim();
    if form.radius.is_zero() {
        let shift = if form.open_cube { 1.0 } else { 0.0 };
        let a = rational_to_f64(&form.halfwidths[n - 1]) + shift;
        return Some(a * (p + 1.0).powf(-1.0 / p));
    }
    if form.open_cube || form.halfwidths.iter().any(|h| !h.is_zero()) {
        return None;
    }
    // x_n has density ∝ (1 − t²)^{(n−1)/2} on [−1, 1] for the unit ball.
    let nf = n as f64;
    let log_raw = lgamma((p + 1.0) / 2.0) + lgamma(nf / 2.0 + 1.0)
        - lgamma(0.5)
        - lgamma((nf + p) / 2.0 + 1.0);
    Some(rational_to_f64(&form.radius) * (log_raw / p).exp())
}

fn moment_along(pts: &[Vec<f64>], theta: &[f64], p: f64) -> f64 {
    let terms = pts.iter().map(|x| linalg::dot(x, theta).abs().powf(p));
    (linalg::compensated_sum(terms) / pts.len() as f64).powf(1.0 / p)
}

/// Number of independent batches behind [`mean_width_centroid`]'s error bar.
pub const CENTROID_BATCHES: usize = 16;

/// `w(Z_p(K)) = ∫ h_{Z_p(K)} dσ`, by Monte Carlo over both directions and
/// points. Work is split into independent batches (own points, own
/// directions) whose spread gives the standard error.
pub fn mean_width_centroid(
    body: &ConvexBody,
    p: f64,
    dirs: usize,
    point_samples: usize,
    stream: &RngStream,
) -> Result<MeanWidthEstimate> {
    if dirs == 0 || point_samples == 0 {
        return Err(Error::ZeroBudget);
    }
    if !(p >= 1.0) {
        return Err(Error::PreconditionViolated(format!("p = {p} must be >= 1")));
    }
    let n = body.dim();
    let batches = CENTROID_BATCHES.min(dirs).min(point_samples).max(1);
    let share = |total: usize, b: usize| total / batches + usize::from(b < total % batches);
    let per_batch: Vec<Result<f64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let sub = stream.substream(b as u64);
            let pts = uniform_samples(body, &sub.substream(0), share(point_samples, b))?;
            let mut rng = sub.substream(1).rng();
            let k = share(dirs, b);
            let supports: Vec<f64> = (0..k).map(|_| moment_along(&pts, &sphere_direction(&mut rng, n), p)).collect();
            Ok(linalg::pairwise_sum(&supports) / k as f64)
        })
        .collect();
    let values = per_batch.into_iter().collect::<Result<Vec<_>>>()?;
    let (value, stderr) = mean_stderr(&values);
    Ok(MeanWidthEstimate {
        value,
        stderr,
        n_point_samples: point_samples,
        n_direction_samples: dirs,
        n_polytope_replicates: batches,
    })
}

/// Empirical floating-body support `sup{t : P̂(|⟨X, θ⟩| >= t) >= δ}` over
/// `samples` uniform points: the order statistic of rank `M − ⌈δM⌉ + 1`.
pub fn floating_body_support(
    body: &ConvexBody,
    delta: f64,
    theta: &[f64],
    samples: usize,
    stream: &RngStream,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::ZeroBudget);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::PreconditionViolated(format!("δ = {delta} must lie in (0,1)")));
    }
    if theta.iter().all(|&t| t == 0.0) {
        return Err(Error::ZeroDirection);
    }
    let pts = uniform_samples(body, stream, samples)?;
    let mut proj: Vec<f64> = pts.iter().map(|x| linalg::dot(x, theta).abs()).collect();
    proj.sort_by(f64::total_cmp);
    Ok(empirical_floating_quantile(&proj, delta))
}

/// `sup{t : #{v_i >= t} >= δ M}` for ascending `sorted`.
pub fn empirical_floating_quantile(sorted: &[f64], delta: f64) -> f64 {
    let m = sorted.len();
    let need = (delta * m as f64).ceil().max(1.0) as usize;
    sorted[m - need.min(m)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &str) -> Scalar {
        Scalar::parse(v).unwrap()
    }

    #[test]
    fn quantile_matches_sup_definition() {
        let v = [0.1, 0.2, 0.3, 0.4];
        // brute force over candidate thresholds
        for delta in [0.1, 0.25, 0.3, 0.5, 0.74, 0.75, 0.99] {
            let best = v
                .iter()
                .copied()
                .filter(|&t| v.iter().filter(|&&x| x >= t).count() as f64 >= delta * 4.0)
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(empirical_floating_quantile(&v, delta), best, "δ = {delta}");
        }
    }

    #[test]
    fn closed_forms() {
        let square = ConvexBody::cube(2, s("1")).unwrap();
        assert!((centroid_support_closed_form(&square, 2.0).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        // Unit disk, p = 1: ∫|t|·(2/π)√(1−t²) dt = 4/(3π).
        let disk = ConvexBody::ball(2, s("1")).unwrap();
        let v = centroid_support_closed_form(&disk, 1.0).unwrap();
        assert!((v - 4.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-14);
        // Unit 3-ball, p = 2: E x_3² = 1/5.
        let ball = ConvexBody::ball(3, s("1")).unwrap();
        assert!((centroid_support_closed_form(&ball, 2.0).unwrap() - 0.2f64.sqrt()).abs() < 1e-14);
        assert!(centroid_support_closed_form(&ConvexBody::counterexample(s("2"), 2).unwrap(), 1.0).is_none());
    }

    #[test]
    fn box_centroid_lattice_and_mc() {
        let k = ConvexBody::cube(2, s("1")).unwrap();
        let lat = centroid_support(&k, 2.0, &[0.0, 1.0], &CentroidMethod::Lattice { lambda: s("100") }).unwrap();
        assert!((lat - (1.0f64 / 3.0).sqrt()).abs() / (1.0f64 / 3.0).sqrt() < 0.01);
        let mc = centroid_support(
            &k,
            2.0,
            &[0.0, 1.0],
            &CentroidMethod::MonteCarlo { samples: 20_000, stream: RngStream::new(3, 1) },
        )
        .unwrap();
        assert!((mc - lat).abs() < 0.01, "{mc} vs {lat}");
    }
}
