use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bodies::{ConvexBody, Label, DEFAULT_TOL};
use crate::error::{Error, Result};

use super::RngStream;

pub const PROBE_TRIALS: usize = 2048;
pub const MIN_ACCEPTANCE: f64 = 1e-3;
const CHORD_BISECTIONS: usize = 48;
const MAX_REJECTIONS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerMode {
    Rejection,
    /// Coordinate-direction hit-and-run; burn-in `50n`, thinning `10n`.
    HitAndRun,
}

/// Uniform sampler on a bounded body with nonempty interior.
pub struct UniformSampler<'a> {
    body: &'a ConvexBody,
    bbox: Vec<(f64, f64)>,
    mode: SamplerMode,
    acceptance: f64,
    rng: ChaCha8Rng,
    state: Vec<f64>,
}

impl<'a> UniformSampler<'a> {
    pub fn new(body: &'a ConvexBody, stream: &RngStream) -> Result<Self> {
        let radii = body.radii()?;
        if radii.inner <= 1e-9 {
            return Err(Error::DegenerateBody("inradius is (numerically) zero".into()));
        }
        let bbox = body.bounding_box()?;
        let mut rng = stream.rng();
        let mut accepted = 0;
        let mut first_hit = None;
        for _ in 0..PROBE_TRIALS {
            let x = draw_box(&mut rng, &bbox);
            if inside(body, &x) {
                accepted += 1;
                first_hit.get_or_insert(x);
            }
        }
        let acceptance = accepted as f64 / PROBE_TRIALS as f64;
        let mode = if acceptance >= MIN_ACCEPTANCE { SamplerMode::Rejection } else { SamplerMode::HitAndRun };
        let state = first_hit.unwrap_or_else(|| vec![0.0; body.dim()]);
        let mut sampler = UniformSampler { body, bbox, mode, acceptance, rng, state };
        if mode == SamplerMode::HitAndRun {
            for _ in 0..50 * body.dim() {
                sampler.hit_and_run_step();
            }
        }
        Ok(sampler)
    }

    pub fn mode(&self) -> SamplerMode {
        self.mode
    }

    /// Acceptance rate observed by the rejection probe.
    pub fn acceptance(&self) -> f64 {
        self.acceptance
    }

    pub fn sample(&mut self) -> Vec<f64> {
        match self.mode {
            SamplerMode::Rejection => {
                for _ in 0..MAX_REJECTIONS {
                    let x = draw_box(&mut self.rng, &self.bbox);
                    if inside(self.body, &x) {
                        return x;
                    }
                }
                self.mode = SamplerMode::HitAndRun;
                self.sample()
            }
            SamplerMode::HitAndRun => {
                for _ in 0..10 * self.body.dim() {
                    self.hit_and_run_step();
                }
                self.state.clone()
            }
        }
    }

    fn hit_and_run_step(&mut self) {
        let n = self.body.dim();
        let axis = self.rng.random_range(0..n);
        let x = self.state.clone();
        let hi = self.chord_end(&x, axis, self.bbox[axis].1 - x[axis]);
        let lo = -self.chord_end(&x, axis, -(x[axis] - self.bbox[axis].0));
        for _ in 0..64 {
            let t = self.rng.random_range(lo..=hi);
            let mut y = x.clone();
            y[axis] += t;
            if inside(self.body, &y) {
                self.state = y;
                return;
            }
        }
    }

    /// Largest `|t|` (in the direction of `limit`) with `x + t e_axis` inside.
    fn chord_end(&self, x: &[f64], axis: usize, limit: f64) -> f64 {
        let (mut good, mut bad) = (0.0, limit);
        let mut y = x.to_vec();
        y[axis] = x[axis] + bad;
        if inside(self.body, &y) {
            return bad.abs();
        }
        for _ in 0..CHORD_BISECTIONS {
            let mid = 0.5 * (good + bad);
            y[axis] = x[axis] + mid;
            if inside(self.body, &y) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good.abs()
    }
}

fn inside(body: &ConvexBody, x: &[f64]) -> bool {
    body.classify_approx(x, DEFAULT_TOL).label == Label::Inside
}

fn draw_box(rng: &mut ChaCha8Rng, bbox: &[(f64, f64)]) -> Vec<f64> {
    bbox.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect()
}

/// One uniform point of `K`.
pub fn uniform_in_body(body: &ConvexBody, stream: &RngStream) -> Result<Vec<f64>> {
    Ok(UniformSampler::new(body, stream)?.sample())
}

/// `count` uniform points of `K` from a single sampler.
pub fn uniform_samples(body: &ConvexBody, stream: &RngStream, count: usize) -> Result<Vec<Vec<f64>>> {
    let mut sampler = UniformSampler::new(body, stream)?;
    Ok((0..count).map(|_| sampler.sample()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn s(v: &str) -> Scalar {
        Scalar::parse(v).unwrap()
    }

    #[test]
    fn box_samples_are_centered() {
        let k = ConvexBody::cube(2, s("1")).unwrap();
        let pts = uniform_samples(&k, &RngStream::new(1, 0), 10_000).unwrap();
        for i in 0..2 {
            let mean = pts.iter().map(|p| p[i]).sum::<f64>() / pts.len() as f64;
            assert!(mean.abs() <= 0.02, "{mean}");
        }
        assert!(pts.iter().all(|p| k.classify(p, DEFAULT_TOL).label == Label::Inside));
    }

    #[test]
    fn disk_area_ratio() {
        let k = ConvexBody::ball(2, s("1")).unwrap();
        let pts = uniform_samples(&k, &RngStream::new(5, 3), 10_000).unwrap();
        let frac = pts.iter().filter(|p| crate::linalg::norm2(p) <= 0.5).count() as f64 / 1e4;
        assert!((frac - 0.25).abs() <= 0.02, "{frac}");
    }

    #[test]
    fn thin_body_uses_hit_and_run() {
        let k = ConvexBody::axis_box(vec![s("1"), s("1/10000")]).unwrap();
        let k = ConvexBody::rotated(crate::sampling::haar_rotation(&RngStream::new(3, 0), 2), k).unwrap();
        let mut sampler = UniformSampler::new(&k, &RngStream::new(9, 0)).unwrap();
        assert_eq!(sampler.mode(), SamplerMode::HitAndRun);
        for _ in 0..100 {
            let x = sampler.sample();
            assert_eq!(k.classify(&x, 1e-12).label, Label::Inside);
        }
    }

    #[test]
    fn degenerate_body_rejected() {
        let seg = ConvexBody::vpolytope(vec![vec![s("-1"), s("0")], vec![s("1"), s("0")]]).unwrap();
        assert!(UniformSampler::new(&seg, &RngStream::new(0, 0)).is_err());
    }
}
