//! Inradius/circumradius about the origin, and volumes where closed forms exist.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{rational_to_f64, Scalar};

use super::{BoxBall, ConvexBody, Label, DEFAULT_TOL};

/// Directions sampled (beyond the `2n` axes) for the reported support range.
pub const SAMPLED_DIRECTIONS: usize = 64;
const MAX_SUBSETS: usize = 2_000_000;

/// `inner·B ⊆ K ⊆ outer·B` certified; `sampled_*` are the extreme support
/// values over `2n + 64` directions, an upper estimate of `r` and a lower
/// estimate of `R`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radii {
    pub inner: f64,
    pub outer: f64,
    pub exact: bool,
    pub sampled_min_support: f64,
    pub sampled_max_support: f64,
}

impl ConvexBody {
    pub fn radii(&self) -> Result<Radii> {
        let n = self.dim();
        let origin = vec![0.0; n];
        if self.classify(&origin, DEFAULT_TOL).label == Label::Outside {
            return Err(Error::OriginOutside);
        }
        let (inner, mut outer, exact) = self.radius_bounds()?;
        let mut corner = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let a = self.support(&e)?;
            e[i] = -1.0;
            let b = self.support(&e)?;
            corner += a.abs().max(b.abs()).powi(2);
            lo = lo.min(a).min(b);
            hi = hi.max(a).max(b);
        }
        if !exact {
            outer = outer.min(corner.sqrt());
        }
        for theta in probe_directions(n, SAMPLED_DIRECTIONS) {
            let h = self.support(&theta)?;
            lo = lo.min(h);
            hi = hi.max(h);
        }
        Ok(Radii { inner: inner.max(0.0), outer, exact, sampled_min_support: lo, sampled_max_support: hi })
    }

    /// `(r_lo, R_hi, exact)`.
    fn radius_bounds(&self) -> Result<(f64, f64, bool)> {
        let n = self.dim();
        if let Some(f) = BoxBall::of(self) {
            let shift = if f.open_cube { 1.0 } else { 0.0 };
            let a: Vec<f64> = f.halfwidths.iter().map(|h| rational_to_f64(h) + shift).collect();
            let rho = rational_to_f64(&f.radius);
            let min_a = a.iter().copied().fold(f64::INFINITY, f64::min);
            return Ok((min_a + rho, linalg::norm2(&a) + rho, true));
        }
        Ok(match self {
            ConvexBody::VPolytope { vertices } => {
                let pts: Vec<Vec<f64>> = vertices.iter().map(|v| v.iter().map(Scalar::value).collect()).collect();
                let outer = pts.iter().map(|v| linalg::norm2(v)).fold(0.0, f64::max);
                let inner = if self.origin_interior() { polar_inradius(&pts, n)? } else { 0.0 };
                (inner, outer, true)
            }
            ConvexBody::HPolytope { a, b } => {
                let rows: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(Scalar::value).collect()).collect();
                let rhs: Vec<f64> = b.iter().map(Scalar::value).collect();
                let inner = rows
                    .iter()
                    .zip(&rhs)
                    .map(|(r, bi)| bi / linalg::norm2(r))
                    .fold(f64::INFINITY, f64::min);
                let verts = hpolytope_vertices(&rows, &rhs, n)?;
                let outer = verts.iter().map(|v| linalg::norm2(v)).fold(0.0, f64::max);
                (inner, outer, true)
            }
            ConvexBody::Rotated { base, .. } => base.radius_bounds()?,
            ConvexBody::Scaled { factor, base } => {
                let (r, big_r, e) = base.radius_bounds()?;
                (factor.value() * r, factor.value() * big_r, e)
            }
            ConvexBody::CubeSum { base } => {
                let (r, big_r, _) = base.radius_bounds()?;
                (r + 1.0, big_r + (n as f64).sqrt(), false)
            }
            ConvexBody::Combination { mu, k, l, plus_cube } => {
                let m = mu.value();
                let (rk, bk, _) = k.radius_bounds()?;
                let (rl, bl, _) = l.radius_bounds()?;
                let (cr, cb) = if *plus_cube { (1.0, (n as f64).sqrt()) } else { (0.0, 0.0) };
                ((1.0 - m) * rk + m * rl + cr, (1.0 - m) * bk + m * bl + cb, false)
            }
            ConvexBody::Box { .. } | ConvexBody::Ball { .. } => unreachable!("handled by the box-ball form"),
        })
    }

    /// Lebesgue volume (of the closure).
    pub fn volume(&self) -> Result<f64> {
        self.parallel_volume(0.0)
    }

    /// `|K + ρ B|` for `ρ >= 0` (Steiner formula for boxes).
    pub fn parallel_volume(&self, rho: f64) -> Result<f64> {
        let n = self.dim();
        match self {
            ConvexBody::Rotated { base, .. } => return base.parallel_volume(rho),
            ConvexBody::Scaled { factor, base } => {
                let l = factor.value();
                return Ok(l.powi(n as i32) * base.parallel_volume(rho / l)?);
            }
            _ => {}
        }
        let Some(f) = BoxBall::of(self) else {
            return Err(Error::Unsupported("volume is only available for box/ball bodies".into()));
        };
        let shift = if f.open_cube { 1.0 } else { 0.0 };
        let sides: Vec<f64> = f.halfwidths.iter().map(|h| 2.0 * (rational_to_f64(h) + shift)).collect();
        let r = rational_to_f64(&f.radius) + rho;
        let e = elementary_symmetric(&sides);
        Ok((0..=n).map(|k| e[n - k] * linalg::unit_ball_volume(k) * r.powi(k as i32)).sum())
    }
}

/// `e_0..e_n` of the given values.
fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, v) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Calls `f` on every `k`-subset of `0..m` in lexicographic order.
fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Vertices of `{x : A x <= b}` by solving every `n×n` active set.
pub(crate) fn hpolytope_vertices(a: &[Vec<f64>], b: &[f64], n: usize) -> Result<Vec<Vec<f64>>> {
    if binomial(a.len(), n) > MAX_SUBSETS {
        return Err(Error::Unsupported("too many facets for vertex enumeration".into()));
    }
    let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    for_each_subset(a.len(), n, |idx| {
        let rows: Vec<Vec<f64>> = idx.iter().map(|&i| a[i].clone()).collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
        if let Some(x) = linalg::solve(&rows, &rhs) {
            if a.iter().zip(b).all(|(r, bi)| linalg::dot(r, &x) <= bi + 1e-9 * scale) {
                out.push(x);
            }
        }
    });
    if out.is_empty() {
        return Err(Error::DegenerateBody("H-polytope has no vertices".into()));
    }
    Ok(out)
}

/// Inradius about the origin of `conv(pts)` with `0` interior: facets are
/// the vertices `y` of the polar `{y : ⟨v, y⟩ <= 1}`, at distance `1/‖y‖`.
fn polar_inradius(pts: &[Vec<f64>], n: usize) -> Result<f64> {
    let ones = vec![1.0; pts.len()];
    let verts = hpolytope_vertices(pts, &ones, n)?;
    Ok(verts.iter().map(|y| 1.0 / linalg::norm2(y)).fold(f64::INFINITY, f64::min))
}

/// Fixed-seed uniform unit directions.
pub(crate) fn probe_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0072_6164_6969);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = linalg::norm2(&v);
            if norm > 1e-12 {
                break v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &str) -> Scalar {
        Scalar::parse(v).unwrap()
    }

    #[test]
    fn radii_examples() {
        let b = ConvexBody::cube(2, s("2")).unwrap().radii().unwrap();
        assert_eq!((b.inner, b.exact), (2.0, true));
        assert!((b.outer - 8f64.sqrt()).abs() < 1e-15);
        let ball = ConvexBody::ball(3, s("3")).unwrap().radii().unwrap();
        assert_eq!((ball.inner, ball.outer), (3.0, 3.0));
        let cross = ConvexBody::vpolytope(vec![
            vec![s("1"), s("0")],
            vec![s("-1"), s("0")],
            vec![s("0"), s("1")],
            vec![s("0"), s("-1")],
        ])
        .unwrap()
        .radii()
        .unwrap();
        assert!((cross.inner - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((cross.outer - 1.0).abs() < 1e-15);
    }

    #[test]
    fn origin_outside_is_an_error() {
        let shifted = ConvexBody::vpolytope(vec![vec![s("1"), s("1")], vec![s("2"), s("1")], vec![s("1"), s("2")]])
            .unwrap();
        assert_eq!(shifted.radii(), Err(Error::OriginOutside));
    }

    #[test]
    fn steiner_volume() {
        let b = ConvexBody::cube(2, s("1")).unwrap();
        let v = b.parallel_volume(0.5).unwrap();
        assert!((v - (4.0 + 8.0 * 0.5 + std::f64::consts::PI * 0.25)).abs() < 1e-12);
        let ball = ConvexBody::ball(3, s("2")).unwrap();
        assert!((ball.volume().unwrap() - 32.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }
}
