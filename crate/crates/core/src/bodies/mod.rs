//! Convex bodies in ℝⁿ: representations, support functions, membership and
//! ℓ∞ projections.
//!
//! Data is stored as exact [`Scalar`]s. Membership of rational points is
//! decided exactly for boxes, balls with rational radius, H-polytopes and
//! everything built from them by dilation, signed permutation, `+ C_n` and
//! Minkowski combination. Remaining cases go through small LPs with a
//! tolerance band.

mod affine;
mod boxball;
mod classify;
mod geometry;
pub mod json;
pub mod rotation;

use num::traits::{One, Signed};

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{LinearProgram, LpError, Sense};
use crate::scalar::{Rational, Scalar};

pub use classify::{Classification, Label, DEFAULT_TOL};
pub use geometry::Radii;
pub use rotation::{Rotation, RotationProvenance, SignedPermutation};

pub(crate) use boxball::BoxBall;

#[derive(Clone, Debug, PartialEq)]
pub enum ConvexBody {
    /// `{x : A x <= b}`.
    HPolytope { a: Vec<Vec<Scalar>>, b: Vec<Scalar> },
    VPolytope { vertices: Vec<Vec<Scalar>> },
    Ball { n: usize, radius: Scalar },
    Box { halfwidths: Vec<Scalar> },
    /// `U · base`.
    Rotated { rotation: Rotation, base: Box<ConvexBody> },
    Scaled { factor: Scalar, base: Box<ConvexBody> },
    /// `base + (−1,1)ⁿ`.
    CubeSum { base: Box<ConvexBody> },
    /// `(1−μ)K + μL`, optionally `+ (−1,1)ⁿ`.
    Combination { mu: Scalar, k: Box<ConvexBody>, l: Box<ConvexBody>, plus_cube: bool },
}

impl ConvexBody {
    pub fn hpolytope(a: Vec<Vec<Scalar>>, b: Vec<Scalar>) -> Result<Self> {
        let n = a.first().map(Vec::len).unwrap_or(0);
        if n == 0 || a.len() != b.len() || a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidBody("H-polytope rows must be nonempty and of equal length".into()));
        }
        if a.iter().any(|r| r.iter().all(Scalar::is_zero)) {
            return Err(Error::InvalidBody("H-polytope has a zero row".into()));
        }
        let body = ConvexBody::HPolytope { a, b };
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[i] = s;
                body.support(&e).map_err(|err| match err {
                    Error::UnboundedBody => Error::InvalidBody("H-polytope is unbounded".into()),
                    other => other,
                })?;
            }
        }
        Ok(body)
    }

    pub fn vpolytope(vertices: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = vertices.first().map(Vec::len).unwrap_or(0);
        if n == 0 || vertices.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidBody("V-polytope needs vertices of one positive dimension".into()));
        }
        Ok(ConvexBody::VPolytope { vertices })
    }

    pub fn ball(n: usize, radius: Scalar) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        if !radius.is_positive() {
            return Err(Error::InvalidBody("ball radius must be positive".into()));
        }
        Ok(ConvexBody::Ball { n, radius })
    }

    pub fn axis_box(halfwidths: Vec<Scalar>) -> Result<Self> {
        if halfwidths.is_empty() || halfwidths.iter().any(|h| !h.is_positive()) {
            return Err(Error::InvalidBody("box halfwidths must be positive".into()));
        }
        Ok(ConvexBody::Box { halfwidths })
    }

    /// `[−h, h]ⁿ`.
    pub fn cube(n: usize, h: Scalar) -> Result<Self> {
        Self::axis_box(vec![h; n])
    }

    /// The single point `{0}`.
    pub fn origin(n: usize) -> Result<Self> {
        Self::vpolytope(vec![vec![Scalar::from_int(0); n]])
    }

    pub fn rotated(rotation: Rotation, base: ConvexBody) -> Result<Self> {
        if rotation.dim() != base.dim() {
            return Err(Error::InvalidBody("rotation dimension mismatch".into()));
        }
        Ok(ConvexBody::Rotated { rotation, base: Box::new(base) })
    }

    pub fn scaled(factor: Scalar, base: ConvexBody) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidBody("scale factor must be positive".into()));
        }
        Ok(ConvexBody::Scaled { factor, base: Box::new(base) })
    }

    pub fn cube_sum(base: ConvexBody) -> Self {
        ConvexBody::CubeSum { base: Box::new(base) }
    }

    pub fn combination(mu: Scalar, k: ConvexBody, l: ConvexBody, plus_cube: bool) -> Result<Self> {
        if mu.exact().is_negative() || mu.exact() > &Rational::one() {
            return Err(Error::InvalidBody("combination weight must lie in [0,1]".into()));
        }
        if k.dim() != l.dim() {
            return Err(Error::InvalidBody("combination dimension mismatch".into()));
        }
        Ok(ConvexBody::Combination { mu, k: Box::new(k), l: Box::new(l), plus_cube })
    }

    /// `conv({(x, −1/2) : ‖x‖_∞ ≤ λ} ∪ {e_n})`: a wedge whose lattice points
    /// sit at heights 0 and 1 only.
    pub fn counterexample(lambda: Scalar, n: usize) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::InvalidBody("λ must be positive".into()));
        }
        if n < 2 {
            return Err(Error::InvalidBody("dimension must be at least 2".into()));
        }
        let neg = Scalar::from_rational(-lambda.exact().clone());
        let half = Scalar::from_ratio(-1, 2)?;
        let mut vertices = Vec::with_capacity((1 << (n - 1)) + 1);
        for mask in 0..1usize << (n - 1) {
            let mut v: Vec<Scalar> =
                (0..n - 1).map(|i| if mask >> i & 1 == 1 { lambda.clone() } else { neg.clone() }).collect();
            v.push(half.clone());
            vertices.push(v);
        }
        let mut apex = vec![Scalar::from_int(0); n];
        apex[n - 1] = Scalar::from_int(1);
        vertices.push(apex);
        Self::vpolytope(vertices)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::HPolytope { a, .. } => a[0].len(),
            ConvexBody::VPolytope { vertices } => vertices[0].len(),
            ConvexBody::Ball { n, .. } => *n,
            ConvexBody::Box { halfwidths } => halfwidths.len(),
            ConvexBody::Rotated { base, .. } | ConvexBody::Scaled { base, .. } | ConvexBody::CubeSum { base } => {
                base.dim()
            }
            ConvexBody::Combination { k, .. } => k.dim(),
        }
    }

    /// True for bodies carrying an open `C_n` summand at the top level
    /// (possibly under rotations and dilations).
    pub fn is_open(&self) -> bool {
        match self {
            ConvexBody::CubeSum { .. } => true,
            ConvexBody::Combination { plus_cube, .. } => *plus_cube,
            ConvexBody::Rotated { base, .. } | ConvexBody::Scaled { base, .. } => base.is_open(),
            _ => false,
        }
    }

    /// `h_K(θ) = sup_{x∈K} ⟨x, θ⟩`; the closure is used for open bodies.
    pub fn support(&self, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.dim() {
            return Err(Error::InvalidBody("direction has wrong dimension".into()));
        }
        if theta.iter().any(|t| !t.is_finite()) || theta.iter().all(|&t| t == 0.0) {
            return Err(Error::ZeroDirection);
        }
        self.support_unchecked(theta)
    }

    fn support_unchecked(&self, theta: &[f64]) -> Result<f64> {
        Ok(match self {
            ConvexBody::Box { halfwidths } => theta.iter().zip(halfwidths).map(|(t, h)| t.abs() * h.value()).sum(),
            ConvexBody::Ball { radius, .. } => radius.value() * linalg::norm2(theta),
            ConvexBody::VPolytope { vertices } => vertices
                .iter()
                .map(|v| v.iter().zip(theta).map(|(c, t)| c.value() * t).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max),
            ConvexBody::HPolytope { a, b } => hpolytope_support(a, b, theta)?,
            ConvexBody::Rotated { rotation, base } => base.support_unchecked(&rotation.apply_transpose(theta))?,
            ConvexBody::Scaled { factor, base } => factor.value() * base.support_unchecked(theta)?,
            ConvexBody::CubeSum { base } => base.support_unchecked(theta)? + linalg::norm1(theta),
            ConvexBody::Combination { mu, k, l, plus_cube } => {
                let m = mu.value();
                let hk = if m < 1.0 { (1.0 - m) * k.support_unchecked(theta)? } else { 0.0 };
                let hl = if m > 0.0 { m * l.support_unchecked(theta)? } else { 0.0 };
                hk + hl + if *plus_cube { linalg::norm1(theta) } else { 0.0 }
            }
        })
    }

    /// `[−h(−e_i), h(e_i)]` for every axis.
    pub fn bounding_box(&self) -> Result<Vec<(f64, f64)>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let hi = self.support(&e)?;
                e[i] = -1.0;
                let lo = -self.support(&e)?;
                Ok((lo, hi))
            })
            .collect()
    }

    /// Whether `0 ∈ int K` (tolerance [`DEFAULT_TOL`]).
    pub fn origin_interior(&self) -> bool {
        let zero = vec![0.0; self.dim()];
        self.classify(&zero, DEFAULT_TOL).label == Label::Inside
    }

    /// Canonical JSON description.
    pub fn to_json(&self) -> serde_json::Value {
        json::body_to_json(self)
    }

    /// SHA-256 of the canonical JSON description, hex encoded.
    pub fn fingerprint(&self) -> String {
        json::fingerprint(self)
    }
}

fn hpolytope_support(a: &[Vec<Scalar>], b: &[Scalar], theta: &[f64]) -> Result<f64> {
    let n = theta.len();
    let mut lp = LinearProgram::maximize(n);
    for (j, &t) in theta.iter().enumerate() {
        lp.set_objective_coeff(j, t);
        lp.set_free(j);
    }
    for (row, bi) in a.iter().zip(b) {
        lp.add_row(row.iter().map(Scalar::value).collect(), Sense::Le, bi.value());
    }
    match lp.solve() {
        Ok(sol) => Ok(sol.objective),
        Err(LpError::Unbounded) => Err(Error::UnboundedBody),
        Err(LpError::Infeasible) => Err(Error::InvalidBody("H-polytope is empty".into())),
        Err(e) => Err(Error::LpInfeasible(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn s(v: &str) -> Scalar {
        Scalar::parse(v).unwrap()
    }

    #[test]
    fn support_examples() {
        let b = ConvexBody::cube(2, s("2")).unwrap();
        assert_eq!(b.support(&[1.0, 0.0]).unwrap(), 2.0);
        let ball = ConvexBody::ball(2, s("1")).unwrap();
        assert!((ball.support(&[0.6, 0.8]).unwrap() - 1.0).abs() < 1e-15);
        let cross = ConvexBody::vpolytope(vec![
            vec![s("1"), s("0")],
            vec![s("-1"), s("0")],
            vec![s("0"), s("1")],
            vec![s("0"), s("-1")],
        ])
        .unwrap();
        let c = std::f64::consts::FRAC_1_SQRT_2;
        assert!((cross.support(&[c, c]).unwrap() - c).abs() < 1e-15);
        assert_eq!(b.support(&[0.0, 0.0]), Err(Error::ZeroDirection));
    }

    #[test]
    fn compositional_support() {
        let base = ConvexBody::cube(2, s("1")).unwrap();
        let theta = [0.3, -0.7];
        let h = base.support(&theta).unwrap();
        let scaled = ConvexBody::scaled(s("3"), base.clone()).unwrap();
        assert!((scaled.support(&theta).unwrap() - 3.0 * h).abs() < 1e-12);
        let fat = ConvexBody::cube_sum(base.clone());
        assert!((fat.support(&theta).unwrap() - (h + 1.0)).abs() < 1e-12);
        let hp = ConvexBody::hpolytope(
            vec![vec![s("1"), s("0")], vec![s("-1"), s("0")], vec![s("0"), s("1")], vec![s("0"), s("-1")]],
            vec![s("1"); 4],
        )
        .unwrap();
        assert!((hp.support(&theta).unwrap() - h).abs() < 1e-9);
    }

    #[test]
    fn counterexample_vertices() {
        let k = ConvexBody::counterexample(s("2"), 2).unwrap();
        let ConvexBody::VPolytope { vertices } = &k else { panic!() };
        let lit: Vec<Vec<String>> = vertices.iter().map(|v| v.iter().map(Scalar::to_literal).collect()).collect();
        assert_eq!(lit, vec![vec!["-2", "-1/2"], vec!["2", "-1/2"], vec!["0", "1"]]);
        let k3 = ConvexBody::counterexample(s("1"), 3).unwrap();
        let ConvexBody::VPolytope { vertices } = &k3 else { panic!() };
        assert_eq!(vertices.len(), 5);
    }

    #[test]
    fn unbounded_hpolytope_rejected() {
        let r = ConvexBody::hpolytope(vec![vec![s("1"), s("0")]], vec![s("1")]);
        assert!(matches!(r, Err(Error::InvalidBody(_))));
    }
}
