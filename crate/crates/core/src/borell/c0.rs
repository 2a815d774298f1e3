use num::bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::lattice::{enumerate, moment, LatticePointSet, ProjectionDistribution};
use crate::scalar::{rational_to_f64, Rational, Scalar};

use super::report::InequalityReport;

/// Lattice data behind `C₀(K, p)` for every `p`: the projection laws on
/// `K ∩ Zⁿ` and on `(K + C_n) ∩ Zⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct C0Profile {
    inner: ProjectionDistribution,
    fattened: ProjectionDistribution,
    ambiguous_count: usize,
}

/// `C₀(K, p)` with the ingredients that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C0Detail {
    pub value: f64,
    /// Exact value, available at `p = 1`.
    pub exact: Option<String>,
    pub p: f64,
    pub lattice_count: u64,
    pub fattened_count: u64,
    pub moment: f64,
    pub fattened_moment: f64,
    pub ambiguous_count: usize,
}

impl C0Profile {
    /// Enumerates `K` and `K + C_n`.
    pub fn of(body: &ConvexBody) -> Result<Self> {
        let inner = enumerate(body)?;
        let fattened = enumerate(&ConvexBody::cube_sum(body.clone()))?;
        Self::from_sets(&inner, &fattened)
    }

    pub fn from_sets(inner: &LatticePointSet, fattened: &LatticePointSet) -> Result<Self> {
        if inner.count() == 0 {
            return Err(Error::EmptyLattice);
        }
        let inner_dist = inner.distribution()?;
        if inner_dist.max_value() < 1 {
            return Err(Error::HypothesisViolated(
                "every lattice point of the body has zero last coordinate".into(),
            ));
        }
        Ok(C0Profile {
            inner: inner_dist,
            fattened: fattened.distribution()?,
            ambiguous_count: inner.ambiguous_count() + fattened.ambiguous_count(),
        })
    }

    pub fn inner(&self) -> &ProjectionDistribution {
        &self.inner
    }

    pub fn fattened(&self) -> &ProjectionDistribution {
        &self.fattened
    }

    pub fn ambiguous_count(&self) -> usize {
        self.ambiguous_count
    }

    /// `(1 + m_p(Y)·(G(K+C_n)/G(K))^{1/p}) / m_p(X)`.
    pub fn value(&self, p: f64) -> Result<f64> {
        Ok(self.detail(p)?.value)
    }

    /// `(G(K) + Σ_Y |y_n|) / Σ_X |x_n|`, the value at `p = 1`.
    pub fn exact_p1(&self) -> Rational {
        let g = BigInt::from(self.inner.total());
        Rational::new(g + self.fattened.power_sum_exact(1), self.inner.power_sum_exact(1))
    }

    pub fn detail(&self, p: f64) -> Result<C0Detail> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::PreconditionViolated(format!("p = {p} must be at least 1")));
        }
        let mx = moment(&self.inner, p)?.root;
        let my = moment(&self.fattened, p)?.root;
        let ratio = self.fattened.total() as f64 / self.inner.total() as f64;
        let (value, exact) = if p == 1.0 {
            let e = self.exact_p1();
            (rational_to_f64(&e), Some(e.to_string()))
        } else {
            ((1.0 + my * ratio.powf(1.0 / p)) / mx, None)
        };
        Ok(C0Detail {
            value,
            exact,
            p,
            lattice_count: self.inner.total(),
            fattened_count: self.fattened.total(),
            moment: mx,
            fattened_moment: my,
            ambiguous_count: self.ambiguous_count,
        })
    }
}

/// `C₀(K, p)`.
pub fn c0(body: &ConvexBody, p: f64) -> Result<f64> {
    C0Profile::of(body)?.value(p)
}

/// Explicit bounds on `C₀` and on lattice counts in dilation shells, valid
/// when `√n·R(K) <= 2r(K)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C0UpperBound {
    pub bound: f64,
    /// Shell-count formula at `t = √n/r`.
    pub shell_count_bound: f64,
    /// Enumerated `G((1+t)K) − G(K)` at the same `t`.
    pub shell_count: u64,
    pub t: f64,
    pub inner_radius: f64,
    pub outer_radius: f64,
}

struct ShellInputs {
    n: f64,
    r: f64,
    big_r: f64,
    volume: f64,
}

fn shell_inputs(body: &ConvexBody) -> Result<ShellInputs> {
    let radii = body.radii()?;
    if !body.origin_interior() || radii.inner <= 0.0 {
        return Err(Error::HypothesisViolated("origin is not an interior point".into()));
    }
    let n = body.dim() as f64;
    let (r, big_r) = (radii.inner, radii.outer);
    if n.sqrt() * big_r > 2.0 * r * r {
        return Err(Error::HypothesisViolated(format!(
            "√n·R = {} exceeds 2r² = {} (r = {r}, R = {big_r})",
            n.sqrt() * big_r,
            2.0 * r * r
        )));
    }
    Ok(ShellInputs { n, r, big_r, volume: body.volume()? })
}

impl ShellInputs {
    fn shell_formula(&self, t: f64) -> f64 {
        let n = self.n;
        let outer = 1.0 + t + n.sqrt() / (2.0 * self.r);
        let inner = 1.0 - n.sqrt() * self.big_r / (2.0 * self.r * self.r);
        (outer.powf(n) - inner.powf(n)) * self.volume
    }
}

fn shell_count(body: &ConvexBody, t: f64) -> Result<u64> {
    let grown = ConvexBody::scaled(Scalar::from_f64(1.0 + t)?, body.clone())?;
    let outer = enumerate(&grown)?.count();
    let inner = enumerate(body)?.count();
    Ok((outer - inner) as u64)
}

/// Lattice-point count in `(1+t)K ∖ K` against its volumetric bound.
pub fn shell_bound_check(body: &ConvexBody, t: f64) -> Result<InequalityReport> {
    if !(t > 0.0) {
        return Err(Error::PreconditionViolated(format!("t = {t} must be positive")));
    }
    require_projection(body)?;
    let inputs = shell_inputs(body)?;
    let lhs = shell_count(body, t)? as f64;
    let rhs = inputs.shell_formula(t);
    Ok(InequalityReport::float("shell-count", lhs, rhs, lhs / rhs)
        .with_body(body)
        .with("t", t)
        .with("inner_radius", inputs.r)
        .with("outer_radius", inputs.big_r))
}

fn require_projection(body: &ConvexBody) -> Result<()> {
    let set = enumerate(body)?;
    if set.count() == 0 {
        return Err(Error::EmptyLattice);
    }
    if set.distribution()?.max_value() < 1 {
        return Err(Error::HypothesisViolated("every lattice point of the body has zero last coordinate".into()));
    }
    Ok(())
}

/// Explicit upper bound on `C₀(K, p)` from inradius, circumradius, volume
/// and the lattice points of the inscribed ball.
pub fn c0_upper_bound(body: &ConvexBody, p: f64) -> Result<C0UpperBound> {
    if !(p >= 1.0) {
        return Err(Error::PreconditionViolated(format!("p = {p} must be at least 1")));
    }
    require_projection(body)?;
    let inputs = shell_inputs(body)?;
    let (n, r, big_r, volume) = (inputs.n, inputs.r, inputs.big_r, inputs.volume);
    let ball = ConvexBody::ball(body.dim(), Scalar::from_f64(r)?)?;
    let ball_dist = enumerate(&ball)?.distribution()?;
    let ball_count = ball_dist.total() as f64;
    let ball_sum = rational_to_f64(&Rational::from_integer(ball_dist.power_sum_exact(1)));
    let t = n.sqrt() / r;
    let shell_count_bound = inputs.shell_formula(t);
    let parallel = body.parallel_volume(n.sqrt() / 2.0)?;
    let bound = if ball_sum == 0.0 {
        f64::INFINITY
    } else {
        let shrink = 1.0 - n.sqrt() * big_r / (2.0 * r * r);
        let shell = (1.0 + 1.5 * n.sqrt() / r).powf(n) - shrink.powf(n);
        let numerator = (1.0 + n.sqrt() / r) * big_r * (shell * volume).powf(1.0 / p);
        let denominator = (ball_sum / ball_count) * ball_count.powf(1.0 / p);
        1.0 + parallel / ball_sum + numerator / denominator
    };
    Ok(C0UpperBound {
        bound,
        shell_count_bound,
        shell_count: shell_count(body, t)?,
        t,
        inner_radius: r,
        outer_radius: big_r,
    })
}

/// `C₀(K, p)` against [`c0_upper_bound`].
pub fn c0_upper_bound_check(body: &ConvexBody, p: f64) -> Result<InequalityReport> {
    let ub = c0_upper_bound(body, p)?;
    let value = c0(body, p)?;
    Ok(InequalityReport::float("c0-upper-bound", value, ub.bound, value / ub.bound)
        .with_body(body)
        .with("p", p)
        .with("shell_count", ub.shell_count)
        .with("shell_count_bound", ub.shell_count_bound)
        .with("t", ub.t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &str) -> Scalar {
        Scalar::parse(v).unwrap()
    }

    #[test]
    fn exact_examples() {
        let b = C0Profile::of(&ConvexBody::cube(2, s("2")).unwrap()).unwrap();
        assert_eq!(b.exact_p1(), Rational::new(11.into(), 6.into()));
        let d = C0Profile::of(&ConvexBody::ball(2, s("2")).unwrap()).unwrap();
        assert_eq!(d.exact_p1(), Rational::new(43.into(), 10.into()));
        assert_eq!(d.detail(1.0).unwrap().fattened_count, 25);
        assert!(matches!(c0(&ConvexBody::cube(2, s("1/2")).unwrap(), 1.0), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn p_above_one_uses_moment_form() {
        // Box(2)²: both clouds coincide, so C₀ = (1 + √2)/√2 at p = 2.
        let v = c0(&ConvexBody::cube(2, s("2")).unwrap(), 2.0).unwrap();
        assert!((v - (1.0 + 2f64.sqrt()) / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn radius_hypothesis() {
        let body = ConvexBody::counterexample(s("10"), 2).unwrap();
        assert!(matches!(c0_upper_bound(&body, 1.0), Err(Error::HypothesisViolated(_))));
        let ball = ConvexBody::ball(3, s("1")).unwrap();
        let ub = c0_upper_bound(&ball, 1.0).unwrap();
        assert!(ub.bound.is_finite() && ub.bound >= c0(&ball, 1.0).unwrap());
    }
}
