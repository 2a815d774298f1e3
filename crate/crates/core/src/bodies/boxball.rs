//! Bodies of the form `Box(a) + ρB` (optionally `+ C_n`), kept in exact
//! rationals. Boxes, balls, their dilates, signed-permutation images and
//! Minkowski combinations all reduce to this shape.

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

use crate::scalar::{floor_sqrt, rational_to_f64, Rational};

use super::ConvexBody;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct BoxBall {
    pub halfwidths: Vec<Rational>,
    pub radius: Rational,
    pub open_cube: bool,
}

impl BoxBall {
    pub fn of(body: &ConvexBody) -> Option<BoxBall> {
        let n = body.dim();
        match body {
            ConvexBody::Box { halfwidths } => Some(BoxBall {
                halfwidths: halfwidths.iter().map(|h| h.exact().clone()).collect(),
                radius: Rational::zero(),
                open_cube: false,
            }),
            ConvexBody::Ball { radius, .. } => Some(BoxBall {
                halfwidths: vec![Rational::zero(); n],
                radius: radius.exact().clone(),
                open_cube: false,
            }),
            ConvexBody::VPolytope { vertices } if vertices.iter().flatten().all(|c| c.is_zero()) => {
                Some(BoxBall { halfwidths: vec![Rational::zero(); n], radius: Rational::zero(), open_cube: false })
            }
            ConvexBody::Scaled { factor, base } => {
                let f = BoxBall::of(base)?;
                if f.open_cube {
                    return None;
                }
                let l = factor.exact();
                Some(BoxBall {
                    halfwidths: f.halfwidths.iter().map(|h| h * l).collect(),
                    radius: &f.radius * l,
                    open_cube: false,
                })
            }
            ConvexBody::Rotated { rotation, base } => {
                let f = BoxBall::of(base)?;
                if let Some(sp) = rotation.as_signed_permutation() {
                    let halfwidths = sp.perm.iter().map(|&p| f.halfwidths[p].clone()).collect();
                    Some(BoxBall { halfwidths, ..f })
                } else if !f.open_cube && f.halfwidths.iter().all(|h| h.is_zero()) {
                    Some(f)
                } else {
                    None
                }
            }
            ConvexBody::CubeSum { base } => {
                let f = BoxBall::of(base)?;
                if f.open_cube {
                    // (A + C) + C = (A + [-1,1]^n) + C
                    let halfwidths = f.halfwidths.iter().map(|h| h + Rational::one()).collect();
                    Some(BoxBall { halfwidths, ..f })
                } else {
                    Some(BoxBall { open_cube: true, ..f })
                }
            }
            ConvexBody::Combination { mu, k, l, plus_cube } => {
                let fk = BoxBall::of(k)?;
                let fl = BoxBall::of(l)?;
                if fk.open_cube || fl.open_cube {
                    return None;
                }
                let m = mu.exact();
                let w = Rational::one() - m;
                Some(BoxBall {
                    halfwidths: fk.halfwidths.iter().zip(&fl.halfwidths).map(|(a, b)| &w * a + m * b).collect(),
                    radius: &w * &fk.radius + m * &fl.radius,
                    open_cube: *plus_cube,
                })
            }
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.halfwidths.len()
    }

    /// Exact membership of a rational point.
    pub fn contains(&self, x: &[Rational]) -> bool {
        let shift = if self.open_cube { Rational::one() } else { Rational::zero() };
        if self.radius.is_zero() {
            return x.iter().zip(&self.halfwidths).all(|(xi, a)| {
                let gap = xi.abs() - a;
                if self.open_cube { gap < Rational::one() } else { !gap.is_positive() }
            });
        }
        let mut s = Rational::zero();
        for (xi, a) in x.iter().zip(&self.halfwidths) {
            let e = xi.abs() - a - &shift;
            if e.is_positive() {
                s += &e * &e;
            }
        }
        let r2 = &self.radius * &self.radius;
        if self.open_cube { s < r2 } else { s <= r2 }
    }

    /// Signed Euclidean-style margin: positive inside, negative outside.
    pub fn margin(&self, x: &[f64]) -> f64 {
        if self.open_cube {
            return 1.0 - self.closed_linf_distance(x);
        }
        let a: Vec<f64> = self.halfwidths.iter().map(rational_to_f64).collect();
        let rho = rational_to_f64(&self.radius);
        let excess: Vec<f64> = x.iter().zip(&a).map(|(xi, ai)| (xi.abs() - ai).max(0.0)).collect();
        let outside_box = crate::linalg::norm2(&excess);
        if outside_box > 0.0 {
            rho - outside_box
        } else {
            let depth = x.iter().zip(&a).map(|(xi, ai)| ai - xi.abs()).fold(f64::INFINITY, f64::min);
            rho + depth
        }
    }

    /// ℓ∞ distance to `Box(a) + ρB` (ignoring any open cube).
    pub fn closed_linf_distance(&self, x: &[f64]) -> f64 {
        let excess: Vec<f64> = x
            .iter()
            .zip(&self.halfwidths)
            .map(|(xi, a)| (xi.abs() - rational_to_f64(a)).max(0.0))
            .collect();
        let rho = rational_to_f64(&self.radius);
        if rho == 0.0 {
            return crate::linalg::norm_inf(&excess);
        }
        // smallest t with Σ max(e_i − t, 0)² ≤ ρ²; monotone, so bisect
        let phi = |t: f64| excess.iter().map(|e| (e - t).max(0.0).powi(2)).sum::<f64>();
        if phi(0.0) <= rho * rho {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, crate::linalg::norm_inf(&excess));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) <= rho * rho {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        hi
    }

    /// ℓ∞ distance to the (closure of the) full body.
    pub fn linf_distance(&self, x: &[f64]) -> f64 {
        let d = self.closed_linf_distance(x);
        if self.open_cube { (d - 1.0).max(0.0) } else { d }
    }

    /// Per-coordinate budget consumed by a fixed integer coordinate; `None`
    /// if no completion of the prefix can lie in the body.
    pub fn slice_cost(&self, axis: usize, value: &BigInt) -> Rational {
        let shift = if self.open_cube { Rational::one() } else { Rational::zero() };
        let e = Rational::from_integer(value.abs()) - &self.halfwidths[axis] - shift;
        if e.is_positive() { &e * &e } else { Rational::zero() }
    }

    /// Largest `m >= 0` such that `|x_axis| = m` admits a completion, given the
    /// prefix has already spent `spent` of the squared-radius budget. `None`
    /// when even `x_axis = 0` is impossible.
    pub fn slice_max(&self, axis: usize, spent: &Rational) -> Option<BigInt> {
        let a = &self.halfwidths[axis];
        if self.radius.is_zero() {
            if !spent.is_zero() {
                return None;
            }
            return Some(if self.open_cube {
                // |m| < a + 1
                let top = a + Rational::one();
                let c = top.ceil().to_integer();
                c - BigInt::one()
            } else {
                a.floor().to_integer()
            });
        }
        let rem = &self.radius * &self.radius - spent;
        if self.open_cube {
            if !rem.is_positive() {
                return None;
            }
            // largest m with m − a − 1 <= 0 or (m − a − 1)² < rem
            let base = a + Rational::one();
            let ok = |m: &BigInt| {
                let e = Rational::from_integer(m.clone()) - &base;
                !e.is_positive() || &e * &e < rem
            };
            let mut m = base.floor().to_integer() + floor_sqrt(&rem);
            while ok(&(&m + BigInt::one())) {
                m += BigInt::one();
            }
            while m.is_positive() && !ok(&m) {
                m -= BigInt::one();
            }
            Some(m)
        } else {
            if rem.is_negative() {
                return None;
            }
            let ok = |m: &BigInt| {
                let e = Rational::from_integer(m.clone()) - a;
                !e.is_positive() || &e * &e <= rem
            };
            let mut m = a.floor().to_integer() + floor_sqrt(&rem);
            while ok(&(&m + BigInt::one())) {
                m += BigInt::one();
            }
            while m.is_positive() && !ok(&m) {
                m -= BigInt::one();
            }
            Some(m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn q(s: &str) -> Rational {
        Scalar::parse(s).unwrap().exact().clone()
    }

    #[test]
    fn ball_slice_ranges() {
        let f = BoxBall { halfwidths: vec![q("0"); 2], radius: q("2"), open_cube: false };
        assert_eq!(f.slice_max(0, &q("0")), Some(BigInt::from(2)));
        assert_eq!(f.slice_max(1, &q("1")), Some(BigInt::from(1)));
        assert_eq!(f.slice_max(1, &q("4")), Some(BigInt::from(0)));
        assert_eq!(f.slice_max(1, &q("5")), None);
    }

    #[test]
    fn open_cube_is_strict() {
        let f = BoxBall { halfwidths: vec![q("1"); 2], radius: q("0"), open_cube: true };
        assert!(f.contains(&[q("1"), q("1")]));
        assert!(!f.contains(&[q("2"), q("0")]));
        assert_eq!(f.slice_max(0, &q("0")), Some(BigInt::from(1)));
        let g = BoxBall { halfwidths: vec![q("1/2"); 2], radius: q("0"), open_cube: true };
        assert_eq!(g.slice_max(0, &q("0")), Some(BigInt::from(1)));
    }

    #[test]
    fn ball_plus_cube_distance() {
        let f = BoxBall { halfwidths: vec![q("0"); 2], radius: q("1"), open_cube: false };
        let d = f.closed_linf_distance(&[2.0, 2.0]);
        assert!((d - (2.0 - std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-12);
    }
}
