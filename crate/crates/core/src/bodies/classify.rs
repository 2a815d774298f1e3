use num::bigint::BigInt;
use num::traits::Zero;

use crate::error::Result;
use crate::linalg;
use crate::scalar::{rational_to_f64, Rational, Scalar};

use super::affine::{AffineSum, Bracket};
use super::{BoxBall, ConvexBody};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Inside,
    Outside,
    BoundaryAmbiguous,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Classification {
    pub label: Label,
    /// Positive inside, negative outside.
    pub margin: f64,
    /// The label was decided in exact arithmetic.
    pub exact: bool,
}

impl Classification {
    pub fn from_margin(margin: f64, tol: f64) -> Self {
        let label = if margin > tol {
            Label::Inside
        } else if margin < -tol {
            Label::Outside
        } else {
            Label::BoundaryAmbiguous
        };
        Classification { label, margin, exact: false }
    }

    fn exact(inside: bool, margin: f64) -> Self {
        Classification { label: if inside { Label::Inside } else { Label::Outside }, margin, exact: true }
    }

    /// Counting convention: ambiguous points belong to closed bodies and not
    /// to open ones.
    pub fn is_member(&self, open: bool) -> bool {
        match self.label {
            Label::Inside => true,
            Label::Outside => false,
            Label::BoundaryAmbiguous => !open,
        }
    }
}

/// A query point with an optional exact rational view.
struct Query {
    exact: Option<Vec<Rational>>,
    approx: Vec<f64>,
}

impl Query {
    fn scaled_down(&self, factor: &Scalar) -> Query {
        Query {
            exact: self.exact.as_ref().map(|x| x.iter().map(|v| v / factor.exact()).collect()),
            approx: self.approx.iter().map(|v| v / factor.value()).collect(),
        }
    }
}

impl ConvexBody {
    pub fn classify(&self, x: &[f64], tol: f64) -> Classification {
        let exact = x.iter().map(|&v| Rational::from_float(v)).collect::<Option<Vec<_>>>();
        classify_query(self, &Query { exact, approx: x.to_vec() }, tol)
    }

    /// Floating-point classification without the exact rational path.
    pub fn classify_approx(&self, x: &[f64], tol: f64) -> Classification {
        classify_query(self, &Query { exact: None, approx: x.to_vec() }, tol)
    }

    pub fn classify_rational(&self, x: &[Rational], tol: f64) -> Classification {
        let approx = x.iter().map(rational_to_f64).collect();
        classify_query(self, &Query { exact: Some(x.to_vec()), approx }, tol)
    }

    pub fn classify_lattice(&self, x: &[i64], tol: f64) -> Classification {
        let exact = x.iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect();
        let approx = x.iter().map(|&v| v as f64).collect();
        classify_query(self, &Query { exact: Some(exact), approx }, tol)
    }

    /// Membership under the counting convention of [`Classification::is_member`].
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.classify(x, tol).is_member(self.is_open())
    }

    /// `min_{y∈K} ‖x − y‖_∞` over the closure of `K`.
    pub fn linf_distance(&self, x: &[f64]) -> Result<f64> {
        Ok(linf_bracket(self, x, None)?.mid())
    }
}

fn linf_bracket(body: &ConvexBody, x: &[f64], decide: Option<(f64, f64)>) -> Result<Bracket> {
    if let Some(form) = BoxBall::of(body) {
        let d = form.linf_distance(x);
        return Ok(Bracket { lo: d, hi: d });
    }
    match body {
        ConvexBody::Scaled { factor, base } => {
            let l = factor.value();
            let xs: Vec<f64> = x.iter().map(|v| v / l).collect();
            let b = linf_bracket(base, &xs, decide.map(|(t, tol)| (t / l, tol / l)))?;
            Ok(Bracket { lo: l * b.lo, hi: l * b.hi })
        }
        ConvexBody::Rotated { rotation, base } if rotation.as_signed_permutation().is_some() => {
            let sp = rotation.as_signed_permutation().expect("checked");
            linf_bracket(base, &sp.apply_transpose(x), decide)
        }
        ConvexBody::CubeSum { base } => {
            let b = linf_bracket(base, x, decide.map(|(t, tol)| (t + 1.0, tol)))?;
            Ok(Bracket { lo: (b.lo - 1.0).max(0.0), hi: (b.hi - 1.0).max(0.0) })
        }
        _ => AffineSum::from_body(body).linf_distance(x, decide),
    }
}

fn classify_query(body: &ConvexBody, q: &Query, tol: f64) -> Classification {
    if let Some(form) = BoxBall::of(body) {
        let margin = form.margin(&q.approx);
        return match &q.exact {
            Some(x) => Classification::exact(form.contains(x), margin),
            None => Classification::from_margin(margin, tol),
        };
    }
    match body {
        ConvexBody::HPolytope { a, b } => {
            let margin = a
                .iter()
                .zip(b)
                .map(|(row, bi)| {
                    let ar: Vec<f64> = row.iter().map(Scalar::value).collect();
                    (bi.value() - linalg::dot(&ar, &q.approx)) / linalg::norm2(&ar)
                })
                .fold(f64::INFINITY, f64::min);
            match &q.exact {
                Some(x) => {
                    let inside = a.iter().zip(b).all(|(row, bi)| {
                        let lhs: Rational = row.iter().zip(x).map(|(c, xi)| c.exact() * xi).sum();
                        &lhs <= bi.exact()
                    });
                    Classification::exact(inside, margin)
                }
                None => Classification::from_margin(margin, tol),
            }
        }
        ConvexBody::Rotated { rotation, base } => match rotation.as_signed_permutation() {
            Some(sp) => {
                let approx = sp.apply_transpose(&q.approx);
                let exact = q.exact.as_ref().map(|x| {
                    let mut out = vec![Rational::zero(); x.len()];
                    for (i, (&p, &s)) in sp.perm.iter().zip(&sp.signs).enumerate() {
                        out[p] = if s < 0 { -x[i].clone() } else { x[i].clone() };
                    }
                    out
                });
                classify_query(base, &Query { exact, approx }, tol)
            }
            None => {
                let approx = rotation.apply_transpose(&q.approx);
                classify_query(base, &Query { exact: None, approx }, tol)
            }
        },
        ConvexBody::Scaled { factor, base } => classify_query(base, &q.scaled_down(factor), tol),
        ConvexBody::CubeSum { .. } | ConvexBody::Combination { plus_cube: true, .. } => {
            let bracket = match body {
                ConvexBody::CubeSum { base } => linf_bracket(base, &q.approx, Some((1.0, tol))),
                _ => AffineSum::open_core(body).linf_distance(&q.approx, Some((1.0, tol))),
            };
            match bracket {
                Ok(b) if b.hi < 1.0 - tol => Classification::from_margin(1.0 - b.hi, tol),
                Ok(b) if b.lo > 1.0 + tol => Classification::from_margin(1.0 - b.lo, tol),
                Ok(b) => Classification::from_margin(1.0 - b.mid(), tol),
                Err(_) => Classification::from_margin(0.0, tol),
            }
        }
        _ => classify_lp_closed(body, &q.approx, tol),
    }
}

/// Closed bodies without a closed form: distance LP, then axis ray depths.
fn classify_lp_closed(body: &ConvexBody, x: &[f64], tol: f64) -> Classification {
    let sum = AffineSum::from_body(body);
    let dist = match sum.linf_distance(x, Some((tol, 0.0))) {
        Ok(d) => d,
        Err(_) => return Classification::from_margin(0.0, tol),
    };
    if dist.lo > tol {
        return Classification::from_margin(-dist.lo, tol);
    }
    let n = x.len();
    let mut depth = f64::INFINITY;
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[i] = s;
            match sum.ray_depth(x, &d) {
                Ok(Some(v)) => depth = depth.min(v),
                Ok(None) => return Classification::from_margin(-dist.hi.max(0.0), tol),
                Err(_) => return Classification::from_margin(0.0, tol),
            }
        }
    }
    Classification::from_margin(depth, tol)
}
