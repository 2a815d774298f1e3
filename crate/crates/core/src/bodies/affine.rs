//! A body written as `Σ_k M_k A_k`: linear images of atoms (boxes, balls,
//! H- and V-polytopes). Every variant lowers to this form (closure semantics),
//! which turns ℓ∞ projection and ray shooting into small LPs. Ball atoms are
//! handled by outer tangent cuts added until the LP optimum is certified.

use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{LinearProgram, LpError, Sense};

use super::ConvexBody;

const MAX_CUT_ROUNDS: usize = 200;
const BALL_FEAS_REL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub(crate) enum Atom {
    Box(Vec<f64>),
    Ball(f64),
    H { a: Vec<Vec<f64>>, b: Vec<f64> },
    V(Vec<Vec<f64>>),
}

#[derive(Clone, Debug)]
struct Term {
    /// Row-major `n×n`; `None` is the identity.
    map: Option<Vec<f64>>,
    atom: Atom,
}

#[derive(Clone, Debug)]
pub(crate) struct AffineSum {
    n: usize,
    terms: Vec<Term>,
}

/// Two-sided bracket on an LP-derived quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

impl AffineSum {
    pub fn from_body(body: &ConvexBody) -> AffineSum {
        let n = body.dim();
        let mut terms = Vec::new();
        collect(body, &linalg::identity(n), n, &mut terms);
        AffineSum { n, terms }.simplified()
    }

    /// The closed part `A` of an open body `A + C_n`.
    pub fn open_core(body: &ConvexBody) -> AffineSum {
        let n = body.dim();
        let id = linalg::identity(n);
        let mut terms = Vec::new();
        match body {
            ConvexBody::CubeSum { base } => collect(base, &id, n, &mut terms),
            ConvexBody::Combination { mu, k, l, .. } => {
                let m = mu.value();
                if m < 1.0 {
                    collect(k, &id.iter().map(|v| v * (1.0 - m)).collect::<Vec<_>>(), n, &mut terms);
                }
                if m > 0.0 {
                    collect(l, &id.iter().map(|v| v * m).collect::<Vec<_>>(), n, &mut terms);
                }
            }
            other => collect(other, &id, n, &mut terms),
        }
        AffineSum { n, terms }.simplified()
    }

    fn simplified(self) -> AffineSum {
        let n = self.n;
        let mut box_sum = vec![0.0; n];
        let mut has_box = false;
        let mut ball_sum = 0.0;
        let mut has_ball = false;
        let mut rest = Vec::new();
        for term in self.terms {
            let map = term.map.clone();
            match (term.atom, map) {
                (Atom::Ball(r), None) => {
                    ball_sum += r;
                    has_ball = true;
                }
                (Atom::Ball(r), Some(m)) => {
                    // λU·B = |λ|·B whenever the map is a scaled orthogonal matrix
                    match scaled_orthogonal_factor(&m, n) {
                        Some(f) => {
                            ball_sum += f * r;
                            has_ball = true;
                        }
                        None => rest.push(Term { map: Some(m), atom: Atom::Ball(r) }),
                    }
                }
                (Atom::Box(a), None) => {
                    for (s, v) in box_sum.iter_mut().zip(&a) {
                        *s += v;
                    }
                    has_box = true;
                }
                (Atom::Box(a), Some(m)) => match scaled_signed_permutation(&m, n) {
                    Some(entries) => {
                        for (i, (j, f)) in entries.into_iter().enumerate() {
                            box_sum[i] += f.abs() * a[j];
                        }
                        has_box = true;
                    }
                    None => rest.push(Term { map: Some(m), atom: Atom::Box(a) }),
                },
                (Atom::V(verts), Some(m)) => {
                    let verts = verts.iter().map(|v| linalg::mat_vec(&m, n, v)).collect();
                    rest.push(Term { map: None, atom: Atom::V(verts) });
                }
                (atom, map) => rest.push(Term { map, atom }),
            }
        }
        let mut terms = Vec::new();
        if has_box {
            terms.push(Term { map: None, atom: Atom::Box(box_sum) });
        }
        if has_ball && ball_sum > 0.0 {
            terms.push(Term { map: None, atom: Atom::Ball(ball_sum) });
        }
        terms.extend(rest);
        AffineSum { n, terms }
    }

    /// ℓ∞ distance from `x`. When `decide` is `Some((threshold, tol))` the
    /// cut loop stops as soon as the bracket clears `threshold ± tol`.
    pub fn linf_distance(&self, x: &[f64], decide: Option<(f64, f64)>) -> Result<Bracket> {
        let mut model = Model::new(self, Goal::Distance);
        for _ in 0..MAX_CUT_ROUNDS {
            let mut lp = model.base_lp(x, None);
            model.add_cuts(&mut lp);
            let sol = lp.solve().map_err(|e| lp_err(e, "ℓ∞ projection"))?;
            let lo = sol.objective.max(0.0);
            let projected = model.project_balls(&sol.x);
            let hi = model.residual_inf(x, &projected).max(lo);
            let converged = hi - lo <= 1e-12 * (1.0 + hi.abs());
            let decided = decide.is_some_and(|(th, tol)| hi < th - tol || lo > th + tol);
            if converged || decided || !model.cut_violations(&sol.x) {
                return Ok(Bracket { lo, hi: if model.has_balls() { hi } else { lo } });
            }
        }
        Err(Error::LpInfeasible("cutting-plane loop did not converge".into()))
    }

    /// `sup { s >= 0 : x + s d ∈ body }`, or `None` if `x` is not in the body.
    pub fn ray_depth(&self, x: &[f64], d: &[f64]) -> Result<Option<f64>> {
        let mut model = Model::new(self, Goal::Ray);
        let mut last = None;
        for _ in 0..MAX_CUT_ROUNDS {
            let mut lp = model.base_lp(x, Some(d));
            model.add_cuts(&mut lp);
            let sol = match lp.solve() {
                Ok(s) => s,
                Err(LpError::Infeasible) => return Ok(None),
                Err(e) => return Err(lp_err(e, "ray shooting")),
            };
            last = Some(sol.objective);
            if !model.cut_violations(&sol.x) {
                break;
            }
        }
        Ok(last)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Goal {
    Distance,
    Ray,
}

struct BallVars {
    offset: usize,
    radius: f64,
    cuts: Vec<Vec<f64>>,
}

/// Variable layout shared by the distance and ray programs.
struct Model<'a> {
    sum: &'a AffineSum,
    goal: Goal,
    n_vars: usize,
    /// per output coordinate: linear expression over LP variables
    coord_expr: Vec<Vec<(usize, f64)>>,
    coord_const: Vec<f64>,
    /// per term: variable offset
    offsets: Vec<usize>,
    balls: Vec<BallVars>,
}

impl<'a> Model<'a> {
    fn new(sum: &'a AffineSum, goal: Goal) -> Self {
        let n = sum.n;
        let mut next = 1; // variable 0 is t (distance) or s (ray)
        let mut coord_expr = vec![Vec::new(); n];
        let mut coord_const = vec![0.0; n];
        let mut offsets = Vec::new();
        let mut balls = Vec::new();
        for term in &sum.terms {
            offsets.push(next);
            let m = |i: usize, j: usize| match &term.map {
                None => f64::from(u8::from(i == j)),
                Some(m) => m[i * n + j],
            };
            match &term.atom {
                Atom::Box(a) => {
                    for i in 0..n {
                        for (j, aj) in a.iter().enumerate() {
                            let c = m(i, j);
                            if c != 0.0 {
                                coord_expr[i].push((next + j, c));
                                coord_const[i] -= c * aj;
                            }
                        }
                    }
                    next += n;
                }
                Atom::Ball(r) => {
                    for i in 0..n {
                        for j in 0..n {
                            let c = m(i, j);
                            if c != 0.0 {
                                coord_expr[i].push((next + j, c));
                            }
                        }
                    }
                    balls.push(BallVars { offset: next, radius: *r, cuts: Vec::new() });
                    next += n;
                }
                Atom::H { .. } => {
                    for i in 0..n {
                        for j in 0..n {
                            let c = m(i, j);
                            if c != 0.0 {
                                coord_expr[i].push((next + j, c));
                            }
                        }
                    }
                    next += n;
                }
                Atom::V(verts) => {
                    for (k, v) in verts.iter().enumerate() {
                        let img: Vec<f64> = match &term.map {
                            None => v.clone(),
                            Some(mm) => linalg::mat_vec(mm, n, v),
                        };
                        for i in 0..n {
                            if img[i] != 0.0 {
                                coord_expr[i].push((next + k, img[i]));
                            }
                        }
                    }
                    next += verts.len();
                }
            }
        }
        Model { sum, goal, n_vars: next, coord_expr, coord_const, offsets, balls }
    }

    fn has_balls(&self) -> bool {
        !self.balls.is_empty()
    }

    fn base_lp(&self, x: &[f64], dir: Option<&[f64]>) -> LinearProgram {
        let n = self.sum.n;
        let mut lp = match self.goal {
            Goal::Distance => LinearProgram::minimize(self.n_vars),
            Goal::Ray => LinearProgram::maximize(self.n_vars),
        };
        lp.set_objective_coeff(0, 1.0);
        for (term, &off) in self.sum.terms.iter().zip(&self.offsets) {
            match &term.atom {
                Atom::Box(a) => {
                    for (j, aj) in a.iter().enumerate() {
                        lp.add_sparse_row(&[(off + j, 1.0)], Sense::Le, 2.0 * aj);
                    }
                }
                Atom::Ball(r) => {
                    for j in 0..n {
                        lp.set_free(off + j);
                        lp.add_sparse_row(&[(off + j, 1.0)], Sense::Le, *r);
                        lp.add_sparse_row(&[(off + j, 1.0)], Sense::Ge, -r);
                    }
                }
                Atom::H { a, b } => {
                    for j in 0..n {
                        lp.set_free(off + j);
                    }
                    for (row, bi) in a.iter().zip(b) {
                        let entries: Vec<(usize, f64)> =
                            row.iter().enumerate().map(|(j, &c)| (off + j, c)).collect();
                        lp.add_sparse_row(&entries, Sense::Le, *bi);
                    }
                }
                Atom::V(verts) => {
                    let entries: Vec<(usize, f64)> = (0..verts.len()).map(|k| (off + k, 1.0)).collect();
                    lp.add_sparse_row(&entries, Sense::Eq, 1.0);
                }
            }
        }
        for i in 0..n {
            let target = x[i] - self.coord_const[i];
            match (self.goal, dir) {
                (Goal::Distance, _) => {
                    // t + expr >= target  and  t - expr >= -target
                    let mut plus = vec![(0, 1.0)];
                    plus.extend(self.coord_expr[i].iter().copied());
                    lp.add_sparse_row(&plus, Sense::Ge, target);
                    let mut minus = vec![(0, 1.0)];
                    minus.extend(self.coord_expr[i].iter().map(|&(j, c)| (j, -c)));
                    lp.add_sparse_row(&minus, Sense::Ge, -target);
                }
                (Goal::Ray, Some(d)) => {
                    // expr - s d_i = target
                    let mut row = vec![(0, -d[i])];
                    row.extend(self.coord_expr[i].iter().copied());
                    lp.add_sparse_row(&row, Sense::Eq, target);
                }
                (Goal::Ray, None) => unreachable!("ray program needs a direction"),
            }
        }
        lp
    }

    fn add_cuts(&self, lp: &mut LinearProgram) {
        for ball in &self.balls {
            for u in &ball.cuts {
                let entries: Vec<(usize, f64)> = u.iter().enumerate().map(|(j, &c)| (ball.offset + j, c)).collect();
                lp.add_sparse_row(&entries, Sense::Le, ball.radius);
            }
        }
    }

    /// Adds a tangent cut for every ball whose LP point lies outside it.
    fn cut_violations(&mut self, sol: &[f64]) -> bool {
        let n = self.sum.n;
        let mut any = false;
        for ball in &mut self.balls {
            let w = &sol[ball.offset..ball.offset + n];
            let norm = linalg::norm2(w);
            if norm > ball.radius * (1.0 + BALL_FEAS_REL) + 1e-15 {
                ball.cuts.push(w.iter().map(|v| v / norm).collect());
                any = true;
            }
        }
        any
    }

    fn project_balls(&self, sol: &[f64]) -> Vec<f64> {
        let n = self.sum.n;
        let mut out = sol.to_vec();
        for ball in &self.balls {
            let w = &mut out[ball.offset..ball.offset + n];
            let norm = linalg::norm2(w);
            if norm > ball.radius {
                for v in w.iter_mut() {
                    *v *= ball.radius / norm;
                }
            }
        }
        out
    }

    fn residual_inf(&self, x: &[f64], sol: &[f64]) -> f64 {
        (0..self.sum.n)
            .map(|i| {
                let y: f64 = self.coord_expr[i].iter().map(|&(j, c)| c * sol[j]).sum::<f64>() + self.coord_const[i];
                (x[i] - y).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn lp_err(e: LpError, what: &str) -> Error {
    Error::LpInfeasible(format!("{what}: {e}"))
}

fn collect(body: &ConvexBody, map: &[f64], n: usize, out: &mut Vec<Term>) {
    let is_identity = map == linalg::identity(n).as_slice();
    let wrap = |atom: Atom| Term { map: if is_identity { None } else { Some(map.to_vec()) }, atom };
    match body {
        ConvexBody::Box { halfwidths } => out.push(wrap(Atom::Box(halfwidths.iter().map(|h| h.value()).collect()))),
        ConvexBody::Ball { radius, .. } => out.push(wrap(Atom::Ball(radius.value()))),
        ConvexBody::HPolytope { a, b } => out.push(wrap(Atom::H {
            a: a.iter().map(|r| r.iter().map(|v| v.value()).collect()).collect(),
            b: b.iter().map(|v| v.value()).collect(),
        })),
        ConvexBody::VPolytope { vertices } => {
            out.push(wrap(Atom::V(vertices.iter().map(|v| v.iter().map(|c| c.value()).collect()).collect())))
        }
        ConvexBody::Rotated { rotation, base } => {
            collect(base, &linalg::mat_mul(map, rotation.matrix(), n), n, out);
        }
        ConvexBody::Scaled { factor, base } => {
            let m: Vec<f64> = map.iter().map(|v| v * factor.value()).collect();
            collect(base, &m, n, out);
        }
        ConvexBody::CubeSum { base } => {
            collect(base, map, n, out);
            out.push(wrap(Atom::Box(vec![1.0; n])));
        }
        ConvexBody::Combination { mu, k, l, plus_cube } => {
            let mu = mu.value();
            if mu < 1.0 {
                let m: Vec<f64> = map.iter().map(|v| v * (1.0 - mu)).collect();
                collect(k, &m, n, out);
            }
            if mu > 0.0 {
                let m: Vec<f64> = map.iter().map(|v| v * mu).collect();
                collect(l, &m, n, out);
            }
            if *plus_cube {
                out.push(wrap(Atom::Box(vec![1.0; n])));
            }
        }
    }
}

/// `Some(|λ|)` when `m = λ U` with `U` orthogonal.
fn scaled_orthogonal_factor(m: &[f64], n: usize) -> Option<f64> {
    let mtm = linalg::mat_mul(&linalg::transpose(m, n), m, n);
    let f2 = mtm[0];
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { f2 } else { 0.0 };
            if (mtm[i * n + j] - expect).abs() > 1e-12 * (1.0 + f2) {
                return None;
            }
        }
    }
    Some(f2.sqrt())
}

/// For a scaled signed permutation, `(source column, factor)` per row.
fn scaled_signed_permutation(m: &[f64], n: usize) -> Option<Vec<(usize, f64)>> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let row = &m[i * n..(i + 1) * n];
        let nz: Vec<usize> = (0..n).filter(|&j| row[j] != 0.0).collect();
        if nz.len() != 1 {
            return None;
        }
        out.push((nz[0], row[nz[0]]));
    }
    Some(out)
}
