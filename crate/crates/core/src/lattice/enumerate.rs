use num::bigint::BigInt;
use num::traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bodies::{BoxBall, ConvexBody, Label, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Sense};
use crate::scalar::{Rational, Scalar};

use super::LatticePointSet;

/// Candidate-point guard on the bounding box.
pub const ENUMERATION_BUDGET: f64 = 1e8;
/// Widening applied to float support bounds before rounding.
const RANGE_SLACK: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnumerateOptions {
    pub tol: f64,
    pub budget: f64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { tol: DEFAULT_TOL, budget: ENUMERATION_BUDGET }
    }
}

/// `K ∩ Zⁿ`, sorted lexicographically.
pub fn enumerate(body: &ConvexBody) -> Result<LatticePointSet> {
    enumerate_with(body, EnumerateOptions::default())
}

pub fn enumerate_with(body: &ConvexBody, opts: EnumerateOptions) -> Result<LatticePointSet> {
    let ranges = integer_ranges(body)?;
    let candidates: f64 = ranges.iter().map(|&(lo, hi)| (hi - lo + 1).max(0) as f64).product();
    if candidates > opts.budget {
        return Err(Error::BudgetExceeded { candidates, limit: opts.budget });
    }
    let (mut points, ambiguous) = if let Some(form) = BoxBall::of(body) {
        (enumerate_boxball(&form), 0)
    } else if let ConvexBody::HPolytope { a, b } = body {
        enumerate_hpolytope(body, a, b, &ranges, opts.tol)
    } else {
        enumerate_filtered(body, &ranges, opts.tol)
    };
    points.sort();
    Ok(LatticePointSet::new(points, ambiguous, body.fingerprint()))
}

/// `⌈−h(−e_i)⌉ ..= ⌊h(e_i)⌋` per axis, slightly widened.
fn integer_ranges(body: &ConvexBody) -> Result<Vec<(i64, i64)>> {
    body.bounding_box()?
        .into_iter()
        .map(|(lo, hi)| {
            if !lo.is_finite() || !hi.is_finite() || lo.abs() > 1e15 || hi.abs() > 1e15 {
                return Err(Error::UnboundedBody);
            }
            let pad = RANGE_SLACK * (1.0 + lo.abs().max(hi.abs()));
            Ok(((lo - pad).ceil() as i64, (hi + pad).floor() as i64))
        })
        .collect()
}

fn enumerate_boxball(form: &BoxBall) -> Vec<Vec<i64>> {
    let n = form.dim();
    let Some(top) = form.slice_max(0, &Rational::zero()) else { return Vec::new() };
    let top = top.to_i64().expect("range fits in i64");
    (-top..=top)
        .into_par_iter()
        .flat_map_iter(|x0| {
            let mut out = Vec::new();
            let mut prefix = vec![x0];
            let spent = form.slice_cost(0, &BigInt::from(x0));
            boxball_rec(form, n, &mut prefix, &spent, &mut out);
            out
        })
        .collect()
}

fn boxball_rec(form: &BoxBall, n: usize, prefix: &mut Vec<i64>, spent: &Rational, out: &mut Vec<Vec<i64>>) {
    let k = prefix.len();
    if k == n {
        out.push(prefix.clone());
        return;
    }
    let Some(m) = form.slice_max(k, spent) else { return };
    let m = m.to_i64().expect("range fits in i64");
    for v in -m..=m {
        let next = spent + form.slice_cost(k, &BigInt::from(v));
        prefix.push(v);
        boxball_rec(form, n, prefix, &next, out);
        prefix.pop();
    }
}

fn enumerate_hpolytope(
    body: &ConvexBody,
    a: &[Vec<Scalar>],
    b: &[Scalar],
    ranges: &[(i64, i64)],
    tol: f64,
) -> (Vec<Vec<i64>>, usize) {
    let af: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(Scalar::value).collect()).collect();
    let bf: Vec<f64> = b.iter().map(Scalar::value).collect();
    let (lo, hi) = ranges[0];
    let parts: Vec<(Vec<Vec<i64>>, usize)> = (lo..=hi)
        .into_par_iter()
        .map(|x0| {
            let mut out = Vec::new();
            let mut amb = 0;
            let mut prefix = vec![x0];
            hpoly_rec(body, &af, &bf, ranges, tol, &mut prefix, &mut out, &mut amb);
            (out, amb)
        })
        .collect();
    merge(parts)
}

#[allow(clippy::too_many_arguments)]
fn hpoly_rec(
    body: &ConvexBody,
    a: &[Vec<f64>],
    b: &[f64],
    ranges: &[(i64, i64)],
    tol: f64,
    prefix: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
    amb: &mut usize,
) {
    let n = ranges.len();
    let k = prefix.len();
    if k == n {
        let c = body.classify_lattice(prefix, tol);
        if c.label == Label::BoundaryAmbiguous {
            *amb += 1;
        }
        if c.is_member(false) {
            out.push(prefix.clone());
        }
        return;
    }
    let Some((lo, hi)) = slice_range(a, b, prefix, k) else { return };
    let lo = lo.max(ranges[k].0);
    let hi = hi.min(ranges[k].1);
    for v in lo..=hi {
        prefix.push(v);
        hpoly_rec(body, a, b, ranges, tol, prefix, out, amb);
        prefix.pop();
    }
}

/// Integer range of coordinate `k` over `{A x <= b}` with the prefix fixed.
fn slice_range(a: &[Vec<f64>], b: &[f64], prefix: &[i64], k: usize) -> Option<(i64, i64)> {
    let n = a[0].len();
    let free = n - prefix.len();
    let mut bounds = [0.0; 2];
    for (slot, maximize) in [(0, false), (1, true)] {
        let mut lp = if maximize { LinearProgram::maximize(free) } else { LinearProgram::minimize(free) };
        lp.set_objective_coeff(0, 1.0);
        for j in 0..free {
            lp.set_free(j);
        }
        for (row, bi) in a.iter().zip(b) {
            let fixed: f64 = row[..k].iter().zip(prefix).map(|(c, &x)| c * x as f64).sum();
            lp.add_row(row[k..].to_vec(), Sense::Le, bi - fixed);
        }
        match lp.solve() {
            Ok(sol) => bounds[slot] = sol.objective,
            Err(_) => return None,
        }
    }
    let pad = RANGE_SLACK * (1.0 + bounds[0].abs().max(bounds[1].abs()));
    Some(((bounds[0] - pad).ceil() as i64, (bounds[1] + pad).floor() as i64))
}

fn enumerate_filtered(body: &ConvexBody, ranges: &[(i64, i64)], tol: f64) -> (Vec<Vec<i64>>, usize) {
    let open = body.is_open();
    let (lo, hi) = ranges[0];
    let parts: Vec<(Vec<Vec<i64>>, usize)> = (lo..=hi)
        .into_par_iter()
        .map(|x0| {
            let mut out = Vec::new();
            let mut amb = 0;
            let mut x: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            x[0] = x0;
            if ranges.iter().any(|r| r.0 > r.1) {
                return (out, amb);
            }
            loop {
                let c = body.classify_lattice(&x, tol);
                if c.label == Label::BoundaryAmbiguous {
                    amb += 1;
                }
                if c.is_member(open) {
                    out.push(x.clone());
                }
                // odometer over coordinates 1..n
                let mut i = ranges.len() - 1;
                loop {
                    if i == 0 {
                        return (out, amb);
                    }
                    if x[i] < ranges[i].1 {
                        x[i] += 1;
                        break;
                    }
                    x[i] = ranges[i].0;
                    i -= 1;
                }
            }
        })
        .collect();
    merge(parts)
}

fn merge(parts: Vec<(Vec<Vec<i64>>, usize)>) -> (Vec<Vec<i64>>, usize) {
    let amb = parts.iter().map(|p| p.1).sum();
    (parts.into_iter().flat_map(|p| p.0).collect(), amb)
}
