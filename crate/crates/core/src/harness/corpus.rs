//! Standard test bodies and random rational bodies for sweeps and checks.

use rand::Rng;

use crate::bodies::ConvexBody;
use crate::scalar::Scalar;

fn int(v: i64) -> Scalar {
    Scalar::from_int(v)
}

fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::from_ratio(p, q).expect("nonzero denominator")
}

/// `conv{±r·e_i}` in `ℝⁿ`.
pub fn cross_polytope(n: usize, radius: i64) -> ConvexBody {
    let mut vertices = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [radius, -radius] {
            let mut v = vec![int(0); n];
            v[i] = int(s);
            vertices.push(v);
        }
    }
    ConvexBody::vpolytope(vertices).expect("cross-polytope is full-dimensional")
}

/// Named bodies covering the worked examples: `Box(2)²`, `Ball(2)²`,
/// `Ball(2)³`, `Ball(1)³`, cross-polytopes and the counterexample wedges.
pub fn standard_corpus() -> Vec<(String, ConvexBody)> {
    let mut out = vec![
        ("box2-2d".to_string(), ConvexBody::cube(2, int(2)).unwrap()),
        ("ball2-2d".to_string(), ConvexBody::ball(2, int(2)).unwrap()),
        ("ball2-3d".to_string(), ConvexBody::ball(3, int(2)).unwrap()),
        ("ball1-3d".to_string(), ConvexBody::ball(3, int(1)).unwrap()),
        ("cross2-2d".to_string(), cross_polytope(2, 2)),
        ("cross2-3d".to_string(), cross_polytope(3, 2)),
    ];
    for lambda in [4, 16, 64] {
        out.push((format!("wedge{lambda}-2d"), ConvexBody::counterexample(int(lambda), 2).unwrap()));
    }
    out
}

/// A random small body with rational data: a box, a ball, or a symmetric
/// polygon, in dimension 2 or 3. Every body contains the origin and at
/// least one lattice point.
pub fn random_rational_body<R: Rng + ?Sized>(rng: &mut R) -> ConvexBody {
    loop {
        let n = rng.random_range(2..=3);
        let body = match rng.random_range(0..3) {
            0 => ConvexBody::axis_box((0..n).map(|_| ratio(rng.random_range(2..=16), 4)).collect()),
            1 => ConvexBody::ball(n, ratio(rng.random_range(4..=14), 4)),
            _ => {
                let k = rng.random_range(2..=3);
                let mut vertices = Vec::with_capacity(2 * k);
                for _ in 0..k {
                    let x = rng.random_range(-12..=12);
                    let y = rng.random_range(-12..=12);
                    let d = rng.random_range(1..=3);
                    vertices.push(vec![ratio(x, d), ratio(y, d)]);
                    vertices.push(vec![ratio(-x, d), ratio(-y, d)]);
                }
                ConvexBody::vpolytope(vertices)
            }
        };
        if let Ok(body) = body {
            return body;
        }
    }
}

/// A pair of bodies in a common dimension and a weight `λ = k/8`, `k ∈ 0..=8`.
pub fn random_bm_triple<R: Rng + ?Sized>(rng: &mut R) -> (ConvexBody, ConvexBody, Scalar) {
    loop {
        let k = random_rational_body(rng);
        let l = random_rational_body(rng);
        if k.dim() == l.dim() {
            return (k, l, ratio(rng.random_range(0..=8), 8));
        }
    }
}
