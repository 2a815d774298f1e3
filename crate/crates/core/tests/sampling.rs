use latticeborell::harness::cross_polytope;
use latticeborell::sampling::{
    centroid_support, floating_body_support, mean_width_centroid, random_polytope_mean_width, CentroidMethod,
    RngStream,
};
use latticeborell::{ConvexBody, Scalar};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

fn sandwich_bodies() -> Vec<ConvexBody> {
    vec![
        ConvexBody::ball(2, Scalar::from_int(1)).unwrap(),
        ConvexBody::cube(2, Scalar::from_int(1)).unwrap(),
        cross_polytope(2, 1),
    ]
}

#[test]
fn floating_body_within_centroid_band() {
    let dirs = [[1.0, 0.0], [0.6, 0.8], [-0.28, 0.96]];
    for (b, body) in sandwich_bodies().iter().enumerate() {
        for delta in [1.0 / 8.0, 1.0 / 32.0] {
            let p = (1.0f64 / delta).ln();
            for (j, theta) in dirs.iter().enumerate() {
                let stream = RngStream::new(40 + b as u64, j as u64);
                let f = floating_body_support(body, delta, theta, 20_000, &stream.substream(0)).unwrap();
                let method = CentroidMethod::MonteCarlo { samples: 20_000, stream: stream.substream(1) };
                let z = centroid_support(body, p, theta, &method).unwrap();
                let ratio = f / z;
                assert!((0.05..=20.0).contains(&ratio), "body {b} δ={delta} θ={theta:?}: {ratio}");
            }
        }
    }
}

#[test]
fn doubling_directions_stays_within_error() {
    let body = ConvexBody::ball(2, Scalar::from_int(1)).unwrap();
    let stream = RngStream::new(5, 0);
    let a = random_polytope_mean_width(&body, 16, 8, 500, &stream).unwrap();
    let b = random_polytope_mean_width(&body, 16, 8, 1000, &stream).unwrap();
    assert!((a.value - b.value).abs() < 3.0 * a.stderr.hypot(b.stderr), "{a:?} vs {b:?}");
}

fn lattice_supports(body: &ConvexBody, theta: &[f64]) -> Vec<f64> {
    [25, 50, 100]
        .iter()
        .map(|&l| {
            let method = CentroidMethod::Lattice { lambda: Scalar::from_int(l) };
            centroid_support(body, 2.0, theta, &method).unwrap()
        })
        .collect()
}

#[test]
fn lattice_centroid_support_is_cauchy() {
    let body = ConvexBody::cube(2, Scalar::from_int(1)).unwrap();
    let values = lattice_supports(&body, &[0.6, 0.8]);
    let d1 = (values[1] - values[0]).abs() / values[1];
    let d2 = (values[2] - values[1]).abs() / values[2];
    assert!(d2 < d1, "{values:?}");
    // Continuous value: (0.6² + 0.8²)^{1/2}·(1/3)^{1/2}.
    assert!((values[2] - (1.0f64 / 3.0).sqrt()).abs() < 0.01);
}

#[test]
fn lattice_centroid_support_on_disk() {
    // Circle-problem fluctuations make the differences non-monotone here; only closeness is asserted.
    let body = ConvexBody::ball(2, Scalar::from_int(1)).unwrap();
    let values = lattice_supports(&body, &[0.6, 0.8]);
    assert!(values.iter().all(|v| (v - 0.5).abs() < 0.01), "{values:?}");
}

#[test]
fn monte_carlo_is_bitwise_reproducible_across_threads() {
    let body = ConvexBody::cube(3, Scalar::from_ratio(3, 2).unwrap()).unwrap();
    let stream = RngStream::new(77, 3);
    let run = || {
        let w = random_polytope_mean_width(&body, 32, 5, 200, &stream).unwrap();
        let z = mean_width_centroid(&body, 3.0, 200, 2_000, &stream).unwrap();
        (w.value.to_bits(), w.stderr.to_bits(), z.value.to_bits(), z.stderr.to_bits())
    };
    assert_eq!(in_pool(1, run), in_pool(6, run));
}
