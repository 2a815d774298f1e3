#![no_main]

use latticeborell::lattice::{moment, tail};
use latticeborell::ProjectionDistribution;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(dist) = ProjectionDistribution::from_json(text) else { return };
    assert_eq!(ProjectionDistribution::from_json(&dist.to_json()).unwrap(), dist);
    let cdf = dist.cdf();
    assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
    let _ = moment(&dist, 1.5);
    assert!((0.0..=1.0).contains(&tail(&dist, 1.0)));
});
