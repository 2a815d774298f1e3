use rand::Rng;
use rand_distr::StandardNormal;

use crate::bodies::{Rotation, RotationProvenance};
use crate::linalg;

use super::RngStream;

/// Haar-distributed orthogonal matrix: a Gaussian matrix orthonormalized by
/// modified Gram–Schmidt (equivalently, `Q` of the QR factorization with a
/// positive diagonal in `R`).
pub fn haar_rotation(stream: &RngStream, n: usize) -> Rotation {
    let mut rng = stream.rng();
    loop {
        let cols: Vec<Vec<f64>> =
            (0..n).map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).collect();
        if let Some(q) = orthonormalize(cols) {
            let mut matrix = vec![0.0; n * n];
            for (j, col) in q.iter().enumerate() {
                for i in 0..n {
                    matrix[i * n + j] = col[i];
                }
            }
            let provenance = RotationProvenance::HaarSample { seed: stream.seed, stream: stream.stream };
            if let Ok(r) = Rotation::from_matrix(n, matrix, provenance) {
                return r;
            }
        }
    }
}

/// Two-pass modified Gram–Schmidt; `None` for (numerically) dependent columns.
fn orthonormalize(mut cols: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    for j in 0..cols.len() {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = linalg::dot(&cols[k], &cols[j]);
                let (done, rest) = cols.split_at_mut(j);
                for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * q;
                }
            }
        }
        let norm = linalg::norm2(&cols[j]);
        if norm < 1e-10 {
            return None;
        }
        cols[j].iter_mut().for_each(|x| *x /= norm);
    }
    Some(cols)
}
