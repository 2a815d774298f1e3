use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub const ORTHOGONALITY_TOL: f64 = 1e-12;
pub const DETERMINANT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RotationProvenance {
    Identity,
    SignedPermutation,
    HaarSample { seed: u64, stream: u64 },
    User,
}

/// `(U x)_i = signs[i] * x[perm[i]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n || n == 0 {
            return Err(Error::InvalidBody("signed permutation length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidBody("not a permutation".into()));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidBody("signs must be ±1".into()));
        }
        Ok(SignedPermutation { perm, signs })
    }

    pub fn apply<T: Copy + std::ops::Neg<Output = T>>(&self, x: &[T]) -> Vec<T> {
        self.perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| if s < 0 { -x[p] } else { x[p] })
            .collect()
    }

    /// `Uᵀ x`.
    pub fn apply_transpose<T: Copy + std::ops::Neg<Output = T> + Default>(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); x.len()];
        for (i, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            out[p] = if s < 0 { -x[i] } else { x[i] };
        }
        out
    }

    fn matrix(&self) -> Vec<f64> {
        let n = self.perm.len();
        let mut m = vec![0.0; n * n];
        for (i, (&p, &s)) in self.perm.iter().zip(&self.signs).enumerate() {
            m[i * n + p] = s as f64;
        }
        m
    }
}

/// Orthogonal `n×n` matrix (row-major) with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    n: usize,
    matrix: Vec<f64>,
    provenance: RotationProvenance,
    signed_perm: Option<SignedPermutation>,
}

impl Rotation {
    pub fn identity(n: usize) -> Self {
        Rotation {
            n,
            matrix: linalg::identity(n),
            provenance: RotationProvenance::Identity,
            signed_perm: Some(SignedPermutation { perm: (0..n).collect(), signs: vec![1; n] }),
        }
    }

    pub fn signed_permutation(sp: SignedPermutation) -> Self {
        Rotation {
            n: sp.perm.len(),
            matrix: sp.matrix(),
            provenance: RotationProvenance::SignedPermutation,
            signed_perm: Some(sp),
        }
    }

    /// Validates orthogonality; recognizes exact signed permutations.
    pub fn from_matrix(n: usize, matrix: Vec<f64>, provenance: RotationProvenance) -> Result<Self> {
        if n == 0 || matrix.len() != n * n {
            return Err(Error::InvalidBody(format!("rotation must be {n}x{n}")));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("rotation has non-finite entries".into()));
        }
        let err = orthogonality_error(&matrix, n);
        if err > ORTHOGONALITY_TOL {
            return Err(Error::InvalidBody(format!("matrix is not orthogonal (max |UᵀU−I| = {err:e})")));
        }
        let det = linalg::determinant(&matrix, n);
        if (det.abs() - 1.0).abs() > DETERMINANT_TOL {
            return Err(Error::InvalidBody(format!("|det U| = {} != 1", det.abs())));
        }
        let signed_perm = detect_signed_permutation(&matrix, n);
        Ok(Rotation { n, matrix, provenance, signed_perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn provenance(&self) -> &RotationProvenance {
        &self.provenance
    }

    pub fn as_signed_permutation(&self) -> Option<&SignedPermutation> {
        self.signed_perm.as_ref()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.matrix, self.n, x)
    }

    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        linalg::mat_t_vec(&self.matrix, self.n, x)
    }

    pub fn orthogonality_error(&self) -> f64 {
        orthogonality_error(&self.matrix, self.n)
    }

    pub fn determinant(&self) -> f64 {
        linalg::determinant(&self.matrix, self.n)
    }

    /// Column `j`, i.e. `U e_j`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.matrix[i * self.n + j]).collect()
    }
}

pub fn orthogonality_error(m: &[f64], n: usize) -> f64 {
    let utu = linalg::mat_mul(&linalg::transpose(m, n), m, n);
    let id = linalg::identity(n);
    utu.iter().zip(&id).fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
}

fn detect_signed_permutation(m: &[f64], n: usize) -> Option<SignedPermutation> {
    let mut perm = vec![0; n];
    let mut signs = vec![0i8; n];
    for i in 0..n {
        let row = &m[i * n..(i + 1) * n];
        let nonzero: Vec<usize> = (0..n).filter(|&j| row[j] != 0.0).collect();
        if nonzero.len() != 1 {
            return None;
        }
        let j = nonzero[0];
        signs[i] = match row[j] {
            1.0 => 1,
            -1.0 => -1,
            _ => return None,
        };
        perm[i] = j;
    }
    SignedPermutation::new(perm, signs).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_permutation_roundtrip() {
        let sp = SignedPermutation::new(vec![2, 0, 1], vec![1, -1, 1]).unwrap();
        let r = Rotation::signed_permutation(sp.clone());
        let x = [1.0, 2.0, 3.0];
        assert_eq!(r.apply(&x), sp.apply(&x));
        assert_eq!(r.apply_transpose(&r.apply(&x)), x.to_vec());
        assert_eq!(sp.apply_transpose(&sp.apply(&x)), x.to_vec());
        let again = Rotation::from_matrix(3, r.matrix().to_vec(), RotationProvenance::User).unwrap();
        assert_eq!(again.as_signed_permutation(), Some(&sp));
    }

    #[test]
    fn rejects_non_orthogonal() {
        assert!(Rotation::from_matrix(2, vec![1.0, 0.1, 0.0, 1.0], RotationProvenance::User).is_err());
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let r = Rotation::from_matrix(2, vec![c, -c, c, c], RotationProvenance::User).unwrap();
        assert!(r.as_signed_permutation().is_none());
        assert!((r.determinant() - 1.0).abs() < 1e-12);
    }
}
