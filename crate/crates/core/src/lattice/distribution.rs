use num::bigint::BigInt;
use num::traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{rational_to_f64, Rational};

/// Exact law of `|⟨X, e_n⟩|` for `X` uniform on a finite lattice cloud.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionDistribution {
    values: Vec<u64>,
    counts: Vec<u64>,
    #[serde(skip)]
    total: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moment {
    /// `E|⟨X, e_n⟩|^p`.
    pub raw: f64,
    /// `(E|⟨X, e_n⟩|^p)^{1/p}`.
    pub root: f64,
}

impl ProjectionDistribution {
    /// Distinct values must be strictly increasing with positive counts.
    pub fn new(values: Vec<u64>, counts: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        if values.len() != counts.len() {
            return Err(Error::Parse("values and counts differ in length".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("values must be strictly increasing".into()));
        }
        if counts.contains(&0) {
            return Err(Error::Parse("counts must be positive".into()));
        }
        let total = counts.iter().try_fold(0u64, |acc, &c| acc.checked_add(c));
        let total = total.ok_or_else(|| Error::Parse("total count overflows".into()))?;
        Ok(ProjectionDistribution { values, counts, total })
    }

    /// Law of `|x_n|` (last coordinate) over `points`.
    pub fn from_points(points: &[Vec<i64>]) -> Result<Self> {
        let mut vals: Vec<u64> = points
            .iter()
            .map(|p| p.last().map(|v| v.unsigned_abs()).ok_or(Error::EmptyDistribution))
            .collect::<Result<_>>()?;
        if vals.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        vals.sort_unstable();
        let mut values = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for v in vals {
            if values.last() == Some(&v) {
                *counts.last_mut().expect("nonempty") += 1;
            } else {
                values.push(v);
                counts.push(1);
            }
        }
        Self::new(values, counts)
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn max_value(&self) -> u64 {
        *self.values.last().expect("nonempty")
    }

    /// `F(v_j)` for every `j`.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0u64;
        self.counts
            .iter()
            .map(|&c| {
                acc += c;
                acc as f64 / self.total as f64
            })
            .collect()
    }

    pub fn cdf_exact(&self) -> Vec<Rational> {
        let mut acc = 0u64;
        let total = BigInt::from(self.total);
        self.counts
            .iter()
            .map(|&c| {
                acc += c;
                Rational::new(BigInt::from(acc), total.clone())
            })
            .collect()
    }

    /// `Σ_j counts_j · v_j^p`.
    pub fn power_sum_exact(&self, p: u32) -> BigInt {
        self.values.iter().zip(&self.counts).map(|(&v, &c)| BigInt::from(c) * BigInt::from(v).pow(p)).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({"values": self.values, "counts": self.counts}).to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            values: Vec<u64>,
            counts: Vec<u64>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        Self::new(raw.values, raw.counts)
    }
}

/// `E|⟨X, e_n⟩|^p` and its `p`-th root, for `p > 0`.
pub fn moment(dist: &ProjectionDistribution, p: f64) -> Result<Moment> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::PreconditionViolated(format!("moment order p = {p} must be positive")));
    }
    let terms = dist.values.iter().zip(&dist.counts).map(|(&v, &c)| c as f64 * (v as f64).powf(p));
    let raw = linalg::compensated_sum(terms) / dist.total as f64;
    Ok(Moment { raw, root: raw.powf(1.0 / p) })
}

/// Exact `E|⟨X, e_n⟩|^p` for integer `p`.
pub fn moment_exact(dist: &ProjectionDistribution, p: u32) -> Rational {
    Rational::new(dist.power_sum_exact(p), BigInt::from(dist.total))
}

/// `E max_{i<=N} |⟨X_i, e_n⟩|` over i.i.d. copies: `Σ_j v_j (F_j^N − F_{j−1}^N)`.
pub fn expected_max(dist: &ProjectionDistribution, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::PreconditionViolated("N must be at least 1".into()));
    }
    let pow = |f: f64| if n <= i32::MAX as u64 { f.powi(n as i32) } else { f.powf(n as f64) };
    let mut prev = 0.0;
    let terms: Vec<f64> = dist
        .cdf()
        .into_iter()
        .zip(&dist.values)
        .map(|(f, &v)| {
            let fp = pow(f);
            let t = v as f64 * (fp - prev);
            prev = fp;
            t
        })
        .collect();
    Ok(linalg::compensated_sum(terms))
}

pub fn expected_max_exact(dist: &ProjectionDistribution, n: u32) -> Rational {
    let mut prev = Rational::zero();
    let mut sum = Rational::zero();
    for (f, &v) in dist.cdf_exact().into_iter().zip(&dist.values) {
        let fp = Pow::pow(&f, n);
        sum += Rational::from_integer(BigInt::from(v)) * (&fp - &prev);
        prev = fp;
    }
    sum
}

/// `P(|⟨X, e_n⟩| >= t)`.
pub fn tail(dist: &ProjectionDistribution, t: f64) -> f64 {
    let hits: u64 = dist.values.iter().zip(&dist.counts).filter(|(&v, _)| v as f64 >= t).map(|(_, &c)| c).sum();
    hits as f64 / dist.total as f64
}

pub fn tail_exact(dist: &ProjectionDistribution, t: &Rational) -> Rational {
    let hits: u64 = dist
        .values
        .iter()
        .zip(&dist.counts)
        .filter(|(&v, _)| Rational::from_integer(BigInt::from(v)) >= *t)
        .map(|(_, &c)| c)
        .sum();
    Rational::new(BigInt::from(hits), BigInt::from(dist.total))
}

impl ProjectionDistribution {
    /// Float view of [`tail_exact`] for reporting.
    pub fn tail_f64(&self, t: &Rational) -> f64 {
        rational_to_f64(&tail_exact(self, t))
    }

    pub fn is_point_mass(&self) -> bool {
        self.values.len() == 1
    }

    pub fn probability_one(&self) -> Rational {
        Rational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The 25-point cloud of `[−2,2]²`: `|x_2|` is 0 (5×), 1 (10×), 2 (10×).
    fn box2() -> ProjectionDistribution {
        ProjectionDistribution::new(vec![0, 1, 2], vec![5, 10, 10]).unwrap()
    }

    #[test]
    fn moments_and_tails() {
        let d = box2();
        assert_eq!(moment(&d, 1.0).unwrap().root, 1.2);
        assert!((moment(&d, 2.0).unwrap().root - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(moment_exact(&d, 2), Rational::from_integer(2.into()));
        assert_eq!(tail(&d, 0.0), 1.0);
        assert_eq!(tail(&d, 1.5), 0.4);
        assert_eq!(tail(&d, 3.0), 0.0);
        let point = ProjectionDistribution::new(vec![0], vec![1]).unwrap();
        assert_eq!(moment(&point, 3.0).unwrap().root, 0.0);
    }

    #[test]
    fn expected_max_examples() {
        let d = box2();
        assert_eq!(expected_max_exact(&d, 1), Rational::new(6.into(), 5.into()));
        assert_eq!(expected_max_exact(&d, 2), Rational::new(8.into(), 5.into()));
        assert!((expected_max(&d, 2).unwrap() - 1.6).abs() < 1e-15);
        assert!((expected_max(&d, 1_000_000).unwrap() - 2.0).abs() < 1e-3);
    }

    #[test]
    fn validation_and_json() {
        assert!(ProjectionDistribution::new(vec![], vec![]).is_err());
        assert!(ProjectionDistribution::new(vec![1, 1], vec![1, 1]).is_err());
        assert!(ProjectionDistribution::new(vec![1], vec![0]).is_err());
        let d = box2();
        assert_eq!(ProjectionDistribution::from_json(&d.to_json()).unwrap(), d);
    }
}
