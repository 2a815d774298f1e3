//! Lattice points of convex bodies and the law of `|⟨X, e_n⟩|` for `X`
//! uniform on them.

mod distribution;
mod enumerate;

pub use distribution::{
    expected_max, expected_max_exact, moment, moment_exact, tail, tail_exact, Moment, ProjectionDistribution,
};
pub use enumerate::{enumerate, enumerate_with, EnumerateOptions, ENUMERATION_BUDGET};

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// `K ∩ Zⁿ` with the number of boundary-ambiguous candidates met on the way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePointSet {
    points: Vec<Vec<i64>>,
    ambiguous_count: usize,
    body_fingerprint: String,
}

impl LatticePointSet {
    pub fn new(points: Vec<Vec<i64>>, ambiguous_count: usize, body_fingerprint: String) -> Self {
        LatticePointSet { points, ambiguous_count, body_fingerprint }
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    /// `G_n(K)`.
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn ambiguous_count(&self) -> usize {
        self.ambiguous_count
    }

    pub fn body_fingerprint(&self) -> &str {
        &self.body_fingerprint
    }

    /// Law of `|x_n|` over the set.
    pub fn distribution(&self) -> Result<ProjectionDistribution> {
        ProjectionDistribution::from_points(&self.points)
    }

    /// One point per line, coordinates comma-separated, with an `x1,..,xn` header.
    pub fn to_csv(&self) -> String {
        let n = self.points.first().map_or(0, Vec::len);
        let mut out = (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
        out.push('\n');
        for p in &self.points {
            let row: Vec<String> = p.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Vec<Vec<i64>>> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty point CSV".into()))?;
        let n = header.split(',').count();
        lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let row = l
                    .split(',')
                    .map(|v| v.trim().parse::<i64>().map_err(|e| Error::Parse(e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                if row.len() != n {
                    return Err(Error::Parse("ragged point CSV".into()));
                }
                Ok(row)
            })
            .collect()
    }
}
