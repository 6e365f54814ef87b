//! Gelfand–Tsetlin patterns.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Triangular array whose top row is the highest weight; row `k` (from the
/// top) has `d − k` entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GtPattern {
    rows: Vec<Vec<i64>>,
}

impl GtPattern {
    /// Checks `L_{i,j+1} ≥ L_{i,j} ≥ L_{i+1,j+1}` between consecutive rows.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let d = rows.len();
        for (k, row) in rows.iter().enumerate() {
            if row.len() != d - k {
                return Err(Error::InvalidArgument(format!(
                    "row {k} has {} entries, expected {}",
                    row.len(),
                    d - k
                )));
            }
        }
        for pair in rows.windows(2) {
            let (upper, lower) = (&pair[0], &pair[1]);
            for (i, &x) in lower.iter().enumerate() {
                if !(upper[i] >= x && x >= upper[i + 1]) {
                    return Err(Error::InvalidArgument(format!(
                        "row {lower:?} does not interlace {upper:?}"
                    )));
                }
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Weight: `w_k = Σ row_{d−k} − Σ row_{d−k+1}`, from the single-entry row upward.
    pub fn weight(&self) -> Vec<i64> {
        let sums: Vec<i64> = self.rows.iter().rev().map(|r| r.iter().sum()).collect();
        let mut w = Vec::with_capacity(sums.len());
        let mut prev = 0;
        for s in sums {
            w.push(s - prev);
            prev = s;
        }
        w
    }
}

/// All patterns with the given top row.
pub fn gt_patterns(top: &[i64]) -> Vec<GtPattern> {
    fn below(row: &[i64]) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for i in 0..row.len() - 1 {
            let mut next = Vec::new();
            for prefix in &out {
                for x in row[i + 1]..=row[i] {
                    let mut p = prefix.clone();
                    p.push(x);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }
    fn extend(rows: Vec<Vec<i64>>, out: &mut Vec<GtPattern>) {
        let last = rows.last().expect("nonempty");
        if last.len() == 1 {
            out.push(GtPattern { rows });
            return;
        }
        for r in below(last) {
            let mut next = rows.clone();
            next.push(r);
            extend(next, out);
        }
    }
    let mut out = Vec::new();
    if !top.is_empty() {
        extend(vec![top.to_vec()], &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repthy::probe::irrep_dim;

    #[test]
    fn counts_match_irrep_dimensions() {
        assert_eq!(gt_patterns(&[2, 1, 0]).len(), irrep_dim(&[2, 1], 3));
        assert_eq!(gt_patterns(&[2, 0, 0]).len(), 6);
        assert_eq!(gt_patterns(&[3, 0]).len(), 4);
    }

    #[test]
    fn interlacing_enforced() {
        assert!(GtPattern::new(vec![vec![2, 0], vec![1]]).is_ok());
        assert!(GtPattern::new(vec![vec![2, 0], vec![3]]).is_err());
        assert_eq!(GtPattern::new(vec![vec![2, 0], vec![1]]).unwrap().weight(), vec![1, 1]);
    }
}
