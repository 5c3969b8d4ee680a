//! Compressed sparse row rate matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Rate matrix `R(s, s')` in CSR form, columns sorted within each row.
///
/// Diagonal entries are self-loops. They are kept for structural queries and
/// ignored by everything that derives the generator.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl RateMatrix {
    /// Builds from `(row, col, rate)` triplets. Parallel entries are summed
    /// and exact zeros are dropped.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        t.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                row_ptr[r + 1] += 1;
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let m = Self {
            n,
            row_ptr,
            cols,
            vals,
        };
        m.filter(|_, _, v| v != 0.0)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        Self::from_triplets(
            n,
            rows.iter()
                .enumerate()
                .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v))),
        )
    }

    fn filter(&self, keep: impl Fn(usize, usize, f64) -> bool) -> Self {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        row_ptr.push(0);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if keep(i, j, v) {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n: self.n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored nonzero entries, self-loops included.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// Total rate out of `i`, excluding any self-loop.
    pub fn exit_rate(&self, i: usize) -> f64 {
        self.row(i).filter(|&(j, _)| j != i).map(|(_, v)| v).sum()
    }

    pub fn exit_rates(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.exit_rate(i)).collect()
    }

    pub fn max_exit_rate(&self) -> f64 {
        (0..self.n).map(|i| self.exit_rate(i)).fold(0.0, f64::max)
    }

    /// Copy with every outgoing transition of the flagged states removed.
    pub fn make_absorbing(&self, absorbing: &[bool]) -> Self {
        self.filter(|i, _, _| !absorbing[i])
    }

    /// Copy with self-loops removed.
    pub fn without_self_loops(&self) -> Self {
        self.filter(|i, j, _| i != j)
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.n,
            (0..self.n).flat_map(|i| self.row(i).map(move |(j, v)| (j, i, v))),
        )
    }

    /// Rejects negative, NaN or infinite rates.
    pub fn check_finite(&self) -> Result<()> {
        if self.vals.iter().all(|v| v.is_finite() && *v >= 0.0) {
            Ok(())
        } else {
            Err(Error::NonFiniteRate)
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        d
    }

    /// `(pi Q)_j` for each `j`, where `Q` is the generator.
    pub fn left_residual(&self, pi: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = pi
            .iter()
            .enumerate()
            .map(|(i, p)| -p * self.exit_rate(i))
            .collect();
        for (i, p) in pi.iter().enumerate() {
            for (j, v) in self.row(i) {
                if j != i {
                    out[j] += p * v;
                }
            }
        }
        out
    }
}
