use alloc::collections::VecDeque;
use alloc::vec::Vec;

/// Truncated Poisson(`q`) probabilities over `left..=right`.
///
/// Weights are grown outward from the mode, always taking the larger of the
/// two frontier terms, until the kept mass reaches `1 - eps`. The mode weight
/// is evaluated in log space so `q` in the hundreds does not underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    pub left: usize,
    pub weights: Vec<f64>,
    /// Probability mass outside `left..=right`.
    pub tail: f64,
}

impl PoissonWeights {
    pub fn new(q: f64, eps: f64) -> Self {
        debug_assert!(q.is_finite() && q >= 0.0 && eps > 0.0);
        if q == 0.0 {
            return Self {
                left: 0,
                weights: alloc::vec![1.0],
                tail: 0.0,
            };
        }
        let mode = libm::floor(q) as usize;
        let w_mode = libm::exp(-q + mode as f64 * libm::log(q) - libm::lgamma(mode as f64 + 1.0));
        let mut weights = VecDeque::from([w_mode]);
        let (mut lo, mut hi) = (mode, mode);
        let (mut w_lo, mut w_hi) = (w_mode, w_mode);
        let mut total = w_mode;
        while 1.0 - total > eps {
            let next_lo = if lo > 0 { w_lo * lo as f64 / q } else { 0.0 };
            let next_hi = w_hi * q / (hi + 1) as f64;
            if next_lo == 0.0 && next_hi == 0.0 {
                break;
            }
            if next_lo >= next_hi {
                lo -= 1;
                w_lo = next_lo;
                weights.push_front(next_lo);
                total += next_lo;
            } else {
                hi += 1;
                w_hi = next_hi;
                weights.push_back(next_hi);
                total += next_hi;
            }
        }
        Self {
            left: lo,
            weights: weights.into(),
            tail: (1.0 - total).max(0.0),
        }
    }

    pub fn right(&self) -> usize {
        self.left + self.weights.len() - 1
    }

    pub fn weight(&self, k: usize) -> f64 {
        if k < self.left {
            0.0
        } else {
            self.weights.get(k - self.left).copied().unwrap_or(0.0)
        }
    }

    /// `P(X > k)` under the truncated weights, for `k` in `0..=right`.
    pub fn survival(&self) -> Vec<f64> {
        let right = self.right();
        let mut out = alloc::vec![0.0; right + 1];
        let mut acc = 0.0;
        for k in (0..right).rev() {
            acc += self.weight(k + 1);
            out[k] = acc;
        }
        out
    }
}
