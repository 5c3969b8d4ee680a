use alloc::vec;
use alloc::vec::Vec;

use super::poisson::PoissonWeights;
use crate::sparse::RateMatrix;
use crate::{Error, Result};

/// Occupation vector and its total mass.
type Occupation = (Vec<f64>, f64);

/// Default bound on the dropped Poisson mass.
pub const DEFAULT_EPSILON: f64 = 1e-10;

/// Uniformization constant as a multiple of the largest exit rate.
const UNIFORMIZATION_FACTOR: f64 = 1.02;

/// Largest `Lambda * h` handled in one uniformization step; longer horizons
/// are chained over equal sub-intervals.
const MAX_STEP_RATE: f64 = 400.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TransientResult {
    pub time: f64,
    pub distribution: Vec<f64>,
    /// Upper bound on the probability mass lost to truncation.
    pub error_bound: f64,
}

/// `P = I + Q / Lambda`, stored as a diagonal plus scaled off-diagonal rows.
struct Uniformized {
    lambda: f64,
    diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    probs: Vec<f64>,
}

impl Uniformized {
    fn new(rates: &RateMatrix) -> Self {
        let n = rates.n();
        let lambda = UNIFORMIZATION_FACTOR * rates.max_exit_rate();
        let mut diag = Vec::with_capacity(n);
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(rates.nnz());
        let mut probs = Vec::with_capacity(rates.nnz());
        row_ptr.push(0);
        for i in 0..n {
            let mut exit = 0.0;
            for (j, r) in rates.row(i) {
                if j != i {
                    exit += r;
                    cols.push(j);
                    probs.push(r / lambda);
                }
            }
            diag.push(1.0 - exit / lambda);
            row_ptr.push(cols.len());
        }
        Self {
            lambda,
            diag,
            row_ptr,
            cols,
            probs,
        }
    }

    /// `out = v P`.
    fn step(&self, v: &[f64], out: &mut [f64]) {
        for (o, (x, d)) in out.iter_mut().zip(v.iter().zip(&self.diag)) {
            *o = x * d;
        }
        for (i, &x) in v.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                out[self.cols[k]] += x * self.probs[k];
            }
        }
    }

    /// Advances `v` by `h`. Optionally adds `int_0^h pi(s) ds` into
    /// `integral`. Returns the lost mass and the integral's error bound.
    fn advance(
        &self,
        v: &mut Vec<f64>,
        h: f64,
        eps: f64,
        mut integral: Option<&mut [f64]>,
    ) -> (f64, f64) {
        let q = self.lambda * h;
        let w = PoissonWeights::new(q, eps);
        let survival = integral.as_ref().map(|_| w.survival());
        let n = v.len();
        let mut result = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut covered = 0.0;
        for k in 0..=w.right() {
            let wk = w.weight(k);
            if wk != 0.0 {
                for (r, x) in result.iter_mut().zip(v.iter()) {
                    *r += wk * x;
                }
            }
            if let (Some(acc), Some(s)) = (integral.as_deref_mut(), survival.as_ref()) {
                let c = s[k] / self.lambda;
                covered += s[k];
                if c != 0.0 {
                    for (a, x) in acc.iter_mut().zip(v.iter()) {
                        *a += c * x;
                    }
                }
            }
            if k < w.right() {
                self.step(v, &mut next);
                core::mem::swap(v, &mut next);
            }
        }
        *v = result;
        // sum_k P(X > k) = q exactly, so the shortfall bounds the truncation.
        let int_err = if integral.is_some() {
            (q - covered).max(0.0) / self.lambda
        } else {
            0.0
        };
        (w.tail, int_err)
    }
}

fn check_inputs(rates: &RateMatrix, t: f64, init: &[f64], eps: f64) -> Result<()> {
    rates.check_finite()?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidTolerance(eps));
    }
    let sum: f64 = init.iter().sum();
    if init.len() != rates.n()
        || init.iter().any(|p| !(p.is_finite() && *p >= 0.0))
        || (sum - 1.0).abs() > 1e-9
    {
        return Err(Error::NotADistribution);
    }
    Ok(())
}

/// Shared driver: distribution at `t`, and optionally the expected occupation
/// `int_0^t pi(s) ds`.
fn run(
    rates: &RateMatrix,
    t: f64,
    init: &[f64],
    eps: f64,
    with_integral: bool,
) -> Result<(TransientResult, Option<Occupation>)> {
    check_inputs(rates, t, init, eps)?;
    let n = rates.n();
    let mut v = init.to_vec();
    let mut integral = with_integral.then(|| vec![0.0; n]);
    if t == 0.0 || rates.max_exit_rate() == 0.0 {
        // Nothing moves: pi(s) = init throughout.
        if let Some(acc) = integral.as_mut() {
            for (a, p) in acc.iter_mut().zip(init) {
                *a = p * t;
            }
        }
        return Ok((
            TransientResult {
                time: t,
                distribution: v,
                error_bound: 0.0,
            },
            integral.map(|i| (i, 0.0)),
        ));
    }
    let u = Uniformized::new(rates);
    let steps = libm::ceil(u.lambda * t / MAX_STEP_RATE).max(1.0) as usize;
    let h = t / steps as f64;
    let step_eps = eps / steps as f64;
    let (mut err, mut int_err) = (0.0, 0.0);
    let mut piece = with_integral.then(|| vec![0.0; n]);
    for _ in 0..steps {
        if let Some(p) = piece.as_mut() {
            p.iter_mut().for_each(|x| *x = 0.0);
        }
        let (e, ie) = u.advance(&mut v, h, step_eps, piece.as_deref_mut());
        err += e;
        int_err += ie;
        if let (Some(acc), Some(p)) = (integral.as_mut(), piece.as_ref()) {
            for (a, x) in acc.iter_mut().zip(p) {
                *a += x;
            }
        }
    }
    Ok((
        TransientResult {
            time: t,
            distribution: v,
            error_bound: err,
        },
        integral.map(|i| (i, int_err)),
    ))
}

/// `pi(t) = init * exp(Q t)` by uniformization.
///
/// Self-loops in `rates` do not enter the generator. The dropped Poisson mass
/// is at most `eps` and is reported as the error bound.
pub fn transient(rates: &RateMatrix, t: f64, init: &[f64], eps: f64) -> Result<TransientResult> {
    run(rates, t, init, eps, false).map(|(r, _)| r)
}

/// Like [`transient`], also returning the expected time spent in each state
/// over `[0, t]` and an absolute error bound on that vector (in time units).
pub fn transient_with_occupation(
    rates: &RateMatrix,
    t: f64,
    init: &[f64],
    eps: f64,
) -> Result<(TransientResult, Vec<f64>, f64)> {
    let (r, occ) = run(rates, t, init, eps, true)?;
    let (occ, err) = occ.expect("integral requested");
    Ok((r, occ, err))
}
