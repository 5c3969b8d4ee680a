use alloc::vec;
use alloc::vec::Vec;

use crate::sparse::RateMatrix;
use crate::{Error, Result};

/// Chains up to this size are solved by dense GTH elimination; larger ones by
/// Gauss-Seidel iteration.
pub const DIRECT_LIMIT: usize = 1000;

const MAX_SWEEPS: usize = 100_000;
/// Residual target relative to the largest exit rate.
const RELATIVE_RESIDUAL: f64 = 1e-13;

/// Stationary distribution `pi Q = 0, sum pi = 1` of an irreducible chain.
pub fn steady_state(rates: &RateMatrix) -> Result<Vec<f64>> {
    rates.check_finite()?;
    let n = rates.n();
    if n == 0 {
        return Err(Error::Singular { residual: f64::NAN });
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let pi = if n <= DIRECT_LIMIT {
        gth(rates)?
    } else {
        gauss_seidel(rates)?
    };
    let residual = max_residual(rates, &pi);
    if !(residual <= 1e-10 * rates.max_exit_rate()) {
        return Err(Error::Singular { residual });
    }
    Ok(pi)
}

fn max_residual(rates: &RateMatrix, pi: &[f64]) -> f64 {
    rates
        .left_residual(pi)
        .iter()
        .fold(0.0, |m: f64, r| m.max(libm::fabs(*r)))
}

/// Grassmann-Taksar-Heyman state reduction. Subtraction free, so accurate
/// even when rates span many orders of magnitude.
fn gth(rates: &RateMatrix) -> Result<Vec<f64>> {
    let n = rates.n();
    let mut a = rates.without_self_loops().to_dense();
    for k in (1..n).rev() {
        let s: f64 = a[k][..k].iter().sum();
        if !(s > 0.0) {
            return Err(Error::Singular { residual: f64::NAN });
        }
        let (upper, lower) = a.split_at_mut(k);
        let row_k = &lower[0];
        for row_i in upper.iter_mut() {
            let f = row_i[k] / s;
            row_i[k] = f;
            if f != 0.0 {
                for (x, &y) in row_i[..k].iter_mut().zip(&row_k[..k]) {
                    *x += f * y;
                }
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * a[i][k]).sum();
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    Ok(pi)
}

fn gauss_seidel(rates: &RateMatrix) -> Result<Vec<f64>> {
    let n = rates.n();
    let incoming = rates.without_self_loops().transpose();
    let exit = rates.exit_rates();
    if exit.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Singular { residual: f64::NAN });
    }
    let tol = RELATIVE_RESIDUAL * rates.max_exit_rate();
    let mut pi = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_SWEEPS {
        for j in 0..n {
            let inflow: f64 = incoming.row(j).map(|(i, r)| pi[i] * r).sum();
            pi[j] = inflow / exit[j];
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        residual = max_residual(rates, &pi);
        if residual <= tol {
            return Ok(pi);
        }
    }
    Err(Error::Singular { residual })
}
