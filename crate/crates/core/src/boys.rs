//! Boys function `F_m(T) = ∫₀¹ u^{2m} exp(-T u²) du`.
//!
//! For moderate `T` the highest order is summed from the convergent
//! series `F_m(T) = e^{-T} Σ_k (2T)^k / ((2m+1)(2m+3)…(2m+2k+1))` and the
//! lower orders follow by downward recursion (all terms positive). For large
//! `T` the closed form of `F_0` is recursed upward, which is stable once
//! `2T` exceeds `2m+1` by a wide margin.

use crate::error::{EriError, Result};

/// Largest order served by [`boys`].
pub const MAX_BOYS_ORDER: usize = 28;

const SERIES_EPS: f64 = 1e-17;

/// `F_0..=F_{m_max}` at one argument.
#[derive(Clone, Debug, PartialEq)]
pub struct BoysTable {
    pub t: f64,
    pub values: Vec<f64>,
}

impl BoysTable {
    pub fn get(&self, m: usize) -> f64 {
        self.values[m]
    }

    pub fn m_max(&self) -> usize {
        self.values.len() - 1
    }
}

/// Evaluate `F_0(T)..=F_{m_max}(T)`.
pub fn boys(m_max: usize, t: f64) -> Result<BoysTable> {
    if m_max > MAX_BOYS_ORDER {
        return Err(EriError::BoysOrder(m_max));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(EriError::BoysArgument(t));
    }
    let mut values = vec![0.0; m_max + 1];
    boys_into(&mut values, t);
    Ok(BoysTable { t, values })
}

/// Fill `out[m] = F_m(t)` for `m < out.len()`. `t` must be non-negative.
pub(crate) fn boys_into(out: &mut [f64], t: f64) {
    let m_max = out.len() - 1;
    if t == 0.0 {
        for (m, f) in out.iter_mut().enumerate() {
            *f = 1.0 / (2 * m + 1) as f64;
        }
        return;
    }
    if t < 2.0 * m_max as f64 + 40.0 {
        series_downward(out, t);
    } else {
        upward(out, t);
    }
}

fn series_downward(out: &mut [f64], t: f64) {
    let m_max = out.len() - 1;
    let exp_t = (-t).exp();
    let mut term = 1.0 / (2 * m_max + 1) as f64;
    let mut sum = term;
    let mut denom = (2 * m_max + 1) as f64;
    loop {
        denom += 2.0;
        term *= 2.0 * t / denom;
        sum += term;
        if term < SERIES_EPS * sum {
            break;
        }
    }
    out[m_max] = exp_t * sum;
    for m in (0..m_max).rev() {
        out[m] = (2.0 * t * out[m + 1] + exp_t) / (2 * m + 1) as f64;
    }
}

fn upward(out: &mut [f64], t: f64) {
    // erf(sqrt(T)) == 1 to double precision for T >= 40
    let exp_t = (-t).exp();
    out[0] = 0.5 * (std::f64::consts::PI / t).sqrt();
    let inv_2t = 0.5 / t;
    for m in 0..out.len() - 1 {
        out[m + 1] = ((2 * m + 1) as f64 * out[m] - exp_t) * inv_2t;
    }
}
