//! Rys quadrature nodes and weights.
//!
//! The order-`n` rule integrates `∫₀¹ f(t²) e^{-T t²} dt` exactly for `f`
//! of degree `< 2n`; in `x = t²` this is the Gauss rule for the weight
//! `e^{-T x} / (2√x)` on `[0, 1]`. Its Jacobi matrix is built by the
//! modified Chebyshev algorithm from shifted-Legendre modified moments,
//! which are integrated with composite Gauss-Legendre quadrature in `t`
//! (the integrand is entire there). Nodes and weights then come from the
//! eigendecomposition of the Jacobi matrix.

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{EriError, Result};
use crate::shell::QuartetInput;

/// Highest Rys order needed for `L <= 3` shells.
pub const MAX_RYS: usize = 7;

const PANEL_POINTS: usize = 24;

/// Roots `t_μ` and weights `w_μ` for one order and argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RysNodeSet {
    order: usize,
    t: f64,
    roots: [f64; MAX_RYS],
    weights: [f64; MAX_RYS],
}

impl RysNodeSet {
    /// Build from explicit roots and weights (e.g. read from a record).
    pub fn from_parts(t: f64, roots: &[f64], weights: &[f64]) -> Result<Self> {
        let order = roots.len();
        if order == 0 || order > MAX_RYS || weights.len() != order {
            return Err(EriError::RysOrder(order));
        }
        let mut r = [0.0; MAX_RYS];
        let mut w = [0.0; MAX_RYS];
        r[..order].copy_from_slice(roots);
        w[..order].copy_from_slice(weights);
        Ok(RysNodeSet {
            order,
            t,
            roots: r,
            weights: w,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The argument `T` the rule was built for.
    pub fn argument(&self) -> f64 {
        self.t
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots[..self.order]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights[..self.order]
    }

    /// `Σ_μ w_μ t_μ^{2m}`; equals `F_m(T)` for `m < 2·order`.
    pub fn moment(&self, m: usize) -> f64 {
        self.roots()
            .iter()
            .zip(self.weights())
            .map(|(&t, &w)| w * (t * t).powi(m as i32))
            .sum()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_POINTS))
}

/// Recurrence coefficient `b_k` of the monic Legendre polynomials shifted
/// to `[0, s]` (`a_k = s/2` for all `k`).
fn legendre_b(k: usize, s: f64) -> f64 {
    let k = k as f64;
    s * s * k * k / (4.0 * (4.0 * k * k - 1.0))
}

/// Right end of the interval the Legendre basis is shifted to. Shrinking it
/// with `1/T` keeps the modified Chebyshev recursion well conditioned once
/// the weight concentrates near the origin.
fn basis_interval(t: f64) -> f64 {
    (1.0 / t).min(1.0)
}

/// `ν_k = ∫₀¹ p_k(t²) e^{-T t²} dt` for `k < 2n`.
fn modified_moments(n: usize, t: f64, s: f64, out: &mut [f64; 2 * MAX_RYS]) {
    let count = 2 * n;
    out[..count].iter_mut().for_each(|v| *v = 0.0);
    let (gx, gw) = panel_rule();
    // the weight decays on a scale of 1/sqrt(T)
    let panels = 1 + (1.5 * t.sqrt()).ceil() as usize;
    let h = 1.0 / panels as f64;
    for p in 0..panels {
        let lo = p as f64 * h;
        for (&xi, &wi) in gx.iter().zip(gw) {
            let u = lo + 0.5 * h * (xi + 1.0);
            let x = u * u;
            let wt = 0.5 * h * wi * (-t * x).exp();
            let (mut pm1, mut pk) = (0.0, 1.0);
            for k in 0..count {
                out[k] += wt * pk;
                let next = (x - 0.5 * s) * pk - if k > 0 { legendre_b(k, s) * pm1 } else { 0.0 };
                pm1 = pk;
                pk = next;
            }
        }
    }
}

/// Recurrence coefficients `(α_k, β_k)`, `k < n`, of the polynomials
/// orthogonal with respect to the measure whose modified moments are `nu`.
fn modified_chebyshev(n: usize, nu: &[f64], s: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let a = |_k: usize| 0.5 * s;
    let l_max = 2 * n;
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut sig_prev = vec![0.0; l_max + 1];
    let mut sig = nu[..l_max].to_vec();
    sig.push(0.0);
    alpha[0] = a(0) + nu[1] / nu[0];
    beta[0] = nu[0];
    for k in 1..n {
        let mut sig_next = vec![0.0; l_max + 1];
        for l in k..(l_max - k) {
            sig_next[l] =
                sig[l + 1] - (alpha[k - 1] - a(l)) * sig[l] - beta[k - 1] * sig_prev[l] + legendre_b(l, s) * sig[l - 1];
        }
        if !sig_next[k].is_finite() || sig_next[k] <= 0.0 {
            return None;
        }
        alpha[k] = a(k) + sig_next[k + 1] / sig_next[k] - sig[k] / sig[k - 1];
        beta[k] = sig_next[k] / sig[k - 1];
        sig_prev = sig;
        sig = sig_next;
    }
    Some((alpha, beta))
}

/// Rys roots and weights of order `n` (1..=7) at argument `t >= 0`.
pub fn rys_roots_weights(n: usize, t: f64) -> Result<RysNodeSet> {
    if n == 0 || n > MAX_RYS {
        return Err(EriError::RysOrder(n));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(EriError::BoysArgument(t));
    }
    let fail = || EriError::RysConvergence { order: n, t };
    let mut nu = [0.0; 2 * MAX_RYS];
    let s = basis_interval(t);
    modified_moments(n, t, s, &mut nu);
    let (alpha, beta) = modified_chebyshev(n, &nu, s).ok_or_else(fail)?;

    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jacobi[(k, k)] = alpha[k];
        if k + 1 < n {
            let off = beta[k + 1].sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::try_new(jacobi, f64::EPSILON, 10_000).ok_or_else(fail)?;

    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], beta[0] * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut roots = [0.0; MAX_RYS];
    let mut weights = [0.0; MAX_RYS];
    for (j, &(x, w)) in pairs.iter().enumerate() {
        if !(x > 0.0 && x < 1.0 && w > 0.0) {
            return Err(fail());
        }
        roots[j] = x.sqrt();
        weights[j] = w;
    }
    Ok(RysNodeSet {
        order: n,
        t,
        roots,
        weights,
    })
}

/// Gaussian-product parameters shared by the setup stage, the root
/// preparation and the oracle.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PairData {
    pub p: f64,
    pub center: [f64; 3],
}

pub(crate) fn pair(a: &crate::shell::PrimitiveShell, b: &crate::shell::PrimitiveShell) -> PairData {
    let p = a.exponent + b.exponent;
    let mut center = [0.0; 3];
    for (xi, c) in center.iter_mut().enumerate() {
        *c = (a.exponent * a.center[xi] + b.exponent * b.center[xi]) / p;
    }
    PairData { p, center }
}

/// `T = ρ |P - Q|²` with `ρ = pq / (p + q)`.
pub fn quartet_argument(q: &QuartetInput) -> f64 {
    let bra = pair(&q.shells[0], &q.shells[1]);
    let ket = pair(&q.shells[2], &q.shells[3]);
    let rho = bra.p * ket.p / (bra.p + ket.p);
    let pq2: f64 = (0..3).map(|xi| (bra.center[xi] - ket.center[xi]).powi(2)).sum();
    rho * pq2
}

/// Nodes for the quartet's own class order and argument.
pub fn prepare_quartet_rys(q: &QuartetInput) -> Result<RysNodeSet> {
    rys_roots_weights(q.class().n_rys(), quartet_argument(q))
}
