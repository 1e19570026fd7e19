//! Independent reference ERIs (McMurchie-Davidson scheme, double precision).
//!
//! Shares only the Boys function with the Rys pipeline: products of
//! Gaussians are expanded in Hermite Gaussians (two-term recurrences for the
//! expansion coefficients) and the Coulomb interaction between Hermite
//! Gaussians is built from Boys values by the usual `R_{tuv}` recursion.

use std::f64::consts::PI;

use crate::boys::boys;
use crate::error::{EriError, Result};
use crate::shell::{cartesian_components, QuartetClass, QuartetInput};

/// Oracle ERIs in the logical `[ab|cd]` order (fused `ab` fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub class: QuartetClass,
    pub values: Vec<f64>,
}

impl OracleResult {
    pub fn b_max(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

const MAX_E: usize = 7;

/// Hermite expansion coefficients `E[i][j][t]` of a 1-D Gaussian product.
struct Hermite1d {
    e: [[[f64; MAX_E]; 4]; 4],
}

impl Hermite1d {
    fn new(la: usize, lb: usize, alpha: f64, beta: f64, xa: f64, xb: f64) -> Self {
        let p = alpha + beta;
        let mu = alpha * beta / p;
        let xp = (alpha * xa + beta * xb) / p;
        let (pa, pb) = (xp - xa, xp - xb);
        let half_p = 0.5 / p;
        let mut e = [[[0.0; MAX_E]; 4]; 4];
        e[0][0][0] = (-mu * (xa - xb).powi(2)).exp();
        let step = |prev: &[f64; MAX_E], shift: f64, tmax: usize| {
            let mut next = [0.0; MAX_E];
            for t in 0..=tmax {
                let lower = if t > 0 { half_p * prev[t - 1] } else { 0.0 };
                let upper = if t + 1 < MAX_E {
                    (t + 1) as f64 * prev[t + 1]
                } else {
                    0.0
                };
                next[t] = lower + shift * prev[t] + upper;
            }
            next
        };
        for i in 0..la {
            e[i + 1][0] = step(&e[i][0], pa, i + 1);
        }
        for i in 0..=la {
            for j in 0..lb {
                e[i][j + 1] = step(&e[i][j], pb, i + j + 1);
            }
        }
        Hermite1d { e }
    }
}

/// Hermite Coulomb integrals `R_{tuv}` for `t + u + v <= l`.
struct HermiteCoulomb {
    dim: usize,
    r: Vec<f64>,
}

impl HermiteCoulomb {
    fn new(l: usize, rho: f64, pq: [f64; 3]) -> Self {
        let dim = l + 1;
        let t_arg = rho * (pq[0] * pq[0] + pq[1] * pq[1] + pq[2] * pq[2]);
        let f = boys(l, t_arg).expect("finite Boys argument");
        let idx = |n: usize, t: usize, u: usize, v: usize| ((n * dim + t) * dim + u) * dim + v;
        let mut r = vec![0.0; dim * dim * dim * dim];
        for n in (0..=l).rev() {
            let top = l - n;
            for t in 0..=top {
                for u in 0..=top - t {
                    for v in 0..=top - t - u {
                        let val = if t > 0 {
                            let lower = if t > 1 {
                                (t - 1) as f64 * r[idx(n + 1, t - 2, u, v)]
                            } else {
                                0.0
                            };
                            lower + pq[0] * r[idx(n + 1, t - 1, u, v)]
                        } else if u > 0 {
                            let lower = if u > 1 {
                                (u - 1) as f64 * r[idx(n + 1, t, u - 2, v)]
                            } else {
                                0.0
                            };
                            lower + pq[1] * r[idx(n + 1, t, u - 1, v)]
                        } else if v > 0 {
                            let lower = if v > 1 {
                                (v - 1) as f64 * r[idx(n + 1, t, u, v - 2)]
                            } else {
                                0.0
                            };
                            lower + pq[2] * r[idx(n + 1, t, u, v - 1)]
                        } else {
                            (-2.0 * rho).powi(n as i32) * f.get(n)
                        };
                        r[idx(n, t, u, v)] = val;
                    }
                }
            }
        }
        // keep only level n = 0
        let mut r0 = vec![0.0; dim * dim * dim];
        for t in 0..dim {
            for u in 0..dim {
                for v in 0..dim {
                    r0[(t * dim + u) * dim + v] = r[idx(0, t, u, v)];
                }
            }
        }
        HermiteCoulomb { dim, r: r0 }
    }

    #[inline]
    fn get(&self, t: usize, u: usize, v: usize) -> f64 {
        self.r[(t * self.dim + u) * self.dim + v]
    }
}

/// Reference ERIs of one quartet.
pub fn md_eri(q: &QuartetInput) -> OracleResult {
    let class = q.class();
    let [sa, sb, sc, sd] = q.shells;
    let [la, lb, lc, ld] = class.ls();
    let p = sa.exponent + sb.exponent;
    let qq = sc.exponent + sd.exponent;
    let rho = p * qq / (p + qq);
    let mut pq = [0.0; 3];
    for (xi, d) in pq.iter_mut().enumerate() {
        let px = (sa.exponent * sa.center[xi] + sb.exponent * sb.center[xi]) / p;
        let qx = (sc.exponent * sc.center[xi] + sd.exponent * sd.center[xi]) / qq;
        *d = px - qx;
    }
    let bra: Vec<Hermite1d> = (0..3)
        .map(|xi| Hermite1d::new(la, lb, sa.exponent, sb.exponent, sa.center[xi], sb.center[xi]))
        .collect();
    let ket: Vec<Hermite1d> = (0..3)
        .map(|xi| Hermite1d::new(lc, ld, sc.exponent, sd.exponent, sc.center[xi], sd.center[xi]))
        .collect();
    let lab = la + lb;
    let rtab = HermiteCoulomb::new(lab + lc + ld, rho, pq);

    let norm = sa.normalization() * sb.normalization() * sc.normalization() * sd.normalization();
    let prefactor = 2.0 * PI.powf(2.5) / (p * qq * (p + qq).sqrt()) * norm;

    let ca = cartesian_components(la).unwrap();
    let cb = cartesian_components(lb).unwrap();
    let cc = cartesian_components(lc).unwrap();
    let cd = cartesian_components(ld).unwrap();

    let bra_dim = lab + 1;
    let mut values = vec![0.0; class.num_eriq()];
    let mut x = vec![0.0; bra_dim * bra_dim * bra_dim];
    for (ic, c) in cc.iter().enumerate() {
        for (id, d) in cd.iter().enumerate() {
            let kmax = [c.ax + d.ax, c.ay + d.ay, c.az + d.az].map(|v| v as usize);
            // contract the ket expansion against R for every bra Hermite index
            for t in 0..=lab {
                for u in 0..=lab - t {
                    for v in 0..=lab - t - u {
                        let mut acc = 0.0;
                        for tau in 0..=kmax[0] {
                            let ex = ket[0].e[c.ax as usize][d.ax as usize][tau];
                            for nu in 0..=kmax[1] {
                                let exy = ex * ket[1].e[c.ay as usize][d.ay as usize][nu];
                                for phi in 0..=kmax[2] {
                                    let coef = exy * ket[2].e[c.az as usize][d.az as usize][phi];
                                    let sign = if (tau + nu + phi) % 2 == 0 { 1.0 } else { -1.0 };
                                    acc += sign * coef * rtab.get(t + tau, u + nu, v + phi);
                                }
                            }
                        }
                        x[(t * bra_dim + u) * bra_dim + v] = acc;
                    }
                }
            }
            for (ia, a) in ca.iter().enumerate() {
                for (ib, b) in cb.iter().enumerate() {
                    let (ex, ey, ez) = (
                        &bra[0].e[a.ax as usize][b.ax as usize],
                        &bra[1].e[a.ay as usize][b.ay as usize],
                        &bra[2].e[a.az as usize][b.az as usize],
                    );
                    let mut acc = 0.0;
                    for t in 0..=(a.ax + b.ax) as usize {
                        for u in 0..=(a.ay + b.ay) as usize {
                            let exy = ex[t] * ey[u];
                            for v in 0..=(a.az + b.az) as usize {
                                acc += exy * ez[v] * x[(t * bra_dim + u) * bra_dim + v];
                            }
                        }
                    }
                    values[class.eri_index(ia, ib, ic, id)] = prefactor * acc;
                }
            }
        }
    }
    OracleResult { class, values }
}

/// Analytic `[ss|ss]` value through `F_0`.
pub fn ssss_closed_form(q: &QuartetInput) -> Result<f64> {
    if q.class().total_l() != 0 {
        return Err(EriError::NotAllS);
    }
    let [sa, sb, sc, sd] = q.shells;
    let p = sa.exponent + sb.exponent;
    let qq = sc.exponent + sd.exponent;
    let dist2 = |x: [f64; 3], y: [f64; 3]| (0..3).map(|i| (x[i] - y[i]).powi(2)).sum::<f64>();
    let kab = (-sa.exponent * sb.exponent / p * dist2(sa.center, sb.center)).exp();
    let kcd = (-sc.exponent * sd.exponent / qq * dist2(sc.center, sd.center)).exp();
    let pc: [f64; 3] = std::array::from_fn(|i| (sa.exponent * sa.center[i] + sb.exponent * sb.center[i]) / p);
    let qc: [f64; 3] = std::array::from_fn(|i| (sc.exponent * sc.center[i] + sd.exponent * sd.center[i]) / qq);
    let t = p * qq / (p + qq) * dist2(pc, qc);
    let norm = sa.normalization() * sb.normalization() * sc.normalization() * sd.normalization();
    let f0 = boys(0, t)?.get(0);
    Ok(2.0 * PI.powf(2.5) / (p * qq * (p + qq).sqrt()) * kab * kcd * norm * f0)
}

/// Largest elementwise relative deviation of `test` from `reference`, with
/// the denominator floored at `floor_rel * max|reference|`.
pub fn max_relative_deviation(reference: &[f64], test: &[f64], floor_rel: f64) -> f64 {
    assert_eq!(reference.len(), test.len());
    let b_max = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = floor_rel * b_max;
    reference
        .iter()
        .zip(test)
        .map(|(&r, &t)| {
            let diff = (r - t).abs();
            if diff == 0.0 {
                0.0
            } else {
                diff / r.abs().max(floor)
            }
        })
        .fold(0.0, f64::max)
}

/// Comparison floor used throughout: `1e-14 · b_max`.
pub const RELATIVE_FLOOR: f64 = 1e-14;
