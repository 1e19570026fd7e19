//! The four stages of the per-quartet pipeline, written against runtime
//! extents and inlined into every class-specialized kernel.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::layout::{Dims, COMPONENTS};
use super::real::{Real, Stage};
use crate::rys::{RysNodeSet, MAX_RYS};
use crate::shell::QuartetInput;

/// Auxiliary arrays of the setup stage plus the geometry the later stages use.
#[derive(Clone, Copy, Debug)]
pub struct SetupArrays<T> {
    pub n_rys: usize,
    /// Rows `B1, B2, B3` (`B00, B10, B01` in Dupuis-King-Rys notation).
    pub b: [[T; MAX_RYS]; 3],
    /// Rows `C_x, C_y, C_z, C_2x, C_2y, C_2z` (`C00` then `C'00`).
    pub c: [[T; MAX_RYS]; 6],
    pub weights: [T; MAX_RYS],
    /// `2π^{5/2}/(pq√(p+q)) · K_AB · K_CD · N_a N_b N_c N_d`.
    pub prefactor: T,
    /// `R_A - R_B` and `R_C - R_D`.
    pub ab: [T; 3],
    pub cd: [T; 3],
}

/// Origins `I(0,0,0,0,μ,ξ)`, indexed `[ξ][μ]`.
pub type Origins<T> = [[T; MAX_RYS]; 3];

#[inline(always)]
pub fn setup_stage<T: Real>(q: &QuartetInput, r: &RysNodeSet) -> SetupArrays<T> {
    let [sa, sb, sc, sd] = q.shells;
    let v = |x: [f64; 3]| x.map(T::from_f64);
    let (ra, rb, rc, rd) = (v(sa.center), v(sb.center), v(sc.center), v(sd.center));
    let (a, b, c, d) = (
        T::from_f64(sa.exponent),
        T::from_f64(sb.exponent),
        T::from_f64(sc.exponent),
        T::from_f64(sd.exponent),
    );
    let norm = [sa, sb, sc, sd].map(|s| T::from_f64(s.normalization()));

    let p = a + b;
    let qq = c + d;
    let inv_p = T::one() / p;
    let inv_q = T::one() / qq;
    let two_p = T::from_f64(2.0) * p;
    let two_q = T::from_f64(2.0) * qq;

    // P - A = -(b/p)(A - B), likewise for Q - C
    let b_p = b * inv_p;
    let d_q = d * inv_q;
    let mut ab = [T::zero(); 3];
    let mut cd = [T::zero(); 3];
    let mut pa = [T::zero(); 3];
    let mut qc = [T::zero(); 3];
    let mut pq = [T::zero(); 3];
    for xi in 0..3 {
        ab[xi] = ra[xi] - rb[xi];
        cd[xi] = rc[xi] - rd[xi];
        pa[xi] = -(b_p * ab[xi]);
        qc[xi] = -(d_q * cd[xi]);
        pq[xi] = (ra[xi] + pa[xi]) - (rc[xi] + qc[xi]);
    }
    let ab2 = ab[0] * ab[0] + ab[1] * ab[1] + ab[2] * ab[2];
    let cd2 = cd[0] * cd[0] + cd[1] * cd[1] + cd[2] * cd[2];
    let k_ab = (-(a * b_p * ab2)).exp();
    let k_cd = (-(c * d_q * cd2)).exp();
    let ppq = p + qq;
    let inv_ppq = T::one() / ppq;
    let prefactor = T::from_f64(2.0 * PI.powf(2.5)) / (p * qq * ppq.sqrt())
        * (k_ab * k_cd)
        * (norm[0] * norm[1] * norm[2] * norm[3]);

    let n = r.order();
    let mut s = SetupArrays {
        n_rys: n,
        b: [[T::zero(); MAX_RYS]; 3],
        c: [[T::zero(); MAX_RYS]; 6],
        weights: [T::zero(); MAX_RYS],
        prefactor,
        ab,
        cd,
    };
    let half = T::from_f64(0.5);
    for mu in 0..n {
        let t = T::from_f64(r.roots()[mu]);
        s.weights[mu] = T::from_f64(r.weights()[mu]);
        let f = t * t * inv_ppq;
        let qf = qq * f;
        let pf = p * f;
        s.b[0][mu] = half * f;
        s.b[1][mu] = (T::one() - qf) / two_p;
        s.b[2][mu] = (T::one() - pf) / two_q;
        for xi in 0..3 {
            s.c[xi][mu] = pa[xi] - qf * pq[xi];
            s.c[3 + xi][mu] = qc[xi] + pf * pq[xi];
        }
    }
    s
}

/// Origins: 1 on the x and y axes, the quartet prefactor on z.
#[inline(always)]
pub fn initial_intermediates<T: Real>(s: &SetupArrays<T>) -> Origins<T> {
    let mut o = [[T::zero(); MAX_RYS]; 3];
    for mu in 0..s.n_rys {
        o[0][mu] = T::one();
        o[1][mu] = T::one();
        o[2][mu] = s.prefactor;
    }
    o
}

/// Fill the `I(i,0,k,0)` slab for `i ≤ La+Lb`, `k ≤ Lc+Ld`.
pub fn vrr_stage<T: Real>(d: &Dims, s: &SetupArrays<T>, o: &Origins<T>, slab: &mut [T]) {
    for xi in 0..3 {
        for mu in 0..d.n_rys {
            vrr_lane(d, s, o[xi][mu], xi, mu, slab);
        }
    }
}

/// Build `j` then `l` from the slab and store the reduced final tensor.
pub fn hrr_stage<T: Real>(d: &Dims, s: &SetupArrays<T>, slab: &[T], tensor: &mut [T]) {
    for xi in 0..3 {
        for mu in 0..d.n_rys {
            hrr_lane(d, s, slab, xi, mu, tensor);
        }
    }
}

/// VRR for one `(μ, ξ)` lane.
#[inline(always)]
fn vrr_lane<T: Real>(d: &Dims, s: &SetupArrays<T>, origin: T, xi: usize, mu: usize, slab: &mut [T]) {
    let imax = d.la + d.lb;
    let kmax = d.lc + d.ld;
    let (b00, b10, b01) = (s.b[0][mu], s.b[1][mu], s.b[2][mu]);
    let (c00, c2) = (s.c[xi][mu], s.c[3 + xi][mu]);
    let at = |i: usize, k: usize| d.slab_index(i, k, mu, xi);
    slab[at(0, 0)] = origin;
    // k = 0 column
    for i in 0..imax {
        let mut v = c00 * slab[at(i, 0)];
        if i > 0 {
            v += T::from_f64(i as f64) * b10 * slab[at(i - 1, 0)];
        }
        slab[at(i + 1, 0)] = v;
    }
    for k in 0..kmax {
        for i in 0..=imax {
            let mut v = c2 * slab[at(i, k)];
            if k > 0 {
                v += T::from_f64(k as f64) * b01 * slab[at(i, k - 1)];
            }
            if i > 0 {
                v += T::from_f64(i as f64) * b00 * slab[at(i - 1, k)];
            }
            slab[at(i, k + 1)] = v;
        }
    }
}

const W_I: usize = 7;
const W_J: usize = 4;
const W_K: usize = 7;
const W_L: usize = 4;

#[inline(always)]
const fn w_index(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((l * W_K + k) * W_J + j) * W_I + i
}

/// HRR for one `(μ, ξ)` lane, through a register-sized work buffer.
#[inline(always)]
fn hrr_lane<T: Real>(d: &Dims, s: &SetupArrays<T>, slab: &[T], xi: usize, mu: usize, tensor: &mut [T]) {
    let imax = d.la + d.lb;
    let kmax = d.lc + d.ld;
    let (ab, cd) = (s.ab[xi], s.cd[xi]);
    let mut w = [T::zero(); W_I * W_J * W_K * W_L];
    for k in 0..=kmax {
        for i in 0..=imax {
            w[w_index(i, 0, k, 0)] = slab[d.slab_index(i, k, mu, xi)];
        }
    }
    for k in 0..=kmax {
        for j in 1..=d.lb {
            for i in 0..=imax - j {
                w[w_index(i, j, k, 0)] = w[w_index(i + 1, j - 1, k, 0)] + ab * w[w_index(i, j - 1, k, 0)];
            }
        }
    }
    for l in 1..=d.ld {
        for k in 0..=kmax - l {
            for j in 0..=d.lb {
                for i in 0..=d.la {
                    w[w_index(i, j, k, l)] = w[w_index(i, j, k + 1, l - 1)] + cd * w[w_index(i, j, k, l - 1)];
                }
            }
        }
    }
    for l in 0..=d.ld {
        for k in 0..=d.lc {
            for j in 0..=d.lb {
                for i in 0..=d.la {
                    tensor[d.tensor_index(i, j, k, l, mu, xi)] = w[w_index(i, j, k, l)];
                }
            }
        }
    }
}

/// Both recurrences for one lane with the class fixed at compile time.
#[inline(never)]
fn rr_lane_fixed<T: Real, const LA: usize, const LB: usize, const LC: usize, const LD: usize>(
    s: &SetupArrays<T>,
    origin: T,
    xi: usize,
    mu: usize,
    slab: &mut [T],
    tensor: &mut [T],
) {
    let d = Dims::new(LA, LB, LC, LD);
    vrr_lane(&d, s, origin, xi, mu, slab);
    hrr_lane(&d, s, slab, xi, mu, tensor);
}

/// Flattened quadrature loop of one class: for each ERI its output slot and
/// the offsets of its x, y and z intermediates (`μ = 0`).
struct QuadPlan {
    entries: Vec<[u32; 4]>,
}

static PLANS: [OnceLock<QuadPlan>; 256] = [const { OnceLock::new() }; 256];

#[inline(always)]
const fn wz_index(d: &Dims, i: usize, j: usize, k: usize, l: usize) -> usize {
    (((l * d.pk + k) * d.pj + j) * d.pi + i) * d.p_mu
}

fn quad_plan(d: &Dims) -> &'static QuadPlan {
    PLANS[((d.la * 4 + d.lb) * 4 + d.lc) * 4 + d.ld].get_or_init(|| {
        let mut entries = Vec::with_capacity(d.num_eriq());
        for (ic, c) in COMPONENTS[d.lc].iter().enumerate() {
            for (id, dd) in COMPONENTS[d.ld].iter().enumerate() {
                for (ia, a) in COMPONENTS[d.la].iter().enumerate() {
                    for (ib, b) in COMPONENTS[d.lb].iter().enumerate() {
                        entries.push(
                            [
                                d.eri_index(ia, ib, ic, id),
                                d.tensor_index(a[0], b[0], c[0], dd[0], 0, 0),
                                d.tensor_index(a[1], b[1], c[1], dd[1], 0, 1),
                                wz_index(d, a[2], b[2], c[2], dd[2]),
                            ]
                            .map(|v| v as u32),
                        );
                    }
                }
            }
        }
        QuadPlan { entries }
    })
}

/// `[ab|cd] = Σ_μ w_μ Π_ξ I(a_ξ, b_ξ, c_ξ, d_ξ, μ, ξ)` into the padded
/// `ab`-fastest layout; returns `b_max`.
///
/// The weight is applied once per z-axis entry (`wz`) rather than once per ERI.
pub fn quadrature_stage<T: Real>(d: &Dims, s: &SetupArrays<T>, tensor: &[T], wz: &mut [T], eris: &mut [T]) -> T {
    quadrature_with::<T, 0>(d, s, tensor, wz, eris)
}

/// Quadrature with the root count fixed at compile time.
#[inline(never)]
fn quadrature_fixed<T: Real>(d: &Dims, s: &SetupArrays<T>, tensor: &[T], wz: &mut [T], eris: &mut [T]) -> T {
    match d.n_rys {
        1 => quadrature_with::<T, 1>(d, s, tensor, wz, eris),
        2 => quadrature_with::<T, 2>(d, s, tensor, wz, eris),
        3 => quadrature_with::<T, 3>(d, s, tensor, wz, eris),
        4 => quadrature_with::<T, 4>(d, s, tensor, wz, eris),
        5 => quadrature_with::<T, 5>(d, s, tensor, wz, eris),
        6 => quadrature_with::<T, 6>(d, s, tensor, wz, eris),
        _ => quadrature_with::<T, 7>(d, s, tensor, wz, eris),
    }
}

/// `NR = 0` reads the root count from `d`.
#[inline(always)]
fn quadrature_with<T: Real, const NR: usize>(
    d: &Dims,
    s: &SetupArrays<T>,
    tensor: &[T],
    wz: &mut [T],
    eris: &mut [T],
) -> T {
    let nr = if NR == 0 { d.n_rys } else { NR };
    for l in 0..=d.ld {
        for k in 0..=d.lc {
            for j in 0..=d.lb {
                for i in 0..=d.la {
                    let base = wz_index(d, i, j, k, l);
                    let src = d.tensor_index(i, j, k, l, 0, 2);
                    for mu in 0..nr {
                        wz[base + mu] = s.weights[mu] * tensor[src + mu];
                    }
                }
            }
        }
    }
    let mut b_max = T::zero();
    for e in &quad_plan(d).entries {
        let [out, ox, oy, oz] = e.map(|v| v as usize);
        let (x, y, z) = (&tensor[ox..ox + nr], &tensor[oy..oy + nr], &wz[oz..oz + nr]);
        let mut acc = x[0] * y[0] * z[0];
        for mu in 1..nr {
            acc += x[mu] * y[mu] * z[mu];
        }
        eris[out] = acc;
        let m = acc.abs();
        if m > b_max {
            b_max = m;
        }
    }
    b_max
}

/// Scratch buffers for one kernel invocation; reusable across quartets.
#[derive(Clone, Debug)]
pub struct Workspace<T> {
    pub(crate) slab: Vec<T>,
    pub(crate) tensor: Vec<T>,
    pub(crate) wz: Vec<T>,
    pub(crate) eris: Vec<T>,
}

impl<T: Real> Workspace<T> {
    pub fn new() -> Self {
        let m = super::layout::MAX_DIMS;
        Workspace {
            slab: vec![T::zero(); m.slab_len()],
            tensor: vec![T::zero(); m.tensor_len()],
            wz: vec![T::zero(); m.tensor_len() / 4],
            eris: vec![T::zero(); m.eri_len()],
        }
    }

    /// ERIs of the last evaluation in padded layout (`Dims::eri_len` entries used).
    pub fn eris(&self) -> &[T] {
        &self.eris
    }

    pub fn tensor(&self) -> &[T] {
        &self.tensor
    }

    pub fn slab(&self) -> &[T] {
        &self.slab
    }
}

impl<T: Real> Default for Workspace<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// All four stages for one quartet; ERIs land in `ws.eris`, `b_max` is returned.
pub(crate) fn run<T: Real>(d: Dims, q: &QuartetInput, r: &RysNodeSet, ws: &mut Workspace<T>) -> T {
    T::enter_stage(Stage::Setup);
    let s = setup_stage::<T>(q, r);
    T::enter_stage(Stage::Recurrence);
    let o = initial_intermediates(&s);
    vrr_stage(&d, &s, &o, &mut ws.slab);
    hrr_stage(&d, &s, &ws.slab, &mut ws.tensor);
    T::enter_stage(Stage::Quadrature);
    quadrature_stage(&d, &s, &ws.tensor, &mut ws.wz, &mut ws.eris)
}

/// [`run`] with the recurrence lanes and the quadrature specialized.
#[inline(always)]
pub(crate) fn run_fixed<T: Real, const LA: usize, const LB: usize, const LC: usize, const LD: usize>(
    q: &QuartetInput,
    r: &RysNodeSet,
    ws: &mut Workspace<T>,
) -> T {
    let d = Dims::new(LA, LB, LC, LD);
    T::enter_stage(Stage::Setup);
    let s = setup_stage::<T>(q, r);
    T::enter_stage(Stage::Recurrence);
    let o = initial_intermediates(&s);
    for xi in 0..3 {
        for mu in 0..d.n_rys {
            rr_lane_fixed::<T, LA, LB, LC, LD>(&s, o[xi][mu], xi, mu, &mut ws.slab, &mut ws.tensor);
        }
    }
    T::enter_stage(Stage::Quadrature);
    quadrature_fixed(&d, &s, &ws.tensor, &mut ws.wz, &mut ws.eris)
}
