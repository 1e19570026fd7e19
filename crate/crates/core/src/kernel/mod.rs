//! Per-quartet ERI pipeline: setup, recurrences (VRR then HRR), quadrature.
//!
//! The stages live in [`stages`] and are written once against [`Real`];
//! [`dispatch`] instantiates them per class and scalar type.

pub mod dispatch;
pub mod layout;
pub mod real;
pub mod stages;

use std::fmt;
use std::str::FromStr;

pub use dispatch::{evaluate, kernel, kernel_runtime, KernelFn};
pub use layout::Dims;
pub use real::{Real, Stage};
pub use stages::{
    hrr_stage, initial_intermediates, quadrature_stage, setup_stage, vrr_stage, Origins, SetupArrays, Workspace,
};

use crate::error::{EriError, Result};
use crate::rys::{prepare_quartet_rys, RysNodeSet};
use crate::shell::{QuartetClass, QuartetInput};

/// Arithmetic precision of the post-root stages.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PrecisionMode {
    #[default]
    Single,
    Double,
}

impl fmt::Display for PrecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrecisionMode::Single => "single",
            PrecisionMode::Double => "double",
        })
    }
}

impl FromStr for PrecisionMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "single" | "f32" => Ok(PrecisionMode::Single),
            "double" | "f64" => Ok(PrecisionMode::Double),
            _ => Err(format!("unknown precision {s:?} (expected single or double)")),
        }
    }
}

/// Final intermediates `I(i,j,k,l,μ,ξ)` for `i ≤ La, j ≤ Lb, k ≤ Lc, l ≤ Ld`.
#[derive(Clone, Debug)]
pub struct IntermediateTensor<T> {
    pub dims: Dims,
    pub data: Vec<T>,
}

impl<T: Real> IntermediateTensor<T> {
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize, mu: usize, xi: usize) -> T {
        self.data[self.dims.tensor_index(i, j, k, l, mu, xi)]
    }

    pub fn logical_len(&self) -> usize {
        self.dims.tensor_logical_len()
    }
}

/// Run setup and both recurrence stages only.
pub fn intermediate_tensor<T: Real>(q: &QuartetInput, r: &RysNodeSet) -> IntermediateTensor<T> {
    let dims = Dims::of(&q.class());
    let s = setup_stage::<T>(q, r);
    let o = initial_intermediates(&s);
    let mut slab = vec![T::zero(); dims.slab_len()];
    let mut data = vec![T::zero(); dims.tensor_len()];
    vrr_stage(&dims, &s, &o, &mut slab);
    hrr_stage(&dims, &s, &slab, &mut data);
    IntermediateTensor { dims, data }
}

/// ERIs of one quartet in the padded `ab`-fastest layout, stored as `f64`
/// whatever the precision they were computed in.
#[derive(Clone, Debug, PartialEq)]
pub struct QuartetERIs {
    pub class: QuartetClass,
    pub mode: PrecisionMode,
    pub b_max: f64,
    values: Vec<f64>,
}

impl QuartetERIs {
    /// Wrap values given in padded layout.
    pub fn from_padded(class: QuartetClass, mode: PrecisionMode, values: Vec<f64>) -> Self {
        let d = Dims::of(&class);
        assert_eq!(values.len(), d.eri_len());
        let b_max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        QuartetERIs {
            class,
            mode,
            b_max,
            values,
        }
    }

    /// Wrap values given in logical order (`ab` fastest, unpadded).
    pub fn from_logical(class: QuartetClass, mode: PrecisionMode, logical: &[f64]) -> Self {
        let d = Dims::of(&class);
        assert_eq!(logical.len(), d.num_eriq());
        let n_ab = d.n_ga * d.n_gb;
        let mut values = vec![0.0; d.eri_len()];
        for (cd, row) in logical.chunks(n_ab).enumerate() {
            values[cd * d.p_ab..cd * d.p_ab + n_ab].copy_from_slice(row);
        }
        Self::from_padded(class, mode, values)
    }

    pub fn len(&self) -> usize {
        self.class.num_eriq()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn padded(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.values[Dims::of(&self.class).eri_index(a, b, c, d)]
    }

    /// Values in logical order, padding removed.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        let d = Dims::of(&self.class);
        let n_ab = d.n_ga * d.n_gb;
        self.values
            .chunks(d.p_ab)
            .flat_map(move |row| row[..n_ab].iter().copied())
    }

    pub fn to_logical(&self) -> Vec<f64> {
        self.iter().collect()
    }
}

/// Reusable scratch for both precisions.
#[derive(Default)]
pub struct Evaluator {
    single: Option<Workspace<f32>>,
    double: Option<Workspace<f64>>,
}

impl Evaluator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Evaluate into `out` (padded layout, resized to fit); returns `b_max`.
    pub fn compute_into(
        &mut self,
        q: &QuartetInput,
        r: &RysNodeSet,
        mode: PrecisionMode,
        out: &mut Vec<f64>,
    ) -> Result<f64> {
        let class = q.class();
        if r.order() != class.n_rys() {
            return Err(EriError::NodeOrder {
                expected: class.n_rys(),
                found: r.order(),
            });
        }
        let d = Dims::of(&class);
        out.clear();
        let b_max = match mode {
            PrecisionMode::Single => {
                let ws = self.single.get_or_insert_with(Workspace::new);
                let b = evaluate(q, r, ws);
                out.extend(ws.eris()[..d.eri_len()].iter().map(|&v| v as f64));
                b as f64
            }
            PrecisionMode::Double => {
                let ws = self.double.get_or_insert_with(Workspace::new);
                let b = evaluate(q, r, ws);
                out.extend_from_slice(&ws.eris()[..d.eri_len()]);
                b
            }
        };
        if !b_max.is_finite() {
            let n_ab = d.n_ga * d.n_gb;
            let bad = (0..d.num_eriq())
                .find(|&i| !out[(i / n_ab) * d.p_ab + i % n_ab].is_finite())
                .unwrap_or(0);
            return Err(EriError::NonFinite(bad));
        }
        // padding slots are never written by the kernel
        let n_ab = d.n_ga * d.n_gb;
        if n_ab < d.p_ab {
            for row in out.chunks_mut(d.p_ab) {
                row[n_ab..].fill(0.0);
            }
        }
        Ok(b_max)
    }

    pub fn compute(&mut self, q: &QuartetInput, r: &RysNodeSet, mode: PrecisionMode) -> Result<QuartetERIs> {
        let mut values = Vec::new();
        let b_max = self.compute_into(q, r, mode, &mut values)?;
        Ok(QuartetERIs {
            class: q.class(),
            mode,
            b_max,
            values,
        })
    }
}

/// Roots in double precision, then the full pipeline in `mode`.
pub fn compute_quartet(q: &QuartetInput, mode: PrecisionMode) -> Result<QuartetERIs> {
    let r = prepare_quartet_rys(q)?;
    compute_quartet_with_nodes(q, &r, mode)
}

/// Pipeline with caller-supplied roots and weights.
pub fn compute_quartet_with_nodes(q: &QuartetInput, r: &RysNodeSet, mode: PrecisionMode) -> Result<QuartetERIs> {
    Evaluator::new().compute(q, r, mode)
}

#[cfg(test)]
mod tests;
