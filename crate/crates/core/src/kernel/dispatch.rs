//! One monomorphized single-precision kernel per class, selected at runtime.
//! Other scalar types take the runtime-extent path.

use super::layout::Dims;
use super::real::Real;
use super::stages::{run, run_fixed, Workspace};
use crate::rys::RysNodeSet;
use crate::shell::QuartetInput;

pub type KernelFn<T> = fn(&QuartetInput, &RysNodeSet, &mut Workspace<T>) -> T;

/// Kernel with the class fixed at compile time.
pub fn kernel<T: Real, const LA: usize, const LB: usize, const LC: usize, const LD: usize>(
    q: &QuartetInput,
    r: &RysNodeSet,
    ws: &mut Workspace<T>,
) -> T {
    run_fixed::<T, LA, LB, LC, LD>(q, r, ws)
}

/// Kernel with class extents read at runtime.
pub fn kernel_runtime<T: Real>(q: &QuartetInput, r: &RysNodeSet, ws: &mut Workspace<T>) -> T {
    run(Dims::of(&q.class()), q, r, ws)
}

macro_rules! by_ld {
    ($t:ty, $a:literal, $b:literal, $c:literal) => {
        [
            kernel::<$t, $a, $b, $c, 0> as KernelFn<$t>,
            kernel::<$t, $a, $b, $c, 1>,
            kernel::<$t, $a, $b, $c, 2>,
            kernel::<$t, $a, $b, $c, 3>,
        ]
    };
}

macro_rules! by_lc {
    ($t:ty, $a:literal, $b:literal) => {
        [
            by_ld!($t, $a, $b, 0),
            by_ld!($t, $a, $b, 1),
            by_ld!($t, $a, $b, 2),
            by_ld!($t, $a, $b, 3),
        ]
    };
}

macro_rules! by_lb {
    ($t:ty, $a:literal) => {
        [
            by_lc!($t, $a, 0),
            by_lc!($t, $a, 1),
            by_lc!($t, $a, 2),
            by_lc!($t, $a, 3),
        ]
    };
}

macro_rules! table {
    ($t:ty) => {
        [by_lb!($t, 0), by_lb!($t, 1), by_lb!($t, 2), by_lb!($t, 3)]
    };
}

pub(crate) static F32_KERNELS: [[[[KernelFn<f32>; 4]; 4]; 4]; 4] = table!(f32);

/// Evaluate one quartet with the specialized kernel when available.
#[inline]
pub fn evaluate<T: Real>(q: &QuartetInput, r: &RysNodeSet, ws: &mut Workspace<T>) -> T {
    match T::specialized(&q.class()) {
        Some(f) => f(q, r, ws),
        None => kernel_runtime(q, r, ws),
    }
}
