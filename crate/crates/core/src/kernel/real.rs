use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use super::dispatch::KernelFn;
use crate::shell::QuartetClass;

/// Pipeline stage, used by instrumented scalars to attribute operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    Setup,
    Recurrence,
    Quadrature,
    Compress,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Setup, Stage::Recurrence, Stage::Quadrature, Stage::Compress];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Stage::Setup => "setup",
            Stage::Recurrence => "recurrence",
            Stage::Quadrature => "quadrature",
            Stage::Compress => "compress",
        }
    }
}

/// Scalar type the kernel stages are written against.
pub trait Real:
    Copy
    + Debug
    + Default
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    /// Nearest integer, ties away from zero.
    fn round(self) -> Self;

    #[inline(always)]
    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    #[inline(always)]
    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Hook called at the start of every stage.
    #[inline(always)]
    fn enter_stage(_stage: Stage) {}

    /// Class-specialized kernel, if one was compiled for this scalar.
    #[inline(always)]
    fn specialized(_class: &QuartetClass) -> Option<KernelFn<Self>> {
        None
    }
}

macro_rules! impl_real {
    ($t:ty $(, $table:path)?) => {
        impl Real for $t {
            #[inline(always)]
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            #[inline(always)]
            fn to_f64(self) -> f64 {
                self as f64
            }
            #[inline(always)]
            fn abs(self) -> Self {
                <$t>::abs(self)
            }
            #[inline(always)]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline(always)]
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            #[inline(always)]
            fn round(self) -> Self {
                <$t>::round(self)
            }
            $(
                #[inline(always)]
                fn specialized(class: &QuartetClass) -> Option<KernelFn<Self>> {
                    let [a, b, c, d] = class.ls();
                    Some($table[a][b][c][d])
                }
            )?
        }
    };
}

impl_real!(f32, super::dispatch::F32_KERNELS);
impl_real!(f64);
