//! Floating-point operation counts per stage, measured by running the
//! runtime-extent kernel on an instrumented scalar.

use std::cell::{Cell, RefCell};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::compress::{epsilon_raw, quantize_with, BitWidth};
use crate::error::Result;
use crate::kernel::{kernel_runtime, Dims, Real, Stage, Workspace};
use crate::rys::prepare_quartet_rys;
use crate::shell::{PrimitiveShell, QuartetClass, QuartetInput};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageFlops {
    /// Additions and subtractions.
    pub add: u64,
    pub mul: u64,
    pub div: u64,
    /// `exp`, `sqrt` and rounding; not part of the flop total.
    pub other: u64,
}

impl StageFlops {
    pub fn flops(&self) -> u64 {
        self.add + self.mul + self.div
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlopCounts {
    pub stages: [StageFlops; 4],
}

impl FlopCounts {
    pub fn stage(&self, s: Stage) -> StageFlops {
        self.stages[s.index()]
    }

    pub fn total(&self) -> u64 {
        self.stages.iter().map(StageFlops::flops).sum()
    }
}

impl fmt::Display for FlopCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in Stage::ALL {
            let c = self.stage(s);
            writeln!(
                f,
                "{:<11} add {:>7} mul {:>7} div {:>4} other {:>4} flops {:>7}",
                s.name(),
                c.add,
                c.mul,
                c.div,
                c.other,
                c.flops()
            )?;
        }
        write!(f, "{:<11} {:>58}", "total", self.total())
    }
}

thread_local! {
    static STAGE: Cell<Stage> = const { Cell::new(Stage::Setup) };
    static COUNTS: RefCell<FlopCounts> = RefCell::new(FlopCounts::default());
}

#[derive(Clone, Copy)]
enum Op {
    Add,
    Mul,
    Div,
    Other,
}

fn tally(op: Op) {
    let s = STAGE.with(Cell::get).index();
    COUNTS.with(|c| {
        let st = &mut c.borrow_mut().stages[s];
        match op {
            Op::Add => st.add += 1,
            Op::Mul => st.mul += 1,
            Op::Div => st.div += 1,
            Op::Other => st.other += 1,
        }
    });
}

/// Double-precision scalar that records every arithmetic operation against
/// the current stage of the calling thread.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Counted(pub f64);

impl Add for Counted {
    type Output = Counted;
    fn add(self, o: Counted) -> Counted {
        tally(Op::Add);
        Counted(self.0 + o.0)
    }
}

impl Sub for Counted {
    type Output = Counted;
    fn sub(self, o: Counted) -> Counted {
        tally(Op::Add);
        Counted(self.0 - o.0)
    }
}

impl Mul for Counted {
    type Output = Counted;
    fn mul(self, o: Counted) -> Counted {
        tally(Op::Mul);
        Counted(self.0 * o.0)
    }
}

impl Div for Counted {
    type Output = Counted;
    fn div(self, o: Counted) -> Counted {
        tally(Op::Div);
        Counted(self.0 / o.0)
    }
}

// sign flip, free in hardware
impl Neg for Counted {
    type Output = Counted;
    fn neg(self) -> Counted {
        Counted(-self.0)
    }
}

impl AddAssign for Counted {
    fn add_assign(&mut self, o: Counted) {
        *self = *self + o;
    }
}

impl Real for Counted {
    fn from_f64(x: f64) -> Self {
        Counted(x)
    }
    fn to_f64(self) -> f64 {
        self.0
    }
    fn abs(self) -> Self {
        Counted(self.0.abs())
    }
    fn sqrt(self) -> Self {
        tally(Op::Other);
        Counted(self.0.sqrt())
    }
    fn exp(self) -> Self {
        tally(Op::Other);
        Counted(self.0.exp())
    }
    fn round(self) -> Self {
        tally(Op::Other);
        Counted(self.0.round())
    }
    fn enter_stage(stage: Stage) {
        STAGE.with(|s| s.set(stage));
    }
}

fn reset() {
    STAGE.with(|s| s.set(Stage::Setup));
    COUNTS.with(|c| *c.borrow_mut() = FlopCounts::default());
}

fn snapshot() -> FlopCounts {
    COUNTS.with(|c| *c.borrow())
}

/// Four distinct centers and exponents; the kernel has no value-dependent
/// branches, so any non-degenerate quartet gives the same counts.
fn representative(class: &QuartetClass) -> QuartetInput {
    const CENTERS: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [1.2, 0.3, -0.4], [-0.5, 1.1, 0.7], [0.6, -0.8, 1.3]];
    const EXPONENTS: [f64; 4] = [1.3, 0.9, 1.7, 0.6];
    let ls = class.ls();
    QuartetInput::new(std::array::from_fn(|i| {
        PrimitiveShell::new(CENTERS[i], EXPONENTS[i], ls[i]).expect("fixed shells are valid")
    }))
}

/// Operations for one quartet of `class`, from supplied nodes through the
/// quantized codes. Root finding is not counted.
pub fn count_flops(class: &QuartetClass, n: BitWidth) -> Result<FlopCounts> {
    let q = representative(class);
    let r = prepare_quartet_rys(&q)?;
    let d = Dims::of(class);
    let mut ws = Workspace::<Counted>::new();
    reset();
    let b_max = kernel_runtime(&q, &r, &mut ws);
    Counted::enter_stage(Stage::Compress);
    let eps = epsilon_raw(b_max, n);
    let eris = ws.eris();
    let values =
        (0..d.n_gc * d.n_gd).flat_map(|row| eris[row * d.p_ab..row * d.p_ab + d.n_ga * d.n_gb].iter().copied());
    let mut codes = Vec::with_capacity(d.num_eriq());
    quantize_with(values, eps, n, &mut codes);
    let counts = snapshot();
    reset();
    Ok(counts)
}
