//! Trip-count and throughput model of the pipelined kernel design.
//!
//! Each stage is a pipelined loop issuing one iteration per cycle; the
//! slowest of the three sequential trip counts bounds the cycles per quartet.

pub mod flops;

use std::fmt::{self, Write as _};

use crate::compress::BitWidth;
use crate::shell::QuartetClass;

pub use flops::{count_flops, Counted, FlopCounts, StageFlops};

/// Cap on the basic size of register-resident intermediates.
pub const REGISTER_LIMIT: usize = 108;

/// Fixed per-quartet pipeline overhead in cycles.
pub const OVERHEAD_CYCLES: usize = 10;

/// Sequential trip counts of the recurrence, quadrature and compress-store loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TripCounts {
    pub n_rr: usize,
    pub n_gq: usize,
    pub n_cs: usize,
}

impl TripCounts {
    pub fn max(&self) -> usize {
        self.n_rr.max(self.n_gq).max(self.n_cs)
    }

    /// Stage with the largest count; ties go to the later stage.
    pub fn bottleneck(&self) -> Bottleneck {
        let m = self.max();
        if self.n_cs == m {
            Bottleneck::CompressStore
        } else if self.n_gq == m {
            Bottleneck::Quadrature
        } else {
            Bottleneck::Recurrence
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bottleneck {
    Recurrence,
    Quadrature,
    CompressStore,
}

impl fmt::Display for Bottleneck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bottleneck::Recurrence => "RR",
            Bottleneck::Quadrature => "GQ",
            Bottleneck::CompressStore => "CS",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Storage {
    BlockMemory,
    Registers,
}

/// Unrolled indices of the recurrence loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RrPattern {
    Ijk,
    Ijkl,
    IjklMu,
    IjklMuXi,
}

impl RrPattern {
    pub fn storage(self) -> Storage {
        match self {
            RrPattern::Ijk | RrPattern::Ijkl => Storage::BlockMemory,
            RrPattern::IjklMu | RrPattern::IjklMuXi => Storage::Registers,
        }
    }

    pub fn trip_count(self, class: &QuartetClass) -> usize {
        let n = class.n_rys();
        match self {
            RrPattern::Ijk => 3 * n * (class.ld() + 1),
            RrPattern::Ijkl => 3 * n,
            RrPattern::IjklMu => 3,
            RrPattern::IjklMuXi => 1,
        }
    }

    fn next(self) -> Option<RrPattern> {
        match self {
            RrPattern::Ijk => Some(RrPattern::Ijkl),
            RrPattern::Ijkl => Some(RrPattern::IjklMu),
            RrPattern::IjklMu => Some(RrPattern::IjklMuXi),
            RrPattern::IjklMuXi => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RrPattern::Ijk => "ijk",
            RrPattern::Ijkl => "ijkl",
            RrPattern::IjklMu => "ijklμ",
            RrPattern::IjklMuXi => "ijklμξ",
        }
    }
}

/// Unrolled indices of the quadrature loops.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GqPattern {
    XiMuAb,
    XiMuAbc,
    XiMuAbcd,
}

impl GqPattern {
    pub fn storage(self) -> Storage {
        match self {
            GqPattern::XiMuAb => Storage::BlockMemory,
            GqPattern::XiMuAbc | GqPattern::XiMuAbcd => Storage::Registers,
        }
    }

    pub fn trip_count(self, class: &QuartetClass) -> usize {
        let g = class.n_g();
        match self {
            GqPattern::XiMuAb => g[2] * g[3],
            GqPattern::XiMuAbc => g[3],
            GqPattern::XiMuAbcd => 1,
        }
    }

    fn next(self) -> Option<GqPattern> {
        match self {
            GqPattern::XiMuAb => Some(GqPattern::XiMuAbc),
            GqPattern::XiMuAbc => Some(GqPattern::XiMuAbcd),
            GqPattern::XiMuAbcd => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GqPattern::XiMuAb => "ξμab",
            GqPattern::XiMuAbc => "ξμabc",
            GqPattern::XiMuAbcd => "ξμabcd",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnrollPlan {
    pub rr_pattern: RrPattern,
    pub gq_pattern: GqPattern,
}

impl UnrollPlan {
    pub const BASE: UnrollPlan = UnrollPlan {
        rr_pattern: RrPattern::Ijk,
        gq_pattern: GqPattern::XiMuAb,
    };

    pub fn rr_storage(&self) -> Storage {
        self.rr_pattern.storage()
    }

    pub fn gq_storage(&self) -> Storage {
        self.gq_pattern.storage()
    }
}

/// Trip counts before any further unrolling.
pub fn base_trip_counts(class: &QuartetClass, n: BitWidth) -> TripCounts {
    TripCounts {
        n_rr: RrPattern::Ijk.trip_count(class),
        n_gq: GqPattern::XiMuAb.trip_count(class),
        n_cs: n.num_chunks(class.num_eriq()),
    }
}

/// `(La+Lb+1)(Lb+1)(Lc+Ld+1)(Ld+1)`: intermediates per `(μ, ξ)` lane.
fn basic_rr_size(class: &QuartetClass) -> usize {
    let [a, b, c, d] = class.ls();
    (a + b + 1) * (b + 1) * (c + d + 1) * (d + 1)
}

fn rr_allowed(class: &QuartetClass, p: RrPattern) -> bool {
    let basic = basic_rr_size(class);
    match p {
        RrPattern::Ijk => true,
        RrPattern::Ijkl => basic <= REGISTER_LIMIT,
        RrPattern::IjklMu | RrPattern::IjklMuXi => basic * class.n_rys() <= REGISTER_LIMIT,
    }
}

fn gq_allowed(class: &QuartetClass, rr: RrPattern, p: GqPattern) -> bool {
    let g = class.n_g();
    match p {
        GqPattern::XiMuAb => true,
        _ => rr.storage() == Storage::Registers && g[0] * g[1] * g[2] <= REGISTER_LIMIT,
    }
}

/// Escalate the recurrence pattern, then the quadrature pattern, one step at
/// a time while that stage takes more cycles than the compress-store loop.
pub fn apply_further_unrolling(class: &QuartetClass, base: TripCounts) -> (UnrollPlan, TripCounts) {
    let mut plan = UnrollPlan::BASE;
    let mut t = base;
    while t.n_rr > t.n_cs {
        match plan.rr_pattern.next() {
            Some(p) if rr_allowed(class, p) => {
                plan.rr_pattern = p;
                t.n_rr = p.trip_count(class);
            }
            _ => break,
        }
    }
    while t.n_gq > t.n_cs {
        match plan.gq_pattern.next() {
            Some(p) if gq_allowed(class, plan.rr_pattern, p) => {
                plan.gq_pattern = p;
                t.n_gq = p.trip_count(class);
            }
            _ => break,
        }
    }
    (plan, t)
}

/// Modeled throughput at a given clock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerfEstimate {
    pub f_max_mhz: f64,
    /// 10⁹ ERIs per second.
    pub geris: f64,
}

/// `f_max · n_ERIQ / (max(n_RR, n_GQ, n_CS) + 10)`.
pub fn modeled_geris(class: &QuartetClass, t: TripCounts, f_max_mhz: f64) -> PerfEstimate {
    let cycles = (t.max() + OVERHEAD_CYCLES) as f64;
    PerfEstimate {
        f_max_mhz,
        geris: f_max_mhz * 1e6 * class.num_eriq() as f64 / cycles / 1e9,
    }
}

/// One line of the model report.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelRow {
    pub class: QuartetClass,
    pub base: TripCounts,
    pub plan: UnrollPlan,
    pub unrolled: TripCounts,
    pub estimate: Option<PerfEstimate>,
}

impl ModelRow {
    pub fn new(class: QuartetClass, n: BitWidth, f_max_mhz: Option<f64>) -> Self {
        let base = base_trip_counts(&class, n);
        let (plan, unrolled) = apply_further_unrolling(&class, base);
        ModelRow {
            class,
            base,
            plan,
            unrolled,
            estimate: f_max_mhz.map(|f| modeled_geris(&class, unrolled, f)),
        }
    }
}

fn mark(t: &TripCounts) -> [String; 3] {
    let hit = t.bottleneck();
    let cell = |v: usize, me: Bottleneck| if hit == me { format!("*{v}") } else { v.to_string() };
    [
        cell(t.n_rr, Bottleneck::Recurrence),
        cell(t.n_gq, Bottleneck::Quadrature),
        cell(t.n_cs, Bottleneck::CompressStore),
    ]
}

/// Aligned text table; `*` marks the bottleneck in each column group.
pub fn emit_model_table(rows: &[ModelRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} | {:>5} {:>5} {:>5} | {:>5} {:>5} {:>5} | {:<7} {:<7} | {:>4} | {:>8} {:>7}",
        "class", "n_RR", "n_GQ", "n_CS", "n_RR", "n_GQ", "n_CS", "RR", "GQ", "bn", "f_max", "GERIS"
    );
    for r in rows {
        let b = mark(&r.base);
        let u = mark(&r.unrolled);
        let (f, g) = match r.estimate {
            Some(e) => (format!("{:.1}", e.f_max_mhz), format!("{:.2}", e.geris)),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "{:<8} | {:>5} {:>5} {:>5} | {:>5} {:>5} {:>5} | {:<7} {:<7} | {:>4} | {:>8} {:>7}",
            r.class.to_string(),
            b[0],
            b[1],
            b[2],
            u[0],
            u[1],
            u[2],
            r.plan.rr_pattern.name(),
            r.plan.gq_pattern.name(),
            r.unrolled.bottleneck().to_string(),
            f,
            g
        );
    }
    out
}

/// Comma-separated rows: class, n_RR, n_GQ, n_CS, bottleneck, geris (post-unroll).
pub fn emit_model_csv(rows: &[ModelRow]) -> String {
    let mut out = String::from("class,n_rr,n_gq,n_cs,bottleneck,geris\n");
    for r in rows {
        let t = r.unrolled;
        let g = r.estimate.map(|e| format!("{:.4}", e.geris)).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.class,
            t.n_rr,
            t.n_gq,
            t.n_cs,
            t.bottleneck(),
            g
        );
    }
    out
}
