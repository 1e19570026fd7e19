//! Lattice benchmark: geometry, batch compute-and-compress, and accuracy checks.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::compress::{compress, decompress, BitWidth};
use crate::error::{EriError, Result};
use crate::kernel::{Evaluator, PrecisionMode};
use crate::oracle::md_eri;
use crate::rys::{prepare_quartet_rys, RysNodeSet};
use crate::shell::{PrimitiveShell, QuartetClass, QuartetInput, ANGSTROM_TO_BOHR, MAX_L};
use crate::wire::{append_compressed, stream_entry_len};

/// Cubic lattice of sites, each carrying one shell per listed angular momentum.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub dims: [usize; 3],
    pub spacing_angstrom: f64,
    pub exponent: f64,
    pub shells: Vec<usize>,
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec {
            dims: [4, 4, 2],
            spacing_angstrom: 1.0,
            exponent: 1.5,
            shells: vec![0, 1, 2, 3],
        }
    }
}

impl LatticeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) || !(self.spacing_angstrom > 0.0 && self.spacing_angstrom.is_finite()) {
            return Err(EriError::Lattice);
        }
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(EriError::Exponent(self.exponent));
        }
        if let Some(&l) = self.shells.iter().find(|&&l| l > MAX_L) {
            return Err(EriError::AngularMomentum(l));
        }
        Ok(())
    }

    pub fn num_sites(&self) -> usize {
        self.dims.iter().product()
    }
}

#[derive(Clone, Debug)]
pub struct Benchmark {
    pub spec: LatticeSpec,
    /// Site positions in bohr.
    pub sites: Vec<[f64; 3]>,
}

pub fn generate_benchmark(spec: LatticeSpec) -> Result<Benchmark> {
    spec.validate()?;
    let h = spec.spacing_angstrom * ANGSTROM_TO_BOHR;
    let [nx, ny, nz] = spec.dims;
    let mut sites = Vec::with_capacity(spec.num_sites());
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                sites.push([x as f64 * h, y as f64 * h, z as f64 * h]);
            }
        }
    }
    Ok(Benchmark { spec, sites })
}

impl Benchmark {
    /// Every ordered quartet of sites; no screening.
    pub fn num_quartets(&self) -> usize {
        self.sites.len().pow(4)
    }

    pub fn supports(&self, class: &QuartetClass) -> bool {
        class.ls().iter().all(|l| self.spec.shells.contains(l))
    }

    fn check(&self, class: &QuartetClass) -> Result<()> {
        match class.ls().into_iter().find(|l| !self.spec.shells.contains(l)) {
            Some(l) => Err(EriError::AngularMomentum(l)),
            None => Ok(()),
        }
    }

    /// Quartet number `index`, sites enumerated with `a` slowest.
    pub fn quartet(&self, class: &QuartetClass, index: usize) -> Result<QuartetInput> {
        self.check(class)?;
        let n = self.sites.len();
        let ls = class.ls();
        let site = [index / (n * n * n) % n, index / (n * n) % n, index / n % n, index % n];
        let mut shells = [PrimitiveShell::new([0.0; 3], 1.0, 0)?; 4];
        for i in 0..4 {
            shells[i] = PrimitiveShell::new(self.sites[site[i]], self.spec.exponent, ls[i])?;
        }
        Ok(QuartetInput::new(shells))
    }

    pub fn quartets<'a>(&'a self, class: &'a QuartetClass) -> impl Iterator<Item = Result<QuartetInput>> + 'a {
        (0..self.num_quartets()).map(move |i| self.quartet(class, i))
    }
}

/// One quartet to evaluate; missing nodes are computed before the timed kernel phase.
#[derive(Clone, Copy, Debug)]
pub struct Job {
    pub input: QuartetInput,
    pub nodes: Option<RysNodeSet>,
}

impl From<QuartetInput> for Job {
    fn from(input: QuartetInput) -> Self {
        Job { input, nodes: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunStats {
    pub quartets: usize,
    pub eris: u64,
    pub threads: usize,
    /// Wall time spent computing roots and weights.
    pub node_time: Duration,
    /// Wall time of the compute-and-compress phase.
    pub kernel_time: Duration,
}

impl RunStats {
    pub fn total_time(&self) -> Duration {
        self.node_time + self.kernel_time
    }

    fn geris(&self, t: Duration) -> f64 {
        let s = t.as_secs_f64();
        if s > 0.0 {
            self.eris as f64 / s / 1e9
        } else {
            0.0
        }
    }

    pub fn geris_total(&self) -> f64 {
        self.geris(self.total_time())
    }

    pub fn geris_kernel(&self) -> f64 {
        self.geris(self.kernel_time)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub stream: Vec<u8>,
    pub stats: RunStats,
}

const BATCH: usize = 64;

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| EriError::ThreadPool(e.to_string()))
}

/// Compute and compress every job of `class`; the stream is in job order and
/// bitwise independent of `threads` (0 picks the rayon default).
pub fn run_class(
    class: &QuartetClass,
    jobs: &[Job],
    n: BitWidth,
    mode: PrecisionMode,
    threads: usize,
) -> Result<RunOutput> {
    if let Some((i, j)) = jobs.iter().enumerate().find(|(_, j)| j.input.class() != *class) {
        return Err(EriError::Record(format!(
            "quartet {i} is {}, expected {class}",
            j.input.class()
        )));
    }
    let pool = pool(threads)?;
    let entry = stream_entry_len(class, n);

    let start = Instant::now();
    let nodes: Vec<RysNodeSet> = pool.install(|| {
        jobs.par_iter()
            .map(|j| j.nodes.map_or_else(|| prepare_quartet_rys(&j.input), Ok))
            .collect::<Result<_>>()
    })?;
    let node_time = start.elapsed();

    let start = Instant::now();
    let parts: Vec<Vec<u8>> = pool.install(|| {
        jobs.par_chunks(BATCH)
            .zip(nodes.par_chunks(BATCH))
            .map_init(Evaluator::new, |ev, (js, rs)| {
                let mut buf = Vec::with_capacity(js.len() * entry);
                for (j, r) in js.iter().zip(rs) {
                    let e = ev.compute(&j.input, r, mode)?;
                    append_compressed(&mut buf, &compress(&e, n)?);
                }
                Ok(buf)
            })
            .collect::<Result<_>>()
    })?;
    let kernel_time = start.elapsed();

    Ok(RunOutput {
        stream: parts.concat(),
        stats: RunStats {
            quartets: jobs.len(),
            eris: (jobs.len() * class.num_eriq()) as u64,
            threads: pool.current_num_threads(),
            node_time,
            kernel_time,
        },
    })
}

/// Accuracy of decompressed kernel output on sampled benchmark quartets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    pub class: QuartetClass,
    pub bits: BitWidth,
    pub mode: PrecisionMode,
    pub samples: usize,
    /// Largest `|oracle - decompressed|` (Hartree).
    pub max_abs_error: f64,
    /// Largest `|kernel - decompressed| / (ε/2)` over quartets with `ε > 0`.
    pub max_bound_ratio: f64,
    /// Quartets exceeding `ε/2 · (1 + 1e-6)`.
    pub bound_violations: usize,
    pub max_b_max: f64,
}

/// Slack on the `ε/2` rounding bound.
pub const BOUND_SLACK: f64 = 1e-6;

struct Sample {
    oracle_err: f64,
    ratio: f64,
    violated: bool,
    b_max: f64,
}

fn sample_one(ev: &mut Evaluator, q: &QuartetInput, n: BitWidth, mode: PrecisionMode) -> Result<Sample> {
    let reference = md_eri(q).values;
    let r = prepare_quartet_rys(q)?;
    let e = ev.compute(q, &r, mode)?;
    let c = compress(&e, n)?;
    let dec = decompress(&c)?;
    let half = c.epsilon as f64 / 2.0;
    let mut s = Sample {
        oracle_err: 0.0,
        ratio: 0.0,
        violated: false,
        b_max: e.b_max,
    };
    for ((v, &d), &o) in e.iter().zip(&dec).zip(&reference) {
        s.oracle_err = s.oracle_err.max((o - d).abs());
        let err = (v - d).abs();
        if err > half * (1.0 + BOUND_SLACK) {
            s.violated = true;
        }
        if half > 0.0 {
            s.ratio = s.ratio.max(err / half);
        }
    }
    Ok(s)
}

/// Sample `sample_size` quartets of `class` (all of them if fewer exist).
pub fn validate_class(
    bench: &Benchmark,
    class: &QuartetClass,
    sample_size: usize,
    n: BitWidth,
    mode: PrecisionMode,
    seed: u64,
) -> Result<ValidationReport> {
    bench.check(class)?;
    let total = bench.num_quartets();
    let indices: Vec<usize> = if sample_size >= total {
        (0..total).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (class.index() as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        (0..sample_size).map(|_| rng.gen_range(0..total)).collect()
    };
    let samples: Vec<Sample> = indices
        .par_iter()
        .map_init(Evaluator::new, |ev, &i| {
            sample_one(ev, &bench.quartet(class, i)?, n, mode)
        })
        .collect::<Result<_>>()?;
    Ok(ValidationReport {
        class: *class,
        bits: n,
        mode,
        samples: samples.len(),
        max_abs_error: samples.iter().map(|s| s.oracle_err).fold(0.0, f64::max),
        max_bound_ratio: samples.iter().map(|s| s.ratio).fold(0.0, f64::max),
        bound_violations: samples.iter().filter(|s| s.violated).count(),
        max_b_max: samples.iter().map(|s| s.b_max).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wire::parse_stream;

    fn class(s: &str) -> QuartetClass {
        s.parse().unwrap()
    }

    #[test]
    fn default_lattice() {
        let b = generate_benchmark(LatticeSpec::default()).unwrap();
        assert_eq!(b.sites.len(), 32);
        assert_eq!(b.num_quartets(), 1_048_576);
        let far = b.sites.last().unwrap();
        assert!((far[0] - 3.0 * ANGSTROM_TO_BOHR).abs() < 1e-12);
        assert!((far[2] - ANGSTROM_TO_BOHR).abs() < 1e-12);
    }

    #[test]
    fn invalid_lattices() {
        let bad = |f: fn(&mut LatticeSpec)| {
            let mut s = LatticeSpec::default();
            f(&mut s);
            generate_benchmark(s).is_err()
        };
        assert!(bad(|s| s.dims[1] = 0));
        assert!(bad(|s| s.spacing_angstrom = 0.0));
        assert!(bad(|s| s.exponent = -1.0));
        assert!(bad(|s| s.shells.push(4)));
    }

    #[test]
    fn single_site() {
        let b = generate_benchmark(LatticeSpec {
            dims: [1, 1, 1],
            ..Default::default()
        })
        .unwrap();
        assert_eq!(b.num_quartets(), 1);
        assert_eq!(b.quartets(&class("ff|ff")).count(), 1);
    }

    #[test]
    fn quartet_enumeration_order() {
        let b = generate_benchmark(LatticeSpec {
            dims: [2, 1, 1],
            ..Default::default()
        })
        .unwrap();
        let q = b.quartet(&class("sp|ds"), 1).unwrap();
        assert_eq!(q.shells.map(|s| s.center[0] > 0.0), [false, false, false, true]);
        assert_eq!(q.class(), class("sp|ds"));
        let only_s = generate_benchmark(LatticeSpec {
            shells: vec![0],
            ..Default::default()
        })
        .unwrap();
        assert_eq!(
            only_s.quartet(&class("ps|ss"), 0).err(),
            Some(EriError::AngularMomentum(1))
        );
    }

    #[test]
    fn stream_is_thread_independent() {
        let b = generate_benchmark(LatticeSpec {
            dims: [2, 2, 1],
            ..Default::default()
        })
        .unwrap();
        let c = class("dp|pd");
        let jobs: Vec<Job> = b.quartets(&c).map(|q| q.unwrap().into()).collect();
        let one = run_class(&c, &jobs, BitWidth::N16, PrecisionMode::Single, 1).unwrap();
        let four = run_class(&c, &jobs, BitWidth::N16, PrecisionMode::Single, 4).unwrap();
        assert_eq!(one.stream, four.stream);
        assert_eq!(one.stream.len(), 256 * stream_entry_len(&c, BitWidth::N16));
        assert_eq!(parse_stream(&one.stream, &c, BitWidth::N16).unwrap().len(), 256);
        assert_eq!(one.stats.eris, 256 * c.num_eriq() as u64);
    }

    #[test]
    fn ssss_stream_size() {
        let q = generate_benchmark(LatticeSpec::default())
            .unwrap()
            .quartet(&class("ss|ss"), 5)
            .unwrap();
        let out = run_class(&class("ss|ss"), &[q.into()], BitWidth::N16, PrecisionMode::Single, 1).unwrap();
        assert_eq!(out.stream.len(), 68);
    }

    #[test]
    fn class_mismatch_rejected() {
        let q = generate_benchmark(LatticeSpec::default())
            .unwrap()
            .quartet(&class("ps|ss"), 5)
            .unwrap();
        assert!(run_class(&class("ss|ss"), &[q.into()], BitWidth::N16, PrecisionMode::Single, 1).is_err());
    }

    #[test]
    fn validation_small() {
        let b = generate_benchmark(LatticeSpec {
            dims: [2, 1, 1],
            ..Default::default()
        })
        .unwrap();
        let r = validate_class(&b, &class("pp|ds"), 100, BitWidth::N16, PrecisionMode::Double, 1).unwrap();
        assert_eq!(r.samples, 16);
        assert_eq!(r.bound_violations, 0);
        assert!(r.max_bound_ratio <= 1.0 + BOUND_SLACK);
        assert!(r.max_abs_error <= r.max_b_max / 32767.0);
    }
}
