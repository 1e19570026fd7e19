use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rys_eri::bench::{generate_benchmark, run_class, validate_class, Benchmark, Job, LatticeSpec};
use rys_eri::compress::{decompress, BitWidth};
use rys_eri::kernel::{PrecisionMode, Stage};
use rys_eri::perf::{count_flops, emit_model_csv, emit_model_table, ModelRow};
use rys_eri::shell::QuartetClass;
use rys_eri::wire::{parse_records, parse_stream, write_records, QuartetRecord};

#[derive(Parser)]
#[command(
    name = "rys-eri",
    version,
    about = "Rys-quadrature ERI batches with n-bit compression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write lattice quartets of one class as 128-byte input records.
    Generate {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[arg(long, value_parser = parse_class)]
        class: QuartetClass,
        /// Number of records; sampled with --seed when fewer than the lattice holds.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Store roots and weights in the records instead of leaving word 2 empty.
        #[arg(long)]
        with_nodes: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Records of one class in, compressed stream out.
    Compute {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_class)]
        class: QuartetClass,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        output: PathBuf,
    },
    /// Compressed stream in, little-endian f32 values out (logical order per quartet).
    Decompress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = parse_class)]
        class: QuartetClass,
        #[arg(long, value_parser = parse_bits, default_value = "16")]
        bits: BitWidth,
        #[arg(long)]
        output: PathBuf,
    },
    /// Compute and compress every lattice quartet of each class and report throughput.
    Bench {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        classes: ClassArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Only the first N quartets of each class.
        #[arg(long)]
        limit: Option<usize>,
        /// Write the stream of the last class here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Trip counts, unrolling and modeled throughput.
    PerfModel {
        #[command(flatten)]
        classes: ClassArgs,
        #[arg(long, value_parser = parse_bits, default_value = "16")]
        bits: BitWidth,
        /// Lines of `class mhz`; classes without an entry get no throughput column.
        #[arg(long)]
        fmax: Option<PathBuf>,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Floating-point operations per quartet, by stage.
    Flops {
        #[command(flatten)]
        classes: ClassArgs,
        #[arg(long, value_parser = parse_bits, default_value = "16")]
        bits: BitWidth,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Maximum error of decompressed output against the reference integrals.
    Validate {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        classes: ClassArgs,
        #[arg(long, value_parser = parse_bits, default_value = "16")]
        bits: BitWidth,
        #[arg(long, default_value_t = PrecisionMode::Single)]
        precision: PrecisionMode,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LatticeArgs {
    /// Sites along x,y,z.
    #[arg(long, value_parser = parse_dims, default_value = "4,4,2")]
    dims: [usize; 3],
    /// Site spacing in Å.
    #[arg(long, default_value_t = 1.0)]
    spacing: f64,
    #[arg(long, default_value_t = 1.5)]
    exponent: f64,
}

impl LatticeArgs {
    fn build(&self) -> Result<Benchmark> {
        Ok(generate_benchmark(LatticeSpec {
            dims: self.dims,
            spacing_angstrom: self.spacing,
            exponent: self.exponent,
            ..Default::default()
        })?)
    }
}

#[derive(Args)]
struct ClassArgs {
    /// Class such as `pp,pp` or `[fd|ps]`; repeatable; `all` or `canonical` (default).
    #[arg(long = "class")]
    class: Vec<String>,
}

impl ClassArgs {
    fn resolve(&self) -> Result<Vec<QuartetClass>> {
        if self.class.is_empty() {
            return Ok(QuartetClass::all_canonical().collect());
        }
        let mut out = Vec::new();
        for c in &self.class {
            match c.as_str() {
                "all" => out.extend(QuartetClass::all()),
                "canonical" => out.extend(QuartetClass::all_canonical()),
                s => out.push(parse_class(s).map_err(|e| anyhow!(e))?),
            }
        }
        Ok(out)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_bits, default_value = "16")]
    bits: BitWidth,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = PrecisionMode::Single)]
    precision: PrecisionMode,
}

fn parse_class(s: &str) -> std::result::Result<QuartetClass, String> {
    s.parse().map_err(|e: rys_eri::EriError| e.to_string())
}

fn parse_bits(s: &str) -> std::result::Result<BitWidth, String> {
    let n: u32 = s
        .trim()
        .parse()
        .map_err(|_| format!("bit width must be an integer, got {s:?}"))?;
    BitWidth::new(n).map_err(|e| e.to_string())
}

fn parse_dims(s: &str) -> std::result::Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| format!("lattice dimensions must be three integers like 4,4,2, got {s:?}"))?;
    parts
        .try_into()
        .map_err(|_| format!("lattice dimensions must be three integers like 4,4,2, got {s:?}"))
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => write(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_fmax(path: &Path) -> Result<Vec<(QuartetClass, f64)>> {
    let text = String::from_utf8(read(path)?).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (c, f) = line
            .rsplit_once(|ch: char| ch.is_whitespace() || ch == '=')
            .ok_or_else(|| anyhow!("{}:{}: expected `class mhz`", path.display(), i + 1))?;
        let class = parse_class(c.trim()).map_err(|e| anyhow!("{}:{}: {e}", path.display(), i + 1))?;
        let mhz: f64 = f
            .trim()
            .parse()
            .map_err(|_| anyhow!("{}:{}: invalid clock {f:?}", path.display(), i + 1))?;
        out.push((class, mhz));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate {
            lattice,
            class,
            count,
            seed,
            with_nodes,
            output,
        } => {
            let bench = lattice.build()?;
            let total = bench.num_quartets();
            let indices: Vec<usize> = match count {
                Some(n) if n < total => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..n).map(|_| rng.gen_range(0..total)).collect()
                }
                _ => (0..total).collect(),
            };
            let mut records = Vec::with_capacity(indices.len());
            for i in indices {
                let q = bench.quartet(&class, i)?;
                records.push(if with_nodes {
                    QuartetRecord::with_nodes(&q, &rys_eri::rys::prepare_quartet_rys(&q)?)
                } else {
                    QuartetRecord::from_input(&q)
                });
            }
            let mut buf = Vec::with_capacity(records.len() * rys_eri::wire::RECORD_BYTES);
            write_records(&mut buf, &records)?;
            write(&output, &buf)?;
            eprintln!("wrote {} {class} records to {}", records.len(), output.display());
        }
        Command::Compute {
            input,
            class,
            run,
            output,
        } => {
            let records = parse_records(&read(&input)?).with_context(|| format!("in {}", input.display()))?;
            let jobs = records
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let q = r.input(&class).with_context(|| format!("record {i}"))?;
                    let nodes = if r.has_nodes() {
                        Some(r.node_set(&q).with_context(|| format!("record {i}"))?)
                    } else {
                        None
                    };
                    Ok(Job { input: q, nodes })
                })
                .collect::<Result<Vec<_>>>()?;
            let out = run_class(&class, &jobs, run.bits, run.precision, run.threads)?;
            write(&output, &out.stream)?;
            let s = out.stats;
            eprintln!(
                "{class}: {} quartets, {} ERIs, {} bytes; nodes {:.3} s, kernel {:.3} s, {:.4} GERIS (kernel {:.4})",
                s.quartets,
                s.eris,
                out.stream.len(),
                s.node_time.as_secs_f64(),
                s.kernel_time.as_secs_f64(),
                s.geris_total(),
                s.geris_kernel()
            );
        }
        Command::Decompress {
            input,
            class,
            bits,
            output,
        } => {
            let quartets =
                parse_stream(&read(&input)?, &class, bits).with_context(|| format!("in {}", input.display()))?;
            let mut buf = Vec::with_capacity(quartets.len() * class.num_eriq() * 4);
            for q in &quartets {
                for v in decompress(q)? {
                    buf.extend_from_slice(&(v as f32).to_le_bytes());
                }
            }
            write(&output, &buf)?;
            eprintln!("decompressed {} {class} quartets", quartets.len());
        }
        Command::Bench {
            lattice,
            classes,
            run,
            limit,
            output,
        } => {
            let bench = lattice.build()?;
            let classes = classes.resolve()?;
            println!(
                "{:<8} {:>9} {:>12} {:>9} {:>9} {:>9} {:>9}",
                "class", "quartets", "ERIs", "nodes s", "kernel s", "GERIS", "kernel"
            );
            let mut last = None;
            for c in classes {
                let n = limit.unwrap_or(usize::MAX).min(bench.num_quartets());
                let jobs = (0..n)
                    .map(|i| bench.quartet(&c, i).map(Job::from))
                    .collect::<rys_eri::Result<Vec<_>>>()?;
                let out = run_class(&c, &jobs, run.bits, run.precision, run.threads)?;
                let s = out.stats;
                println!(
                    "{:<8} {:>9} {:>12} {:>9.3} {:>9.3} {:>9.4} {:>9.4}",
                    c.to_string(),
                    s.quartets,
                    s.eris,
                    s.node_time.as_secs_f64(),
                    s.kernel_time.as_secs_f64(),
                    s.geris_total(),
                    s.geris_kernel()
                );
                std::io::stdout().flush()?;
                last = Some(out.stream);
            }
            if let (Some(path), Some(stream)) = (output, last) {
                write(&path, &stream)?;
            }
        }
        Command::PerfModel {
            classes,
            bits,
            fmax,
            csv,
            output,
        } => {
            let clocks = match &fmax {
                Some(p) => read_fmax(p)?,
                None => Vec::new(),
            };
            let rows: Vec<ModelRow> = classes
                .resolve()?
                .into_iter()
                .map(|c| {
                    let f = clocks.iter().find(|(k, _)| *k == c).map(|&(_, f)| f);
                    ModelRow::new(c, bits, f)
                })
                .collect();
            let text = if csv {
                emit_model_csv(&rows)
            } else {
                emit_model_table(&rows)
            };
            emit(output.as_deref(), &text)?;
        }
        Command::Flops { classes, bits, output } => {
            let mut text = format!(
                "{:<8} {:>6} {:>8} {:>10} {:>10} {:>9} {:>10}\n",
                "class", "ERIs", "setup", "recurrence", "quadrature", "compress", "total"
            );
            for c in classes.resolve()? {
                let f = count_flops(&c, bits)?;
                text += &format!(
                    "{:<8} {:>6} {:>8} {:>10} {:>10} {:>9} {:>10}\n",
                    c.to_string(),
                    c.num_eriq(),
                    f.stage(Stage::Setup).flops(),
                    f.stage(Stage::Recurrence).flops(),
                    f.stage(Stage::Quadrature).flops(),
                    f.stage(Stage::Compress).flops(),
                    f.total()
                );
            }
            emit(output.as_deref(), &text)?;
        }
        Command::Validate {
            lattice,
            classes,
            bits,
            precision,
            samples,
            seed,
            output,
        } => {
            let bench = lattice.build()?;
            let mut text = format!(
                "{:<8} {:>7} {:>12} {:>10} {:>10} {:>10}\n",
                "class", "samples", "max |err|", "max/(ε/2)", "violations", "b_max"
            );
            let mut violations = 0;
            for c in classes.resolve()? {
                let r = validate_class(&bench, &c, samples, bits, precision, seed)?;
                violations += r.bound_violations;
                text += &format!(
                    "{:<8} {:>7} {:>12.3e} {:>10.6} {:>10} {:>10.3e}\n",
                    c.to_string(),
                    r.samples,
                    r.max_abs_error,
                    r.max_bound_ratio,
                    r.bound_violations,
                    r.max_b_max
                );
            }
            emit(output.as_deref(), &text)?;
            if violations > 0 {
                bail!("{violations} quartets exceed the ε/2 reconstruction bound");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
