use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rys_eri::compress::BitWidth;
use rys_eri::kernel::{compute_quartet_with_nodes, PrecisionMode};
use rys_eri::sample::random_quartet;
use rys_eri::shell::QuartetClass;
use rys_eri::wire::{parse_stream, stream_entry_len, write_records, QuartetRecord};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rys-eri")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn err(args: &[&str]) -> String {
    let out = cli(args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn perf_model_row() {
    let text = ok(&["perf-model", "--class", "pp,pp", "--bits", "16"]);
    let row = text.lines().find(|l| l.starts_with("[pp|pp]")).unwrap();
    let nums: Vec<String> = row
        .split(|c: char| c == '|' || c.is_whitespace())
        .map(|s| s.trim_start_matches('*').to_string())
        .filter(|s| s.parse::<usize>().is_ok())
        .collect();
    assert_eq!(nums, ["18", "9", "3", "3", "3", "3"]);

    let csv = ok(&["perf-model", "--class", "ff,ff", "--csv"]);
    assert!(csv.contains("[ff|ff],84,100,313,CS,"));
}

#[test]
fn perf_model_with_clocks() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("fmax.txt");
    std::fs::write(&f, "# class MHz\n[ff|dp] 373.4\n").unwrap();
    let text = ok(&["perf-model", "--class", "ff,dp", "--fmax", p(&f)]);
    assert!(text.contains("10.03"), "{text}");
}

#[test]
fn compute_then_decompress_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let class: QuartetClass = "fp|dd".parse().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    // mix geometry-only records with records carrying their own nodes
    let records: Vec<QuartetRecord> = (0..12)
        .map(|i| {
            let q = random_quartet(&mut rng, &class);
            let rec = QuartetRecord::from_input(&q);
            if i % 2 == 0 {
                let q32 = rec.input(&class).unwrap();
                QuartetRecord::with_nodes(&q32, &rec.node_set(&q32).unwrap())
            } else {
                rec
            }
        })
        .collect();
    let (rin, sout, vout) = (
        dir.path().join("in.bin"),
        dir.path().join("s.bin"),
        dir.path().join("v.f32"),
    );
    let mut buf = Vec::new();
    write_records(&mut buf, &records).unwrap();
    std::fs::write(&rin, buf).unwrap();

    ok(&[
        "compute",
        "--input",
        p(&rin),
        "--class",
        "fp,dd",
        "--bits",
        "12",
        "--output",
        p(&sout),
    ]);
    let stream = std::fs::read(&sout).unwrap();
    assert_eq!(stream.len(), 12 * stream_entry_len(&class, BitWidth::N12));
    ok(&[
        "decompress",
        "--input",
        p(&sout),
        "--class",
        "fp,dd",
        "--bits",
        "12",
        "--output",
        p(&vout),
    ]);
    let values: Vec<f32> = std::fs::read(&vout)
        .unwrap()
        .chunks(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    assert_eq!(values.len(), 12 * class.num_eriq());

    let eps: Vec<f32> = parse_stream(&stream, &class, BitWidth::N12)
        .unwrap()
        .iter()
        .map(|c| c.epsilon)
        .collect();
    for (k, rec) in records.iter().enumerate() {
        let q = rec.input(&class).unwrap();
        let orig = compute_quartet_with_nodes(&q, &rec.node_set(&q).unwrap(), PrecisionMode::Single).unwrap();
        let half = eps[k] as f64 / 2.0;
        for (v, &d) in orig.iter().zip(&values[k * class.num_eriq()..]) {
            // the values file is single precision, so allow its rounding on top of ε/2
            let slack = (d as f64).abs() * f32::EPSILON as f64 / 2.0;
            assert!((v - d as f64).abs() <= half * (1.0 + 1e-6) + slack);
        }
    }
}

#[test]
fn output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let recs = dir.path().join("r.bin");
    ok(&[
        "generate",
        "--dims",
        "2,2,1",
        "--class",
        "dd,pp",
        "--count",
        "40",
        "--seed",
        "3",
        "--output",
        p(&recs),
    ]);
    assert_eq!(std::fs::metadata(&recs).unwrap().len(), 40 * 128);
    let (a, b) = (dir.path().join("a.bin"), dir.path().join("b.bin"));
    ok(&[
        "compute",
        "--input",
        p(&recs),
        "--class",
        "dd,pp",
        "--threads",
        "1",
        "--output",
        p(&a),
    ]);
    ok(&[
        "compute",
        "--input",
        p(&recs),
        "--class",
        "dd,pp",
        "--threads",
        "3",
        "--output",
        p(&b),
    ]);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn bench_single_site() {
    let text = ok(&["bench", "--dims", "1,1,1", "--class", "canonical", "--threads", "2"]);
    assert_eq!(text.lines().count(), 56);
    assert!(text.lines().any(|l| l.starts_with("[ff|ff]")));
}

#[test]
fn flops_and_validate_reports() {
    let text = ok(&["flops", "--class", "ss,ss"]);
    assert!(text.lines().nth(1).unwrap().starts_with("[ss|ss]"));
    let text = ok(&["validate", "--dims", "2,1,1", "--class", "ps,ps", "--samples", "8"]);
    assert!(text.contains("[ps|ps]"));
}

#[test]
fn distinct_diagnostics() {
    let bad_class = err(&["perf-model", "--class", "pq,ss"]);
    let bad_bits = err(&["flops", "--bits", "33"]);
    let bad_bits_text = err(&["flops", "--bits", "many"]);
    let missing = err(&[
        "compute",
        "--input",
        "/nonexistent/records.bin",
        "--class",
        "ss,ss",
        "--output",
        "/tmp/x",
    ]);
    assert!(bad_class.contains("invalid quartet class"), "{bad_class}");
    assert!(bad_bits.contains("bit width 33 outside"), "{bad_bits}");
    assert!(bad_bits_text.contains("must be an integer"), "{bad_bits_text}");
    assert!(missing.contains("cannot read /nonexistent/records.bin"), "{missing}");

    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.bin");
    std::fs::write(&short, [0u8; 100]).unwrap();
    let malformed = err(&[
        "compute",
        "--input",
        p(&short),
        "--class",
        "ss,ss",
        "--output",
        p(&dir.path().join("o")),
    ]);
    assert!(malformed.contains("not a multiple of 128"), "{malformed}");
    let stream = err(&[
        "decompress",
        "--input",
        p(&short),
        "--class",
        "ss,ss",
        "--output",
        p(&dir.path().join("o")),
    ]);
    assert!(stream.contains("malformed stream"), "{stream}");
}
