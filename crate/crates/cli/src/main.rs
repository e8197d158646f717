//! `cplanar`: clustered planarity for embedded cyclic clustered graphs.
//!
//! Exit codes: 0 c-planar (or ok), 1 not c-planar, 2 unsupported or over a
//! search limit, 3 invalid input. `oracle` exits 4 when the two answers
//! disagree.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use cplanar::generate::{generate, planted, GenMode, GenParams, PlantedParams};
use cplanar::io::{CertificateFile, InstanceFile};
use cplanar::oracle::{oracle, OracleLimits, OracleVerdict};
use cplanar::{decide_with_report, verify_certificate, CGraph, CplanarError, PoleSelection, Verdict};

const OK: u8 = 0;
const NO: u8 = 1;
const UNSUPPORTED: u8 = 2;
const INVALID: u8 = 3;
const DISAGREE: u8 = 4;

#[derive(Parser)]
#[command(name = "cplanar", version, about = "C-planarity of embedded cyclic clustered graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Preserve,
    Free,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Path insertion, as in `gen`; large instances are mostly rejected early.
    Random,
    /// Ring drawings with clusters as wedges; always c-planar.
    Planted,
    /// Planted drawings whose clusters fall apart into many pieces.
    Fragmented,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an instance and check its structure.
    Validate { path: PathBuf },
    /// Decide c-planarity.
    Test {
        path: PathBuf,
        /// Write the verdict, and the certificate on success, to this file.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Check a certificate file against its instance.
    Verify { instance: PathBuf, certificate: PathBuf },
    /// Generate a random instance.
    Gen {
        #[arg(long, default_value_t = 12)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        c: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Extra edges inserted after the vertex target is reached.
        #[arg(long, default_value_t = 0)]
        ops: usize,
        #[arg(long, value_enum, default_value_t = Mode::Preserve)]
        mode: Mode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the exhaustive search and compare it with `test`.
    Oracle {
        path: PathBuf,
        #[arg(long, default_value_t = OracleLimits::default().max_vertices)]
        max_vertices: usize,
        #[arg(long, default_value_t = OracleLimits::default().max_nodes)]
        max_nodes: usize,
    },
    /// Draw a certificate as SVG.
    Render {
        certificate: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Time `test` on generated instances and fit a log-log slope.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1000, 2000, 4000, 8000])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        c: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Instances per size; the median time is reported.
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = Family::Fragmented)]
        family: Family,
    },
}

fn load(path: &Path) -> Result<CGraph, CplanarError> {
    let text = fs::read_to_string(path).map_err(|e| CplanarError::Input(format!("{}: {e}", path.display())))?;
    InstanceFile::parse(&text)?.to_cgraph()
}

fn invalid(e: impl std::fmt::Display) -> u8 {
    eprintln!("invalid input: {e}");
    INVALID
}

fn validate(path: &Path) -> u8 {
    let g = match load(path) {
        Ok(g) => g,
        Err(e) => return invalid(e),
    };
    if g.c == 2 {
        println!("unsupported: two clusters are outside the scope of this test");
        return UNSUPPORTED;
    }
    if let Err(errs) = g.validate_cyclic() {
        let msgs: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        return invalid(msgs.join("; "));
    }
    let faces = g.map.trace_faces().len();
    let comps = g.map.components().len();
    let winding = match g.select_poles() {
        PoleSelection::Poles(_) => "poles +c/-c".to_string(),
        PoleSelection::AllZero => "all faces of height 0".to_string(),
        PoleSelection::Reject { heights } => format!("nonzero heights {heights:?}"),
    };
    println!(
        "ok: {} vertices, {} edges, {} faces, {} components, c = {}, {}",
        g.map.vertex_count(),
        g.map.edge_count(),
        faces,
        comps,
        g.c,
        winding
    );
    OK
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::CPlanar(_) => OK,
        Verdict::NotCPlanar(_) => NO,
        Verdict::Unsupported(_) => UNSUPPORTED,
    }
}

fn test(path: &Path, out: Option<&Path>) -> Result<u8> {
    let g = match load(path) {
        Ok(g) => g,
        Err(e) => return Ok(invalid(e)),
    };
    let report = match decide_with_report(&g) {
        Ok(r) => r,
        Err(CplanarError::Input(m)) => return Ok(invalid(m)),
        Err(e) => return Err(e).context("decision failed"),
    };
    match &report.verdict {
        Verdict::CPlanar(cert) => println!("c-planar ({} edges added)", cert.added.len()),
        Verdict::NotCPlanar(r) => println!("not c-planar: {r}"),
        Verdict::Unsupported(u) => println!("unsupported: {u}"),
    }
    if let Some(out) = out {
        fs::write(out, CertificateFile::from_report(&report).to_json())
            .with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(verdict_code(&report.verdict))
}

fn verify(instance: &Path, certificate: &Path) -> Result<u8> {
    let g = match load(instance) {
        Ok(g) => g,
        Err(e) => return Ok(invalid(e)),
    };
    let text = fs::read_to_string(certificate).with_context(|| format!("reading {}", certificate.display()))?;
    let file = match CertificateFile::parse(&text) {
        Ok(f) => f,
        Err(e) => return Ok(invalid(e)),
    };
    let Some(cert) = file.certificate else {
        println!("no certificate (verdict: {})", file.verdict);
        return Ok(NO);
    };
    match verify_certificate(&g, &cert) {
        Ok(()) => {
            println!("certificate ok: {} added edges", cert.added.len());
            Ok(OK)
        }
        Err(problems) => {
            for p in problems {
                println!("certificate problem: {p}");
            }
            Ok(NO)
        }
    }
}

fn gen(n: usize, c: usize, seed: u64, ops: usize, mode: Mode, out: Option<&Path>) -> Result<u8> {
    if c < 3 {
        bail!("--c must be at least 3");
    }
    if n < c {
        bail!("--n must be at least --c (generation starts from a cycle through all clusters)");
    }
    let mut p = GenParams::new(c, n, seed);
    p.extra_chords = ops;
    p.mode = match mode {
        Mode::Preserve => GenMode::Preserve,
        Mode::Free => GenMode::Free,
    };
    let text = InstanceFile::from_cgraph(&generate(&p)).to_json();
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(OK)
}

fn run_oracle(path: &Path, limits: OracleLimits) -> Result<u8> {
    let g = match load(path) {
        Ok(g) => g,
        Err(e) => return Ok(invalid(e)),
    };
    let report = match decide_with_report(&g) {
        Ok(r) => r,
        Err(CplanarError::Input(m)) => return Ok(invalid(m)),
        Err(e) => return Err(e).context("decision failed"),
    };
    let o = oracle(&g, &limits).context("oracle failed")?;
    println!("test:   {}", report.verdict.name());
    println!("oracle: {}", o.name());
    if let OracleVerdict::CPlanar(cert) = &o {
        if let Err(p) = verify_certificate(&g, cert) {
            bail!("oracle witness failed verification: {}", p.join("; "));
        }
    }
    let code = match (&report.verdict, &o) {
        (_, OracleVerdict::LimitExceeded) | (Verdict::Unsupported(_), _) => {
            println!("no comparison");
            UNSUPPORTED
        }
        (Verdict::CPlanar(_), OracleVerdict::CPlanar(_)) | (Verdict::NotCPlanar(_), OracleVerdict::NotCPlanar) => {
            println!("agree");
            OK
        }
        _ => {
            println!("DISAGREE");
            DISAGREE
        }
    };
    Ok(code)
}

fn render(cert_path: &Path, out: &Path) -> Result<u8> {
    let text = fs::read_to_string(cert_path).with_context(|| format!("reading {}", cert_path.display()))?;
    let file = match CertificateFile::parse(&text) {
        Ok(f) => f,
        Err(e) => return Ok(invalid(e)),
    };
    let Some(cert) = file.certificate else {
        eprintln!("no certificate (verdict: {})", file.verdict);
        return Ok(INVALID);
    };
    let svg = cplanar::render::render_svg(&cert);
    fs::write(out, svg).with_context(|| format!("writing {}", out.display()))?;
    Ok(OK)
}

/// Least-squares slope of log(time) against log(size).
fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn bench(sizes: &[usize], c: usize, seed: u64, reps: usize, family: Family) -> Result<u8> {
    if c < 3 {
        bail!("--c must be at least 3");
    }
    println!("{:>8} {:>8} {:>8} {:>12} {:>8} {:>12}", "vertices", "edges", "faces", "subdivisions", "verdict", "median_ms");
    let mut points = Vec::new();
    for &n in sizes {
        let mut times = Vec::new();
        let mut last = None;
        for r in 0..reps.max(1) {
            let s = seed.wrapping_mul(1_000_003).wrapping_add(r as u64);
            let g = match family {
                Family::Random => generate(&GenParams::new(c, n.max(c), s)),
                Family::Planted => planted(&PlantedParams::with_size(c, n, s)),
                Family::Fragmented => planted(&PlantedParams::fragmented(c, n, s)),
            };
            let t = Instant::now();
            let report = decide_with_report(&g).context("decision failed")?;
            times.push(t.elapsed().as_secs_f64());
            last = Some((g, report));
        }
        times.sort_by(f64::total_cmp);
        let med = times[times.len() / 2];
        let (g, report) = last.expect("at least one repetition");
        println!(
            "{:>8} {:>8} {:>8} {:>12} {:>8} {:>12.2}",
            g.map.vertex_count(),
            g.map.edge_count(),
            g.map.trace_faces().len(),
            report.stats.subdivisions,
            report.verdict.name(),
            med * 1e3
        );
        points.push((g.map.vertex_count() as f64, med.max(1e-9)));
    }
    if points.len() >= 2 {
        println!("log-log slope: {:.3}", loglog_slope(&points));
    }
    Ok(OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Validate { path } => Ok(validate(&path)),
        Cmd::Test { path, certificate } => test(&path, certificate.as_deref()),
        Cmd::Verify { instance, certificate } => verify(&instance, &certificate),
        Cmd::Gen { n, c, seed, ops, mode, output } => gen(n, c, seed, ops, mode, output.as_deref()),
        Cmd::Oracle { path, max_vertices, max_nodes } => {
            run_oracle(&path, OracleLimits { max_vertices, max_nodes })
        }
        Cmd::Render { certificate, output } => render(&certificate, &output),
        Cmd::Bench { sizes, c, seed, reps, family } => bench(&sizes, c, seed, reps, family),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INVALID)
        }
    }
}
