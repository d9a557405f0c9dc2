//! Command-line front end: synthesize term lists, verify against the
//! brute-force oracle, and audit term-count scaling.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error,
//! 3 resource cap exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use fermilap::oracle;
use fermilap::pauli::PauliSum;
use fermilap::potential::{assemble_hamiltonian, gate_hermitian, PotentialSpec};
use fermilap::problem::{Code, Mode, PenaltyWeight, ProblemSpec};
use fermilap::Error;

#[derive(Parser, Debug)]
#[command(name = "fermilap", version, about = "Fermionic lattice Hamiltonian Pauli synthesizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize the Hamiltonian and write term list, manifest, and layout.
    Synth(CommonArgs),
    /// Verify inline synthesis against the brute-force oracle.
    Verify(CommonArgs),
    /// Emit the gadget-mode term-count scaling table as CSV.
    Audit(CommonArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct CommonArgs {
    /// Flat key=value config file; command-line flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Particle count.
    #[arg(long = "A")]
    particles: Option<usize>,
    /// Bits per axis.
    #[arg(long = "n")]
    bits: Option<usize>,
    /// Spatial dimensions (1..=3).
    #[arg(long = "D")]
    dims: Option<usize>,
    /// inline | gadget
    #[arg(long)]
    mode: Option<String>,
    /// brgc-direct | binary-gray
    #[arg(long)]
    code: Option<String>,
    /// Penalty weight: auto or a positive number.
    #[arg(long = "Q")]
    penalty: Option<String>,
    /// Potential: none | well:depth=..,site=.. | harmonic:strength=..
    /// | coulomb-softened:strength=..,softening=.. | file:PATH
    #[arg(long)]
    potential: Option<String>,
    /// Add the constant -2DA diagonal of the discrete Laplacian.
    #[arg(long)]
    include_diagonal: bool,
    /// Range sweep, e.g. n=2..8 or A=2..4,D=1..3 (one variable per segment).
    #[arg(long)]
    sweep: Option<String>,
    /// Output directory (created if missing).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Deterministic seed recorded in the manifest.
    #[arg(long)]
    seed: Option<u64>,
    /// Dense-matrix qubit cap for verification paths.
    #[arg(long)]
    cap_qubits: Option<usize>,
}

/// Everything a run needs after merging defaults, config file, and flags.
struct Settings {
    spec: ProblemSpec,
    out_dir: PathBuf,
    sweep: Option<String>,
}

fn parse_bool(key: &str, v: &str) -> Result<bool, Error> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(Error::Config(format!("{key}: expected boolean, got '{other}'"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, Error> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{v}'")))
}

fn parse_penalty(v: &str) -> Result<PenaltyWeight, Error> {
    if v == "auto" {
        return Ok(PenaltyWeight::Auto);
    }
    let q: f64 = parse_num("Q", v)?;
    if !(q > 0.0) {
        return Err(Error::Config(format!("Q must be positive, got {q}")));
    }
    Ok(PenaltyWeight::Fixed(q))
}

fn load_settings(args: &CommonArgs) -> Result<Settings, Error> {
    let mut spec = ProblemSpec::default();
    let mut out_dir = PathBuf::from("out");
    let mut sweep = None;
    let mut code_explicit = false;
    let mut mode_set = false;

    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "A" => spec.particles = parse_num(key, value)?,
                "n" => spec.bits_per_axis = parse_num(key, value)?,
                "D" => spec.dims = parse_num(key, value)?,
                "mode" => {
                    spec.mode = Mode::parse(value)?;
                    mode_set = true;
                }
                "code" => {
                    spec.code = Code::parse(value)?;
                    code_explicit = true;
                }
                "Q" => spec.penalty = parse_penalty(value)?,
                "kinetic_coefficient" => spec.kinetic_coefficient = parse_num(key, value)?,
                "potential" => spec.potential = parse_potential(value)?,
                "include_diagonal" => spec.include_diagonal = parse_bool(key, value)?,
                "seed" => spec.seed = parse_num(key, value)?,
                "cap_qubits" => spec.cap_qubits = parse_num(key, value)?,
                "cap_basis" => spec.cap_basis = parse_num(key, value)?,
                "sweep" => sweep = Some(value.to_string()),
                "out_dir" => out_dir = PathBuf::from(value),
                other => return Err(Error::Config(format!("unknown config key '{other}'"))),
            }
        }
    }

    if let Some(v) = args.particles {
        spec.particles = v;
    }
    if let Some(v) = args.bits {
        spec.bits_per_axis = v;
    }
    if let Some(v) = args.dims {
        spec.dims = v;
    }
    if let Some(v) = &args.mode {
        spec.mode = Mode::parse(v)?;
        mode_set = true;
    }
    if let Some(v) = &args.code {
        spec.code = Code::parse(v)?;
        code_explicit = true;
    }
    if let Some(v) = &args.penalty {
        spec.penalty = parse_penalty(v)?;
    }
    if let Some(v) = &args.potential {
        spec.potential = parse_potential(v)?;
    }
    if args.include_diagonal {
        spec.include_diagonal = true;
    }
    if let Some(v) = args.seed {
        spec.seed = v;
    }
    if let Some(v) = args.cap_qubits {
        spec.cap_qubits = v;
    }
    if let Some(v) = &args.sweep {
        sweep = Some(v.clone());
    }
    if let Some(v) = &args.out_dir {
        out_dir = v.clone();
    }

    // Each mode has exactly one natural register code; only override the
    // default when the user did not pin one.
    if mode_set && !code_explicit {
        spec.code = match spec.mode {
            Mode::Inline => Code::BrgcDirect,
            Mode::Gadget => Code::BinaryGray,
        };
    }
    spec.validate()?;
    Ok(Settings { spec, out_dir, sweep })
}

fn parse_potential(value: &str) -> Result<Option<PotentialSpec>, Error> {
    if value == "none" {
        return Ok(None);
    }
    Ok(Some(PotentialSpec::parse(value)?))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn manifest_text(
    spec: &ProblemSpec,
    qubits: usize,
    ancillas: usize,
    q: f64,
    operator: &PauliSum,
    penalty_terms: usize,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "A={}", spec.particles);
    let _ = writeln!(out, "n={}", spec.bits_per_axis);
    let _ = writeln!(out, "D={}", spec.dims);
    let _ = writeln!(out, "mode={}", spec.mode.name());
    let _ = writeln!(out, "code={}", spec.code.name());
    let _ = writeln!(out, "seed={}", spec.seed);
    let _ = writeln!(out, "include_diagonal={}", spec.include_diagonal);
    let _ = writeln!(out, "qubits={qubits}");
    let _ = writeln!(out, "ancillas={ancillas}");
    let _ = writeln!(out, "penalty_weight={q:?}");
    let _ = writeln!(out, "operator_terms={}", operator.num_terms());
    let _ = writeln!(out, "penalty_terms={penalty_terms}");
    let _ = writeln!(out, "max_weight={}", operator.max_weight());
    for (w, count) in operator.weight_histogram() {
        let _ = writeln!(out, "terms_weight_{w}={count}");
    }
    out
}

/// Default expansion cap for inline term lists.
const TERM_CAP: usize = 1 << 22;

fn run_synth(settings: &Settings) -> Result<(), Error> {
    let spec = &settings.spec;
    match spec.mode {
        Mode::Inline => {
            let asm = assemble_hamiltonian(spec)?;
            let expanded = asm.expand_terms(TERM_CAP)?;
            let terms = write_file(&settings.out_dir, "terms.txt", &expanded.to_term_lines())?;
            write_file(
                &settings.out_dir,
                "manifest.txt",
                &manifest_text(
                    spec,
                    asm.layout.num_qubits(),
                    0,
                    asm.q,
                    &expanded,
                    asm.ordering.num_terms(),
                ),
            )?;
            write_file(&settings.out_dir, "layout.txt", &asm.layout.dump())?;
            println!("wrote {} ({} terms)", terms.display(), expanded.num_terms());
        }
        Mode::Gadget => {
            let sys = fermilap::emit::gadget_synthesize(spec)?;
            let mut operator = PauliSum::zero();
            for branch in &sys.branches {
                operator.add_assign(&branch.sum.scaled(Complex64::new(branch.coeff, 0.0)));
            }
            gate_hermitian(&operator)?;
            gate_hermitian(&sys.penalty)?;
            let q = match spec.penalty {
                PenaltyWeight::Fixed(v) => v,
                PenaltyWeight::Auto => 100.0 * operator.coefficient_norm(),
            };
            let mut combined = operator.clone();
            combined.add_assign(&sys.penalty.scaled(Complex64::new(q, 0.0)));
            let terms = write_file(&settings.out_dir, "terms.txt", &combined.to_term_lines())?;
            write_file(
                &settings.out_dir,
                "manifest.txt",
                &manifest_text(
                    spec,
                    sys.layout.num_qubits(),
                    sys.ancilla_count(),
                    q,
                    &combined,
                    sys.penalty.num_terms(),
                ),
            )?;
            write_file(&settings.out_dir, "layout.txt", &sys.layout.dump())?;
            write_file(&settings.out_dir, "gadget_report.txt", &sys.report_text())?;
            println!("wrote {} ({} terms)", terms.display(), combined.num_terms());
        }
    }
    Ok(())
}

/// Verification tolerances (absolute).
const SUBSPACE_TOL: f64 = 1e-12;
const SPECTRUM_TOL: f64 = 5e-2;
const GAP_RATIO_TOL: f64 = 0.25;

fn run_verify(settings: &Settings) -> Result<bool, Error> {
    if let Some(sweep) = &settings.sweep {
        // verify --sweep emits the scaling table instead of a spectral run
        let csv = audit_csv(&settings.spec, sweep)?;
        let path = write_file(&settings.out_dir, "scaling.csv", &csv)?;
        println!("wrote {}", path.display());
        return Ok(true);
    }
    let spec = &settings.spec;
    if spec.mode != Mode::Inline {
        return Err(Error::Config("verify requires mode=inline".into()));
    }
    let mut report = String::new();
    let mut pass = true;

    // 1. subspace comparison of the kinetic operator against the oracle
    if spec.particles >= 2 {
        let sub = oracle::verify_subspace(spec, SUBSPACE_TOL)?;
        let ok = sub.passes(SUBSPACE_TOL);
        pass &= ok;
        let _ = writeln!(
            report,
            "subspace dim={} max_abs_diff={:e} -> {}",
            sub.dim,
            sub.max_abs_diff,
            if ok { "pass" } else { "FAIL" }
        );
        for (row, col, got, want) in sub.discrepancies.iter().take(32) {
            let _ = writeln!(report, "  discrepancy {row:?} <- {col:?}: got {got}, oracle {want}");
        }
    }

    // 2. penalized spectrum against the oracle spectrum
    let asm = assemble_hamiltonian(spec)?;
    let oracle_h = oracle::build_oracle(spec)?;
    let dim = oracle_h.basis.tuples.len();
    let k = dim.min(6);
    let synth_spectrum = oracle::penalized_spectrum(&asm, spec, k)?;
    let oracle_spectrum = oracle::eigenvalues(&oracle_h.matrix);
    let mut spec_err: f64 = 0.0;
    for (i, &(e, w)) in synth_spectrum.iter().enumerate() {
        spec_err = spec_err.max((e - oracle_spectrum[i]).abs());
        if w < 0.5 {
            pass = false;
            let _ = writeln!(report, "level {i} is not valid-dominant (weight {w:.3}) -> FAIL");
        }
    }
    let ok = spec_err <= SPECTRUM_TOL;
    pass &= ok;
    let _ = writeln!(
        report,
        "spectrum lowest {k}: max_abs_err={spec_err:e} (Q={:?}) -> {}",
        asm.q,
        if ok { "pass" } else { "FAIL" }
    );
    for (i, &(e, w)) in synth_spectrum.iter().enumerate() {
        let _ = writeln!(report, "  E[{i}] synth={e:.9} oracle={:.9} weight={w:.6}", oracle_spectrum[i]);
    }

    // 3. gap flow when a potential is configured
    if spec.potential.is_some() {
        let mut free = spec.clone();
        free.potential = None;
        let free_asm = assemble_hamiltonian(&free)?;
        let t = oracle::penalized_matrix(&free_asm, &free)?;
        let n = 1usize << free_asm.layout.num_qubits();
        let mut v = nalgebra::DMatrix::zeros(n, n);
        for s in 0..n as u64 {
            v[(s as usize, s as usize)] = asm.potential.diagonal_element(s).re;
        }
        let reps = oracle::representative_states(spec)?;
        let flow = oracle::gap_flow(&t, &v, &reps, 11)?;
        let ok = (flow.min_gap - flow.free_gap).abs() <= GAP_RATIO_TOL * flow.free_gap.abs();
        pass &= ok;
        let _ = writeln!(
            report,
            "gap flow: free_gap={:.6} min_gap={:.6} multiplicity={} -> {}",
            flow.free_gap,
            flow.min_gap,
            flow.ground_multiplicity,
            if ok { "pass" } else { "FAIL" }
        );
        write_file(&settings.out_dir, "gap_flow.txt", &flow.table_text())?;
    }

    let _ = writeln!(report, "result={}", if pass { "pass" } else { "fail" });
    let path = write_file(&settings.out_dir, "spectral_report.txt", &report)?;
    print!("{report}");
    println!("wrote {}", path.display());
    Ok(pass)
}

fn parse_range(segment: &str) -> Result<(String, Vec<usize>), Error> {
    let (var, range) = segment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("sweep segment '{segment}': expected var=lo..hi")))?;
    let (lo, hi) = range
        .split_once("..")
        .ok_or_else(|| Error::Config(format!("sweep range '{range}': expected lo..hi")))?;
    let lo: usize = parse_num("sweep", lo)?;
    let hi: usize = parse_num("sweep", hi)?;
    if hi < lo {
        return Err(Error::Config(format!("sweep range '{range}' is empty")));
    }
    Ok((var.trim().to_string(), (lo..=hi).collect()))
}

/// One CSV row per swept value; each comma-separated segment varies one of
/// A, n, D while the others stay at their configured values.
fn audit_csv(spec: &ProblemSpec, sweep: &str) -> Result<String, Error> {
    let mut rows: Vec<oracle::AuditRow> = Vec::new();
    for segment in sweep.split(',') {
        let (var, values) = parse_range(segment.trim())?;
        for v in values {
            let (a, n, d) = match var.as_str() {
                "A" => (v, spec.bits_per_axis, spec.dims),
                "n" => (spec.particles, v, spec.dims),
                "D" => (spec.particles, spec.bits_per_axis, v),
                other => {
                    return Err(Error::Config(format!("sweep variable '{other}' (A|n|D)")));
                }
            };
            rows.push(oracle::audit_row(a, n, d)?);
        }
    }
    let mut csv = String::from("A,n,D,terms,max_weight,ancillas\n");
    for r in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.particles, r.bits_per_axis, r.dims, r.terms, r.max_weight, r.ancillas
        );
    }
    Ok(csv)
}

fn run_audit(settings: &Settings) -> Result<(), Error> {
    let sweep = settings.sweep.clone().unwrap_or_else(|| "n=2..8".to_string());
    let csv = audit_csv(&settings.spec, &sweep)?;
    let path = write_file(&settings.out_dir, "audit.csv", &csv)?;
    print!("{csv}");
    println!("wrote {}", path.display());
    Ok(())
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) | Error::TermListParse { .. } | Error::Io(_) => 2,
        Error::DimensionCap { .. } | Error::TermCap { .. } | Error::BasisCap { .. } => 3,
        Error::NotHermitian(_) | Error::NotReal(_) | Error::UnregisteredQubit(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, fn(&Settings) -> Result<bool, Error>) = match &cli.command {
        Command::Synth(a) => (a, |s| run_synth(s).map(|()| true)),
        Command::Verify(a) => (a, run_verify),
        Command::Audit(a) => (a, |s| run_audit(s).map(|()| true)),
    };
    let settings = match load_settings(args) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&settings) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
