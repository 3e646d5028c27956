use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use parity_ndc::bench::{
    compute_n_ndc, ingest_counts, parse_angle, read_results_csv, run_benchmark, write_metric_csv,
    write_outputs, write_results_csv, ExperimentConfig,
};
use parity_ndc::circuit::{parse, serialize, Circuit};
use parity_ndc::error::{Error, Result};
use parity_ndc::noise::NoiseModel;
use parity_ndc::protocol::{theta_sweep, CircuitForm, OutcomeMap};
use parity_ndc::transpile::{
    build_lnn, build_lnn_controlled, build_reference, build_reference_controlled,
    check_equivalence, check_equivalence_on, h_pipeline, m_pipeline, LnnOptions, MethodKind,
};

/// Parity no-disturbance benchmark toolkit.
#[derive(Parser)]
#[command(name = "ndcbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a protocol circuit in the text format.
    Build(BuildArgs),
    /// Derive the nearest-neighbour circuit from a controlled reference.
    Transpile(TranspileArgs),
    /// Compare the outcome distributions of two circuits.
    Verify(VerifyArgs),
    /// Run a benchmark campaign and write results, metric and summary.
    Run(RunArgs),
    /// Violation against θ for one method and size.
    Sweep(SweepArgs),
    /// Recompute N_NDC from a results CSV.
    Metric(MetricArgs),
    /// Turn counts files into result rows.
    Ingest(IngestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Branch {
    Single,
    Double,
    Controlled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Lnn,
    Reference,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_parser = parse_method)]
    method: MethodKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "pi/4", value_parser = parse_theta)]
    theta: f64,
    #[arg(long, value_enum, default_value = "double")]
    branch: Branch,
    #[arg(long, value_enum, default_value = "lnn")]
    form: Form,
    /// Keep the next-nearest-neighbour CNOTs of the M-method.
    #[arg(long)]
    keep_nnn: bool,
    /// Also read out the first ancilla in the H-method.
    #[arg(long)]
    record_first: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TranspileArgs {
    input: PathBuf,
    /// Defaults to the `method` metadata of the input.
    #[arg(long, value_parser = parse_method)]
    method: Option<MethodKind>,
    /// Keep the first-ancilla readout through the final elision.
    #[arg(long)]
    keep_first: bool,
    /// Directory for the circuit after every pass.
    #[arg(long)]
    stages: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = 10)]
    settings: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Classical bits of `a` to compare, e.g. `1,0`.
    #[arg(long, value_delimiter = ',')]
    bits_a: Vec<usize>,
    /// Matching bits of `b`; defaults to `--bits-a`.
    #[arg(long, value_delimiter = ',')]
    bits_b: Vec<usize>,
}

#[derive(Args)]
struct StatArgs {
    /// TOML experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Ignore the configured noise model.
    #[arg(long)]
    noiseless: bool,
    #[arg(long, value_enum)]
    form: Option<Form>,
}

impl StatArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.runs {
            c.n_runs = v;
        }
        if let Some(v) = self.shots {
            c.n_shots = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.workers {
            c.workers = v;
        }
        if self.noiseless {
            c.noise = NoiseModel::ideal();
        }
        if let Some(f) = self.form {
            c.form = circuit_form(f);
        }
        Ok(c)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    stats: StatArgs,
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<MethodKind>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_theta)]
    thetas: Vec<f64>,
    #[arg(long)]
    contiguous: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    stats: StatArgs,
    #[arg(long, value_parser = parse_method)]
    method: MethodKind,
    #[arg(long)]
    n: usize,
    /// Explicit angles; otherwise an even grid over [0, π].
    #[arg(long, value_delimiter = ',', value_parser = parse_theta)]
    thetas: Vec<f64>,
    #[arg(long, default_value_t = 17)]
    grid: usize,
}

#[derive(Args)]
struct MetricArgs {
    results: PathBuf,
    #[arg(long)]
    contiguous: bool,
    /// Also write the per-N table here.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Clbit holding the final parity.
    #[arg(long, default_value_t = 1)]
    final_bit: usize,
    /// Bit value read as the `+` outcome.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
    plus_bit: u8,
    /// Compute N_NDC from the ingested rows as well.
    #[arg(long)]
    metric: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_method(s: &str) -> std::result::Result<MethodKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_theta(s: &str) -> std::result::Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

fn circuit_form(f: Form) -> CircuitForm {
    match f {
        Form::Lnn => CircuitForm::Lnn,
        Form::Reference => CircuitForm::Reference,
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    parse(&std::fs::read_to_string(path)?)
}

fn build(a: BuildArgs) -> Result<()> {
    let opts = LnnOptions {
        record_first_parity: a.record_first,
        decompose_nnn: !a.keep_nnn,
    };
    let c = match (a.form, a.branch) {
        (Form::Lnn, Branch::Controlled) => build_lnn_controlled(a.method, a.n, a.theta, opts)?,
        (Form::Lnn, b) => build_lnn(a.method, a.n, a.theta, matches!(b, Branch::Double), opts)?,
        (Form::Reference, Branch::Controlled) => build_reference_controlled(a.method, a.n, a.theta)?,
        (Form::Reference, b) => build_reference(a.method, a.n, a.theta, matches!(b, Branch::Double))?,
    };
    emit(&serialize(&c), a.output.as_deref())
}

fn transpile(a: TranspileArgs) -> Result<()> {
    let input = read_circuit(&a.input)?;
    let method = match a.method {
        Some(m) => m,
        None => input
            .meta("method")
            .ok_or_else(|| Error::Invalid("input has no method metadata; pass --method".into()))?
            .parse()?,
    };
    let stages = match method {
        MethodKind::HMethod => h_pipeline(&input, a.keep_first)?,
        MethodKind::MMethod => m_pipeline(&input)?,
        other => {
            return Err(Error::Invalid(format!(
                "no derivation pipeline for {other}"
            )))
        }
    };
    if let Some(dir) = &a.stages {
        std::fs::create_dir_all(dir)?;
        for (i, (name, c)) in stages.iter().enumerate() {
            std::fs::write(dir.join(format!("{:02}_{name}.qc", i + 1)), serialize(c))?;
        }
    }
    let last = &stages.last().expect("pipelines have stages").1;
    emit(&serialize(last), a.output.as_deref())
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let ca = read_circuit(&a.a)?;
    let cb = read_circuit(&a.b)?;
    let v = if a.bits_a.is_empty() {
        check_equivalence(&ca, &cb, a.settings, a.tol)?
    } else {
        let bits_b = if a.bits_b.is_empty() { &a.bits_a } else { &a.bits_b };
        check_equivalence_on(&ca, &cb, &a.bits_a, bits_b, a.settings, a.tol)?
    };
    println!(
        "{} max_deviation={:.3e} tol={:.1e} settings={} worst_theta={}",
        if v.passed { "PASS" } else { "FAIL" },
        v.max_deviation,
        v.tolerance,
        v.settings_checked,
        v.worst_theta
    );
    Ok(v.passed)
}

fn run(a: RunArgs) -> Result<()> {
    let mut c = a.stats.config()?;
    if !a.methods.is_empty() {
        c.methods = a.methods;
    }
    if let Some(v) = a.n_min {
        c.n_min = v;
    }
    if let Some(v) = a.n_max {
        c.n_max = v;
    }
    if !a.thetas.is_empty() {
        c.thetas = a.thetas;
    }
    if a.contiguous {
        c.require_contiguous = true;
    }
    if let Some(o) = a.output {
        c.output = o;
    }
    let out = run_benchmark(&c)?;
    let files = write_outputs(&out, &c, &c.output)?;
    print!("{}", out.summary(&c));
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let c = a.stats.config()?;
    c.noise.validate()?;
    let thetas = if a.thetas.is_empty() {
        let k = a.grid.max(2);
        (0..k)
            .map(|i| std::f64::consts::PI * i as f64 / (k - 1) as f64)
            .collect()
    } else {
        a.thetas
    };
    let points = theta_sweep(a.method, a.n, &thetas, &c.noise, &c.run_config())?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["method", "n", "theta", "v_mean", "v_sigma", "ideal_v"])
        .map_err(|e| Error::Io(e.into()))?;
    for p in points {
        w.write_record([
            p.method.to_string(),
            p.n.to_string(),
            p.theta.to_string(),
            p.estimate.v.to_string(),
            p.estimate.sigma.to_string(),
            p.ideal_v.to_string(),
        ])
        .map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

fn print_metrics(rows: &[parity_ndc::bench::ResultRow], contiguous: bool, output: Option<&Path>) -> Result<()> {
    let mut methods: Vec<MethodKind> = rows.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    let reports = methods
        .into_iter()
        .map(|m| compute_n_ndc(m, rows, contiguous))
        .collect::<Result<Vec<_>>>()?;
    for r in &reports {
        print!("{}", r.summary());
    }
    if let Some(p) = output {
        std::fs::write(p, write_metric_csv(&reports)?)?;
    }
    Ok(())
}

fn metric(a: MetricArgs) -> Result<()> {
    let rows = read_results_csv(&std::fs::read_to_string(&a.results)?)?;
    print_metrics(&rows, a.contiguous, a.output.as_deref())
}

fn ingest(a: IngestArgs) -> Result<()> {
    let map = OutcomeMap {
        final_bit: a.final_bit,
        first_bit: None,
        plus_bit: a.plus_bit == 1,
    };
    let rows = ingest_counts(&a.files, &map)?;
    emit(&write_results_csv(&rows)?, a.output.as_deref())?;
    if a.metric {
        print_metrics(&rows, false, None)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Build(a) => build(a),
        Command::Transpile(a) => transpile(a),
        Command::Verify(a) => verify(a).and_then(|ok| {
            if ok {
                Ok(())
            } else {
                Err(Error::Invalid("circuits are not equivalent".into()))
            }
        }),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Metric(a) => metric(a),
        Command::Ingest(a) => ingest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
