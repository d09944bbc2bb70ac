mod error;
mod output;
mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcorr::figures::{format_number, reproduce, FigureId};
use qcorr::ising::{locate_peak, scan, ChainParams, FieldGrid, ScanSeries};
use qcorr::measure::{
    corollary_check, subsystem_correlation, total_correlation_max, total_correlation_sequence, Variant,
};
use qcorr::oracle::{brute_force_projector_min, geometric_discord_qubit_oracle};
use qcorr::state_file::parse_state;
use qcorr::{random_mixed, DensityMatrix, QcorrError, StateSpec};
use rayon::prelude::*;

use error::{CliError, CliResult};
use output::{emit, write_atomic};
use report::{Report, VariantResult};

const THREADS_ENV: &str = "QCORR_THREADS";
const ORACLE_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Measurement-induced total correlations of multipartite states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Total correlation of a single state.
    Measure(MeasureArgs),
    /// Nearest-neighbour total correlation across a transverse-field scan.
    ScanIsing(ScanArgs),
    /// Regenerate a reference data table as CSV.
    Reproduce(ReproduceArgs),
    /// Compare the closed-form minimization against numerical oracles.
    OracleCheck(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantChoice {
    Plain,
    Mu,
    Both,
}

impl VariantChoice {
    fn variants(self) -> &'static [Variant] {
        match self {
            VariantChoice::Plain => &[Variant::Plain],
            VariantChoice::Mu => &[Variant::Mu],
            VariantChoice::Both => &[Variant::Plain, Variant::Mu],
        }
    }
}

#[derive(Args)]
#[group(id = "state", required = true, multiple = false)]
struct StateSource {
    /// JSON state file with `dims` and `matrix` ([re, im] entries).
    #[arg(long, group = "state")]
    input: Option<PathBuf>,
    /// Built-in family, e.g. `werner:m=3,x=0.25` or `ghz:n=4`.
    #[arg(long, group = "state")]
    spec: Option<String>,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    source: StateSource,
    #[arg(long, value_enum, default_value = "plain")]
    variant: VariantChoice,
    /// `max` for the best ordering, or a 1-based order such as `2,1,3`.
    #[arg(long, default_value = "max")]
    permutation: String,
    /// Seed for sampling projector choices at degenerate steps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 16)]
    spins: usize,
    /// Field grid as `lo:hi:step`.
    #[arg(long, default_value = "0.2:1.8:0.01")]
    grid: String,
    #[arg(long, value_enum, default_value = "plain")]
    variant: VariantChoice,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Table id (fig2a, fig2b, fig3, fig5, fig6a..fig6d, werner-table) or `all`.
    #[arg(long)]
    figure: String,
    /// Output file, or a directory when `--figure all`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random two-qubit and qubit-qutrit states checked against the angle search.
    #[arg(long, default_value_t = 500)]
    qubit_states: usize,
    /// Random 2x3 and 2x4 states whose second measurement step must vanish.
    #[arg(long, default_value_t = 100)]
    corollary_states: usize,
    /// Random three-qubit states checked against the projector search.
    #[arg(long, default_value_t = 50)]
    projector_states: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 500)]
    refine_iters: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match configure_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Measure(a) => measure(a),
        Command::ScanIsing(a) => scan_ising(a),
        Command::Reproduce(a) => reproduce_cmd(a),
        Command::OracleCheck(a) => oracle_check(a),
    }
}

fn load_state(src: &StateSource) -> CliResult<(String, DensityMatrix)> {
    if let Some(path) = &src.input {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let rho = parse_state(&text).map_err(|e| match e {
            QcorrError::Parse(msg) => QcorrError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        Ok((format!("file:{}", path.display()), rho))
    } else {
        let text = src.spec.as_deref().expect("clap enforces one state source");
        let spec: StateSpec = text.parse()?;
        Ok((format!("spec:{spec}"), qcorr::build(&spec)?))
    }
}

fn parse_permutation(text: &str) -> CliResult<Option<Vec<usize>>> {
    if text == "max" {
        return Ok(None);
    }
    text.split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
        .map_err(|_| QcorrError::Parse(format!("permutation must be 'max' or comma-separated indices, got '{text}'")).into())
}

fn measure(a: MeasureArgs) -> CliResult<()> {
    let (source, rho) = load_state(&a.source)?;
    let perm = parse_permutation(&a.permutation)?;
    let mut results = Vec::new();
    for &v in a.variant.variants() {
        let r = match &perm {
            None => total_correlation_max(&rho, v)?,
            Some(p) => total_correlation_sequence(&rho, p, v)?,
        };
        results.push(VariantResult::new(v, r, &rho, a.seed)?);
    }
    let report = Report::new(source, &rho, results);
    let text = if a.json { report.to_json() } else { report.to_text() };
    emit(a.out.as_deref(), &text)
}

fn scan_ising(a: ScanArgs) -> CliResult<()> {
    let grid: FieldGrid = a.grid.parse()?;
    let params = ChainParams::new(a.spins, a.coupling, 0.0, a.gamma)?;
    let series: Vec<(Variant, ScanSeries)> = a
        .variant
        .variants()
        .iter()
        .map(|&v| Ok((v, scan(&params, &grid, v)?)))
        .collect::<CliResult<_>>()?;
    emit(a.out.as_deref(), &scan_csv(&series))
}

fn cell(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn scan_csv(series: &[(Variant, ScanSeries)]) -> String {
    let mut out = String::new();
    let mut header = vec!["h".to_string()];
    for (v, _) in series {
        let tag = if *v == Variant::Mu { "_mu" } else { "" };
        header.push(format!("q{tag}_total"));
        header.push(format!("dq{tag}_dh"));
    }
    let _ = writeln!(out, "{}", header.join(","));
    let h = &series[0].1.h_grid;
    for (i, &hv) in h.iter().enumerate() {
        let mut row = vec![format_number(hv)];
        for (_, s) in series {
            row.push(format_number(s.q_values[i]));
            row.push(cell(s.derivative_at(i)));
        }
        let _ = writeln!(out, "{}", row.join(","));
    }
    for (v, s) in series {
        let label = if series.len() > 1 { format!(" {}", if *v == Variant::Mu { "mu" } else { "plain" }) } else { String::new() };
        match locate_peak(s) {
            Ok((hp, m)) => {
                let _ = writeln!(out, "# peak{label} h={} |dq_dh|={}", format_number(hp), format_number(m));
            }
            Err(_) => {
                let _ = writeln!(out, "# peak{label} none");
            }
        }
    }
    out
}

fn reproduce_cmd(a: ReproduceArgs) -> CliResult<()> {
    if a.figure == "all" {
        let dir = a.out.ok_or_else(|| CliError::Usage("--figure all requires --out DIR".into()))?;
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let tables = FigureId::ALL
            .par_iter()
            .map(|&id| Ok((id, reproduce(id)?.to_csv())))
            .collect::<CliResult<Vec<_>>>()?;
        for (id, csv) in tables {
            write_atomic(&dir.join(format!("{id}.csv")), &csv)?;
        }
        Ok(())
    } else {
        let id: FigureId = a.figure.parse()?;
        emit(a.out.as_deref(), &reproduce(id)?.to_csv())
    }
}

struct CheckLine {
    name: &'static str,
    cases: usize,
    max_deviation: f64,
}

fn seed_for(base: u64, family: u64, k: usize) -> u64 {
    base.wrapping_mul(1_000_003).wrapping_add(family << 32).wrapping_add(k as u64)
}

fn max_dev<F>(n: usize, f: F) -> CliResult<f64>
where
    F: Fn(usize) -> CliResult<f64> + Sync + Send,
{
    let devs = (0..n).into_par_iter().map(f).collect::<CliResult<Vec<f64>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

fn oracle_check(a: OracleArgs) -> CliResult<()> {
    let qubit = max_dev(a.qubit_states, |k| {
        let dims: &[usize] = if k % 2 == 0 { &[2, 2] } else { &[2, 3] };
        let total: usize = dims.iter().product();
        let rho = random_mixed(dims, 1 + k % total, seed_for(a.seed, 1, k))?;
        let q = subsystem_correlation(&rho.coefficient_tensor()?, 1, Variant::Plain)?.value;
        Ok((q - geometric_discord_qubit_oracle(&rho)?).abs())
    })?;
    let corollary = max_dev(a.corollary_states, |k| {
        let dims: &[usize] = if k % 2 == 0 { &[2, 3] } else { &[2, 4] };
        let total: usize = dims.iter().product();
        let rho = random_mixed(dims, 1 + k % total, seed_for(a.seed, 2, k))?;
        match corollary_check(&rho) {
            Ok(o) => Ok(o.second.abs()),
            Err(QcorrError::CorollaryViolated { second }) => Ok(second.abs()),
            Err(e) => Err(e.into()),
        }
    })?;
    let projector = max_dev(a.projector_states, |k| {
        let rho = random_mixed(&[2, 2, 2], 1 + k % 8, seed_for(a.seed, 3, k))?;
        let c = rho.coefficient_tensor()?;
        let s = 1 + k % 3;
        let v = if k % 2 == 0 { Variant::Plain } else { Variant::Mu };
        let q = subsystem_correlation(&c, s, v)?.value;
        let search = brute_force_projector_min(&c, s, v, a.samples, a.refine_iters, seed_for(a.seed, 4, k))?;
        Ok((q - search.best).abs())
    })?;
    let lines = [
        CheckLine { name: "qubit-angle-search", cases: a.qubit_states, max_deviation: qubit },
        CheckLine { name: "second-step-vanishes", cases: a.corollary_states, max_deviation: corollary },
        CheckLine { name: "projector-search", cases: a.projector_states, max_deviation: projector },
    ];
    let mut out = String::new();
    let mut failed = Vec::new();
    for l in &lines {
        let pass = l.max_deviation <= ORACLE_TOL;
        if !pass {
            failed.push(l.name);
        }
        let _ = writeln!(
            out,
            "{} cases={} max_deviation={:.3e} tolerance={:.0e} {}",
            l.name,
            l.cases,
            l.max_deviation,
            ORACLE_TOL,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    emit(a.out.as_deref().map(Path::new), &out)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(format!("oracle checks failed: {}", failed.join(", "))))
    }
}
