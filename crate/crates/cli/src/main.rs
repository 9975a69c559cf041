use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaptforge::baselines::{adapt_vqe, qeb_adapt_vqe};
use adaptforge::exact::sector_basis;
use adaptforge::fixtures::{available_bonds, fixtures_root};
use adaptforge::hamio::{bond_label, hf_energy};
use adaptforge::ladder::run_ladder;
use adaptforge::pools::{generate_pool, PoolFamily};
use adaptforge::resources::{CostModel, Method, RunRecord, CSV_HEADER};
use adaptforge::Problem;
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

mod config;

use config::ConfigFile;

#[derive(Parser, Debug)]
#[command(name = "adaptforge", version, about = "Adaptive VQE scans and ablations on exact statevectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run solvers across bond lengths.
    Scan(ScanArgs),
    /// Run every ladder level across bond lengths.
    Ablate(AblateArgs),
    /// Print the exact ground-state energy per geometry.
    Fci(FixtureArgs),
    /// List a pool's excitations for one geometry.
    PoolDump(PoolDumpArgs),
    /// Summarize the qubit Hamiltonian per geometry.
    HamInfo(FixtureArgs),
}

#[derive(Args, Debug)]
struct FixtureArgs {
    #[arg(long)]
    molecule: String,
    /// Comma-separated bond lengths in angstrom; all fixtures when omitted.
    #[arg(long, value_delimiter = ',')]
    bonds: Vec<f64>,
    /// Overridden by ADAPTFORGE_FIXTURES.
    #[arg(long)]
    fixtures_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    molecule: String,
    #[arg(long, value_delimiter = ',', required = true)]
    bonds: Vec<f64>,
    #[arg(long)]
    fixtures_dir: Option<PathBuf>,
    /// Ladder preset name (lih, h2o, f2, custom) or preset file.
    #[arg(long)]
    preset: Option<String>,
    /// JSON file with optional `ladder`, `adapt` and `qeb` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Two-qubit gates per single and per double excitation, as `a,b`.
    #[arg(long, default_value = "2,13")]
    cost_model: CostModel,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Blank resource columns of rows outside chemical precision.
    #[arg(long)]
    precision_only: bool,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_delimiter = ',', default_value = "ladder", value_parser = parse_method)]
    method: Vec<Method>,
    /// Ladder level; the preset's level when omitted.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=5))]
    level: Option<u8>,
}

#[derive(Args, Debug)]
struct AblateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Levels to run; 0 through 5 when omitted.
    #[arg(long = "level", value_delimiter = ',', value_parser = clap::value_parser!(u8).range(0..=5))]
    levels: Vec<u8>,
}

#[derive(Args, Debug)]
struct PoolDumpArgs {
    #[arg(long)]
    molecule: String,
    #[arg(long)]
    bond: f64,
    #[arg(long, default_value = "uccsd")]
    pool: PoolFamily,
    #[arg(long, default_value = "2,13")]
    cost_model: CostModel,
    #[arg(long)]
    fixtures_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: adaptforge::Error| e.to_string())
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    method: Method,
    level: Option<u8>,
    bond: f64,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    within_precision: bool,
    #[serde(flatten)]
    record: &'a RunRecord,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'a str,
    molecule: &'a str,
    fixtures: String,
    cost_model: String,
    records: Vec<JsonRow<'a>>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("failed to write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn load_problems(root: &Path, molecule: &str, bonds: &[f64]) -> Result<Vec<Problem>> {
    bonds.iter().map(|&r| Ok(Problem::load(root, molecule, r)?)).collect()
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(threads).build()?)
}

fn run_cells(command: &str, args: &RunArgs, cells: Vec<Cell>) -> Result<()> {
    if args.bonds.is_empty() {
        bail!("no bond lengths given");
    }
    let molecule = args.molecule.to_ascii_lowercase();
    let root = fixtures_root(args.fixtures_dir.as_deref());
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let problems = load_problems(&root, &molecule, &args.bonds)?;
    let problem_at = |bond: f64| {
        let k = args.bonds.iter().position(|&b| b == bond).expect("cells use requested bonds");
        &problems[k]
    };
    let cost = args.cost_model;

    let run = |cell: &Cell| -> Result<RunRecord> {
        let problem = problem_at(cell.bond);
        let rec = match cell.method {
            Method::Adapt | Method::Qeb => {
                let pool = generate_pool(PoolFamily::Uccsd, problem.n_qubits(), problem.reference())?;
                if cell.method == Method::Adapt {
                    adapt_vqe(problem, &pool, &config::adapt(&file)?, &cost)?
                } else {
                    qeb_adapt_vqe(problem, &pool, &config::qeb(&molecule, &file)?, &cost)?
                }
            }
            Method::Ladder => {
                let cfg = config::ladder(&molecule, args.preset.as_deref(), &file, cell.level)?;
                run_ladder(problem, &cfg, &cost)?
            }
        };
        Ok(rec)
    };
    let results: Vec<Result<RunRecord>> = thread_pool(args.threads)?.install(|| cells.par_iter().map(run).collect());
    let mut records = Vec::with_capacity(results.len());
    for (cell, r) in cells.iter().zip(results) {
        let level = cell.level.map(|l| format!(" level {l}")).unwrap_or_default();
        records.push(r.with_context(|| format!("{} at {} A{level}", cell.method, cell.bond))?);
    }

    let text = match args.format {
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for rec in &records {
                s.push_str(&rec.csv_row(args.precision_only));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let report = JsonReport {
                command,
                molecule: &molecule,
                fixtures: root.display().to_string(),
                cost_model: cost.to_string(),
                records: records
                    .iter()
                    .map(|record| JsonRow {
                        within_precision: record.within_precision(),
                        record,
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_scan(args: &ScanArgs) -> Result<()> {
    let mut cells = Vec::new();
    for &method in &args.method {
        for &bond in &args.run.bonds {
            let level = if method == Method::Ladder { args.level } else { None };
            cells.push(Cell { method, level, bond });
        }
    }
    run_cells("scan", &args.run, cells)
}

fn cmd_ablate(args: &AblateArgs) -> Result<()> {
    let levels = if args.levels.is_empty() { (0..=5).collect() } else { args.levels.clone() };
    let mut cells = Vec::new();
    for &level in &levels {
        for &bond in &args.run.bonds {
            cells.push(Cell {
                method: Method::Ladder,
                level: Some(level),
                bond,
            });
        }
    }
    run_cells("ablate", &args.run, cells)
}

fn fixture_bonds(args: &FixtureArgs, root: &Path) -> Result<Vec<f64>> {
    if args.bonds.is_empty() {
        Ok(available_bonds(root, &args.molecule)?)
    } else {
        Ok(args.bonds.clone())
    }
}

fn cmd_fci(args: &FixtureArgs) -> Result<()> {
    let root = fixtures_root(args.fixtures_dir.as_deref());
    let molecule = args.molecule.to_ascii_lowercase();
    let mut s = String::from("molecule,bond_length,fci\n");
    for bond in fixture_bonds(args, &root)? {
        let p = Problem::load(&root, &molecule, bond)?;
        s.push_str(&format!("{molecule},{},{:.10}\n", bond_label(bond), p.fci()));
    }
    emit(args.out.as_deref(), &s)
}

fn cmd_ham_info(args: &FixtureArgs) -> Result<()> {
    let root = fixtures_root(args.fixtures_dir.as_deref());
    let molecule = args.molecule.to_ascii_lowercase();
    let mut s = String::from("molecule,bond_length,n_qubits,n_electrons,n_terms,sector_dim,hf,fci\n");
    for bond in fixture_bonds(args, &root)? {
        let p = Problem::load(&root, &molecule, bond)?;
        let ints = p.integrals();
        let sector = sector_basis(p.n_qubits(), ints.n_electrons(), Some(p.reference().twice_sz())).len();
        s.push_str(&format!(
            "{molecule},{},{},{},{},{sector},{:.10},{:.10}\n",
            bond_label(bond),
            p.n_qubits(),
            ints.n_electrons(),
            p.hamiltonian().terms().len(),
            hf_energy(ints),
            p.fci()
        ));
    }
    emit(args.out.as_deref(), &s)
}

fn cmd_pool_dump(args: &PoolDumpArgs) -> Result<()> {
    let root = fixtures_root(args.fixtures_dir.as_deref());
    let p = Problem::load(&root, &args.molecule, args.bond)?;
    let pool = generate_pool(args.pool, p.n_qubits(), p.reference())?;
    let mut s = String::from("index,kind,excitation,paired,two_qubit_gates\n");
    for (k, o) in pool.iter().enumerate() {
        let kind = if o.is_double() { "double" } else { "single" };
        s.push_str(&format!("{k},{kind},{o},{},{}\n", o.is_paired(), args.cost_model.cost(o)));
    }
    emit(args.out.as_deref(), &s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Scan(a) => cmd_scan(a),
        Command::Ablate(a) => cmd_ablate(a),
        Command::Fci(a) => cmd_fci(a),
        Command::PoolDump(a) => cmd_pool_dump(a),
        Command::HamInfo(a) => cmd_ham_info(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
