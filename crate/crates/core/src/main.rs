use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use diversify::bench::data::{
    generate_unit_disc, load_embeddings, load_query, write_embeddings, write_query,
};
use diversify::bench::run::{run_benchmark, RunConfig};
use diversify::eval::run_algorithm;
use diversify::problem::{DivKind, SimKind};
use diversify::{Algorithm, Error, EvalConfig, KernelConfig, ProblemInstance, Result};

#[derive(Parser)]
#[command(name = "diversify", version, about = "Diversified top-K selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetKindArg {
    UnitDisc,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic pool; the query goes to `<stem>_query.csv` next to `--out`.
    Generate {
        #[arg(long, value_enum)]
        kind: DatasetKindArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Select K items from a candidate file and print them as JSON.
    Solve {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        query: PathBuf,
        /// Threshold for motley (min diversity) or bswap (max relevance drop).
        #[arg(long)]
        theta: Option<f64>,
        /// GNE restarts.
        #[arg(long)]
        imax: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_parser = parse_sim_kind)]
        sim_kind: Option<SimKind>,
        #[arg(long, value_parser = parse_div_kind)]
        div_kind: Option<DivKind>,
    },
    /// Run a lambda sweep described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn parse_kind<T: serde::de::DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    let tag = s.trim().to_ascii_uppercase().replace('-', "_");
    serde_json::from_value(serde_json::Value::String(tag)).map_err(|e| e.to_string())
}

fn parse_sim_kind(s: &str) -> std::result::Result<SimKind, String> {
    parse_kind(s)
}

fn parse_div_kind(s: &str) -> std::result::Result<DivKind, String> {
    parse_kind(s)
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    algorithm: Algorithm,
    k: usize,
    lambda: f64,
    ids: Vec<&'a str>,
    indices: &'a [usize],
    objective_quadratic: f64,
    objective_f: f64,
}

fn query_path_for(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "pool".into());
    out.with_file_name(format!("{stem}_query.csv"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { kind, n, seed, out } => {
            let DatasetKindArg::UnitDisc = kind;
            let (query, pool) = generate_unit_disc(n, seed)?;
            let query_out = query_path_for(&out);
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                    path: dir.to_path_buf(),
                    source: e,
                })?;
            }
            write_embeddings(&out, &pool)?;
            write_query(&query_out, &query)?;
            println!("{}", out.display());
            println!("{}", query_out.display());
        }
        Command::Solve {
            algo,
            k,
            lambda,
            candidates,
            query,
            theta,
            imax,
            seed,
            sim_kind,
            div_kind,
        } => {
            let pool = load_embeddings(&candidates)?;
            let query = load_query(&query)?;
            let mut kernel = KernelConfig::default();
            if let Some(s) = sim_kind {
                kernel.sim_kind = s;
            }
            if let Some(d) = div_kind {
                kernel.div_kind = d;
            }
            let mut cfg = EvalConfig::default();
            cfg.heuristic.motley_theta = theta;
            cfg.heuristic.bswap_theta = theta;
            if let Some(i) = imax {
                cfg.heuristic.gne_imax = i;
            }
            if let Some(s) = seed {
                cfg.heuristic.seed = s;
            }
            cfg.heuristic.validate()?;
            let instance = ProblemInstance::from_vectors(&query, &pool, k, lambda, &kernel)?;
            let outcome = run_algorithm(algo, &instance, &cfg)?;
            let sel = &outcome.selection;
            let out = SolveOutput {
                algorithm: algo,
                k,
                lambda,
                ids: sel.indices.iter().map(|&i| pool[i].id.as_str()).collect(),
                indices: &sel.indices,
                objective_quadratic: sel.objective_quadratic,
                objective_f: sel.objective_f,
            };
            println!("{}", serde_json::to_string(&out)?);
        }
        Command::Bench { config, out_dir } => {
            let mut config = RunConfig::from_json_file(&config)?;
            if let Some(dir) = out_dir {
                config.output_dir = dir;
            }
            let report = run_benchmark(&config)?;
            println!("{}", report.results_path.display());
            println!("{}", report.raw_path.display());
            for p in &report.chart_paths {
                println!("{}", p.display());
            }
            let unconverged: usize = report.rows.iter().map(|r| r.n_unconverged).sum();
            if unconverged > 0 {
                eprintln!("warning: {unconverged} l1 runs stopped at the SDP iteration cap");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
