use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use twistguide_lab::{load_scenario, mesh, output_dir, report_manifest, run_config, RunOptions, OUTPUT_ENV};

/// Spectral experiments on twisted and bent tubes.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSV tables, report and manifest.
    Run {
        config: PathBuf,
        /// Output directory (default: the scenario's `output`, else $TWISTGUIDE_OUT/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for independent solves.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Seed for the iterative solvers' start vectors.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify a manifest and print the report of its results.
    Report { manifest: PathBuf },
    /// Write the tube surface as a Wavefront OBJ file.
    ExportMesh {
        config: PathBuf,
        /// Target file (default: <output dir>/<name>.obj).
        #[arg(long)]
        out: Option<PathBuf>,
    },
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

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out, threads, seed } => {
            let (dir, manifest) = run_config(&config, out.as_deref(), &RunOptions { threads: threads.max(1), seed })?;
            let report = fs::read_to_string(dir.join("report.txt")).context("reading the report back")?;
            print!("{report}");
            println!("{} file(s) in {}", manifest.artifacts.len() + 1, dir.display());
        }
        Command::Report { manifest } => print!("{}", report_manifest(&manifest)?),
        Command::ExportMesh { config, out } => {
            let sc = load_scenario(&config)?;
            let path = match out {
                Some(p) => p,
                None => {
                    let env_root = std::env::var_os(OUTPUT_ENV).map(PathBuf::from);
                    output_dir(&sc, &config, None, env_root.as_deref()).join(format!("{}.obj", sc.name))
                }
            };
            let m = mesh::scenario_mesh(&sc)?;
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            fs::write(&path, mesh::to_obj(&m)).with_context(|| format!("writing {}", path.display()))?;
            println!("{} vertices, {} faces -> {}", m.vertices.len(), m.triangles.len(), path.display());
        }
    }
    Ok(())
}
