use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use pms1::bench::{
    indicators, render_report, run_bench, solve_instance, write_records_csv, write_records_jsonl,
    BenchConfig, ModelKind, ReportFormat, SolveConfig,
};
use pms1::bounds::horizon_ub;
use pms1::instance::{generate, parse_instance, table3_grid, GenParams, Instance, Tier};
use pms1::milp::{export_lp, export_mps};
use pms1::oracle::{brute_force, DEFAULT_CAP};
use pms1::schedule::{gantt_svg, validate, Schedule};
use pms1::{Error, Result};

/// Defaults read from a key=value file named by `--config` or `PMS1_CONFIG`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    time_limit: Option<f64>,
    jobs: Option<usize>,
    seed: Option<u64>,
}

#[derive(Parser)]
#[command(name = "pms1", version, about = "Parallel machines with a common setup server")]
struct Cli {
    #[arg(long, global = true, env = "PMS1_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw random instances.
    Generate {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        replications: u32,
        /// Directory for one file per instance; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bounds and the heuristic horizon.
    Bounds {
        instance: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build and solve one model.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "fft")]
        model: ModelKind,
        #[arg(long)]
        time_limit: Option<f64>,
        /// Write the model; `.mps` selects MPS, anything else LP.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Write the schedule as JSON.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Solve even when the heuristic already meets the lower bound.
        #[arg(long)]
        no_shortcut: bool,
    },
    /// Exact optimum by enumeration of server orders.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Solve a generated grid and report indicators.
    Bench {
        #[arg(long, default_value = "small")]
        grid: Tier,
        #[arg(long, value_delimiter = ',', default_value = "fff,fft,fft-warm,tivi")]
        models: Vec<ModelKind>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Keep only combinations with at most this many jobs.
        #[arg(long)]
        max_n: Option<u32>,
        /// Replications per combination.
        #[arg(long)]
        replications: Option<u32>,
        /// Directory for records.csv, records.jsonl and report files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
    },
    /// Render a schedule as SVG.
    Gantt {
        instance: PathBuf,
        /// Schedule JSON; the heuristic horizon witness when absent.
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&fs::read_to_string(path)?)
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    toml::from_str(&fs::read_to_string(path)?)
        .map_err(|e| Error::InvalidParams(format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Generate {
            n,
            m,
            alpha,
            rho,
            seed,
            replications,
            out,
        } => {
            let params = GenParams {
                n,
                m,
                alpha,
                rho,
                seed: seed.or(cfg.seed).unwrap_or(0),
                replications,
            };
            let instances = generate(&params)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    for (rep, inst) in instances.iter().enumerate() {
                        let path = dir.join(format!("{}.txt", params.instance_id(rep as u32)));
                        fs::write(&path, inst.render())?;
                        println!("{}", path.display());
                    }
                }
                None => {
                    for inst in &instances {
                        print!("{}", inst.render());
                    }
                }
            }
        }
        Command::Bounds { instance, json } => {
            let report = horizon_ub(&read_instance(&instance)?);
            if json {
                println!("{}", serde_json::to_string_pretty(&report.to_json())?);
            } else {
                println!("{report}");
            }
        }
        Command::Solve {
            instance,
            model,
            time_limit,
            export,
            schedule,
            no_shortcut,
        } => {
            let inst = read_instance(&instance)?;
            let bounds = horizon_ub(&inst);
            if let Some(path) = &export {
                let built = pms1::bench::build_model(model, &inst, &bounds)?;
                let text = match path.extension().and_then(|e| e.to_str()) {
                    Some("mps") => export_mps(&built.model)?,
                    _ => export_lp(&built.model)?,
                };
                fs::write(path, text)?;
            }
            let solve_cfg = SolveConfig {
                time_limit: time_limit.or(cfg.time_limit),
                shortcut_tight: !no_shortcut,
                ..SolveConfig::default()
            };
            let s = solve_instance(&inst, &bounds, model, &solve_cfg)?;
            println!("model           {model}");
            println!("horizon         {}", bounds.ub);
            println!("variables       {}", s.var_count);
            println!("constraints     {}", s.constraint_count);
            if let Some(lp) = s.lp_bound {
                println!("lp bound        {lp:.4}");
            }
            println!("status          {}", s.outcome.status);
            if let Some(obj) = s.outcome.objective {
                println!("objective       {obj}");
            }
            if let Some(b) = s.outcome.best_bound {
                println!("best bound      {b}");
            }
            println!("wall time (s)   {:.3}", s.outcome.wall_time);
            if let Some(msg) = &s.outcome.message {
                println!("note            {msg}");
            }
            if let Some(sched) = &s.schedule {
                let violations = validate(sched, &inst);
                println!("schedule valid  {}", violations.is_empty());
                if let Some(path) = &schedule {
                    fs::write(path, sched.to_json())?;
                }
            }
        }
        Command::Oracle { instance, cap } => {
            let inst = read_instance(&instance)?;
            let r = brute_force(&inst, cap)?;
            println!("optimum         {}", r.optimum);
            println!("server order    {:?}", r.witness.server_order());
            println!("orders explored {}", r.permutations_explored);
        }
        Command::Bench {
            grid,
            models,
            jobs,
            time_limit,
            seed,
            max_n,
            replications,
            out,
            format,
        } => {
            let mut params = table3_grid(grid, seed.or(cfg.seed).unwrap_or(0));
            if let Some(limit) = max_n {
                params.retain(|p| p.n <= limit);
            }
            if let Some(r) = replications {
                params.iter_mut().for_each(|p| p.replications = r);
            }
            let bench_cfg = BenchConfig {
                models,
                time_limit: time_limit.or(cfg.time_limit).or(Some(3600.0)),
                jobs: jobs.or(cfg.jobs).unwrap_or(1),
                ..BenchConfig::default()
            };
            let records = run_bench(&params, &bench_cfg)?;
            let report = render_report(&indicators(&records), format);
            if let Some(dir) = &out {
                fs::create_dir_all(dir)?;
                write_records_csv(&records, BufWriter::new(fs::File::create(dir.join("records.csv"))?))?;
                write_records_jsonl(&records, BufWriter::new(fs::File::create(dir.join("records.jsonl"))?))?;
                let ext = match format {
                    ReportFormat::Csv => "csv",
                    ReportFormat::Markdown => "md",
                };
                fs::write(dir.join(format!("report.{ext}")), &report)?;
            }
            print!("{report}");
        }
        Command::Gantt {
            instance,
            schedule,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let sched = match schedule {
                Some(path) => Schedule::from_json(&fs::read_to_string(path)?, &inst)?,
                None => horizon_ub(&inst).ub_witness,
            };
            let violations = validate(&sched, &inst);
            if !violations.is_empty() {
                for v in &violations {
                    eprintln!("{v}");
                }
                return Err(Error::Schedule("schedule is not feasible".into()));
            }
            write_out(out.as_deref(), &gantt_svg(&sched))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn,highs=error")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
