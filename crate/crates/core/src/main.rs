use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tetherplan::sim::{run_mission_in, write_comparison, write_log, MissionLog, PlannerKind, Scenario};

#[derive(Parser)]
#[command(name = "tetherplan", version, about = "Tether-aware inspection planning simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one mission and write its logs.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_parser = parse_planner)]
        planner: Option<PlannerKind>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run both planners on a scenario and write a joint summary.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_planner(s: &str) -> Result<PlannerKind, String> {
    s.parse().map_err(|e: tetherplan::Error| e.to_string())
}

fn report(log: &MissionLog) {
    let s = &log.summary;
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |t| format!("{t:.1} s"));
    println!(
        "{:<8} inspection {:>9}  return {:>9}  total {:.1} s  coverage {:.2}%  max tether {:.2} m  exceedance {:.1} s{}",
        s.planner.as_str(),
        fmt(s.inspection_time),
        fmt(s.recovery_time),
        s.total_time,
        100.0 * s.final_coverage,
        s.max_tether_length,
        s.exceedance_duration,
        if s.aborted {
            format!("  ABORTED: {}", s.abort_reason.as_deref().unwrap_or("unknown"))
        } else {
            String::new()
        }
    );
}

fn run(cli: Cli) -> tetherplan::Result<bool> {
    match cli.command {
        Command::Run {
            scenario,
            planner,
            out,
            seed,
        } => {
            let mut sc = Scenario::load(&scenario)?;
            if let Some(p) = planner {
                sc.planner = p;
            }
            if let Some(s) = seed {
                sc.seed = s;
            }
            let world = sc.build()?;
            let log = run_mission_in(&sc, &world)?;
            write_log(&log, &out)?;
            report(&log);
            Ok(!log.summary.aborted)
        }
        Command::Compare { scenario, out, seed } => {
            let mut sc = Scenario::load(&scenario)?;
            if let Some(s) = seed {
                sc.seed = s;
            }
            let world = sc.build()?;
            let mut logs = Vec::new();
            for kind in [PlannerKind::React, PlannerKind::Baseline] {
                sc.planner = kind;
                let log = run_mission_in(&sc, &world)?;
                report(&log);
                logs.push(log);
            }
            write_comparison(&logs, &out)?;
            Ok(logs.iter().all(|l| !l.summary.aborted))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
