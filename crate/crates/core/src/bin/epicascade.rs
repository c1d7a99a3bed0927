use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use epicascade::scenario::{
    analyze_scenario, export_results, generate_comparative_with, generate_data_driven,
    load_scenario, run_closed_loop, run_open_loop, synthesize_survey, write_scenario, write_survey,
    ComparativeOptions, ExportFormat, Metrics, RunOutput, Scenario,
};
use epicascade::verify::{replay, run_suite, Failure, Suite};
use epicascade::{with_workers, Error};

#[derive(Parser)]
#[command(
    name = "epicascade",
    version,
    about = "Epistemic threshold cascades and threshold-nudging policies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the uncontrolled cascade to its fixed point.
    Simulate(RunArgs),
    /// Run the receding-horizon policy until full adoption or t_max.
    Control(RunArgs),
    /// Largest cohesive subset, predicted final adopters and fairness verdict.
    Analyze {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Run a randomized property suite, or replay a counterexample.
    Verify(VerifyArgs),
    /// Write scenario or agent files.
    Generate {
        #[command(subcommand)]
        what: GenerateCommand,
    },
    /// Run comparative scenarios 1 to 3 on a shared seed and tabulate metrics.
    Compare {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        low: f64,
        #[arg(long, default_value_t = 1.0)]
        high: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_values_t = [ExportFormat::Csv])]
    format: Vec<ExportFormat>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, required_unless_present = "replay")]
    suite: Option<Suite>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving one JSON file per failing trial.
    #[arg(long, default_value = "counterexamples")]
    dump: PathBuf,
    /// Re-check a dumped counterexample instead of running a suite.
    #[arg(long, conflicts_with = "suite")]
    replay: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// 20-agent comparative scenario.
    Comparative {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        low: f64,
        #[arg(long, default_value_t = 1.0)]
        high: f64,
    },
    /// Scenario built from a survey agent file.
    DataDriven {
        #[arg(long)]
        agents: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthetic survey agent file.
    Survey {
        #[arg(long, default_value_t = 168)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failed {
    Property(String),
    Input(Error),
}

impl From<Error> for Failed {
    fn from(e: Error) -> Self {
        Failed::Input(e)
    }
}

type CmdResult = Result<(), Failed>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match with_workers(|| dispatch(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failed::Property(msg)) => {
            eprintln!("property failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failed::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Simulate(args) => simulate(&args),
        Command::Control(args) => control(&args),
        Command::Analyze { scenario } => analyze(&scenario),
        Command::Verify(args) => verify(&args),
        Command::Generate { what } => generate(what),
        Command::Compare {
            seed,
            out,
            low,
            high,
        } => compare(seed, out.as_deref(), low, high),
    }
}

fn simulate(args: &RunArgs) -> CmdResult {
    let s = load_scenario(&args.scenario)?;
    let run = run_open_loop(&s)?;
    println!("S** = {}", run.trajectory.s_star_star());
    println!("t_fixed = {}", run.summary.t_fixed);
    if !run.summary.fixed_point {
        println!("note: step bound reached before a fixed point");
    }
    export_results(&RunOutput::OpenLoop(run), &args.out, &args.format)?;
    Ok(())
}

fn print_metrics(m: &Metrics) {
    let t = m
        .t_star_star
        .map_or_else(|| "not reached".to_string(), |t| t.to_string());
    println!(
        "{}: C = {:.4}, C_bar = {:.4}, t** = {t}",
        m.scenario_label, m.c, m.c_bar
    );
}

fn control(args: &RunArgs) -> CmdResult {
    let s = load_scenario(&args.scenario)?;
    let run = run_closed_loop(&s)?;
    print_metrics(&run.metrics);
    export_results(&RunOutput::ClosedLoop(run), &args.out, &args.format)?;
    Ok(())
}

fn analyze(path: &Path) -> CmdResult {
    let s = load_scenario(path)?;
    let a = analyze_scenario(&s)?;
    let fmt = |v: &[usize]| {
        let parts: Vec<String> = v.iter().map(usize::to_string).collect();
        format!("{{{}}}", parts.join(","))
    };
    println!(
        "largest cohesive subset of non-seeds: {}",
        fmt(&a.largest_cohesive)
    );
    println!("predicted S** = {}", fmt(&a.predicted_s_star_star));
    println!("simulated S** = {}", fmt(&a.simulated_s_star_star));
    println!(
        "epistemically fair: {}",
        if a.epistemically_fair { "yes" } else { "no" }
    );
    if a.consistent {
        Ok(())
    } else {
        Err(Failed::Property(
            "prediction and simulation disagree".into(),
        ))
    }
}

fn verify(args: &VerifyArgs) -> CmdResult {
    if let Some(path) = &args.replay {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let failure: Failure = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.clone(),
            message: e.to_string(),
        })?;
        return if replay(&failure.counterexample)? {
            Err(Failed::Property(format!("{} still fails", path.display())))
        } else {
            println!("{}: passes", path.display());
            Ok(())
        };
    }
    let suite = args.suite.expect("clap enforces suite or replay");
    let report = run_suite(suite, args.trials, args.seed);
    println!("{report}");
    if report.passed() {
        return Ok(());
    }
    fs::create_dir_all(&args.dump).map_err(Error::from)?;
    for f in &report.failures {
        let path = args
            .dump
            .join(format!("{suite}-seed{}-trial{}.json", f.rng_seed, f.trial));
        let text = serde_json::to_string_pretty(f).map_err(Error::from)?;
        fs::write(&path, text + "\n").map_err(Error::from)?;
        println!("counterexample: {}", path.display());
    }
    if let Some(first) = report.failures.first() {
        println!(
            "{}",
            serde_json::to_string_pretty(first).map_err(Error::from)?
        );
    }
    Err(Failed::Property(format!(
        "{} of {} checked trials failed",
        report.failures.len(),
        report.checked
    )))
}

fn comparative_options(low: f64, high: f64) -> ComparativeOptions {
    ComparativeOptions {
        low,
        high,
        ..ComparativeOptions::default()
    }
}

fn generate(what: GenerateCommand) -> CmdResult {
    match what {
        GenerateCommand::Comparative {
            id,
            seed,
            out,
            low,
            high,
        } => {
            let s = generate_comparative_with(id, seed, &comparative_options(low, high))?;
            write_scenario(&s.file, &out)?;
        }
        GenerateCommand::DataDriven { agents, seed, out } => {
            let s = generate_data_driven(&agents, seed)?;
            write_scenario(&s.file, &out)?;
        }
        GenerateCommand::Survey { n, seed, out } => {
            write_survey(&synthesize_survey(n, seed), &out)?;
        }
    }
    Ok(())
}

fn compare(seed: u64, out: Option<&Path>, low: f64, high: f64) -> CmdResult {
    let opts = comparative_options(low, high);
    let mut rows = String::from("scenario,C,C_bar,t_star_star\n");
    for id in 1..=3 {
        let s: Scenario = generate_comparative_with(id, seed, &opts)?;
        let run = run_closed_loop(&s)?;
        print_metrics(&run.metrics);
        let m = &run.metrics;
        rows.push_str(&format!(
            "{},{},{},{}\n",
            m.scenario_label,
            m.c,
            m.c_bar,
            m.t_star_star.map_or_else(String::new, |t| t.to_string())
        ));
        if let Some(dir) = out {
            export_results(
                &RunOutput::ClosedLoop(run),
                dir.join(format!("scenario{id}")),
                &[ExportFormat::Csv],
            )?;
        }
    }
    if let Some(dir) = out {
        fs::write(dir.join("comparison.csv"), rows).map_err(Error::from)?;
    }
    Ok(())
}
