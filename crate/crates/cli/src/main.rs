use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mulewalk_cli::{
    curve_csv, curve_table, emit_day_estimate, emit_figure7, emit_table, emit_table1, eval,
    eval_output, figure7_probabilities, parse_mode, parse_prob, run_bisim_check, write_output,
    CliError, EstimateParams, ModelChoice, OutputFormat, RunConfig, TableModel,
};
use mulewalk_core::{NumberMode, Prob};

#[derive(Parser)]
#[command(
    name = "mulewalk",
    version,
    about = "Expected walking distance of a piecer at a spinning mule"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// exact or float
    #[arg(long, default_value = "float", value_parser = parse_mode)]
    mode: NumberMode,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    output: OutputFormat,
    /// Write CSV to this file instead of printing.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Single-stroke expectation, N = 1..10 broken threads.
    Table1 {
        #[arg(long, default_value_t = 10_000)]
        width: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exactly N broken, one round.
    Table2 {
        #[arg(long, default_value_t = 10)]
        width: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exactly N broken, repeated rounds.
    Table3 {
        #[arg(long, default_value_t = 10)]
        width: usize,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Independent breakage with p = N/width, repeated rounds.
    Table4 {
        #[arg(long, default_value_t = 10)]
        width: usize,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Relative distance against breakage probability.
    Figure7 {
        #[arg(long, default_value_t = 50)]
        width: usize,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        init: usize,
        /// Comma separated; defaults to the 21 plotted probabilities.
        #[arg(long, value_delimiter = ',', value_parser = parse_prob)]
        probs: Vec<Prob>,
        #[command(flatten)]
        common: Common,
    },
    /// Walking distance over a working day.
    Estimate {
        #[arg(long, default_value = "1/220", value_parser = parse_prob)]
        prob: Prob,
        #[arg(long, default_value_t = 50)]
        width: usize,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        /// Mule width in meters.
        #[arg(long, default_value_t = 46.0)]
        mule_width: f64,
        #[arg(long, default_value_t = 4.0)]
        strokes_per_minute: f64,
        #[arg(long, default_value_t = 10.0)]
        hours: f64,
    },
    /// Compare the natural and optimized systems up to bisimulation.
    Bisim {
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long, default_value = "1/10", value_parser = parse_prob)]
        prob: Prob,
        #[arg(long, default_value = "exact", value_parser = parse_mode)]
        mode: NumberMode,
        /// Write both quotients to this file.
        #[arg(long)]
        out: Option<String>,
    },
    /// Any single configuration.
    Eval {
        #[arg(long, value_enum)]
        model: ModelChoice,
        #[arg(long, default_value_t = 10)]
        width: usize,
        #[arg(long)]
        broken: Option<usize>,
        #[arg(long, value_parser = parse_prob)]
        prob: Option<Prob>,
        #[arg(long, default_value_t = 0)]
        init: usize,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// `--out` always gets CSV; otherwise print in the chosen format.
fn deliver(
    common: &Common,
    table: impl FnOnce() -> String,
    csv: impl FnOnce() -> String,
) -> Result<(), CliError> {
    match (&common.out, common.output) {
        (Some(path), _) => write_output(path, &csv()),
        (None, OutputFormat::Csv) => {
            print!("{}", csv());
            Ok(())
        }
        (None, OutputFormat::Table) => {
            print!("{}", table());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Table1 { width, common } => {
            let g = emit_table1(width, common.mode)?;
            deliver(&common, || g.to_table(), || g.to_csv())
        }
        Command::Table2 { width, common } => {
            let g = emit_table(TableModel::FixedN, width, 1, common.mode)?;
            deliver(&common, || g.to_table(), || g.to_csv())
        }
        Command::Table3 {
            width,
            rounds,
            common,
        } => {
            let g = emit_table(TableModel::FixedN, width, rounds, common.mode)?;
            deliver(&common, || g.to_table(), || g.to_csv())
        }
        Command::Table4 {
            width,
            rounds,
            common,
        } => {
            let g = emit_table(TableModel::Natural, width, rounds, common.mode)?;
            deliver(&common, || g.to_table(), || g.to_csv())
        }
        Command::Figure7 {
            width,
            rounds,
            init,
            probs,
            common,
        } => {
            let probs = if probs.is_empty() {
                figure7_probabilities()
            } else {
                probs
            };
            let points = emit_figure7(width, rounds, init, &probs, common.mode)?;
            deliver(&common, || curve_table(&points), || curve_csv(&points))
        }
        Command::Estimate {
            prob,
            width,
            rounds,
            mule_width,
            strokes_per_minute,
            hours,
        } => {
            let e = emit_day_estimate(&EstimateParams {
                prob,
                width,
                max_rounds: rounds,
                mule_width_m: mule_width,
                strokes_per_minute,
                hours,
            })?;
            println!("{e}");
            Ok(())
        }
        Command::Bisim {
            width,
            prob,
            mode,
            out,
        } => {
            let report = run_bisim_check(width, &prob, mode)?;
            println!("{report}");
            if let Some(path) = out {
                let (natural, optimized) = &report.quotients;
                write_output(
                    &path,
                    &format!("# natural\n{natural}# optimized\n{optimized}"),
                )?;
            }
            Ok(())
        }
        Command::Eval {
            model,
            width,
            broken,
            prob,
            init,
            rounds,
            common,
        } => {
            let config = RunConfig {
                model,
                width,
                n_broken: broken,
                prob,
                init_pos: init,
                max_rounds: rounds,
                number_mode: common.mode,
                output: common.output,
            };
            let cell = eval(&config)?;
            let csv_config = RunConfig {
                output: OutputFormat::Csv,
                ..config.clone()
            };
            deliver(
                &common,
                || eval_output(&config, &cell),
                || eval_output(&csv_config, &cell),
            )
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
