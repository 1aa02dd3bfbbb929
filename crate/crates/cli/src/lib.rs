//! Reproduction harness for the walking-distance tables, the probability
//! curve, the daily-distance estimate and the bisimulation check.
//!
//! Every number rendered here comes straight from a `mulewalk-core` call;
//! this crate only chooses parameters, runs cells in parallel and formats.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use clap::ValueEnum;
use mulewalk_core::closed_form::expected_distance;
use mulewalk_core::piecer::value_iteration;
use mulewalk_core::plts::{bisimilar, build_plts, quotient};
use mulewalk_core::{ClosedFormInstance, Exact, ModelKind, MuleModel, NumberMode, Prob, Scalar};
use rayon::prelude::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mulewalk_core::Error),
    #[error("model {0} needs --broken")]
    MissingBroken(ModelChoice),
    #[error("model {0} needs --prob")]
    MissingProb(ModelChoice),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    ClosedForm,
    FixedN,
    Natural,
    NaturalOpt,
}

impl fmt::Display for ModelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub width: usize,
    pub n_broken: Option<usize>,
    pub prob: Option<Prob>,
    pub init_pos: usize,
    pub max_rounds: usize,
    pub number_mode: NumberMode,
    pub output: OutputFormat,
}

impl RunConfig {
    pub fn new(model: ModelChoice) -> Self {
        RunConfig {
            model,
            width: 10,
            n_broken: None,
            prob: None,
            init_pos: 0,
            max_rounds: 50,
            number_mode: NumberMode::Float,
            output: OutputFormat::Table,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.model {
            ModelChoice::ClosedForm | ModelChoice::FixedN if self.n_broken.is_none() => {
                Err(CliError::MissingBroken(self.model))
            }
            ModelChoice::Natural | ModelChoice::NaturalOpt if self.prob.is_none() => {
                Err(CliError::MissingProb(self.model))
            }
            _ => Ok(()),
        }
    }

    fn model_kind(&self) -> Result<ModelKind> {
        self.validate()?;
        Ok(match self.model {
            ModelChoice::ClosedForm | ModelChoice::FixedN => {
                ModelKind::FixedN(self.n_broken.unwrap())
            }
            ModelChoice::Natural => ModelKind::Natural(self.prob.clone().unwrap()),
            ModelChoice::NaturalOpt => ModelKind::NaturalOpt(self.prob.clone().unwrap()),
        })
    }
}

/// A computed value, with its exact form when it was computed exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub value: f64,
    pub exact: Option<Exact>,
}

impl Cell {
    fn from_scalar<S: Scalar>(x: S) -> Self {
        let value = x.to_f64();
        let exact = match S::MODE {
            NumberMode::Exact => Some(x.to_string().parse().expect("rational round-trips")),
            NumberMode::Float => None,
        };
        Cell { value, exact }
    }
}

/// Half-up rounding to `decimals` places. The slack absorbs float error
/// on values whose exact expansion ends in 5.
pub fn round_half_up(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale + 1e-7).round() / scale
}

pub fn format_fixed(x: f64, decimals: usize) -> String {
    format!("{:.*}", decimals, round_half_up(x, decimals as i32))
}

const CSV_DECIMALS: usize = 12;

/// Rows by columns of results, rendered as a fixed-width table or CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub title: String,
    pub row_header: String,
    pub col_header: String,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Row-major.
    pub cells: Vec<Vec<Cell>>,
}

impl Grid {
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.cells[row][col].value
    }

    /// The value as the table shows it.
    pub fn display_value(&self, row: usize, col: usize) -> f64 {
        round_half_up(self.value(row, col), 4)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.title).unwrap();
        write!(out, "{:>6} |", self.row_header).unwrap();
        for c in &self.col_labels {
            write!(out, " {c:>8}").unwrap();
        }
        writeln!(out, "    ({})", self.col_header).unwrap();
        writeln!(out, "{}", "-".repeat(8 + 9 * self.col_labels.len())).unwrap();
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            write!(out, "{label:>6} |").unwrap();
            for cell in row {
                write!(out, " {:>8}", format_fixed(cell.value, 4)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let exact = self.cells.iter().flatten().any(|c| c.exact.is_some());
        let mut out = format!("{},{},relative_distance", self.row_header, self.col_header);
        if exact {
            out.push_str(",exact");
        }
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            for (col, cell) in self.col_labels.iter().zip(row) {
                write!(out, "{label},{col},{:.*}", CSV_DECIMALS, cell.value).unwrap();
                if let Some(q) = &cell.exact {
                    write!(out, ",{q}").unwrap();
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => self.to_table(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

/// Column fractions 0.0, 0.1, ..., 0.5 of the width.
const TENTHS: [usize; 6] = [0, 1, 2, 3, 4, 5];

fn tenth_labels() -> Vec<String> {
    TENTHS.iter().map(|t| format!("0.{t}")).collect()
}

fn compute_grid<F>(rows: usize, cols: usize, cell: F) -> Result<Vec<Vec<Cell>>>
where
    F: Fn(usize, usize) -> Result<Cell> + Sync,
{
    let flat: Vec<Cell> = (0..rows * cols)
        .into_par_iter()
        .map(|i| cell(i / cols, i % cols))
        .collect::<Result<_>>()?;
    Ok(flat.chunks(cols).map(<[Cell]>::to_vec).collect())
}

fn closed_form_cell<S: Scalar>(width: usize, n: usize, pos: usize) -> Result<Cell> {
    let inst = ClosedFormInstance::new(width, n, pos)?;
    Ok(Cell::from_scalar(expected_distance::<S>(&inst).relative))
}

/// Single-stroke expectation with `N = 1..=10` breaks and the piecer
/// starting at `pos = width · 0.0 ... 0.5`.
pub fn emit_table1(width: usize, mode: NumberMode) -> Result<Grid> {
    let cells = compute_grid(10, TENTHS.len(), |row, col| {
        let (n, pos) = (row + 1, width * TENTHS[col] / 10);
        match mode {
            NumberMode::Float => closed_form_cell::<f64>(width, n, pos),
            NumberMode::Exact => closed_form_cell::<Exact>(width, n, pos),
        }
    })?;
    Ok(Grid {
        title: format!("Single stroke, width={width}"),
        row_header: "N".into(),
        col_header: "pos/width".into(),
        row_labels: (1..=10).map(|n| n.to_string()).collect(),
        col_labels: tenth_labels(),
        cells,
    })
}

/// Which process generates the rows of [`emit_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableModel {
    /// Row `k` breaks exactly `k` threads.
    FixedN,
    /// Row `k` breaks each thread with probability `k / width`.
    Natural,
}

fn table_cell<S: Scalar>(kind: ModelKind, width: usize, pos: usize, rounds: usize) -> Result<Cell> {
    let model = MuleModel::<S>::new(kind, width)?;
    Ok(Cell::from_scalar(value_iteration(&model, pos, rounds)?))
}

/// Rows `k = 1..=width`, columns the starting thread `width · 0.0 ... 0.5`.
pub fn emit_table(
    model: TableModel,
    width: usize,
    max_rounds: usize,
    mode: NumberMode,
) -> Result<Grid> {
    if width == 0 {
        return Err(mulewalk_core::Error::ZeroWidth.into());
    }
    let cells = compute_grid(width, TENTHS.len(), |row, col| {
        let k = row + 1;
        let kind = match model {
            TableModel::FixedN => ModelKind::FixedN(k),
            TableModel::Natural => ModelKind::Natural(Prob::from_ratio(k as u64, width as u64)?),
        };
        let pos = width * TENTHS[col] / 10;
        match mode {
            NumberMode::Float => table_cell::<f64>(kind, width, pos, max_rounds),
            NumberMode::Exact => table_cell::<Exact>(kind, width, pos, max_rounds),
        }
    })?;
    let (row_header, what) = match model {
        TableModel::FixedN => ("N", "exactly N broken"),
        TableModel::Natural => ("N", "p = N/width"),
    };
    Ok(Grid {
        title: format!("{what}, width={width}, Max={max_rounds}"),
        row_header: row_header.into(),
        col_header: "pos/width".into(),
        row_labels: (1..=width).map(|n| n.to_string()).collect(),
        col_labels: tenth_labels(),
        cells,
    })
}

/// The probabilities plotted on the published curve.
pub fn figure7_probabilities() -> Vec<Prob> {
    const HUNDREDTHS: [u64; 21] = [
        0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 16, 20, 30, 40, 50, 60, 80, 90, 100,
    ];
    HUNDREDTHS
        .iter()
        .map(|&h| Prob::from_ratio(h, 100).expect("h <= 100"))
        .collect()
}

fn curve_point<S: Scalar>(p: &Prob, width: usize, rounds: usize, init: usize) -> Result<Cell> {
    let model = MuleModel::<S>::natural_opt(width, p.clone())?;
    Ok(Cell::from_scalar(value_iteration(&model, init, rounds)?))
}

/// Relative distance of the optimized natural model at each probability.
pub fn emit_figure7(
    width: usize,
    max_rounds: usize,
    init_pos: usize,
    probs: &[Prob],
    mode: NumberMode,
) -> Result<Vec<(Prob, Cell)>> {
    probs
        .par_iter()
        .map(|p| {
            let cell = match mode {
                NumberMode::Float => curve_point::<f64>(p, width, max_rounds, init_pos)?,
                NumberMode::Exact => curve_point::<Exact>(p, width, max_rounds, init_pos)?,
            };
            Ok((p.clone(), cell))
        })
        .collect()
}

pub fn curve_csv(points: &[(Prob, Cell)]) -> String {
    let mut out = String::from("prob,relative_distance\n");
    for (p, cell) in points {
        writeln!(out, "{},{:.*}", p, CSV_DECIMALS, cell.value).unwrap();
    }
    out
}

pub fn curve_table(points: &[(Prob, Cell)]) -> String {
    let mut out = format!("{:>8}  {:>8}\n", "prob", "relative");
    for (p, cell) in points {
        writeln!(
            out,
            "{:>8}  {:>8}",
            format_fixed(p.to_f64(), 2),
            format_fixed(cell.value, 4)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateParams {
    pub prob: Prob,
    pub width: usize,
    pub max_rounds: usize,
    pub mule_width_m: f64,
    pub strokes_per_minute: f64,
    pub hours: f64,
}

impl Default for EstimateParams {
    fn default() -> Self {
        EstimateParams {
            prob: Prob::from_ratio(1, 220).expect("valid"),
            width: 50,
            max_rounds: 50,
            mule_width_m: 46.0,
            strokes_per_minute: 4.0,
            hours: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayEstimate {
    pub prob: Prob,
    pub rel_distance: f64,
    pub mule_width_m: f64,
    pub strokes_per_minute: f64,
    pub hours: f64,
    pub km_per_day: f64,
}

impl fmt::Display for DayEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "breakage probability  {}", self.prob)?;
        writeln!(
            f,
            "relative distance     {}",
            format_fixed(self.rel_distance, 4)
        )?;
        writeln!(f, "mule width            {} m", self.mule_width_m)?;
        writeln!(f, "strokes per minute    {}", self.strokes_per_minute)?;
        writeln!(f, "working hours         {}", self.hours)?;
        write!(
            f,
            "distance per day      {} km",
            format_fixed(self.km_per_day, 1)
        )
    }
}

/// Walking distance over a working day at the given breakage rate.
pub fn emit_day_estimate(params: &EstimateParams) -> Result<DayEstimate> {
    for (name, v) in [
        ("mule width", params.mule_width_m),
        ("strokes per minute", params.strokes_per_minute),
        ("hours", params.hours),
    ] {
        if v.is_nan() || v <= 0.0 {
            return Err(CliError::NonPositive(name));
        }
    }
    let model = MuleModel::<f64>::natural_opt(params.width, params.prob.clone())?;
    let rel_distance = value_iteration(&model, 0, params.max_rounds)?;
    let km_per_day =
        rel_distance * params.mule_width_m * params.strokes_per_minute * 60.0 * params.hours
            / 1000.0;
    Ok(DayEstimate {
        prob: params.prob.clone(),
        rel_distance,
        mule_width_m: params.mule_width_m,
        strokes_per_minute: params.strokes_per_minute,
        hours: params.hours,
        km_per_day,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisimReport {
    pub width: usize,
    pub prob: Prob,
    pub bisimilar: bool,
    pub natural_states: usize,
    pub natural_blocks: usize,
    pub optimized_states: usize,
    pub optimized_blocks: usize,
    /// Textual quotients, natural first.
    pub quotients: (String, String),
}

impl fmt::Display for BisimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "width {} prob {}", self.width, self.prob)?;
        writeln!(f, "bisimilar: {}", self.bisimilar)?;
        writeln!(
            f,
            "natural:   {} states, {} after quotient",
            self.natural_states, self.natural_blocks
        )?;
        write!(
            f,
            "optimized: {} states, {} after quotient",
            self.optimized_states, self.optimized_blocks
        )
    }
}

fn bisim_with<S: Scalar>(width: usize, prob: &Prob) -> Result<BisimReport> {
    let natural = build_plts(&MuleModel::<S>::natural(width, prob.clone())?, 0)?;
    let optimized = build_plts(&MuleModel::<S>::natural_opt(width, prob.clone())?, 0)?;
    let (qn, qo) = (quotient(&natural), quotient(&optimized));
    Ok(BisimReport {
        width,
        prob: prob.clone(),
        bisimilar: bisimilar(&natural, &optimized),
        natural_states: natural.num_states(),
        natural_blocks: qn.num_states(),
        optimized_states: optimized.num_states(),
        optimized_blocks: qo.num_states(),
        quotients: (qn.to_text(), qo.to_text()),
    })
}

/// Builds the natural and optimized systems from thread 0 and compares them.
pub fn run_bisim_check(width: usize, prob: &Prob, mode: NumberMode) -> Result<BisimReport> {
    match mode {
        NumberMode::Exact => bisim_with::<Exact>(width, prob),
        NumberMode::Float => bisim_with::<f64>(width, prob),
    }
}

fn eval_with<S: Scalar>(config: &RunConfig) -> Result<Cell> {
    if config.model == ModelChoice::ClosedForm {
        return closed_form_cell::<S>(config.width, config.n_broken.unwrap(), config.init_pos);
    }
    let model = MuleModel::<S>::new(config.model_kind()?, config.width)?;
    Ok(Cell::from_scalar(value_iteration(
        &model,
        config.init_pos,
        config.max_rounds,
    )?))
}

/// One relative distance for an arbitrary configuration. The closed-form
/// model ignores `max_rounds`.
pub fn eval(config: &RunConfig) -> Result<Cell> {
    config.validate()?;
    match config.number_mode {
        NumberMode::Exact => eval_with::<Exact>(config),
        NumberMode::Float => eval_with::<f64>(config),
    }
}

pub fn eval_output(config: &RunConfig, cell: &Cell) -> String {
    match config.output {
        OutputFormat::Table => match &cell.exact {
            Some(q) => format!("{} ({q})\n", format_fixed(cell.value, 4)),
            None => format!("{}\n", format_fixed(cell.value, 4)),
        },
        OutputFormat::Csv => {
            let mut out = String::from("model,width,broken,prob,init,rounds,relative_distance");
            out.push_str(if cell.exact.is_some() {
                ",exact\n"
            } else {
                "\n"
            });
            let opt = |o: Option<String>| o.unwrap_or_default();
            write!(
                out,
                "{},{},{},{},{},{},{:.*}",
                config.model,
                config.width,
                opt(config.n_broken.map(|n| n.to_string())),
                opt(config.prob.as_ref().map(Prob::to_string)),
                config.init_pos,
                config.max_rounds,
                CSV_DECIMALS,
                cell.value
            )
            .unwrap();
            if let Some(q) = &cell.exact {
                write!(out, ",{q}").unwrap();
            }
            out.push('\n');
            out
        }
    }
}

/// Parses a probability for clap.
pub fn parse_prob(s: &str) -> std::result::Result<Prob, String> {
    Prob::from_str(s).map_err(|e| e.to_string())
}

pub fn parse_mode(s: &str) -> std::result::Result<NumberMode, String> {
    NumberMode::from_str(s).map_err(|e| e.to_string())
}

pub fn write_output(path: &str, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })
}
