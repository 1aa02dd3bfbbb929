//! Monte Carlo estimate of the relative walking distance, used to
//! cross-check the value iteration.
//!
//! Episodes sample raw thread patterns (never the summary distribution) and
//! the piecer follows the optimal policy read off the value tables.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::breakage::BreakageSummary;
use crate::error::{Error, Result};
use crate::piecer::{value_tables, ModelKind, MuleModel};

const CHUNKS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationReport {
    pub episodes: usize,
    /// Mean relative distance per round.
    pub mean: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
}

impl SimulationReport {
    /// Whether `value` lies within `sigmas` standard errors of the mean.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.mean - value).abs() <= sigmas * self.std_error
    }
}

fn sample_summary<R: Rng>(
    kind: &ModelKind,
    width: usize,
    break_prob: f64,
    rng: &mut R,
) -> BreakageSummary {
    match kind {
        ModelKind::FixedN(n) => {
            let idx = sample(rng, width, *n);
            let (left, right) = idx
                .iter()
                .fold((usize::MAX, 0), |(l, r), i| (l.min(i), r.max(i)));
            BreakageSummary::Span { left, right }
        }
        ModelKind::Natural(_) | ModelKind::NaturalOpt(_) => {
            let mut bounds: Option<(usize, usize)> = None;
            for i in 0..width {
                if rng.gen_bool(break_prob) {
                    bounds = Some(bounds.map_or((i, i), |(l, _)| (l, i)));
                }
            }
            match bounds {
                Some((left, right)) => BreakageSummary::Span { left, right },
                None => BreakageSummary::NoneBroken,
            }
        }
    }
}

/// Simulates `episodes` runs of `max_rounds` rounds from `init_pos`.
///
/// Deterministic for a given seed: episodes are split into fixed chunks,
/// each with its own ChaCha stream.
pub fn simulate(
    model: &MuleModel<f64>,
    init_pos: usize,
    max_rounds: usize,
    episodes: usize,
    seed: u64,
) -> Result<SimulationReport> {
    if max_rounds == 0 {
        return Err(Error::NoRounds);
    }
    let width = model.width();
    if init_pos >= width {
        return Err(Error::Position {
            pos: init_pos,
            max: width - 1,
        });
    }
    let tables = value_tables(model, max_rounds);
    let kind = model.kind();
    let break_prob = match kind {
        ModelKind::Natural(p) | ModelKind::NaturalOpt(p) => p.to_f64(),
        ModelKind::FixedN(_) => 0.0,
    };
    let scale = (max_rounds * width) as f64;

    let per_chunk: Vec<(f64, f64)> = (0..CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let count = episodes as u64 / CHUNKS + u64::from(chunk < episodes as u64 % CHUNKS);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let mut pos = init_pos;
                let mut walked = 0usize;
                for remaining in (1..=max_rounds).rev() {
                    let summary = sample_summary(kind, width, break_prob, &mut rng);
                    let (choice, _) = tables[remaining - 1].best_choice(pos, summary);
                    walked += choice.distance;
                    pos = choice.end_pos;
                }
                let x = walked as f64 / scale;
                sum += x;
                sum_sq += x * x;
            }
            (sum, sum_sq)
        })
        .collect();

    let (sum, sum_sq) = per_chunk
        .iter()
        .fold((0.0, 0.0), |(s, q), (a, b)| (s + a, q + b));
    let n = episodes as f64;
    let mean = sum / n;
    let variance = if episodes > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(SimulationReport {
        episodes,
        mean,
        std_error: (variance / n).sqrt(),
    })
}
