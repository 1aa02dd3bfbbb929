//! The piecer's walk and the finite-horizon minimum expected distance.
//!
//! Each round the mule strokes, threads break according to the model, and
//! the piecer walks to repair every broken thread. When broken threads lie
//! on both sides the piecer may go either way first; the value iteration
//! picks whichever choice minimizes distance walked now plus the optimal
//! expected distance over the remaining rounds.

use std::fmt;

use arrayvec::ArrayVec;

use crate::breakage::{
    bernoulli_distribution, bernoulli_patterns, extremes_distribution, fixed_n_distribution,
    fixed_n_patterns, BreakageSummary, SummaryDistribution,
};
use crate::error::{Error, Result};
use crate::numerics::{Prob, Scalar};

/// One way of completing a round: distance walked and where the piecer ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RoundChoice {
    pub distance: usize,
    pub end_pos: usize,
}

impl RoundChoice {
    pub const fn new(distance: usize, end_pos: usize) -> Self {
        RoundChoice { distance, end_pos }
    }
}

pub type RoundChoices = ArrayVec<RoundChoice, 2>;

/// The walks available from `pos` after a stroke with the given breakage.
///
/// A span entirely on one side gives one walk to its far end. A span
/// straddling `pos` gives two: left extreme first (ending at the right one)
/// or right extreme first (ending at the left one).
pub fn resolve_round(pos: usize, summary: BreakageSummary, width: usize) -> RoundChoices {
    debug_assert!(pos < width, "position {pos} on width {width}");
    debug_assert!(summary.is_valid_for(width));
    let mut out = RoundChoices::new();
    match summary {
        BreakageSummary::NoneBroken => out.push(RoundChoice::new(0, pos)),
        BreakageSummary::Span { left, right } => {
            if pos <= left {
                out.push(RoundChoice::new(right - pos, right));
            }
            if pos >= right {
                let choice = RoundChoice::new(pos - left, left);
                if !out.contains(&choice) {
                    out.push(choice);
                }
            }
            if left < pos && pos < right {
                out.push(RoundChoice::new(pos + right - 2 * left, right));
                out.push(RoundChoice::new(2 * right - pos - left, left));
            }
        }
    }
    out
}

/// Which breakage process drives the mule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Exactly `n` threads break per stroke, uniformly over patterns.
    FixedN(usize),
    /// Every thread breaks independently with the given probability.
    Natural(Prob),
    /// The natural model branching directly on (leftmost, rightmost).
    NaturalOpt(Prob),
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::FixedN(n) => write!(f, "fixed-n(N={n})"),
            ModelKind::Natural(p) => write!(f, "natural(p={p})"),
            ModelKind::NaturalOpt(p) => write!(f, "natural-opt(p={p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuleModel<S> {
    width: usize,
    kind: ModelKind,
    distribution: SummaryDistribution<S>,
}

impl<S: Scalar> MuleModel<S> {
    pub fn new(kind: ModelKind, width: usize) -> Result<Self> {
        let distribution = match &kind {
            ModelKind::FixedN(n) => fixed_n_distribution(width, *n)?,
            ModelKind::Natural(p) => bernoulli_distribution(width, p)?,
            ModelKind::NaturalOpt(p) => extremes_distribution(width, p)?,
        };
        Ok(MuleModel {
            width,
            kind,
            distribution,
        })
    }

    pub fn fixed_n(width: usize, n: usize) -> Result<Self> {
        MuleModel::new(ModelKind::FixedN(n), width)
    }

    pub fn natural(width: usize, p: Prob) -> Result<Self> {
        MuleModel::new(ModelKind::Natural(p), width)
    }

    pub fn natural_opt(width: usize, p: Prob) -> Result<Self> {
        MuleModel::new(ModelKind::NaturalOpt(p), width)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn distribution(&self) -> &SummaryDistribution<S> {
        &self.distribution
    }

    /// The outcomes the process branches on each stroke, with their
    /// probabilities: one per thread pattern for the fixed-N and natural
    /// models, one per summary for the optimized model.
    pub fn outcomes(&self) -> Result<Vec<(BreakageSummary, S)>> {
        match &self.kind {
            ModelKind::FixedN(n) => {
                let patterns = fixed_n_patterns(self.width, *n)?;
                let weight = S::one() / S::from_u64(patterns.len() as u64);
                Ok(patterns
                    .iter()
                    .map(|p| (p.summarize(), weight.clone()))
                    .collect())
            }
            ModelKind::Natural(p) => Ok(bernoulli_patterns::<S>(self.width, p)?
                .into_iter()
                .map(|(pattern, w)| (pattern.summarize(), w))
                .collect()),
            ModelKind::NaturalOpt(_) => Ok(self
                .distribution
                .iter()
                .map(|(s, p)| (*s, p.clone()))
                .collect()),
        }
    }
}

/// Minimal expected cumulative distance from every position with
/// `horizon` rounds to go.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable<S> {
    horizon: usize,
    values: Vec<S>,
}

impl<S: Scalar> ValueTable<S> {
    pub fn zero(width: usize) -> Self {
        ValueTable {
            horizon: 0,
            values: vec![S::zero(); width],
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, pos: usize) -> &S {
        &self.values[pos]
    }

    /// Best choice for one round given the values one horizon lower.
    pub fn best_choice(&self, pos: usize, summary: BreakageSummary) -> (RoundChoice, S) {
        let width = self.values.len();
        resolve_round(pos, summary, width)
            .into_iter()
            .map(|c| (c, S::from_u64(c.distance as u64) + &self.values[c.end_pos]))
            .reduce(|best, next| if next.1 < best.1 { next } else { best })
            .expect("every summary admits a walk")
    }
}

/// One backward step: `V_k(pos) = Σ_s P(s) · min_c (distance(c) + V_{k-1}(end(c)))`.
pub fn bellman_step<S: Scalar>(model: &MuleModel<S>, prev: &ValueTable<S>) -> ValueTable<S> {
    let values = (0..model.width)
        .map(|pos| {
            model
                .distribution
                .iter()
                .fold(S::zero(), |acc, (summary, p)| {
                    acc + prev.best_choice(pos, *summary).1 * p
                })
        })
        .collect();
    ValueTable {
        horizon: prev.horizon + 1,
        values,
    }
}

/// `V_0` through `V_max_rounds`.
pub fn value_tables<S: Scalar>(model: &MuleModel<S>, max_rounds: usize) -> Vec<ValueTable<S>> {
    let mut tables = Vec::with_capacity(max_rounds + 1);
    tables.push(ValueTable::zero(model.width));
    for _ in 0..max_rounds {
        let next = bellman_step(model, tables.last().unwrap());
        tables.push(next);
    }
    tables
}

fn check_start(model_width: usize, init_pos: usize) -> Result<()> {
    if init_pos >= model_width {
        return Err(Error::Position {
            pos: init_pos,
            max: model_width - 1,
        });
    }
    Ok(())
}

fn relative<S: Scalar>(cumulative: &S, rounds: usize, width: usize) -> S {
    cumulative.clone() / S::from_u64((rounds * width) as u64)
}

/// Minimal expected distance per round over `max_rounds` rounds starting at
/// `init_pos`, relative to the width of the mule.
pub fn value_iteration<S: Scalar>(
    model: &MuleModel<S>,
    init_pos: usize,
    max_rounds: usize,
) -> Result<S> {
    if max_rounds == 0 {
        return Err(Error::NoRounds);
    }
    check_start(model.width, init_pos)?;
    let mut table = ValueTable::zero(model.width);
    for _ in 0..max_rounds {
        table = bellman_step(model, &table);
    }
    Ok(relative(table.get(init_pos), max_rounds, model.width))
}

/// [`value_iteration`] at each of the ascending `horizons`, in one sweep.
pub fn per_round_values<S: Scalar>(
    model: &MuleModel<S>,
    init_pos: usize,
    horizons: &[usize],
) -> Result<Vec<S>> {
    if horizons.is_empty() || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Horizons);
    }
    if horizons[0] == 0 {
        return Err(Error::NoRounds);
    }
    check_start(model.width, init_pos)?;
    let mut out = Vec::with_capacity(horizons.len());
    let mut table = ValueTable::zero(model.width);
    for &h in horizons {
        while table.horizon < h {
            table = bellman_step(model, &table);
        }
        out.push(relative(table.get(init_pos), h, model.width));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Exact;

    fn prob(n: u64, d: u64) -> Prob {
        Prob::from_ratio(n, d).unwrap()
    }

    fn choices(pos: usize, s: BreakageSummary, width: usize) -> Vec<(usize, usize)> {
        resolve_round(pos, s, width)
            .into_iter()
            .map(|c| (c.distance, c.end_pos))
            .collect()
    }

    #[test]
    fn resolve_round_examples() {
        let all = BreakageSummary::span(0, 9);
        assert_eq!(choices(0, all, 10), vec![(9, 9)]);
        assert_eq!(choices(5, all, 10), vec![(14, 9), (13, 0)]);
        assert_eq!(choices(9, all, 10), vec![(9, 0)]);
        assert_eq!(choices(3, BreakageSummary::NoneBroken, 4), vec![(0, 3)]);
        assert_eq!(choices(3, BreakageSummary::NoneBroken, 10), vec![(0, 3)]);
        assert_eq!(choices(4, BreakageSummary::span(4, 4), 10), vec![(0, 4)]);
        assert_eq!(choices(2, BreakageSummary::span(4, 7), 10), vec![(5, 7)]);
        assert_eq!(choices(8, BreakageSummary::span(4, 7), 10), vec![(4, 4)]);
        assert_eq!(choices(7, BreakageSummary::span(4, 7), 10), vec![(3, 4)]);
        assert_eq!(choices(4, BreakageSummary::span(4, 7), 10), vec![(3, 7)]);
    }

    #[test]
    fn resolve_round_bounds() {
        let width = 9;
        for pos in 0..width {
            for l in 0..width {
                for r in l..width {
                    for c in resolve_round(pos, BreakageSummary::span(l, r), width) {
                        assert!(c.end_pos == l || c.end_pos == r);
                        assert!(c.distance <= 2 * (width - 1));
                    }
                }
            }
        }
    }

    #[test]
    fn model_construction() {
        let m = MuleModel::<Exact>::fixed_n(10, 10).unwrap();
        assert_eq!(m.distribution().len(), 1);
        assert!(!MuleModel::<Exact>::fixed_n(10, 3)
            .unwrap()
            .distribution()
            .has_none_broken());
        assert_eq!(
            MuleModel::<f64>::fixed_n(10, 11).unwrap_err(),
            Error::BrokenCount { n: 11, width: 10 }
        );
        assert!(matches!(
            MuleModel::<f64>::natural(25, prob(1, 10)),
            Err(Error::EnumerationCap { .. })
        ));
        assert!(MuleModel::<f64>::natural_opt(500, prob(1, 10)).is_ok());
        assert_eq!(
            MuleModel::<f64>::fixed_n(4, 2)
                .unwrap()
                .outcomes()
                .unwrap()
                .len(),
            6
        );
        assert_eq!(
            MuleModel::<f64>::natural(4, prob(1, 2))
                .unwrap()
                .outcomes()
                .unwrap()
                .len(),
            16
        );
        assert_eq!(
            MuleModel::<f64>::natural_opt(4, prob(1, 2))
                .unwrap()
                .outcomes()
                .unwrap()
                .len(),
            11
        );
    }

    #[test]
    fn value_iteration_examples() {
        let one = MuleModel::<Exact>::fixed_n(10, 1).unwrap();
        assert_eq!(
            value_iteration(&one, 0, 1).unwrap(),
            Exact::from_ratio(45, 100)
        );

        let v = value_iteration(&MuleModel::<f64>::fixed_n(10, 1).unwrap(), 0, 50).unwrap();
        assert!((v - 0.3324).abs() < 5e-5, "{v}");

        let v = value_iteration(
            &MuleModel::<f64>::natural_opt(50, prob(1, 10)).unwrap(),
            0,
            50,
        )
        .unwrap();
        assert!((v - 0.7848).abs() < 5e-5, "{v}");

        // Width 2: the other thread breaks w.p. 1/10 regardless of position.
        for p in [prob(1, 10)] {
            let m = MuleModel::<Exact>::natural(2, p).unwrap();
            for rounds in [1, 2, 7] {
                assert_eq!(
                    value_iteration(&m, 0, rounds).unwrap(),
                    Exact::from_ratio(1, 20)
                );
            }
        }
    }

    #[test]
    fn value_iteration_rejects_bad_arguments() {
        let m = MuleModel::<f64>::fixed_n(10, 2).unwrap();
        assert_eq!(value_iteration(&m, 0, 0), Err(Error::NoRounds));
        assert_eq!(
            value_iteration(&m, 10, 1),
            Err(Error::Position { pos: 10, max: 9 })
        );
        assert_eq!(per_round_values(&m, 0, &[]), Err(Error::Horizons));
        assert_eq!(per_round_values(&m, 0, &[3, 3]), Err(Error::Horizons));
        assert_eq!(per_round_values(&m, 0, &[0, 3]), Err(Error::NoRounds));
    }

    #[test]
    fn per_round_values_examples() {
        let all = MuleModel::<Exact>::fixed_n(10, 10).unwrap();
        let v = per_round_values(&all, 0, &[1, 50]).unwrap();
        assert_eq!(v, vec![Exact::from_ratio(9, 10), Exact::from_ratio(9, 10)]);

        let two = MuleModel::<Exact>::natural(2, prob(1, 10)).unwrap();
        let v = per_round_values(&two, 0, &[1, 2, 3]).unwrap();
        assert_eq!(v, vec![Exact::from_ratio(1, 20); 3]);

        let m = MuleModel::<f64>::natural_opt(12, prob(1, 4)).unwrap();
        let horizons: Vec<usize> = (1..=20).collect();
        let swept = per_round_values(&m, 3, &horizons).unwrap();
        for (h, v) in horizons.iter().zip(&swept) {
            assert!((v - value_iteration(&m, 3, *h).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn tables_are_monotone_in_horizon() {
        let m = MuleModel::<Exact>::fixed_n(8, 3).unwrap();
        let tables = value_tables(&m, 6);
        assert_eq!(tables.len(), 7);
        for pair in tables.windows(2) {
            assert_eq!(pair[1].horizon(), pair[0].horizon() + 1);
            for (a, b) in pair[0].values().iter().zip(pair[1].values()) {
                assert!(a <= b);
            }
        }
    }
}
