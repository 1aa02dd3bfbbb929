//! Thread patterns, their leftmost/rightmost summaries, and the three
//! breakage distributions (fixed number of breaks, independent breaks, and
//! independent breaks marginalized onto the extremes).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{binomial_exact, Prob, Scalar};

/// Largest width for which the independent-breakage model enumerates all
/// `2^width` patterns.
pub const BERNOULLI_ENUMERATION_CAP: usize = 20;

/// Largest number of patterns [`fixed_n_patterns`] will materialize.
pub const PATTERN_ENUMERATION_CAP: u128 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Thread {
    Fine,
    Broken,
}

/// The state of every thread after one stroke of the mule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThreadPattern {
    threads: Vec<Thread>,
}

impl ThreadPattern {
    pub fn new(threads: Vec<Thread>) -> Self {
        ThreadPattern { threads }
    }

    pub fn all_fine(width: usize) -> Self {
        ThreadPattern::new(vec![Thread::Fine; width])
    }

    pub fn all_broken(width: usize) -> Self {
        ThreadPattern::new(vec![Thread::Broken; width])
    }

    /// Panics if a position is `>= width`.
    pub fn from_broken(width: usize, positions: &[usize]) -> Self {
        let mut threads = vec![Thread::Fine; width];
        for &p in positions {
            threads[p] = Thread::Broken;
        }
        ThreadPattern::new(threads)
    }

    /// Bit `i` of `mask` set means thread `i` is broken.
    pub(crate) fn from_mask(width: usize, mask: u64) -> Self {
        ThreadPattern::new(
            (0..width)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Thread::Broken
                    } else {
                        Thread::Fine
                    }
                })
                .collect(),
        )
    }

    pub fn width(&self) -> usize {
        self.threads.len()
    }

    pub fn threads(&self) -> &[Thread] {
        &self.threads
    }

    /// Index of the leftmost broken thread, `None` if every thread is fine.
    pub fn lbt(&self) -> Option<usize> {
        self.threads.iter().position(|&t| t == Thread::Broken)
    }

    /// Index of the rightmost broken thread, `None` if every thread is fine.
    pub fn rbt(&self) -> Option<usize> {
        self.threads.iter().rposition(|&t| t == Thread::Broken)
    }

    pub fn count_broken(&self) -> usize {
        self.threads
            .iter()
            .filter(|&&t| t == Thread::Broken)
            .count()
    }

    pub fn no_broken_thread(&self) -> bool {
        self.lbt().is_none()
    }

    pub fn summarize(&self) -> BreakageSummary {
        match (self.lbt(), self.rbt()) {
            (Some(left), Some(right)) => BreakageSummary::Span { left, right },
            _ => BreakageSummary::NoneBroken,
        }
    }
}

/// Written as one character per thread: `.` fine, `x` broken.
impl fmt::Display for ThreadPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.threads {
            f.write_str(match t {
                Thread::Fine => ".",
                Thread::Broken => "x",
            })?;
        }
        Ok(())
    }
}

impl FromStr for ThreadPattern {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '.' => Ok(Thread::Fine),
                'x' | 'X' => Ok(Thread::Broken),
                other => Err(format!("invalid thread mark {other:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(ThreadPattern::new)
    }
}

/// Everything about a stroke's breakage that matters for the walk.
///
/// The derived order (nothing broken first, then spans lexicographically) is
/// the canonical order of [`SummaryDistribution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BreakageSummary {
    NoneBroken,
    Span { left: usize, right: usize },
}

impl BreakageSummary {
    /// Panics unless `left <= right`.
    pub fn span(left: usize, right: usize) -> Self {
        assert!(left <= right, "span({left}, {right}) is reversed");
        BreakageSummary::Span { left, right }
    }

    pub fn is_valid_for(&self, width: usize) -> bool {
        match *self {
            BreakageSummary::NoneBroken => true,
            BreakageSummary::Span { left, right } => left <= right && right < width,
        }
    }

    /// Mirror image on a mule of the given width.
    pub fn reflect(self, width: usize) -> Self {
        match self {
            BreakageSummary::NoneBroken => BreakageSummary::NoneBroken,
            BreakageSummary::Span { left, right } => BreakageSummary::Span {
                left: width - 1 - right,
                right: width - 1 - left,
            },
        }
    }
}

impl fmt::Display for BreakageSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BreakageSummary::NoneBroken => f.write_str("none"),
            BreakageSummary::Span { left, right } => write!(f, "[{left},{right}]"),
        }
    }
}

/// A finite distribution over breakage summaries with strictly positive
/// masses, kept in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryDistribution<S> {
    width: usize,
    entries: BTreeMap<BreakageSummary, S>,
}

impl<S: Scalar> SummaryDistribution<S> {
    /// Sums the weights of repeated summaries and drops zero masses.
    pub fn from_weights<I>(width: usize, weights: I) -> Self
    where
        I: IntoIterator<Item = (BreakageSummary, S)>,
    {
        let mut entries: BTreeMap<BreakageSummary, S> = BTreeMap::new();
        for (summary, weight) in weights {
            debug_assert!(summary.is_valid_for(width), "{summary} on width {width}");
            if weight.is_zero() {
                continue;
            }
            match entries.get_mut(&summary) {
                Some(mass) => *mass = mass.clone() + weight,
                None => {
                    entries.insert(summary, weight);
                }
            }
        }
        entries.retain(|_, mass| !mass.is_zero());
        SummaryDistribution { width, entries }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, summary: &BreakageSummary) -> Option<&S> {
        self.entries.get(summary)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BreakageSummary, &S)> {
        self.entries.iter()
    }

    pub fn total(&self) -> S {
        self.entries.values().fold(S::zero(), |acc, p| acc + p)
    }

    /// Exactly 1 in exact mode; within 1e-12 in float mode.
    pub fn is_normalized(&self) -> bool {
        let total = self.total();
        match S::MODE {
            crate::NumberMode::Exact => total.is_one(),
            crate::NumberMode::Float => (total.to_f64() - 1.0).abs() <= 1e-12,
        }
    }

    pub fn reflect(&self) -> Self {
        SummaryDistribution::from_weights(
            self.width,
            self.entries
                .iter()
                .map(|(s, p)| (s.reflect(self.width), p.clone())),
        )
    }

    pub fn has_none_broken(&self) -> bool {
        self.entries.contains_key(&BreakageSummary::NoneBroken)
    }
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 {
        Err(Error::ZeroWidth)
    } else {
        Ok(())
    }
}

fn check_broken_count(width: usize, n: usize) -> Result<()> {
    check_width(width)?;
    if n == 0 || n > width {
        Err(Error::BrokenCount { n, width })
    } else {
        Ok(())
    }
}

/// Uniform distribution over the patterns with exactly `n` broken threads,
/// aggregated by summary through the closed form
/// `P(span(l, r)) = C(r - l - 1, n - 2) / C(width, n)` (and `1/width` per
/// single thread when `n = 1`).
pub fn fixed_n_distribution<S: Scalar>(width: usize, n: usize) -> Result<SummaryDistribution<S>> {
    check_broken_count(width, n)?;
    let (w, n64) = (width as u64, n as u64);
    let weights: Vec<(BreakageSummary, S)> = if n == 1 {
        (0..width)
            .map(|k| (BreakageSummary::span(k, k), S::from_ratio(1, w)))
            .collect()
    } else {
        let mut weights = Vec::new();
        for left in 0..width {
            for right in left + 1..width {
                let interior = (right - left - 1) as u64;
                if interior < n64 - 2 {
                    continue;
                }
                weights.push((
                    BreakageSummary::span(left, right),
                    S::binomial_ratio(interior, n64 - 2, w, n64),
                ));
            }
        }
        weights
    };
    Ok(SummaryDistribution::from_weights(width, weights))
}

/// Every pattern of the given width with exactly `n` broken threads, in
/// increasing order of the broken-position bitmask.
pub fn fixed_n_patterns(width: usize, n: usize) -> Result<Vec<ThreadPattern>> {
    check_broken_count(width, n)?;
    if width > 63 {
        return Err(Error::EnumerationCap { width, cap: 63 });
    }
    let count = binomial_exact(width as u64, n as u64);
    let count: u128 = count.try_into().unwrap_or(u128::MAX);
    if count > PATTERN_ENUMERATION_CAP {
        return Err(Error::PatternCap {
            patterns: count,
            cap: PATTERN_ENUMERATION_CAP,
        });
    }
    Ok(masks_with_popcount(width, n)
        .map(|mask| ThreadPattern::from_mask(width, mask))
        .collect())
}

/// Gosper's hack: all `width`-bit masks with `n` set bits, ascending.
fn masks_with_popcount(width: usize, n: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << width;
    let first = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let mask = next?;
        next = if mask == 0 {
            None
        } else {
            let lowest = mask & mask.wrapping_neg();
            let ripple = mask + lowest;
            let successor = (((ripple ^ mask) >> 2) / lowest) | ripple;
            (successor < limit).then_some(successor)
        };
        Some(mask)
    })
}

/// Same distribution as [`fixed_n_distribution`], obtained by enumerating
/// every pattern.
pub fn fixed_n_distribution_enumerated<S: Scalar>(
    width: usize,
    n: usize,
) -> Result<SummaryDistribution<S>> {
    let patterns = fixed_n_patterns(width, n)?;
    let weight = S::one() / S::from_u64(patterns.len() as u64);
    Ok(SummaryDistribution::from_weights(
        width,
        patterns.iter().map(|p| (p.summarize(), weight.clone())),
    ))
}

fn bernoulli_weights_by_count<S: Scalar>(width: usize, p: &Prob) -> Vec<S> {
    let broken: S = p.to_scalar();
    let fine: S = p.complement().to_scalar();
    (0..=width as u64)
        .map(|k| broken.powu(k) * fine.powu(width as u64 - k))
        .collect()
}

/// Every one of the `2^width` patterns with its probability under
/// independent breakage, in increasing bitmask order.
pub fn bernoulli_patterns<S: Scalar>(width: usize, p: &Prob) -> Result<Vec<(ThreadPattern, S)>> {
    check_width(width)?;
    if width > BERNOULLI_ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            width,
            cap: BERNOULLI_ENUMERATION_CAP,
        });
    }
    let by_count = bernoulli_weights_by_count::<S>(width, p);
    Ok((0..1u64 << width)
        .map(|mask| {
            (
                ThreadPattern::from_mask(width, mask),
                by_count[mask.count_ones() as usize].clone(),
            )
        })
        .collect())
}

/// Each thread breaks independently with probability `p`; enumerates all
/// `2^width` patterns and aggregates by summary.
pub fn bernoulli_distribution<S: Scalar>(width: usize, p: &Prob) -> Result<SummaryDistribution<S>> {
    bernoulli_distribution_capped(width, p, BERNOULLI_ENUMERATION_CAP)
}

pub fn bernoulli_distribution_capped<S: Scalar>(
    width: usize,
    p: &Prob,
    cap: usize,
) -> Result<SummaryDistribution<S>> {
    check_width(width)?;
    let cap = cap.min(63);
    if width > cap {
        return Err(Error::EnumerationCap { width, cap });
    }
    let by_count = bernoulli_weights_by_count::<S>(width, p);
    let summaries = (0..1u64 << width).map(|mask| {
        let summary = if mask == 0 {
            BreakageSummary::NoneBroken
        } else {
            BreakageSummary::Span {
                left: mask.trailing_zeros() as usize,
                right: 63 - mask.leading_zeros() as usize,
            }
        };
        (summary, by_count[mask.count_ones() as usize].clone())
    });
    Ok(SummaryDistribution::from_weights(width, summaries))
}

/// The independent-breakage model marginalized onto summaries in closed form:
///
/// * nothing broken: `(1-p)^width`
/// * only thread `l` broken: `(1-p)^(width-1) p`
/// * leftmost `l` and rightmost `r > l`: `(1-p)^(l + width-1-r) p^2`
///
/// Threads strictly between `l` and `r` are unconstrained; the exponent
/// counts the threads outside `l..=r`, which must all be fine.
pub fn extremes_distribution<S: Scalar>(width: usize, p: &Prob) -> Result<SummaryDistribution<S>> {
    check_width(width)?;
    let broken: S = p.to_scalar();
    let fine: S = p.complement().to_scalar();
    let w = width as u64;
    let fine_pow: Vec<S> = (0..=w).map(|k| fine.powu(k)).collect();
    let single = fine_pow[width - 1].clone() * &broken;
    let pair = broken.clone() * &broken;

    let mut weights = Vec::with_capacity(1 + width * (width + 1) / 2);
    weights.push((BreakageSummary::NoneBroken, fine_pow[width].clone()));
    for left in 0..width {
        weights.push((BreakageSummary::span(left, left), single.clone()));
        for right in left + 1..width {
            let outside = left + (width - 1 - right);
            weights.push((
                BreakageSummary::span(left, right),
                fine_pow[outside].clone() * &pair,
            ));
        }
    }
    Ok(SummaryDistribution::from_weights(width, weights))
}
