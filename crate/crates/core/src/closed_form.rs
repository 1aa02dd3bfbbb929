//! Single-stroke expected walking distance by direct summation.
//!
//! Exactly `n_broken` of `width` threads break, uniformly over patterns, and
//! the piecer starts at `pos`. Measuring distances from `pos`, the furthest
//! broken thread on the left is `β` away and on the right `β'` away. Four
//! disjoint cases cover every pattern:
//!
//! * `d1`: all broken threads at or left of `pos`, walk `β`;
//! * `d2`: all broken threads at or right of `pos`, walk `β`;
//! * `d3`: broken threads on both sides with `β <= β'`, walk `2β + β'`;
//! * `d4`: broken threads on both sides with `β > β'`, walk `β + 2β'`.
//!
//! A one-sided case with the furthest thread at `β` has probability
//! `C(β, N-1) / C(width, N)`; a two-sided case has `C(β+β'-1, N-2) / C(width, N)`
//! since the remaining `N-2` breaks lie strictly between the extremes.

use crate::error::{Error, Result};
use crate::numerics::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedFormInstance {
    width: usize,
    n_broken: usize,
    pos: usize,
}

impl ClosedFormInstance {
    /// Requires `1 <= n_broken <= width` and `pos <= width`.
    pub fn new(width: usize, n_broken: usize, pos: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::ZeroWidth);
        }
        if n_broken == 0 || n_broken > width {
            return Err(Error::BrokenCount { n: n_broken, width });
        }
        if pos > width {
            return Err(Error::Position { pos, max: width });
        }
        Ok(ClosedFormInstance {
            width,
            n_broken,
            pos,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn n_broken(&self) -> usize {
        self.n_broken
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    fn w(&self) -> i64 {
        self.width as i64
    }

    fn n(&self) -> i64 {
        self.n_broken as i64
    }

    fn p(&self) -> i64 {
        self.pos as i64
    }

    /// Largest rightward distance to a thread that exists (may be -1).
    fn right_reach(&self) -> i64 {
        self.w() - self.p() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaBreakdown<S> {
    pub d1: S,
    pub d2: S,
    pub d3: S,
    pub d4: S,
    pub total: S,
    /// `total / width`.
    pub relative: S,
}

fn one_sided_prob<S: Scalar>(inst: &ClosedFormInstance, beta: i64) -> S {
    S::binomial_ratio(
        beta as u64,
        (inst.n() - 1) as u64,
        inst.width as u64,
        inst.n_broken as u64,
    )
}

/// Sum over `β` in `lo..=hi` of `β · C(β, N-1) / C(width, N)`.
fn one_sided_sum<S: Scalar>(inst: &ClosedFormInstance, lo: i64, hi: i64) -> S {
    (lo..=hi).fold(S::zero(), |acc, beta| {
        acc + S::from_u64(beta as u64) * one_sided_prob::<S>(inst, beta)
    })
}

/// `C(s-1, N-2) / C(width, N)` indexed by `s = β + β'`, for `s` in
/// `0..=width`. Empty when `N < 2`.
fn pair_weights<S: Scalar>(inst: &ClosedFormInstance) -> Vec<S> {
    if inst.n_broken < 2 {
        return Vec::new();
    }
    let (w, n) = (inst.width as u64, inst.n_broken as u64);
    (0..=w)
        .map(|s| {
            if s == 0 || s - 1 < n - 2 {
                S::zero()
            } else {
                S::binomial_ratio(s - 1, n - 2, w, n)
            }
        })
        .collect()
}

/// Expected leftward-only distance.
pub fn delta1<S: Scalar>(inst: &ClosedFormInstance) -> S {
    one_sided_sum(inst, inst.n() - 1, inst.p())
}

/// Expected rightward-only distance.
pub fn delta2<S: Scalar>(inst: &ClosedFormInstance) -> S {
    one_sided_sum(inst, inst.n() - 1, inst.right_reach())
}

fn straddle_ranges(
    inst: &ClosedFormInstance,
) -> impl Iterator<Item = (i64, i64, i64, i64, i64)> + '_ {
    let n = inst.n();
    let reach = inst.right_reach();
    (1..=inst.p()).map(move |beta| {
        let near_lo = beta.max(n - 1 - beta);
        let far_lo = 1.max(n - 1 - beta);
        let far_hi = reach.min(beta - 1);
        (beta, near_lo, reach, far_lo, far_hi)
    })
}

/// Expected distance when broken threads lie on both sides and the left
/// extreme is no further than the right one (go left first).
pub fn delta3<S: Scalar>(inst: &ClosedFormInstance) -> S {
    let weights = pair_weights::<S>(inst);
    if weights.is_empty() {
        return S::zero();
    }
    let mut acc = S::zero();
    for (beta, lo, hi, _, _) in straddle_ranges(inst) {
        for beta_r in lo..=hi {
            let walk = (2 * beta + beta_r) as u64;
            acc = acc + S::from_u64(walk) * &weights[(beta + beta_r) as usize];
        }
    }
    acc
}

/// Expected distance when broken threads lie on both sides and the left
/// extreme is strictly further (go right first).
///
/// The inner range starts at `max(1, N-1-β)`: the straddle with
/// `β + β' = N - 1` (every interior thread broken) is a valid pattern.
pub fn delta4<S: Scalar>(inst: &ClosedFormInstance) -> S {
    let weights = pair_weights::<S>(inst);
    if weights.is_empty() {
        return S::zero();
    }
    let mut acc = S::zero();
    for (beta, _, _, lo, hi) in straddle_ranges(inst) {
        for beta_r in lo..=hi {
            let walk = (beta + 2 * beta_r) as u64;
            acc = acc + S::from_u64(walk) * &weights[(beta + beta_r) as usize];
        }
    }
    acc
}

pub fn expected_distance<S: Scalar>(inst: &ClosedFormInstance) -> DeltaBreakdown<S> {
    let d1 = delta1::<S>(inst);
    let d2 = delta2::<S>(inst);
    let d3 = delta3::<S>(inst);
    let d4 = delta4::<S>(inst);
    let total = d1.clone() + &d2 + &d3 + &d4;
    let relative = total.clone() / S::from_u64(inst.width as u64);
    DeltaBreakdown {
        d1,
        d2,
        d3,
        d4,
        total,
        relative,
    }
}

/// Probability mass of each of the four cases.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseProbabilities<S> {
    pub left_only: S,
    /// Excludes the single-thread-at-`pos` pattern, which `left_only` counts.
    pub right_only: S,
    pub straddle_left_first: S,
    pub straddle_right_first: S,
}

impl<S: Scalar> CaseProbabilities<S> {
    pub fn total(&self) -> S {
        self.left_only.clone()
            + &self.right_only
            + &self.straddle_left_first
            + &self.straddle_right_first
    }
}

/// Only meaningful for `pos < width`, where the cases partition all patterns.
pub fn case_probabilities<S: Scalar>(inst: &ClosedFormInstance) -> CaseProbabilities<S> {
    let n = inst.n();
    let left_only = (n - 1..=inst.p()).fold(S::zero(), |acc, b| acc + one_sided_prob::<S>(inst, b));
    let right_only = ((n - 1).max(1)..=inst.right_reach())
        .fold(S::zero(), |acc, b| acc + one_sided_prob::<S>(inst, b));
    let weights = pair_weights::<S>(inst);
    let mut near = S::zero();
    let mut far = S::zero();
    if !weights.is_empty() {
        for (beta, near_lo, near_hi, far_lo, far_hi) in straddle_ranges(inst) {
            for beta_r in near_lo..=near_hi {
                near = near + &weights[(beta + beta_r) as usize];
            }
            for beta_r in far_lo..=far_hi {
                far = far + &weights[(beta + beta_r) as usize];
            }
        }
    }
    CaseProbabilities {
        left_only,
        right_only,
        straddle_left_first: near,
        straddle_right_first: far,
    }
}

/// Direct sums next to the polynomial closed forms for the one-sided cases.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormReport<S> {
    pub delta1_sum: S,
    pub delta1_closed: S,
    pub delta1_agrees: bool,
    pub delta2_sum: S,
    pub delta2_closed: S,
    pub delta2_agrees: bool,
}

/// `(pos-N+2)(N·pos+N-1) C(pos+1, N-1) / (N(N+1) C(width, N))`.
pub fn delta1_closed<S: Scalar>(inst: &ClosedFormInstance) -> S {
    let (w, n, p) = (inst.w(), inst.n(), inst.p());
    S::from_i64(p - n + 2)
        * S::from_i64(n * p + n - 1)
        * S::binomial_ratio((p + 1) as u64, (n - 1) as u64, w as u64, n as u64)
        / S::from_i64(n * (n + 1))
}

/// `(pos+width-N+1)(width·N-N·pos-1) C(width-pos, N-1) / (N(N+1) C(width, N))`,
/// taken verbatim; the sums stay authoritative.
pub fn delta2_closed<S: Scalar>(inst: &ClosedFormInstance) -> S {
    let (w, n, p) = (inst.w(), inst.n(), inst.p());
    S::from_i64(p + w - n + 1)
        * S::from_i64(w * n - n * p - 1)
        * S::binomial_ratio((w - p) as u64, (n - 1) as u64, w as u64, n as u64)
        / S::from_i64(n * (n + 1))
}

pub fn closed_form_check<S: Scalar>(inst: &ClosedFormInstance) -> ClosedFormReport<S> {
    let delta1_sum = delta1::<S>(inst);
    let delta1_closed = delta1_closed::<S>(inst);
    let delta2_sum = delta2::<S>(inst);
    let delta2_closed = delta2_closed::<S>(inst);
    ClosedFormReport {
        delta1_agrees: delta1_sum.approx_eq(&delta1_closed),
        delta2_agrees: delta2_sum.approx_eq(&delta2_closed),
        delta1_sum,
        delta1_closed,
        delta2_sum,
        delta2_closed,
    }
}
