//! Probabilistic labelled transition systems built from mule models, strong
//! probabilistic bisimulation by partition refinement, and quotients.
//!
//! A system has two kinds of states. A probabilistic state is a distribution
//! over action states. An action state has labelled transitions: `threads`
//! (the stroke's breakage, with its parameter erased) leads to another
//! action state holding the walk choices, and each `walk(d)` leads back to a
//! probabilistic state. Probabilistic states never point at probabilistic
//! states, and every path from one probabilistic state to the next carries
//! exactly one `walk`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use crate::error::Result;
use crate::numerics::Scalar;
use crate::piecer::{resolve_round, MuleModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Threads,
    Walk(usize),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Threads => f.write_str("threads"),
            Label::Walk(d) => write!(f, "walk({d})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Action(usize),
    Prob(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plts<S> {
    prob_states: Vec<Vec<(usize, S)>>,
    action_states: Vec<Vec<(Label, Target)>>,
    initial: usize,
}

impl<S: Scalar> Plts<S> {
    /// `prob_states[i]` lists `(action state, mass)`; `initial` is a
    /// probabilistic state.
    pub fn new(
        prob_states: Vec<Vec<(usize, S)>>,
        action_states: Vec<Vec<(Label, Target)>>,
        initial: usize,
    ) -> Self {
        let plts = Plts {
            prob_states,
            action_states,
            initial,
        };
        debug_assert!(plts.is_well_formed());
        plts
    }

    pub fn num_prob_states(&self) -> usize {
        self.prob_states.len()
    }

    pub fn num_action_states(&self) -> usize {
        self.action_states.len()
    }

    pub fn num_states(&self) -> usize {
        self.prob_states.len() + self.action_states.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn distribution(&self, prob_state: usize) -> &[(usize, S)] {
        &self.prob_states[prob_state]
    }

    pub fn transitions(&self, action_state: usize) -> &[(Label, Target)] {
        &self.action_states[action_state]
    }

    /// Index in the joint numbering: probabilistic states first, then
    /// action states.
    pub fn state_id(&self, target: Target) -> usize {
        match target {
            Target::Prob(i) => i,
            Target::Action(i) => self.prob_states.len() + i,
        }
    }

    /// Indices in range, distributions summing to one, `walk` only into
    /// probabilistic states and everything else only into action states.
    pub fn is_well_formed(&self) -> bool {
        let (np, na) = (self.prob_states.len(), self.action_states.len());
        let dists_ok = self.prob_states.iter().all(|dist| {
            dist.iter().all(|(a, p)| *a < na && *p > S::zero())
                && dist
                    .iter()
                    .fold(S::zero(), |acc, (_, p)| acc + p)
                    .approx_eq(&S::one())
        });
        let moves_ok =
            self.action_states
                .iter()
                .flatten()
                .all(|(label, target)| match (label, target) {
                    (Label::Walk(_), Target::Prob(t)) => *t < np,
                    (Label::Threads, Target::Action(t)) => *t < na,
                    _ => false,
                });
        dists_ok && moves_ok && self.initial < np
    }

    /// Quotient in the text format: `P <from> <prob> <to>` per distribution
    /// entry, then `T <from> <label> <to>` per transition, using the joint
    /// numbering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, dist) in self.prob_states.iter().enumerate() {
            for (a, p) in dist {
                let to = self.state_id(Target::Action(*a));
                writeln!(out, "P {i} {p} {to}").unwrap();
            }
        }
        for (i, moves) in self.action_states.iter().enumerate() {
            let from = self.state_id(Target::Action(i));
            for (label, target) in moves {
                writeln!(out, "T {from} {label} {}", self.state_id(*target)).unwrap();
            }
        }
        out
    }
}

/// Alternating system for the model started at `init_pos`; only states
/// reachable from there are built.
///
/// Each position `pos` gets a probabilistic state `D(pos)` with one branch
/// per outcome of [`MuleModel::outcomes`] (every thread pattern for the
/// fixed-N and natural models). Branch `A` does `threads` into `B`, and `B`
/// offers one `walk(d)` per round choice, into `D(end)`.
pub fn build_plts<S: Scalar>(model: &MuleModel<S>, init_pos: usize) -> Result<Plts<S>> {
    let width = model.width();
    if init_pos >= width {
        return Err(crate::Error::Position {
            pos: init_pos,
            max: width - 1,
        });
    }
    let outcomes: Vec<_> = model
        .outcomes()?
        .into_iter()
        .filter(|(_, p)| !p.is_zero())
        .collect();

    let mut prob_of_pos: Vec<Option<usize>> = vec![None; width];
    let mut positions = vec![init_pos];
    prob_of_pos[init_pos] = Some(0);
    let mut prob_states = Vec::new();
    let mut action_states = Vec::new();

    let mut next = 0;
    while next < positions.len() {
        let pos = positions[next];
        next += 1;
        let mut dist = Vec::with_capacity(outcomes.len());
        for (summary, p) in &outcomes {
            let branch = action_states.len();
            let walks = branch + 1;
            action_states.push(vec![(Label::Threads, Target::Action(walks))]);
            let mut moves = Vec::with_capacity(2);
            for choice in resolve_round(pos, *summary, width) {
                let target = *prob_of_pos[choice.end_pos].get_or_insert_with(|| {
                    positions.push(choice.end_pos);
                    positions.len() - 1
                });
                moves.push((Label::Walk(choice.distance), Target::Prob(target)));
            }
            action_states.push(moves);
            dist.push((branch, p.clone()));
        }
        prob_states.push(dist);
    }
    Ok(Plts::new(prob_states, action_states, 0))
}

/// Assignment of every state (joint numbering) to a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<usize>,
    num_blocks: usize,
}

impl Partition {
    /// Renumbers blocks by order of first appearance, i.e. by the smallest
    /// state they contain.
    fn canonical(raw: &[usize]) -> Self {
        let mut renumber = HashMap::new();
        let block_of: Vec<usize> = raw
            .iter()
            .map(|b| {
                let fresh = renumber.len();
                *renumber.entry(*b).or_insert(fresh)
            })
            .collect();
        Partition {
            num_blocks: renumber.len(),
            block_of,
        }
    }

    pub fn block_of(&self, state: usize) -> usize {
        self.block_of[state]
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn num_states(&self) -> usize {
        self.block_of.len()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks];
        for (state, b) in self.block_of.iter().enumerate() {
            blocks[*b].push(state);
        }
        blocks
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Signature<K> {
    Prob(Vec<(usize, K)>),
    Action(Vec<(Label, usize)>),
}

/// Result of partition refinement.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub partition: Partition,
    /// Block count of the initial partition and after every round.
    pub block_counts: Vec<usize>,
}

/// Coarsest strong probabilistic bisimulation.
///
/// Starts from {probabilistic states, action states} and repeatedly splits
/// every block by signature: for a probabilistic state, the mass it assigns
/// to each block; for an action state, the set of (label, target block)
/// pairs. Stops when a round splits nothing.
pub fn refine<S: Scalar>(plts: &Plts<S>) -> Refinement {
    let np = plts.num_prob_states();
    let initial: Vec<usize> = (0..plts.num_states())
        .map(|s| usize::from(s >= np))
        .collect();
    let mut partition = Partition::canonical(&initial);
    let mut block_counts = vec![partition.num_blocks];

    loop {
        let mut ids: HashMap<(usize, Signature<S::Key>), usize> = HashMap::new();
        let raw: Vec<usize> = (0..plts.num_states())
            .map(|state| {
                let sig = signature(plts, &partition, state);
                let fresh = ids.len();
                *ids.entry((partition.block_of[state], sig)).or_insert(fresh)
            })
            .collect();
        let refined = Partition::canonical(&raw);
        let stable = refined.num_blocks == partition.num_blocks;
        block_counts.push(refined.num_blocks);
        partition = refined;
        if stable {
            return Refinement {
                partition,
                block_counts,
            };
        }
    }
}

fn signature<S: Scalar>(plts: &Plts<S>, partition: &Partition, state: usize) -> Signature<S::Key> {
    let np = plts.num_prob_states();
    if state < np {
        let mut mass: BTreeMap<usize, S> = BTreeMap::new();
        for (a, p) in plts.distribution(state) {
            let block = partition.block_of[np + a];
            let entry = mass.entry(block).or_insert_with(S::zero);
            *entry = entry.clone() + p;
        }
        Signature::Prob(mass.into_iter().map(|(b, p)| (b, p.key())).collect())
    } else {
        let mut moves: Vec<(Label, usize)> = plts
            .transitions(state - np)
            .iter()
            .map(|(label, target)| (*label, partition.block_of[plts.state_id(*target)]))
            .collect();
        moves.sort_unstable();
        moves.dedup();
        Signature::Action(moves)
    }
}

pub fn coarsest_bisimulation<S: Scalar>(plts: &Plts<S>) -> Partition {
    refine(plts).partition
}

/// Side-by-side copy of both systems (`a`'s states first); returns the
/// union and the probabilistic-state index of `b`'s initial state.
pub fn disjoint_union<S: Scalar>(a: &Plts<S>, b: &Plts<S>) -> (Plts<S>, usize) {
    let (pa, aa) = (a.num_prob_states(), a.num_action_states());
    let shift = |t: &Target| match *t {
        Target::Prob(i) => Target::Prob(i + pa),
        Target::Action(i) => Target::Action(i + aa),
    };
    let prob_states = a
        .prob_states
        .iter()
        .cloned()
        .chain(
            b.prob_states
                .iter()
                .map(|d| d.iter().map(|(t, p)| (t + aa, p.clone())).collect()),
        )
        .collect();
    let action_states = a
        .action_states
        .iter()
        .cloned()
        .chain(
            b.action_states
                .iter()
                .map(|m| m.iter().map(|(l, t)| (*l, shift(t))).collect()),
        )
        .collect();
    (
        Plts {
            prob_states,
            action_states,
            initial: a.initial,
        },
        b.initial + pa,
    )
}

/// Whether the initial states of `a` and `b` are strongly probabilistically
/// bisimilar.
pub fn bisimilar<S: Scalar>(a: &Plts<S>, b: &Plts<S>) -> bool {
    let (union, b_initial) = disjoint_union(a, b);
    let partition = coarsest_bisimulation(&union);
    partition.block_of(union.initial) == partition.block_of(b_initial)
}

/// The system of bisimulation classes. Blocks are numbered by their
/// smallest original state, so probabilistic blocks come first.
pub fn quotient<S: Scalar>(plts: &Plts<S>) -> Plts<S> {
    let partition = coarsest_bisimulation(plts);
    let np = plts.num_prob_states();
    let blocks = partition.blocks();
    let prob_blocks = blocks.iter().take_while(|b| b[0] < np).count();

    let prob_states = blocks[..prob_blocks]
        .iter()
        .map(|members| {
            let mut mass: BTreeMap<usize, S> = BTreeMap::new();
            for (a, p) in plts.distribution(members[0]) {
                let target = partition.block_of(np + a) - prob_blocks;
                let entry = mass.entry(target).or_insert_with(S::zero);
                *entry = entry.clone() + p;
            }
            mass.into_iter().collect()
        })
        .collect();
    let action_states = blocks[prob_blocks..]
        .iter()
        .map(|members| {
            let mut moves: Vec<(Label, Target)> = plts
                .transitions(members[0] - np)
                .iter()
                .map(|(label, target)| {
                    let block = partition.block_of(plts.state_id(*target));
                    let t = match target {
                        Target::Prob(_) => Target::Prob(block),
                        Target::Action(_) => Target::Action(block - prob_blocks),
                    };
                    (*label, t)
                })
                .collect();
            moves.sort_unstable();
            moves.dedup();
            moves
        })
        .collect();
    Plts {
        prob_states,
        action_states,
        initial: partition.block_of(plts.initial),
    }
}

/// Minimal expected total `walk` cost over `horizon` rounds from the
/// initial state, reading `walk(d)` as cost `d` and resolving every
/// nondeterministic choice optimally. Action states without transitions
/// cost nothing.
pub fn expected_cost<S: Scalar>(plts: &Plts<S>, horizon: usize) -> S {
    let mut prob_values = vec![S::zero(); plts.num_prob_states()];
    for _ in 0..horizon {
        let mut action_values: Vec<Option<S>> = vec![None; plts.num_action_states()];
        for a in 0..plts.num_action_states() {
            action_value(plts, a, &prob_values, &mut action_values);
        }
        prob_values = plts
            .prob_states
            .iter()
            .map(|dist| {
                dist.iter().fold(S::zero(), |acc, (a, p)| {
                    acc + action_values[*a].clone().unwrap() * p
                })
            })
            .collect();
    }
    prob_values[plts.initial].clone()
}

fn action_value<S: Scalar>(plts: &Plts<S>, a: usize, prev: &[S], memo: &mut [Option<S>]) -> S {
    if let Some(v) = &memo[a] {
        return v.clone();
    }
    let value = plts.action_states[a]
        .iter()
        .map(|(label, target)| match (label, target) {
            (Label::Walk(d), Target::Prob(t)) => S::from_u64(*d as u64) + &prev[*t],
            (_, Target::Action(t)) => action_value(plts, *t, prev, memo),
            (_, Target::Prob(t)) => prev[*t].clone(),
        })
        .reduce(S::min)
        .unwrap_or_else(S::zero);
    memo[a] = Some(value.clone());
    value
}
