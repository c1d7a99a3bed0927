//! Open-loop epistemic threshold cascade and its steady-state analysis.
//!
//! An agent adopts at `t + 1` if it has already adopted or if the share of
//! credibility it attributes to adopting neighbors reaches its threshold.
//! Adoption is irreversible, so every run reaches a fixed point within `n`
//! steps. Fixed points are exactly the adopter sets whose complement is
//! epistemically cohesive, and the final adopter set is the complement of the
//! largest cohesive subset of the non-seeds.

use rayon::prelude::*;
use serde::Serialize;

use crate::epistemics::Agent;
use crate::error::{Error, Result};
use crate::network::{AgentId, AgentSet, Network};
use crate::{PAR_MIN_AGENTS, TOLERANCE};

/// Share of the credibility mass `x` attributes to its neighbors that comes
/// from adopters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfluenceRatio {
    pub agent: AgentId,
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
}

/// Influence of the adopter set on `x`. An agent that attributes no
/// credibility to any neighbor is unreachable and gets ratio 0.
pub fn influence_ratio(net: &Network, adopters: &AgentSet, x: AgentId) -> InfluenceRatio {
    let (numerator, denominator) = net.credibility_mass(x.index(), adopters);
    InfluenceRatio {
        agent: x,
        value: ratio(numerator, denominator),
        numerator,
        denominator,
    }
}

#[inline]
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn reaches_threshold(ratio: f64, threshold: f64) -> bool {
    ratio >= threshold - TOLERANCE
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeState {
    pub t: usize,
    pub adopted: AgentSet,
    pub thresholds: Vec<f64>,
}

impl CascadeState {
    pub fn initial(seeds: AgentSet, thresholds: Vec<f64>) -> Self {
        CascadeState {
            t: 0,
            adopted: seeds,
            thresholds,
        }
    }
}

/// Adopter set after one synchronous update from `adopters`.
pub fn next_adopters(net: &Network, adopters: &AgentSet, thresholds: &[f64]) -> AgentSet {
    let n = net.n();
    let decide = |x: usize| {
        adopters.contains_index(x) || {
            let (num, den) = net.credibility_mass(x, adopters);
            reaches_threshold(ratio(num, den), thresholds[x])
        }
    };
    let flags = if n >= PAR_MIN_AGENTS {
        (0..n).into_par_iter().map(decide).collect()
    } else {
        (0..n).map(decide).collect()
    };
    AgentSet::from_flags(flags)
}

pub fn step(net: &Network, state: &CascadeState) -> CascadeState {
    CascadeState {
        t: state.t + 1,
        adopted: next_adopters(net, &state.adopted, &state.thresholds),
        thresholds: state.thresholds.clone(),
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    /// States at `t = 0..=t_end`.
    pub states: Vec<CascadeState>,
    /// `switching_sets[t - 1]` holds the agents that switched at `t`.
    pub switching_sets: Vec<AgentSet>,
    /// Whether the last recorded state is a fixed point.
    pub fixed_point: bool,
}

impl Trajectory {
    pub fn t_end(&self) -> usize {
        self.states.len() - 1
    }

    /// Final adopter set.
    pub fn s_star_star(&self) -> &AgentSet {
        &self
            .states
            .last()
            .expect("trajectory is never empty")
            .adopted
    }
}

/// Iterates the cascade from `seeds` until no agent switches or `max_t`
/// steps have been taken.
pub fn simulate(
    net: &Network,
    thresholds: &[f64],
    seeds: &AgentSet,
    max_t: usize,
) -> Result<Trajectory> {
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    check_dims(net, thresholds, seeds)?;
    let mut states = vec![CascadeState::initial(seeds.clone(), thresholds.to_vec())];
    let mut switching_sets = Vec::new();
    loop {
        let current = states.last().expect("non-empty");
        let next = step(net, current);
        let switched = next.adopted.difference(&current.adopted);
        if switched.is_empty() {
            return Ok(Trajectory {
                states,
                switching_sets,
                fixed_point: true,
            });
        }
        if current.t == max_t {
            return Ok(Trajectory {
                states,
                switching_sets,
                fixed_point: false,
            });
        }
        switching_sets.push(switched);
        states.push(next);
    }
}

fn check_dims(net: &Network, thresholds: &[f64], set: &AgentSet) -> Result<()> {
    if thresholds.len() != net.n() || set.universe_len() != net.n() {
        return Err(Error::DimensionMismatch(format!(
            "network has {} agents, thresholds {}, agent set {}",
            net.n(),
            thresholds.len(),
            set.universe_len()
        )));
    }
    Ok(())
}

/// Whether member `x` of `set` satisfies the cohesiveness inequality.
///
/// Without any credibility mass toward its neighbors `x` can never be
/// reached, so it holds whenever `x` would not adopt on zero influence.
#[inline]
fn cohesive_member(net: &Network, thresholds: &[f64], set: &AgentSet, x: usize) -> bool {
    let (inside, total) = net.credibility_mass(x, set);
    if total > 0.0 {
        inside / total > 1.0 - thresholds[x] + TOLERANCE
    } else {
        0.0 < thresholds[x] - TOLERANCE
    }
}

/// True iff every member of `set` attributes more than `1 − ρ_x` of its
/// neighbor credibility to other members. The empty set is cohesive.
pub fn is_cohesive(net: &Network, thresholds: &[f64], set: &AgentSet) -> bool {
    set.iter()
        .all(|x| cohesive_member(net, thresholds, set, x.index()))
}

/// Largest cohesive subset of `base`, by iterative peeling.
pub fn largest_cohesive_subset(net: &Network, thresholds: &[f64], base: &AgentSet) -> AgentSet {
    let order: Vec<AgentId> = base.ids();
    peel_cohesive(net, thresholds, base, &order)
}

/// Peeling with an explicit initial visiting order. Cohesive sets are closed
/// under union, so every order yields the same set.
pub fn peel_cohesive(
    net: &Network,
    thresholds: &[f64],
    base: &AgentSet,
    order: &[AgentId],
) -> AgentSet {
    let mut set = base.clone();
    let mut queued = vec![false; net.n()];
    let mut work: Vec<usize> = Vec::with_capacity(order.len());
    // The work list is a stack, so push in reverse to visit `order` first to last.
    for id in order.iter().rev() {
        if set.contains(*id) && !queued[id.index()] {
            queued[id.index()] = true;
            work.push(id.index());
        }
    }
    while let Some(x) = work.pop() {
        queued[x] = false;
        if !set.contains_index(x) || cohesive_member(net, thresholds, &set, x) {
            continue;
        }
        set.remove(AgentId(x));
        for &y in net.graph().adj(x) {
            if set.contains(y) && !queued[y.index()] {
                queued[y.index()] = true;
                work.push(y.index());
            }
        }
    }
    set
}

/// True iff no agent outside `adopters` switches in one step.
pub fn is_fixed_point(net: &Network, thresholds: &[f64], adopters: &AgentSet) -> bool {
    let stuck = (0..net.n()).all(|x| {
        adopters.contains_index(x) || {
            let (num, den) = net.credibility_mass(x, adopters);
            !reaches_threshold(ratio(num, den), thresholds[x])
        }
    });
    debug_assert_eq!(
        stuck,
        is_cohesive(net, thresholds, &adopters.complement()),
        "fixed point and cohesive complement disagree for {adopters}"
    );
    stuck
}

/// Final adopter set predicted from the seeds alone: the complement of the
/// largest cohesive subset of the non-seeds.
pub fn final_adopters(net: &Network, thresholds: &[f64], seeds: &AgentSet) -> Result<AgentSet> {
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    check_dims(net, thresholds, seeds)?;
    Ok(largest_cohesive_subset(net, thresholds, &seeds.complement()).complement())
}

/// Reliability and credibility-gap sums over the adopting (`alpha`) and
/// non-adopting (`beta`) neighbors of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NeighborSplit {
    pub r_alpha: f64,
    pub r_beta: f64,
    pub delta_alpha: f64,
    pub delta_beta: f64,
}

/// Splits the neighbors of `x` by membership in `adopters` and sums `r_y`
/// and `Δ_{y,x} = r_y − γ_{y,x}` on each side.
pub fn neighbor_split(
    net: &Network,
    agents: &[Agent],
    adopters: &AgentSet,
    x: AgentId,
) -> NeighborSplit {
    let mut s = NeighborSplit {
        r_alpha: 0.0,
        r_beta: 0.0,
        delta_alpha: 0.0,
        delta_beta: 0.0,
    };
    for &y in net.graph().adj(x.index()) {
        let r = agents[y.index()].reliability;
        let delta = r - net.credibility().get(y, x);
        if adopters.contains(y) {
            s.r_alpha += r;
            s.delta_alpha += delta;
        } else {
            s.r_beta += r;
            s.delta_beta += delta;
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransientCheck {
    pub agent: AgentId,
    pub split: NeighborSplit,
    /// `r^α Δ^β ≥ r^β Δ^α`.
    pub holds: bool,
}

/// Evaluates, for each agent the fair network would have adopting at `t + 1`,
/// the sufficient condition under which credibility gaps do not slow the
/// cascade at that step. Both runs are assumed to share `adopters` at `t`.
pub fn transient_condition(
    net: &Network,
    agents: &[Agent],
    fair_next_adopters: &AgentSet,
    adopters: &AgentSet,
) -> Vec<TransientCheck> {
    fair_next_adopters
        .iter()
        .map(|x| {
            let split = neighbor_split(net, agents, adopters, x);
            TransientCheck {
                agent: x,
                split,
                holds: split.r_alpha * split.delta_beta >= split.r_beta * split.delta_alpha,
            }
        })
        .collect()
}
