//! Receding-horizon LQR nudging of individual resistivity thresholds.
//!
//! Each non-adopter's threshold follows `ρ^u(t+1) = ρ^u(t) + b u(t)`. The
//! policy tracks the target `ρ̄_x` (the credibility share of seed neighbors)
//! with a scalar finite-horizon LQR per agent, solved by backward Riccati
//! recursion at every step and applied for one step only.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{self, neighbor_split};
use crate::epistemics::Agent;
use crate::error::{Error, Result};
use crate::network::{AgentId, AgentSet, Network};
use crate::PAR_MIN_AGENTS;

/// How the tracking target `ρ̄_x` is computed during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetMode {
    /// Computed once from the seed set and held for the whole run.
    #[default]
    Frozen,
    /// Recomputed at every step from the current adopters (sensitivity runs).
    Recompute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyParams {
    pub omega_rho_bar: f64,
    pub omega_u: f64,
    pub horizon: usize,
    pub t_max: usize,
    #[serde(default)]
    pub target_mode: TargetMode,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            omega_rho_bar: 1.0,
            omega_u: 1.0,
            horizon: 10,
            t_max: 100,
            target_mode: TargetMode::Frozen,
        }
    }
}

impl PolicyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_rho_bar > 0.0 && self.omega_u > 0.0)
            || !self.omega_rho_bar.is_finite()
            || !self.omega_u.is_finite()
        {
            return Err(Error::NonPositiveWeights {
                omega_rho_bar: self.omega_rho_bar,
                omega_u: self.omega_u,
            });
        }
        if self.horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        Ok(())
    }
}

/// Backward solution of one agent's horizon problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSchedule {
    /// `κ̃(τ)` for `τ = 0..T`.
    pub gains: Vec<f64>,
    /// `p̃(τ)` for `τ = 0..=T`.
    pub cost_to_go: Vec<f64>,
}

impl GainSchedule {
    /// Gain applied in receding horizon, `κ̃(0)`.
    pub fn gain(&self) -> f64 {
        self.gains[0]
    }

    /// Open-loop inputs obtained by running the schedule from error `e0`.
    pub fn open_loop_inputs(&self, b: f64, e0: f64) -> Vec<f64> {
        let mut e = e0;
        self.gains
            .iter()
            .map(|&k| {
                let u = k * e;
                e += b * u;
                u
            })
            .collect()
    }
}

/// Scalar Riccati recursion for tracking error `e(τ+1) = e(τ) + b u(τ)` with
/// stage cost `ω^ρ e² + ω^u u²` and terminal cost `ω^ρ e(T)²`.
///
/// Requires `omega_u > 0`, `omega_rho >= 0` and `horizon >= 1`.
pub fn riccati_gain(b: f64, omega_rho: f64, omega_u: f64, horizon: usize) -> GainSchedule {
    assert!(horizon >= 1, "horizon must be at least 1");
    assert!(omega_u > 0.0, "effort weight must be positive");
    let mut cost_to_go = vec![0.0; horizon + 1];
    let mut gains = vec![0.0; horizon];
    cost_to_go[horizon] = omega_rho;
    for tau in (0..horizon).rev() {
        let p = cost_to_go[tau + 1];
        let den = omega_u + p * b * b;
        gains[tau] = -b * p / den;
        cost_to_go[tau] = omega_rho + p - b * b * p * p / den;
    }
    GainSchedule { gains, cost_to_go }
}

/// `u = κ (ρ^u − ρ̄)`.
#[inline]
pub fn control_input(gain: f64, rho_u: f64, rho_bar: f64) -> f64 {
    gain * (rho_u - rho_bar)
}

/// Credibility share of seed neighbors perceived by non-seed `x`.
pub fn individual_target(net: &Network, seeds: &AgentSet, x: AgentId) -> Result<f64> {
    if seeds.contains(x) {
        return Err(Error::IsSeed(x));
    }
    Ok(cascade::influence_ratio(net, seeds, x).value)
}

/// Splits `u_x` into the individual term `κ(ρ^u − 1)` and the epistemic term
/// `κ · (credibility share of non-seed neighbors)`. With no credibility mass
/// the whole share is attributed to the epistemic term so the two parts
/// always add up to `control_input`.
pub fn input_decomposition(
    net: &Network,
    seeds: &AgentSet,
    gain: f64,
    rho_u: f64,
    x: AgentId,
) -> Result<(f64, f64)> {
    if seeds.contains(x) {
        return Err(Error::IsSeed(x));
    }
    let non_seeds = seeds.complement();
    let r = cascade::influence_ratio(net, &non_seeds, x);
    let share = if r.denominator > 0.0 { r.value } else { 1.0 };
    Ok((gain * (rho_u - 1.0), gain * share))
}

/// `Δ^β r^α > Δ^α r^β` with neighbors split by seed membership: true when
/// the credibility gaps lower `x`'s input relative to the fair network.
pub fn lemma2_condition(net: &Network, agents: &[Agent], seeds: &AgentSet, x: AgentId) -> bool {
    let s = neighbor_split(net, agents, seeds, x);
    s.delta_beta * s.r_alpha > s.delta_alpha * s.r_beta
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlledStep {
    pub t: usize,
    pub adopted: AgentSet,
    pub rho_u: Vec<f64>,
    /// `u_x(t)`; all zero on the terminal record.
    pub inputs: Vec<f64>,
    pub gains: Vec<f64>,
    /// `None` for seeds.
    pub targets: Vec<Option<f64>>,
    /// False on the terminal record, where no input is applied.
    pub applied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlledTrajectory {
    pub steps: Vec<ControlledStep>,
    /// `switching_sets[t - 1]` holds the agents that switched at `t`.
    pub switching_sets: Vec<AgentSet>,
    /// First time every agent has adopted, if reached within `t_max`.
    pub t_star_star: Option<usize>,
}

impl ControlledTrajectory {
    pub fn final_step(&self) -> &ControlledStep {
        self.steps.last().expect("trajectory is never empty")
    }
}

fn targets_from(net: &Network, seeds: &AgentSet, reference: &AgentSet) -> Vec<Option<f64>> {
    (0..net.n())
        .map(|x| {
            (!seeds.contains_index(x))
                .then(|| cascade::influence_ratio(net, reference, AgentId(x)).value)
        })
        .collect()
}

/// Closed-loop run: at each `t` solve every non-adopter's horizon problem
/// with weights frozen at `ω̄^ρ (1 − a_x(t))`, apply the first input, move the
/// thresholds, and step the cascade against `ρ^u(t)`.
pub fn receding_horizon_run(
    net: &Network,
    agents: &[Agent],
    params: &PolicyParams,
) -> Result<ControlledTrajectory> {
    params.validate()?;
    let n = net.n();
    if agents.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "network has {n} agents, agent list {}",
            agents.len()
        )));
    }
    let seeds = AgentSet::from_flags(agents.iter().map(|a| a.is_seed).collect());
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }

    let frozen_targets = targets_from(net, &seeds, &seeds);
    let mut gain_cache: BTreeMap<u64, f64> = BTreeMap::new();
    let mut adopted = seeds.clone();
    let mut rho_u: Vec<f64> = agents.iter().map(|a| a.rho0).collect();
    let mut steps = Vec::new();
    let mut switching_sets = Vec::new();

    for t in 0.. {
        let targets = match params.target_mode {
            TargetMode::Frozen => frozen_targets.clone(),
            TargetMode::Recompute => targets_from(net, &seeds, &adopted),
        };
        if adopted.is_full() || t == params.t_max {
            let t_star_star = adopted.is_full().then_some(t);
            steps.push(ControlledStep {
                t,
                adopted,
                rho_u,
                inputs: vec![0.0; n],
                gains: vec![0.0; n],
                targets,
                applied: false,
            });
            return Ok(ControlledTrajectory {
                steps,
                switching_sets,
                t_star_star,
            });
        }

        // Non-adopters share the weight ω̄^ρ, so gains only vary with b.
        for (x, agent) in agents.iter().enumerate() {
            if !adopted.contains_index(x) {
                let b = agent.responsiveness;
                gain_cache.entry(b.to_bits()).or_insert_with(|| {
                    riccati_gain(b, params.omega_rho_bar, params.omega_u, params.horizon).gain()
                });
            }
        }
        let policy = |x: usize| -> (f64, f64) {
            if adopted.contains_index(x) {
                return (0.0, 0.0);
            }
            let k = gain_cache[&agents[x].responsiveness.to_bits()];
            let target = targets[x].expect("non-adopters are never seeds");
            (k, control_input(k, rho_u[x], target))
        };
        let (gains, inputs): (Vec<f64>, Vec<f64>) = if n >= PAR_MIN_AGENTS {
            (0..n).into_par_iter().map(policy).unzip()
        } else {
            (0..n).map(policy).unzip()
        };

        let next_adopted = cascade::next_adopters(net, &adopted, &rho_u);
        let next_rho: Vec<f64> = (0..n)
            .map(|x| (rho_u[x] + agents[x].responsiveness * inputs[x]).clamp(0.0, 1.0))
            .collect();
        switching_sets.push(next_adopted.difference(&adopted));
        steps.push(ControlledStep {
            t,
            adopted: std::mem::replace(&mut adopted, next_adopted),
            rho_u: std::mem::replace(&mut rho_u, next_rho),
            inputs,
            gains,
            targets,
            applied: true,
        });
    }
    unreachable!("the step loop only exits by returning")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epistemics::CredibilityMatrix;
    use crate::network::build_graph;

    fn star(m: CredibilityMatrix) -> Network {
        Network::new(build_graph(3, &[(0, 1), (0, 2)]).unwrap(), m).unwrap()
    }

    fn fair_star() -> Network {
        star(CredibilityMatrix::from_fn(3, |_, _| 1.0).unwrap())
    }

    fn biased_star() -> Network {
        star(
            CredibilityMatrix::from_fn(3, |s, h| match (s, h) {
                (1, 0) => 0.4,
                (2, 0) => 0.6,
                _ => 1.0,
            })
            .unwrap(),
        )
    }

    fn seeds(ids: &[usize]) -> AgentSet {
        AgentSet::from_ids(3, ids.iter().copied()).unwrap()
    }

    #[test]
    fn riccati_examples() {
        let s = riccati_gain(-1.0, 0.0, 1.0, 5);
        assert_eq!(s.gain(), 0.0);
        assert!(s.cost_to_go.iter().all(|&p| p == 0.0));

        assert_eq!(riccati_gain(-1.0, 1.0, 1.0, 1).gain(), 0.5);

        let s = riccati_gain(-1.0, 1.0, 1.0, 2);
        assert_eq!(s.cost_to_go[1], 1.5);
        assert!((s.gain() - 0.6).abs() < 1e-15);
        assert_eq!(s.gains.len(), 2);
        assert_eq!(s.cost_to_go.len(), 3);
    }

    #[test]
    fn riccati_horizon_two_matches_normal_equations() {
        // J = e0² + u0² + (e0 − u0)² + u1² + (e0 − u0 − u1)²; setting the
        // gradient to zero gives 3 u0 + u1 = 2 e0 and u0 + 2 u1 = e0.
        let e0: f64 = 1.0;
        let det = 3.0 * 2.0 - 1.0 * 1.0;
        let u0 = (2.0 * e0 * 2.0 - e0 * 1.0) / det;
        let u1 = (3.0 * e0 - 1.0 * 2.0 * e0) / det;
        let u = riccati_gain(-1.0, 1.0, 1.0, 2).open_loop_inputs(-1.0, e0);
        assert!(
            (u[0] - u0).abs() < 1e-15 && (u[1] - u1).abs() < 1e-15,
            "{u:?}"
        );
        assert!((u0 - 0.6).abs() < 1e-15);
    }

    #[test]
    fn control_input_examples() {
        assert_eq!(control_input(0.5, 0.3, 0.3), 0.0);
        assert!((control_input(0.5, 0.8, 0.5) - 0.15).abs() < 1e-15);
        assert_eq!(control_input(0.0, 0.9, 0.1), 0.0);
    }

    #[test]
    fn target_examples() {
        let net = fair_star();
        assert_eq!(
            individual_target(&net, &seeds(&[1]), AgentId(0)).unwrap(),
            0.5
        );
        assert_eq!(
            individual_target(&net, &seeds(&[1]), AgentId(2)).unwrap(),
            0.0
        );
        assert_eq!(
            individual_target(&biased_star(), &seeds(&[1]), AgentId(0)).unwrap(),
            0.4
        );
        assert!(matches!(
            individual_target(&net, &seeds(&[1]), AgentId(1)),
            Err(Error::IsSeed(AgentId(1)))
        ));
    }

    #[test]
    fn decomposition_examples() {
        let net = fair_star();
        let (c1, ep) = input_decomposition(&net, &seeds(&[1]), 0.5, 0.8, AgentId(0)).unwrap();
        assert!((c1 + 0.1).abs() < 1e-15);
        assert_eq!(ep, 0.25);
        assert!((c1 + ep - 0.15).abs() < 1e-15);

        let (c1, ep) = input_decomposition(&net, &seeds(&[0]), 0.5, 1.0, AgentId(1)).unwrap();
        assert_eq!((c1, ep), (0.0, 0.0));

        let (c1, ep) = input_decomposition(&net, &seeds(&[1]), 0.0, 0.7, AgentId(0)).unwrap();
        assert_eq!(c1, 0.0);
        assert_eq!(ep, 0.0);
        assert!(input_decomposition(&net, &seeds(&[1]), 0.5, 0.7, AgentId(1)).is_err());
    }

    fn star_agents() -> Vec<Agent> {
        (0..3)
            .map(|i| Agent::new(i, 1.0, 0.8).seed(i == 1))
            .collect()
    }

    #[test]
    fn lemma2_examples() {
        let agents = star_agents();
        assert!(!lemma2_condition(
            &fair_star(),
            &agents,
            &seeds(&[1]),
            AgentId(0)
        ));
        let net = star(
            CredibilityMatrix::from_fn(3, |s, h| if (s, h) == (2, 0) { 0.6 } else { 1.0 }).unwrap(),
        );
        assert!(lemma2_condition(&net, &agents, &seeds(&[1]), AgentId(0)));
    }

    #[test]
    fn all_seeds_run_is_trivial() {
        let agents: Vec<_> = (0..3).map(|i| Agent::new(i, 1.0, 0.8).seed(true)).collect();
        let tr = receding_horizon_run(&fair_star(), &agents, &PolicyParams::default()).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.t_star_star, Some(0));
        assert!(tr.steps[0].inputs.iter().all(|&u| u == 0.0));
    }

    #[test]
    fn rejects_bad_params() {
        let agents = star_agents();
        let p = PolicyParams {
            omega_u: 0.0,
            ..PolicyParams::default()
        };
        assert!(matches!(
            receding_horizon_run(&fair_star(), &agents, &p),
            Err(Error::NonPositiveWeights { .. })
        ));
        let p = PolicyParams {
            horizon: 0,
            ..PolicyParams::default()
        };
        assert!(matches!(
            receding_horizon_run(&fair_star(), &agents, &p),
            Err(Error::ZeroHorizon)
        ));
        let none: Vec<_> = (0..3).map(|i| Agent::new(i, 1.0, 0.8)).collect();
        assert!(matches!(
            receding_horizon_run(&fair_star(), &none, &PolicyParams::default()),
            Err(Error::EmptySeedSet)
        ));
    }

    #[test]
    fn agent_on_target_adopts_without_input() {
        let g = build_graph(2, &[(0, 1)]).unwrap();
        let m = CredibilityMatrix::from_fn(2, |_, _| 1.0).unwrap();
        let net = Network::new(g, m).unwrap();
        let agents = vec![
            Agent::new(0, 1.0, 1.0).responsiveness(-1.0),
            Agent::new(1, 1.0, 0.0).seed(true),
        ];
        // Target is 1 and ρ^u(0) = 1: the agent adopts at once with zero input.
        let tr = receding_horizon_run(&net, &agents, &PolicyParams::default()).unwrap();
        assert_eq!(tr.t_star_star, Some(1));
        assert_eq!(tr.steps[0].inputs[0], 0.0);
    }

    #[test]
    fn isolated_target_drives_threshold_down() {
        // Path 0-1-2, seed 0. Agent 2 sees no seed (target 0) and agent 1 has
        // target 0.5 with an initial threshold above it.
        let g = build_graph(3, &[(0, 1), (1, 2)]).unwrap();
        let net = Network::new(g, CredibilityMatrix::from_fn(3, |_, _| 1.0).unwrap()).unwrap();
        let agents = vec![
            Agent::new(0, 1.0, 0.0).seed(true),
            Agent::new(1, 1.0, 0.9),
            Agent::new(2, 1.0, 0.9),
        ];
        let params = PolicyParams::default();
        let tr = receding_horizon_run(&net, &agents, &params).unwrap();
        let k = riccati_gain(-1.0, 1.0, 1.0, params.horizon).gain();
        assert!(k > 0.0 && k < 1.0);
        for w in tr.steps.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if !a.adopted.contains(AgentId(1)) {
                assert!(b.rho_u[1] < a.rho_u[1]);
                let before = a.rho_u[1] - 0.5;
                let after = b.rho_u[1] - 0.5;
                assert!((after - (1.0 - k) * before).abs() < 1e-15);
            }
        }
        let t = tr.t_star_star.expect("full adoption");
        for step in &tr.steps {
            for x in 0..3 {
                if step.adopted.contains(AgentId(x)) {
                    assert_eq!(step.inputs[x], 0.0);
                    assert_eq!(step.gains[x], 0.0);
                } else {
                    assert!(step.inputs[x] > 0.0);
                }
            }
        }
        assert!(t > 1);
    }
}
