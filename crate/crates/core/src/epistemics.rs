//! Reliability, discrimination factors and relational credibility.
//!
//! `γ_{x,y}` is the credibility hearer `y` attributes to speaker `x`:
//! `γ_{x,y} = φ_x · η_{x,y} · r_x` with `φ_x = 0.5^{|groups_x|}` and
//! `η_{x,y} = 0.5^{∓|groups_x ∩ groups_y|}`. Both factors are exact powers of
//! two, so `γ` is an exact dyadic rescaling of `r_x`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::AgentId;
use crate::TOLERANCE;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Agent {
    pub id: AgentId,
    /// Discriminated groups the agent belongs to.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub groups: BTreeSet<String>,
    pub reliability: f64,
    /// Initial resistivity threshold.
    pub rho0: f64,
    /// Reaction `b_x` of the resistivity to a policy input.
    #[serde(default = "default_responsiveness")]
    pub responsiveness: f64,
    #[serde(default)]
    pub is_seed: bool,
}

fn default_responsiveness() -> f64 {
    -1.0
}

impl Agent {
    pub fn new(id: usize, reliability: f64, rho0: f64) -> Self {
        Agent {
            id: AgentId(id),
            groups: BTreeSet::new(),
            reliability,
            rho0,
            responsiveness: default_responsiveness(),
            is_seed: false,
        }
    }

    pub fn with_groups<I, S>(mut self, groups: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.groups = groups.into_iter().map(Into::into).collect();
        self
    }

    pub fn seed(mut self, is_seed: bool) -> Self {
        self.is_seed = is_seed;
        self
    }

    pub fn responsiveness(mut self, b: f64) -> Self {
        self.responsiveness = b;
        self
    }
}

/// Sign of the exponent in the relational factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CredibilityMode {
    /// `η = 0.5^{-|shared|}`: shared groups restore credibility.
    #[default]
    Excess,
    /// `η = 0.5^{|shared|}`: shared groups deepen the deficit.
    Deficit,
}

fn dyadic(exp: i32) -> f64 {
    2f64.powi(exp)
}

fn group_count(groups: &BTreeSet<String>) -> i32 {
    i32::try_from(groups.len()).expect("group count fits in i32")
}

/// Intersectional discrimination factor `0.5^{|groups|}`.
pub fn discrimination_factor(groups: &BTreeSet<String>) -> f64 {
    dyadic(-group_count(groups))
}

/// Relational discrimination factor; symmetric in its two group sets.
pub fn relational_factor(
    groups_x: &BTreeSet<String>,
    groups_y: &BTreeSet<String>,
    mode: CredibilityMode,
) -> f64 {
    let shared = i32::try_from(groups_x.intersection(groups_y).count()).expect("fits in i32");
    match mode {
        CredibilityMode::Excess => dyadic(shared),
        CredibilityMode::Deficit => dyadic(-shared),
    }
}

/// Credibility `γ_{x,y}` that `hearer` attributes to `speaker`.
pub fn relational_credibility(speaker: &Agent, hearer: &Agent, mode: CredibilityMode) -> f64 {
    let phi = discrimination_factor(&speaker.groups);
    let eta = relational_factor(&speaker.groups, &hearer.groups, mode);
    phi * eta * speaker.reliability
}

/// Dense `n × n` grid of `γ_{speaker, hearer}`. The diagonal is never read by
/// the dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct CredibilityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl CredibilityMatrix {
    /// Matrix from explicit entries, each of which must lie in `[0, 1]`.
    pub fn from_fn<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> f64,
    {
        let mut values = Vec::with_capacity(n * n);
        for speaker in 0..n {
            for hearer in 0..n {
                let v = f(speaker, hearer);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::OverrideOutOfRange {
                        speaker,
                        hearer,
                        value: v,
                    });
                }
                values.push(v);
            }
        }
        Ok(CredibilityMatrix { n, values })
    }

    /// Every entry equal to the speaker's reliability.
    pub fn fair(agents: &[Agent]) -> Self {
        let n = agents.len();
        let mut values = Vec::with_capacity(n * n);
        for a in agents {
            values.extend(std::iter::repeat_n(a.reliability, n));
        }
        CredibilityMatrix { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, speaker: AgentId, hearer: AgentId) -> f64 {
        self.values[speaker.0 * self.n + hearer.0]
    }

    #[inline]
    pub(crate) fn get_index(&self, speaker: usize, hearer: usize) -> f64 {
        self.values[speaker * self.n + hearer]
    }

    pub fn set(&mut self, speaker: AgentId, hearer: AgentId, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OverrideOutOfRange {
                speaker: speaker.0,
                hearer: hearer.0,
                value,
            });
        }
        self.values[speaker.0 * self.n + hearer.0] = value;
        Ok(())
    }
}

/// Explicit credibility settings for individual ordered pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairSettings {
    /// Relational-factor mode used for particular pairs instead of the default.
    pub modes: BTreeMap<(AgentId, AgentId), CredibilityMode>,
    /// Direct `γ` values that replace the computed ones.
    pub overrides: BTreeMap<(AgentId, AgentId), f64>,
}

/// Fills `γ` for every ordered pair from group memberships and reliability,
/// then applies per-pair mode switches and direct overrides.
pub fn build_credibility_matrix(
    agents: &[Agent],
    mode: CredibilityMode,
    pairs: &PairSettings,
) -> Result<CredibilityMatrix> {
    if agents.is_empty() {
        return Err(Error::Validation("agent list is empty".into()));
    }
    let n = agents.len();
    if let Some((pos, a)) = agents.iter().enumerate().find(|(i, a)| a.id.0 != *i) {
        return Err(Error::Validation(format!(
            "agent at position {pos} has id {}, ids must be dense and ordered",
            a.id
        )));
    }
    for &(s, h) in pairs.modes.keys().chain(pairs.overrides.keys()) {
        for id in [s, h] {
            if id.0 >= n {
                return Err(Error::OutOfRange { id: id.0, n });
            }
        }
    }
    let mut values = Vec::with_capacity(n * n);
    for speaker in agents {
        for hearer in agents {
            let m = pairs
                .modes
                .get(&(speaker.id, hearer.id))
                .copied()
                .unwrap_or(mode);
            values.push(relational_credibility(speaker, hearer, m));
        }
    }
    let mut matrix = CredibilityMatrix { n, values };
    for (&(s, h), &v) in &pairs.overrides {
        matrix.set(s, h, v)?;
    }
    Ok(matrix)
}

/// `Δ_{x,y} = r_x − γ_{x,y}`: positive for a deficit, negative for an excess.
pub fn credibility_delta(
    matrix: &CredibilityMatrix,
    agents: &[Agent],
    speaker: AgentId,
    hearer: AgentId,
) -> f64 {
    agents[speaker.0].reliability - matrix.get(speaker, hearer)
}

/// True iff `γ_{x,y} = r_x` for every ordered pair `x ≠ y`.
pub fn is_epistemically_fair(matrix: &CredibilityMatrix, agents: &[Agent]) -> bool {
    let n = matrix.n();
    (0..n).all(|x| {
        (0..n)
            .filter(|&y| y != x)
            .all(|y| (agents[x].reliability - matrix.get_index(x, y)).abs() <= TOLERANCE)
    })
}
