//! Undirected social graphs and agent-set bookkeeping.
//!
//! Agents are identified by dense indices `0..n`, so per-agent data lives in
//! flat vectors and the credibility matrix is a flat `n * n` grid.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::epistemics::CredibilityMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub usize);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for AgentId {
    fn from(i: usize) -> Self {
        AgentId(i)
    }
}

/// A subset of the agents of a network of fixed size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AgentSet {
    members: Vec<bool>,
}

impl AgentSet {
    pub fn empty(n: usize) -> Self {
        AgentSet {
            members: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        AgentSet {
            members: vec![true; n],
        }
    }

    /// Builds a set from ids; ids `>= n` are rejected.
    pub fn from_ids<I>(n: usize, ids: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<AgentId>,
    {
        let mut set = AgentSet::empty(n);
        for id in ids {
            let id = id.into();
            if id.0 >= n {
                return Err(Error::OutOfRange { id: id.0, n });
            }
            set.members[id.0] = true;
        }
        Ok(set)
    }

    /// Members are the set bits of `mask` (bit `i` is agent `i`); `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "bit masks cover at most 64 agents");
        AgentSet {
            members: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn from_flags(members: Vec<bool>) -> Self {
        AgentSet { members }
    }

    pub fn universe_len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn contains(&self, id: AgentId) -> bool {
        self.members.get(id.0).copied().unwrap_or(false)
    }

    #[inline]
    pub(crate) fn contains_index(&self, i: usize) -> bool {
        self.members[i]
    }

    pub fn insert(&mut self, id: AgentId) {
        self.members[id.0] = true;
    }

    pub fn remove(&mut self, id: AgentId) {
        self.members[id.0] = false;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn is_full(&self) -> bool {
        self.members.iter().all(|&m| m)
    }

    pub fn complement(&self) -> AgentSet {
        AgentSet {
            members: self.members.iter().map(|&m| !m).collect(),
        }
    }

    pub fn union(&self, other: &AgentSet) -> AgentSet {
        debug_assert_eq!(self.members.len(), other.members.len());
        AgentSet {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| a || b)
                .collect(),
        }
    }

    pub fn intersection(&self, other: &AgentSet) -> AgentSet {
        debug_assert_eq!(self.members.len(), other.members.len());
        AgentSet {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| a && b)
                .collect(),
        }
    }

    /// Members of `self` not in `other`.
    pub fn difference(&self, other: &AgentSet) -> AgentSet {
        debug_assert_eq!(self.members.len(), other.members.len());
        AgentSet {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| a && !b)
                .collect(),
        }
    }

    pub fn is_subset(&self, other: &AgentSet) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(&a, &b)| !a || b)
    }

    pub fn iter(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| AgentId(i))
    }

    /// Sorted member ids.
    pub fn ids(&self) -> Vec<AgentId> {
        self.iter().collect()
    }

    pub fn as_flags(&self) -> &[bool] {
        &self.members
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, id) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

/// Connected, simple, undirected graph over agents `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(AgentId, AgentId)>,
    adjacency: Vec<Vec<AgentId>>,
}

impl Graph {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Normalized edges `(low, high)`, sorted and deduplicated.
    pub fn edges(&self) -> &[(AgentId, AgentId)] {
        &self.edges
    }

    pub fn neighbors(&self, x: AgentId) -> Result<&[AgentId]> {
        self.adjacency
            .get(x.0)
            .map(Vec::as_slice)
            .ok_or(Error::OutOfRange { id: x.0, n: self.n })
    }

    /// Neighbor slice by raw index; panics when out of range.
    #[inline]
    pub(crate) fn adj(&self, i: usize) -> &[AgentId] {
        &self.adjacency[i]
    }

    pub fn degree(&self, x: AgentId) -> Result<usize> {
        self.neighbors(x).map(<[AgentId]>::len)
    }

    pub fn has_edge(&self, x: AgentId, y: AgentId) -> bool {
        self.adjacency
            .get(x.0)
            .is_some_and(|nb| nb.binary_search(&y).is_ok())
    }
}

/// Builds and validates a graph from an edge list.
///
/// Duplicate edges (in either orientation) collapse into one.
pub fn build_graph(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
    let mut set = BTreeSet::new();
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::InvalidEdge(a, b, "endpoint out of range"));
        }
        if a == b {
            return Err(Error::InvalidEdge(a, b, "self-loop"));
        }
        set.insert((a.min(b), a.max(b)));
    }
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b) in &set {
        adjacency[a].push(AgentId(b));
        adjacency[b].push(AgentId(a));
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
    }
    let components = count_components(&adjacency);
    if components > 1 {
        return Err(Error::DisconnectedGraph { components });
    }
    Ok(Graph {
        n,
        edges: set
            .into_iter()
            .map(|(a, b)| (AgentId(a), AgentId(b)))
            .collect(),
        adjacency,
    })
}

fn count_components(adjacency: &[Vec<AgentId>]) -> usize {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    queue.push_back(w.0);
                }
            }
        }
    }
    components
}

/// Draws a G(n, p) graph, resampling the whole graph until it is connected.
///
/// Pairs are visited in lexicographic order and share one ChaCha8 stream
/// across attempts, so the result depends only on `(n, p, seed)`.
pub fn generate_er_graph(n: usize, p: f64, seed: u64, max_attempts: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidGenerator(format!(
            "n must be at least 2, got {n}"
        )));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidGenerator(format!(
            "p must lie in (0, 1], got {p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for _ in 0..max_attempts {
        edges.clear();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        match build_graph(n, &edges) {
            Ok(g) => return Ok(g),
            Err(Error::DisconnectedGraph { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenerationFailed {
        n,
        p,
        attempts: max_attempts,
    })
}

/// A graph paired with its relational-credibility matrix.
#[derive(Debug, Clone)]
pub struct Network {
    graph: Graph,
    credibility: CredibilityMatrix,
}

impl Network {
    pub fn new(graph: Graph, credibility: CredibilityMatrix) -> Result<Self> {
        if graph.n() != credibility.n() {
            return Err(Error::DimensionMismatch(format!(
                "graph has {} agents, credibility matrix {}",
                graph.n(),
                credibility.n()
            )));
        }
        Ok(Network { graph, credibility })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn credibility(&self) -> &CredibilityMatrix {
        &self.credibility
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Total credibility that `x` attributes to its neighbors and the part of
    /// it coming from members of `set`: `(Σ_{y∈N_x∩set} γ_{y,x}, Σ_{y∈N_x} γ_{y,x})`.
    #[inline]
    pub(crate) fn credibility_mass(&self, x: usize, set: &AgentSet) -> (f64, f64) {
        let mut inside = 0.0;
        let mut total = 0.0;
        for &y in self.graph.adj(x) {
            let g = self.credibility.get_index(y.0, x);
            total += g;
            if set.contains_index(y.0) {
                inside += g;
            }
        }
        (inside, total)
    }
}
