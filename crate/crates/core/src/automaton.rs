//! Switching-constraint automata: labeled directed graphs whose walks are the
//! admissible mode sequences.
//!
//! Labels are 0-based mode indices internally; files and reports use the
//! mode names of the owning system.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::report::{Issue, ValidationReport};
use crate::tolerances::WALK_CAP;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub label: usize,
    pub to: usize,
}

impl Edge {
    pub fn new(from: usize, label: usize, to: usize) -> Self {
        Edge { from, label, to }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SwitchingGraph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    mode_count: usize,
}

impl SwitchingGraph {
    /// Builds a graph without checking it; call [`validate_graph`] before use.
    pub fn new(nodes: Vec<String>, edges: Vec<Edge>, mode_count: usize) -> Self {
        SwitchingGraph { nodes, edges, mode_count }
    }

    /// Like [`SwitchingGraph::new`], but rejects graphs that fail validation.
    pub fn try_new(nodes: Vec<String>, edges: Vec<Edge>, mode_count: usize) -> Result<Self> {
        let g = Self::new(nodes, edges, mode_count);
        let report = validate_graph(&g);
        if !report.is_valid() {
            return Err(Error::input(format!("invalid switching graph: {}", report.errors[0])));
        }
        Ok(g)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn node_name(&self, index: usize) -> &str {
        &self.nodes[index]
    }

    /// Indices (into `edges()`) of the edges leaving `node`, ascending.
    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.from == node)
            .map(|(i, _)| i)
    }

    pub fn has_edge(&self, from: usize, label: usize, to: usize) -> bool {
        self.edges.contains(&Edge { from, label, to })
    }

    /// Same graph with an extra edge appended.
    pub fn with_edge(&self, edge: Edge) -> Self {
        let mut g = self.clone();
        g.edges.push(edge);
        g
    }

    /// Checks that `walk` is admissible in this graph.
    pub fn check_walk(&self, walk: &Walk) -> Result<()> {
        if walk.start >= self.node_count() {
            return Err(Error::input(format!("walk start index {} out of range", walk.start)));
        }
        let mut at = walk.start;
        for (t, step) in walk.steps.iter().enumerate() {
            if !self.has_edge(at, step.label, step.to) {
                return Err(Error::input(format!(
                    "step {t}: no edge ({}, label {}, {}) in the switching graph",
                    self.nodes[at],
                    step.label + 1,
                    self.nodes.get(step.to).map_or("?", String::as_str)
                )));
            }
            at = step.to;
        }
        Ok(())
    }
}

pub fn validate_graph(g: &SwitchingGraph) -> ValidationReport {
    let mut report = ValidationReport::default();
    if g.nodes.is_empty() {
        report.errors.push(Issue::EmptyGraph);
    }
    if g.mode_count == 0 {
        report.errors.push(Issue::ZeroModes);
    }
    let mut names = HashSet::new();
    for n in &g.nodes {
        if !names.insert(n.as_str()) {
            report.errors.push(Issue::DuplicateNodeName { node: n.clone() });
        }
    }
    let n_v = g.nodes.len();
    let mut seen = HashSet::new();
    for (i, e) in g.edges.iter().enumerate() {
        for idx in [e.from, e.to] {
            if idx >= n_v {
                report.errors.push(Issue::EndpointOutOfRange { edge: i, index: idx, node_count: n_v });
            }
        }
        if e.label >= g.mode_count {
            report.errors.push(Issue::LabelOutOfRange { edge: i, label: e.label, mode_count: g.mode_count });
        }
        if !seen.insert(*e) {
            let name = |k: usize| g.nodes.get(k).cloned().unwrap_or_else(|| format!("#{k}"));
            report.errors.push(Issue::DuplicateEdge { edge: i, from: name(e.from), label: e.label, to: name(e.to) });
        }
    }
    for (k, name) in g.nodes.iter().enumerate() {
        if !g.edges.iter().any(|e| e.from == k) {
            report.errors.push(Issue::NoOutgoingEdge { node: name.clone() });
        }
    }
    report
}

/// One node with `m` self-loops: every mode sequence is admissible.
pub fn arbitrary_switching(m: usize) -> Result<SwitchingGraph> {
    if m == 0 {
        return Err(Error::input("arbitrary switching needs at least one mode"));
    }
    let edges = (0..m).map(|l| Edge::new(0, l, 0)).collect();
    Ok(SwitchingGraph::new(vec!["v1".to_string()], edges, m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub label: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Walk {
    pub start: usize,
    pub steps: Vec<Step>,
}

impl Walk {
    pub fn empty(start: usize) -> Self {
        Walk { start, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Node occupied at each time `0..=len`.
    pub fn nodes(&self) -> Vec<usize> {
        std::iter::once(self.start).chain(self.steps.iter().map(|s| s.to)).collect()
    }

    /// Mode active at each time `0..len`.
    pub fn labels(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.label).collect()
    }

    /// Edges traversed, as `(from, label, to)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let mut at = self.start;
        self.steps.iter().map(move |s| {
            let e = Edge::new(at, s.label, s.to);
            at = s.to;
            e
        })
    }

    pub fn describe(&self, g: &SwitchingGraph, mode_names: &[String]) -> String {
        let mut out = g.node_name(self.start).to_string();
        for s in &self.steps {
            out.push_str(&format!(" -{}-> {}", mode_names[s.label], g.node_name(s.to)));
        }
        out
    }
}

fn check_start(g: &SwitchingGraph, start: usize) -> Result<()> {
    if start >= g.node_count() {
        return Err(Error::input(format!(
            "start node index {start} out of range (graph has {} nodes)",
            g.node_count()
        )));
    }
    Ok(())
}

/// All admissible walks of `horizon` steps from `start`, ordered
/// lexicographically by their edge-index sequence.
pub fn enumerate_walks(g: &SwitchingGraph, start: usize, horizon: usize) -> Result<Vec<Walk>> {
    let mut walks = Vec::new();
    for_each_walk(g, start, horizon, |w| {
        walks.push(w.clone());
        Ok(())
    })?;
    Ok(walks)
}

/// Depth-first visit of the walks `enumerate_walks` would return, in the same
/// order, without materializing them.
pub fn for_each_walk(
    g: &SwitchingGraph,
    start: usize,
    horizon: usize,
    mut visit: impl FnMut(&Walk) -> Result<()>,
) -> Result<usize> {
    check_start(g, start)?;
    let out: Vec<Vec<usize>> = (0..g.node_count()).map(|v| g.outgoing(v).collect()).collect();
    let mut walk = Walk::empty(start);
    if horizon == 0 {
        visit(&walk)?;
        return Ok(1);
    }
    // Stack of positions into the outgoing-edge list of the node at each depth.
    let mut cursor: Vec<usize> = vec![0];
    let mut count = 0usize;
    while let Some(pos) = cursor.last().copied() {
        let depth = cursor.len() - 1;
        let at = if depth == 0 { start } else { walk.steps[depth - 1].to };
        if pos >= out[at].len() {
            cursor.pop();
            walk.steps.pop();
            continue;
        }
        *cursor.last_mut().unwrap() += 1;
        let e = g.edges[out[at][pos]];
        walk.steps.truncate(depth);
        walk.steps.push(Step { label: e.label, to: e.to });
        if depth + 1 == horizon {
            count += 1;
            if count > WALK_CAP {
                return Err(Error::EnumerationCap { cap: WALK_CAP });
            }
            visit(&walk)?;
            walk.steps.pop();
        } else {
            cursor.push(0);
        }
    }
    Ok(count)
}

/// Number of admissible walks without enumerating them.
pub fn count_walks(g: &SwitchingGraph, start: usize, horizon: usize) -> Result<u128> {
    check_start(g, start)?;
    let mut counts = vec![1u128; g.node_count()];
    for _ in 0..horizon {
        let mut next = vec![0u128; g.node_count()];
        for e in &g.edges {
            next[e.from] = next[e.from].saturating_add(counts[e.to]);
        }
        counts = next;
    }
    Ok(counts[start])
}

/// A walk choosing uniformly among outgoing edges at every step, seeded with
/// ChaCha8 (`ChaCha8Rng::seed_from_u64(seed)`).
pub fn sample_walk(g: &SwitchingGraph, start: usize, horizon: usize, seed: u64) -> Result<Walk> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_walk_with(g, start, horizon, &mut rng)
}

pub fn sample_walk_with<R: Rng + ?Sized>(
    g: &SwitchingGraph,
    start: usize,
    horizon: usize,
    rng: &mut R,
) -> Result<Walk> {
    check_start(g, start)?;
    let mut walk = Walk::empty(start);
    let mut at = start;
    for _ in 0..horizon {
        let out: Vec<usize> = g.outgoing(at).collect();
        if out.is_empty() {
            return Err(Error::input(format!("node {} has no outgoing edge", g.nodes[at])));
        }
        let e = g.edges[out[rng.random_range(0..out.len())]];
        walk.steps.push(Step { label: e.label, to: e.to });
        at = e.to;
    }
    Ok(walk)
}
