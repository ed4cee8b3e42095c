use std::fmt;

/// One finding of a structural validation pass.
#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    EmptyGraph,
    ZeroModes,
    NoOutgoingEdge { node: String },
    DuplicateNodeName { node: String },
    EndpointOutOfRange { edge: usize, index: usize, node_count: usize },
    LabelOutOfRange { edge: usize, label: usize, mode_count: usize },
    DuplicateEdge { edge: usize, from: String, label: usize, to: String },
    ModeCountMismatch { graph: usize, modes: usize },
    MatrixDimension { mode: String, matrix: &'static str, expected: (usize, usize), found: (usize, usize) },
    NegativeEntry { mode: String, matrix: &'static str, row: usize, col: usize, value: f64 },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::EmptyGraph => write!(f, "graph has no nodes"),
            Issue::ZeroModes => write!(f, "mode count must be at least 1"),
            Issue::NoOutgoingEdge { node } => write!(f, "node {node} has no outgoing edge"),
            Issue::DuplicateNodeName { node } => write!(f, "node name {node} appears more than once"),
            Issue::EndpointOutOfRange { edge, index, node_count } => {
                write!(f, "edge {edge}: endpoint index {index} out of range (graph has {node_count} nodes)")
            }
            Issue::LabelOutOfRange { edge, label, mode_count } => write!(
                f,
                "edge {edge}: label {} out of range (mode count {mode_count})",
                label + 1
            ),
            Issue::DuplicateEdge { edge, from, label, to } => {
                write!(f, "edge {edge}: duplicate edge ({from}, m{}, {to})", label + 1)
            }
            Issue::ModeCountMismatch { graph, modes } => {
                write!(f, "graph declares {graph} modes but the system defines {modes}")
            }
            Issue::MatrixDimension { mode, matrix, expected, found } => write!(
                f,
                "mode {mode}: {matrix} is {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Issue::NegativeEntry { mode, matrix, row, col, value } => write!(
                f,
                "mode {mode}: {matrix}[{}][{}] = {value} is negative",
                row + 1,
                col + 1
            ),
        }
    }
}

/// Hard errors make a description unusable; warnings are surfaced but tolerated.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn is_clean(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }

    pub(crate) fn merge(&mut self, other: ValidationReport) {
        self.errors.extend(other.errors);
        self.warnings.extend(other.warnings);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return writeln!(f, "valid");
        }
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Worst residual of one edge condition.
///
/// For linear conditions this is the largest entry of the residual vector, for
/// LMIs the largest eigenvalue of the block matrix. Strict feasibility means
/// every residual is at most `-tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCheck {
    pub edge: usize,
    pub from: String,
    pub mode: String,
    pub to: String,
    pub worst_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeCheck {
    pub node: String,
    /// Smallest entry of `p_i`, or smallest eigenvalue of `P_i`.
    pub min_value: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub tol: f64,
    pub edges: Vec<EdgeCheck>,
    pub nodes: Vec<NodeCheck>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.edges.iter().all(|e| e.passed) && self.nodes.iter().all(|n| n.passed)
    }

    pub fn worst_edge_residual(&self) -> f64 {
        self.edges.iter().map(|e| e.worst_residual).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            writeln!(
                f,
                "node {:<8} min {:>14.6e}  {}",
                n.node,
                n.min_value,
                if n.passed { "ok" } else { "FAIL" }
            )?;
        }
        for e in &self.edges {
            writeln!(
                f,
                "edge {:>3} ({}, {}, {})  worst residual {:>14.6e}  {}",
                e.edge,
                e.from,
                e.mode,
                e.to,
                e.worst_residual,
                if e.passed { "ok" } else { "FAIL" }
            )?;
        }
        writeln!(f, "{} at tol {:e}", if self.passed() { "PASS" } else { "FAIL" }, self.tol)
    }
}
