//! ℓ1-gain certificates for positive switched systems.
//!
//! A certificate is a strictly positive vector `p_i` per automaton node and a
//! gain `γ` such that for every edge `(v_i, l, v_j)`
//!
//! ```text
//! A_lᵀ p_j − p_i + C_lᵀ 1  < 0
//! B_lᵀ p_j − γ 1 + D_lᵀ 1  < 0      (entry-wise)
//! ```
//!
//! The linear Lyapunov function `V(x, v) = p_vᵀ x` then satisfies
//! `V(t+1) − V(t) < γ 1ᵀw(t) − 1ᵀz(t)` along every admissible trajectory with
//! nonnegative state and input. Strict inequalities are imposed with a fixed
//! margin `ε`, and `p_i ≥ δ` keeps the vectors in the open orthant.

use crate::automaton::Edge;
use crate::cone::{in_dual_interior, ConeId};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::lp::{solve_lp, LinearProgram, LpOutcome};
use crate::models::{SystemDescription, SystemKind};
use crate::report::{CheckReport, EdgeCheck, NodeCheck};
use crate::tolerances::{L1_DEFAULT_INTERIOR_FLOOR, L1_DEFAULT_MARGIN};

#[derive(Clone, Debug, PartialEq)]
pub struct L1Certificate {
    pub gamma: f64,
    /// One vector per node, in graph order.
    pub p: Vec<Vec<f64>>,
    pub margin: f64,
}

/// Stability-only certificate: `A_lᵀ p_j − p_i < 0` on every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityCertificate {
    pub p: Vec<Vec<f64>>,
    pub margin: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct L1Options {
    pub margin: f64,
    pub interior_floor: f64,
}

impl Default for L1Options {
    fn default() -> Self {
        L1Options { margin: L1_DEFAULT_MARGIN, interior_floor: L1_DEFAULT_INTERIOR_FLOOR }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum L1Outcome {
    Certified(L1Certificate),
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StabilityOutcome {
    Stable(StabilityCertificate),
    Infeasible,
}

fn require_pss(s: &SystemDescription) -> Result<()> {
    if s.kind != SystemKind::Pss {
        return Err(Error::input(format!("ℓ1 certification needs a pss system, got {}", s.kind)));
    }
    s.ensure_valid()
}

/// Rows `A_lᵀ p_j − p_i` for one edge, written into `g` starting at `row0`.
fn state_rows(g: &mut DenseMatrix, row0: usize, s: &SystemDescription, e: &Edge) {
    let n = s.dims.n;
    let a = &s.mode(e.label).a;
    for k in 0..n {
        for r in 0..n {
            g[(row0 + k, e.to * n + r)] += a[(r, k)];
        }
        g[(row0 + k, e.from * n + k)] -= 1.0;
    }
}

fn column_sums(m: &DenseMatrix) -> Vec<f64> {
    (0..m.cols()).map(|j| m.column(j).iter().sum()).collect()
}

/// Variables: all `p_i` concatenated (lower bound `δ`), then `γ` (lower bound 0).
/// Objective: minimize `γ`. Rows per edge: `n` state rows then `q` input rows.
pub fn assemble_l1_lp(s: &SystemDescription, margin: f64, interior_floor: f64) -> Result<LinearProgram> {
    require_pss(s)?;
    if !(margin >= 0.0) || !(interior_floor > 0.0) {
        return Err(Error::input("margin must be ≥ 0 and interior floor > 0"));
    }
    let n = s.dims.n;
    let q = s.dims.q;
    let n_v = s.graph.node_count();
    let vars = n_v * n + 1;
    let gamma_col = n_v * n;
    let edges = s.graph.edges();
    let rows = edges.len() * (n + q);
    let mut g = DenseMatrix::zeros(rows, vars);
    let mut h = vec![0.0; rows];
    for (k, e) in edges.iter().enumerate() {
        let row0 = k * (n + q);
        let mode = s.mode(e.label);
        state_rows(&mut g, row0, s, e);
        for (i, cs) in column_sums(&mode.c).into_iter().enumerate() {
            h[row0 + i] = -margin - cs;
        }
        let b = &mode.b;
        for c in 0..q {
            for r in 0..n {
                g[(row0 + n + c, e.to * n + r)] += b[(r, c)];
            }
            g[(row0 + n + c, gamma_col)] = -1.0;
        }
        for (i, ds) in column_sums(&mode.d).into_iter().enumerate() {
            h[row0 + n + i] = -margin - ds;
        }
    }
    let mut objective = vec![0.0; vars];
    objective[gamma_col] = 1.0;
    let mut lower = vec![interior_floor; vars];
    lower[gamma_col] = 0.0;
    LinearProgram::new(objective, g, h, lower)
}

fn split_p(x: &[f64], n: usize, n_v: usize) -> Vec<Vec<f64>> {
    (0..n_v).map(|i| x[i * n..(i + 1) * n].to_vec()).collect()
}

/// Minimal-γ certificate from the LP; `Infeasible` when no positive `p_i` exist.
pub fn certify_l1(s: &SystemDescription, opts: L1Options) -> Result<L1Outcome> {
    let lp = assemble_l1_lp(s, opts.margin, opts.interior_floor)?;
    match solve_lp(&lp.row_scaled())? {
        LpOutcome::Optimal { x, .. } => {
            let n = s.dims.n;
            let n_v = s.graph.node_count();
            Ok(L1Outcome::Certified(L1Certificate {
                gamma: x[n_v * n],
                p: split_p(&x, n, n_v),
                margin: opts.margin,
            }))
        }
        LpOutcome::Infeasible => Ok(L1Outcome::Infeasible),
        LpOutcome::Unbounded { .. } => Err(Error::Numerical("ℓ1 LP reported unbounded (γ ≥ 0 bounds it)".into())),
    }
}

/// State conditions only. The conditions are homogeneous in `p`, so the LP
/// normalizes with `p ≥ 1` and minimizes `Σ p`.
pub fn certify_l1_stability(s: &SystemDescription, opts: L1Options) -> Result<StabilityOutcome> {
    require_pss(s)?;
    let n = s.dims.n;
    let n_v = s.graph.node_count();
    let edges = s.graph.edges();
    let mut g = DenseMatrix::zeros(edges.len() * n, n_v * n);
    for (k, e) in edges.iter().enumerate() {
        state_rows(&mut g, k * n, s, e);
    }
    let lp = LinearProgram::new(
        vec![1.0; n_v * n],
        g,
        vec![-opts.margin; edges.len() * n],
        vec![1.0; n_v * n],
    )?;
    match solve_lp(&lp.row_scaled())? {
        LpOutcome::Optimal { x, .. } => Ok(StabilityOutcome::Stable(StabilityCertificate {
            p: split_p(&x, n, n_v),
            margin: opts.margin,
        })),
        LpOutcome::Infeasible => Ok(StabilityOutcome::Infeasible),
        LpOutcome::Unbounded { .. } => Err(Error::Numerical("stability LP reported unbounded".into())),
    }
}

fn check_p_shape(s: &SystemDescription, p: &[Vec<f64>]) -> Result<()> {
    if p.len() != s.graph.node_count() {
        return Err(Error::dims("certificate nodes", s.graph.node_count(), p.len()));
    }
    if let Some(bad) = p.iter().find(|v| v.len() != s.dims.n) {
        return Err(Error::dims("certificate vector length", s.dims.n, bad.len()));
    }
    Ok(())
}

/// `A_lᵀ p_j − p_i + C_lᵀ1` and `B_lᵀ p_j − γ1 + D_lᵀ1` for one edge.
pub fn edge_residuals(s: &SystemDescription, p: &[Vec<f64>], gamma: f64, e: &Edge) -> (Vec<f64>, Vec<f64>) {
    let mode = s.mode(e.label);
    let pj = &p[e.to];
    let pi = &p[e.from];
    let state: Vec<f64> = mode
        .a
        .t_matvec(pj)
        .iter()
        .zip(pi)
        .zip(column_sums(&mode.c))
        .map(|((a, b), c)| a - b + c)
        .collect();
    let input: Vec<f64> = mode
        .b
        .t_matvec(pj)
        .iter()
        .zip(column_sums(&mode.d))
        .map(|(a, d)| a - gamma + d)
        .collect();
    (state, input)
}

fn node_checks(s: &SystemDescription, p: &[Vec<f64>], tol: f64) -> Result<Vec<NodeCheck>> {
    p.iter()
        .enumerate()
        .map(|(i, v)| {
            Ok(NodeCheck {
                node: s.graph.node_name(i).to_string(),
                min_value: v.iter().copied().fold(f64::INFINITY, f64::min),
                passed: in_dual_interior(ConeId::NonnegOrthant(s.dims.n), v, tol)?,
            })
        })
        .collect()
}

fn edge_check(s: &SystemDescription, k: usize, e: &Edge, residual: Vec<f64>, tol: f64) -> Result<EdgeCheck> {
    let worst = residual.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let negated: Vec<f64> = residual.iter().map(|v| -v).collect();
    Ok(EdgeCheck {
        edge: k,
        from: s.graph.node_name(e.from).to_string(),
        mode: s.mode(e.label).name.clone(),
        to: s.graph.node_name(e.to).to_string(),
        worst_residual: worst,
        passed: in_dual_interior(ConeId::NonnegOrthant(negated.len()), &negated, tol)?,
    })
}

/// Re-evaluates every edge inequality from the raw system data. Passes iff all
/// residuals are `≤ −tol` and all `p_i` entries are `≥ tol`.
pub fn check_l1_certificate(s: &SystemDescription, cert: &L1Certificate, tol: f64) -> Result<CheckReport> {
    s.ensure_valid()?;
    check_p_shape(s, &cert.p)?;
    let nodes = node_checks(s, &cert.p, tol)?;
    let edges = s
        .graph
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let (mut state, input) = edge_residuals(s, &cert.p, cert.gamma, e);
            state.extend(input);
            edge_check(s, k, e, state, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport { tol, edges, nodes })
}

pub fn check_l1_stability(s: &SystemDescription, cert: &StabilityCertificate, tol: f64) -> Result<CheckReport> {
    s.ensure_valid()?;
    check_p_shape(s, &cert.p)?;
    let nodes = node_checks(s, &cert.p, tol)?;
    let edges = s
        .graph
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let a = &s.mode(e.label).a;
            let r: Vec<f64> = a.t_matvec(&cert.p[e.to]).iter().zip(&cert.p[e.from]).map(|(x, y)| x - y).collect();
            edge_check(s, k, e, r, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport { tol, edges, nodes })
}
