//! ℓ2-gain certificates for general switched systems.
//!
//! Lifting `Y = [x; w][x; w]ᵀ` turns a general switched system into a
//! cone-preserving system on the PSD cone; a certificate is then a matrix
//! `P_i ≻ 0` per node and a gain `γ` such that for every edge `(v_i, l, v_j)`
//!
//! ```text
//! ⎡ AᵀP_jA − P_i + CᵀC    AᵀP_jB + CᵀD     ⎤
//! ⎣ BᵀP_jA + DᵀC          BᵀP_jB + DᵀD − γI ⎦  ≺ 0 .
//! ```
//!
//! `γ` bounds `‖z‖²/‖w‖²`, i.e. the *square* of the induced ℓ2 norm.
//!
//! Feasibility at fixed `γ` is found by over-relaxed alternating projections
//! between an affine set (the LMIs written as equalities with PSD slacks) and
//! the product of PSD cones. A failed search is not a proof of
//! infeasibility; the bisection driver can therefore only over-report `γ`.

use crate::automaton::Edge;
use crate::cone::{in_dual_interior, ConeId};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, dot, solve_linear, symmetric_eigen, symmetric_eigenvalues, DenseMatrix};
use crate::models::{ModeMatrices, SystemDescription};
use crate::report::{CheckReport, EdgeCheck, NodeCheck};
use crate::tolerances::*;

#[derive(Clone, Debug, PartialEq)]
pub struct L2Certificate {
    pub gamma: f64,
    pub p: Vec<DenseMatrix>,
    pub margin: f64,
    /// Input weighting `W` replacing the identity in the `−γW` block, if any.
    pub input_weight: Option<DenseMatrix>,
}

/// `AᵀP_jA − P_i ≺ 0` on every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct L2StabilityCertificate {
    pub p: Vec<DenseMatrix>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct L2Options {
    /// LMI margin; `None` scales with the data (see [`default_margin`]).
    pub margin: Option<f64>,
    /// Relative bracket width at which bisection stops.
    pub gamma_tol: f64,
    pub gamma_max: Option<f64>,
    pub max_iterations: usize,
    pub input_weight: Option<DenseMatrix>,
    /// Solve for the inputs rescaled as `w ↦ β w`, i.e. with `B/β, D/β` and
    /// `γ/β²`. The LMIs are congruent, so certificates are unchanged, but the
    /// projection method converges far faster when `B` dwarfs `A`. `None`
    /// picks [`default_input_scale`].
    pub input_scale: Option<f64>,
}

impl Default for L2Options {
    fn default() -> Self {
        L2Options {
            margin: None,
            gamma_tol: L2_DEFAULT_GAMMA_TOL,
            gamma_max: None,
            max_iterations: L2_DEFAULT_MAX_ITERS,
            input_weight: None,
            input_scale: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum L2Outcome {
    Certified(L2Certificate),
    /// No feasible γ found up to the bracket cap.
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub enum L2StabilityOutcome {
    Stable(L2StabilityCertificate),
    NotFound,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Found(Vec<DenseMatrix>),
    NotFoundAtThisGamma { iterations: usize, gap: f64 },
}

/// `1e-6 · max(1, max_l ‖[A B; C D]‖∞²)`
pub fn default_margin(s: &SystemDescription) -> f64 {
    let worst = s.modes.iter().map(ModeMatrices::stacked_norm_inf).fold(0.0, f64::max);
    L2_MARGIN_REL * worst.powi(2).max(1.0)
}

/// Ratio of the largest input-column norm `‖[B; D]‖_F` to the largest
/// state-column norm `‖[A; C]‖_F`, never below 1.
pub fn default_input_scale(s: &SystemDescription) -> f64 {
    let fro2 = |a: &DenseMatrix, b: &DenseMatrix| (a.norm_fro().powi(2) + b.norm_fro().powi(2)).sqrt();
    let input = s.modes.iter().map(|m| fro2(&m.b, &m.d)).fold(0.0, f64::max);
    let state = s.modes.iter().map(|m| fro2(&m.a, &m.c)).fold(0.0, f64::max);
    if state > 0.0 && input.is_finite() {
        (input / state).max(1.0)
    } else {
        1.0
    }
}

fn check_weight(s: &SystemDescription, w: Option<&DenseMatrix>) -> Result<()> {
    if let Some(w) = w {
        let q = s.dims.q;
        if w.shape() != (q, q) {
            return Err(Error::dims("input weight", format!("{q}x{q}"), format!("{}x{}", w.rows(), w.cols())));
        }
        cholesky(w).map_err(|_| Error::input("input weight must be symmetric positive definite"))?;
    }
    Ok(())
}

fn check_p_shape(s: &SystemDescription, p: &[DenseMatrix]) -> Result<()> {
    let n = s.dims.n;
    if p.len() != s.graph.node_count() {
        return Err(Error::dims("certificate nodes", s.graph.node_count(), p.len()));
    }
    if let Some(bad) = p.iter().find(|m| m.shape() != (n, n)) {
        return Err(Error::dims("certificate matrix", format!("{n}x{n}"), format!("{}x{}", bad.rows(), bad.cols())));
    }
    Ok(())
}

/// Sandwich `Gᵀ P G`.
fn congruence(g: &DenseMatrix, p: &DenseMatrix) -> DenseMatrix {
    let gt = g.transpose();
    let out = gt.matmul(&p.matmul(g).expect("dims")).expect("dims");
    symmetrize_exact(out)
}

fn symmetrize_exact(mut m: DenseMatrix) -> DenseMatrix {
    for i in 0..m.rows() {
        for j in i + 1..m.cols() {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// The edge LMI block `M(l, i, j, γ)` evaluated at the given `P` tuple.
pub fn lmi_block(
    s: &SystemDescription,
    edge: &Edge,
    gamma: f64,
    p: &[DenseMatrix],
    input_weight: Option<&DenseMatrix>,
) -> Result<DenseMatrix> {
    check_p_shape(s, p)?;
    check_weight(s, input_weight)?;
    if edge.from >= p.len() || edge.to >= p.len() || edge.label >= s.modes.len() {
        return Err(Error::input("edge does not belong to the system"));
    }
    let n = s.dims.n;
    let q = s.dims.q;
    let mode = s.mode(edge.label);
    let ab = mode.a.hstack(&mode.b)?;
    let cd = mode.c.hstack(&mode.d)?;
    let mut m = congruence(&ab, &p[edge.to]).add(&congruence(&cd, &DenseMatrix::identity(cd.rows())))?;
    let pi = &p[edge.from];
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] -= pi[(r, c)];
        }
    }
    for r in 0..q {
        for c in 0..q {
            let w = input_weight.map_or(if r == c { 1.0 } else { 0.0 }, |w| w[(r, c)]);
            m[(n + r, n + c)] -= gamma * w;
        }
    }
    Ok(symmetrize_exact(m))
}

/// `AᵀP_jA − P_i` for the stability-only conditions.
pub fn stability_block(s: &SystemDescription, edge: &Edge, p: &[DenseMatrix]) -> Result<DenseMatrix> {
    check_p_shape(s, p)?;
    let a = &s.mode(edge.label).a;
    congruence(a, &p[edge.to]).sub(&p[edge.from]).map(symmetrize_exact)
}

// ---------------------------------------------------------------------------
// svec: symmetric k×k ↔ R^{k(k+1)/2}, off-diagonals scaled by √2 so the
// Euclidean norm is the Frobenius norm.

fn svec_len(k: usize) -> usize {
    k * (k + 1) / 2
}

fn svec(m: &DenseMatrix) -> Vec<f64> {
    let k = m.rows();
    let mut v = Vec::with_capacity(svec_len(k));
    for i in 0..k {
        v.push(m[(i, i)]);
        for j in i + 1..k {
            v.push(std::f64::consts::SQRT_2 * 0.5 * (m[(i, j)] + m[(j, i)]));
        }
    }
    v
}

fn smat(v: &[f64], k: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(k, k);
    let mut idx = 0;
    for i in 0..k {
        m[(i, i)] = v[idx];
        idx += 1;
        for j in i + 1..k {
            let x = v[idx] / std::f64::consts::SQRT_2;
            m[(i, j)] = x;
            m[(j, i)] = x;
            idx += 1;
        }
    }
    m
}

fn svec_basis(k: usize) -> Vec<DenseMatrix> {
    let len = svec_len(k);
    (0..len)
        .map(|i| {
            let mut e = vec![0.0; len];
            e[i] = 1.0;
            smat(&e, k)
        })
        .collect()
}

/// The fixed data of one feasibility problem: per edge the affine map
/// `P ↦ svec(M_e(P))` as a dense matrix plus its constant term.
struct LmiSystem {
    n: usize,
    block: usize,
    nodes: usize,
    maps: Vec<DenseMatrix>,
    constants: Vec<Vec<f64>>,
}

/// What the LMIs contain besides the Lyapunov difference term.
enum LmiKind<'a> {
    Performance { gamma: f64, weight: Option<&'a DenseMatrix> },
    Stability,
}

impl LmiSystem {
    fn build(s: &SystemDescription, kind: &LmiKind<'_>) -> Result<Self> {
        let n = s.dims.n;
        let q = s.dims.q;
        let block = match kind {
            LmiKind::Performance { .. } => n + q,
            LmiKind::Stability => n,
        };
        let nodes = s.graph.node_count();
        let dn = svec_len(n);
        let basis = svec_basis(n);
        let mut maps = Vec::new();
        let mut constants = Vec::new();
        for e in s.graph.edges() {
            let mode = s.mode(e.label);
            let g = match kind {
                LmiKind::Performance { .. } => mode.a.hstack(&mode.b)?,
                LmiKind::Stability => mode.a.clone(),
            };
            let mut map = DenseMatrix::zeros(svec_len(block), nodes * dn);
            for (k, ek) in basis.iter().enumerate() {
                let to_term = svec(&congruence(&g, ek));
                for (r, v) in to_term.iter().enumerate() {
                    map[(r, e.to * dn + k)] += v;
                }
                let mut embedded = DenseMatrix::zeros(block, block);
                embedded.set_block(0, 0, ek);
                for (r, v) in svec(&embedded).iter().enumerate() {
                    map[(r, e.from * dn + k)] -= v;
                }
            }
            let constant = match kind {
                LmiKind::Performance { gamma, weight } => {
                    let cd = mode.c.hstack(&mode.d)?;
                    let mut c = congruence(&cd, &DenseMatrix::identity(cd.rows()));
                    for r in 0..q {
                        for cc in 0..q {
                            let w = weight.map_or(if r == cc { 1.0 } else { 0.0 }, |w| w[(r, cc)]);
                            c[(n + r, n + cc)] -= gamma * w;
                        }
                    }
                    svec(&symmetrize_exact(c))
                }
                LmiKind::Stability => vec![0.0; svec_len(block)],
            };
            maps.push(map);
            constants.push(constant);
        }
        Ok(LmiSystem { n, block, nodes, maps, constants })
    }

    fn dn(&self) -> usize {
        svec_len(self.n)
    }

    fn p_mats(&self, x: &[f64]) -> Vec<DenseMatrix> {
        let dn = self.dn();
        (0..self.nodes).map(|i| smat(&x[i * dn..(i + 1) * dn], self.n)).collect()
    }

    fn edge_value(&self, e: usize, x: &[f64]) -> Vec<f64> {
        let mut v = self.maps[e].matvec(x);
        v.iter_mut().zip(&self.constants[e]).for_each(|(a, c)| *a += c);
        v
    }

    /// `M_e(P) ≼ −margin·I` on every edge, tested by Cholesky of `−M − margin·I`.
    fn strictly_feasible(&self, x: &[f64], margin: f64) -> bool {
        (0..self.maps.len()).all(|e| {
            let m = smat(&self.edge_value(e, x), self.block);
            cholesky(&m.scale(-1.0).shift_diag(-margin)).is_ok()
        })
    }
}

fn project_psd(m: &DenseMatrix, floor: f64) -> Result<DenseMatrix> {
    // Already inside: a Cholesky factor of m − floor·I is far cheaper than an eigendecomposition.
    if cholesky(&m.shift_diag(-floor)).is_ok() {
        return Ok(m.clone());
    }
    let eig = symmetric_eigen(m)?;
    if eig.values[0] >= floor {
        return Ok(m.clone());
    }
    Ok(eig.reconstruct_with(|l| l.max(floor)))
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn solve_feasibility(
    sys: &LmiSystem,
    margin: f64,
    max_iterations: usize,
    start: Option<&[DenseMatrix]>,
) -> Result<Feasibility> {
    let dn = sys.dn();
    let nx = sys.nodes * dn;
    let db = svec_len(sys.block);
    // The iterates aim for twice the requested margin so that the returned
    // point satisfies the requested margin with room to spare.
    let inner = 2.0 * margin;
    let target = svec(&DenseMatrix::identity(sys.block).scale(-inner));

    // Normal equations of the affine projection: (I + Σ LᵀL) x = x0 − Σ Lᵀ(c + s0 − t).
    let mut normal = DenseMatrix::identity(nx);
    for l in &sys.maps {
        normal = normal.add(&l.transpose().matmul(l)?)?;
    }
    let factor = cholesky(&normal).map_err(|e| Error::Numerical(format!("normal equations: {e}")))?;

    let x: Vec<f64> = match start {
        Some(p) => p.iter().flat_map(svec).collect(),
        None => (0..sys.nodes).flat_map(|_| svec(&DenseMatrix::identity(sys.n))).collect(),
    };
    if sys.strictly_feasible(&x, margin) && sys.p_mats(&x).iter().all(|m| cholesky(&m.shift_diag(-margin)).is_ok()) {
        return Ok(Feasibility::Found(sys.p_mats(&x)));
    }
    let edges = sys.maps.len();
    let nz = nx + edges * db;
    let mut z = x;
    z.resize(nz, 0.0);

    // One relaxed affine projection followed by a cone projection. Returns the
    // new point and the distance the cone projection moved it.
    let step = |z: &[f64]| -> Result<(Vec<f64>, f64)> {
        let (x, s) = z.split_at(nx);
        let mut rhs = x.to_vec();
        for (e, l) in sys.maps.iter().enumerate() {
            let se = &s[e * db..(e + 1) * db];
            let resid: Vec<f64> = (0..db).map(|r| target[r] - sys.constants[e][r] - se[r]).collect();
            for (a, b) in rhs.iter_mut().zip(l.t_matvec(&resid)) {
                *a += b;
            }
        }
        let xa = cholesky_solve(&factor, &rhs);
        let mut r = Vec::with_capacity(nz);
        r.extend(x.iter().zip(&xa).map(|(c, a)| c + L2_RELAXATION * (a - c)));
        for (e, l) in sys.maps.iter().enumerate() {
            let lx = l.matvec(&xa);
            let se = &s[e * db..(e + 1) * db];
            r.extend((0..db).map(|i| {
                let a = target[i] - sys.constants[e][i] - lx[i];
                se[i] + L2_RELAXATION * (a - se[i])
            }));
        }
        let mut g = Vec::with_capacity(nz);
        for i in 0..sys.nodes {
            g.extend(svec(&project_psd(&smat(&r[i * dn..(i + 1) * dn], sys.n), inner)?));
        }
        for e in 0..edges {
            let off = nx + e * db;
            g.extend(svec(&project_psd(&smat(&r[off..off + db], sys.block), 0.0)?));
        }
        let gap = g.iter().zip(&r).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        Ok((g, gap))
    };

    // Anderson mixing over the fixed-point map. When the sets do not meet,
    // the map still has a fixed point (a nearest pair) at positive gap, so a
    // vanishing residual with a positive gap is a definite miss.
    let mut anderson = Anderson::new(L2_ANDERSON_MEMORY);
    let mut gap = f64::INFINITY;
    let mut best_res = f64::INFINITY;
    for it in 0..max_iterations {
        let (g, g_gap) = step(&z)?;
        if !g_gap.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite iterate at iteration {it}")));
        }
        gap = g_gap;
        let xg = &g[..nx];
        if sys.strictly_feasible(xg, margin) {
            return Ok(Feasibility::Found(sys.p_mats(xg)));
        }
        if gap < L2_PROJECTION_RESIDUAL && sys.strictly_feasible(xg, 0.5 * margin) {
            return Ok(Feasibility::Found(sys.p_mats(xg)));
        }
        let f: Vec<f64> = g.iter().zip(&z).map(|(a, b)| a - b).collect();
        let res = norm_sq(&f).sqrt();
        let scale = norm_sq(&g).sqrt().max(1.0);
        if res <= L2_FIXED_POINT_RESIDUAL * scale && gap > L2_PROJECTION_RESIDUAL {
            return Ok(Feasibility::NotFoundAtThisGamma { iterations: it + 1, gap });
        }
        if res > 10.0 * best_res {
            anderson.clear();
        }
        best_res = best_res.min(res);
        z = anderson.mix(g, f);
    }
    Ok(Feasibility::NotFoundAtThisGamma { iterations: max_iterations, gap })
}

/// Type-II Anderson acceleration with a short memory.
struct Anderson {
    memory: usize,
    last: Option<(Vec<f64>, Vec<f64>)>,
    dg: Vec<Vec<f64>>,
    df: Vec<Vec<f64>>,
}

impl Anderson {
    fn new(memory: usize) -> Self {
        Anderson { memory, last: None, dg: Vec::new(), df: Vec::new() }
    }

    fn clear(&mut self) {
        self.last = None;
        self.dg.clear();
        self.df.clear();
    }

    /// Takes the map value `g` and residual `f` at the current point and
    /// returns the next point.
    fn mix(&mut self, g: Vec<f64>, f: Vec<f64>) -> Vec<f64> {
        if let Some((g0, f0)) = self.last.take() {
            if self.dg.len() == self.memory {
                self.dg.remove(0);
                self.df.remove(0);
            }
            self.dg.push(g.iter().zip(&g0).map(|(a, b)| a - b).collect());
            self.df.push(f.iter().zip(&f0).map(|(a, b)| a - b).collect());
        }
        let m = self.df.len();
        let mut next = g.clone();
        if m > 0 {
            let mut gram = DenseMatrix::zeros(m, m);
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                rhs[i] = dot(&self.df[i], &f);
                for j in 0..=i {
                    let v = dot(&self.df[i], &self.df[j]);
                    gram[(i, j)] = v;
                    gram[(j, i)] = v;
                }
            }
            let trace: f64 = (0..m).map(|i| gram[(i, i)]).sum();
            let gram = gram.shift_diag(1e-10 * trace.max(f64::MIN_POSITIVE));
            if let Ok(coef) = solve_linear(&gram, &rhs) {
                if coef.iter().all(|c| c.is_finite()) {
                    for (c, d) in coef.iter().zip(&self.dg) {
                        for (v, dv) in next.iter_mut().zip(d) {
                            *v -= c * dv;
                        }
                    }
                }
            }
        }
        self.last = Some((g, f));
        next
    }
}

/// One feasibility attempt at fixed `γ`.
pub fn feasible_l2(s: &SystemDescription, gamma: f64, margin: f64, max_iterations: usize) -> Result<Feasibility> {
    let opts = L2Options { max_iterations, ..L2Options::default() };
    feasible_l2_with(s, gamma, margin, &opts, None)
}

/// As [`feasible_l2`], honouring `input_weight`, `input_scale` and
/// `max_iterations` from `opts`, optionally warm-started from `start`.
pub fn feasible_l2_with(
    s: &SystemDescription,
    gamma: f64,
    margin: f64,
    opts: &L2Options,
    start: Option<&[DenseMatrix]>,
) -> Result<Feasibility> {
    s.ensure_valid()?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::input(format!("gamma must be positive, got {gamma}")));
    }
    if !(margin > 0.0) {
        return Err(Error::input(format!("margin must be positive, got {margin}")));
    }
    let beta = opts.input_scale.unwrap_or_else(|| default_input_scale(s));
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::input(format!("input scale must be positive, got {beta}")));
    }
    check_weight(s, opts.input_weight.as_ref())?;
    let weight = opts.input_weight.as_ref();
    if beta == 1.0 {
        let sys = LmiSystem::build(s, &LmiKind::Performance { gamma, weight })?;
        return solve_feasibility(&sys, margin, opts.max_iterations, start);
    }
    // diag(I, I/β) M diag(I, I/β) is the block of the rescaled data at γ/β²;
    // a margin ε/min(1, β²) there gives at least ε on the original block.
    let scaled = s.map_input_matrices(|m| m.scale(1.0 / beta));
    let sys = LmiSystem::build(&scaled, &LmiKind::Performance { gamma: gamma / (beta * beta), weight })?;
    solve_feasibility(&sys, margin / (beta * beta).min(1.0), opts.max_iterations, start)
}

/// Doubling search for a feasible upper bracket starting at 1, then bisection
/// until the bracket is `gamma_tol`-narrow. Reports the feasible end.
pub fn certify_l2(s: &SystemDescription, opts: &L2Options) -> Result<L2Outcome> {
    s.ensure_valid()?;
    check_weight(s, opts.input_weight.as_ref())?;
    let margin = opts.margin.unwrap_or_else(|| default_margin(s));
    let cap = opts.gamma_max.unwrap_or(L2_GAMMA_CAP).min(L2_GAMMA_CAP);
    let attempt = |gamma: f64, start: Option<&[DenseMatrix]>| -> Result<Option<Vec<DenseMatrix>>> {
        match feasible_l2_with(s, gamma, margin, opts, start)? {
            Feasibility::Found(p) => Ok(Some(p)),
            Feasibility::NotFoundAtThisGamma { .. } => Ok(None),
        }
    };

    let mut lo = 0.0;
    let mut hi = 1.0f64.min(cap);
    let mut best = loop {
        if let Some(p) = attempt(hi, None)? {
            break p;
        }
        if hi >= cap {
            return Ok(L2Outcome::Infeasible);
        }
        lo = hi;
        hi = (2.0 * hi).min(cap);
    };
    while hi - lo > opts.gamma_tol * hi {
        let mid = 0.5 * (lo + hi);
        match attempt(mid, Some(&best))? {
            Some(p) => {
                hi = mid;
                best = p;
            }
            None => lo = mid,
        }
    }
    Ok(L2Outcome::Certified(L2Certificate { gamma: hi, p: best, margin, input_weight: opts.input_weight.clone() }))
}

/// Stability-only LMIs `AᵀP_jA − P_i ≺ 0`; a single one-sided search.
pub fn certify_l2_stability(s: &SystemDescription, opts: &L2Options) -> Result<L2StabilityOutcome> {
    s.ensure_valid()?;
    let margin = opts.margin.unwrap_or_else(|| default_margin(s));
    let sys = LmiSystem::build(s, &LmiKind::Stability)?;
    Ok(match solve_feasibility(&sys, margin, opts.max_iterations, None)? {
        Feasibility::Found(p) => L2StabilityOutcome::Stable(L2StabilityCertificate { p, margin }),
        Feasibility::NotFoundAtThisGamma { .. } => L2StabilityOutcome::NotFound,
    })
}

fn node_checks(s: &SystemDescription, p: &[DenseMatrix], tol: f64) -> Result<Vec<NodeCheck>> {
    p.iter()
        .enumerate()
        .map(|(i, m)| {
            Ok(NodeCheck {
                node: s.graph.node_name(i).to_string(),
                min_value: symmetric_eigenvalues(m)?[0],
                passed: cholesky(&m.shift_diag(-tol)).is_ok(),
            })
        })
        .collect()
}

fn lmi_edge_check(s: &SystemDescription, k: usize, e: &Edge, m: &DenseMatrix, tol: f64) -> Result<EdgeCheck> {
    let vals = symmetric_eigenvalues(m)?;
    Ok(EdgeCheck {
        edge: k,
        from: s.graph.node_name(e.from).to_string(),
        mode: s.mode(e.label).name.clone(),
        to: s.graph.node_name(e.to).to_string(),
        worst_residual: *vals.last().unwrap(),
        passed: in_dual_interior(ConeId::Psd(m.rows()), &m.scale(-1.0), tol)?,
    })
}

/// Re-evaluates every edge LMI from the raw data: passes iff every block has
/// largest eigenvalue `≤ −tol` and every `P_i − tol·I` admits a Cholesky factor.
pub fn check_l2_certificate(s: &SystemDescription, cert: &L2Certificate, tol: f64) -> Result<CheckReport> {
    s.ensure_valid()?;
    check_p_shape(s, &cert.p)?;
    let weight = cert.input_weight.as_ref();
    let nodes = node_checks(s, &cert.p, tol)?;
    let edges = s
        .graph
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| lmi_edge_check(s, k, e, &lmi_block(s, e, cert.gamma, &cert.p, weight)?, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport { tol, edges, nodes })
}

pub fn check_l2_stability(s: &SystemDescription, cert: &L2StabilityCertificate, tol: f64) -> Result<CheckReport> {
    s.ensure_valid()?;
    check_p_shape(s, &cert.p)?;
    let nodes = node_checks(s, &cert.p, tol)?;
    let edges = s
        .graph
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| lmi_edge_check(s, k, e, &stability_block(s, e, &cert.p)?, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport { tol, edges, nodes })
}

// ---------------------------------------------------------------------------
// Lifting onto the PSD cone.

/// `[x; w][x; w]ᵀ`
pub fn lift_rank_one(x: &[f64], w: &[f64]) -> DenseMatrix {
    let stacked: Vec<f64> = x.iter().chain(w).copied().collect();
    DenseMatrix::outer(&stacked, &stacked)
}

/// One step of the lifted system: `X⁺ = [A B] Y [A B]ᵀ`, `Z = [C D] Y [C D]ᵀ`.
pub fn lifted_step(mode: &ModeMatrices, y: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let ab = mode.a.hstack(&mode.b)?;
    let cd = mode.c.hstack(&mode.d)?;
    if y.shape() != (ab.cols(), ab.cols()) {
        return Err(Error::dims("lifted state", ab.cols(), format!("{}x{}", y.rows(), y.cols())));
    }
    let x_next = ab.matmul(&y.matmul(&ab.transpose())?)?;
    let z = cd.matmul(&y.matmul(&cd.transpose())?)?;
    Ok((x_next, z))
}

/// Lifted trajectory: `X(t)` and `Z(t)` along `labels`, with the off-diagonal
/// and input blocks `(W1(t), W2(t))` of `Y(t)` supplied by the caller.
#[derive(Clone, Debug)]
pub struct LiftedTrajectory {
    pub x: Vec<DenseMatrix>,
    pub z: Vec<DenseMatrix>,
}

pub fn simulate_lifted(
    s: &SystemDescription,
    labels: &[usize],
    x0: &DenseMatrix,
    inputs: &[(DenseMatrix, DenseMatrix)],
) -> Result<LiftedTrajectory> {
    if labels.len() != inputs.len() {
        return Err(Error::dims("lifted inputs", labels.len(), inputs.len()));
    }
    let n = s.dims.n;
    let q = s.dims.q;
    let mut xs = vec![x0.clone()];
    let mut zs = Vec::with_capacity(labels.len());
    for (&l, (w1, w2)) in labels.iter().zip(inputs) {
        let mut y = DenseMatrix::zeros(n + q, n + q);
        y.set_block(0, 0, xs.last().unwrap());
        y.set_block(0, n, w1);
        y.set_block(n, 0, &w1.transpose());
        y.set_block(n, n, w2);
        let (xn, z) = lifted_step(s.mode(l), &y)?;
        xs.push(xn);
        zs.push(z);
    }
    Ok(LiftedTrajectory { x: xs, z: zs })
}
