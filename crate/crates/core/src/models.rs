//! System descriptions for positive (PSS) and general (GSS) switched systems,
//! their validation, and the three-country virus mitigation example.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{validate_graph, Edge, SwitchingGraph};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, symmetric_eigenvalues, DenseMatrix};
use crate::report::{Issue, ValidationReport};
use crate::tolerances::{POWER_MAX_ITERS, POWER_RESTARTS, SYMMETRY_REL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    /// Positive switched system: nonnegative matrices, analyzed on the orthant.
    Pss,
    /// General switched system: arbitrary real matrices, analyzed on the PSD cone.
    Gss,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Pss => "pss",
            SystemKind::Gss => "gss",
        })
    }
}

/// State, input and output dimensions `(n, q, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dimensions {
    pub n: usize,
    pub q: usize,
    pub r: usize,
}

/// `x⁺ = A x + B w`, `z = C x + D w` for one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeMatrices {
    pub name: String,
    pub a: DenseMatrix,
    pub b: DenseMatrix,
    pub c: DenseMatrix,
    pub d: DenseMatrix,
}

impl ModeMatrices {
    pub fn new(name: impl Into<String>, a: DenseMatrix, b: DenseMatrix, c: DenseMatrix, d: DenseMatrix) -> Self {
        ModeMatrices { name: name.into(), a, b, c, d }
    }

    fn named(&self) -> [(&'static str, &DenseMatrix); 4] {
        [("A", &self.a), ("B", &self.b), ("C", &self.c), ("D", &self.d)]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.named().iter().all(|(_, m)| m.is_nonnegative())
    }

    /// `‖[A B; C D]‖∞`
    pub fn stacked_norm_inf(&self) -> f64 {
        let top = (0..self.a.rows()).map(|i| {
            self.a.row(i).iter().chain(self.b.row(i)).map(|v| v.abs()).sum::<f64>()
        });
        let bottom = (0..self.c.rows()).map(|i| {
            self.c.row(i).iter().chain(self.d.row(i)).map(|v| v.abs()).sum::<f64>()
        });
        top.chain(bottom).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemDescription {
    pub kind: SystemKind,
    pub dims: Dimensions,
    pub modes: Vec<ModeMatrices>,
    pub graph: SwitchingGraph,
}

impl SystemDescription {
    /// Builds a description and rejects it if validation finds hard errors.
    /// Nonnegativity warnings are tolerated.
    pub fn new(kind: SystemKind, dims: Dimensions, modes: Vec<ModeMatrices>, graph: SwitchingGraph) -> Result<Self> {
        let s = SystemDescription { kind, dims, modes, graph };
        let report = validate_system(&s);
        if let Some(first) = report.errors.first() {
            return Err(Error::input(format!("invalid system: {first}")));
        }
        Ok(s)
    }

    pub fn mode(&self, label: usize) -> &ModeMatrices {
        &self.modes[label]
    }

    pub fn mode_names(&self) -> Vec<String> {
        self.modes.iter().map(|m| m.name.clone()).collect()
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.name == name)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.modes.iter().all(ModeMatrices::is_nonnegative)
    }

    /// Same matrices on a different switching graph.
    pub fn with_graph(&self, graph: SwitchingGraph) -> Self {
        SystemDescription { graph, ..self.clone() }
    }

    /// Applies `f` to every mode's `(B, D)`.
    pub fn map_input_matrices(&self, f: impl Fn(&DenseMatrix) -> DenseMatrix) -> Self {
        let mut s = self.clone();
        for m in &mut s.modes {
            m.b = f(&m.b);
            m.d = f(&m.d);
        }
        s
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = validate_system(self);
        match report.errors.first() {
            Some(e) => Err(Error::input(format!("invalid system: {e}"))),
            None => Ok(()),
        }
    }
}

/// Hard dimension and graph checks; for PSS, negative entries are reported as
/// warnings.
pub fn validate_system(s: &SystemDescription) -> ValidationReport {
    let mut report = validate_graph(&s.graph);
    let Dimensions { n, q, r } = s.dims;
    if s.graph.mode_count() != s.modes.len() {
        report.errors.push(Issue::ModeCountMismatch { graph: s.graph.mode_count(), modes: s.modes.len() });
    }
    for mode in &s.modes {
        let expected = [("A", (n, n)), ("B", (n, q)), ("C", (r, n)), ("D", (r, q))];
        for ((name, m), (_, shape)) in mode.named().into_iter().zip(expected) {
            if m.shape() != shape {
                report.errors.push(Issue::MatrixDimension {
                    mode: mode.name.clone(),
                    matrix: name,
                    expected: shape,
                    found: m.shape(),
                });
            }
        }
    }
    if s.kind == SystemKind::Pss {
        let mut warnings = ValidationReport::default();
        for mode in &s.modes {
            for (name, m) in mode.named() {
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let v = m[(i, j)];
                        if v < 0.0 {
                            warnings.warnings.push(Issue::NegativeEntry {
                                mode: mode.name.clone(),
                                matrix: name,
                                row: i,
                                col: j,
                                value: v,
                            });
                        }
                    }
                }
            }
        }
        report.merge(warnings);
    }
    report
}

/// Shape of the disturbance matrix in the virus example.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BShape {
    /// `B = 100·I₃`: one spontaneous-infection channel per country (q = 3).
    Diag,
    /// `B = 100·1`: a single channel entering all countries (q = 1).
    Column,
}

impl std::str::FromStr for BShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diag" => Ok(BShape::Diag),
            "column" => Ok(BShape::Column),
            other => Err(Error::input(format!("unknown B shape {other:?} (expected diag or column)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VirusParams {
    /// Country B's quarantine rate under full measures (mode m3).
    pub k_b_quarantine: f64,
    /// Country C's quarantine rate under modes m2 and m3.
    pub k_c_quarantine: f64,
    pub b_shape: BShape,
}

impl Default for VirusParams {
    /// The column shape is the one whose LP optimum gives γ ≈ 9451.
    fn default() -> Self {
        VirusParams { k_b_quarantine: 1.0, k_c_quarantine: 0.6, b_shape: BShape::Column }
    }
}

/// Switching rule of the virus example: `v1 -m1-> v2 -m3-> v3`, a self-loop
/// `m3` on `v3`, `v3 -m2-> v4`, and `v4` returning by `m3` to `v3` or by `m1`
/// to `v1`.
pub fn virus_graph() -> SwitchingGraph {
    let nodes = ["v1", "v2", "v3", "v4"].iter().map(|s| s.to_string()).collect();
    let edges = vec![
        Edge::new(0, 0, 1),
        Edge::new(1, 2, 2),
        Edge::new(2, 2, 2),
        Edge::new(2, 1, 3),
        Edge::new(3, 2, 2),
        Edge::new(3, 0, 0),
    ];
    SwitchingGraph::new(nodes, edges, 3)
}

/// Three countries with infection rates `Λ = diag(1.2, 1.4, 1.4)`, quarantine
/// rates `K(σ)` and border spread `S(σ)` with `s = 0.4`; `A_σ = Λ − K(σ) + S(σ)`,
/// output `z = 1ᵀx`.
pub fn build_virus_example(params: VirusParams) -> Result<SystemDescription> {
    for (name, v) in [("k_b_quarantine", params.k_b_quarantine), ("k_c_quarantine", params.k_c_quarantine)] {
        if !(0.0..=1.5).contains(&v) {
            return Err(Error::input(format!("{name} = {v} outside [0, 1.5]")));
        }
    }
    let lambda = [1.2, 1.4, 1.4];
    let k_a = 0.5;
    let s = 0.4;
    let open = [[-2.0, 1.0, 1.0], [1.0, -2.0, 1.0], [1.0, 1.0, -2.0]];
    let closed = [[-1.0, 0.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.0, -1.0]];
    let quarantine = [
        [k_a, 0.0, 0.0],
        [k_a, 0.0, params.k_c_quarantine],
        [k_a, params.k_b_quarantine, params.k_c_quarantine],
    ];
    let q = match params.b_shape {
        BShape::Diag => 3,
        BShape::Column => 1,
    };
    let b = match params.b_shape {
        BShape::Diag => DenseMatrix::identity(3).scale(100.0),
        BShape::Column => DenseMatrix::new(3, 1, vec![100.0; 3])?,
    };
    let c = DenseMatrix::new(1, 3, vec![1.0; 3])?;
    let d = DenseMatrix::zeros(1, q);

    let modes = (0..3)
        .map(|m| {
            let spread = if m == 0 { &open } else { &closed };
            let mut a = DenseMatrix::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    a[(i, j)] = s * spread[i][j];
                }
                a[(i, i)] += lambda[i] - quarantine[m][i];
            }
            ModeMatrices::new(format!("m{}", m + 1), a, b.clone(), c.clone(), d.clone())
        })
        .collect();
    SystemDescription::new(SystemKind::Pss, Dimensions { n: 3, q, r: 1 }, modes, virus_graph())
}

/// Magnitude of the dominant eigenvalue.
///
/// Symmetric input goes through the Jacobi solver. Otherwise power iteration
/// with random restarts is used. The iterate does not settle when the dominant
/// eigenvalues form a complex or ±ρ pair; such pairs are caught by fitting
/// `A²v = αAv + βv` on the iterate and taking the larger root of
/// `λ² − αλ − β`. Anything else that fails to settle (three or more dominant
/// eigenvalues of equal modulus) yields `NoConvergence` carrying the average
/// growth rate as the estimate.
pub fn spectral_radius(a: &DenseMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::dims("spectral_radius", "square matrix", format!("{}x{}", a.rows(), a.cols())));
    }
    if a.asymmetry() <= SYMMETRY_REL * a.norm_inf().max(1.0) {
        let vals = symmetric_eigenvalues(a)?;
        return Ok(vals.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let n = a.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dd_5eed);
    let mut best: Option<f64> = None;
    let mut partial = 0.0f64;
    for _ in 0..POWER_RESTARTS {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nv = norm2(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut prev = f64::NAN;
        let window = 1000usize;
        let mut window_logs = std::collections::VecDeque::with_capacity(window);
        let mut converged = None;
        for _ in 0..POWER_MAX_ITERS {
            let w = a.matvec(&v);
            let nw = norm2(&w);
            if nw == 0.0 {
                converged = Some(0.0);
                break;
            }
            let lg = nw.ln();
            window_logs.push_back(lg);
            if window_logs.len() > window {
                window_logs.pop_front();
            }
            v = w.into_iter().map(|x| x / nw).collect();
            if (nw - prev).abs() <= 1e-13 * nw {
                converged = Some(nw);
                break;
            }
            prev = nw;
            if let Some(r) = two_term_fit(a, &v) {
                converged = Some(r);
                break;
            }
        }
        match converged {
            Some(r) => best = Some(best.map_or(r, |b: f64| b.max(r))),
            None => {
                let mean = window_logs.iter().sum::<f64>() / window_logs.len() as f64;
                partial = partial.max(mean.exp());
            }
        }
    }
    best.ok_or(Error::NoConvergence {
        what: "power iteration",
        iterations: POWER_MAX_ITERS,
        estimate: Some(partial),
    })
}

/// Dominant root of `λ² − αλ − β` when `A²v = αAv + βv` holds to 1e-12.
fn two_term_fit(a: &DenseMatrix, v: &[f64]) -> Option<f64> {
    let u1 = a.matvec(v);
    let u2 = a.matvec(&u1);
    let (g11, g12, g22) = (dot(&u1, &u1), dot(&u1, v), dot(v, v));
    let det = g11 * g22 - g12 * g12;
    if det <= 1e-10 * g11 * g22 {
        return None;
    }
    let (r1, r2) = (dot(&u1, &u2), dot(v, &u2));
    let alpha = (g22 * r1 - g12 * r2) / det;
    let beta = (g11 * r2 - g12 * r1) / det;
    let resid: Vec<f64> = (0..v.len()).map(|i| u2[i] - alpha * u1[i] - beta * v[i]).collect();
    if norm2(&resid) > 1e-12 * norm2(&u2).max(f64::MIN_POSITIVE) {
        return None;
    }
    let disc = alpha * alpha + 4.0 * beta;
    Some(if disc < 0.0 { (-beta).sqrt() } else { ((alpha.abs() + disc.sqrt()) / 2.0).abs() })
}

/// Random system with entries drawn from `range`, used by tests and examples.
pub fn random_system(
    rng: &mut impl Rng,
    kind: SystemKind,
    dims: Dimensions,
    graph: SwitchingGraph,
    range: std::ops::Range<f64>,
) -> Result<SystemDescription> {
    let mut draw = |r: usize, c: usize| {
        let data = (0..r * c).map(|_| rng.random_range(range.clone())).collect();
        DenseMatrix::new(r, c, data)
    };
    let Dimensions { n, q, r } = dims;
    let modes = (0..graph.mode_count())
        .map(|l| Ok(ModeMatrices::new(format!("m{}", l + 1), draw(n, n)?, draw(n, q)?, draw(r, n)?, draw(r, q)?)))
        .collect::<Result<Vec<_>>>()?;
    SystemDescription::new(kind, dims, modes, graph)
}
