//! Trajectories, empirical gains, Lyapunov-decrease checks and finite-horizon
//! brute-force gain oracles.
//!
//! The oracles enumerate every admissible walk of a fixed length and compute
//! the exact finite-horizon gain along each. They are *lower* bounds on the
//! infinite-horizon gain and therefore upper-bounded by any valid certificate.
//!
//! Walks are evaluated in parallel on the global rayon pool; the maximum is
//! reduced deterministically (ties go to the earliest walk in enumeration
//! order), so results do not depend on the thread count.

use rand::Rng;
use rayon::prelude::*;
use std::str::FromStr;

use crate::automaton::{for_each_walk, Walk};
use crate::error::{Error, Result};
use crate::l1cert::L1Certificate;
use crate::l2cert::L2Certificate;
use crate::linalg::{dot, max_singular_value, operator_norm, DenseMatrix};
use crate::models::{SystemDescription, SystemKind};
use crate::tolerances::DENSE_TOEPLITZ_MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub walk: Walk,
    /// `len + 1` states.
    pub x: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

pub fn simulate(s: &SystemDescription, walk: &Walk, w: &[Vec<f64>], x0: &[f64]) -> Result<Trajectory> {
    s.ensure_valid()?;
    s.graph.check_walk(walk)?;
    if w.len() != walk.len() {
        return Err(Error::dims("input sequence length", walk.len(), w.len()));
    }
    if x0.len() != s.dims.n {
        return Err(Error::dims("initial state", s.dims.n, x0.len()));
    }
    if let Some(bad) = w.iter().find(|v| v.len() != s.dims.q) {
        return Err(Error::dims("input vector", s.dims.q, bad.len()));
    }
    let mut x = vec![x0.to_vec()];
    let mut z = Vec::with_capacity(w.len());
    for (step, wt) in walk.steps.iter().zip(w) {
        let m = s.mode(step.label);
        let xt = x.last().unwrap();
        let next: Vec<f64> = m.a.matvec(xt).iter().zip(m.b.matvec(wt)).map(|(a, b)| a + b).collect();
        z.push(m.c.matvec(xt).iter().zip(m.d.matvec(wt)).map(|(a, b)| a + b).collect());
        x.push(next);
    }
    Ok(Trajectory { walk: walk.clone(), x, w: w.to_vec(), z })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GainKind {
    L1,
    L2,
}

impl FromStr for GainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(GainKind::L1),
            "l2" => Ok(GainKind::L2),
            other => Err(Error::input(format!("unknown gain kind '{other}' (expected l1 or l2)"))),
        }
    }
}

/// `Σ 1ᵀz / Σ 1ᵀw` for ℓ1, `Σ zᵀz / Σ wᵀw` (the squared ratio) for ℓ2.
pub fn empirical_gain(traj: &Trajectory, kind: GainKind) -> Result<f64> {
    let (num, den) = match kind {
        GainKind::L1 => (
            traj.z.iter().flatten().copied().sum::<f64>(),
            traj.w.iter().flatten().copied().sum::<f64>(),
        ),
        GainKind::L2 => (
            traj.z.iter().map(|v| dot(v, v)).sum::<f64>(),
            traj.w.iter().map(|v| dot(v, v)).sum::<f64>(),
        ),
    };
    if den == 0.0 || traj.w.iter().flatten().all(|&v| v == 0.0) {
        return Err(Error::input("input sequence is identically zero"));
    }
    Ok(num / den)
}

/// Unit impulse into `channel` at time `at`, zero elsewhere.
pub fn impulse_input(q: usize, len: usize, channel: usize, at: usize) -> Vec<Vec<f64>> {
    (0..len)
        .map(|t| (0..q).map(|k| if t == at && k == channel { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Entries uniform in `[lo, hi)`.
pub fn random_input<R: Rng + ?Sized>(rng: &mut R, q: usize, len: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..len).map(|_| (0..q).map(|_| rng.random_range(lo..hi)).collect()).collect()
}

#[derive(Clone, Copy, Debug)]
pub enum CertificateRef<'a> {
    L1(&'a L1Certificate),
    L2(&'a L2Certificate),
}

impl<'a> From<&'a L1Certificate> for CertificateRef<'a> {
    fn from(c: &'a L1Certificate) -> Self {
        CertificateRef::L1(c)
    }
}

impl<'a> From<&'a L2Certificate> for CertificateRef<'a> {
    fn from(c: &'a L2Certificate) -> Self {
        CertificateRef::L2(c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecreaseReport {
    /// `V(t)` for `t = 0..=len`.
    pub values: Vec<f64>,
    /// Step slack `γ⟨H^w, w⟩ − ⟨H^z, z⟩ − (V(t+1) − V(t))`; `None` where `x(t)` and `w(t)` vanish.
    pub slacks: Vec<Option<f64>>,
}

impl DecreaseReport {
    pub fn passed(&self) -> bool {
        self.slacks.iter().flatten().all(|&s| s > 0.0)
    }

    pub fn min_slack(&self) -> Option<f64> {
        self.slacks.iter().flatten().copied().reduce(f64::min)
    }
}

fn quad(p: &DenseMatrix, x: &[f64]) -> f64 {
    dot(x, &p.matvec(x))
}

/// Evaluates the certificate's storage function along `traj` and the
/// dissipation slack of every step.
pub fn lyapunov_decrease_check<'a>(
    s: &SystemDescription,
    cert: impl Into<CertificateRef<'a>>,
    traj: &Trajectory,
) -> Result<DecreaseReport> {
    let cert = cert.into();
    let nodes = traj.walk.nodes();
    let n_nodes = s.graph.node_count();
    let n = s.dims.n;
    let value: Box<dyn Fn(usize, &[f64]) -> f64 + '_> = match cert {
        CertificateRef::L1(c) => {
            if s.kind != SystemKind::Pss {
                return Err(Error::input("an l1 certificate applies to pss systems only"));
            }
            if c.p.len() != n_nodes || c.p.iter().any(|v| v.len() != n) {
                return Err(Error::input("certificate dimensions do not match the system"));
            }
            Box::new(move |v, x| dot(&c.p[v], x))
        }
        CertificateRef::L2(c) => {
            if c.p.len() != n_nodes || c.p.iter().any(|m| m.shape() != (n, n)) {
                return Err(Error::input("certificate dimensions do not match the system"));
            }
            Box::new(move |v, x| quad(&c.p[v], x))
        }
    };
    let supply = |w: &[f64], z: &[f64]| -> f64 {
        match cert {
            CertificateRef::L1(c) => c.gamma * w.iter().sum::<f64>() - z.iter().sum::<f64>(),
            CertificateRef::L2(c) => {
                let ww = match &c.input_weight {
                    Some(wm) => quad(wm, w),
                    None => dot(w, w),
                };
                c.gamma * ww - dot(z, z)
            }
        }
    };
    let values: Vec<f64> = traj.x.iter().zip(&nodes).map(|(x, &v)| value(v, x)).collect();
    let slacks = (0..traj.len())
        .map(|t| {
            let idle = traj.x[t].iter().all(|&v| v == 0.0) && traj.w[t].iter().all(|&v| v == 0.0);
            (!idle).then(|| supply(&traj.w[t], &traj.z[t]) - (values[t + 1] - values[t]))
        })
        .collect();
    Ok(DecreaseReport { values, slacks })
}

/// The maximizing data of an oracle evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleWitness {
    pub walk: Walk,
    /// Impulse channel and injection time (ℓ1 only).
    pub channel: Option<usize>,
    pub time: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub witness: Option<OracleWitness>,
    pub walks: usize,
}

const BATCH: usize = 1 << 14;

/// Evaluates `eval` on every walk of length `horizon` from every start node.
fn max_over_walks<T: Send>(
    s: &SystemDescription,
    horizon: usize,
    eval: impl Fn(&Walk) -> Result<(f64, T)> + Sync,
) -> Result<(f64, Option<(Walk, T)>, usize)> {
    let mut best: Option<(f64, Walk, T)> = None;
    let mut total = 0usize;
    let mut batch: Vec<Walk> = Vec::with_capacity(BATCH);
    let flush = |batch: &mut Vec<Walk>, best: &mut Option<(f64, Walk, T)>| -> Result<()> {
        let scored: Vec<(f64, T)> = batch.par_iter().map(&eval).collect::<Result<_>>()?;
        for (walk, (v, extra)) in batch.drain(..).zip(scored) {
            if best.as_ref().is_none_or(|(b, _, _)| v > *b) {
                *best = Some((v, walk, extra));
            }
        }
        Ok(())
    };
    for start in 0..s.graph.node_count() {
        let visited = for_each_walk(&s.graph, start, horizon, |w| {
            batch.push(w.clone());
            if batch.len() == BATCH {
                flush(&mut batch, &mut best)?;
            }
            Ok(())
        })?;
        total += visited;
        if total > crate::tolerances::WALK_CAP {
            return Err(Error::EnumerationCap { cap: crate::tolerances::WALK_CAP });
        }
    }
    flush(&mut batch, &mut best)?;
    Ok(match best {
        Some((v, w, t)) => (v, Some((w, t)), total),
        None => (0.0, None, total),
    })
}

/// Largest output `‖z‖₁` caused by a unit impulse `e_k` at time `t0`, over
/// all walks, `t0 < horizon` and channels `k`, from `x(0) = 0`.
///
/// For nonnegative data this is the finite-horizon ℓ1 gain: the input-output
/// map along a walk is a nonnegative matrix, its induced 1-norm on the
/// orthant is its largest column sum, and each column is one impulse. When
/// some mode matrix has a negative entry the value is still a lower bound
/// (each impulse is an admissible input) but need not be tight.
pub fn worst_case_l1_lower_bound(s: &SystemDescription, horizon: usize) -> Result<OracleResult> {
    s.ensure_valid()?;
    if s.kind != SystemKind::Pss {
        return Err(Error::input("the l1 oracle requires a pss system"));
    }
    if horizon == 0 {
        return Ok(OracleResult { value: 0.0, witness: None, walks: 0 });
    }
    let nonnegative = s.all_nonnegative();
    let (value, best, walks) = max_over_walks(s, horizon, |walk| {
        let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
        let mut consider = |g: f64, t0: usize, k: usize| {
            if g > best.0 || (g == best.0 && (t0, k) < (best.1, best.2)) {
                best = (g, t0, k);
            }
        };
        if nonnegative {
            l1_costate_gains(s, walk, &mut consider);
        } else {
            l1_forward_gains(s, walk, &mut consider);
        }
        Ok((best.0, (best.2, best.1)))
    })?;
    Ok(OracleResult {
        value: value.max(0.0),
        witness: best.map(|(walk, (k, t0))| OracleWitness { walk, channel: Some(k), time: Some(t0) }),
        walks,
    })
}

/// Backward costate `c_t = 1ᵀC_t + c_{t+1}A_t`; the response to `e_k` at
/// `t0` then totals `(1ᵀD_{t0} + c_{t0+1}B_{t0}) e_k`.
fn l1_costate_gains(s: &SystemDescription, walk: &Walk, consider: &mut impl FnMut(f64, usize, usize)) {
    let labels = walk.labels();
    let ones = vec![1.0; s.dims.r];
    let mut costate = vec![0.0; s.dims.n];
    for t0 in (0..labels.len()).rev() {
        let m = s.mode(labels[t0]);
        let gains: Vec<f64> = m.b.t_matvec(&costate).iter().zip(m.d.t_matvec(&ones)).map(|(a, b)| a + b).collect();
        for (k, g) in gains.into_iter().enumerate() {
            consider(g, t0, k);
        }
        costate = m.a.t_matvec(&costate).iter().zip(m.c.t_matvec(&ones)).map(|(a, b)| a + b).collect();
    }
}

/// Direct simulation of every impulse, summing `|z|`.
fn l1_forward_gains(s: &SystemDescription, walk: &Walk, consider: &mut impl FnMut(f64, usize, usize)) {
    let labels = walk.labels();
    for t0 in 0..labels.len() {
        for k in 0..s.dims.q {
            let m = s.mode(labels[t0]);
            let mut total: f64 = m.d.column(k).iter().map(|v| v.abs()).sum();
            let mut x = m.b.column(k);
            for &l in &labels[t0 + 1..] {
                let mt = s.mode(l);
                total += mt.c.matvec(&x).iter().map(|v| v.abs()).sum::<f64>();
                x = mt.a.matvec(&x);
            }
            consider(total, t0, k);
        }
    }
}

/// The stacked input-output matrix of a walk, `rL × qL`, block lower triangular.
pub fn walk_toeplitz(s: &SystemDescription, walk: &Walk) -> DenseMatrix {
    let labels = walk.labels();
    let (q, r) = (s.dims.q, s.dims.r);
    let len = labels.len();
    let mut t = DenseMatrix::zeros(r * len.max(1), q * len.max(1));
    for tau in 0..len {
        let m = s.mode(labels[tau]);
        t.set_block(r * tau, q * tau, &m.d);
        let mut prop = m.b.clone();
        for (t_out, &l) in labels.iter().enumerate().skip(tau + 1) {
            let mt = s.mode(l);
            t.set_block(r * t_out, q * tau, &mt.c.matmul(&prop).expect("dims"));
            prop = mt.a.matmul(&prop).expect("dims");
        }
    }
    t
}

/// Applies the stacked map of a walk without forming it.
fn walk_apply(s: &SystemDescription, labels: &[usize], w: &[f64]) -> Vec<f64> {
    let (n, q) = (s.dims.n, s.dims.q);
    let mut x = vec![0.0; n];
    let mut out = Vec::with_capacity(s.dims.r * labels.len());
    for (t, &l) in labels.iter().enumerate() {
        let m = s.mode(l);
        let wt = &w[q * t..q * (t + 1)];
        out.extend(m.c.matvec(&x).iter().zip(m.d.matvec(wt)).map(|(a, b)| a + b));
        x = m.a.matvec(&x).iter().zip(m.b.matvec(wt)).map(|(a, b)| a + b).collect();
    }
    out
}

/// Adjoint of [`walk_apply`]: a backward costate recursion.
fn walk_apply_t(s: &SystemDescription, labels: &[usize], y: &[f64]) -> Vec<f64> {
    let (n, q, r) = (s.dims.n, s.dims.q, s.dims.r);
    let mut lam = vec![0.0; n];
    let mut out = vec![0.0; q * labels.len()];
    for (t, &l) in labels.iter().enumerate().rev() {
        let m = s.mode(l);
        let yt = &y[r * t..r * (t + 1)];
        let wt: Vec<f64> = m.b.t_matvec(&lam).iter().zip(m.d.t_matvec(yt)).map(|(a, b)| a + b).collect();
        out[q * t..q * (t + 1)].copy_from_slice(&wt);
        lam = m.a.t_matvec(&lam).iter().zip(m.c.t_matvec(yt)).map(|(a, b)| a + b).collect();
    }
    out
}

/// Largest induced ℓ2 norm (unsquared) of the stacked input-output map over
/// all walks of length `horizon`, from `x(0) = 0`.
pub fn worst_case_l2_lower_bound(s: &SystemDescription, horizon: usize) -> Result<OracleResult> {
    s.ensure_valid()?;
    if horizon == 0 {
        return Ok(OracleResult { value: 0.0, witness: None, walks: 0 });
    }
    let dense = horizon * s.dims.q.max(s.dims.r) <= DENSE_TOEPLITZ_MAX;
    let (value, best, walks) = max_over_walks(s, horizon, |walk| {
        let v = if dense {
            max_singular_value(&walk_toeplitz(s, walk))
        } else {
            let labels = walk.labels();
            operator_norm(s.dims.q * horizon, |w| walk_apply(s, &labels, w), |y| walk_apply_t(s, &labels, y))
        };
        Ok((v, ()))
    })?;
    Ok(OracleResult {
        value: value.max(0.0),
        witness: best.map(|(walk, ())| OracleWitness { walk, channel: None, time: None }),
        walks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{arbitrary_switching, sample_walk, Step};
    use crate::models::{build_virus_example, BShape, Dimensions, ModeMatrices, VirusParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn one(v: f64) -> DenseMatrix {
        DenseMatrix::new(1, 1, vec![v]).unwrap()
    }

    fn scalar(kind: SystemKind, a: f64, b: f64, c: f64, d: f64) -> SystemDescription {
        SystemDescription::new(
            kind,
            Dimensions { n: 1, q: 1, r: 1 },
            vec![ModeMatrices::new("m1", one(a), one(b), one(c), one(d))],
            arbitrary_switching(1).unwrap(),
        )
        .unwrap()
    }

    fn self_loop_walk(len: usize) -> Walk {
        Walk { start: 0, steps: vec![Step { label: 0, to: 0 }; len] }
    }

    #[test]
    fn zero_input_zero_trajectory() {
        let s = scalar(SystemKind::Pss, 0.5, 1.0, 1.0, 0.0);
        let t = simulate(&s, &self_loop_walk(5), &vec![vec![0.0]; 5], &[0.0]).unwrap();
        assert!(t.x.iter().chain(&t.z).flatten().all(|&v| v == 0.0));
        assert!(empirical_gain(&t, GainKind::L1).is_err());
    }

    #[test]
    fn scalar_impulse_response() {
        let s = scalar(SystemKind::Pss, 0.5, 1.0, 1.0, 0.0);
        let t = simulate(&s, &self_loop_walk(30), &impulse_input(1, 30, 0, 0), &[0.0]).unwrap();
        assert_eq!(t.z[0], vec![0.0]);
        for k in 1..30 {
            assert!((t.z[k][0] - 0.5f64.powi(k as i32 - 1)).abs() < 1e-15);
        }
        let g = empirical_gain(&t, GainKind::L1).unwrap();
        assert!((g - 2.0 * (1.0 - 0.5f64.powi(29))).abs() < 1e-12);
    }

    #[test]
    fn virus_diag_impulse() {
        let s = build_virus_example(VirusParams { b_shape: BShape::Diag, ..VirusParams::default() }).unwrap();
        let walk = sample_walk(&s.graph, 0, 3, 1).unwrap();
        let t = simulate(&s, &walk, &impulse_input(3, 3, 0, 0), &[0.0; 3]).unwrap();
        assert_eq!(t.x[1], vec![100.0, 0.0, 0.0]);
    }

    #[test]
    fn inadmissible_walk_rejected() {
        let s = build_virus_example(VirusParams::default()).unwrap();
        let bad = Walk { start: 0, steps: vec![Step { label: 1, to: 1 }] };
        assert!(simulate(&s, &bad, &[vec![0.0]], &[0.0; 3]).is_err());
    }

    #[test]
    fn pass_through_gain_one() {
        let s = scalar(SystemKind::Gss, 0.0, 0.0, 0.0, 1.0);
        let t = simulate(&s, &self_loop_walk(4), &[vec![1.0], vec![2.0], vec![0.5], vec![3.0]], &[0.0]).unwrap();
        assert!((empirical_gain(&t, GainKind::L1).unwrap() - 1.0).abs() < 1e-15);
        assert!((empirical_gain(&t, GainKind::L2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decrease_check_valid_and_corrupted() {
        let s = scalar(SystemKind::Pss, 0.5, 1.0, 1.0, 0.0);
        // p = 2.2, γ = 2.3 satisfies 0.5p − p + 1 < 0 and p − γ < 0.
        let good = L1Certificate { gamma: 2.3, p: vec![vec![2.2]], margin: 0.0 };
        let t = simulate(&s, &self_loop_walk(20), &impulse_input(1, 20, 0, 0), &[0.0]).unwrap();
        assert!(lyapunov_decrease_check(&s, &good, &t).unwrap().passed());

        let halved = L1Certificate { gamma: 2.3, p: vec![vec![1.1]], margin: 0.0 };
        let r = lyapunov_decrease_check(&s, &halved, &t).unwrap();
        assert!(!r.passed());
        assert!(r.min_slack().unwrap() < 0.0);

        let zero = simulate(&s, &self_loop_walk(5), &vec![vec![0.0]; 5], &[0.0]).unwrap();
        let r = lyapunov_decrease_check(&s, &good, &zero).unwrap();
        assert!(r.passed());
        assert!(r.slacks.iter().all(Option::is_none));
    }

    #[test]
    fn decrease_check_kind_mismatch() {
        let s = scalar(SystemKind::Gss, 0.5, 1.0, 1.0, 0.0);
        let cert = L1Certificate { gamma: 2.3, p: vec![vec![2.2]], margin: 0.0 };
        let t = simulate(&s, &self_loop_walk(2), &impulse_input(1, 2, 0, 0), &[0.0]).unwrap();
        assert!(lyapunov_decrease_check(&s, &cert, &t).is_err());
    }

    #[test]
    fn l1_oracle_examples() {
        let s = scalar(SystemKind::Pss, 0.5, 1.0, 1.0, 0.0);
        let r = worst_case_l1_lower_bound(&s, 20).unwrap();
        // Twenty steps observe z(0..19) = (0, 1, 0.5, ..., 0.5^18).
        assert!((r.value - 2.0 * (1.0 - 0.5f64.powi(19))).abs() < 1e-12, "{}", r.value);
        assert_eq!(r.witness.as_ref().unwrap().time, Some(0));
        assert_eq!(worst_case_l1_lower_bound(&s, 0).unwrap().value, 0.0);

        let d = SystemDescription::new(
            SystemKind::Pss,
            Dimensions { n: 1, q: 2, r: 2 },
            vec![ModeMatrices::new(
                "m1",
                one(0.9),
                DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap(),
                DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap(),
                DenseMatrix::from_rows(&[vec![0.2, 0.0], vec![0.3, 0.7]]).unwrap(),
            )],
            arbitrary_switching(1).unwrap(),
        )
        .unwrap();
        assert!((worst_case_l1_lower_bound(&d, 1).unwrap().value - 0.7).abs() < 1e-15);
    }

    #[test]
    fn l1_oracle_matches_simulated_impulses() {
        let s = build_virus_example(VirusParams::default()).unwrap();
        let h = 6;
        let r = worst_case_l1_lower_bound(&s, h).unwrap();
        let wit = r.witness.unwrap();
        let (k, t0) = (wit.channel.unwrap(), wit.time.unwrap());
        let t = simulate(&s, &wit.walk, &impulse_input(s.dims.q, h, k, t0), &[0.0; 3]).unwrap();
        let total: f64 = t.z.iter().flatten().sum();
        assert!((total - r.value).abs() <= 1e-9 * r.value);
    }

    #[test]
    fn l1_oracle_forward_path_agrees_on_nonnegative_data() {
        let s = build_virus_example(VirusParams { k_b_quarantine: 0.85, ..VirusParams::default() }).unwrap();
        let walk = sample_walk(&s.graph, 0, 9, 11).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        l1_forward_gains(&s, &walk, &mut |g, t, k| a.push((g, t, k)));
        l1_costate_gains(&s, &walk, &mut |g, t, k| b.push((g, t, k)));
        a.sort_by(|x, y| (x.1, x.2).cmp(&(y.1, y.2)));
        b.sort_by(|x, y| (x.1, x.2).cmp(&(y.1, y.2)));
        // Impulse trajectories of the virus model stay nonnegative despite the
        // negative self-rate, so both evaluations coincide.
        for (x, y) in a.iter().zip(&b) {
            assert!((x.0 - y.0).abs() <= 1e-9 * x.0.abs().max(1.0));
        }
    }

    #[test]
    fn l1_oracle_rejects_gss() {
        assert!(worst_case_l1_lower_bound(&scalar(SystemKind::Gss, 0.5, 1.0, 1.0, 0.0), 3).is_err());
    }

    #[test]
    fn l2_oracle_examples() {
        let s = scalar(SystemKind::Gss, 0.5, 1.0, 1.0, 0.0);
        // Finite sections of the Toeplitz operator approach the H∞ norm 2 like 1/L².
        let r40 = worst_case_l2_lower_bound(&s, 40).unwrap().value;
        assert!((r40 - 1.988_362_239_679_2).abs() < 1e-9, "{r40}");
        let r160 = worst_case_l2_lower_bound(&s, 160).unwrap().value;
        assert!(r160 > r40 && (r160 - 2.0).abs() < 1e-3, "{r160}");
        let pass = scalar(SystemKind::Gss, 0.0, 0.0, 0.0, 1.0);
        assert!((worst_case_l2_lower_bound(&pass, 7).unwrap().value - 1.0).abs() < 1e-12);
        assert_eq!(worst_case_l2_lower_bound(&s, 0).unwrap().value, 0.0);
    }

    #[test]
    fn implicit_operator_matches_dense() {
        let s = build_virus_example(VirusParams { b_shape: BShape::Diag, ..VirusParams::default() }).unwrap();
        let walk = sample_walk(&s.graph, 0, 7, 3).unwrap();
        let t = walk_toeplitz(&s, &walk);
        let labels = walk.labels();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w: Vec<f64> = (0..t.cols()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..t.rows()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = walk_apply(&s, &labels, &w);
        let b = t.matvec(&w);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9 * (1.0 + y.abs())));
        let a = walk_apply_t(&s, &labels, &y);
        let b = t.t_matvec(&y);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9 * (1.0 + y.abs())));
    }
}
