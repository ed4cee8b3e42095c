//! Dense two-phase simplex for `min cᵀx  s.t.  Gx ≤ h,  x ≥ l`.
//!
//! Bland's rule is used in both phases, so degenerate problems (the
//! certificate LPs have many ties at the optimum) cannot cycle.

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, DenseMatrix};
use crate::tolerances::{LP_FEAS_REL, SIMPLEX_EPS, SIMPLEX_MAX_PIVOTS};

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Per-variable lower bound; `f64::NEG_INFINITY` for a free variable.
    pub lower_bounds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    /// `ray` is a feasible direction along which the objective decreases without bound.
    Unbounded { ray: Vec<f64> },
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, constraints: DenseMatrix, rhs: Vec<f64>, lower_bounds: Vec<f64>) -> Result<Self> {
        let lp = LinearProgram { objective, constraints, rhs, lower_bounds };
        lp.validate()?;
        Ok(lp)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.constraints.cols() != n {
            return Err(Error::dims("LP constraint columns", n, self.constraints.cols()));
        }
        if self.lower_bounds.len() != n {
            return Err(Error::dims("LP lower bounds", n, self.lower_bounds.len()));
        }
        if self.constraints.rows() != self.rhs.len() {
            return Err(Error::dims("LP right-hand side", self.constraints.rows(), self.rhs.len()));
        }
        if self.objective.iter().chain(&self.rhs).any(|v| !v.is_finite()) {
            return Err(Error::input("LP objective and right-hand side must be finite"));
        }
        if self.lower_bounds.iter().any(|&l| l.is_nan() || l == f64::INFINITY) {
            return Err(Error::input("LP lower bounds must be finite or -inf"));
        }
        Ok(())
    }

    /// `max_i (Gx − h)_i`, and the worst lower-bound violation.
    pub fn residuals(&self, x: &[f64]) -> (f64, f64) {
        let gx = self.constraints.matvec(x);
        let row = gx.iter().zip(&self.rhs).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        let bound = x
            .iter()
            .zip(&self.lower_bounds)
            .map(|(&xi, &l)| if l.is_finite() { l - xi } else { f64::NEG_INFINITY })
            .fold(f64::NEG_INFINITY, f64::max);
        (row, bound)
    }

    /// Copy with each row divided by `max(1, ‖row‖∞)`; same feasible set.
    pub fn row_scaled(&self) -> Self {
        let mut lp = self.clone();
        for i in 0..lp.rhs.len() {
            let s = self.constraints.row(i).iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
            for j in 0..lp.constraints.cols() {
                lp.constraints[(i, j)] /= s;
            }
            lp.rhs[i] /= s;
        }
        lp
    }
}

/// How each original variable maps onto the nonnegative standard-form columns.
#[derive(Clone, Copy)]
enum VarMap {
    Shifted { col: usize, lower: f64 },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// m × (cols + 1), last column is the right-hand side.
    t: DenseMatrix,
    basis: Vec<usize>,
    cols: usize,
    artificial_start: usize,
    pivots: usize,
}

enum PhaseResult {
    Optimal,
    Unbounded { entering: usize },
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[(i, self.cols)]
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > SIMPLEX_MAX_PIVOTS {
            return Err(Error::NoConvergence { what: "simplex", iterations: SIMPLEX_MAX_PIVOTS, estimate: None });
        }
        let width = self.cols + 1;
        let p = self.t[(row, col)];
        for j in 0..width {
            self.t[(row, j)] /= p;
        }
        for i in 0..self.t.rows() {
            if i == row {
                continue;
            }
            let f = self.t[(i, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..width {
                let v = self.t[(row, j)];
                self.t[(i, j)] -= f * v;
            }
            self.t[(i, col)] = 0.0;
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Minimizes `cost · columns` over the current basis with Bland's rule.
    /// Columns at or beyond `allowed` never enter.
    fn run(&mut self, cost: &[f64], allowed: usize) -> Result<PhaseResult> {
        let m = self.t.rows();
        loop {
            // Reduced costs d_j = c_j − c_Bᵀ T_j; Bland: lowest index with d_j < 0.
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..m {
                    d -= cost[self.basis[i]] * self.t[(i, j)];
                }
                if d < -SIMPLEX_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(PhaseResult::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[(i, col)];
                if a > SIMPLEX_EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            let tie = (ratio - best).abs() <= SIMPLEX_EPS * best.abs().max(1.0);
                            if ratio < best && !tie || tie && self.basis[i] < self.basis[k] {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col)?,
                None => return Ok(PhaseResult::Unbounded { entering: col }),
            }
        }
    }
}

pub fn solve_lp(p: &LinearProgram) -> Result<LpOutcome> {
    p.validate()?;
    let n = p.num_vars();
    let m = p.num_constraints();

    let mut maps = Vec::with_capacity(n);
    let mut ny = 0;
    for &l in &p.lower_bounds {
        if l.is_finite() {
            maps.push(VarMap::Shifted { col: ny, lower: l });
            ny += 1;
        } else {
            maps.push(VarMap::Split { pos: ny, neg: ny + 1 });
            ny += 2;
        }
    }

    // Standard-form rows: G' y + s = b'.
    let mut a_std = DenseMatrix::zeros(m.max(1), ny + m);
    let mut b_std = vec![0.0; m];
    for i in 0..m {
        let mut b = p.rhs[i];
        for (j, map) in maps.iter().enumerate() {
            let g = p.constraints[(i, j)];
            match *map {
                VarMap::Shifted { col, lower } => {
                    a_std[(i, col)] = g;
                    b -= g * lower;
                }
                VarMap::Split { pos, neg } => {
                    a_std[(i, pos)] = g;
                    a_std[(i, neg)] = -g;
                }
            }
        }
        a_std[(i, ny + i)] = 1.0;
        b_std[i] = b;
    }

    let negative_rows: Vec<usize> = (0..m).filter(|&i| b_std[i] < 0.0).collect();
    let n_art = negative_rows.len();
    let cols = ny + m + n_art;
    let mut t = DenseMatrix::zeros(m.max(1), cols + 1);
    let mut basis = vec![0; m];
    for i in 0..m {
        let sign = if b_std[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..ny + m {
            t[(i, j)] = sign * a_std[(i, j)];
        }
        t[(i, cols)] = sign * b_std[i];
        basis[i] = ny + i;
    }
    for (k, &i) in negative_rows.iter().enumerate() {
        t[(i, ny + m + k)] = 1.0;
        basis[i] = ny + m + k;
    }
    let mut tab = Tableau { t, basis, cols, artificial_start: ny + m, pivots: 0 };

    // Phase 1: drive the artificial variables to zero.
    if n_art > 0 {
        let mut cost1 = vec![0.0; cols];
        cost1[tab.artificial_start..].iter_mut().for_each(|c| *c = 1.0);
        tab.run(&cost1, cols)?;
        let infeasibility: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= tab.artificial_start)
            .map(|i| tab.rhs(i))
            .sum();
        let scale = b_std.iter().fold(1.0f64, |a, b| a.max(b.abs()));
        if infeasibility > LP_FEAS_REL * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Pivot remaining (zero-valued) artificials out of the basis; rows
        // with no usable pivot are redundant and dropped.
        let mut keep = vec![true; m];
        for i in 0..m {
            if tab.basis[i] < tab.artificial_start {
                continue;
            }
            let col = (0..tab.artificial_start)
                .filter(|j| !tab.basis.contains(j))
                .max_by(|&a, &b| tab.t[(i, a)].abs().total_cmp(&tab.t[(i, b)].abs()))
                .filter(|&j| tab.t[(i, j)].abs() > SIMPLEX_EPS);
            match col {
                Some(j) => tab.pivot(i, j)?,
                None => keep[i] = false,
            }
        }
        if keep.iter().any(|k| !k) {
            let rows: Vec<usize> = (0..m).filter(|&i| keep[i]).collect();
            let mut t2 = DenseMatrix::zeros(rows.len().max(1), cols + 1);
            for (dst, &src) in rows.iter().enumerate() {
                for j in 0..=cols {
                    t2[(dst, j)] = tab.t[(src, j)];
                }
            }
            tab.basis = rows.iter().map(|&i| tab.basis[i]).collect();
            tab.t = if rows.is_empty() { DenseMatrix::zeros(1, cols + 1) } else { t2 };
        }
    }
    // Phase 2 on the original objective; artificial columns are frozen out.
    let mut cost2 = vec![0.0; cols];
    for (j, map) in maps.iter().enumerate() {
        match *map {
            VarMap::Shifted { col, .. } => cost2[col] = p.objective[j],
            VarMap::Split { pos, neg } => {
                cost2[pos] = p.objective[j];
                cost2[neg] = -p.objective[j];
            }
        }
    }
    let mut view = tab;
    if view.basis.is_empty() {
        // No constraints left: optimal iff every cost is nonnegative.
        if let Some(j) = (0..ny).find(|&j| cost2[j] < -SIMPLEX_EPS) {
            let mut d = vec![0.0; cols];
            d[j] = 1.0;
            return Ok(LpOutcome::Unbounded { ray: map_back_direction(&maps, &d) });
        }
        let y = vec![0.0; cols];
        return Ok(finish(p, &maps, &y));
    }
    let result = view.run(&cost2, view.artificial_start)?;
    if let PhaseResult::Unbounded { entering } = result {
        let mut d = vec![0.0; cols];
        d[entering] = 1.0;
        for (i, &b) in view.basis.iter().enumerate() {
            d[b] = -view.t[(i, entering)];
        }
        return Ok(LpOutcome::Unbounded { ray: map_back_direction(&maps, &d) });
    }

    // Basic values from the tableau, then refined by re-solving the basis system
    // against the original standard-form data.
    let mut y = vec![0.0; cols];
    for (i, &b) in view.basis.iter().enumerate() {
        y[b] = view.rhs(i).max(0.0);
    }
    if view.basis.len() == m && view.basis.iter().all(|&b| b < ny + m) {
        let mut basis_matrix = DenseMatrix::zeros(m, m);
        for (k, &b) in view.basis.iter().enumerate() {
            for i in 0..m {
                basis_matrix[(i, k)] = a_std[(i, b)];
            }
        }
        if let Ok(xb) = solve_linear(&basis_matrix, &b_std) {
            if xb.iter().all(|v| v.is_finite() && *v > -1e-7 * (1.0 + v.abs())) {
                for (k, &b) in view.basis.iter().enumerate() {
                    y[b] = xb[k].max(0.0);
                }
            }
        }
    }
    Ok(finish(p, &maps, &y))
}

fn finish(p: &LinearProgram, maps: &[VarMap], y: &[f64]) -> LpOutcome {
    let x: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shifted { col, lower } => lower + y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let objective = x.iter().zip(&p.objective).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, objective }
}

fn map_back_direction(maps: &[VarMap], d: &[f64]) -> Vec<f64> {
    maps.iter()
        .map(|m| match *m {
            VarMap::Shifted { col, .. } => d[col],
            VarMap::Split { pos, neg } => d[pos] - d[neg],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], g: &[&[f64]], h: &[f64], l: &[f64]) -> LinearProgram {
        let rows: Vec<Vec<f64>> = g.iter().map(|r| r.to_vec()).collect();
        let gm = if rows.is_empty() {
            DenseMatrix::zeros(0, c.len())
        } else {
            DenseMatrix::from_rows(&rows).unwrap()
        };
        LinearProgram { objective: c.to_vec(), constraints: gm, rhs: h.to_vec(), lower_bounds: l.to_vec() }
    }

    fn optimal(out: LpOutcome) -> (Vec<f64>, f64) {
        match out {
            LpOutcome::Optimal { x, objective } => (x, objective),
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn lower_bound_only() {
        // min x s.t. x ≥ 3, expressed as −x ≤ −3 with x free.
        let (x, obj) = optimal(solve_lp(&lp(&[1.0], &[&[-1.0]], &[-3.0], &[f64::NEG_INFINITY])).unwrap());
        assert!((x[0] - 3.0).abs() < 1e-12 && (obj - 3.0).abs() < 1e-12);
        // Same via the bound itself.
        let (x, _) = optimal(solve_lp(&lp(&[1.0], &[], &[], &[3.0])).unwrap());
        assert_eq!(x, vec![3.0]);
    }

    #[test]
    fn scalar_l1_certificate_lp() {
        // Variables (p, γ): 0.5p − p ≤ −1, p − γ ≤ 0, p ≥ 1e-6, γ ≥ 0.
        let p = lp(&[0.0, 1.0], &[&[-0.5, 0.0], &[1.0, -1.0]], &[-1.0, 0.0], &[1e-6, 0.0]);
        let (x, obj) = optimal(solve_lp(&p).unwrap());
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
        assert!((obj - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_detected() {
        let p = lp(&[1.0], &[&[1.0]], &[-1.0], &[0.0]);
        assert_eq!(solve_lp(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_reports_ray() {
        // min −x − y s.t. x − y ≤ 1, x, y ≥ 0.
        let p = lp(&[-1.0, -1.0], &[&[1.0, -1.0]], &[1.0], &[0.0, 0.0]);
        match solve_lp(&p).unwrap() {
            LpOutcome::Unbounded { ray } => {
                let gd = p.constraints.matvec(&ray);
                assert!(gd[0] <= 1e-12);
                assert!(ray.iter().all(|&v| v >= -1e-12));
                assert!(ray[0] * -1.0 + ray[1] * -1.0 < 0.0);
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn redundant_equality_rows() {
        // x + y ≤ 2 and −x − y ≤ −2 force x + y = 2 (degenerate, duplicated).
        let p = lp(
            &[1.0, 2.0],
            &[&[1.0, 1.0], &[-1.0, -1.0], &[1.0, 1.0], &[-1.0, -1.0]],
            &[2.0, -2.0, 2.0, -2.0],
            &[0.0, 0.0],
        );
        let (x, obj) = optimal(solve_lp(&p).unwrap());
        assert!((x[0] - 2.0).abs() < 1e-12 && x[1].abs() < 1e-12);
        assert!((obj - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_inconsistent_shapes() {
        let p = lp(&[1.0, 1.0], &[&[1.0]], &[1.0], &[0.0, 0.0]);
        assert!(solve_lp(&p).is_err());
    }

    #[test]
    fn row_scaling_preserves_solution() {
        let p = lp(&[0.0, 1.0], &[&[-50.0, 0.0], &[100.0, -1.0]], &[-100.0, 0.0], &[1e-6, 0.0]);
        let (_, a) = optimal(solve_lp(&p).unwrap());
        let (_, b) = optimal(solve_lp(&p.row_scaled()).unwrap());
        assert!((a - b).abs() < 1e-9 * a.abs());
        assert!((a - 200.0).abs() < 1e-9);
    }
}
