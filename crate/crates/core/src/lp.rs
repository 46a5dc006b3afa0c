//! Exact two-phase simplex over `Q` with Bland's rule.
//!
//! Constraints are `a·x ≥ b` and `e·x = f` over free variables `x`. The solver
//! keeps a condensed dictionary: each basic variable is an affine function of
//! the nonbasic ones. Free variables are pivoted into the basis first and
//! never leave it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Vector};
use crate::polyhedra::{HRep, LinearEquality, LinearInequality};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub dim: usize,
    pub inequalities: Vec<LinearInequality>,
    pub equalities: Vec<LinearEquality>,
    /// Minimized.
    pub objective: Vector,
    /// Secondary objectives, compared lexicographically after `objective`.
    /// Only meaningful when the feasible region is bounded.
    pub tie_break: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Q,
    pub point: Vector,
    /// One nonnegative multiplier per inequality.
    pub ineq_duals: Vector,
    /// One multiplier per equality.
    pub eq_duals: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    /// Nonnegative multipliers on the inequalities.
    pub ineq: Vector,
    pub eq: Vector,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    /// `point` is feasible and `ray` is a recession direction that strictly
    /// decreases the objective.
    Unbounded { point: Vector, ray: Vector },
    Infeasible(FarkasCertificate),
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(dim: usize, objective: Vector) -> LinearProgram {
        assert_eq!(objective.len(), dim);
        LinearProgram { dim, inequalities: Vec::new(), equalities: Vec::new(), objective, tie_break: Vec::new() }
    }

    pub fn with_constraints(
        dim: usize,
        inequalities: Vec<LinearInequality>,
        equalities: Vec<LinearEquality>,
        objective: Vector,
    ) -> LinearProgram {
        LinearProgram { dim, inequalities, equalities, objective, tie_break: Vec::new() }
    }

    pub fn solve(&self) -> LpOutcome {
        solve(self)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Var {
    X(usize),
    S(usize),
    Z(usize),
    A(usize),
}

struct Dictionary {
    n: usize,
    m: usize,
    p: usize,
    /// `rows[r][j]`: coefficient of nonbasic column `j` in the expression of row `r`'s basic variable.
    rows: Vec<Vector>,
    rhs: Vector,
    basic: Vec<Var>,
    cols: Vec<Var>,
}

impl Dictionary {
    fn id(&self, v: Var) -> usize {
        match v {
            Var::X(i) => i,
            Var::S(i) => self.n + i,
            Var::Z(i) => self.n + self.m + i,
            Var::A(i) => self.n + self.m + self.p + i,
        }
    }

    fn is_free_row(&self, r: usize) -> bool {
        matches!(self.basic[r], Var::X(_))
    }

    /// Pivot basic variable of row `r` out and column `c` in. Objective rows are
    /// updated alongside.
    fn pivot(&mut self, r: usize, c: usize, objectives: &mut [(Q, Vector)]) {
        let t = self.rows[r][c].clone();
        let inv = t.recip();
        let mut new_row: Vector = self.rows[r].iter().map(|x| -(x * &inv)).collect();
        new_row[c] = inv.clone();
        let new_rhs = -(&self.rhs[r] * &inv);
        let nz: Vec<usize> = (0..new_row.len()).filter(|&j| !new_row[j].is_zero()).collect();
        let apply = |row: &mut Vector, rhs: &mut Q| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            row[c] = Q::zero();
            for &j in &nz {
                row[j].add_mul(&f, &new_row[j]);
            }
            rhs.add_mul(&f, &new_rhs);
        };
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let (row, rhs) = (&mut self.rows[i], &mut self.rhs[i]);
            apply(row, rhs);
        }
        for (val, row) in objectives.iter_mut() {
            apply(row, val);
        }
        self.rows[r] = new_row;
        self.rhs[r] = new_rhs;
        std::mem::swap(&mut self.basic[r], &mut self.cols[c]);
    }

    fn remove_col(&mut self, c: usize, objectives: &mut [(Q, Vector)]) {
        for row in self.rows.iter_mut() {
            row.swap_remove(c);
        }
        for (_, row) in objectives.iter_mut() {
            row.swap_remove(c);
        }
        self.cols.swap_remove(c);
    }

    fn remove_row(&mut self, r: usize) {
        self.rows.swap_remove(r);
        self.rhs.swap_remove(r);
        self.basic.swap_remove(r);
    }

    /// Bland ratio test for increasing column `c`: the basic variable that hits
    /// zero first, ties to the smallest variable id.
    fn ratio_row(&self, c: usize) -> Option<usize> {
        let mut best: Option<(Q, usize, usize)> = None;
        for r in 0..self.rows.len() {
            if self.is_free_row(r) {
                continue;
            }
            let coef = &self.rows[r][c];
            if !coef.is_negative() {
                continue;
            }
            let ratio = &self.rhs[r] / &(-coef);
            let id = self.id(self.basic[r]);
            let better = match &best {
                None => true,
                Some((b, _, bid)) => ratio < *b || (ratio == *b && id < *bid),
            };
            if better {
                best = Some((ratio, r, id));
            }
        }
        best.map(|(_, r, _)| r)
    }

    /// Minimize the objectives (lexicographically). Returns `Err(c)` when
    /// column `c` is an unbounded improving direction.
    fn optimize(&mut self, objectives: &mut [(Q, Vector)]) -> std::result::Result<(), usize> {
        loop {
            let mut entering: Option<(usize, usize)> = None;
            for c in 0..self.cols.len() {
                if matches!(self.cols[c], Var::X(_)) {
                    continue;
                }
                let improving = objectives
                    .iter()
                    .map(|(_, row)| row[c].signum())
                    .find(|&s| s != 0)
                    .is_some_and(|s| s < 0);
                if improving {
                    let id = self.id(self.cols[c]);
                    if entering.map_or(true, |(_, bid)| id < bid) {
                        entering = Some((c, id));
                    }
                }
            }
            let Some((c, _)) = entering else {
                return Ok(());
            };
            match self.ratio_row(c) {
                Some(r) => self.pivot(r, c, objectives),
                None => return Err(c),
            }
        }
    }

    fn point(&self) -> Vector {
        let mut x = linalg::zeros(self.n);
        for (r, v) in self.basic.iter().enumerate() {
            if let Var::X(k) = v {
                x[*k] = self.rhs[r].clone();
            }
        }
        x
    }

    /// Change of `x` when nonbasic column `c` increases by one.
    fn direction(&self, c: usize) -> Vector {
        let mut d = linalg::zeros(self.n);
        for (r, v) in self.basic.iter().enumerate() {
            if let Var::X(k) = v {
                d[*k] = self.rows[r][c].clone();
            }
        }
        if let Var::X(k) = self.cols[c] {
            d[k] = Q::one();
        }
        d
    }

    /// Express `sum_k w_k x_k` over the current nonbasic columns.
    fn objective_row(&self, w: &[Q]) -> (Q, Vector) {
        let mut val = Q::zero();
        let mut row = linalg::zeros(self.cols.len());
        for (r, v) in self.basic.iter().enumerate() {
            if let Var::X(k) = v {
                if w[*k].is_zero() {
                    continue;
                }
                val.add_mul(&w[*k], &self.rhs[r]);
                for (j, coef) in self.rows[r].iter().enumerate() {
                    row[j].add_mul(&w[*k], coef);
                }
            }
        }
        for (j, v) in self.cols.iter().enumerate() {
            if let Var::X(k) = v {
                row[j] += &w[*k];
            }
        }
        (val, row)
    }
}

fn build(lp: &LinearProgram) -> Dictionary {
    let n = lp.dim;
    let m = lp.inequalities.len();
    let p = lp.equalities.len();
    let mut rows = Vec::with_capacity(m + p);
    let mut rhs = Vec::with_capacity(m + p);
    let mut basic = Vec::with_capacity(m + p);
    for (i, ineq) in lp.inequalities.iter().enumerate() {
        assert_eq!(ineq.normal.len(), n, "inequality dimension");
        rows.push(ineq.normal.clone());
        rhs.push(-&ineq.offset);
        basic.push(Var::S(i));
    }
    for (k, eq) in lp.equalities.iter().enumerate() {
        assert_eq!(eq.normal.len(), n, "equality dimension");
        rows.push(eq.normal.clone());
        rhs.push(-&eq.rhs);
        basic.push(Var::Z(k));
    }
    Dictionary { n, m, p, rows, rhs, basic, cols: (0..n).map(Var::X).collect() }
}

/// Pivot every free variable into the basis where possible; equality slacks
/// that leave are fixed at zero and dropped.
fn phase_zero(d: &mut Dictionary) {
    for k in 0..d.n {
        let Some(c) = d.cols.iter().position(|&v| v == Var::X(k)) else {
            continue;
        };
        let pick = |want_z: bool| {
            (0..d.rows.len()).find(|&r| {
                !d.is_free_row(r) && matches!(d.basic[r], Var::Z(_)) == want_z && !d.rows[r][c].is_zero()
            })
        };
        let Some(r) = pick(true).or_else(|| pick(false)) else {
            continue;
        };
        d.pivot(r, c, &mut []);
        if let Var::Z(_) = d.cols[c] {
            d.remove_col(c, &mut []);
        }
    }
}

/// Returns `false` when infeasible.
fn phase_one(d: &mut Dictionary) -> bool {
    let mut needs_phase = false;
    let mut new_cols = Vec::new();
    for r in 0..d.rows.len() {
        match d.basic[r] {
            Var::Z(k) => {
                if d.rhs[r].is_negative() {
                    for x in d.rows[r].iter_mut() {
                        *x = -&*x;
                    }
                    d.rhs[r] = -&d.rhs[r];
                }
                d.basic[r] = Var::A(d.m + k);
                needs_phase = true;
            }
            Var::S(i) if d.rhs[r].is_negative() => {
                // a = s - expr, with s made nonbasic.
                for x in d.rows[r].iter_mut() {
                    *x = -&*x;
                }
                d.rhs[r] = -&d.rhs[r];
                d.basic[r] = Var::A(i);
                new_cols.push((r, Var::S(i)));
                needs_phase = true;
            }
            _ => {}
        }
    }
    if !needs_phase {
        return true;
    }
    for (r, v) in new_cols {
        for (i, row) in d.rows.iter_mut().enumerate() {
            row.push(if i == r { Q::one() } else { Q::zero() });
        }
        d.cols.push(v);
    }
    let ncols = d.cols.len();
    let mut w = (Q::zero(), linalg::zeros(ncols));
    for r in 0..d.rows.len() {
        if let Var::A(_) = d.basic[r] {
            w.0 += &d.rhs[r];
            for j in 0..ncols {
                w.1[j] += &d.rows[r][j];
            }
        }
    }
    let mut objs = [w];
    // Phase one is bounded below by zero.
    let _ = d.optimize(&mut objs);
    if objs[0].0.is_positive() {
        return false;
    }
    // Drive zero-level artificials out, drop redundant rows and artificial columns.
    let mut r = 0;
    while r < d.rows.len() {
        if let Var::A(_) = d.basic[r] {
            let c = (0..d.cols.len())
                .find(|&c| !matches!(d.cols[c], Var::A(_) | Var::X(_)) && !d.rows[r][c].is_zero());
            match c {
                Some(c) => d.pivot(r, c, &mut []),
                None => {
                    d.remove_row(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    let mut c = 0;
    while c < d.cols.len() {
        if let Var::A(_) = d.cols[c] {
            d.remove_col(c, &mut []);
        } else {
            c += 1;
        }
    }
    true
}

pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let mut d = build(lp);
    phase_zero(&mut d);
    if !phase_one(&mut d) {
        return LpOutcome::Infeasible(farkas_certificate(lp).expect("infeasible system must admit a certificate"));
    }
    // A free nonbasic variable with nonzero cost is an unbounded line.
    let primary = d.objective_row(&lp.objective);
    for (c, v) in d.cols.iter().enumerate() {
        if let Var::X(_) = v {
            let s = primary.1[c].signum();
            if s != 0 {
                let dir = d.direction(c);
                let ray = if s > 0 { linalg::neg(&dir) } else { dir };
                return LpOutcome::Unbounded { point: d.point(), ray };
            }
        }
    }
    let mut objs: Vec<(Q, Vector)> = vec![primary];
    for w in &lp.tie_break {
        objs.push(d.objective_row(w));
    }
    if let Err(c) = d.optimize(&mut objs) {
        return LpOutcome::Unbounded { point: d.point(), ray: d.direction(c) };
    }
    let point = d.point();
    let mut ineq_duals = linalg::zeros(d.m);
    for (c, v) in d.cols.iter().enumerate() {
        if let Var::S(i) = v {
            ineq_duals[*i] = objs[0].1[c].clone();
        }
    }
    let eq_duals = equality_duals(lp, &ineq_duals);
    LpOutcome::Optimal(LpSolution { value: objs[0].0.clone(), point, ineq_duals, eq_duals })
}

/// Solve `E^T mu = c - A^T lambda` for the equality multipliers.
fn equality_duals(lp: &LinearProgram, ineq_duals: &[Q]) -> Vector {
    let n = lp.dim;
    let mut residual = lp.objective.clone();
    for (lam, ineq) in ineq_duals.iter().zip(&lp.inequalities) {
        if !lam.is_zero() {
            for j in 0..n {
                residual[j].sub_mul(lam, &ineq.normal[j]);
            }
        }
    }
    if lp.equalities.is_empty() {
        debug_assert!(linalg::is_zero_vec(&residual));
        return Vec::new();
    }
    let cols: Vec<Vector> = lp.equalities.iter().map(|e| e.normal.clone()).collect();
    let system = linalg::transpose(&cols, n);
    linalg::solve(&system, &residual, lp.equalities.len()).expect("dual system is consistent at an optimum")
}

/// Multipliers proving that the constraints of `lp` have no common solution:
/// `sum lambda_i a_i + sum mu_k e_k = 0` with `sum lambda_i b_i + sum mu_k f_k = 1`.
/// Returns `None` when the system is feasible.
pub fn farkas_certificate(lp: &LinearProgram) -> Option<FarkasCertificate> {
    let m = lp.inequalities.len();
    let p = lp.equalities.len();
    let dim = m + p;
    let mut eqs = Vec::with_capacity(lp.dim + 1);
    for j in 0..lp.dim {
        let mut row = linalg::zeros(dim);
        for (i, ineq) in lp.inequalities.iter().enumerate() {
            row[i] = ineq.normal[j].clone();
        }
        for (k, eq) in lp.equalities.iter().enumerate() {
            row[m + k] = eq.normal[j].clone();
        }
        eqs.push(LinearEquality { normal: row, rhs: Q::zero() });
    }
    let mut row = linalg::zeros(dim);
    for (i, ineq) in lp.inequalities.iter().enumerate() {
        row[i] = ineq.offset.clone();
    }
    for (k, eq) in lp.equalities.iter().enumerate() {
        row[m + k] = eq.rhs.clone();
    }
    eqs.push(LinearEquality { normal: row, rhs: Q::one() });
    let ineqs = (0..m).map(|i| LinearInequality { normal: linalg::unit(dim, i), offset: Q::zero() }).collect();
    let aux = LinearProgram::with_constraints(dim, ineqs, eqs, linalg::zeros(dim));
    let mut d = build(&aux);
    phase_zero(&mut d);
    if !phase_one(&mut d) {
        return None;
    }
    let y = d.point();
    Some(FarkasCertificate { ineq: y[..m].to_vec(), eq: y[m..].to_vec() })
}

/// Independent check of a Farkas certificate against `lp`.
pub fn verify_farkas(lp: &LinearProgram, cert: &FarkasCertificate) -> bool {
    if cert.ineq.len() != lp.inequalities.len() || cert.eq.len() != lp.equalities.len() {
        return false;
    }
    if cert.ineq.iter().any(Q::is_negative) {
        return false;
    }
    let mut combo = linalg::zeros(lp.dim);
    let mut rhs = Q::zero();
    for (lam, ineq) in cert.ineq.iter().zip(&lp.inequalities) {
        for j in 0..lp.dim {
            combo[j].add_mul(lam, &ineq.normal[j]);
        }
        rhs.add_mul(lam, &ineq.offset);
    }
    for (mu, eq) in cert.eq.iter().zip(&lp.equalities) {
        for j in 0..lp.dim {
            combo[j].add_mul(mu, &eq.normal[j]);
        }
        rhs.add_mul(mu, &eq.rhs);
    }
    linalg::is_zero_vec(&combo) && rhs.is_positive()
}

/// Multipliers deriving an inequality from a system: `sum lambda_i a_i +
/// sum mu_k e_k = a` and `sum lambda_i b_i + sum mu_k f_k ≥ b`, `lambda ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImplicationCertificate {
    pub ineq: Vector,
    pub eq: Vector,
}

impl ImplicationCertificate {
    /// Indices and values of the nonzero inequality multipliers.
    pub fn ineq_support(&self) -> Vec<(usize, Q)> {
        self.ineq.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
    }

    pub fn eq_support(&self) -> Vec<(usize, Q)> {
        self.eq.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
    }
}

/// Certificate that every point of `h` satisfies `target`, read off the dual
/// of `min target.normal · x` over `h`.
pub fn implication_certificate(h: &HRep, target: &LinearInequality) -> Result<ImplicationCertificate> {
    if target.dim() != h.dim {
        return Err(Error::DimensionMismatch { expected: h.dim, found: target.dim() });
    }
    match h.lp(target.normal.clone()).solve() {
        LpOutcome::Optimal(s) if s.value >= target.offset => {
            Ok(ImplicationCertificate { ineq: s.ineq_duals, eq: s.eq_duals })
        }
        LpOutcome::Optimal(s) => Err(Error::NotImplied { point: s.point }),
        LpOutcome::Unbounded { point, ray } => {
            // Walk along the ray far enough to cross the target hyperplane.
            let slope = dot(&target.normal, &ray);
            let gap = &target.offset - dot(&target.normal, &point);
            let t = (gap / -slope).abs() + Q::one();
            Err(Error::NotImplied { point: linalg::combine(&Q::one(), &point, &t, &ray) })
        }
        LpOutcome::Infeasible(_) => Err(Error::Infeasible),
    }
}

/// Arithmetic check of an implication certificate, independent of the solver.
pub fn verify_implication(h: &HRep, target: &LinearInequality, cert: &ImplicationCertificate) -> bool {
    if cert.ineq.len() != h.inequalities.len() || cert.eq.len() != h.equalities.len() {
        return false;
    }
    if cert.ineq.iter().any(Q::is_negative) {
        return false;
    }
    let mut combo = linalg::zeros(h.dim);
    let mut rhs = Q::zero();
    for (lam, ineq) in cert.ineq.iter().zip(&h.inequalities) {
        if lam.is_zero() {
            continue;
        }
        for j in 0..h.dim {
            combo[j].add_mul(lam, &ineq.normal[j]);
        }
        rhs.add_mul(lam, &ineq.offset);
    }
    for (mu, eq) in cert.eq.iter().zip(&h.equalities) {
        if mu.is_zero() {
            continue;
        }
        for j in 0..h.dim {
            combo[j].add_mul(mu, &eq.normal[j]);
        }
        rhs.add_mul(mu, &eq.rhs);
    }
    combo == target.normal && rhs >= target.offset
}

/// Check strong duality and dual feasibility of an optimal solution.
pub fn verify_optimal(lp: &LinearProgram, sol: &LpSolution) -> bool {
    let feasible = lp.inequalities.iter().all(|i| dot(&i.normal, &sol.point) >= i.offset)
        && lp.equalities.iter().all(|e| dot(&e.normal, &sol.point) == e.rhs);
    if !feasible || sol.ineq_duals.iter().any(Q::is_negative) {
        return false;
    }
    let mut combo = linalg::zeros(lp.dim);
    let mut bound = Q::zero();
    for (lam, ineq) in sol.ineq_duals.iter().zip(&lp.inequalities) {
        for j in 0..lp.dim {
            combo[j].add_mul(lam, &ineq.normal[j]);
        }
        bound.add_mul(lam, &ineq.offset);
    }
    for (mu, eq) in sol.eq_duals.iter().zip(&lp.equalities) {
        for j in 0..lp.dim {
            combo[j].add_mul(mu, &eq.normal[j]);
        }
        bound.add_mul(mu, &eq.rhs);
    }
    combo == lp.objective && bound == sol.value && dot(&lp.objective, &sol.point) == sol.value
}
