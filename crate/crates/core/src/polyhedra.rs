//! H- and V-representations, canonical forms and the basic transforms on them.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Vector};
use crate::lp::{LinearProgram, LpOutcome};
use crate::rational::Q;

/// `normal · x ≥ offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearInequality {
    pub normal: Vector,
    pub offset: Q,
}

/// `normal · x = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearEquality {
    pub normal: Vector,
    pub rhs: Q,
}

impl LinearInequality {
    pub fn new(normal: Vector, offset: Q) -> LinearInequality {
        LinearInequality { normal, offset }
    }

    /// Homogeneous `normal · x ≥ 0`.
    pub fn homogeneous(normal: Vector) -> LinearInequality {
        LinearInequality { normal, offset: Q::zero() }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.offset.is_zero()
    }

    /// `normal · x - offset`.
    pub fn slack(&self, x: &[Q]) -> Q {
        dot(&self.normal, x) - &self.offset
    }

    pub fn satisfied_by(&self, x: &[Q]) -> bool {
        !self.slack(x).is_negative()
    }

    pub fn tight_at(&self, x: &[Q]) -> bool {
        self.slack(x).is_zero()
    }

    /// Scaled by a positive factor to coprime integers over `(normal, offset)`.
    pub fn canonical(&self) -> LinearInequality {
        let mut all = self.normal.clone();
        all.push(self.offset.clone());
        let s = linalg::primitive_scale(&all);
        if s.is_one() {
            return self.clone();
        }
        LinearInequality { normal: linalg::scale(&self.normal, &s), offset: &self.offset * &s }
    }

    /// Trivially true (`0 ≥ b`, `b ≤ 0`).
    pub fn is_trivial(&self) -> bool {
        linalg::is_zero_vec(&self.normal) && !self.offset.is_positive()
    }

    /// Trivially false (`0 ≥ b`, `b > 0`).
    pub fn is_contradiction(&self) -> bool {
        linalg::is_zero_vec(&self.normal) && self.offset.is_positive()
    }
}

impl LinearEquality {
    pub fn new(normal: Vector, rhs: Q) -> LinearEquality {
        LinearEquality { normal, rhs }
    }

    /// Coprime integers with the first nonzero entry positive.
    pub fn canonical(&self) -> LinearEquality {
        let mut all = self.normal.clone();
        all.push(self.rhs.clone());
        let mut p = linalg::primitive_signed(&all);
        let rhs = p.pop().unwrap_or_default();
        LinearEquality { normal: p, rhs }
    }
}

/// Canonical ray form: coprime integers, scaled by a positive factor only.
pub fn canonical_ray(r: &[Q]) -> Vector {
    linalg::primitive(r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HRep {
    pub dim: usize,
    pub inequalities: Vec<LinearInequality>,
    pub equalities: Vec<LinearEquality>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VRep {
    pub dim: usize,
    pub vertices: Vec<Vector>,
    pub rays: Vec<Vector>,
}

impl HRep {
    pub fn new(dim: usize, inequalities: Vec<LinearInequality>, equalities: Vec<LinearEquality>) -> Result<HRep> {
        for i in &inequalities {
            if i.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: i.dim() });
            }
        }
        for e in &equalities {
            if e.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.normal.len() });
            }
        }
        Ok(HRep { dim, inequalities, equalities })
    }

    pub fn cone(dim: usize, normals: Vec<Vector>) -> Result<HRep> {
        HRep::new(dim, normals.into_iter().map(LinearInequality::homogeneous).collect(), Vec::new())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.inequalities.iter().all(LinearInequality::is_homogeneous) && self.equalities.iter().all(|e| e.rhs.is_zero())
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.inequalities.iter().all(|i| i.satisfied_by(x)) && self.equalities.iter().all(|e| dot(&e.normal, x) == e.rhs)
    }

    /// Canonicalize every row, drop trivial rows and duplicates (first occurrence wins).
    pub fn canonicalized(&self) -> Result<HRep> {
        let mut seen = HashSet::new();
        let mut inequalities = Vec::new();
        for i in &self.inequalities {
            if i.is_contradiction() {
                return Err(Error::Infeasible);
            }
            if i.is_trivial() {
                continue;
            }
            let c = i.canonical();
            if seen.insert(c.clone()) {
                inequalities.push(c);
            }
        }
        let mut seen = HashSet::new();
        let mut equalities = Vec::new();
        for e in &self.equalities {
            let c = e.canonical();
            if linalg::is_zero_vec(&c.normal) {
                if !c.rhs.is_zero() {
                    return Err(Error::Infeasible);
                }
                continue;
            }
            if seen.insert(c.clone()) {
                equalities.push(c);
            }
        }
        Ok(HRep { dim: self.dim, inequalities, equalities })
    }

    /// Sorted canonical inequalities, for order-independent comparison.
    pub fn sorted_canonical(&self) -> Vec<LinearInequality> {
        let mut v: Vec<LinearInequality> = self.inequalities.iter().map(LinearInequality::canonical).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn lp(&self, objective: Vector) -> LinearProgram {
        LinearProgram::with_constraints(self.dim, self.inequalities.clone(), self.equalities.clone(), objective)
    }

    /// Reorder coordinates: new coordinate `j` is old coordinate `order[j]`.
    pub fn permute_coordinates(&self, order: &[usize]) -> HRep {
        let pick = |v: &Vector| order.iter().map(|&o| v[o].clone()).collect::<Vector>();
        HRep {
            dim: self.dim,
            inequalities: self.inequalities.iter().map(|i| LinearInequality::new(pick(&i.normal), i.offset.clone())).collect(),
            equalities: self.equalities.iter().map(|e| LinearEquality::new(pick(&e.normal), e.rhs.clone())).collect(),
        }
    }
}

/// Prepend a homogenizing coordinate: `a·x ≥ b` becomes `-b·x0 + a·x ≥ 0`,
/// and `x0 ≥ 0` is appended.
pub fn homogenize(h: &HRep) -> HRep {
    let lift = |normal: &Vector, offset: &Q| {
        let mut v = Vec::with_capacity(normal.len() + 1);
        v.push(-offset);
        v.extend(normal.iter().cloned());
        v
    };
    let mut inequalities: Vec<LinearInequality> =
        h.inequalities.iter().map(|i| LinearInequality::homogeneous(lift(&i.normal, &i.offset))).collect();
    inequalities.push(LinearInequality::homogeneous(linalg::unit(h.dim + 1, 0)));
    let equalities = h.equalities.iter().map(|e| LinearEquality::new(lift(&e.normal, &e.rhs), Q::zero())).collect();
    HRep { dim: h.dim + 1, inequalities, equalities }
}

/// Split homogenized rays into vertices (`x0 > 0`, scaled to `x0 = 1`) and rays (`x0 = 0`).
pub fn dehomogenize(rays: &[Vector]) -> VRep {
    let dim = rays.first().map_or(0, |r| r.len() - 1);
    let mut vertices = Vec::new();
    let mut out_rays = Vec::new();
    for r in rays {
        if r[0].is_zero() {
            out_rays.push(canonical_ray(&r[1..]));
        } else {
            let inv = r[0].recip();
            vertices.push(r[1..].iter().map(|x| x * &inv).collect());
        }
    }
    VRep { dim, vertices, rays: out_rays }
}

/// Cone ∩ `{sum_{i<k} x_i ≤ 1}`.
pub fn boundedness_transform(cone: &HRep, k: usize) -> HRep {
    let mut out = cone.clone();
    let normal = (0..cone.dim).map(|i| if i < k { -Q::one() } else { Q::zero() }).collect();
    out.inequalities.push(LinearInequality::new(normal, -Q::one()));
    out
}

/// Drop every inhomogeneous inequality, undoing [`boundedness_transform`] on a projection.
pub fn strip_bounding(h: &HRep) -> HRep {
    HRep {
        dim: h.dim,
        inequalities: h.inequalities.iter().filter(|i| i.is_homogeneous()).cloned().collect(),
        equalities: h.equalities.clone(),
    }
}

/// Affine parametrization `x = offset + map · y` of the solution set of a set of equalities.
/// Reduced coordinate `j` is the original coordinate `free[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub full_dim: usize,
    pub free: Vec<usize>,
    pub offset: Vector,
    /// `full_dim` rows of length `free.len()`.
    pub map: Vec<Vector>,
}

impl Embedding {
    pub fn identity(n: usize) -> Embedding {
        Embedding {
            full_dim: n,
            free: (0..n).collect(),
            offset: linalg::zeros(n),
            map: (0..n).map(|i| linalg::unit(n, i)).collect(),
        }
    }

    pub fn reduced_dim(&self) -> usize {
        self.free.len()
    }

    pub fn lift(&self, y: &[Q]) -> Vector {
        self.map.iter().zip(&self.offset).map(|(row, o)| o + dot(row, y)).collect()
    }

    pub fn lift_direction(&self, y: &[Q]) -> Vector {
        self.map.iter().map(|row| dot(row, y)).collect()
    }

    pub fn reduce(&self, x: &[Q]) -> Vector {
        self.free.iter().map(|&i| x[i].clone()).collect()
    }

    /// `a·x ≥ b` rewritten over the reduced coordinates.
    pub fn restrict(&self, ineq: &LinearInequality) -> LinearInequality {
        let r = self.reduced_dim();
        let mut normal = linalg::zeros(r);
        for (a, row) in ineq.normal.iter().zip(&self.map) {
            if a.is_zero() {
                continue;
            }
            for j in 0..r {
                normal[j].add_mul(a, &row[j]);
            }
        }
        LinearInequality::new(normal, &ineq.offset - dot(&ineq.normal, &self.offset))
    }

    /// A reduced inequality written back over the full coordinates (using the free ones).
    pub fn extend(&self, ineq: &LinearInequality) -> LinearInequality {
        let mut normal = linalg::zeros(self.full_dim);
        for (j, &f) in self.free.iter().enumerate() {
            normal[f] = ineq.normal[j].clone();
        }
        LinearInequality::new(normal, ineq.offset.clone())
    }
}

/// Substitute away all equalities. Coordinates listed in `keep` are made pivot
/// variables only when nothing else is available, so they stay free when possible.
pub fn eliminate_equalities(h: &HRep, keep: &[usize]) -> Result<(HRep, Embedding)> {
    let n = h.dim;
    let mut order: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    order.extend(keep.iter().copied().filter(|&i| i < n));
    let mut rows: Vec<Vector> = h
        .equalities
        .iter()
        .map(|e| {
            let mut r: Vector = order.iter().map(|&o| e.normal[o].clone()).collect();
            r.push(e.rhs.clone());
            r
        })
        .collect();
    let pivots = linalg::rref(&mut rows, n + 1);
    if pivots.last() == Some(&n) {
        return Err(Error::Infeasible);
    }
    let pivot_set: HashSet<usize> = pivots.iter().copied().collect();
    let mut free_pos: Vec<usize> = (0..n).filter(|p| !pivot_set.contains(p)).collect();
    // Reduced coordinates follow the original coordinate order.
    free_pos.sort_by_key(|&p| order[p]);
    let free: Vec<usize> = free_pos.iter().map(|&p| order[p]).collect();
    let r = free.len();
    let mut offset = linalg::zeros(n);
    let mut map = vec![linalg::zeros(r); n];
    for (j, &f) in free.iter().enumerate() {
        map[f][j] = Q::one();
    }
    for (row_idx, &p) in pivots.iter().enumerate() {
        let orig = order[p];
        offset[orig] = rows[row_idx][n].clone();
        for (j, &fp) in free_pos.iter().enumerate() {
            map[orig][j] = -&rows[row_idx][fp];
        }
    }
    let emb = Embedding { full_dim: n, free, offset, map };
    let inequalities = h.inequalities.iter().map(|i| emb.restrict(i)).collect();
    let reduced = HRep { dim: r, inequalities, equalities: Vec::new() }.canonicalized()?;
    Ok((reduced, emb))
}

/// Whether `h.inequalities[i]` is implied by the other rows in `active`.
fn is_redundant(h: &HRep, active: &[bool], i: usize) -> Result<bool> {
    let target = &h.inequalities[i];
    let mut rows: Vec<LinearInequality> =
        h.inequalities.iter().enumerate().filter(|&(j, _)| j != i && active[j]).map(|(_, r)| r.clone()).collect();
    rows.push(LinearInequality::new(target.normal.clone(), &target.offset - Q::one()));
    let lp = LinearProgram::with_constraints(h.dim, rows, h.equalities.clone(), target.normal.clone());
    match lp.solve() {
        LpOutcome::Optimal(s) => Ok(s.value >= target.offset),
        LpOutcome::Unbounded { .. } => Ok(false),
        LpOutcome::Infeasible(_) => Err(Error::Infeasible),
    }
}

/// Remove inequalities implied by the others, one LP per row, scanning in
/// canonical-sorted order: a row is dropped when the rows kept before it
/// together with all rows after it imply it.
pub fn remove_redundancies(h: &HRep) -> Result<HRep> {
    let mut h = h.canonicalized()?;
    h.inequalities.sort();
    let mut active = vec![true; h.inequalities.len()];
    for i in 0..h.inequalities.len() {
        if is_redundant(&h, &active, i)? {
            active[i] = false;
        }
    }
    let inequalities = h.inequalities.iter().zip(&active).filter(|(_, &a)| a).map(|(r, _)| r.clone()).collect();
    Ok(HRep { dim: h.dim, inequalities, equalities: h.equalities })
}

/// Whether the polyhedron has an interior point (no implicit or explicit equalities).
pub fn full_dimension_check(h: &HRep) -> Result<bool> {
    let h = h.canonicalized()?;
    if !h.equalities.is_empty() {
        return Ok(false);
    }
    // max t subject to a·x - t ≥ b, t ≤ 1.
    let n = h.dim;
    let mut rows: Vec<LinearInequality> = h
        .inequalities
        .iter()
        .map(|i| {
            let mut normal = i.normal.clone();
            normal.push(-Q::one());
            LinearInequality::new(normal, i.offset.clone())
        })
        .collect();
    rows.push(LinearInequality::new(linalg::neg(&linalg::unit(n + 1, n)), -Q::one()));
    let objective = linalg::neg(&linalg::unit(n + 1, n));
    match LinearProgram::with_constraints(n + 1, rows, Vec::new(), objective).solve() {
        LpOutcome::Optimal(s) => Ok(s.value.is_negative()),
        LpOutcome::Unbounded { .. } => Ok(true),
        LpOutcome::Infeasible(_) => Ok(false),
    }
}

fn write_row(f: &mut fmt::Formatter<'_>, normal: &[Q], op: &str, rhs: &Q) -> fmt::Result {
    let parts: Vec<String> = normal.iter().map(Q::to_string).collect();
    writeln!(f, "{} {op} {rhs}", parts.join(" "))
}

/// Plain text form: a `dim` header, then one row per line as coefficients, an operator and a right-hand side.
impl fmt::Display for HRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        for i in &self.inequalities {
            write_row(f, &i.normal, ">=", &i.offset)?;
        }
        for e in &self.equalities {
            write_row(f, &e.normal, "=", &e.rhs)?;
        }
        Ok(())
    }
}

impl fmt::Display for VRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {}", self.dim)?;
        for v in &self.vertices {
            let parts: Vec<String> = v.iter().map(Q::to_string).collect();
            writeln!(f, "vertex {}", parts.join(" "))?;
        }
        for r in &self.rays {
            let parts: Vec<String> = r.iter().map(Q::to_string).collect();
            writeln!(f, "ray {}", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Parse the text form written by `Display for HRep`. `<=` rows are negated.
pub fn parse_hrep(text: &str) -> Result<HRep> {
    let mut dim: Option<usize> = None;
    let mut inequalities = Vec::new();
    let mut equalities = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}", ln + 1));
        if let Some(rest) = line.strip_prefix("dim") {
            dim = Some(rest.trim().parse().map_err(|_| err("bad dim"))?);
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some(op_pos) = tokens.iter().position(|t| matches!(*t, ">=" | "<=" | "=")) else {
            return Err(err("missing operator"));
        };
        if op_pos + 2 != tokens.len() {
            return Err(err("expected a single right-hand side"));
        }
        let parse = |t: &str| t.parse::<Q>().map_err(|e| err(&e.to_string()));
        let normal = tokens[..op_pos].iter().map(|t| parse(t)).collect::<Result<Vector>>()?;
        let rhs = parse(tokens[op_pos + 1])?;
        let d = *dim.get_or_insert(normal.len());
        if normal.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: normal.len() });
        }
        match tokens[op_pos] {
            ">=" => inequalities.push(LinearInequality::new(normal, rhs)),
            "<=" => inequalities.push(LinearInequality::new(linalg::neg(&normal), -rhs)),
            _ => equalities.push(LinearEquality::new(normal, rhs)),
        }
    }
    let dim = dim.ok_or_else(|| Error::Parse("empty representation".into()))?;
    HRep::new(dim, inequalities, equalities)
}

/// Parse `vertex`/`ray` lines as written by `Display for VRep`.
pub fn parse_vrep(text: &str) -> Result<VRep> {
    let mut dim: Option<usize> = None;
    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}", ln + 1));
        let mut tokens = line.split_whitespace();
        let kind = tokens.next().unwrap_or_default();
        if kind == "dim" {
            dim = Some(tokens.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad dim"))?);
            continue;
        }
        let v = tokens.map(|t| t.parse::<Q>().map_err(|e| err(&e.to_string()))).collect::<Result<Vector>>()?;
        let d = *dim.get_or_insert(v.len());
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
        match kind {
            "vertex" => vertices.push(v),
            "ray" => rays.push(v),
            _ => return Err(err("expected `vertex` or `ray`")),
        }
    }
    let dim = dim.ok_or_else(|| Error::Parse("empty representation".into()))?;
    Ok(VRep { dim, vertices, rays })
}
