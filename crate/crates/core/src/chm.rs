//! Convex hull method: project a bounded polyhedron onto its leading
//! coordinates by growing an inner approximation until every facet is
//! confirmed by a linear program.
//!
//! The inner bound is stored as a double description pair of its dual cone:
//! homogenized vertices `(1, v)` are the normals and homogenized facets
//! `(-b, a)` of `a·x ≥ b` are the rays.

use std::collections::{HashSet, VecDeque};

use crate::dd::{dd_step, simplicial_pair, DdOptions, DdPair, StepStats};
use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::lp::{LinearProgram, LpOutcome};
use crate::polyhedra::{HRep, LinearInequality};
use crate::rational::Q;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChmOptions {
    pub dd: DdOptions,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct ChmStats {
    /// LPs issued while building the initial hull.
    pub initial_lps: usize,
    /// LPs whose optimum was added to the hull as a new point.
    pub discovering_lps: usize,
    /// LPs that confirmed a facet.
    pub terminal_lps: usize,
    /// LPs on the symmetry-reduced parent.
    pub reduced_lps: usize,
    /// Membership LPs used to validate a symmetry group.
    pub validation_lps: usize,
    pub dd_steps: usize,
    /// Sum over DD steps of the number of rays entering the step.
    pub rays_processed: usize,
}

/// Inner approximation of a projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hull {
    pub dim: usize,
    pub dual: DdPair,
}

pub fn homogenize_point(v: &[Q]) -> Vector {
    let mut u = Vec::with_capacity(v.len() + 1);
    u.push(Q::one());
    u.extend(v.iter().cloned());
    u
}

pub fn facet_of_ray(r: &[Q]) -> LinearInequality {
    LinearInequality::new(r[1..].to_vec(), -&r[0]).canonical()
}

pub fn ray_of_facet(f: &LinearInequality) -> Vector {
    let mut r = Vec::with_capacity(f.dim() + 1);
    r.push(-&f.offset);
    r.extend(f.normal.iter().cloned());
    linalg::primitive(&r)
}

impl Hull {
    /// Points of the inner bound, in insertion order.
    pub fn points(&self) -> Vec<Vector> {
        self.dual.normals.iter().map(|u| u[1..].to_vec()).collect()
    }

    /// Points that are vertices of the hull, sorted.
    pub fn vertices(&self) -> Vec<Vector> {
        let mut out: Vec<Vector> = (0..self.dual.normals.len())
            .filter(|&j| {
                let tight: Vec<Vector> = self.dual.rays_on(j).into_iter().map(|k| self.dual.rays[k].clone()).collect();
                linalg::rank(&tight) == self.dim
            })
            .map(|j| self.dual.normals[j][1..].to_vec())
            .collect();
        out.sort();
        out
    }

    pub fn facets(&self) -> Vec<LinearInequality> {
        let mut f: Vec<LinearInequality> = self.dual.rays.iter().map(|r| facet_of_ray(r)).collect();
        f.sort();
        f
    }

    pub fn h(&self) -> HRep {
        HRep { dim: self.dim, inequalities: self.facets(), equalities: Vec::new() }
    }

    pub fn contains_point(&self, v: &[Q]) -> bool {
        let u = homogenize_point(v);
        self.dual.rays.iter().all(|r| !linalg::dot(r, &u).is_negative())
    }
}

/// Point of the projection onto the first `k` coordinates minimizing `c`.
/// Ties are broken lexicographically on the projected coordinates, so the
/// result is a vertex of the projection.
pub fn extreme_point(parent: &HRep, k: usize, c: &[Q]) -> Result<(Vector, Q)> {
    if c.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: c.len() });
    }
    let pad = |v: &[Q]| {
        let mut p = v.to_vec();
        p.resize(parent.dim, Q::zero());
        p
    };
    let mut lp = LinearProgram::with_constraints(parent.dim, parent.inequalities.clone(), parent.equalities.clone(), pad(c));
    lp.tie_break = (0..k).map(|i| linalg::unit(parent.dim, i)).collect();
    match lp.solve() {
        LpOutcome::Optimal(s) => Ok((s.point[..k].to_vec(), s.value)),
        LpOutcome::Unbounded { .. } => Err(Error::UnboundedParent),
        LpOutcome::Infeasible(_) => Err(Error::Infeasible),
    }
}

/// Nonzero normal of a hyperplane containing all `points` (`points.len() ≤ k`
/// or not affinely spanning).
pub fn hyperplane(points: &[Vector], k: usize) -> Option<Vector> {
    let base = points.first()?;
    let diffs: Vec<Vector> = points[1..].iter().map(|p| linalg::sub(p, base)).collect();
    linalg::nullspace(&diffs, k).into_iter().next()
}

pub fn affine_rank(points: &[Vector]) -> usize {
    match points.first() {
        None => 0,
        Some(base) => {
            let diffs: Vec<Vector> = points[1..].iter().map(|p| linalg::sub(p, base)).collect();
            linalg::rank(&diffs)
        }
    }
}

/// Dual pair of the simplex spanned by `k + 1` affinely independent points.
pub fn facets_from_simplex(points: &[Vector]) -> Result<Hull> {
    let k = points.first().map_or(0, Vec::len);
    if points.len() != k + 1 {
        return Err(Error::ProjectionNotFullDimensional);
    }
    let rows = points.iter().map(|p| homogenize_point(p)).collect();
    let dual = simplicial_pair(rows).map_err(|_| Error::ProjectionNotFullDimensional)?;
    Ok(Hull { dim: k, dual })
}

/// Build the hull of a point set that affinely spans `R^k`: a simplex on an
/// independent subset, then one DD step per remaining point outside it.
pub fn hull_of_points(points: &[Vector], k: usize, opts: &DdOptions, stats: &mut ChmStats) -> Result<Hull> {
    let homog: Vec<Vector> = points.iter().map(|p| homogenize_point(p)).collect();
    let basis = linalg::independent_rows(&homog, k + 1);
    if basis.len() < k + 1 {
        return Err(Error::ProjectionNotFullDimensional);
    }
    let simplex: Vec<Vector> = basis.iter().map(|&i| points[i].clone()).collect();
    let mut hull = facets_from_simplex(&simplex)?;
    for (i, p) in points.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        match update_hull(&hull, p, opts) {
            Ok((h, s)) => {
                stats.dd_steps += 1;
                stats.rays_processed += s.positive + s.negative + s.zero;
                hull = h;
            }
            Err(Error::VertexInsideHull) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(hull)
}

/// Simplex of `k + 1` affinely independent extreme points of the projection.
pub fn initial_hull(parent: &HRep, k: usize, stats: &mut ChmStats) -> Result<Hull> {
    let mut points: Vec<Vector> = Vec::new();
    while points.len() < k + 1 {
        let h = if points.is_empty() {
            linalg::unit(k, 0)
        } else {
            hyperplane(&points, k).ok_or(Error::ProjectionNotFullDimensional)?
        };
        let level = points.first().map(|p| linalg::dot(&h, p));
        let (p, value) = extreme_point(parent, k, &h)?;
        stats.initial_lps += 1;
        if level.as_ref().map_or(true, |l| value < *l) {
            points.push(p);
            stats.discovering_lps += 1;
            continue;
        }
        let (p, value) = extreme_point(parent, k, &linalg::neg(&h))?;
        stats.initial_lps += 1;
        let level = level.expect("set above");
        if -value > level {
            points.push(p);
            stats.discovering_lps += 1;
        } else {
            return Err(Error::ProjectionNotFullDimensional);
        }
    }
    facets_from_simplex(&points)
}

/// Add `v` to the hull with one DD step on the dual cone.
pub fn update_hull(hull: &Hull, v: &[Q], opts: &DdOptions) -> Result<(Hull, StepStats)> {
    if v.len() != hull.dim {
        return Err(Error::DimensionMismatch { expected: hull.dim, found: v.len() });
    }
    let a = homogenize_point(v);
    if hull.dual.rays.iter().all(|r| !linalg::dot(r, &a).is_negative()) {
        return Err(Error::VertexInsideHull);
    }
    let (dual, stats) = dd_step(&hull.dual, &a, opts)?;
    Ok((Hull { dim: hull.dim, dual }, stats))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub hull: Hull,
    pub stats: ChmStats,
}

impl Projection {
    pub fn vertices(&self) -> Vec<Vector> {
        self.hull.vertices()
    }

    pub fn facets(&self) -> Vec<LinearInequality> {
        self.hull.facets()
    }
}

/// Project the bounded polyhedron `parent` onto its first `k` coordinates.
pub fn chm_project(parent: &HRep, k: usize, opts: &ChmOptions) -> Result<Projection> {
    if k == 0 || k > parent.dim {
        return Err(Error::DimensionMismatch { expected: parent.dim, found: k });
    }
    let mut stats = ChmStats::default();
    let mut hull = initial_hull(parent, k, &mut stats)?;
    let mut queue: VecDeque<Vector> = sorted(hull.dual.rays.clone()).into();
    let mut terminal: HashSet<Vector> = HashSet::new();
    while let Some(ray) = queue.pop_front() {
        if terminal.contains(&ray) || !hull.dual.rays.contains(&ray) {
            continue;
        }
        let facet = facet_of_ray(&ray);
        let (v, value) = extreme_point(parent, k, &facet.normal)?;
        if value >= facet.offset {
            stats.terminal_lps += 1;
            terminal.insert(ray);
            continue;
        }
        stats.discovering_lps += 1;
        let before: HashSet<Vector> = hull.dual.rays.iter().cloned().collect();
        let (next, s) = update_hull(&hull, &v, &opts.dd)?;
        stats.dd_steps += 1;
        stats.rays_processed += s.positive + s.negative + s.zero;
        hull = next;
        let fresh: Vec<Vector> = hull.dual.rays.iter().filter(|r| !before.contains(*r)).cloned().collect();
        queue.extend(sorted(fresh));
        log::debug!("chm: {} points, {} facets, queue {}", hull.dual.normals.len(), hull.dual.rays.len(), queue.len());
    }
    Ok(Projection { hull, stats })
}

fn sorted(mut v: Vec<Vector>) -> Vec<Vector> {
    v.sort();
    v
}
