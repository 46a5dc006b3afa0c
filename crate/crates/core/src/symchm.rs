//! Convex hull method under a coordinate permutation group.
//!
//! Only orbit representatives of vertices and facets are tracked; the full
//! hull is re-expanded from them after each symmetric DD step. A facet orbit
//! needs a single LP, and a discovered vertex brings in its whole orbit.

use std::collections::{HashSet, VecDeque};

use fixedbitset::FixedBitSet;

use crate::chm::{
    affine_rank, extreme_point, facet_of_ray, homogenize_point, hull_of_points, hyperplane, ChmOptions, ChmStats, Hull,
};
use crate::dd::{dd_step, DdOptions, DdPair};
use crate::error::{Error, Result};
use crate::groups::{fix_subspace, orbit_transversal, PermGroup};
use crate::linalg::{self, dot, Vector};
use crate::lp::{LinearProgram, LpOutcome};
use crate::polyhedra::{canonical_ray, HRep, LinearEquality, LinearInequality};
use crate::rational::Q;

/// Orbit transversals of an inner bound plus its expansion.
#[derive(Debug, Clone)]
pub struct SymHull {
    pub group: PermGroup,
    pub vertex_reps: Vec<Vector>,
    /// Homogenized facet rays `(-b, a)`.
    pub facet_reps: Vec<Vector>,
    pub expanded: Hull,
}

impl SymHull {
    /// Symmetrize the hull of `points` (each is replaced by its orbit).
    pub fn from_points(points: &[Vector], group: &PermGroup, opts: &DdOptions) -> Result<SymHull> {
        let k = group.degree();
        let mut all: Vec<Vector> = Vec::new();
        let mut seen = HashSet::new();
        for p in points {
            for q in group.orbit(p) {
                if seen.insert(q.clone()) {
                    all.push(q);
                }
            }
        }
        let hull = hull_of_points(&all, k, opts, &mut ChmStats::default())?;
        Ok(SymHull::from_hull(hull, group.clone()))
    }

    fn from_hull(expanded: Hull, group: PermGroup) -> SymHull {
        let vertex_reps = orbit_transversal(&group, &expanded.vertices(), false);
        let facet_reps = orbit_transversal(&group, &expanded.dual.rays, true);
        SymHull { group, vertex_reps, facet_reps, expanded }
    }

    pub fn facet_rep_inequalities(&self) -> Vec<LinearInequality> {
        self.facet_reps.iter().map(|r| facet_of_ray(r)).collect()
    }
}

/// Diagnostics of one symmetric DD step.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymStepInfo {
    pub negative: usize,
    /// Orbit members of the new vertex that cut the tightened cone.
    pub adjacent: Vec<Vector>,
    /// Lifted facets incident to the new vertex.
    pub incident_facets: Vec<Vector>,
}

/// Face of a pair on the hyperplane of its last normal, with the first
/// coordinate where that normal is nonzero substituted away.
#[derive(Debug, Clone)]
pub struct TightCone {
    pub pair: DdPair,
    /// Eliminated coordinate and the normal used to eliminate it.
    pivot: usize,
    normal: Vector,
}

impl TightCone {
    /// Rewrite a normal of the ambient space over the remaining coordinates.
    pub fn substitute(&self, u: &[Q]) -> Vector {
        let e = self.pivot;
        let f = &u[e] / &self.normal[e];
        (0..u.len())
            .filter(|&j| j != e)
            .map(|j| {
                let mut x = u[j].clone();
                x.sub_mul(&f, &self.normal[j]);
                x
            })
            .collect()
    }

    /// Recover the eliminated coordinate of a reduced ray.
    pub fn lift(&self, y: &[Q]) -> Vector {
        let e = self.pivot;
        let mut full: Vector = Vec::with_capacity(y.len() + 1);
        full.extend(y[..e].iter().cloned());
        full.push(Q::zero());
        full.extend(y[e..].iter().cloned());
        let s = dot(&self.normal, &full);
        full[e] = -(s / &self.normal[e]);
        canonical_ray(&full)
    }
}

/// The face `{y in cone : a·y = 0}` of `pair`, where `a` is the last normal.
/// Its inequalities are the normals whose tight rays on the face span a
/// facet of the face.
pub fn tighten_facet(pair: &DdPair) -> Result<TightCone> {
    let last = pair.normals.len() - 1;
    let a = pair.normals[last].clone();
    let pivot = a.iter().position(|x| !x.is_zero()).ok_or(Error::NotFullDimensional)?;
    let on_face: Vec<usize> = pair.rays_on(last);
    let face_dim = pair.dim - 1;
    let mut tc = TightCone { pair: DdPair { dim: face_dim, normals: vec![], rays: vec![], incidence: vec![] }, pivot, normal: a };
    let mut normals = Vec::new();
    let mut seen_sets: HashSet<Vec<usize>> = HashSet::new();
    for j in 0..last {
        let tight: Vec<usize> = on_face.iter().copied().filter(|&k| pair.incidence[k].contains(j)).collect();
        if tight.len() + 1 < face_dim {
            continue;
        }
        let rows: Vec<Vector> = tight.iter().map(|&k| pair.rays[k].clone()).collect();
        if linalg::rank(&rows) + 1 == face_dim && seen_sets.insert(tight) {
            normals.push(tc.substitute(&pair.normals[j]));
        }
    }
    let rays: Vec<Vector> = on_face.iter().map(|&k| {
        let r = &pair.rays[k];
        (0..r.len()).filter(|&j| j != pivot).map(|j| r[j].clone()).collect()
    }).collect();
    let incidence = rays
        .iter()
        .map(|r: &Vector| {
            let mut s = FixedBitSet::with_capacity(normals.len());
            for (j, n) in normals.iter().enumerate() {
                if dot(n, r).is_zero() {
                    s.insert(j);
                }
            }
            s
        })
        .collect();
    tc.pair = DdPair { dim: face_dim, normals, rays, incidence };
    Ok(tc)
}

/// Add the orbit of `v` to a symmetric hull.
pub fn sym_dd(hull: &SymHull, v: &[Q], opts: &DdOptions) -> Result<(SymHull, SymStepInfo)> {
    let k = hull.expanded.dim;
    if v.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: v.len() });
    }
    let dual = &hull.expanded.dual;
    let a = homogenize_point(v);
    let part = dual.partition(&a);
    if part.negative.is_empty() {
        return Err(Error::VertexInsideHull);
    }
    let (stepped, _) = dd_step(dual, &a, opts)?;
    let mut tight = tighten_facet(&stepped)?;

    let orbit = hull.group.orbit(v);
    let face_rays: Vec<Vector> = stepped.rays_on(stepped.normals.len() - 1).into_iter().map(|i| stepped.rays[i].clone()).collect();
    let mut adjacent: Vec<Vector> = orbit
        .iter()
        .filter(|z| z.as_slice() != v)
        .filter(|z| {
            let u = homogenize_point(z);
            face_rays.iter().any(|r| dot(&u, r).is_negative())
        })
        .cloned()
        .collect();
    adjacent.sort();
    for z in &adjacent {
        let u = tight.substitute(&homogenize_point(z));
        tight.pair = dd_step(&tight.pair, &u, opts)?.0;
    }
    let incident: Vec<Vector> = tight.pair.rays.iter().map(|y| tight.lift(y)).collect();

    // Old facets strictly satisfied by every orbit member survive.
    let mut violated: HashSet<Vector> = HashSet::new();
    for &n in &part.negative {
        violated.extend(hull.group.orbit_shifted(&dual.rays[n]));
    }
    let mut facets: Vec<Vector> = part.positive.iter().map(|&p| dual.rays[p].clone()).filter(|r| !violated.contains(r)).collect();
    facets.extend(incident.iter().cloned());
    let facet_reps = orbit_transversal(&hull.group, &facets, true);

    let mut vertices = hull.expanded.points();
    vertices.extend(orbit);
    let expanded = expand(k, &hull.group, &vertices, &facet_reps);
    let vertex_reps = orbit_transversal(&hull.group, &hull.vertex_reps.iter().chain(std::iter::once(&v.to_vec())).cloned().collect::<Vec<_>>(), false);
    let info = SymStepInfo { negative: part.negative.len(), adjacent, incident_facets: incident };
    Ok((SymHull { group: hull.group.clone(), vertex_reps, facet_reps, expanded }, info))
}

/// Full dual pair from vertices and facet orbit representatives.
fn expand(k: usize, group: &PermGroup, vertices: &[Vector], facet_reps: &[Vector]) -> Hull {
    let normals: Vec<Vector> = vertices.iter().map(|p| homogenize_point(p)).collect();
    let mut rays: Vec<Vector> = facet_reps.iter().flat_map(|r| group.orbit_shifted(r)).collect();
    rays.sort();
    rays.dedup();
    let incidence = rays
        .iter()
        .map(|r| {
            let mut s = FixedBitSet::with_capacity(normals.len());
            for (j, u) in normals.iter().enumerate() {
                if dot(u, r).is_zero() {
                    s.insert(j);
                }
            }
            s
        })
        .collect();
    Hull { dim: k, dual: DdPair { dim: k + 1, normals, rays, incidence } }
}

/// Whether `w` lies in the projection of `parent` onto its first `w.len()` coordinates.
fn in_projection(parent: &HRep, w: &[Q]) -> bool {
    let mut eqs = parent.equalities.clone();
    for (i, x) in w.iter().enumerate() {
        eqs.push(LinearEquality::new(linalg::unit(parent.dim, i), x.clone()));
    }
    let lp = LinearProgram::with_constraints(parent.dim, parent.inequalities.clone(), eqs, linalg::zeros(parent.dim));
    !matches!(lp.solve(), LpOutcome::Infeasible(_))
}

/// Initial inner bound built from whole orbits of extreme points. Each
/// generator image of each initial point is checked to lie in the projection.
pub fn sym_initial_hull(parent: &HRep, k: usize, group: &PermGroup, opts: &DdOptions, stats: &mut ChmStats) -> Result<SymHull> {
    if group.degree() != k {
        return Err(Error::DimensionMismatch { expected: k, found: group.degree() });
    }
    let mut points: Vec<Vector> = Vec::new();
    let mut seen: HashSet<Vector> = HashSet::new();
    let mut found: Vec<Vector> = Vec::new();
    while points.is_empty() || affine_rank(&points) < k {
        let h = if points.is_empty() { linalg::unit(k, 0) } else { hyperplane(&points, k).ok_or(Error::ProjectionNotFullDimensional)? };
        let level = points.first().map(|p| dot(&h, p));
        let (mut p, value) = extreme_point(parent, k, &h)?;
        stats.initial_lps += 1;
        let off = level.as_ref().map_or(true, |l| value < *l);
        if !off {
            let (q, value) = extreme_point(parent, k, &linalg::neg(&h))?;
            stats.initial_lps += 1;
            if -value <= *level.as_ref().expect("set above") {
                return Err(Error::ProjectionNotFullDimensional);
            }
            p = q;
        }
        stats.discovering_lps += 1;
        found.push(p.clone());
        for q in group.orbit(&p) {
            if seen.insert(q.clone()) {
                points.push(q);
            }
        }
    }
    for p in &points {
        for g in group.generators() {
            let w = g.act(p);
            stats.validation_lps += 1;
            if !in_projection(parent, &w) {
                return Err(Error::GroupDoesNotStabilize);
            }
        }
    }
    let hull = hull_of_points(&points, k, opts, stats)?;
    Ok(SymHull::from_hull(hull, group.clone()))
}

/// Symmetry of the parent used to shrink terminal-facet LPs.
#[derive(Debug, Clone)]
pub struct ParentSymmetry {
    /// The parent in coordinates on which `group` acts by permutation.
    pub system: HRep,
    pub group: PermGroup,
    /// `coords[i]` is the coordinate of `system` holding projected coordinate `i`.
    pub coords: Vec<usize>,
}

/// Decide `min_{x in P} c·x ≥ offset` on the fixed subspace of the stabilizer of `c`.
pub fn reduced_terminal_check(sym: &ParentSymmetry, normal: &[Q], offset: &Q) -> Result<bool> {
    let mut c = linalg::zeros(sym.system.dim);
    for (i, &j) in sym.coords.iter().enumerate() {
        c[j] = normal[i].clone();
    }
    let stab = sym.group.subgroup_where(|g| g.act(&c) == c)?;
    let (reduced, emb) = fix_subspace(&sym.system, &stab)?;
    let objective = emb.restrict(&LinearInequality::new(c, Q::zero()));
    let lp = LinearProgram::with_constraints(reduced.dim, reduced.inequalities, vec![], objective.normal);
    match lp.solve() {
        // c·x = c·offset + (c M)·y, and the restricted offset is -c·offset.
        LpOutcome::Optimal(s) => Ok(s.value - &objective.offset >= *offset),
        LpOutcome::Unbounded { .. } => Err(Error::UnboundedParent),
        LpOutcome::Infeasible(_) => Err(Error::Infeasible),
    }
}

#[derive(Debug, Clone)]
pub struct SymProjection {
    pub hull: SymHull,
    pub stats: ChmStats,
    pub step_info: Vec<SymStepInfo>,
}

impl SymProjection {
    pub fn vertex_reps(&self) -> &[Vector] {
        &self.hull.vertex_reps
    }

    pub fn facet_reps(&self) -> Vec<LinearInequality> {
        self.hull.facet_rep_inequalities()
    }

    pub fn vertices(&self) -> Vec<Vector> {
        self.hull.expanded.vertices()
    }

    pub fn facets(&self) -> Vec<LinearInequality> {
        self.hull.expanded.facets()
    }
}

/// Symmetric projection onto the first `k` coordinates. `group` acts on those
/// coordinates and must map the projection to itself.
pub fn sym_chm_project(
    parent: &HRep,
    k: usize,
    group: &PermGroup,
    parent_symmetry: Option<&ParentSymmetry>,
    opts: &ChmOptions,
) -> Result<SymProjection> {
    let mut stats = ChmStats::default();
    let mut hull = sym_initial_hull(parent, k, group, &opts.dd, &mut stats)?;
    let mut queue: VecDeque<Vector> = hull.facet_reps.clone().into();
    let mut terminal: HashSet<Vector> = HashSet::new();
    let mut step_info = Vec::new();
    while let Some(rep) = queue.pop_front() {
        if terminal.contains(&rep) || !hull.facet_reps.contains(&rep) {
            continue;
        }
        let facet = facet_of_ray(&rep);
        if let Some(sym) = parent_symmetry {
            stats.reduced_lps += 1;
            if reduced_terminal_check(sym, &facet.normal, &facet.offset)? {
                stats.terminal_lps += 1;
                terminal.insert(rep);
                continue;
            }
        }
        let (v, value) = extreme_point(parent, k, &facet.normal)?;
        if value >= facet.offset {
            stats.terminal_lps += 1;
            terminal.insert(rep);
            continue;
        }
        stats.discovering_lps += 1;
        let before: HashSet<Vector> = hull.facet_reps.iter().cloned().collect();
        let (next, info) = sym_dd(&hull, &v, &opts.dd)?;
        stats.dd_steps += 1 + info.adjacent.len();
        hull = next;
        step_info.push(info);
        queue.extend(hull.facet_reps.iter().filter(|r| !before.contains(*r)).cloned());
        log::debug!(
            "symchm: {} vertex orbits, {} facet orbits, queue {}",
            hull.vertex_reps.len(),
            hull.facet_reps.len(),
            queue.len()
        );
    }
    Ok(SymProjection { hull, stats, step_info })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ints;

    #[test]
    fn cube_sym_dd_step() {
        let s3 = PermGroup::symmetric(3);
        let simplex = vec![ints(&[0, 0, 0]), ints(&[1, 0, 0])];
        let hull = SymHull::from_points(&simplex, &s3, &DdOptions::default()).unwrap();
        assert_eq!(hull.facet_reps.len(), 2);
        let (next, info) = sym_dd(&hull, &ints(&[1, 0, 1]), &DdOptions::default()).unwrap();
        assert_eq!(info.adjacent, vec![ints(&[0, 1, 1]), ints(&[1, 1, 0])]);
        let mut facets = next.expanded.facets();
        facets.sort();
        let mut expected: Vec<LinearInequality> = Vec::new();
        for i in 0..3 {
            expected.push(LinearInequality::new(linalg::unit(3, i), Q::zero()));
            expected.push(LinearInequality::new(linalg::neg(&linalg::unit(3, i)), -Q::one()));
        }
        expected.push(LinearInequality::new(ints(&[-1, -1, -1]), Q::from_int(-2)));
        expected.sort();
        assert_eq!(facets, expected);
    }
}
