//! Double description method on pointed polyhedral cones.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::linalg::{self, dot, Vector};
use crate::polyhedra::{canonical_ray, HRep, LinearInequality, VRep};
use crate::rational::Q;

pub type Incidence = FixedBitSet;

/// A pointed cone `{x : a·x ≥ 0 for every normal a}` together with its extreme
/// rays. `incidence[k]` holds the indices of the normals tight at `rays[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DdPair {
    pub dim: usize,
    pub normals: Vec<Vector>,
    pub rays: Vec<Vector>,
    pub incidence: Vec<Incidence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepStats {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    pub created: usize,
}

/// Partition of the rays of a pair by the sign of a new inequality.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RayPartition {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
    pub zero: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DdOptions {
    pub ray_cap: Option<usize>,
    pub threads: usize,
}

impl Default for DdOptions {
    fn default() -> DdOptions {
        DdOptions { ray_cap: None, threads: 1 }
    }
}

impl DdPair {
    pub fn h(&self) -> HRep {
        HRep {
            dim: self.dim,
            inequalities: self.normals.iter().map(|n| LinearInequality::homogeneous(n.clone())).collect(),
            equalities: Vec::new(),
        }
    }

    pub fn v(&self) -> VRep {
        VRep { dim: self.dim, vertices: Vec::new(), rays: self.rays.clone() }
    }

    pub fn partition(&self, a: &[Q]) -> RayPartition {
        let mut part = RayPartition::default();
        for (k, r) in self.rays.iter().enumerate() {
            match dot(a, r).signum() {
                1 => part.positive.push(k),
                -1 => part.negative.push(k),
                _ => part.zero.push(k),
            }
        }
        part
    }

    /// Rays tight at normal `j`.
    pub fn rays_on(&self, j: usize) -> Vec<usize> {
        (0..self.rays.len()).filter(|&k| self.incidence[k].contains(j)).collect()
    }

    /// Sorted canonical rays, for order-independent comparison.
    pub fn sorted_rays(&self) -> Vec<Vector> {
        let mut v = self.rays.clone();
        v.sort();
        v
    }
}

fn inverted_index(pair: &DdPair) -> Vec<Vec<usize>> {
    let mut idx = vec![Vec::new(); pair.normals.len()];
    for (k, inc) in pair.incidence.iter().enumerate() {
        for j in inc.ones() {
            idx[j].push(k);
        }
    }
    idx
}

/// Combinatorial adjacency: the rays `p` and `n` are adjacent iff their common
/// tight set is large enough and no third ray is tight on all of it.
pub fn adjacency_test(pair: &DdPair, p: usize, n: usize) -> bool {
    let index = inverted_index(pair);
    adjacent(pair, &index, p, n)
}

fn adjacent(pair: &DdPair, index: &[Vec<usize>], p: usize, n: usize) -> bool {
    let (ip, inn) = (&pair.incidence[p], &pair.incidence[n]);
    if ip.intersection_count(inn) + 2 < pair.dim {
        return false;
    }
    let mut common = ip.clone();
    common.intersect_with(inn);
    let candidates: &[usize] = match common.ones().min_by_key(|&j| index[j].len()) {
        Some(j) => &index[j],
        None => {
            // Nothing is tight on both; every other ray is a superset.
            return pair.rays.len() == 2;
        }
    };
    !candidates.iter().any(|&r| r != p && r != n && common.is_subset(&pair.incidence[r]))
}

/// Intersect the cone of `pair` with `a·x ≥ 0`.
pub fn dd_step(pair: &DdPair, a: &[Q], opts: &DdOptions) -> Result<(DdPair, StepStats)> {
    if a.len() != pair.dim {
        return Err(Error::DimensionMismatch { expected: pair.dim, found: a.len() });
    }
    let new_idx = pair.normals.len();
    let width = new_idx + 1;
    let values: Vec<Q> = pair.rays.iter().map(|r| dot(a, r)).collect();
    let part = {
        let mut part = RayPartition::default();
        for (k, v) in values.iter().enumerate() {
            match v.signum() {
                1 => part.positive.push(k),
                -1 => part.negative.push(k),
                _ => part.zero.push(k),
            }
        }
        part
    };
    let index = inverted_index(pair);
    let pairs: Vec<(usize, usize)> =
        part.positive.iter().flat_map(|&p| part.negative.iter().map(move |&n| (p, n))).collect();
    let check = |&(p, n): &(usize, usize)| -> Option<(Vector, Incidence)> {
        if !adjacent(pair, &index, p, n) {
            return None;
        }
        let ray = canonical_ray(&linalg::combine(&values[p], &pair.rays[n], &-&values[n], &pair.rays[p]));
        let mut inc = pair.incidence[p].clone();
        inc.intersect_with(&pair.incidence[n]);
        inc.grow(width);
        inc.insert(new_idx);
        Some((ray, inc))
    };
    let created: Vec<(Vector, Incidence)> = if opts.threads > 1 && pairs.len() > 256 {
        parallel_filter(&pairs, opts.threads, &check)
    } else {
        pairs.iter().filter_map(check).collect()
    };
    let total = part.positive.len() + part.zero.len() + created.len();
    if let Some(cap) = opts.ray_cap {
        if total > cap {
            return Err(Error::RayCapExceeded(cap));
        }
    }
    let mut normals = pair.normals.clone();
    normals.push(a.to_vec());
    let mut rays = Vec::with_capacity(total);
    let mut incidence = Vec::with_capacity(total);
    for (k, v) in values.iter().enumerate() {
        if v.is_negative() {
            continue;
        }
        let mut inc = pair.incidence[k].clone();
        inc.grow(width);
        if v.is_zero() {
            inc.insert(new_idx);
        }
        rays.push(pair.rays[k].clone());
        incidence.push(inc);
    }
    let stats = StepStats {
        positive: part.positive.len(),
        negative: part.negative.len(),
        zero: part.zero.len(),
        created: created.len(),
    };
    for (r, inc) in created {
        rays.push(r);
        incidence.push(inc);
    }
    Ok((DdPair { dim: pair.dim, normals, rays, incidence }, stats))
}

fn parallel_filter<F>(pairs: &[(usize, usize)], threads: usize, check: &F) -> Vec<(Vector, Incidence)>
where
    F: Fn(&(usize, usize)) -> Option<(Vector, Incidence)> + Sync,
{
    let chunk = pairs.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = pairs
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().filter_map(check).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Simplicial cone `{x : B x ≥ 0}` for an invertible `B`: its rays are the
/// columns of `B^{-1}`.
pub fn simplicial_pair(rows: Vec<Vector>) -> Result<DdPair> {
    let d = rows.len();
    let inv = linalg::inverse(&rows).ok_or(Error::NotPointed)?;
    let cols = linalg::transpose(&inv, d);
    let rays = cols.iter().map(|c| canonical_ray(c)).collect();
    let incidence = (0..d)
        .map(|k| {
            let mut s = FixedBitSet::with_capacity(d);
            s.insert_range(..);
            s.set(k, false);
            s
        })
        .collect();
    Ok(DdPair { dim: d, normals: rows, rays, incidence })
}

/// Canonical, deduplicated, sorted normals.
fn prepare_normals(normals: &[Vector]) -> Vec<Vector> {
    let mut seen = HashSet::new();
    let mut out: Vec<Vector> = normals
        .iter()
        .filter(|n| !linalg::is_zero_vec(n))
        .map(|n| canonical_ray(n))
        .filter(|n| seen.insert(n.clone()))
        .collect();
    out.sort();
    out
}

/// Extreme rays of the full-dimensional pointed cone `{x : a·x ≥ 0}`.
///
/// The returned pair lists the canonical normals with the initial simplex rows first,
/// then the rest in sorted order.
pub fn cone_h_to_v(dim: usize, normals: &[Vector], opts: &DdOptions) -> Result<DdPair> {
    for n in normals {
        if n.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: n.len() });
        }
    }
    let rows = prepare_normals(normals);
    let basis = linalg::independent_rows(&rows, dim);
    if basis.len() < dim {
        return Err(Error::NotPointed);
    }
    let mut pair = simplicial_pair(basis.iter().map(|&i| rows[i].clone()).collect())?;
    let chosen: HashSet<usize> = basis.into_iter().collect();
    for (i, row) in rows.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        pair = dd_step(&pair, row, opts)?.0;
        log::trace!("dd step {}: {} rays", pair.normals.len(), pair.rays.len());
    }
    if linalg::rank(&pair.rays) < dim {
        return Err(Error::NotFullDimensional);
    }
    Ok(pair)
}

/// Facets of the full-dimensional pointed cone generated by `rays`. The
/// returned pair keeps only the extreme input rays.
pub fn cone_v_to_h(dim: usize, rays: &[Vector], opts: &DdOptions) -> Result<DdPair> {
    let dual = match cone_h_to_v(dim, rays, opts) {
        Ok(d) => d,
        Err(Error::NotPointed) => return Err(Error::NotFullDimensional),
        Err(Error::NotFullDimensional) => return Err(Error::NotPointed),
        Err(e) => return Err(e),
    };
    let facets = dual.rays.clone();
    let nf = facets.len();
    let mut out_rays = Vec::new();
    let mut incidence = Vec::new();
    for (j, r) in dual.normals.iter().enumerate() {
        let mut inc = FixedBitSet::with_capacity(nf);
        for (k, dinc) in dual.incidence.iter().enumerate() {
            if dinc.contains(j) {
                inc.insert(k);
            }
        }
        let tight: Vec<Vector> = inc.ones().map(|k| facets[k].clone()).collect();
        if linalg::rank(&tight) + 1 == dim {
            out_rays.push(r.clone());
            incidence.push(inc);
        }
    }
    Ok(DdPair { dim, normals: facets, rays: out_rays, incidence })
}

/// Swap the roles of normals and rays: the dual cone `{y : y·r ≥ 0}`.
pub fn polar_swap(pair: &DdPair) -> DdPair {
    let nr = pair.rays.len();
    let mut incidence = vec![FixedBitSet::with_capacity(nr); pair.normals.len()];
    for (k, inc) in pair.incidence.iter().enumerate() {
        for j in inc.ones() {
            incidence[j].insert(k);
        }
    }
    DdPair { dim: pair.dim, normals: pair.rays.clone(), rays: pair.normals.clone(), incidence }
}

/// Check that every ray lies in the cone, the incidence sets are exact and every
/// ray is extreme.
pub fn verify_dd_pair(pair: &DdPair) -> bool {
    for (r, inc) in pair.rays.iter().zip(&pair.incidence) {
        let mut tight = Vec::new();
        for (j, a) in pair.normals.iter().enumerate() {
            let v = dot(a, r);
            if v.is_negative() || v.is_zero() != inc.contains(j) {
                return false;
            }
            if v.is_zero() {
                tight.push(a.clone());
            }
        }
        if linalg::rank(&tight) + 1 != pair.dim {
            return false;
        }
    }
    true
}

/// Number of faces by dimension `1..=dim` of the cone of a pair (the apex is
/// not counted). Faces are the closed intersections of facet ray sets.
pub fn face_counts(pair: &DdPair) -> Vec<usize> {
    let nr = pair.rays.len();
    let mut facet_sets: Vec<FixedBitSet> = (0..pair.normals.len())
        .map(|j| {
            let mut s = FixedBitSet::with_capacity(nr);
            for k in pair.rays_on(j) {
                s.insert(k);
            }
            s
        })
        .collect();
    facet_sets.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
    facet_sets.dedup();
    let mut full = FixedBitSet::with_capacity(nr);
    full.insert_range(..);
    let mut counts = vec![0usize; pair.dim + 1];
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    seen.insert(full.clone());
    let mut level = vec![full];
    let mut dim = pair.dim;
    while !level.is_empty() && dim > 0 {
        counts[dim] = level.len();
        let mut next = Vec::new();
        for face in &level {
            let mut children: Vec<FixedBitSet> = Vec::new();
            for f in &facet_sets {
                if face.is_subset(f) {
                    continue;
                }
                let mut c = face.clone();
                c.intersect_with(f);
                if !children.contains(&c) {
                    children.push(c);
                }
            }
            for (i, c) in children.iter().enumerate() {
                let maximal = !children.iter().enumerate().any(|(j, o)| j != i && c.is_subset(o) && c != o);
                if maximal && c.count_ones(..) > 0 && seen.insert(c.clone()) {
                    next.push(c.clone());
                }
            }
        }
        level = next;
        dim -= 1;
    }
    counts.remove(0);
    counts
}

/// Brute-force extreme rays: every `(dim-1)`-subset of normals of full rank
/// spans a line; keep the directions lying in the cone. Exponential; meant as
/// a test oracle for small inputs.
pub fn brute_force_rays(dim: usize, normals: &[Vector]) -> Vec<Vector> {
    fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            subsets(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    subsets(normals.len(), dim - 1, 0, &mut Vec::new(), &mut all);
    let mut found = HashSet::new();
    for s in all {
        let rows: Vec<Vector> = s.iter().map(|&i| normals[i].clone()).collect();
        if linalg::rank(&rows) + 1 != dim {
            continue;
        }
        let ns = linalg::nullspace(&rows, dim);
        for cand in [ns[0].clone(), linalg::neg(&ns[0])] {
            if normals.iter().all(|a| !dot(a, &cand).is_negative()) {
                found.insert(canonical_ray(&cand));
            }
        }
    }
    let mut v: Vec<Vector> = found.into_iter().collect();
    v.sort();
    v
}
