//! LP bounds over the Shannon outer bound: weighted sum rate, secret sharing
//! information ratio, and guessing numbers of digraphs.
//!
//! Each bound is solved twice, over the full constraint system and over the
//! subspace fixed by the problem's symmetry group, and the two optima must agree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::entropy::{shannon_outer_bound, EntropyIndex, VarSet};
use super::problem::NetworkProblem;
use crate::error::{Error, Result};
use crate::groups::{fix_subspace, induced_subset_permutation, PermGroup, Permutation};
use crate::linalg::{self, dot, Vector};
use crate::lp::{LinearProgram, LpOutcome};
use crate::polyhedra::{eliminate_equalities, Embedding, HRep, LinearEquality, LinearInequality};
use crate::rational::Q;

/// Optimum of a symmetric LP with the dimensions before and after restricting
/// to the fixed subspace (both counted after equality elimination).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpBound {
    pub value: Q,
    pub original_dim: usize,
    pub reduced_dim: usize,
    pub group_order: usize,
    /// Generators in cycle notation over the problem's variables.
    pub generators: Vec<String>,
}

struct SymmetricSolve {
    /// `None` when infeasible.
    value: Option<Q>,
    original_dim: usize,
    reduced_dim: usize,
}

fn objective_on(emb: &Embedding, objective: &[Q]) -> (Vector, Q) {
    let reduced = (0..emb.reduced_dim())
        .map(|j| objective.iter().zip(&emb.map).map(|(c, row)| c * &row[j]).sum())
        .collect();
    (reduced, dot(objective, &emb.offset))
}

fn minimize(h: &HRep, objective: Vector) -> Result<Option<Q>> {
    let lp = LinearProgram::with_constraints(h.dim, h.inequalities.clone(), h.equalities.clone(), objective);
    match lp.solve() {
        LpOutcome::Optimal(s) => Ok(Some(s.value)),
        LpOutcome::Infeasible(_) => Ok(None),
        LpOutcome::Unbounded { .. } => Err(Error::UnboundedObjective),
    }
}

/// Minimum of `objective` over `system`, over the full space and over the fixed
/// subspace of `group`. `auxiliary` trailing coordinates are left out of the
/// reported dimensions.
fn symmetric_minimum(system: &HRep, objective: &[Q], group: &PermGroup, auxiliary: usize) -> Result<SymmetricSolve> {
    let (full, _) = eliminate_equalities(system, &[])?;
    let (reduced, emb) = fix_subspace(system, group)?;
    let unreduced = minimize(system, objective.to_vec())?;
    let (c, shift) = objective_on(&emb, objective);
    let restricted = minimize(&reduced, c)?.map(|v| v + shift);
    if unreduced != restricted {
        return Err(Error::CertificateFailed(format!(
            "fixed-subspace optimum {restricted:?} differs from full optimum {unreduced:?}"
        )));
    }
    log::info!("Original LP dimension...{}", full.dim - auxiliary);
    log::info!("LP dimension after considering symmetries...{}", reduced.dim - auxiliary);
    Ok(SymmetricSolve { value: unreduced, original_dim: full.dim - auxiliary, reduced_dim: reduced.dim - auxiliary })
}

fn bound(solve: SymmetricSolve, value: Q, vars: &PermGroup) -> Result<LpBound> {
    Ok(LpBound {
        value,
        original_dim: solve.original_dim,
        reduced_dim: solve.reduced_dim,
        group_order: vars.order()?,
        generators: vars.generators().iter().map(Permutation::cycles).collect(),
    })
}

/// Acting on entropy coordinates with `extra` trailing coordinates fixed.
fn subset_group(vars: &PermGroup, extra: usize) -> Result<PermGroup> {
    let dim = (1 << vars.degree()) - 1 + extra;
    let gens = vars.generators().iter().map(|g| induced_subset_permutation(g).extend(dim)).collect();
    PermGroup::new(dim, gens)
}

/// Shannon cone over `n` variables with `extra` zero-padded trailing coordinates.
fn padded_shannon(n: usize, extra: usize) -> Result<HRep> {
    let mut h = shannon_outer_bound(n)?;
    for row in &mut h.inequalities {
        row.normal.resize(h.dim + extra, Q::zero());
    }
    h.dim += extra;
    Ok(h)
}

/// `t - h_i ≥ 0` for every listed variable `i`.
fn max_entropy_rows(idx: &EntropyIndex, vars: &[usize], t: usize) -> Vec<LinearInequality> {
    vars.iter()
        .map(|&v| {
            let mut n = linalg::zeros(t + 1);
            n[t] = Q::one();
            n[idx.coord(VarSet::single(v))] = -Q::one();
            LinearInequality::homogeneous(n)
        })
        .collect()
}

fn entropy_equality(idx: &EntropyIndex, dim: usize, terms: &[(VarSet, i64)], rhs: Q) -> LinearEquality {
    let mut n = linalg::zeros(dim);
    for &(s, w) in terms {
        if !s.is_empty() {
            n[idx.coord(s)] += Q::from_int(w);
        }
    }
    LinearEquality::new(n, rhs)
}

/// Maximum of `Σ λ_s ω_s` over the outer bound with each edge rate pinned to
/// its capacity. Uses the subgroup of the network symmetry group fixing the
/// weight and capacity vector.
pub fn sum_rate_upper_bound(p: &NetworkProblem, weights: &[Q], capacities: &[Q], extra: &[LinearInequality]) -> Result<LpBound> {
    let edges = p.edge_ids();
    if weights.len() != p.sources {
        return Err(Error::DimensionMismatch { expected: p.sources, found: weights.len() });
    }
    if capacities.len() != edges.len() {
        return Err(Error::DimensionMismatch { expected: edges.len(), found: capacities.len() });
    }
    if capacities.iter().any(Q::is_negative) {
        return Err(Error::InvalidProblem("negative edge capacity".into()));
    }
    let (mut system, layout) = p.outer_bound(extra)?;
    for (&e, r) in edges.iter().zip(capacities) {
        system.equalities.push(LinearEquality::new(linalg::unit(layout.dim(), layout.rate(e)), r.clone()));
    }
    // Entry for variable v (1-based) of the combined weight/capacity vector.
    let delta = |v: usize| if v <= p.sources { &weights[v - 1] } else { &capacities[edges.iter().position(|&e| e == v).expect("edge")] };
    let nsg = p.network_symmetry_group(extra)?;
    let stab = nsg.subgroup_where(|g| (1..=p.vars()).all(|v| delta(g.image(v - 1) + 1) == delta(v)))?;
    let parent_group = PermGroup::new(layout.dim(), stab.generators().iter().map(|g| layout.action(g)).collect())?;
    let mut objective = linalg::zeros(layout.dim());
    for (s, w) in weights.iter().enumerate() {
        objective[layout.index.coord(VarSet::single(s + 1))] = -w;
    }
    let solve = symmetric_minimum(&system, &objective, &parent_group, 0)?;
    let value = -solve.value.clone().ok_or(Error::Infeasible)?;
    bound(solve, value, &stab)
}

/// Access structure on `vars` variables: the dealer is variable 1, parties are `2..=vars`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessStructure {
    pub vars: usize,
    pub authorized: Vec<Vec<usize>>,
}

impl AccessStructure {
    pub fn new(authorized: Vec<Vec<usize>>, vars: usize) -> Result<AccessStructure> {
        let a = AccessStructure { vars, authorized };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidAccessStructure(m));
        if self.vars < 2 {
            return bad("need a dealer and at least one party".into());
        }
        for set in &self.authorized {
            if set.is_empty() {
                return bad("empty authorized set".into());
            }
            if let Some(v) = set.iter().find(|&&v| v < 2 || v > self.vars) {
                return bad(format!("authorized set member {v} is not a party"));
            }
        }
        Ok(())
    }

    fn parties(&self) -> Vec<usize> {
        (2..=self.vars).collect()
    }

    /// Minimal members of the monotone closure.
    pub fn minimal_sets(&self) -> Vec<VarSet> {
        let sets: Vec<VarSet> = self.authorized.iter().map(|s| VarSet::of(s)).collect();
        let mut min: Vec<VarSet> =
            sets.iter().copied().filter(|s| !sets.iter().any(|o| o != s && o.is_subset(*s))).collect();
        min.sort();
        min.dedup();
        min
    }

    pub fn is_authorized(&self, set: VarSet) -> bool {
        self.minimal_sets().iter().any(|m| m.is_subset(set))
    }

    /// Party permutations (dealer fixed) mapping the access structure onto itself.
    pub fn symmetry_group(&self) -> Result<PermGroup> {
        let min = self.minimal_sets();
        let image = |g: &Permutation, s: VarSet| VarSet::of(&s.members().iter().map(|&v| g.image(v - 1) + 1).collect::<Vec<_>>());
        PermGroup::symmetric(self.vars).subgroup_where(|g| {
            g.image(0) == 0 && min.iter().all(|&s| min.contains(&image(g, s)))
        })
    }
}

/// Lower bound on the worst-case information ratio: minimize `t` subject to
/// the Shannon cone, `H(S|A) = 0` for minimal authorized `A`, `I(S;A) = 0` for
/// every nonempty unauthorized `A`, `H(S) = 1`, and `H(X_i) ≤ t` per party.
pub fn secret_sharing_info_ratio_lb(access: &AccessStructure, extra: &[LinearInequality]) -> Result<LpBound> {
    access.validate()?;
    let n = access.vars;
    let idx = EntropyIndex::new(n)?;
    let t = idx.dim();
    let mut system = padded_shannon(n, 1)?;
    system.inequalities.extend(pad_extra(extra, t + 1)?);
    let dealer = VarSet::single(1);
    for a in access.minimal_sets() {
        system.equalities.push(entropy_equality(&idx, t + 1, &[(a.union(dealer), 1), (a, -1)], Q::zero()));
    }
    let parties = access.parties();
    for mask in 1u32..(1 << parties.len()) {
        let members: Vec<usize> = parties.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &v)| v).collect();
        let a = VarSet::of(&members);
        if !access.is_authorized(a) {
            system.equalities.push(entropy_equality(&idx, t + 1, &[(a.union(dealer), 1), (a, -1), (dealer, -1)], Q::zero()));
        }
    }
    system.equalities.push(entropy_equality(&idx, t + 1, &[(dealer, 1)], Q::one()));
    system.inequalities.extend(max_entropy_rows(&idx, &parties, t));
    let group = access.symmetry_group()?;
    let solve = symmetric_minimum(&system, &linalg::unit(t + 1, t), &subset_group(&group, 1)?, 1)?;
    let value = solve.value.clone().ok_or(Error::Infeasible)?;
    bound(solve, value, &group)
}

/// Digraph on vertices `1..=vertices` given by in-neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    pub vertices: usize,
    #[serde(default)]
    pub in_neighbours: BTreeMap<usize, Vec<usize>>,
}

impl Digraph {
    pub fn new(vertices: usize, in_neighbours: BTreeMap<usize, Vec<usize>>) -> Result<Digraph> {
        let d = Digraph { vertices, in_neighbours };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDigraph(m));
        if self.vertices == 0 {
            return bad("no vertices".into());
        }
        for (&v, ins) in &self.in_neighbours {
            if v == 0 || v > self.vertices {
                return bad(format!("unknown vertex {v}"));
            }
            if ins.iter().any(|&u| u == 0 || u > self.vertices) {
                return bad(format!("unknown in-neighbour of {v}"));
            }
            if ins.contains(&v) {
                return bad(format!("self-loop at {v}"));
            }
        }
        Ok(())
    }

    pub fn in_set(&self, v: usize) -> VarSet {
        self.in_neighbours.get(&v).map_or(VarSet(0), |ins| VarSet::of(ins))
    }

    /// Vertex permutations `g` with `In(g(v)) = g(In(v))`.
    pub fn automorphism_group(&self) -> Result<PermGroup> {
        let image = |g: &Permutation, s: VarSet| VarSet::of(&s.members().iter().map(|&v| g.image(v - 1) + 1).collect::<Vec<_>>());
        PermGroup::symmetric(self.vertices)
            .subgroup_where(|g| (1..=self.vertices).all(|v| self.in_set(g.image(v - 1) + 1) == image(g, self.in_set(v))))
    }
}

/// Upper bound on the guessing number: the largest `H(X_V) / max_i H(X_i)`
/// subject to the Shannon cone and `H(X_v | X_In(v)) = 0`, computed as `1/t`
/// for the least `t` with `H(X_V) = 1` and `H(X_i) ≤ t`. Zero when the decoding
/// equalities force every entropy to vanish.
pub fn guessing_number_ub(graph: &Digraph, extra: &[LinearInequality]) -> Result<LpBound> {
    graph.validate()?;
    let n = graph.vertices;
    let idx = EntropyIndex::new(n)?;
    let t = idx.dim();
    let mut system = padded_shannon(n, 1)?;
    system.inequalities.extend(pad_extra(extra, t + 1)?);
    for v in 1..=n {
        let ins = graph.in_set(v);
        system.equalities.push(entropy_equality(&idx, t + 1, &[(ins.union(VarSet::single(v)), 1), (ins, -1)], Q::zero()));
    }
    system.equalities.push(entropy_equality(&idx, t + 1, &[(idx.full(), 1)], Q::one()));
    system.inequalities.extend(max_entropy_rows(&idx, &(1..=n).collect::<Vec<_>>(), t));
    let group = graph.automorphism_group()?;
    let solve = symmetric_minimum(&system, &linalg::unit(t + 1, t), &subset_group(&group, 1)?, 1)?;
    let value = solve.value.as_ref().map_or(Q::zero(), Q::recip);
    bound(solve, value, &group)
}

fn pad_extra(extra: &[LinearInequality], dim: usize) -> Result<Vec<LinearInequality>> {
    extra
        .iter()
        .map(|x| {
            if x.dim() >= dim {
                return Err(Error::DimensionMismatch { expected: dim - 1, found: x.dim() });
            }
            let mut normal = x.normal.clone();
            normal.resize(dim, Q::zero());
            Ok(LinearInequality::new(normal, x.offset.clone()))
        })
        .collect()
}
