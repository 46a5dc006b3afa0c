//! Multi-source network coding problems and their entropy-space constraints.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::entropy::{shannon_outer_bound, EntropyIndex, VarSet};
use crate::error::{Error, Result};
use crate::groups::{induced_subset_permutation, PermGroup, Permutation};
use crate::linalg::{self, Vector};
use crate::polyhedra::{HRep, LinearEquality, LinearInequality};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub inputs: Vec<usize>,
    /// Edges sharing a node label leave the same coding node and get a single
    /// encoding equality; unlabeled edges are their own node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sink {
    pub has: Vec<usize>,
    pub wants: Vec<usize>,
}

/// Sources are variables `1..=sources`; edges carry the remaining ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkProblem {
    pub sources: usize,
    pub edges: Vec<Edge>,
    pub sinks: Vec<Sink>,
    #[serde(default)]
    pub rate_ties: Vec<Vec<usize>>,
}

impl NetworkProblem {
    pub fn from_json(text: &str) -> Result<NetworkProblem> {
        let p: NetworkProblem = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn vars(&self) -> usize {
        self.sources + self.edges.len()
    }

    pub fn edge_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.edges.iter().map(|e| e.id).collect();
        ids.sort_unstable();
        ids
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProblem(m));
        if self.sources == 0 {
            return bad("at least one source is required".into());
        }
        let n = self.vars();
        if n > 12 {
            return bad(format!("{n} variables is beyond the supported size"));
        }
        let ids: BTreeSet<usize> = self.edges.iter().map(|e| e.id).collect();
        let expected: BTreeSet<usize> = (self.sources + 1..=n).collect();
        if ids != expected || ids.len() != self.edges.len() {
            return bad(format!("edge ids must be exactly {}..={n}", self.sources + 1));
        }
        let in_range = |v: usize| v >= 1 && v <= n;
        for e in &self.edges {
            if e.inputs.is_empty() {
                return bad(format!("edge {} has no inputs", e.id));
            }
            if let Some(&v) = e.inputs.iter().find(|&&v| !in_range(v) || v == e.id) {
                return bad(format!("edge {} has invalid input {v}", e.id));
            }
        }
        if self.sinks.is_empty() {
            return bad("at least one sink is required".into());
        }
        for s in &self.sinks {
            if let Some(&v) = s.has.iter().find(|&&v| !in_range(v)) {
                return bad(format!("sink input {v} out of range"));
            }
            if s.wants.is_empty() || s.wants.iter().any(|&v| v == 0 || v > self.sources) {
                return bad("sinks must want at least one existing source".into());
            }
        }
        for e in &self.edges {
            if let Some(label) = e.node {
                let mut a: Vec<usize> = e.inputs.clone();
                a.sort_unstable();
                for f in self.edges.iter().filter(|f| f.node == Some(label)) {
                    let mut b = f.inputs.clone();
                    b.sort_unstable();
                    if a != b {
                        return bad(format!("edges {} and {} share node {label} but not inputs", e.id, f.id));
                    }
                }
            }
        }
        for tie in &self.rate_ties {
            if tie.iter().any(|v| !ids.contains(v)) {
                return bad(format!("rate tie {tie:?} names a non-edge"));
            }
        }
        Ok(())
    }

    /// Coordinates: the entropy vector, then one rate per edge in id order.
    pub fn layout(&self) -> Result<Layout> {
        Layout::new(self)
    }

    /// Source independence, edge encoding, sink decoding and rate ties.
    pub fn equalities(&self, layout: &Layout) -> Vec<LinearEquality> {
        let idx = &layout.index;
        let d = layout.dim();
        let entropy = |v: &Vector| {
            let mut x = v.clone();
            x.resize(d, Q::zero());
            x
        };
        let mut eqs = Vec::new();
        if self.sources > 1 {
            let mut v = linalg::zeros(idx.dim());
            for s in 1..=self.sources {
                v[idx.coord(VarSet::single(s))] += Q::one();
            }
            v[idx.coord(VarSet::of(&(1..=self.sources).collect::<Vec<_>>()))] -= Q::one();
            eqs.push(LinearEquality::new(entropy(&v), Q::zero()));
        }
        for (outputs, inputs) in self.nodes() {
            let mut v = linalg::zeros(idx.dim());
            idx.add_conditional(&mut v, outputs, inputs, 1);
            if !linalg::is_zero_vec(&v) {
                eqs.push(LinearEquality::new(entropy(&v), Q::zero()));
            }
        }
        for s in &self.sinks {
            let mut v = linalg::zeros(idx.dim());
            idx.add_conditional(&mut v, VarSet::of(&s.wants), VarSet::of(&s.has), 1);
            if !linalg::is_zero_vec(&v) {
                eqs.push(LinearEquality::new(entropy(&v), Q::zero()));
            }
        }
        for tie in &self.rate_ties {
            for w in tie.windows(2) {
                let mut v = linalg::zeros(d);
                v[layout.rate(w[0])] = Q::one();
                v[layout.rate(w[1])] = -Q::one();
                eqs.push(LinearEquality::new(v, Q::zero()));
            }
        }
        eqs.into_iter().map(|e| e.canonical()).collect()
    }

    /// Coding nodes as (outgoing edges, inputs), in order of their smallest edge id.
    pub fn nodes(&self) -> Vec<(VarSet, VarSet)> {
        let mut edges = self.edges.clone();
        edges.sort_by_key(|e| e.id);
        let mut nodes: Vec<(Option<usize>, VarSet, VarSet)> = Vec::new();
        for e in &edges {
            match nodes.iter_mut().find(|(label, _, _)| label.is_some() && *label == e.node) {
                Some(n) => n.1 = n.1.union(VarSet::single(e.id)),
                None => nodes.push((e.node, VarSet::single(e.id), VarSet::of(&e.inputs))),
            }
        }
        nodes.into_iter().map(|(_, out, inp)| (out, inp)).collect()
    }

    /// The outer-bound cone: Shannon inequalities, `R_e ≥ h_e`, the extra
    /// inequalities (over entropy coordinates) and the network equalities.
    pub fn outer_bound(&self, extra: &[LinearInequality]) -> Result<(HRep, Layout)> {
        self.validate()?;
        let layout = self.layout()?;
        let d = layout.dim();
        let pad = |v: &Vector| {
            let mut x = v.clone();
            x.resize(d, Q::zero());
            x
        };
        let gamma = shannon_outer_bound(layout.index.vars())?;
        let mut rows: Vec<LinearInequality> = gamma.inequalities.iter().map(|i| LinearInequality::homogeneous(pad(&i.normal))).collect();
        for e in self.edge_ids() {
            let mut v = linalg::zeros(d);
            v[layout.rate(e)] = Q::one();
            v[layout.index.coord(VarSet::single(e))] = -Q::one();
            rows.push(LinearInequality::homogeneous(v));
        }
        for x in extra {
            if x.dim() != layout.index.dim() {
                return Err(Error::DimensionMismatch { expected: layout.index.dim(), found: x.dim() });
            }
            rows.push(LinearInequality::new(pad(&x.normal), x.offset.clone()));
        }
        let h = HRep::new(d, rows, self.equalities(&layout))?;
        Ok((h, layout))
    }

    /// Permutations of the variables that fix the sources and edges as
    /// blocks and map the linear span of the network equalities (and the extra
    /// inequalities, as a set) onto itself.
    pub fn network_symmetry_group(&self, extra: &[LinearInequality]) -> Result<PermGroup> {
        self.validate()?;
        let layout = self.layout()?;
        let n = self.vars();
        let eqs: Vec<Vector> = self.equalities(&layout).into_iter().map(|e| e.normal).collect();
        let mut basis = eqs.clone();
        let pivots = linalg::rref(&mut basis, layout.dim());
        basis.truncate(pivots.len());
        let in_span = |v: &Vector| {
            let mut r = v.clone();
            for (row, &p) in basis.iter().zip(&pivots) {
                if !r[p].is_zero() {
                    let f = r[p].clone();
                    for (j, x) in row.iter().enumerate() {
                        if !x.is_zero() {
                            r[j].sub_mul(&f, x);
                        }
                    }
                }
            }
            linalg::is_zero_vec(&r)
        };
        let extra_set: BTreeSet<Vector> = extra.iter().map(|x| x.canonical().normal).collect();
        let mut gens = Vec::new();
        if self.sources >= 2 {
            gens.extend(PermGroup::symmetric(self.sources).generators().iter().map(|g| g.extend(n)));
        }
        let edges = self.edges.len();
        if edges >= 2 {
            for g in PermGroup::symmetric(edges).generators() {
                let mut images: Vec<usize> = (0..self.sources).collect();
                images.extend(g.images().map(|i| i + self.sources));
                gens.push(Permutation::from_images(images)?);
            }
        }
        let block = PermGroup::new(n, gens)?;
        block.subgroup_where(|g| {
            let act = layout.action(g);
            eqs.iter().all(|e| in_span(&act.act(e)))
                && extra.iter().all(|x| {
                    let mut v = x.normal.clone();
                    v.resize(layout.dim(), Q::zero());
                    let moved = act.act(&v)[..layout.index.dim()].to_vec();
                    extra_set.contains(&LinearInequality::homogeneous(moved).canonical().normal)
                })
        })
    }
}

/// Coordinate layout of the parent cone of a problem.
#[derive(Debug, Clone)]
pub struct Layout {
    pub index: EntropyIndex,
    pub sources: usize,
    pub edge_ids: Vec<usize>,
}

impl Layout {
    fn new(p: &NetworkProblem) -> Result<Layout> {
        Ok(Layout { index: EntropyIndex::new(p.vars())?, sources: p.sources, edge_ids: p.edge_ids() })
    }

    pub fn dim(&self) -> usize {
        self.index.dim() + self.edge_ids.len()
    }

    pub fn rate(&self, edge: usize) -> usize {
        self.index.dim() + self.edge_ids.iter().position(|&e| e == edge).expect("known edge")
    }

    /// Coordinates of the region: source entropies `h_s`, then edge rates.
    pub fn region_coords(&self) -> Vec<usize> {
        let mut c: Vec<usize> = (1..=self.sources).map(|s| self.index.coord(VarSet::single(s))).collect();
        c.extend(self.edge_ids.iter().map(|&e| self.rate(e)));
        c
    }

    pub fn region_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.sources).map(|s| format!("w{s}")).collect();
        names.extend(self.edge_ids.iter().map(|e| format!("R{e}")));
        names
    }

    pub fn coord_name(&self, c: usize) -> String {
        if c < self.index.dim() {
            self.index.name(c)
        } else {
            format!("R{}", self.edge_ids[c - self.index.dim()])
        }
    }

    /// Action of a variable permutation on the parent coordinates.
    pub fn action(&self, g: &Permutation) -> Permutation {
        let sub = induced_subset_permutation(g);
        let h = self.index.dim();
        let mut images: Vec<usize> = sub.images().collect();
        for &e in &self.edge_ids {
            let img = g.image(e - 1) + 1;
            images.push(self.rate(img));
        }
        debug_assert_eq!(images.len(), h + self.edge_ids.len());
        Permutation::from_images(images).expect("induced action is a bijection")
    }

    /// Action of a variable permutation on the region coordinates.
    pub fn region_action(&self, g: &Permutation) -> Permutation {
        let coords = self.region_coords();
        let act = self.action(g);
        let images = coords
            .iter()
            .map(|&c| coords.iter().position(|&d| d == act.image(c)).expect("region coordinates are preserved"))
            .collect();
        Permutation::from_images(images).expect("bijection")
    }
}

/// `h_A = h_B` for each pair, the raw constraint lists used by prover front ends.
pub fn pair_equalities(idx: &EntropyIndex, pairs: &[(Vec<usize>, Vec<usize>)]) -> Vec<LinearEquality> {
    pairs
        .iter()
        .map(|(a, b)| {
            let mut v = linalg::zeros(idx.dim());
            v[idx.coord(VarSet::of(a))] += Q::one();
            v[idx.coord(VarSet::of(b))] -= Q::one();
            LinearEquality::new(v, Q::zero())
        })
        .collect()
}
