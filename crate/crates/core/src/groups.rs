//! Permutation groups given by generators, with an extensional closure.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::dd::DdPair;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::polyhedra::{eliminate_equalities, Embedding, HRep, LinearEquality};
use crate::rational::Q;

pub const DEFAULT_GROUP_CAP: usize = 10_000_000;

/// A permutation of `0..degree`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images.into_iter().map(|i| i as u32).collect()))
    }

    /// Cycle notation over points `1..=degree`, e.g. `(1,2)(4,5,6)`; `()` is the identity.
    pub fn from_cycles(s: &str, degree: usize) -> Result<Permutation> {
        let err = |m: &str| Error::InvalidPermutation(format!("{m} in `{s}`"));
        let mut images: Vec<usize> = (0..degree).collect();
        let mut seen = HashSet::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body_end = rest.find(')').ok_or_else(|| err("unclosed cycle"))?;
            let body = rest.strip_prefix('(').ok_or_else(|| err("expected `(`"))?;
            let cycle: Vec<usize> = body[..body_end - 1]
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| err("bad point")))
                .collect::<Result<_>>()?;
            for &p in &cycle {
                if p == 0 || p > degree {
                    return Err(err("point out of range"));
                }
                if !seen.insert(p) {
                    return Err(err("repeated point"));
                }
            }
            for (k, &p) in cycle.iter().enumerate() {
                images[p - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
            rest = rest[body_end + 1..].trim_start();
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Permutation(inv)
    }

    /// Coordinate action: `(g·v)[g(i)] = v[i]`.
    pub fn act(&self, v: &[Q]) -> Vector {
        let mut out = vec![Q::zero(); v.len()];
        for (i, x) in v.iter().enumerate() {
            out[self.0[i] as usize] = x.clone();
        }
        out
    }

    /// Action on a coordinate vector with a fixed leading homogenizing entry.
    pub fn act_shifted(&self, v: &[Q]) -> Vector {
        let mut out = v.to_vec();
        for (i, x) in v[1..].iter().enumerate() {
            out[self.0[i] as usize + 1] = x.clone();
        }
        out
    }

    /// Embed into a larger degree by fixing the extra points.
    pub fn extend(&self, degree: usize) -> Permutation {
        let mut v = self.0.clone();
        v.extend(self.0.len() as u32..degree as u32);
        Permutation(v)
    }

    /// Cycle notation over `1..=degree`.
    pub fn cycles(&self) -> String {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for start in 0..n {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push((i + 1).to_string());
                i = self.0[i] as usize;
            }
            out.push('(');
            out.push_str(&cyc.join(","));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycles())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycles())
    }
}

impl FromStr for Permutation {
    type Err = Error;
    /// Degree is inferred from the largest point.
    fn from_str(s: &str) -> Result<Permutation> {
        let max = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        Permutation::from_cycles(s, max)
    }
}

/// A finite permutation group. Elements are enumerated on first use.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    cap: usize,
    elements: OnceLock<std::result::Result<Vec<Permutation>, Error>>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group(degree {}, [", self.degree)?;
        let gens: Vec<String> = self.generators.iter().map(Permutation::cycles).collect();
        write!(f, "{}])", gens.join(", "))
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<PermGroup> {
        PermGroup::with_cap(degree, generators, DEFAULT_GROUP_CAP)
    }

    pub fn with_cap(degree: usize, generators: Vec<Permutation>, cap: usize) -> Result<PermGroup> {
        let mut gens = Vec::new();
        for g in generators {
            let g = match g.degree().cmp(&degree) {
                std::cmp::Ordering::Greater => {
                    if g.images().skip(degree).enumerate().any(|(k, i)| i != degree + k)
                        || g.images().take(degree).any(|i| i >= degree)
                    {
                        return Err(Error::InvalidPermutation(format!("{g} moves points beyond degree {degree}")));
                    }
                    Permutation(g.0[..degree].to_vec())
                }
                std::cmp::Ordering::Less => g.extend(degree),
                std::cmp::Ordering::Equal => g,
            };
            if !g.is_identity() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        Ok(PermGroup { degree, generators: gens, cap, elements: OnceLock::new() })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup { degree, generators: Vec::new(), cap: DEFAULT_GROUP_CAP, elements: OnceLock::new() }
    }

    pub fn symmetric(degree: usize) -> PermGroup {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::from_images((0..degree).map(|i| if i < 2 { 1 - i } else { i }).collect()).unwrap());
        }
        if degree >= 3 {
            gens.push(Permutation::from_images((0..degree).map(|i| (i + 1) % degree).collect()).unwrap());
        }
        PermGroup::new(degree, gens).unwrap()
    }

    /// Parse whitespace- or comma-separated cycle-notation generators, e.g. `(1,2) (3,4,5)`.
    pub fn parse(s: &str, degree: usize) -> Result<PermGroup> {
        let mut gens = Vec::new();
        let mut cur = String::new();
        let mut depth = 0;
        let mut last_close = false;
        for c in s.chars() {
            match c {
                '(' => {
                    depth += 1;
                    cur.push(c);
                    last_close = false;
                }
                ')' => {
                    depth -= 1;
                    cur.push(c);
                    last_close = true;
                }
                c if depth == 0 && (c == ',' || c.is_whitespace() || c == ';') => {
                    if last_close && !cur.is_empty() {
                        gens.push(Permutation::from_cycles(&cur, degree)?);
                        cur.clear();
                    }
                }
                c => cur.push(c),
            }
        }
        if !cur.trim().is_empty() {
            gens.push(Permutation::from_cycles(&cur, degree)?);
        }
        PermGroup::new(degree, gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// All elements, sorted.
    pub fn elements(&self) -> Result<&[Permutation]> {
        self.elements
            .get_or_init(|| closure(self.degree, &self.generators, self.cap))
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(Clone::clone)
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        Ok(self.elements()?.binary_search(g).is_ok())
    }

    /// Same element set.
    pub fn same_elements(&self, other: &PermGroup) -> Result<bool> {
        Ok(self.degree == other.degree && self.elements()? == other.elements()?)
    }

    /// Subgroup of the elements satisfying `keep`, with a greedy generating set.
    pub fn subgroup_where(&self, keep: impl Fn(&Permutation) -> bool) -> Result<PermGroup> {
        let members: Vec<Permutation> = self.elements()?.iter().filter(|g| keep(g)).cloned().collect();
        Ok(from_elements(self.degree, members, self.cap))
    }

    /// Orbits of the points `0..degree`, each sorted, ordered by smallest member.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut orbits = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < orbit.len() {
                let p = orbit[i];
                for g in &self.generators {
                    let q = g.image(p);
                    if !seen[q] {
                        seen[q] = true;
                        orbit.push(q);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    /// Orbit of a coordinate vector under the coordinate action.
    pub fn orbit(&self, v: &[Q]) -> Vec<Vector> {
        orbit_by(&self.generators, v, |g, x| g.act(x))
    }

    /// Orbit of a homogenized vector (leading entry fixed).
    pub fn orbit_shifted(&self, v: &[Q]) -> Vec<Vector> {
        orbit_by(&self.generators, v, |g, x| g.act_shifted(x))
    }

    /// Lexicographically smallest member of the orbit.
    pub fn canonical_rep(&self, v: &[Q]) -> Vector {
        self.orbit(v).into_iter().min().expect("orbit is never empty")
    }

    /// Whether every generator maps the set of vectors to itself.
    pub fn stabilizes(&self, set: &[Vector]) -> bool {
        let members: HashSet<&Vector> = set.iter().collect();
        self.generators.iter().all(|g| set.iter().all(|v| members.contains(&g.act(v))))
    }

    /// Permutation induced on the nonempty subsets of the points, where
    /// coordinate `i` is the subset with bitmask `i + 1`.
    pub fn induced_subset_action(&self) -> Result<PermGroup> {
        if self.degree > 20 {
            return Err(Error::InvalidPermutation("degree too large for the subset action".into()));
        }
        let gens = self.generators.iter().map(|g| induced_subset_permutation(g)).collect();
        PermGroup::with_cap((1 << self.degree) - 1, gens, self.cap)
    }
}

pub fn induced_subset_permutation(g: &Permutation) -> Permutation {
    let n = g.degree();
    let images = (1usize..(1 << n))
        .map(|mask| {
            let mut img = 0usize;
            for b in 0..n {
                if mask & (1 << b) != 0 {
                    img |= 1 << g.image(b);
                }
            }
            img - 1
        })
        .collect();
    Permutation::from_images(images).expect("subset action is a bijection")
}

fn orbit_by(gens: &[Permutation], v: &[Q], act: impl Fn(&Permutation, &[Q]) -> Vector) -> Vec<Vector> {
    let mut seen: HashSet<Vector> = HashSet::new();
    seen.insert(v.to_vec());
    let mut queue = VecDeque::from([v.to_vec()]);
    let mut out = vec![v.to_vec()];
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = act(g, &x);
            if seen.insert(y.clone()) {
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    out
}

fn closure(degree: usize, gens: &[Permutation], cap: usize) -> std::result::Result<Vec<Permutation>, Error> {
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.then(g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::GroupTooLarge(cap));
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut v: Vec<Permutation> = seen.into_iter().collect();
    v.sort();
    Ok(v)
}

/// Build a group from a set of elements known to be closed, picking generators greedily.
fn from_elements(degree: usize, mut members: Vec<Permutation>, cap: usize) -> PermGroup {
    members.sort();
    let mut gens: Vec<Permutation> = Vec::new();
    let mut generated: HashSet<Permutation> = HashSet::from([Permutation::identity(degree)]);
    for g in &members {
        if generated.contains(g) {
            continue;
        }
        gens.push(g.clone());
        generated = closure(degree, &gens, usize::MAX).expect("uncapped").into_iter().collect();
        if generated.len() == members.len() {
            break;
        }
    }
    let group = PermGroup { degree, generators: gens, cap, elements: OnceLock::new() };
    let _ = group.elements.set(Ok(members));
    group
}

/// Split `set` into orbits under `act`, returning one canonical representative
/// (lexicographically smallest orbit member) per orbit, sorted.
pub fn orbit_transversal(group: &PermGroup, set: &[Vector], shifted: bool) -> Vec<Vector> {
    let mut covered: HashSet<Vector> = HashSet::new();
    let mut reps = Vec::new();
    for v in set {
        if covered.contains(v) {
            continue;
        }
        let orbit = if shifted { group.orbit_shifted(v) } else { group.orbit(v) };
        let rep = orbit.iter().min().expect("nonempty").clone();
        covered.extend(orbit);
        reps.push(rep);
    }
    reps.sort();
    reps
}

/// Elements of `group` mapping `set` onto itself (as a set of coordinate vectors).
pub fn setwise_stabilizer(group: &PermGroup, set: &[Vector]) -> Result<PermGroup> {
    let members: HashSet<&Vector> = set.iter().collect();
    group.subgroup_where(|g| set.iter().all(|v| members.contains(&g.act(v))))
}

/// Restrict `h` to the fixed subspace of `group` (coordinates in one orbit are
/// equal) and eliminate the resulting equalities.
pub fn fix_subspace(h: &HRep, group: &PermGroup) -> Result<(HRep, Embedding)> {
    if group.degree() != h.dim {
        return Err(Error::DimensionMismatch { expected: h.dim, found: group.degree() });
    }
    let mut with_eq = h.clone();
    for orbit in group.point_orbits() {
        for &j in &orbit[1..] {
            let mut normal = vec![Q::zero(); h.dim];
            normal[orbit[0]] = Q::one();
            normal[j] = -Q::one();
            with_eq.equalities.push(LinearEquality::new(normal, Q::zero()));
        }
    }
    eliminate_equalities(&with_eq, &[])
}

/// Order of the combinatorial symmetry group of a pair: permutations of the
/// rays that map the family of facet ray sets onto itself.
pub fn csg_order(pair: &DdPair) -> usize {
    let nr = pair.rays.len();
    let mut facets: Vec<Vec<bool>> = (0..pair.normals.len())
        .map(|j| (0..nr).map(|k| pair.incidence[k].contains(j)).collect())
        .collect();
    facets.sort();
    facets.dedup();
    let mut co = vec![vec![0usize; nr]; nr];
    for f in &facets {
        for a in 0..nr {
            if !f[a] {
                continue;
            }
            for b in 0..nr {
                if f[b] {
                    co[a][b] += 1;
                }
            }
        }
    }
    let facet_set: HashSet<Vec<bool>> = facets.iter().cloned().collect();
    let mut count = 0;
    let mut image = vec![usize::MAX; nr];
    let mut used = vec![false; nr];
    fn search(
        k: usize,
        nr: usize,
        co: &[Vec<usize>],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        facets: &[Vec<bool>],
        facet_set: &HashSet<Vec<bool>>,
        count: &mut usize,
    ) {
        if k == nr {
            let ok = facets.iter().all(|f| {
                let mut g = vec![false; nr];
                for (a, &inf) in f.iter().enumerate() {
                    if inf {
                        g[image[a]] = true;
                    }
                }
                facet_set.contains(&g)
            });
            if ok {
                *count += 1;
            }
            return;
        }
        for cand in 0..nr {
            if used[cand] || co[k][k] != co[cand][cand] {
                continue;
            }
            if (0..k).any(|a| co[a][k] != co[image[a]][cand]) {
                continue;
            }
            image[k] = cand;
            used[cand] = true;
            search(k + 1, nr, co, image, used, facets, facet_set, count);
            used[cand] = false;
        }
        image[k] = usize::MAX;
    }
    search(0, nr, &co, &mut image, &mut used, &facets, &facet_set, &mut count);
    count
}
