//! Rate regions: projections of the outer-bound cone onto the source
//! entropies and edge rates.

use serde::Serialize;

use super::problem::{Layout, NetworkProblem};
use crate::chm::{chm_project, extreme_point, ChmOptions, ChmStats};
use crate::error::{Error, Result};
use crate::groups::{PermGroup, Permutation};
use crate::linalg::{self, dot, Vector};
use crate::lp::{implication_certificate, verify_implication, ImplicationCertificate};
use crate::polyhedra::{
    boundedness_transform, canonical_ray, eliminate_equalities, remove_redundancies, Embedding, HRep, LinearEquality,
    LinearInequality,
};
use crate::rational::Q;
use crate::symchm::{sym_chm_project, ParentSymmetry};

#[derive(Debug, Clone)]
pub struct RegionOptions {
    pub use_symmetry: bool,
    /// Group on the region coordinates used instead of the network symmetry group.
    pub group: Option<PermGroup>,
    /// Extra homogeneous inequalities over the entropy coordinates.
    pub extra: Vec<LinearInequality>,
    pub remove_redundancies: bool,
    /// Confirm facets on the symmetry-reduced parent first.
    pub reduced_lps: bool,
    pub chm: ChmOptions,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            use_symmetry: false,
            group: None,
            extra: Vec::new(),
            remove_redundancies: true,
            reduced_lps: true,
            chm: ChmOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RegionReport {
    /// Coordinates of the parent cone: entropies then rates.
    pub parent_dim: usize,
    pub parent_inequalities: usize,
    /// After substituting the equalities away (and removing redundant rows).
    pub reduced_dim: usize,
    pub reduced_inequalities: usize,
    /// Dimension of the region itself.
    pub region_dim: usize,
    pub stats: ChmStats,
}

#[derive(Debug, Clone)]
pub struct RateRegion {
    /// `w1.., R..`.
    pub names: Vec<String>,
    /// Homogeneous, canonical and sorted.
    pub inequalities: Vec<LinearInequality>,
    /// Linear relations holding on the whole region (rate ties, forced zeros).
    pub equalities: Vec<LinearEquality>,
    pub extreme_rays: Vec<Vector>,
    /// Symmetry used for the computation; trivial without symmetry.
    pub group: PermGroup,
    /// One inequality per orbit under `group`.
    pub facet_reps: Vec<LinearInequality>,
    pub report: RegionReport,
    /// Parallel to `inequalities` once certified.
    pub certificates: Vec<ImplicationCertificate>,
}

impl RateRegion {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Human-readable lines, one per inequality then one per equality.
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self.inequalities.iter().map(|i| format_relation(&self.names, &i.normal, ">=")).collect();
        out.extend(self.equalities.iter().map(|e| format_relation(&self.names, &e.normal, "=")));
        out
    }

    pub fn rep_lines(&self) -> Vec<String> {
        self.facet_reps.iter().map(|i| format_relation(&self.names, &i.normal, ">=")).collect()
    }

    /// Whether every generator of `group` maps the inequality set onto itself.
    pub fn invariant_under(&self, group: &PermGroup) -> bool {
        let mut own = self.inequalities.clone();
        own.sort();
        group.generators().iter().all(|g| {
            let mut moved: Vec<LinearInequality> =
                own.iter().map(|i| LinearInequality::homogeneous(g.act(&i.normal)).canonical()).collect();
            moved.sort();
            moved == own
        })
    }
}

/// Render `a·x (op) 0` with rate terms on the left and source terms moved to
/// the right, scaled to coprime integers.
pub fn format_relation(names: &[String], normal: &[Q], op: &str) -> String {
    let normal = linalg::primitive(normal);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (name, a) in names.iter().zip(&normal) {
        if a.is_zero() {
            continue;
        }
        if name.starts_with('w') {
            right.push(term(&-a, name));
        } else {
            left.push(term(&a, name));
        }
    }
    let side = |t: Vec<String>| if t.is_empty() { "0".to_string() } else { t.join(" ") };
    format!("{} {op} {}", side(left), side(right))
}

fn term(c: &Q, name: &str) -> String {
    let sign = if c.is_negative() { '-' } else { '+' };
    let m = c.abs();
    if m.is_one() {
        format!("{sign}{name}")
    } else {
        format!("{sign}{m} {name}")
    }
}

/// Parse a line produced by [`format_relation`] (or any linear relation over
/// `names` with `>=`, `<=` or `=`) back to a normal and operator.
pub fn parse_relation(names: &[String], line: &str) -> Result<(Vector, &'static str)> {
    let (op, lhs, rhs) = [">=", "<=", "="]
        .iter()
        .find_map(|op| line.split_once(op).map(|(l, r)| (*op, l, r)))
        .ok_or_else(|| Error::Parse(format!("no relation in `{line}`")))?;
    let mut v = linalg::zeros(names.len());
    add_terms(names, lhs, 1, &mut v)?;
    add_terms(names, rhs, -1, &mut v)?;
    if op == "<=" {
        v = linalg::neg(&v);
    }
    Ok((v, if op == "=" { "=" } else { ">=" }))
}

fn add_terms(names: &[String], expr: &str, sign: i64, v: &mut Vector) -> Result<()> {
    let spaced = expr.replace('+', " + ").replace('-', " - ");
    let mut coef = Q::from_int(sign);
    let mut scale: Option<Q> = None;
    for tok in spaced.split_whitespace() {
        match tok {
            "+" => {}
            "-" => coef = -coef,
            t => {
                if let Some(i) = names.iter().position(|n| n == t) {
                    v[i] += &coef * &scale.take().unwrap_or_else(Q::one);
                    coef = Q::from_int(sign);
                } else {
                    let q: Q = t.parse().map_err(|_| Error::Parse(format!("unexpected token `{t}`")))?;
                    if !q.is_zero() || scale.is_some() {
                        scale = Some(q);
                    }
                }
            }
        }
    }
    if scale.map_or(false, |q| !q.is_zero()) {
        return Err(Error::Parse(format!("constant term in `{expr}`")));
    }
    Ok(())
}

/// Action of the network symmetry group on the region coordinates.
pub fn region_group(layout: &Layout, nsg: &PermGroup) -> Result<PermGroup> {
    let gens = nsg.generators().iter().map(|g| layout.region_action(g)).collect();
    PermGroup::new(layout.region_coords().len(), gens)
}

/// The projection problem for a network, with the region coordinates first.
struct Assembled {
    outer: HRep,
    layout: Layout,
    /// Parent coordinates in projection order.
    order: Vec<usize>,
    /// Outer bound in projection order plus the bounding row.
    bounded: HRep,
}

impl Assembled {
    fn new(p: &NetworkProblem, extra: &[LinearInequality]) -> Result<Assembled> {
        let (outer, layout) = p.outer_bound(extra)?;
        let coords = layout.region_coords();
        let mut order = coords.clone();
        order.extend((0..outer.dim).filter(|c| !coords.contains(c)));
        let bounded = boundedness_transform(&outer.permute_coordinates(&order), coords.len());
        Ok(Assembled { outer, layout, order, bounded })
    }

    fn k(&self) -> usize {
        self.layout.region_coords().len()
    }

    /// A variable permutation acting on the coordinates of `bounded`.
    fn parent_action(&self, g: &Permutation) -> Result<Permutation> {
        let a = self.layout.action(g);
        let mut pos = vec![0; self.order.len()];
        for (j, &o) in self.order.iter().enumerate() {
            pos[o] = j;
        }
        Permutation::from_images(self.order.iter().map(|&o| pos[a.image(o)]).collect())
    }
}

/// Restrict a group on `0..k` to the coordinates in `kept`, which it must map to themselves.
fn restrict_group(group: &PermGroup, kept: &[usize]) -> Option<PermGroup> {
    let mut gens = Vec::new();
    for g in group.generators() {
        let images: Option<Vec<usize>> = kept.iter().map(|&c| kept.iter().position(|&d| d == g.image(c))).collect();
        gens.push(Permutation::from_images(images?).ok()?);
    }
    PermGroup::with_cap(kept.len(), gens, usize::MAX).ok()
}

/// Affine relations holding on the projection of `parent` onto its first `k`
/// coordinates, found by probing hyperplanes through known projection points.
pub fn projection_equalities(parent: &HRep, k: usize) -> Result<Vec<LinearEquality>> {
    let (p0, _) = extreme_point(parent, k, &linalg::zeros(k))?;
    let mut diffs: Vec<Vector> = Vec::new();
    let mut eqs: Vec<LinearEquality> = Vec::new();
    loop {
        let mut rows = diffs.clone();
        rows.extend(eqs.iter().map(|e| e.normal.clone()));
        let Some(h) = linalg::nullspace(&rows, k).into_iter().next() else { break };
        let level = dot(&h, &p0);
        let (p, low) = extreme_point(parent, k, &h)?;
        if low < level {
            diffs.push(linalg::sub(&p, &p0));
            continue;
        }
        let (q, high) = extreme_point(parent, k, &linalg::neg(&h))?;
        if -high > level {
            diffs.push(linalg::sub(&q, &p0));
            continue;
        }
        eqs.push(LinearEquality::new(h, level).canonical());
    }
    Ok(eqs)
}

/// Compute the rate region of `p` as a projection of the outer bound.
pub fn rate_region(p: &NetworkProblem, opts: &RegionOptions) -> Result<RateRegion> {
    let asm = Assembled::new(p, &opts.extra)?;
    let k = asm.k();
    let names = asm.layout.region_names();
    let nsg = if opts.use_symmetry && opts.group.is_none() { Some(p.network_symmetry_group(&opts.extra)?) } else { None };
    let group = match (&opts.group, &nsg) {
        (Some(g), _) if opts.use_symmetry => {
            if g.degree() != k {
                return Err(Error::DimensionMismatch { expected: k, found: g.degree() });
            }
            g.clone()
        }
        (_, Some(n)) => region_group(&asm.layout, n)?,
        _ => PermGroup::trivial(k),
    };
    let keep: Vec<usize> = (0..k).collect();
    let mut implied: Vec<LinearEquality> = Vec::new();
    loop {
        let mut system = asm.bounded.clone();
        system.equalities.extend(implied.iter().cloned());
        let (reduced, emb) = eliminate_equalities(&system, &keep)?;
        let reduced = if opts.remove_redundancies { remove_redundancies(&reduced)? } else { reduced };
        let kept: Vec<usize> = emb.free.iter().copied().filter(|&f| f < k).collect();
        let kp = kept.len();
        let report = RegionReport {
            parent_dim: asm.outer.dim,
            parent_inequalities: asm.outer.inequalities.len(),
            reduced_dim: reduced.dim,
            reduced_inequalities: reduced.inequalities.len(),
            region_dim: kp,
            stats: ChmStats::default(),
        };
        let sub_group = if group.is_trivial() {
            None
        } else {
            let g = restrict_group(&group, &kept);
            if g.is_none() {
                log::warn!("symmetry does not preserve the free region coordinates; continuing without it");
            }
            g
        };
        let parent_sym = match (&nsg, &sub_group) {
            (Some(n), Some(_)) if opts.reduced_lps => {
                let gens = n.generators().iter().map(|g| asm.parent_action(g)).collect::<Result<Vec<_>>>()?;
                Some(ParentSymmetry { system: system.clone(), group: PermGroup::new(system.dim, gens)?, coords: kept.clone() })
            }
            _ => None,
        };
        let outcome = match &sub_group {
            Some(g) => sym_chm_project(&reduced, kp, g, parent_sym.as_ref(), &opts.chm).map(|s| {
                let reps = s.facet_reps();
                (s.facets(), reps, s.vertices(), s.stats)
            }),
            None => chm_project(&reduced, kp, &opts.chm).map(|s| {
                let f = s.facets();
                (f.clone(), f, s.vertices(), s.stats)
            }),
        };
        let (facets, reps, vertices, stats) = match outcome {
            Err(Error::ProjectionNotFullDimensional) => {
                let found = projection_equalities(&reduced, kp)?;
                if found.is_empty() {
                    return Err(Error::ProjectionNotFullDimensional);
                }
                for e in found {
                    log::info!("region satisfies {}", format_relation(&names, &widen(&e.normal, &kept, k), "="));
                    implied.push(LinearEquality::new(widen(&e.normal, &kept, system.dim), e.rhs));
                }
                continue;
            }
            other => other?,
        };
        let lift = |f: &[LinearInequality]| -> Vec<LinearInequality> {
            let mut out: Vec<LinearInequality> = f
                .iter()
                .filter(|i| i.is_homogeneous())
                .map(|i| LinearInequality::homogeneous(widen(&i.normal, &kept, k)).canonical())
                .collect();
            out.sort();
            out.dedup();
            out
        };
        let mut rays: Vec<Vector> = vertices
            .iter()
            .filter(|v| !linalg::is_zero_vec(v))
            .map(|v| canonical_ray(&lift_point(&emb, &kept, k, v)))
            .collect();
        rays.sort();
        let equalities = region_equalities(&emb, &kept, k);
        return Ok(RateRegion {
            names,
            inequalities: lift(&facets),
            equalities,
            extreme_rays: rays,
            group: sub_group.map_or_else(|| PermGroup::trivial(k), |_| group.clone()),
            facet_reps: lift(&reps),
            report: RegionReport { stats, ..report },
            certificates: Vec::new(),
        });
    }
}

/// Place a vector over the kept coordinates into `0..dim`.
fn widen(v: &[Q], kept: &[usize], dim: usize) -> Vector {
    let mut out = linalg::zeros(dim);
    for (x, &c) in v.iter().zip(kept) {
        out[c] = x.clone();
    }
    out
}

/// Region coordinates of a projected point given on the kept coordinates.
fn lift_point(emb: &Embedding, kept: &[usize], k: usize, v: &[Q]) -> Vector {
    let mut y = linalg::zeros(emb.reduced_dim());
    y[..kept.len()].clone_from_slice(v);
    (0..k).map(|c| if let Some(i) = kept.iter().position(|&d| d == c) { v[i].clone() } else { dot(&emb.map[c], &y) }).collect()
}

/// `x_c = sum_j map[c][j] x_kept[j]` for every region coordinate `c` that was substituted away.
fn region_equalities(emb: &Embedding, kept: &[usize], k: usize) -> Vec<LinearEquality> {
    let mut out: Vec<LinearEquality> = (0..k)
        .filter(|c| !kept.contains(c))
        .map(|c| {
            let mut v = linalg::zeros(k);
            v[c] = Q::one();
            for (j, &d) in kept.iter().enumerate() {
                v[d] -= &emb.map[c][j];
            }
            LinearEquality::new(v, Q::zero()).canonical()
        })
        .collect();
    out.sort_by(|a, b| a.normal.cmp(&b.normal));
    out
}

/// Region inequality written over the parent (entropy, rate) coordinates.
pub fn lift_to_parent(layout: &Layout, ineq: &LinearInequality) -> LinearInequality {
    let mut v = linalg::zeros(layout.dim());
    for (x, c) in ineq.normal.iter().zip(layout.region_coords()) {
        v[c] = x.clone();
    }
    LinearInequality::new(v, ineq.offset.clone())
}

/// Attach an implication certificate over the outer bound to every region
/// inequality, each checked by direct arithmetic.
pub fn certify_region(region: &mut RateRegion, p: &NetworkProblem, extra: &[LinearInequality]) -> Result<()> {
    let (outer, layout) = p.outer_bound(extra)?;
    let mut certs = Vec::with_capacity(region.inequalities.len());
    for ineq in &region.inequalities {
        let target = lift_to_parent(&layout, ineq);
        let cert = implication_certificate(&outer, &target).map_err(|e| match e {
            Error::NotImplied { .. } => {
                Error::CertificateFailed(format!("{} is not implied", format_relation(&region.names, &ineq.normal, ">=")))
            }
            other => other,
        })?;
        if !verify_implication(&outer, &target, &cert) {
            return Err(Error::CertificateFailed(format_relation(&region.names, &ineq.normal, ">=")));
        }
        certs.push(cert);
    }
    region.certificates = certs;
    Ok(())
}
