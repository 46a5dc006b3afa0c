//! Subcommand dispatch.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde_json::json;

use conevolve::chm::{chm_project, ChmOptions};
use conevolve::dd::{cone_h_to_v, cone_v_to_h, face_counts, DdOptions};
use conevolve::groups::PermGroup;
use conevolve::lp::{implication_certificate, verify_implication, LinearProgram, LpOutcome};
use conevolve::netinfo::region::{lift_to_parent, parse_relation};
use conevolve::netinfo::{
    certify_region, guessing_number_ub, parse_entropy_inequality, rate_region, secret_sharing_info_ratio_lb,
    sum_rate_upper_bound, AccessStructure, Digraph, EntropyIndex, LpBound, NetworkProblem, RegionOptions,
};
use conevolve::polyhedra::{
    boundedness_transform, dehomogenize, homogenize, parse_hrep, parse_vrep, HRep, LinearInequality, VRep,
};
use conevolve::symchm::sym_chm_project;
use conevolve::{Error, Q};

use crate::render::{self, envelope};
use crate::{Cli, Command, Format, GlobalArgs};

/// An error with the process exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Failure {
        Failure { code: 1, error: error.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse(_) | Error::DimensionMismatch { .. } | Error::InvalidPermutation(_) => 1,
            Error::GroupTooLarge(_) | Error::RayCapExceeded(_) => 3,
            _ => 2,
        };
        Failure { code, error: e.into() }
    }
}

impl fmt::Debug for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exit {}: {:#}", self.code, self.error)
    }
}

type Outcome = std::result::Result<String, Failure>;

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::RateRegion { problem, symmetry, group, certify, expect } => {
            let use_symmetry = symmetry.symmetry && !symmetry.no_symmetry;
            rate_region_cmd(g, problem, use_symmetry, group.as_deref(), *certify, expect.as_deref())
        }
        Command::Nsg { problem } => nsg_cmd(g, problem),
        Command::SumRate { problem, weights, capacities } => sum_rate_cmd(g, problem, weights, capacities),
        Command::SecretSharing { access } => secret_sharing_cmd(g, access),
        Command::Guessing { graph } => guessing_cmd(g, graph),
        Command::Project { input, k, group, no_bounding_transform } => {
            project_cmd(g, input, *k, group.as_deref(), !no_bounding_transform)
        }
        Command::Convert { input } => convert_cmd(g, input),
        Command::Faces { input } => faces_cmd(g, input),
        Command::Certify { problem, inequalities } => certify_cmd(g, problem, inequalities.as_deref()),
        Command::SolveLp { input } => solve_lp_cmd(g, input),
    }
}

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::input)
}

fn load_problem(path: &Path) -> std::result::Result<NetworkProblem, Failure> {
    let text = read(path)?;
    let p = NetworkProblem::from_json(&text).map_err(|e| match e {
        Error::Parse(_) => Failure::input(anyhow!("{}: {e}", path.display())),
        other => other.into(),
    })?;
    Ok(p)
}

fn dd_options(g: &GlobalArgs) -> DdOptions {
    DdOptions { ray_cap: g.ray_cap, threads: g.threads.max(1) }
}

fn extra_inequalities(g: &GlobalArgs, vars: usize) -> std::result::Result<Vec<LinearInequality>, Failure> {
    let Some(path) = &g.extra_inequalities else { return Ok(Vec::new()) };
    let idx = EntropyIndex::new(vars)?;
    read(path)?
        .lines()
        .enumerate()
        .map(|(n, l)| (n, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(n, l)| {
            parse_entropy_inequality(&idx, l)
                .map_err(|e| Failure::input(anyhow!("{} line {}: {e}", path.display(), n + 1)))
        })
        .collect()
}

fn load_group(path: &Path, degree: usize, cap: usize) -> std::result::Result<PermGroup, Failure> {
    let text = read(path)?;
    let body: String = text.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join(" ");
    let parsed = PermGroup::parse(&body, degree).map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))?;
    capped(&parsed, cap)
}

/// Re-wrap a group under the element cap and make sure it closes within it.
fn capped(group: &PermGroup, cap: usize) -> std::result::Result<PermGroup, Failure> {
    let g = PermGroup::with_cap(group.degree(), group.generators().to_vec(), cap)?;
    g.order()?;
    Ok(g)
}

fn lines_of(text: &str) -> BTreeSet<String> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_string).collect()
}

fn rate_region_cmd(
    g: &GlobalArgs,
    path: &Path,
    use_symmetry: bool,
    group: Option<&Path>,
    certify: bool,
    expect: Option<&Path>,
) -> Outcome {
    let p = load_problem(path)?;
    let extra = extra_inequalities(g, p.vars())?;
    let k = p.sources + p.edges.len();
    let group = match group {
        Some(file) => Some(load_group(file, k, g.group_cap)?),
        None if use_symmetry => {
            capped(&p.network_symmetry_group(&extra)?, g.group_cap)?;
            None
        }
        None => None,
    };
    let opts = RegionOptions {
        use_symmetry: use_symmetry || group.is_some(),
        group,
        extra: extra.clone(),
        chm: ChmOptions { dd: dd_options(g) },
        ..RegionOptions::default()
    };
    let mut region = rate_region(&p, &opts)?;
    let rep = &region.report;
    log::info!("Original LP dimension...{}", rep.parent_dim);
    log::info!("LP dimension after removing equalities and redundant rows...{}", rep.reduced_dim);
    log::info!(
        "{} facets in {} orbits; vertex-discovering LPs {}, terminal LPs {}",
        region.inequalities.len(),
        region.facet_reps.len(),
        rep.stats.discovering_lps,
        rep.stats.terminal_lps
    );
    if certify {
        certify_region(&mut region, &p, &extra)?;
    }
    let lines = region.lines();
    if let Some(file) = expect {
        let want = lines_of(&read(file)?);
        let got: BTreeSet<String> = lines.iter().cloned().collect();
        if want != got {
            let missing: Vec<&String> = want.difference(&got).collect();
            let unexpected: Vec<&String> = got.difference(&want).collect();
            return Err(Failure {
                code: 4,
                error: anyhow!("output differs from {}: missing {missing:?}, unexpected {unexpected:?}", file.display()),
            });
        }
    }
    match g.format {
        Format::Text => {
            let mut out: String = lines.iter().map(|l| format!("{l}\n")).collect();
            if certify {
                let (outer, layout) = p.outer_bound(&extra)?;
                for (ineq, cert) in region.inequalities.iter().zip(&region.certificates) {
                    out.push('\n');
                    let heading = format!("{}  follows from", render::relation(&region.names, &ineq.normal));
                    out.push_str(&render::certificate_text(&heading, cert, &outer, &layout));
                }
            }
            Ok(out)
        }
        Format::Json => {
            let certificates: Vec<_> = region
                .inequalities
                .iter()
                .zip(&region.certificates)
                .map(|(i, c)| render::certificate_json(&render::relation(&region.names, &i.normal), c))
                .collect();
            Ok(envelope(
                "rate-region",
                json!({
                    "names": region.names,
                    "inequalities": region.inequalities.iter().map(|i| render::relation(&region.names, &i.normal)).collect::<Vec<_>>(),
                    "equalities": lines[region.inequalities.len()..].to_vec(),
                    "extreme_rays": region.extreme_rays,
                    "group": render::group_summary(&region.group),
                    "facet_orbits": region.rep_lines(),
                    "report": region.report,
                    "certificates": certificates,
                }),
            ))
        }
    }
}

fn nsg_cmd(g: &GlobalArgs, path: &Path) -> Outcome {
    let p = load_problem(path)?;
    let extra = extra_inequalities(g, p.vars())?;
    let group = capped(&p.network_symmetry_group(&extra)?, g.group_cap)?;
    Ok(match g.format {
        Format::Text => render::group_text(&group),
        Format::Json => envelope("nsg", json!({ "group": render::group_summary(&group) })),
    })
}

fn parse_values(raw: &Option<Vec<String>>, len: usize, what: &str) -> std::result::Result<Vec<Q>, Failure> {
    match raw {
        None => Ok(vec![Q::one(); len]),
        Some(v) => v
            .iter()
            .map(|t| t.trim().parse::<Q>().map_err(|e| Failure::input(anyhow!("{what}: `{t}`: {e}"))))
            .collect(),
    }
}

fn bound_output(g: &GlobalArgs, command: &str, b: &LpBound) -> String {
    match g.format {
        Format::Text => format!("{}\nLP dimension {} -> {}\n", b.value, b.original_dim, b.reduced_dim),
        Format::Json => envelope(command, json!({ "bound": b })),
    }
}

fn sum_rate_cmd(g: &GlobalArgs, path: &Path, weights: &Option<Vec<String>>, capacities: &Option<Vec<String>>) -> Outcome {
    let p = load_problem(path)?;
    let extra = extra_inequalities(g, p.vars())?;
    let w = parse_values(weights, p.sources, "weights")?;
    let c = parse_values(capacities, p.edges.len(), "capacities")?;
    let b = sum_rate_upper_bound(&p, &w, &c, &extra)?;
    Ok(bound_output(g, "sum-rate", &b))
}

fn secret_sharing_cmd(g: &GlobalArgs, path: &Path) -> Outcome {
    let text = read(path)?;
    let raw: AccessStructure =
        serde_json::from_str(&text).map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))?;
    let access = AccessStructure::new(raw.authorized, raw.vars)?;
    let extra = extra_inequalities(g, access.vars)?;
    let b = secret_sharing_info_ratio_lb(&access, &extra)?;
    Ok(bound_output(g, "secret-sharing", &b))
}

fn guessing_cmd(g: &GlobalArgs, path: &Path) -> Outcome {
    let text = read(path)?;
    let raw: Digraph = serde_json::from_str(&text).map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))?;
    let graph = Digraph::new(raw.vertices, raw.in_neighbours)?;
    let extra = extra_inequalities(g, graph.vertices)?;
    let b = guessing_number_ub(&graph, &extra)?;
    Ok(bound_output(g, "guessing", &b))
}

fn parse_h(path: &Path) -> std::result::Result<HRep, Failure> {
    parse_hrep(&read(path)?).map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))
}

fn is_vrep(text: &str) -> bool {
    text.lines().any(|l| {
        let t = l.trim_start();
        t.starts_with("vertex") || t.starts_with("ray")
    })
}

fn project_cmd(g: &GlobalArgs, path: &Path, k: usize, group: Option<&Path>, bound_cones: bool) -> Outcome {
    let parent = parse_h(path)?;
    if k == 0 || k > parent.dim {
        return Err(Failure::input(anyhow!("k must lie in 1..={}", parent.dim)));
    }
    let parent = if bound_cones && parent.is_homogeneous() { boundedness_transform(&parent, k) } else { parent };
    let opts = ChmOptions { dd: dd_options(g) };
    let (facets, vertices, reps, stats) = match group {
        Some(file) => {
            let group = load_group(file, k, g.group_cap)?;
            let s = sym_chm_project(&parent, k, &group, None, &opts)?;
            let reps = (s.facet_reps(), s.vertex_reps().to_vec());
            (s.facets(), s.vertices(), Some(reps), s.stats)
        }
        None => {
            let s = chm_project(&parent, k, &opts)?;
            (s.facets(), s.vertices(), None, s.stats)
        }
    };
    let mut h = HRep::new(k, facets, Vec::new())?;
    h.inequalities.sort();
    let mut vertices = vertices;
    vertices.sort();
    let v = VRep { dim: k, vertices, rays: Vec::new() };
    match g.format {
        Format::Text => {
            let mut out = format!("{h}{v}");
            if let Some((fr, vr)) = &reps {
                out.push_str(&format!(
                    "# {} facets in {} orbits, {} vertices in {} orbits\n",
                    h.inequalities.len(),
                    fr.len(),
                    v.vertices.len(),
                    vr.len()
                ));
                for f in fr {
                    out.push_str(&format!("facet-orbit {} >= {}\n", render::vector(&f.normal), f.offset));
                }
                for x in vr {
                    out.push_str(&format!("vertex-orbit {}\n", render::vector(x)));
                }
            }
            Ok(out)
        }
        Format::Json => {
            let ineqs: Vec<_> = h.inequalities.iter().map(|i| json!({ "normal": i.normal, "offset": i.offset })).collect();
            let mut body = json!({ "dim": k, "inequalities": ineqs, "vertices": v.vertices, "stats": stats });
            if let Some((fr, vr)) = reps {
                body["facet_orbits"] =
                    json!(fr.iter().map(|i| json!({ "normal": i.normal, "offset": i.offset })).collect::<Vec<_>>());
                body["vertex_orbits"] = json!(vr);
            }
            Ok(envelope("project", body))
        }
    }
}

/// Inequality description of a vertex/ray list.
fn v_to_h(v: &VRep, opts: &DdOptions) -> std::result::Result<HRep, Failure> {
    if v.vertices.is_empty() {
        let pair = cone_v_to_h(v.dim, &v.rays, opts)?;
        let mut rows: Vec<LinearInequality> = pair.normals.into_iter().map(LinearInequality::homogeneous).collect();
        rows.sort();
        return Ok(HRep::new(v.dim, rows, Vec::new())?);
    }
    let mut lifted: Vec<Vec<Q>> = Vec::new();
    for x in &v.vertices {
        lifted.push(std::iter::once(Q::one()).chain(x.iter().cloned()).collect());
    }
    for r in &v.rays {
        lifted.push(std::iter::once(Q::zero()).chain(r.iter().cloned()).collect());
    }
    let pair = cone_v_to_h(v.dim + 1, &lifted, opts)?;
    let mut rows: Vec<LinearInequality> = pair
        .normals
        .iter()
        .map(|n| LinearInequality::new(n[1..].to_vec(), -n[0].clone()).canonical())
        .filter(|i| !i.is_trivial())
        .collect();
    rows.sort();
    Ok(HRep::new(v.dim, rows, Vec::new())?)
}

/// Vertex/ray description of an inequality list.
fn h_to_v(h: &HRep, opts: &DdOptions) -> std::result::Result<VRep, Failure> {
    if !h.equalities.is_empty() {
        return Err(Error::NotFullDimensional.into());
    }
    let normals = |h: &HRep| h.inequalities.iter().map(|i| i.normal.clone()).collect::<Vec<_>>();
    if h.is_homogeneous() {
        let pair = cone_h_to_v(h.dim, &normals(h), opts)?;
        return Ok(VRep { dim: h.dim, vertices: Vec::new(), rays: pair.sorted_rays() });
    }
    let lifted = homogenize(h);
    let pair = cone_h_to_v(lifted.dim, &normals(&lifted), opts)?;
    let mut v = dehomogenize(&pair.rays);
    v.vertices.sort();
    v.rays.sort();
    Ok(v)
}

fn convert_cmd(g: &GlobalArgs, path: &Path) -> Outcome {
    let text = read(path)?;
    let opts = dd_options(g);
    if is_vrep(&text) {
        let v = parse_vrep(&text).map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))?;
        let h = v_to_h(&v, &opts)?;
        Ok(match g.format {
            Format::Text => h.to_string(),
            Format::Json => envelope(
                "convert",
                json!({ "dim": h.dim, "inequalities": h.inequalities.iter().map(|i| json!({ "normal": i.normal, "offset": i.offset })).collect::<Vec<_>>() }),
            ),
        })
    } else {
        let h = parse_h(path)?;
        let v = h_to_v(&h, &opts)?;
        Ok(match g.format {
            Format::Text => v.to_string(),
            Format::Json => envelope("convert", json!({ "dim": v.dim, "vertices": v.vertices, "rays": v.rays })),
        })
    }
}

fn faces_cmd(g: &GlobalArgs, path: &Path) -> Outcome {
    let h = parse_h(path)?;
    if !h.equalities.is_empty() {
        return Err(Error::NotFullDimensional.into());
    }
    let opts = dd_options(g);
    let (cone, shift) = if h.is_homogeneous() { (h, 0) } else { (homogenize(&h), 1) };
    let normals: Vec<Vec<Q>> = cone.inequalities.iter().map(|i| i.normal.clone()).collect();
    let pair = cone_h_to_v(cone.dim, &normals, &opts)?;
    let counts = face_counts(&pair);
    Ok(match g.format {
        Format::Text => {
            counts.iter().enumerate().map(|(i, c)| format!("dimension {}: {c}\n", i + 1 - shift)).collect()
        }
        Format::Json => envelope(
            "faces",
            json!({ "polytope": shift == 1, "lowest_dimension": 1 - shift as i64, "counts": counts }),
        ),
    })
}

fn certify_cmd(g: &GlobalArgs, path: &Path, inequalities: Option<&Path>) -> Outcome {
    let p = load_problem(path)?;
    let extra = extra_inequalities(g, p.vars())?;
    let (outer, layout) = p.outer_bound(&extra)?;
    let names = layout.region_names();
    let targets: Vec<LinearInequality> = match inequalities {
        Some(file) => {
            let text = read(file)?;
            let mut out = Vec::new();
            for (n, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (normal, op) = parse_relation(&names, line)
                    .map_err(|e| Failure::input(anyhow!("{} line {}: {e}", file.display(), n + 1)))?;
                if op != ">=" {
                    return Err(Failure::input(anyhow!("{} line {}: expected `>=`", file.display(), n + 1)));
                }
                out.push(LinearInequality::homogeneous(normal));
            }
            out
        }
        None => {
            let opts = RegionOptions { extra: extra.clone(), chm: ChmOptions { dd: dd_options(g) }, ..RegionOptions::default() };
            rate_region(&p, &opts)?.inequalities
        }
    };
    let mut text = String::new();
    let mut proofs = Vec::new();
    for t in &targets {
        let line = render::relation(&names, &t.normal);
        let lifted = lift_to_parent(&layout, t);
        let cert = match implication_certificate(&outer, &lifted) {
            Ok(c) => c,
            Err(Error::NotImplied { point }) => {
                let region_point: Vec<Q> = layout.region_coords().iter().map(|&c| point[c].clone()).collect();
                return Err(Failure {
                    code: 2,
                    error: anyhow!("`{line}` is not implied; violated at ({})", render::vector(&region_point)),
                });
            }
            Err(e) => return Err(e.into()),
        };
        if !verify_implication(&outer, &lifted, &cert) {
            return Err(Error::CertificateFailed(line).into());
        }
        text.push_str(&render::certificate_text(&format!("{line}  follows from"), &cert, &outer, &layout));
        proofs.push(render::certificate_json(&line, &cert));
    }
    Ok(match g.format {
        Format::Text => text,
        Format::Json => envelope("certify", json!({ "names": names, "certificates": proofs })),
    })
}

fn solve_lp_cmd(g: &GlobalArgs, path: &Path) -> Outcome {
    let text = read(path)?;
    let mut objective: Option<Vec<Q>> = None;
    let mut rows = String::new();
    for (n, line) in text.lines().enumerate() {
        match line.trim().strip_prefix("objective") {
            Some(rest) => {
                let c = rest
                    .split_whitespace()
                    .map(|t| t.parse::<Q>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Failure::input(anyhow!("{} line {}: {e}", path.display(), n + 1)))?;
                objective = Some(c);
            }
            None => {
                rows.push_str(line);
                rows.push('\n');
            }
        }
    }
    let objective = objective.ok_or_else(|| Failure::input(anyhow!("{}: missing `objective` line", path.display())))?;
    let h = parse_hrep(&rows).map_err(|e| Failure::input(anyhow!("{}: {e}", path.display())))?;
    if objective.len() != h.dim {
        return Err(Error::DimensionMismatch { expected: h.dim, found: objective.len() }.into());
    }
    let lp = LinearProgram::with_constraints(h.dim, h.inequalities, h.equalities, objective);
    let (status, value, point) = match lp.solve() {
        LpOutcome::Optimal(s) => ("optimal", Some(s.value), Some(s.point)),
        LpOutcome::Unbounded { .. } => ("unbounded", None, None),
        LpOutcome::Infeasible(_) => ("infeasible", None, None),
    };
    Ok(match g.format {
        Format::Text => match (&value, &point) {
            (Some(v), Some(x)) => format!("{status} {v}\npoint {}\n", render::vector(x)),
            _ => format!("{status}\n"),
        },
        Format::Json => envelope("solve-lp", json!({ "status": status, "value": value, "point": point })),
    })
}
