//! Fixtures and brute-force oracles shared by the acceptance and property targets.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use conevolve::groups::PermGroup;
use conevolve::netinfo::region::parse_relation;
use conevolve::netinfo::{EntropyIndex, NetworkProblem};
use conevolve::polyhedra::{HRep, LinearEquality, LinearInequality};
use conevolve::Q;

pub type Row = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_int(n)
}

pub fn row(xs: &[i64]) -> Row {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn load_problem(name: &str) -> NetworkProblem {
    let text = std::fs::read_to_string(data_path(name)).expect("fixture file");
    NetworkProblem::from_json(&text).expect("fixture problem")
}

/// Extreme rays of the Shannon cone on three variables, coordinates
/// (h1, h2, h12, h3, h13, h23, h123).
pub fn gamma3_rays() -> Vec<Row> {
    [
        [0, 1, 1, 1, 1, 1, 1],
        [1, 0, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, 1, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [1, 0, 1, 0, 1, 0, 1],
        [0, 0, 0, 1, 1, 1, 1],
        [1, 1, 1, 0, 1, 1, 1],
        [1, 1, 2, 1, 2, 2, 2],
    ]
    .iter()
    .map(|r| row(r))
    .collect()
}

/// Network constraints of the three-source running example, written over
/// six-variable entropies.
pub const RUNNING_EQUALITIES: [(&str, &str); 9] = [
    ("h1 + h2 + h3", "h123"),
    ("h123456", "h123"),
    ("h1456", "h456"),
    ("h24", "h4"),
    ("h25", "h5"),
    ("h26", "h6"),
    ("h345", "h45"),
    ("h346", "h46"),
    ("h356", "h56"),
];

pub fn running_equalities(idx: &EntropyIndex) -> Vec<LinearEquality> {
    let side = |s: &str, sign: i64, v: &mut Row| {
        for name in s.split('+') {
            let c = idx.parse_name(name.trim()).expect("entropy name");
            v[c] += q(sign);
        }
    };
    RUNNING_EQUALITIES
        .iter()
        .map(|(l, r)| {
            let mut v = vec![Q::zero(); idx.dim()];
            side(l, 1, &mut v);
            side(r, -1, &mut v);
            LinearEquality::new(v, Q::zero())
        })
        .collect()
}

/// Rate region of the running example in `rate >= source` form.
pub const RUNNING_REGION: [&str; 13] = [
    "0 >= -w1",
    "0 >= -w2",
    "0 >= -w3",
    "+R4 >= +w2",
    "+R5 >= +w2",
    "+R6 >= +w2",
    "+R4 +R5 >= +2 w2 +w3",
    "+R4 +R6 >= +2 w2 +w3",
    "+R5 +R6 >= +2 w2 +w3",
    "+2 R4 +2 R5 +2 R6 >= +2 w1 +6 w2 +3 w3",
    "+2 R4 +R5 +R6 >= +w1 +4 w2 +2 w3",
    "+R4 +2 R5 +R6 >= +w1 +4 w2 +2 w3",
    "+R4 +R5 +2 R6 >= +w1 +4 w2 +2 w3",
];

pub const FANO_REGION: [&str; 13] = [
    "0 >= -w2",
    "0 >= -w1",
    "0 >= -w3",
    "+R6 >= +w3",
    "+R5 >= +w3",
    "+R7 >= +w1",
    "+R4 >= +w1",
    "+R6 +R7 >= +w2 +w3",
    "+R4 +R6 >= +w2 +w3",
    "+R4 +R5 >= +w2 +w3",
    "+R6 +R7 >= +w1 +w2",
    "+R4 +R6 >= +w1 +w2",
    "+R4 +R5 >= +w1 +w2",
];

pub const IDSC8_GENERATORS: &str = "(5,8)(6,7), (4,5)(6,8), (4,6)(7,8), (1,2)";

/// Canonical inequality set parsed from region lines.
pub fn parse_region(names: &[String], lines: &[&str]) -> BTreeSet<LinearInequality> {
    lines
        .iter()
        .map(|l| {
            let (normal, op) = parse_relation(names, l).expect("region line");
            assert_eq!(op, ">=", "{l}");
            LinearInequality::homogeneous(normal).canonical()
        })
        .collect()
}

pub fn canonical_set(ineqs: &[LinearInequality]) -> BTreeSet<LinearInequality> {
    ineqs.iter().map(LinearInequality::canonical).collect()
}

/// The unit cube `0 <= x_i <= 1` in `dim` coordinates.
pub fn cube(dim: usize) -> HRep {
    let mut rows = Vec::new();
    for i in 0..dim {
        let mut lo = vec![Q::zero(); dim];
        lo[i] = Q::one();
        rows.push(LinearInequality::new(lo, Q::zero()));
        let mut hi = vec![Q::zero(); dim];
        hi[i] = -Q::one();
        rows.push(LinearInequality::new(hi, -Q::one()));
    }
    HRep::new(dim, rows, Vec::new()).expect("cube")
}

pub fn symmetric_group(degree: usize) -> PermGroup {
    PermGroup::symmetric(degree)
}

/// Reduced row echelon form in place; returns the pivot columns.
fn echelon(m: &mut [Row], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

pub fn rank_of(rows: &[Row], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    echelon(&mut m, ncols).len()
}

/// The unique solution of a square system, if it is nonsingular.
pub fn solve_square(rows: &[Row], rhs: &[Q]) -> Option<Row> {
    let n = rows.len();
    let mut m: Vec<Row> = rows.iter().zip(rhs).map(|(r, b)| r.iter().cloned().chain([b.clone()]).collect()).collect();
    let piv = echelon(&mut m, n);
    if piv.len() < n {
        return None;
    }
    Some(m.iter().map(|r| r[n].clone()).collect())
}

/// A nonzero kernel vector of a rank `n-1` system.
fn kernel_line(rows: &[Row], n: usize) -> Row {
    let mut m = rows.to_vec();
    let piv = echelon(&mut m, n);
    let free = (0..n).find(|c| !piv.contains(c)).expect("corank one");
    let mut x = vec![Q::zero(); n];
    x[free] = Q::one();
    for (r, &p) in piv.iter().enumerate() {
        x[p] = -m[r][free].clone();
    }
    x
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scale a nonzero vector to coprime integers with its sign kept.
pub fn primitive(v: &[Q]) -> Row {
    use num_integer::Integer;
    let lcm = v.iter().fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(&x.denom()));
    let ints: Vec<num_bigint::BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let g = ints.iter().fold(num_bigint::BigInt::from(0), |acc, x| acc.gcd(x));
    ints.iter().map(|x| Q::from_bigint(x / &g)).collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] != i + n - k) else { return out };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Minimum of `c·x` over `{x : a·x >= b}` by enumerating every basic
/// solution; `None` when no vertex is feasible. Assumes a pointed, bounded region.
pub fn brute_force_lp_min(dim: usize, rows: &[(Row, Q)], objective: &[Q]) -> Option<Q> {
    let mut best: Option<Q> = None;
    for s in combinations(rows.len(), dim) {
        let a: Vec<Row> = s.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<Q> = s.iter().map(|&i| rows[i].1.clone()).collect();
        let Some(x) = solve_square(&a, &b) else { continue };
        if rows.iter().all(|(n, o)| dot(n, &x) >= *o) {
            let val = dot(objective, &x);
            if best.as_ref().map_or(true, |b| val < *b) {
                best = Some(val);
            }
        }
    }
    best
}

/// Extreme rays of `{x : a·x >= 0}` as primitive integer vectors, from every
/// corank-one subset of normals.
pub fn brute_force_cone_rays(dim: usize, normals: &[Row]) -> BTreeSet<Row> {
    let mut out = BTreeSet::new();
    if dim == 1 {
        for cand in [row(&[1]), row(&[-1])] {
            if normals.iter().all(|a| !dot(a, &cand).is_negative()) {
                out.insert(cand);
            }
        }
        return out;
    }
    for s in combinations(normals.len(), dim - 1) {
        let sub: Vec<Row> = s.iter().map(|&i| normals[i].clone()).collect();
        if rank_of(&sub, dim) + 1 != dim {
            continue;
        }
        let line = kernel_line(&sub, dim);
        for cand in [line.clone(), line.iter().map(|x| -x).collect()] {
            if normals.iter().all(|a| !dot(a, &cand).is_negative()) {
                out.insert(primitive(&cand));
            }
        }
    }
    out
}

/// Facet normals of a full-dimensional cone: the input normals whose tight rays span a hyperplane.
pub fn brute_force_cone_facets(dim: usize, normals: &[Row], rays: &BTreeSet<Row>) -> BTreeSet<Row> {
    normals
        .iter()
        .filter(|a| {
            let tight: Vec<Row> = rays.iter().filter(|r| dot(a, r).is_zero()).cloned().collect();
            rank_of(&tight, dim) + 1 == dim
        })
        .map(|a| primitive(a))
        .collect()
}

/// Arithmetic re-check of a certificate written as raw multipliers, without
/// going through the library's verifier.
pub fn certificate_holds(h: &HRep, target: &LinearInequality, ineq: &[Q], eq: &[Q]) -> bool {
    if ineq.len() != h.inequalities.len() || eq.len() != h.equalities.len() || ineq.iter().any(Q::is_negative) {
        return false;
    }
    let mut combo = vec![Q::zero(); h.dim];
    let mut rhs = Q::zero();
    for (lam, r) in ineq.iter().zip(&h.inequalities) {
        for (c, a) in combo.iter_mut().zip(&r.normal) {
            *c = &*c + &(lam * a);
        }
        rhs = &rhs + &(lam * &r.offset);
    }
    for (mu, e) in eq.iter().zip(&h.equalities) {
        for (c, a) in combo.iter_mut().zip(&e.normal) {
            *c = &*c + &(mu * a);
        }
        rhs = &rhs + &(mu * &e.rhs);
    }
    combo == target.normal && rhs >= target.offset
}
