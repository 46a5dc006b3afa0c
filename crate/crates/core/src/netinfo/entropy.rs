//! Coordinates of the entropy space and the Shannon outer bound.

use crate::error::{Error, Result};
use crate::linalg::{self, Vector};
use crate::polyhedra::{HRep, LinearInequality};
use crate::rational::Q;

/// Subset of `{1..=n}` as a bitmask; bit `i-1` stands for variable `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarSet(pub u32);

impl VarSet {
    pub fn of(vars: &[usize]) -> VarSet {
        VarSet(vars.iter().fold(0, |m, &v| m | (1 << (v - 1))))
    }

    pub fn single(v: usize) -> VarSet {
        VarSet(1 << (v - 1))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: VarSet) -> VarSet {
        VarSet(self.0 | o.0)
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 & (1 << (v - 1)) != 0
    }

    pub fn is_subset(self, o: VarSet) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn members(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 & (1 << b) != 0).map(|b| b + 1).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
}

/// Index of the entropy coordinates `h_A`, `A` a nonempty subset of `n`
/// variables. Coordinate `i` is the set with bitmask `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntropyIndex {
    n: usize,
}

impl EntropyIndex {
    pub fn new(n: usize) -> Result<EntropyIndex> {
        if n == 0 || n > 20 {
            return Err(Error::InvalidProblem(format!("unsupported number of variables: {n}")));
        }
        Ok(EntropyIndex { n })
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        (1 << self.n) - 1
    }

    pub fn full(&self) -> VarSet {
        VarSet((1 << self.n) - 1)
    }

    pub fn coord(&self, s: VarSet) -> usize {
        debug_assert!(!s.is_empty() && s.0 <= self.full().0);
        s.0 as usize - 1
    }

    pub fn set(&self, coord: usize) -> VarSet {
        VarSet(coord as u32 + 1)
    }

    pub fn name(&self, coord: usize) -> String {
        let m: Vec<String> = self.set(coord).members().iter().map(usize::to_string).collect();
        format!("h_{{{}}}", m.join(","))
    }

    /// Accepts `h_{1,3}`, `h_{13}` and `h13` (the last two only for single-digit variables).
    pub fn parse_name(&self, name: &str) -> Result<usize> {
        let err = || Error::Parse(format!("unknown entropy coordinate `{name}`"));
        let body = name.trim().strip_prefix('h').ok_or_else(err)?;
        let body = body.strip_prefix('_').unwrap_or(body);
        let body = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')).unwrap_or(body);
        let vars: Vec<usize> = if body.contains(',') {
            body.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| err())).collect::<Result<_>>()?
        } else {
            body.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(err)).collect::<Result<_>>()?
        };
        if vars.is_empty() || vars.iter().any(|&v| v == 0 || v > self.n) {
            return Err(err());
        }
        Ok(self.coord(VarSet::of(&vars)))
    }

    /// Coefficients of `H(A|B) = h_{A∪B} - h_B`, accumulated into `v` with weight `w`.
    pub fn add_conditional(&self, v: &mut Vector, a: VarSet, b: VarSet, w: i64) {
        let ab = a.union(b);
        if ab == b {
            return;
        }
        v[self.coord(ab)] += Q::from_int(w);
        if !b.is_empty() {
            v[self.coord(b)] -= Q::from_int(w);
        }
    }

    /// Coefficients of `I(A;B|C)`.
    pub fn mutual_information(&self, a: VarSet, b: VarSet, c: VarSet) -> Vector {
        let mut v = linalg::zeros(self.dim());
        let mut add = |s: VarSet, w: i64| {
            if !s.is_empty() {
                v[self.coord(s)] += Q::from_int(w);
            }
        };
        add(a.union(c), 1);
        add(b.union(c), 1);
        add(a.union(b).union(c), -1);
        add(c, -1);
        v
    }
}

/// Elemental Shannon inequalities: `H(X_i | X_rest) ≥ 0` for `i = n..1`, then
/// `I(X_i; X_j | X_K) ≥ 0` grouped by `K` (smaller sets first), pairs `i < j`
/// avoiding `K`.
pub fn shannon_outer_bound(n: usize) -> Result<HRep> {
    let idx = EntropyIndex::new(n)?;
    let full = idx.full();
    let mut rows = Vec::new();
    for i in (1..=n).rev() {
        let mut v = linalg::zeros(idx.dim());
        let rest = VarSet(full.0 & !VarSet::single(i).0);
        idx.add_conditional(&mut v, VarSet::single(i), rest, 1);
        rows.push(v);
    }
    let mut conditioning: Vec<u32> = (0..=full.0).collect();
    conditioning.sort_by_key(|k| (k.count_ones(), *k));
    for k in conditioning {
        let k = VarSet(k);
        for i in 1..=n {
            for j in i + 1..=n {
                if !k.contains(i) && !k.contains(j) {
                    rows.push(idx.mutual_information(VarSet::single(i), VarSet::single(j), k));
                }
            }
        }
    }
    HRep::new(idx.dim(), rows.into_iter().map(LinearInequality::homogeneous).collect(), Vec::new())
}

/// Parse one homogeneous inequality over named entropy coordinates, such as
/// `h_{1,2} + h_{2,3} - h_{2} - h_{1,2,3} >= 0` or `2 h_{1} <= h_{1,2}`.
pub fn parse_entropy_inequality(idx: &EntropyIndex, line: &str) -> Result<LinearInequality> {
    let (op, (lhs, rhs)) = if let Some(p) = line.split_once(">=") {
        (">=", p)
    } else if let Some(p) = line.split_once("<=") {
        ("<=", p)
    } else {
        return Err(Error::Parse(format!("missing >= or <= in `{line}`")));
    };
    let mut v = linalg::zeros(idx.dim());
    let mut constant = Q::zero();
    accumulate_linear(idx, lhs, 1, &mut v, &mut constant)?;
    accumulate_linear(idx, rhs, -1, &mut v, &mut constant)?;
    if !constant.is_zero() {
        return Err(Error::Parse(format!("inequality is not homogeneous: `{line}`")));
    }
    if op == "<=" {
        v = linalg::neg(&v);
    }
    Ok(LinearInequality::homogeneous(v))
}

fn accumulate_linear(idx: &EntropyIndex, expr: &str, sign: i64, v: &mut Vector, constant: &mut Q) -> Result<()> {
    let spaced = expr.replace('+', " + ").replace('-', " - ");
    let mut coef = Q::from_int(sign);
    let mut pending: Option<Q> = None;
    for tok in spaced.split_whitespace() {
        match tok {
            "+" => {}
            "-" => coef = -coef,
            "*" => {}
            t if t.starts_with('h') => {
                let c = idx.parse_name(t)?;
                let scale = pending.take().unwrap_or_else(Q::one);
                v[c] += &coef * &scale;
                coef = Q::from_int(sign);
            }
            t => {
                let t = t.trim_end_matches('*');
                let q: Q = t.parse().map_err(|_| Error::Parse(format!("unexpected token `{tok}`")))?;
                if q.is_zero() && pending.is_none() {
                    // A bare `0` side.
                    coef = Q::from_int(sign);
                    continue;
                }
                pending = Some(q);
            }
        }
    }
    if let Some(q) = pending {
        *constant += &coef * &q;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ints;

    #[test]
    fn shannon_counts() {
        for (n, c) in [(2, 3), (3, 9), (4, 28), (6, 246)] {
            assert_eq!(shannon_outer_bound(n).unwrap().inequalities.len(), c, "n = {n}");
        }
    }

    #[test]
    fn gamma2_rows() {
        let h = shannon_outer_bound(2).unwrap();
        let rows: Vec<Vector> = h.inequalities.iter().map(|i| i.normal.clone()).collect();
        assert_eq!(rows, vec![ints(&[-1, 0, 1]), ints(&[0, -1, 1]), ints(&[1, 1, -1])]);
    }

    #[test]
    fn gamma3_rows_in_listed_order() {
        let h = shannon_outer_bound(3).unwrap();
        let rows: Vec<Vector> = h.inequalities.iter().map(|i| i.normal.clone()).collect();
        let expected = [
            [0, 0, -1, 0, 0, 0, 1],
            [0, 0, 0, 0, -1, 0, 1],
            [0, 0, 0, 0, 0, -1, 1],
            [1, 1, -1, 0, 0, 0, 0],
            [1, 0, 0, 1, -1, 0, 0],
            [0, 1, 0, 1, 0, -1, 0],
            [-1, 0, 1, 0, 1, 0, -1],
            [0, -1, 1, 0, 0, 1, -1],
            [0, 0, 0, -1, 1, 1, -1],
        ];
        assert_eq!(rows, expected.iter().map(|r| ints(r)).collect::<Vec<_>>());
    }

    #[test]
    fn names() {
        let idx = EntropyIndex::new(3).unwrap();
        assert_eq!(idx.name(4), "h_{1,3}");
        assert_eq!(idx.parse_name("h_{1,3}").unwrap(), 4);
        assert_eq!(idx.parse_name("h13").unwrap(), 4);
        assert!(idx.parse_name("h_{4}").is_err());
    }

    #[test]
    fn parses_named_inequality() {
        let idx = EntropyIndex::new(2).unwrap();
        let i = parse_entropy_inequality(&idx, "h_{1} + h_{2} >= h_{1,2}").unwrap();
        assert_eq!(i.normal, ints(&[1, 1, -1]));
        let i = parse_entropy_inequality(&idx, "2 h_{1} <= h_{1,2}").unwrap();
        assert_eq!(i.normal, ints(&[-2, 0, 1]));
        assert!(parse_entropy_inequality(&idx, "h_{1} >= 1").is_err());
        assert!(parse_entropy_inequality(&idx, "h_{1} = 1").is_err());
    }
}
