//! Dense exact linear algebra over `Q`.

use crate::rational::{gcd_numerators, lcm_denominators, Q};
use num_bigint::BigInt;
use num_traits::One;

pub type Vector = Vec<Q>;

pub fn zeros(n: usize) -> Vector {
    vec![Q::zero(); n]
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = zeros(n);
    v[i] = Q::one();
    v
}

pub fn ints(xs: &[i64]) -> Vector {
    xs.iter().map(|&x| Q::from_int(x)).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Q::zero();
    for (x, y) in a.iter().zip(b) {
        acc.add_mul(x, y);
    }
    acc
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(Q::is_zero)
}

pub fn neg(a: &[Q]) -> Vector {
    a.iter().map(|x| -x).collect()
}

pub fn scale(a: &[Q], s: &Q) -> Vector {
    a.iter().map(|x| x * s).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Q], b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `sa * a + sb * b`.
pub fn combine(sa: &Q, a: &[Q], sb: &Q, b: &[Q]) -> Vector {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut v = x * sa;
            v.add_mul(sb, y);
            v
        })
        .collect()
}

/// Positive scalar that turns `a` into coprime integers (1 for the zero vector).
pub fn primitive_scale(a: &[Q]) -> Q {
    if is_zero_vec(a) {
        return Q::one();
    }
    let l = lcm_denominators(a);
    let scaled: Vec<Q> = if l.is_one() {
        a.to_vec()
    } else {
        let lq = Q::from_bigint(l.clone());
        a.iter().map(|x| x * &lq).collect()
    };
    let g = gcd_numerators(&scaled);
    Q::from_bigint(l) / Q::from_bigint(g)
}

/// Scale by a positive factor to coprime integers. Orientation is kept.
pub fn primitive(a: &[Q]) -> Vector {
    let s = primitive_scale(a);
    if s.is_one() {
        a.to_vec()
    } else {
        scale(a, &s)
    }
}

/// Coprime integers with the first nonzero entry positive.
pub fn primitive_signed(a: &[Q]) -> Vector {
    let p = primitive(a);
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => neg(&p),
        _ => p,
    }
}

pub fn to_bigints(a: &[Q]) -> Vec<BigInt> {
    a.iter().map(|x| x.numer()).collect()
}

/// Reduced row echelon form in place. Returns pivot columns.
pub fn rref(m: &mut Vec<Vector>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        if !inv.is_one() {
            for x in m[row].iter_mut() {
                *x *= &inv;
            }
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (c, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    other[c].sub_mul(&f, pv);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(rows: &[Vector]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let mut m = rows.to_vec();
    rref(&mut m, n).len()
}

/// Basis of `{x : rows * x = 0}`, each vector primitive.
pub fn nullspace(rows: &[Vector], n: usize) -> Vec<Vector> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zeros(n);
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -&m[r][f];
            }
            primitive_signed(&v)
        })
        .collect()
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_rows(rows: &[Vector], n: usize) -> Vec<usize> {
    let mut basis: Vec<(usize, Vector)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let mut v = r.clone();
        for (p, b) in &basis {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for c in 0..n {
                    if !b[c].is_zero() {
                        v[c].sub_mul(&f, &b[c]);
                    }
                }
            }
        }
        if let Some(p) = (0..n).find(|&c| !v[c].is_zero()) {
            let inv = v[p].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            for (_, b) in basis.iter_mut() {
                if !b[p].is_zero() {
                    let f = b[p].clone();
                    for c in 0..n {
                        if !v[c].is_zero() {
                            b[c].sub_mul(&f, &v[c]);
                        }
                    }
                }
            }
            basis.push((p, v));
            chosen.push(i);
            if chosen.len() == n {
                break;
            }
        }
    }
    chosen
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse(m: &[Vector]) -> Option<Vec<Vector>> {
    let n = m.len();
    let mut aug: Vec<Vector> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend(unit(n, i));
            row
        })
        .collect();
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// One solution of `rows * x = rhs`, or `None` if inconsistent.
pub fn solve(rows: &[Vector], rhs: &[Q], n: usize) -> Option<Vector> {
    let mut aug: Vec<Vector> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = zeros(n);
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][n].clone();
    }
    Some(x)
}

pub fn transpose(m: &[Vector], ncols: usize) -> Vec<Vector> {
    (0..ncols).map(|c| m.iter().map(|r| r[c].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_forms() {
        assert_eq!(primitive(&ints(&[-4, 2, 0])), ints(&[-2, 1, 0]));
        assert_eq!(primitive_signed(&ints(&[-4, 2, 0])), ints(&[2, -1, 0]));
        let v = vec![Q::new(1, 2), Q::new(-1, 3)];
        assert_eq!(primitive(&v), ints(&[3, -2]));
    }

    #[test]
    fn inverse_and_solve() {
        let m = vec![ints(&[2, 1]), ints(&[1, 1])];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![ints(&[1, -1]), ints(&[-1, 2])]);
        assert!(inverse(&[ints(&[1, 2]), ints(&[2, 4])]).is_none());
        let x = solve(&m, &ints(&[3, 2]), 2).unwrap();
        assert_eq!(x, ints(&[1, 1]));
        assert!(solve(&[ints(&[1, 1]), ints(&[2, 2])], &ints(&[1, 3]), 2).is_none());
    }

    #[test]
    fn nullspace_and_rank() {
        let rows = vec![ints(&[1, 1, 0]), ints(&[0, 1, 1])];
        assert_eq!(rank(&rows), 2);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns, vec![ints(&[1, -1, 1])]);
        assert_eq!(independent_rows(&[ints(&[1, 1]), ints(&[2, 2]), ints(&[0, 1])], 2), vec![0, 2]);
    }
}
