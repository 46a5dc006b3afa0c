#[path = "../../validation/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use conevolve::dd::{cone_h_to_v, DdOptions};
use conevolve::groups::{induced_subset_permutation, PermGroup, Permutation};
use conevolve::linalg::{self, dot};
use conevolve::lp::{farkas_certificate, verify_farkas, verify_optimal, LinearProgram, LpOutcome};
use conevolve::polyhedra::{eliminate_equalities, HRep, LinearEquality, LinearInequality};
use conevolve::Q;

use common::*;

fn small_q() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Q::new(n, d))
}

fn big_q() -> impl Strategy<Value = Q> {
    (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Q::new(n, d))
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::from_images(v).unwrap())
}

fn int_rows(dim: usize, max_rows: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, dim), 1..=max_rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rational_field_laws(a in big_q(), b in big_q(), c in small_q()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&(&a * &c) + &(&b * &c), &(&a + &b) * &c);
        if !a.is_zero() {
            prop_assert!((&a * &a.recip()).is_one());
        }
        prop_assert_eq!(a.to_string().parse::<Q>().unwrap(), a.clone());
        prop_assert_eq!(a < b, a.to_big() < b.to_big());
    }

    #[test]
    fn canonical_inequality_is_idempotent_and_orientation_preserving(
        normal in prop::collection::vec(small_q(), 1..6),
        offset in small_q(),
        factor in 1i64..50,
    ) {
        let ineq = LinearInequality::new(normal.clone(), offset.clone());
        let c = ineq.canonical();
        prop_assert_eq!(c.canonical(), c.clone());
        let scaled = LinearInequality::new(linalg::scale(&normal, &q(factor)), &offset * &q(factor));
        prop_assert_eq!(scaled.canonical(), c.clone());
        // Same halfspace: the canonical row is a positive multiple.
        let probe: Vec<Q> = (0..normal.len()).map(|i| q(i as i64 - 2)).collect();
        prop_assert_eq!(ineq.satisfied_by(&probe), c.satisfied_by(&probe));
    }

    #[test]
    fn canonical_equality_ignores_sign(normal in prop::collection::vec(small_q(), 1..6), rhs in small_q()) {
        prop_assume!(!linalg::is_zero_vec(&normal));
        let e = LinearEquality::new(normal.clone(), rhs.clone()).canonical();
        let flipped = LinearEquality::new(linalg::neg(&normal), -&rhs).canonical();
        prop_assert_eq!(e, flipped);
    }

    #[test]
    fn permutation_action_is_a_homomorphism(
        (a, b, v) in (1usize..7).prop_flat_map(|n| (permutation(n), permutation(n), prop::collection::vec(small_q(), n)))
    ) {
        prop_assert_eq!(a.then(&b).act(&v), b.act(&a.act(&v)));
        prop_assert_eq!(a.inverse().act(&a.act(&v)), v.clone());
        // Dot products are invariant under simultaneous action.
        prop_assert_eq!(dot(&a.act(&v), &a.act(&v)), dot(&v, &v));
    }

    #[test]
    fn subset_action_matches_variable_action(g in (1usize..6).prop_flat_map(permutation)) {
        let n = g.degree();
        let induced = induced_subset_permutation(&g);
        prop_assert_eq!(induced.degree(), (1 << n) - 1);
        for mask in 1usize..(1 << n) {
            let mut image = 0usize;
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    image |= 1 << g.image(i);
                }
            }
            prop_assert_eq!(induced.image(mask - 1), image - 1);
        }
    }

    #[test]
    fn group_orbits_partition_points(gens in (2usize..7).prop_flat_map(|n| prop::collection::vec(permutation(n), 1..3))) {
        let n = gens[0].degree();
        let group = PermGroup::new(n, gens.clone()).unwrap();
        let orbits = group.point_orbits();
        let all: BTreeSet<usize> = orbits.iter().flatten().copied().collect();
        prop_assert_eq!(all.len(), n);
        prop_assert_eq!(orbits.iter().map(Vec::len).sum::<usize>(), n);
        let order = group.order().unwrap();
        for orbit in &orbits {
            prop_assert_eq!(order % orbit.len(), 0);
        }
        for g in &gens {
            prop_assert!(group.contains(g).unwrap());
        }
    }

    #[test]
    fn lp_solutions_certify_themselves(
        (dim, rows, objective) in (1usize..=4).prop_flat_map(|d| (Just(d), int_rows(d, 6), prop::collection::vec(-4i64..=4, d))),
        offsets in prop::collection::vec(-5i64..=5, 6),
    ) {
        let ineqs: Vec<LinearInequality> =
            rows.iter().zip(&offsets).map(|(r, &b)| LinearInequality::new(row(r), q(b))).collect();
        let lp = LinearProgram::with_constraints(dim, ineqs, Vec::new(), row(&objective));
        let first = lp.solve();
        prop_assert_eq!(&first, &lp.solve());
        match first {
            LpOutcome::Optimal(s) => prop_assert!(verify_optimal(&lp, &s)),
            LpOutcome::Unbounded { point, ray } => {
                prop_assert!(lp.inequalities.iter().all(|i| i.satisfied_by(&point)));
                prop_assert!(lp.inequalities.iter().all(|i| !dot(&i.normal, &ray).is_negative()));
                prop_assert!(dot(&lp.objective, &ray).is_negative());
            }
            LpOutcome::Infeasible(cert) => prop_assert!(verify_farkas(&lp, &cert)),
        }
        if let Some(cert) = farkas_certificate(&lp) {
            prop_assert!(verify_farkas(&lp, &cert));
        }
    }

    #[test]
    fn elimination_preserves_membership(
        (dim, eq_rows, point) in (2usize..=5).prop_flat_map(|d| (Just(d), int_rows(d, 2), prop::collection::vec(-3i64..=3, d))),
    ) {
        // Equalities built to hold at `point`, so the system is consistent.
        let p = row(&point);
        let eqs: Vec<LinearEquality> = eq_rows.iter().map(|r| LinearEquality::new(row(r), dot(&row(r), &p))).collect();
        let h = HRep::new(dim, Vec::new(), eqs.clone()).unwrap();
        let (reduced, emb) = eliminate_equalities(&h, &[]).unwrap();
        prop_assert_eq!(reduced.dim, dim - rank_of(&eq_rows.iter().map(|r| row(r)).collect::<Vec<_>>(), dim));
        let y = emb.reduce(&p);
        prop_assert_eq!(emb.lift(&y), p.clone());
        let lifted = emb.lift(&vec![Q::one(); reduced.dim]);
        prop_assert!(eqs.iter().all(|e| dot(&e.normal, &lifted) == e.rhs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dd_rays_match_brute_force(
        (dim, extra) in (2usize..=5).prop_flat_map(|d| (Just(d), prop::collection::vec(prop::collection::vec(-2i64..=3, d), 0..=5)))
    ) {
        let mut normals: Vec<Vec<Q>> = (0..dim).map(|i| linalg::unit(dim, i)).collect();
        normals.extend(extra.iter().map(|r| row(r)));
        let rays = brute_force_cone_rays(dim, &normals);
        prop_assume!(rank_of(&rays.iter().cloned().collect::<Vec<_>>(), dim) == dim);
        let pair = cone_h_to_v(dim, &normals, &DdOptions::default()).unwrap();
        let got: BTreeSet<Vec<Q>> = pair.rays.iter().map(|r| primitive(r)).collect();
        prop_assert_eq!(got, rays);
        // Input order does not change the result.
        let mut reversed = normals.clone();
        reversed.reverse();
        let again = cone_h_to_v(dim, &reversed, &DdOptions::default()).unwrap();
        prop_assert_eq!(again.sorted_rays(), pair.sorted_rays());
    }
}
