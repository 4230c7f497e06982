//! Cohomology property suite: the oracle equality, the vanishing and
//! annihilator statements across levels, and the intermediate subgroups
//! between the plus subgroup and the full group at the 2-power levels.

use brauerkit::cohomology::{
    self, gl2, h0, h1, h1_full_function_space, h1_restriction_injectivity, sl2, sl2_plus,
    FiniteMatrixGroup, ModMatrix, DEFAULT_GROUP_CAP,
};

#[test]
fn fixed_points_vanish_up_to_sixteen() {
    for n in 2..=16u64 {
        let g = sl2_plus(n, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(h0(&g), vec![(0, 0)], "fixed points at n = {}", n);
    }
}

#[test]
fn h1_vanishes_at_odd_prime_powers() {
    for q in [3u64, 5, 7, 9] {
        let g = sl2(q, DEFAULT_GROUP_CAP).unwrap();
        let h = h1(&g).unwrap();
        assert!(h.is_trivial(), "q = {}: {:?}", q, h.invariant_factors);
    }
}

#[test]
fn annihilator_bound_for_two_power_levels() {
    for r in 1..=3u32 {
        let n = 1u64 << r;
        let bound = 1u64 << (r - 1);
        let g = sl2_plus(n, DEFAULT_GROUP_CAP).unwrap();
        let h = h1(&g).unwrap();
        assert_eq!(bound % h.exponent, 0, "r = {}: {:?}", r, h.invariant_factors);
    }
}

/// Intermediate groups between the plus subgroup and the full group at
/// n in {4, 8}: generated by the plus subgroup together with sampled
/// extra elements; the annihilator bound persists.
#[test]
fn annihilator_bound_for_intermediate_groups() {
    for (n, r) in [(4u64, 2u32), (8, 3)] {
        let bound = 1u64 << (r - 1);
        let plus = sl2_plus(n, DEFAULT_GROUP_CAP).unwrap();
        let full = gl2(n, DEFAULT_GROUP_CAP).unwrap();
        // sampled coset representatives to adjoin
        let extras: Vec<ModMatrix> = full
            .elements
            .iter()
            .filter(|m| !plus.contains(m))
            .step_by(full.order() / 6)
            .take(4)
            .copied()
            .collect();
        for extra in extras {
            let mut gens = plus.gens.clone();
            gens.push(extra);
            let g = FiniteMatrixGroup::generate(n, gens, DEFAULT_GROUP_CAP).unwrap();
            assert!(g.order() >= plus.order() && g.order() <= full.order());
            let h = h1(&g).unwrap();
            assert_eq!(
                bound % h.exponent,
                0,
                "n = {}, adjoined {}, order {}: exponent {}",
                n,
                extra,
                g.order(),
                h.exponent
            );
        }
        // the full group itself
        let h = h1(&full).unwrap();
        assert_eq!(bound % h.exponent, 0, "full group at n = {}", n);
    }
}

#[test]
fn generator_relation_h1_equals_function_space_h1_up_to_order_60() {
    // every test group of order at most 60 must agree with the full
    // function-space computation
    let mut groups: Vec<(String, FiniteMatrixGroup)> = vec![
        ("sl2(2)".into(), sl2(2, 100).unwrap()),
        ("sl2plus(2)".into(), sl2_plus(2, 100).unwrap()),
        ("sl2(3)".into(), sl2(3, 100).unwrap()),
        ("sl2(4)".into(), sl2(4, 100).unwrap()),
        ("sl2plus(4)".into(), sl2_plus(4, 100).unwrap()),
        ("gl2(2)".into(), gl2(2, 100).unwrap()),
        ("gl2(3)".into(), gl2(3, 100).unwrap()),
    ];
    // a few small ad hoc groups with nontrivial module interaction
    groups.push((
        "neg-id mod 4".into(),
        FiniteMatrixGroup::generate(4, vec![ModMatrix::new(4, [3, 0, 0, 3])], 10).unwrap(),
    ));
    groups.push((
        "unipotent mod 6".into(),
        FiniteMatrixGroup::generate(6, vec![ModMatrix::new(6, [1, 1, 0, 1])], 10).unwrap(),
    ));
    groups.push((
        "borel mod 4".into(),
        FiniteMatrixGroup::generate(
            4,
            vec![
                ModMatrix::new(4, [1, 1, 0, 1]),
                ModMatrix::new(4, [3, 0, 0, 1]),
            ],
            40,
        )
        .unwrap(),
    ));
    for (name, g) in &groups {
        assert!(g.order() <= 60, "{} too large for the oracle", name);
        let fast = h1(g).unwrap();
        let slow = h1_full_function_space(g);
        assert_eq!(
            fast.invariant_factors, slow,
            "{}: generator-relation {:?} vs function-space {:?}",
            name, fast.invariant_factors, slow
        );
    }
}

#[test]
fn representatives_satisfy_every_pair_relation() {
    for n in [4u64, 8] {
        let g = sl2_plus(n, DEFAULT_GROUP_CAP).unwrap();
        let h = h1(&g).unwrap();
        for rep in &h.representatives {
            assert!(rep.satisfies_all_relations(&g));
        }
    }
}

#[test]
fn coprime_order_kills_h1() {
    // |SL2+(Z/2)| = 3 acting on (Z/2)^2
    let g = sl2_plus(2, 100).unwrap();
    assert!(h1(&g).unwrap().is_trivial());
}

#[test]
fn restriction_injectivity_examples() {
    let g = gl2(3, 100).unwrap();
    let s = g.subgroup_where(|m| m.det() == 1).unwrap();
    assert!(h1_restriction_injectivity(&g, &s).unwrap());
    let g = sl2_plus(8, DEFAULT_GROUP_CAP).unwrap();
    assert!(h1_restriction_injectivity(&g, &g).unwrap());
}

#[test]
fn product_injectivity_at_composite_levels() {
    for (n, n1, n2) in [(6u64, 2u64, 3u64), (12, 4, 3)] {
        let g = sl2_plus(n, DEFAULT_GROUP_CAP).unwrap();
        assert!(
            cohomology::product_decomposition_injectivity(&g, n1, n2).unwrap(),
            "n = {}",
            n
        );
    }
}
