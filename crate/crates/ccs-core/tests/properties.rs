//! Randomized invariants: every constructed scheme satisfies the axioms, the
//! serialized form round-trips, the brute-force tensor agrees, and realized
//! intersection numbers are accepted by the feasibility model.

use ccs_core::constructors::{
    tensor_product, trivial_scheme, two_orbit_scheme, PermutationGroupInput,
};
use ccs_core::feasibility::check_assignment;
use ccs_core::io::{parse_cc, write_cc};
use ccs_core::scheme::{brute_force_tensor, Scheme};
use proptest::prelude::*;

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

fn group_input() -> impl Strategy<Value = PermutationGroupInput> {
    (2usize..=7).prop_flat_map(|n| {
        prop::collection::vec(permutation(n), 1..=2)
            .prop_map(move |generators| PermutationGroupInput {
                degree: n,
                generators,
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn two_orbit_schemes_verify_and_round_trip(g in group_input()) {
        let s = two_orbit_scheme(&g).unwrap();
        // orbit coloring is invariant under every generator
        for gen in &g.generators {
            for u in 0..g.degree {
                for v in 0..g.degree {
                    prop_assert_eq!(s.color(u, v), s.color(gen[u], gen[v]));
                }
            }
        }
        let text = write_cc(&s);
        let back = parse_cc(&text).unwrap();
        prop_assert_eq!(back.color_matrix(), s.color_matrix());
        prop_assert_eq!(write_cc(&back), text);
    }

    #[test]
    fn two_orbit_tensor_matches_brute_force(g in group_input()) {
        let s = two_orbit_scheme(&g).unwrap();
        let brute = brute_force_tensor(&s);
        let k = s.relation_count();
        for r in 0..k {
            for c in 0..k {
                for t in 0..k {
                    prop_assert_eq!(s.tensor().get(r, c, t), brute.get(r, c, t));
                }
            }
        }
    }

    #[test]
    fn tensor_of_trivials_is_trivial(a in 1usize..=4, b in 1usize..=4) {
        let p = tensor_product(&trivial_scheme(a).unwrap(), &trivial_scheme(b).unwrap());
        let t = trivial_scheme(a * b).unwrap();
        prop_assert_eq!(p.point_count(), t.point_count());
        prop_assert_eq!(p.relation_count(), t.relation_count());
        prop_assert_eq!(p.fiber_count(), t.fiber_count());
    }

    #[test]
    fn tensor_shape_law(g in group_input(), n in 1usize..=3) {
        let s = two_orbit_scheme(&g).unwrap();
        let t = trivial_scheme(n).unwrap();
        let p = tensor_product(&s, &t);
        prop_assert_eq!(p.point_count(), s.point_count() * n);
        prop_assert_eq!(p.relation_count(), s.relation_count() * n * n);
        prop_assert_eq!(p.fiber_count(), s.fiber_count() * n);
    }
}

/// Realized intersection numbers of a balanced scheme satisfy the modeled
/// subsystem constraints used by the feasibility filter.
fn assert_realized_accepted(s: &Scheme) {
    assert_eq!(s.fiber_count(), 2, "test expects a two-fiber scheme");
    let cross: Vec<usize> = s.relations_between(0, 1).iter().map(|h| h.index).collect();
    let homog: Vec<usize> = s.relations_between(0, 0).iter().map(|h| h.index).collect();
    let cross_degrees: Vec<u64> = cross.iter().map(|&r| s.relation_meta(r).degree).collect();
    let homog_degrees: Vec<u64> = homog.iter().map(|&r| s.relation_meta(r).degree).collect();

    // family A realization: R homogeneous, S cross, expand over the cross
    // block
    for &r in &homog {
        for &cs in &cross {
            let assignment: Vec<u64> = cross.iter().map(|&t| s.tensor().get(r, cs, t)).collect();
            assert!(
                check_assignment(
                    &cross_degrees,
                    &assignment,
                    s.relation_meta(r).degree,
                    s.relation_meta(cs).degree,
                    None,
                ),
                "family A realization rejected for ({r},{cs})"
            );
        }
    }
    // family B realization: R, S cross, expand R S^t over the homogeneous
    // block
    let delta = s.diagonal_relation(0);
    let delta_pos = homog.iter().position(|&t| t == delta).unwrap();
    for &r in &cross {
        for &cs in &cross {
            let assignment: Vec<u64> = homog
                .iter()
                .map(|&t| s.tensor().get(r, s.transpose_of(cs), t))
                .collect();
            let expected_delta = if cs == r { s.relation_meta(r).degree } else { 0 };
            assert!(
                check_assignment(
                    &homog_degrees,
                    &assignment,
                    s.relation_meta(r).degree,
                    s.relation_meta(cs).degree,
                    Some((delta_pos, expected_delta)),
                ),
                "family B realization rejected for ({r},{cs})"
            );
        }
    }
}

#[test]
fn realized_intersection_numbers_pass_the_model() {
    use ccs_core::constructors::{load_fixture, FIXTURE_AS16, FIXTURE_FANO};
    assert_realized_accepted(&load_fixture(FIXTURE_FANO).unwrap());
    assert_realized_accepted(&load_fixture(FIXTURE_AS16).unwrap());
}
