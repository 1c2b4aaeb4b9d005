//! Constructions: trivial scheme, tensor product, restriction, internal
//! direct sum, symmetric-design scheme, 2-orbit scheme of a permutation
//! group, and bundled fixtures.
//!
//! Every constructor routes its color matrix through
//! [`verify_scheme`](crate::scheme::verify_scheme), so outputs always satisfy
//! the axioms.

use crate::io;
use crate::scheme::{verify_scheme, Scheme};
use thiserror::Error;

/// A permutation group given by explicit image arrays on `0..degree-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationGroupInput {
    pub degree: usize,
    pub generators: Vec<Vec<usize>>,
}

/// A symmetric 2-design given by its points-by-blocks incidence matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignInput {
    pub incidence: Vec<Vec<u8>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("trivial scheme needs at least one point")]
    ZeroPoints,
    #[error("fiber set is empty")]
    EmptyFiberSet,
    #[error("fiber index {0} out of range")]
    BadFiberIndex(usize),
    #[error("not a symmetric design: {0}")]
    NotASymmetricDesign(String),
    #[error("invalid permutation input: {0}")]
    BadPermutation(String),
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

/// The trivial scheme `T_n`: `n` singleton fibers, `n^2` thin relations.
pub fn trivial_scheme(n: usize) -> Result<Scheme, ConstructError> {
    if n == 0 {
        return Err(ConstructError::ZeroPoints);
    }
    let matrix: Vec<Vec<usize>> = (0..n).map(|u| (0..n).map(|v| u * n + v).collect()).collect();
    Ok(verify_scheme(&matrix).expect("trivial scheme is coherent"))
}

/// Tensor product on `V_a x V_b` with relations `R_a (x) R_b`, ordered
/// lexicographically in `(index_a, index_b)`. Points `(u_a, u_b)` map to
/// `u_a * |V_b| + u_b`.
pub fn tensor_product(a: &Scheme, b: &Scheme) -> Scheme {
    let (na, nb) = (a.point_count(), b.point_count());
    let kb = b.relation_count();
    let n = na * nb;
    let mut matrix = vec![vec![0usize; n]; n];
    for ua in 0..na {
        for ub in 0..nb {
            for va in 0..na {
                for vb in 0..nb {
                    matrix[ua * nb + ub][va * nb + vb] = a.color(ua, va) * kb + b.color(ub, vb);
                }
            }
        }
    }
    verify_scheme(&matrix).expect("tensor product of schemes is coherent")
}

/// Restriction to a union of fibers. Points keep their relative order;
/// surviving relations are renumbered by first-occurrence scan order.
pub fn restriction(s: &Scheme, fibers: &[usize]) -> Result<Scheme, ConstructError> {
    if fibers.is_empty() {
        return Err(ConstructError::EmptyFiberSet);
    }
    for &f in fibers {
        if f >= s.fiber_count() {
            return Err(ConstructError::BadFiberIndex(f));
        }
    }
    let mut points: Vec<usize> = s
        .fibers()
        .iter()
        .enumerate()
        .filter(|(i, _)| fibers.contains(i))
        .flat_map(|(_, pts)| pts.iter().copied())
        .collect();
    points.sort_unstable();
    let m = points.len();
    let mut recolor = vec![usize::MAX; s.relation_count()];
    let mut next = 0usize;
    let mut matrix = vec![vec![0usize; m]; m];
    for (i, &u) in points.iter().enumerate() {
        for (j, &v) in points.iter().enumerate() {
            let c = s.color(u, v);
            if recolor[c] == usize::MAX {
                recolor[c] = next;
                next += 1;
            }
            matrix[i][j] = recolor[c];
        }
    }
    Ok(verify_scheme(&matrix).expect("restriction of a scheme is coherent"))
}

/// Internal direct sum: disjoint union of the point sets with exactly one
/// relation `X x Y` (and its transpose) across every cross fiber pair.
pub fn internal_direct_sum(a: &Scheme, b: &Scheme) -> Scheme {
    let (na, nb) = (a.point_count(), b.point_count());
    let (ka, kb) = (a.relation_count(), b.relation_count());
    let fb = b.fiber_count();
    let n = na + nb;
    let mut matrix = vec![vec![0usize; n]; n];
    for u in 0..na {
        for v in 0..na {
            matrix[u][v] = a.color(u, v);
        }
    }
    for u in 0..nb {
        for v in 0..nb {
            matrix[na + u][na + v] = ka + b.color(u, v);
        }
    }
    for u in 0..na {
        for v in 0..nb {
            let pair = a.fiber_of_point(u) * fb + b.fiber_of_point(v);
            matrix[u][na + v] = ka + kb + 2 * pair;
            matrix[na + v][u] = ka + kb + 2 * pair + 1;
        }
    }
    verify_scheme(&matrix).expect("internal direct sum of schemes is coherent")
}

/// The `(m,2,2)`-scheme of a symmetric design on `V = X u B`, with the eight
/// relations `Delta_X`, `Delta_B`, the two off-diagonal complements, the
/// incidence relation, its transpose, and their complements, in that order.
pub fn design_scheme(d: &DesignInput) -> Result<Scheme, ConstructError> {
    let v = d.incidence.len();
    let bad = |msg: &str| ConstructError::NotASymmetricDesign(msg.to_string());
    if v < 2 {
        return Err(bad("needs at least two points"));
    }
    for row in &d.incidence {
        if row.len() != v {
            return Err(bad("incidence matrix must be square (v = b)"));
        }
        if row.iter().any(|&x| x > 1) {
            return Err(bad("incidence entries must be 0 or 1"));
        }
    }
    let k: usize = d.incidence[0].iter().map(|&x| x as usize).sum();
    for (i, row) in d.incidence.iter().enumerate() {
        let sum: usize = row.iter().map(|&x| x as usize).sum();
        if sum != k {
            return Err(bad(&format!("row {i} has sum {sum}, expected constant {k}")));
        }
    }
    for j in 0..v {
        let sum: usize = (0..v).map(|i| d.incidence[i][j] as usize).sum();
        if sum != k {
            return Err(bad(&format!(
                "column {j} has sum {sum}, expected constant {k}"
            )));
        }
    }
    if k == 0 {
        return Err(bad("incidence relation is empty"));
    }
    if k == v {
        return Err(bad("complement relation is empty (all-ones incidence)"));
    }
    let lambda: usize = (0..v)
        .map(|j| (d.incidence[0][j] & d.incidence[1][j]) as usize)
        .sum();
    for i in 0..v {
        for l in i + 1..v {
            let shared: usize = (0..v)
                .map(|j| (d.incidence[i][j] & d.incidence[l][j]) as usize)
                .sum();
            if shared != lambda {
                return Err(bad(&format!(
                    "rows {i} and {l} share {shared} blocks, expected constant {lambda}"
                )));
            }
        }
    }

    // Points 0..v are X, points v..2v are B. Colors 0..7 are R_1..R_8.
    let n = 2 * v;
    let mut matrix = vec![vec![0usize; n]; n];
    for u in 0..v {
        for w in 0..v {
            matrix[u][w] = if u == w { 0 } else { 2 };
            matrix[v + u][v + w] = if u == w { 1 } else { 3 };
            matrix[u][v + w] = if d.incidence[u][w] == 1 { 4 } else { 6 };
            matrix[v + w][u] = if d.incidence[u][w] == 1 { 5 } else { 7 };
        }
    }
    Ok(verify_scheme(&matrix).expect("symmetric design scheme is coherent"))
}

/// The 2-orbit scheme of a permutation group: relations are the orbits of the
/// generated group on `Omega x Omega` under the entrywise action, numbered by
/// least pair in row-major order.
pub fn two_orbit_scheme(g: &PermutationGroupInput) -> Result<Scheme, ConstructError> {
    let n = g.degree;
    if n == 0 {
        return Err(ConstructError::BadPermutation("degree must be positive".into()));
    }
    if g.generators.is_empty() {
        return Err(ConstructError::BadPermutation("generator list is empty".into()));
    }
    for (i, gen) in g.generators.iter().enumerate() {
        if gen.len() != n {
            return Err(ConstructError::BadPermutation(format!(
                "generator {i} has length {}, expected {n}",
                gen.len()
            )));
        }
        let mut hit = vec![false; n];
        for &img in gen {
            if img >= n || hit[img] {
                return Err(ConstructError::BadPermutation(format!(
                    "generator {i} is not a bijection on 0..{n}"
                )));
            }
            hit[img] = true;
        }
    }

    // Union-find over Omega x Omega, seeded by the generator action.
    let mut parent: Vec<usize> = (0..n * n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for gen in &g.generators {
        for u in 0..n {
            for v in 0..n {
                let a = find(&mut parent, u * n + v);
                let b = find(&mut parent, gen[u] * n + gen[v]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut color_of_root = vec![usize::MAX; n * n];
    let mut next = 0usize;
    let mut matrix = vec![vec![0usize; n]; n];
    for u in 0..n {
        for v in 0..n {
            let root = find(&mut parent, u * n + v);
            if color_of_root[root] == usize::MAX {
                color_of_root[root] = next;
                next += 1;
            }
            matrix[u][v] = color_of_root[root];
        }
    }
    Ok(verify_scheme(&matrix).expect("2-orbit coloring of a group is coherent"))
}

/// The 16-point reduced `(8,2,4)`-scheme (thin residue fission of `as16`
/// No. 122).
pub const FIXTURE_AS16: &str = "as16-122-fission";
/// The `(7,2,2)`-scheme of the Fano plane.
pub const FIXTURE_FANO: &str = "fano-design";

pub fn fixture_names() -> &'static [&'static str] {
    &[FIXTURE_AS16, FIXTURE_FANO]
}

/// Loads a bundled, pre-verified scheme by name.
pub fn load_fixture(name: &str) -> Result<Scheme, ConstructError> {
    let text = match name {
        FIXTURE_AS16 => include_str!("../data/as16-122-fission.cc"),
        FIXTURE_FANO => include_str!("../data/fano-design.cc"),
        other => return Err(ConstructError::UnknownFixture(other.to_string())),
    };
    Ok(io::parse_cc(text).expect("bundled fixture is a valid scheme"))
}

/// The Fano plane as a 7x7 incidence matrix (points by lines).
pub fn fano_plane() -> DesignInput {
    let lines: [[usize; 3]; 7] = [
        [0, 1, 2],
        [0, 3, 4],
        [0, 5, 6],
        [1, 3, 5],
        [1, 4, 6],
        [2, 3, 6],
        [2, 4, 5],
    ];
    let mut incidence = vec![vec![0u8; 7]; 7];
    for (j, line) in lines.iter().enumerate() {
        for &p in line {
            incidence[p][j] = 1;
        }
    }
    DesignInput { incidence }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_schemes() {
        assert!(matches!(trivial_scheme(0), Err(ConstructError::ZeroPoints)));
        let t1 = trivial_scheme(1).unwrap();
        assert_eq!(t1.relation_count(), 1);
        let t2 = trivial_scheme(2).unwrap();
        assert_eq!(t2.relation_count(), 4);
        assert_eq!(t2.fiber_count(), 2);
        // every cross block is a single thin relation
        for x in 0..2 {
            for y in 0..2 {
                let rels = t2.relations_between(x, y);
                assert_eq!(rels.len(), 1);
                assert!(t2.is_thin(rels[0].index));
            }
        }
    }

    #[test]
    fn tensor_with_t1_preserves_shape() {
        let fano = load_fixture(FIXTURE_FANO).unwrap();
        let t1 = trivial_scheme(1).unwrap();
        let p = tensor_product(&t1, &fano);
        assert_eq!(p.point_count(), fano.point_count());
        assert_eq!(p.relation_count(), fano.relation_count());
        assert_eq!(p.fiber_count(), fano.fiber_count());
    }

    #[test]
    fn tensor_degree_law() {
        let fano = load_fixture(FIXTURE_FANO).unwrap();
        let t2 = trivial_scheme(2).unwrap();
        let p = tensor_product(&fano, &t2);
        let kb = t2.relation_count();
        for ra in 0..fano.relation_count() {
            for rb in 0..kb {
                assert_eq!(
                    p.relation_meta(ra * kb + rb).degree,
                    fano.relation_meta(ra).degree * t2.relation_meta(rb).degree
                );
            }
        }
    }

    /// The two matrices induce the same partition of point pairs (colors may
    /// be renumbered).
    fn same_partition(a: &Scheme, b: &Scheme) -> bool {
        let n = a.point_count();
        if n != b.point_count() || a.relation_count() != b.relation_count() {
            return false;
        }
        let mut map = vec![usize::MAX; a.relation_count()];
        for u in 0..n {
            for v in 0..n {
                let (ca, cb) = (a.color(u, v), b.color(u, v));
                if map[ca] == usize::MAX {
                    map[ca] = cb;
                } else if map[ca] != cb {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn restriction_to_all_fibers_is_identity() {
        let fano = load_fixture(FIXTURE_FANO).unwrap();
        let r = restriction(&fano, &[0, 1]).unwrap();
        assert!(same_partition(&r, &fano));
    }

    #[test]
    fn restriction_of_fano_to_points_is_rank_two() {
        let fano = load_fixture(FIXTURE_FANO).unwrap();
        let r = restriction(&fano, &[0]).unwrap();
        assert_eq!(r.point_count(), 7);
        assert_eq!(r.relation_count(), 2);
    }

    #[test]
    fn restriction_errors() {
        let fano = load_fixture(FIXTURE_FANO).unwrap();
        assert!(matches!(restriction(&fano, &[]), Err(ConstructError::EmptyFiberSet)));
        assert!(matches!(restriction(&fano, &[7]), Err(ConstructError::BadFiberIndex(7))));
    }

    #[test]
    fn direct_sum_of_trivials() {
        let t1 = trivial_scheme(1).unwrap();
        let s = internal_direct_sum(&t1, &t1);
        let t2 = trivial_scheme(2).unwrap();
        assert!(same_partition(&s, &t2));
    }

    #[test]
    fn direct_sum_relation_count() {
        let fano = load_fixture(FIXTURE_FANO).unwrap();
        let t3 = trivial_scheme(3).unwrap();
        let s = internal_direct_sum(&fano, &t3);
        assert_eq!(
            s.relation_count(),
            fano.relation_count() + t3.relation_count() + 2 * fano.fiber_count() * t3.fiber_count()
        );
    }

    #[test]
    fn fano_design_scheme() {
        let s = design_scheme(&fano_plane()).unwrap();
        assert_eq!(s.point_count(), 14);
        assert_eq!(s.relation_count(), 8);
        assert_eq!(s.fiber_count(), 2);
        assert_eq!(s.degree_multiset(0, 0), vec![1, 6]);
        assert_eq!(s.degree_multiset(0, 1), vec![3, 4]);
        // complement degree m - k
        assert_eq!(s.relation_meta(6).degree, 7 - 3);
    }

    #[test]
    fn all_ones_design_rejected() {
        let d = DesignInput {
            incidence: vec![vec![1; 3]; 3],
        };
        assert!(matches!(design_scheme(&d), Err(ConstructError::NotASymmetricDesign(_))));
    }

    #[test]
    fn non_constant_rows_rejected() {
        let d = DesignInput {
            incidence: vec![vec![1, 0, 0], vec![1, 1, 0], vec![0, 1, 1]],
        };
        assert!(matches!(design_scheme(&d), Err(ConstructError::NotASymmetricDesign(_))));
    }

    #[test]
    fn identity_group_gives_trivial_scheme() {
        let g = PermutationGroupInput {
            degree: 2,
            generators: vec![vec![0, 1]],
        };
        let s = two_orbit_scheme(&g).unwrap();
        assert_eq!(s.color_matrix(), trivial_scheme(2).unwrap().color_matrix());
    }

    #[test]
    fn cyclic_seven_has_seven_relations() {
        let g = PermutationGroupInput {
            degree: 7,
            generators: vec![vec![1, 2, 3, 4, 5, 6, 0]],
        };
        let s = two_orbit_scheme(&g).unwrap();
        assert_eq!(s.fiber_count(), 1);
        assert_eq!(s.relation_count(), 7);
    }

    #[test]
    fn symmetric_group_on_three_points_is_rank_two() {
        let g = PermutationGroupInput {
            degree: 3,
            generators: vec![vec![1, 0, 2], vec![1, 2, 0]],
        };
        let s = two_orbit_scheme(&g).unwrap();
        assert_eq!(s.relation_count(), 2);
    }

    #[test]
    fn two_orbit_generator_closure() {
        let g = PermutationGroupInput {
            degree: 7,
            generators: vec![vec![1, 2, 3, 4, 5, 6, 0]],
        };
        let s = two_orbit_scheme(&g).unwrap();
        for gen in &g.generators {
            for u in 0..7 {
                for v in 0..7 {
                    assert_eq!(s.color(u, v), s.color(gen[u], gen[v]));
                }
            }
        }
    }

    #[test]
    fn bad_permutation_rejected() {
        let g = PermutationGroupInput {
            degree: 3,
            generators: vec![vec![0, 0, 1]],
        };
        assert!(matches!(two_orbit_scheme(&g), Err(ConstructError::BadPermutation(_))));
    }

    #[test]
    fn unknown_fixture() {
        assert!(matches!(
            load_fixture("bogus"),
            Err(ConstructError::UnknownFixture(_))
        ));
    }

    #[test]
    fn as16_fixture_shape() {
        let s = load_fixture(FIXTURE_AS16).unwrap();
        assert_eq!(s.point_count(), 16);
        assert_eq!(s.relation_count(), 16);
        assert_eq!(s.fiber_count(), 2);
        assert_eq!(s.fibers()[0].len(), 8);
        assert_eq!(s.degree_multiset(0, 1), vec![2, 2, 2, 2]);
        assert_eq!(s.degree_multiset(0, 0), vec![1, 1, 2, 4]);
    }

    #[test]
    fn fano_fixture_matches_design_constructor() {
        let fixture = load_fixture(FIXTURE_FANO).unwrap();
        let built = design_scheme(&fano_plane()).unwrap();
        assert_eq!(fixture.color_matrix(), built.color_matrix());
    }
}
