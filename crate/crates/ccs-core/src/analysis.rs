//! Structural classification of a scheme: balancedness, reducedness, the
//! thin-relation equivalence on fibers, consistency checks for the three
//! structure theorems, the transversal embedding into a tensor product, and
//! direct-sum detection.

use crate::algebra::{self, AlgebraError, IdempotentDecomposition};
use crate::constructors::{restriction, tensor_product, trivial_scheme};
use crate::scheme::{RelationHandle, Scheme};
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("scheme is not balanced")]
    NotBalanced,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Summary invariants of a scheme.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeProfile {
    /// Number of fibers.
    pub fiber_count: usize,
    /// All fibers have this size, when they agree.
    pub fiber_size: Option<usize>,
    pub is_half_homogeneous: bool,
    /// All blocks `R_{X,Y}` have this many relations, when they agree.
    pub is_balanced: bool,
    pub block_rank: Option<usize>,
    /// Primes `p` with every relation degree a power of `p` (and the scheme
    /// half-homogeneous).
    pub p_valenced_primes: Vec<u64>,
    pub thin_relations: Vec<RelationHandle>,
    /// Classes of the equivalence generated by thin relations between fibers,
    /// each sorted, ordered by least member.
    pub e_c_classes: Vec<Vec<usize>>,
    /// Every thin-equivalence class is a singleton.
    pub is_reduced: bool,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
    fn classes(&mut self, n: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            let r = self.find(x);
            match out.iter_mut().find(|c| self.0[c[0]] == r || c[0] == r) {
                Some(c) => c.push(x),
                None => out.push(vec![x]),
            }
        }
        out
    }
}

pub fn profile(s: &Scheme) -> SchemeProfile {
    let n = s.fiber_count();
    let sizes: BTreeSet<usize> = s.fibers().iter().map(|f| f.len()).collect();
    let fiber_size = (sizes.len() == 1).then(|| *sizes.iter().next().unwrap());
    let mut block_ranks = BTreeSet::new();
    for x in 0..n {
        for y in 0..n {
            block_ranks.insert(s.relations_between(x, y).len());
        }
    }
    let is_balanced = block_ranks.len() == 1;
    let block_rank = is_balanced.then(|| *block_ranks.iter().next().unwrap());

    let thin: Vec<RelationHandle> = s
        .relations()
        .filter(|r| {
            let m = s.relation_meta(r.index);
            m.degree == 1 && m.codegree == 1
        })
        .collect();

    let mut uf = UnionFind::new(n);
    for r in &thin {
        uf.union(r.source_fiber, r.target_fiber);
    }
    let e_c_classes = uf.classes(n);
    let is_reduced = e_c_classes.iter().all(|c| c.len() == 1);

    let p_valenced_primes = if fiber_size.is_some() {
        let degrees: Vec<u64> = s.relations().map(|r| s.relation_meta(r.index).degree).collect();
        candidate_primes(&degrees)
    } else {
        Vec::new()
    };

    SchemeProfile {
        fiber_count: n,
        fiber_size,
        is_half_homogeneous: fiber_size.is_some(),
        is_balanced,
        block_rank,
        p_valenced_primes,
        thin_relations: thin,
        e_c_classes,
        is_reduced,
    }
}

/// Primes `p` such that every degree in the list is a power of `p`.
fn candidate_primes(degrees: &[u64]) -> Vec<u64> {
    let max = degrees.iter().copied().max().unwrap_or(1);
    if max <= 1 {
        // every prime works vacuously; report none rather than all
        return Vec::new();
    }
    (2..=max)
        .filter(|&p| (2..p).all(|d| p % d != 0))
        .filter(|&p| degrees.iter().all(|&d| is_power_of(d, p)))
        .collect()
}

pub(crate) fn is_power_of(mut d: u64, p: u64) -> bool {
    if d == 0 {
        return false;
    }
    while d % p == 0 {
        d /= p;
    }
    d == 1
}

/// Per-fiber check of the balanced restriction statement: every central
/// primitive idempotent restricts nontrivially to every fiber, with
/// `n_P = |Fib| * n_{P_X}`.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub applicable: bool,
    pub holds: bool,
    pub per_fiber: Vec<FiberRestrictionCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberRestrictionCheck {
    pub fiber: usize,
    /// Every idempotent has a nonzero restriction to this fiber.
    pub all_nonvanishing: bool,
    /// `n_P = fiber_count * n_{P_X}` for every idempotent.
    pub degrees_match: bool,
    pub restricted_degrees: Vec<usize>,
}

pub fn check_theorem1(
    s: &Scheme,
    dec: &IdempotentDecomposition,
) -> Result<Theorem1Report, AnalysisError> {
    let prof = profile(s);
    let n = s.fiber_count();
    let mut per_fiber = Vec::new();
    let mut holds = true;
    for x in 0..n {
        let mut restricted = Vec::with_capacity(dec.len());
        for p in 0..dec.len() {
            restricted.push(algebra::restricted_degree(s, dec, p, x)?);
        }
        let all_nonvanishing = restricted.iter().all(|&d| d > 0);
        let degrees_match = dec
            .degrees
            .iter()
            .zip(&restricted)
            .all(|(&np, &npx)| np == n * npx);
        holds &= all_nonvanishing && degrees_match;
        per_fiber.push(FiberRestrictionCheck {
            fiber: x,
            all_nonvanishing,
            degrees_match,
            restricted_degrees: restricted,
        });
    }
    Ok(Theorem1Report {
        applicable: prof.is_balanced,
        holds,
        per_fiber,
    })
}

/// Structure check for schemes with at most two central primitive
/// idempotents.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem2Report {
    pub idempotent_count: usize,
    /// `|P| <= 2`; otherwise the check is vacuous.
    pub applicable: bool,
    pub consistent: bool,
    pub detail: String,
    /// With two idempotents: (fibers outside Supp of the non-principal
    /// idempotent, fibers inside).
    pub bipartition: Option<(Vec<usize>, Vec<usize>)>,
}

pub fn check_theorem2(s: &Scheme, dec: &IdempotentDecomposition) -> Theorem2Report {
    let count = dec.len();
    match count {
        1 => {
            // Only the principal idempotent: the scheme must be trivial
            // (every relation thin, every block of rank one).
            let trivial = s.fibers().iter().all(|f| f.len() == 1);
            Theorem2Report {
                idempotent_count: 1,
                applicable: true,
                consistent: trivial,
                detail: if trivial {
                    "single idempotent; scheme is trivial as required".into()
                } else {
                    "single idempotent but a fiber has more than one point".into()
                },
                bipartition: None,
            }
        }
        2 => {
            let other = if dec.principal_index == 0 { 1 } else { 0 };
            let inside: Vec<usize> = dec.supports[other].clone();
            let inside_set: BTreeSet<usize> = inside.iter().copied().collect();
            let outside: Vec<usize> = (0..s.fiber_count())
                .filter(|f| !inside_set.contains(f))
                .collect();
            let mut problems = Vec::new();
            for &f in &outside {
                if s.fibers()[f].len() != 1 {
                    problems.push(format!("fiber {f} outside the support is not a singleton"));
                }
            }
            for x in 0..s.fiber_count() {
                for y in 0..s.fiber_count() {
                    let rank = s.relations_between(x, y).len();
                    let expected = if inside_set.contains(&x) && inside_set.contains(&y) {
                        2
                    } else {
                        1
                    };
                    if rank != expected {
                        problems.push(format!(
                            "block ({x},{y}) has rank {rank}, expected {expected}"
                        ));
                    }
                }
            }
            let consistent = problems.is_empty();
            Theorem2Report {
                idempotent_count: 2,
                applicable: true,
                consistent,
                detail: if consistent {
                    "two idempotents; singleton fibers outside the support, rank-2 blocks inside"
                        .into()
                } else {
                    problems.join("; ")
                },
                bipartition: Some((outside, inside)),
            }
        }
        _ => Theorem2Report {
            idempotent_count: count,
            applicable: false,
            consistent: true,
            detail: format!("{count} idempotents; check is vacuous"),
            bipartition: None,
        },
    }
}

/// Reduction constraints for balanced reduced schemes: if `m < 2r`, or some
/// homogeneous component is p-valenced for a prime not dividing `m`, there
/// can be only one fiber.
#[derive(Debug, Clone, Serialize)]
pub struct Theorem3Report {
    /// Balanced and reduced.
    pub applicable: bool,
    pub clause1_fires: bool,
    /// Primes `p` with `p` not dividing `m` and some `C_X` p-valenced.
    pub clause2_primes: Vec<u64>,
    pub consistent: bool,
    pub detail: String,
}

pub fn check_theorem3(s: &Scheme) -> Theorem3Report {
    let prof = profile(s);
    let applicable = prof.is_balanced && prof.is_reduced;
    if !applicable {
        return Theorem3Report {
            applicable,
            clause1_fires: false,
            clause2_primes: Vec::new(),
            consistent: true,
            detail: "scheme is not balanced and reduced; check is vacuous".into(),
        };
    }
    let m = prof.fiber_size.unwrap_or(0) as u64;
    let r = prof.block_rank.unwrap_or(0) as u64;
    let n = prof.fiber_count;
    let clause1 = m < 2 * r;
    let mut clause2_primes = Vec::new();
    for x in 0..n {
        let degrees: Vec<u64> = s
            .relations_between(x, x)
            .iter()
            .map(|h| s.relation_meta(h.index).degree)
            .collect();
        for p in candidate_primes(&degrees) {
            if m % p != 0 && !clause2_primes.contains(&p) {
                clause2_primes.push(p);
            }
        }
    }
    clause2_primes.sort_unstable();
    let forced = clause1 || !clause2_primes.is_empty();
    let consistent = !forced || n == 1;
    Theorem3Report {
        applicable,
        clause1_fires: clause1,
        clause2_primes,
        consistent,
        detail: if consistent {
            "no clause violated".into()
        } else {
            format!("a reduction clause forces one fiber but the scheme has {n}")
        },
    }
}

/// Result of embedding a balanced scheme into `C_U (x) T_n` along a
/// transversal of the thin-equivalence classes.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    /// Least fiber of each thin-equivalence class.
    pub transversal: Vec<usize>,
    pub class_of_fiber: Vec<usize>,
    /// The point map embeds relations injectively into the tensor product.
    pub embedding_ok: bool,
    /// A single thin-equivalence class.
    pub e_c_trivial: bool,
    /// When the equivalence is trivial: the embedding is onto, giving an
    /// isomorphism with `C_X (x) T_n`.
    pub isomorphic_to_tensor: Option<bool>,
    /// Per class: the restriction to the class is isomorphic to the tensor
    /// product of its leading fiber with the trivial scheme of the class
    /// size.
    pub class_tensor_iso: Vec<bool>,
}

pub fn decompose_by_transversal(s: &Scheme) -> Result<EmbeddingReport, AnalysisError> {
    let prof = profile(s);
    if !prof.is_balanced {
        return Err(AnalysisError::NotBalanced);
    }
    let n = s.fiber_count();
    let classes = &prof.e_c_classes;
    let transversal: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let mut class_of_fiber = vec![0usize; n];
    for (ci, c) in classes.iter().enumerate() {
        for &f in c {
            class_of_fiber[f] = ci;
        }
    }

    // psi: x in fiber X_ij -> (unique preimage under the chosen thin relation
    // from the class leader, slot j within the class).
    let mut psi = vec![(0usize, 0usize); s.point_count()];
    for c in classes {
        let leader = c[0];
        for (slot, &f) in c.iter().enumerate() {
            let thin = s
                .relations_between(leader, f)
                .into_iter()
                .find(|h| {
                    let m = s.relation_meta(h.index);
                    m.degree == 1 && m.codegree == 1
                })
                .expect("class members are joined by a thin relation");
            for &u in &s.fibers()[leader] {
                let v = s.fibers()[f]
                    .iter()
                    .copied()
                    .find(|&v| s.color(u, v) == thin.index)
                    .expect("thin relation is a bijection");
                psi[v] = (u, slot);
            }
        }
    }

    let u_points: Vec<usize> = {
        let mut pts: Vec<usize> = transversal
            .iter()
            .flat_map(|&f| s.fibers()[f].iter().copied())
            .collect();
        pts.sort_unstable();
        pts
    };
    let c_u = restriction(s, &transversal).expect("transversal restriction");
    let t_n = trivial_scheme(n).expect("trivial factor");
    let product = tensor_product(&c_u, &t_n);
    let pos_in_u = |p: usize| u_points.binary_search(&p).unwrap();
    let product_point = |x: usize| pos_in_u(psi[x].0) * n + psi[x].1;

    // The induced relation map must be well-defined and injective.
    let mut forward: Vec<Option<usize>> = vec![None; s.relation_count()];
    let mut seen_target = vec![false; product.relation_count()];
    let mut embedding_ok = true;
    'outer: for u in 0..s.point_count() {
        for v in 0..s.point_count() {
            let src = s.color(u, v);
            let dst = product.color(product_point(u), product_point(v));
            match forward[src] {
                None => {
                    if seen_target[dst] {
                        embedding_ok = false; // not injective
                        break 'outer;
                    }
                    forward[src] = Some(dst);
                    seen_target[dst] = true;
                }
                Some(prev) if prev != dst => {
                    embedding_ok = false; // not well-defined
                    break 'outer;
                }
                _ => {}
            }
        }
    }

    let e_c_trivial = classes.len() == 1;
    let isomorphic_to_tensor =
        e_c_trivial.then(|| embedding_ok && s.point_count() == product.point_count());

    let mut class_tensor_iso = Vec::with_capacity(classes.len());
    if e_c_trivial {
        // The single class covers the whole scheme; no need to restrict.
        class_tensor_iso.push(isomorphic_to_tensor.unwrap_or(false));
        return Ok(EmbeddingReport {
            transversal,
            class_of_fiber,
            embedding_ok,
            e_c_trivial,
            isomorphic_to_tensor,
            class_tensor_iso,
        });
    }
    for c in classes {
        if c.len() == 1 {
            class_tensor_iso.push(true);
            continue;
        }
        let sub = restriction(s, c).expect("class restriction");
        let rep = decompose_by_transversal(&sub)?;
        class_tensor_iso.push(rep.isomorphic_to_tensor.unwrap_or(false));
    }

    Ok(EmbeddingReport {
        transversal,
        class_of_fiber,
        embedding_ok,
        e_c_trivial,
        isomorphic_to_tensor,
        class_tensor_iso,
    })
}

/// Connected components of the fiber graph with an edge when a block has
/// rank at least two. `None` when the graph is connected (no internal
/// direct-sum split).
pub fn find_direct_sum_split(s: &Scheme) -> Option<Vec<Vec<usize>>> {
    let n = s.fiber_count();
    let mut uf = UnionFind::new(n);
    for x in 0..n {
        for y in 0..n {
            if s.relations_between(x, y).len() >= 2 {
                uf.union(x, y);
            }
        }
    }
    let classes = uf.classes(n);
    (classes.len() > 1).then_some(classes)
}

/// Support criterion for a fiber bipartition `U | complement`: every
/// non-principal idempotent must be supported entirely inside one side.
pub fn direct_sum_criterion(dec: &IdempotentDecomposition, u: &[usize]) -> bool {
    let u_set: BTreeSet<usize> = u.iter().copied().collect();
    (0..dec.len()).all(|p| {
        if p == dec.principal_index {
            return true;
        }
        let inside = dec.supports[p].iter().any(|f| u_set.contains(f));
        let outside = dec.supports[p].iter().any(|f| !u_set.contains(f));
        !(inside && outside)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::central_primitive_idempotents;
    use crate::constructors::{
        design_scheme, fano_plane, internal_direct_sum, load_fixture, tensor_product,
        trivial_scheme, FIXTURE_AS16,
    };

    fn fano() -> Scheme {
        design_scheme(&fano_plane()).unwrap()
    }

    #[test]
    fn fano_profile() {
        let p = profile(&fano());
        assert_eq!(p.fiber_count, 2);
        assert_eq!(p.fiber_size, Some(7));
        assert!(p.is_balanced);
        assert_eq!(p.block_rank, Some(2));
        assert!(p.is_reduced);
        assert_eq!(p.thin_relations.len(), 2);
        assert!(p.p_valenced_primes.is_empty());
    }

    #[test]
    fn fixture_profile() {
        let s = load_fixture(FIXTURE_AS16).unwrap();
        let p = profile(&s);
        assert_eq!(p.fiber_count, 2);
        assert_eq!(p.fiber_size, Some(8));
        assert_eq!(p.block_rank, Some(4));
        assert!(p.is_balanced && p.is_reduced);
    }

    #[test]
    fn theorem1_holds_on_battery() {
        for s in [fano(), load_fixture(FIXTURE_AS16).unwrap()] {
            let dec = central_primitive_idempotents(&s).unwrap();
            let rep = check_theorem1(&s, &dec).unwrap();
            assert!(rep.applicable && rep.holds, "{rep:?}");
        }
    }

    #[test]
    fn theorem2_two_idempotent_case() {
        let s = fano();
        let dec = central_primitive_idempotents(&s).unwrap();
        let rep = check_theorem2(&s, &dec);
        assert!(rep.applicable && rep.consistent, "{}", rep.detail);
        let (outside, inside) = rep.bipartition.unwrap();
        assert!(outside.is_empty());
        assert_eq!(inside, vec![0, 1]);
    }

    #[test]
    fn theorem2_single_idempotent_case() {
        let s = trivial_scheme(3).unwrap();
        let dec = central_primitive_idempotents(&s).unwrap();
        let rep = check_theorem2(&s, &dec);
        assert!(rep.applicable && rep.consistent, "{}", rep.detail);
    }

    #[test]
    fn theorem3_consistent_on_battery() {
        for s in [fano(), load_fixture(FIXTURE_AS16).unwrap(), trivial_scheme(4).unwrap()] {
            let rep = check_theorem3(&s);
            assert!(rep.consistent, "{}", rep.detail);
        }
    }

    #[test]
    fn tensor_with_trivial_recovers_factor() {
        let s = tensor_product(&fano(), &trivial_scheme(2).unwrap());
        let p = profile(&s);
        assert_eq!(p.fiber_count, 4);
        assert_eq!(p.e_c_classes.len(), 2);
        let rep = decompose_by_transversal(&s).unwrap();
        assert!(rep.embedding_ok);
        assert!(rep.class_tensor_iso.iter().all(|&b| b));
    }

    #[test]
    fn reduced_scheme_embedding_is_identity_like() {
        let s = fano();
        let rep = decompose_by_transversal(&s).unwrap();
        assert_eq!(rep.transversal, vec![0, 1]);
        assert!(rep.embedding_ok);
        assert!(!rep.e_c_trivial);
    }

    #[test]
    fn direct_sum_split_found() {
        let a = fano();
        let b = trivial_scheme(1).unwrap();
        let s = internal_direct_sum(&a, &b);
        let split = find_direct_sum_split(&s).unwrap();
        assert_eq!(split.len(), 2);
        let dec = central_primitive_idempotents(&s).unwrap();
        for part in &split {
            assert!(direct_sum_criterion(&dec, part));
        }
    }

    #[test]
    fn no_split_on_fixture() {
        let s = load_fixture(FIXTURE_AS16).unwrap();
        assert!(find_direct_sum_split(&s).is_none());
    }
}
