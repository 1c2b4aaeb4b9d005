//! Scheme representation, axiom verification, fibers, degrees and the
//! intersection tensor.

use thiserror::Error;

/// A verified coherent configuration.
///
/// Immutable after construction; all derived metadata (fibers, transpose
/// pairing, degrees, intersection tensor) is populated by [`verify_scheme`].
#[derive(Debug, Clone)]
pub struct Scheme {
    point_count: usize,
    relation_count: usize,
    /// Row-major `point_count x point_count` matrix of relation indices.
    colors: Vec<usize>,
    transpose: Vec<usize>,
    fibers: Vec<Vec<usize>>,
    point_fiber: Vec<usize>,
    relation_meta: Vec<RelationMeta>,
    tensor: IntersectionTensor,
}

/// Per-relation metadata: fiber pair, degree, codegree and cardinality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct RelationMeta {
    pub source_fiber: usize,
    pub target_fiber: usize,
    /// Out-valency `d_R`: entries per row of the source fiber.
    pub degree: u64,
    /// In-valency `e_R`: entries per column of the target fiber.
    pub codegree: u64,
    /// `|R| = |X| d_R = |Y| e_R`.
    pub cardinality: u64,
}

/// A relation index together with its fiber pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct RelationHandle {
    pub index: usize,
    pub source_fiber: usize,
    pub target_fiber: usize,
}

/// The constants `c_RS^T`, stored densely over all relation triples.
/// Incompatible triples hold zero.
#[derive(Debug, Clone)]
pub struct IntersectionTensor {
    relation_count: usize,
    constants: Vec<u64>,
}

impl IntersectionTensor {
    fn zero(relation_count: usize) -> Self {
        IntersectionTensor {
            relation_count,
            constants: vec![0; relation_count * relation_count * relation_count],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, s: usize, t: usize) -> u64 {
        self.constants[(r * self.relation_count + s) * self.relation_count + t]
    }

    #[inline]
    fn set(&mut self, r: usize, s: usize, t: usize, value: u64) {
        self.constants[(r * self.relation_count + s) * self.relation_count + t] = value;
    }

    pub fn relation_count(&self) -> usize {
        self.relation_count
    }
}

/// A witness for a failed (C4) check: two pairs of the same relation `T`
/// seeing different counts for the triple `(R, S, T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InconstancyWitness {
    pub r: usize,
    pub s: usize,
    pub t: usize,
    pub first_pair: (usize, usize),
    pub first_count: u64,
    pub second_pair: (usize, usize),
    pub second_count: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("matrix is not square: row {row} has length {len}, expected {expected}")]
    NonSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("colors are not contiguous: color {missing} does not occur (max color {max})")]
    NonContiguousColors { missing: usize, max: usize },
    #[error("diagonal color {color} also occurs off-diagonal at ({row},{col})")]
    DiagonalNotFiberUnion {
        color: usize,
        row: usize,
        col: usize,
    },
    #[error(
        "relation {color} is not transpose-closed: ({u},{v}) maps to color {found}, expected {expected}"
    )]
    TransposeNotClosed {
        color: usize,
        u: usize,
        v: usize,
        found: usize,
        expected: usize,
    },
    #[error(
        "intersection number c[{r},{s}]^[{t}] is not constant: pair {first_pair:?} sees {first_count}, pair {second_pair:?} sees {second_count}",
        r = .0.r, s = .0.s, t = .0.t,
        first_pair = .0.first_pair, first_count = .0.first_count,
        second_pair = .0.second_pair, second_count = .0.second_count
    )]
    IntersectionNumberNotConstant(Box<InconstancyWitness>),
}

/// Checks (C1)-(C4) on a color matrix and builds the [`Scheme`] with all
/// metadata and the full intersection tensor.
///
/// Fibers are ordered by smallest point index. The relation numbering of the
/// input matrix is preserved.
pub fn verify_scheme(matrix: &[Vec<usize>]) -> Result<Scheme, VerifyError> {
    let n = matrix.len();
    if n == 0 {
        return Err(VerifyError::EmptyMatrix);
    }
    for (row, data) in matrix.iter().enumerate() {
        if data.len() != n {
            return Err(VerifyError::NonSquare {
                row,
                len: data.len(),
                expected: n,
            });
        }
    }
    let colors: Vec<usize> = matrix.iter().flatten().copied().collect();

    // (C1): colors 0..k-1, each nonempty.
    let max = *colors.iter().max().expect("nonempty");
    let k = max + 1;
    let mut seen = vec![false; k];
    for &c in &colors {
        seen[c] = true;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(VerifyError::NonContiguousColors { missing, max });
    }

    // (C2): diagonal colors occur only on the diagonal; they induce the fibers.
    let mut diagonal = vec![false; k];
    for u in 0..n {
        diagonal[matrix[u][u]] = true;
    }
    for u in 0..n {
        for v in 0..n {
            if u != v && diagonal[matrix[u][v]] {
                return Err(VerifyError::DiagonalNotFiberUnion {
                    color: matrix[u][v],
                    row: u,
                    col: v,
                });
            }
        }
    }
    // Fibers ordered by smallest point index (scan order of the diagonal).
    let mut fiber_of_diag_color = vec![usize::MAX; k];
    let mut fibers: Vec<Vec<usize>> = Vec::new();
    let mut point_fiber = vec![0usize; n];
    for u in 0..n {
        let c = matrix[u][u];
        if fiber_of_diag_color[c] == usize::MAX {
            fiber_of_diag_color[c] = fibers.len();
            fibers.push(Vec::new());
        }
        point_fiber[u] = fiber_of_diag_color[c];
        fibers[fiber_of_diag_color[c]].push(u);
    }

    // (C3): the entrywise transpose induces a pairing on colors.
    let mut transpose = vec![usize::MAX; k];
    for u in 0..n {
        for v in 0..n {
            let c = matrix[u][v];
            let ct = matrix[v][u];
            if transpose[c] == usize::MAX {
                transpose[c] = ct;
            } else if transpose[c] != ct {
                return Err(VerifyError::TransposeNotClosed {
                    color: c,
                    u,
                    v,
                    found: ct,
                    expected: transpose[c],
                });
            }
        }
    }
    // Every color was seen, so the pairing is total; scanning both (u,v) and
    // (v,u) forces it to be an involution.
    debug_assert!((0..k).all(|c| transpose[transpose[c]] == c));

    // Each relation must lie inside a single fiber block. A violation is a
    // (C4) inconstancy for the triple (Delta_X, R, R).
    let mut block_of: Vec<Option<(usize, usize, (usize, usize))>> = vec![None; k];
    for u in 0..n {
        for v in 0..n {
            let c = matrix[u][v];
            match block_of[c] {
                None => block_of[c] = Some((point_fiber[u], point_fiber[v], (u, v))),
                Some((sf, _, first_pair)) => {
                    if sf != point_fiber[u] {
                        let delta = matrix[fibers[sf][0]][fibers[sf][0]];
                        return Err(VerifyError::IntersectionNumberNotConstant(Box::new(
                            InconstancyWitness {
                                r: delta,
                                s: c,
                                t: c,
                                first_pair,
                                first_count: 1,
                                second_pair: (u, v),
                                second_count: 0,
                            },
                        )));
                    }
                    if block_of[c].unwrap().1 != point_fiber[v] {
                        let tf = block_of[c].unwrap().1;
                        let delta = matrix[fibers[tf][0]][fibers[tf][0]];
                        return Err(VerifyError::IntersectionNumberNotConstant(Box::new(
                            InconstancyWitness {
                                r: c,
                                s: delta,
                                t: c,
                                first_pair,
                                first_count: 1,
                                second_pair: (u, v),
                                second_count: 0,
                            },
                        )));
                    }
                }
            }
        }
    }

    // (C4): per-pair counting against a first-witness baseline, per relation T.
    let mut tensor = IntersectionTensor::zero(k);
    let mut baseline_pair: Vec<Option<(usize, usize)>> = vec![None; k];
    let mut baselines: Vec<Vec<u64>> = vec![Vec::new(); k];
    let mut counts = vec![0u64; k * k];
    for u in 0..n {
        for v in 0..n {
            let t = matrix[u][v];
            counts.iter_mut().for_each(|c| *c = 0);
            for w in 0..n {
                counts[matrix[u][w] * k + matrix[w][v]] += 1;
            }
            match baseline_pair[t] {
                None => {
                    baseline_pair[t] = Some((u, v));
                    baselines[t] = counts.clone();
                    for r in 0..k {
                        for s in 0..k {
                            tensor.set(r, s, t, counts[r * k + s]);
                        }
                    }
                }
                Some(first) => {
                    if let Some(pos) = (0..k * k).find(|&i| counts[i] != baselines[t][i]) {
                        return Err(VerifyError::IntersectionNumberNotConstant(Box::new(
                            InconstancyWitness {
                                r: pos / k,
                                s: pos % k,
                                t,
                                first_pair: first,
                                first_count: baselines[t][pos],
                                second_pair: (u, v),
                                second_count: counts[pos],
                            },
                        )));
                    }
                }
            }
        }
    }

    // Degrees. Constancy over rows/columns of the fiber block is implied by
    // (C4) with T = Delta, which the sweep above already covered.
    let mut relation_meta = Vec::with_capacity(k);
    for c in 0..k {
        let (sf, tf, _) = block_of[c].expect("every color occurs");
        let u0 = fibers[sf][0];
        let degree = matrix[u0].iter().filter(|&&x| x == c).count() as u64;
        let v0 = fibers[tf][0];
        let codegree = (0..n).filter(|&u| matrix[u][v0] == c).count() as u64;
        let cardinality = fibers[sf].len() as u64 * degree;
        debug_assert_eq!(cardinality, fibers[tf].len() as u64 * codegree);
        relation_meta.push(RelationMeta {
            source_fiber: sf,
            target_fiber: tf,
            degree,
            codegree,
            cardinality,
        });
    }

    Ok(Scheme {
        point_count: n,
        relation_count: k,
        colors,
        transpose,
        fibers,
        point_fiber,
        relation_meta,
        tensor,
    })
}

impl Scheme {
    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn relation_count(&self) -> usize {
        self.relation_count
    }

    #[inline]
    pub fn color(&self, u: usize, v: usize) -> usize {
        self.colors[u * self.point_count + v]
    }

    pub fn color_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.point_count)
            .map(|u| self.colors[u * self.point_count..(u + 1) * self.point_count].to_vec())
            .collect()
    }

    /// The transpose pairing `R -> R^t` on relation indices.
    pub fn transpose_of(&self, relation: usize) -> usize {
        self.transpose[relation]
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn fiber_count(&self) -> usize {
        self.fibers.len()
    }

    pub fn fiber_of_point(&self, point: usize) -> usize {
        self.point_fiber[point]
    }

    pub fn relation_meta(&self, relation: usize) -> &RelationMeta {
        &self.relation_meta[relation]
    }

    pub fn relation(&self, index: usize) -> RelationHandle {
        let meta = &self.relation_meta[index];
        RelationHandle {
            index,
            source_fiber: meta.source_fiber,
            target_fiber: meta.target_fiber,
        }
    }

    pub fn relations(&self) -> impl Iterator<Item = RelationHandle> + '_ {
        (0..self.relation_count).map(|i| self.relation(i))
    }

    /// The relations contained in `X x Y`.
    pub fn relations_between(&self, x: usize, y: usize) -> Vec<RelationHandle> {
        self.relations()
            .filter(|r| r.source_fiber == x && r.target_fiber == y)
            .collect()
    }

    /// The diagonal relation `Delta_X` of a fiber.
    pub fn diagonal_relation(&self, fiber: usize) -> usize {
        let p = self.fibers[fiber][0];
        self.color(p, p)
    }

    pub fn tensor(&self) -> &IntersectionTensor {
        &self.tensor
    }

    /// `c_RS^T`; zero for incompatible triples.
    pub fn intersection_number(
        &self,
        r: RelationHandle,
        s: RelationHandle,
        t: RelationHandle,
    ) -> u64 {
        self.tensor.get(r.index, s.index, t.index)
    }

    /// The complex product `RS = {T | c_RS^T > 0}`.
    pub fn complex_product(
        &self,
        r: RelationHandle,
        s: RelationHandle,
    ) -> Result<Vec<RelationHandle>, IncompatibleRelations> {
        if r.target_fiber != s.source_fiber {
            return Err(IncompatibleRelations {
                r: r.index,
                s: s.index,
            });
        }
        Ok(self
            .relations()
            .filter(|t| self.tensor.get(r.index, s.index, t.index) > 0)
            .collect())
    }

    /// The multiset `d_{X,Y}` of degrees of the relations in `X x Y`,
    /// in ascending order.
    pub fn degree_multiset(&self, x: usize, y: usize) -> Vec<u64> {
        let mut degrees: Vec<u64> = self
            .relations_between(x, y)
            .iter()
            .map(|r| self.relation_meta[r.index].degree)
            .collect();
        degrees.sort_unstable();
        degrees
    }

    /// Whether `color(x, y) == relation` has `(x, y)` with `x` in fiber of
    /// `relation`'s source. Convenience for thinness: `d_R = e_R = 1`.
    pub fn is_thin(&self, relation: usize) -> bool {
        let meta = &self.relation_meta[relation];
        meta.degree == 1 && meta.codegree == 1
    }

    /// The adjacency matrix of a relation as exact integers.
    pub fn adjacency_matrix(&self, relation: usize) -> Vec<Vec<i64>> {
        let n = self.point_count;
        let mut a = vec![vec![0i64; n]; n];
        for u in 0..n {
            for v in 0..n {
                if self.color(u, v) == relation {
                    a[u][v] = 1;
                }
            }
        }
        a
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("incompatible relations: target fiber of {r} differs from source fiber of {s}")]
pub struct IncompatibleRelations {
    pub r: usize,
    pub s: usize,
}

/// Recomputes every `c_RS^T` by aggregate counting of colored triangles
/// `(u, w, v)` over points, independent of the first-witness path used during
/// verification. Serves as the oracle for tensor correctness.
pub fn brute_force_tensor(s: &Scheme) -> IntersectionTensor {
    let n = s.point_count();
    let k = s.relation_count();
    let mut acc = vec![0u64; k * k * k];
    for u in 0..n {
        for v in 0..n {
            let t = s.color(u, v);
            for w in 0..n {
                acc[(s.color(u, w) * k + s.color(w, v)) * k + t] += 1;
            }
        }
    }
    let mut tensor = IntersectionTensor::zero(k);
    for r in 0..k {
        for sc in 0..k {
            for t in 0..k {
                let total = acc[(r * k + sc) * k + t];
                let pairs = s.relation_meta(t).cardinality;
                assert_eq!(total % pairs, 0, "triangle count not divisible by |T|");
                tensor.set(r, sc, t, total / pairs);
            }
        }
    }
    tensor
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_scheme() {
        let s = verify_scheme(&[vec![0]]).unwrap();
        assert_eq!(s.point_count(), 1);
        assert_eq!(s.relation_count(), 1);
        assert_eq!(s.fiber_count(), 1);
        assert_eq!(s.intersection_number(s.relation(0), s.relation(0), s.relation(0)), 1);
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(matches!(verify_scheme(&[]), Err(VerifyError::EmptyMatrix)));
    }

    #[test]
    fn non_square_rejected() {
        let err = verify_scheme(&[vec![0, 1], vec![1]]).unwrap_err();
        assert!(matches!(err, VerifyError::NonSquare { row: 1, .. }));
    }

    #[test]
    fn non_contiguous_colors_rejected() {
        // color 1 is skipped
        let err = verify_scheme(&[vec![0, 2], vec![2, 0]]).unwrap_err();
        assert!(matches!(err, VerifyError::NonContiguousColors { missing: 1, .. }));
    }

    #[test]
    fn diagonal_color_off_diagonal_rejected() {
        let err = verify_scheme(&[vec![0, 0], vec![0, 0]]).unwrap_err();
        assert!(matches!(err, VerifyError::DiagonalNotFiberUnion { color: 0, .. }));
    }

    #[test]
    fn transpose_not_closed_rejected() {
        // color 1 at (0,1) and (1,2); transpose cells disagree: (1,0) is 1
        // but (2,1) is 2.
        let m = vec![
            vec![0, 1, 2],
            vec![1, 0, 1],
            vec![1, 2, 0],
        ];
        let err = verify_scheme(&m).unwrap_err();
        assert!(matches!(err, VerifyError::TransposeNotClosed { .. }));
    }

    #[test]
    fn c4_violation_has_witness() {
        // Directed path coloring on 3 points: color 1 = {(0,1),(1,2)} is not
        // coherent with color 2 as its transpose.
        let m = vec![
            vec![0, 1, 3],
            vec![2, 0, 1],
            vec![3, 2, 0],
        ];
        let err = verify_scheme(&m).unwrap_err();
        match err {
            VerifyError::IntersectionNumberNotConstant(w) => {
                assert_ne!(w.first_count, w.second_count);
            }
            other => panic!("expected inconstancy, got {other:?}"),
        }
    }

    #[test]
    fn rank_two_scheme_on_three_points() {
        let m = vec![
            vec![0, 1, 1],
            vec![1, 0, 1],
            vec![1, 1, 0],
        ];
        let s = verify_scheme(&m).unwrap();
        assert_eq!(s.relation_count(), 2);
        assert_eq!(s.fiber_count(), 1);
        assert_eq!(s.relation_meta(1).degree, 2);
        // c_11^1 = 1 for the complete graph on 3 points
        assert_eq!(s.intersection_number(s.relation(1), s.relation(1), s.relation(1)), 1);
        assert_eq!(s.intersection_number(s.relation(1), s.relation(1), s.relation(0)), 2);
    }

    #[test]
    fn degree_multiset_contains_one_on_diagonal() {
        let m = vec![
            vec![0, 1, 1],
            vec![1, 0, 1],
            vec![1, 1, 0],
        ];
        let s = verify_scheme(&m).unwrap();
        assert_eq!(s.degree_multiset(0, 0), vec![1, 2]);
    }

    #[test]
    fn brute_force_matches_verification_tensor() {
        let m = vec![
            vec![0, 1, 1],
            vec![1, 0, 1],
            vec![1, 1, 0],
        ];
        let s = verify_scheme(&m).unwrap();
        let oracle = brute_force_tensor(&s);
        for r in 0..2 {
            for sc in 0..2 {
                for t in 0..2 {
                    assert_eq!(oracle.get(r, sc, t), s.tensor().get(r, sc, t));
                }
            }
        }
    }
}
