//! Adjacency-algebra analysis: central primitive idempotents, degrees `n_P`,
//! multiplicities `m_P`, restrictions `P_X`, supports, and the principal
//! idempotent.
//!
//! The center of the adjacency algebra is computed exactly over the rationals
//! from the intersection numbers; only the final eigen step is numeric. A
//! generic central element `Z = sum z_P P` has the idempotents as its
//! eigenprojections, recovered by Lagrange interpolation on the clustered
//! eigenvalues.

use crate::scheme::Scheme;
use nalgebra::{Complex, DMatrix};
use num::rational::BigRational;
use num::{BigInt, One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 0x5eed_cc5;

/// Numeric tolerances of the decomposition pipeline.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Eigenvalue clustering, relative to the spectral radius of the generic
    /// element.
    pub eigencluster: f64,
    /// Rank cutoff for singular values, relative to the largest.
    pub rank: f64,
    /// Idempotency / orthogonality / centrality residual bound.
    pub residual: f64,
    /// Bound on |trace(P) - round(trace(P))|.
    pub integrality: f64,
    /// Generic-element retries before giving up.
    pub retries: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eigencluster: 1e-7,
            rank: 1e-8,
            residual: 1e-8,
            integrality: 1e-6,
            retries: 5,
        }
    }
}

type CMatrix = DMatrix<Complex<f64>>;

/// The complete set of central primitive idempotents of the adjacency
/// algebra, with degrees, multiplicities and supports.
#[derive(Debug, Clone)]
pub struct IdempotentDecomposition {
    pub idempotents: Vec<CMatrix>,
    /// `n_P`, from `n_P^2 = dim span{A_R P}`.
    pub degrees: Vec<usize>,
    /// `m_P = trace(P) / n_P`.
    pub multiplicities: Vec<usize>,
    /// `Supp(P)`: fibers where `P I_X` is nonzero.
    pub supports: Vec<Vec<usize>>,
    pub principal_index: usize,
}

impl IdempotentDecomposition {
    pub fn len(&self) -> usize {
        self.idempotents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idempotents.is_empty()
    }
}

#[derive(Debug, Error, Clone)]
pub enum AlgebraError {
    #[error("generic central element retries exhausted ({0})")]
    NumericalDegeneracy(String),
    #[error("non-integral invariant: {0}")]
    NonIntegralInvariant(String),
    #[error("consistency failure: {0}")]
    ConsistencyFailure(String),
}

/// Exact rational nullspace of an integer matrix (rows x cols), as integer
/// basis vectors.
fn integer_nullspace(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
        .collect();
    let nrows = m.len();
    let mut pivot_col_of_row = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        let Some(p) = (row..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x /= inv.clone();
        }
        for i in 0..nrows {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..cols {
                    let sub = f.clone() * m[row][j].clone();
                    m[i][j] -= sub;
                }
            }
        }
        pivot_col_of_row.push(col);
        row += 1;
        if row == nrows {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivot_col_of_row.clone();
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![BigRational::zero(); cols];
        v[fc] = BigRational::one();
        for (ri, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[ri][fc].clone();
        }
        // clear denominators
        let mut denom_lcm = BigInt::one();
        for x in &v {
            denom_lcm = num::integer::lcm(denom_lcm, x.denom().clone());
        }
        let ints: Vec<BigInt> = v
            .iter()
            .map(|x| x.numer() * (&denom_lcm / x.denom()))
            .collect();
        basis.push(ints);
    }
    basis
}

/// Integer coefficient vectors (over the relation basis) spanning the center
/// `Z(A)`, computed exactly from the intersection numbers.
pub fn center_basis(s: &Scheme) -> Vec<Vec<i64>> {
    let k = s.relation_count();
    let tensor = s.tensor();
    // [Z, A_R] = 0 for Z = sum_S z_S A_S: for each (R, T):
    //   sum_S z_S (c_{SR}^T - c_{RS}^T) = 0
    let mut rows = Vec::with_capacity(k * k);
    for r in 0..k {
        for t in 0..k {
            let row: Vec<i64> = (0..k)
                .map(|sc| tensor.get(sc, r, t) as i64 - tensor.get(r, sc, t) as i64)
                .collect();
            if row.iter().any(|&x| x != 0) {
                rows.push(row);
            }
        }
    }
    integer_nullspace(&rows, k)
        .into_iter()
        .map(|v| {
            v.into_iter()
                .map(|x| i64::try_from(&x).expect("center coefficients stay small"))
                .collect()
        })
        .collect()
}

fn complex_adjacency(s: &Scheme, relation: usize) -> CMatrix {
    let n = s.point_count();
    CMatrix::from_fn(n, n, |u, v| {
        if s.color(u, v) == relation {
            Complex::new(1.0, 0.0)
        } else {
            Complex::ZERO
        }
    })
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Computes the full set `P(C)` with the default seed and tolerances.
pub fn central_primitive_idempotents(s: &Scheme) -> Result<IdempotentDecomposition, AlgebraError> {
    central_primitive_idempotents_with(s, DEFAULT_SEED, &Tolerances::default())
}

pub fn central_primitive_idempotents_with(
    s: &Scheme,
    seed: u64,
    tol: &Tolerances,
) -> Result<IdempotentDecomposition, AlgebraError> {
    let n = s.point_count();
    let k = s.relation_count();
    let basis = center_basis(s);
    let expected = basis.len();
    let adjacency: Vec<CMatrix> = (0..k).map(|r| complex_adjacency(s, r)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_failure = String::from("no attempt made");
    'attempt: for _ in 0..tol.retries {
        let coeffs: Vec<i64> = (0..expected).map(|_| rng.gen_range(-999..=999)).collect();
        let mut weights = vec![0i64; k];
        for (c, b) in coeffs.iter().zip(&basis) {
            for (w, &x) in weights.iter_mut().zip(b) {
                *w += c * x;
            }
        }
        let z_real = DMatrix::<f64>::from_fn(n, n, |u, v| weights[s.color(u, v)] as f64);
        let eigenvalues = z_real.clone().complex_eigenvalues();
        let rho = eigenvalues.iter().map(|e| e.norm()).fold(0.0, f64::max);
        if rho < 1e-9 {
            last_failure = "generic element vanished".into();
            continue;
        }
        // Greedy clustering at eigencluster * rho, deterministic via sorting.
        let mut sorted: Vec<Complex<f64>> = eigenvalues.iter().copied().collect();
        sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        let mut clusters: Vec<(Complex<f64>, usize)> = Vec::new();
        for lambda in sorted {
            match clusters
                .iter_mut()
                .find(|(center, _)| (lambda - *center).norm() < tol.eigencluster * rho)
            {
                Some((center, count)) => {
                    *center = (*center * (*count as f64) + lambda) / (*count as f64 + 1.0);
                    *count += 1;
                }
                None => clusters.push((lambda, 1)),
            }
        }
        if clusters.len() != expected {
            last_failure = format!(
                "eigenvalue clusters ({}) do not match center dimension ({expected})",
                clusters.len()
            );
            continue;
        }

        let z = z_real.map(|x| Complex::new(x, 0.0));
        let identity = CMatrix::identity(n, n);
        let mut idempotents = Vec::with_capacity(expected);
        for i in 0..expected {
            let mut p = identity.clone();
            for j in 0..expected {
                if j != i {
                    let denom = clusters[i].0 - clusters[j].0;
                    p = (&z - &identity * clusters[j].0) * p / denom;
                }
            }
            idempotents.push(p);
        }

        // Residual gates; any failure retries with fresh coefficients.
        let mut sum = CMatrix::zeros(n, n);
        for p in &idempotents {
            sum += p;
        }
        if max_abs(&(sum - &identity)) > tol.residual {
            last_failure = "projections do not sum to the identity".into();
            continue;
        }
        for (i, p) in idempotents.iter().enumerate() {
            if max_abs(&(p * p - p)) > tol.residual {
                last_failure = format!("projection {i} is not idempotent");
                continue 'attempt;
            }
            for (j, q) in idempotents.iter().enumerate() {
                if i != j && max_abs(&(p * q)) > tol.residual {
                    last_failure = format!("projections {i} and {j} are not orthogonal");
                    continue 'attempt;
                }
            }
            for a in &adjacency {
                if max_abs(&(p * a - a * p)) > tol.residual {
                    last_failure = format!("projection {i} is not central");
                    continue 'attempt;
                }
            }
        }

        return finish_decomposition(s, idempotents, &adjacency, tol);
    }
    Err(AlgebraError::NumericalDegeneracy(last_failure))
}

fn finish_decomposition(
    s: &Scheme,
    mut idempotents: Vec<CMatrix>,
    adjacency: &[CMatrix],
    tol: &Tolerances,
) -> Result<IdempotentDecomposition, AlgebraError> {
    let n = s.point_count();
    let k = s.relation_count();

    // Principal idempotent P_0 = sum_X J_X / |X| goes first.
    let mut p0 = CMatrix::zeros(n, n);
    for fiber in s.fibers() {
        let weight = Complex::new(1.0 / fiber.len() as f64, 0.0);
        for &u in fiber {
            for &v in fiber {
                p0[(u, v)] = weight;
            }
        }
    }
    let principal = idempotents
        .iter()
        .position(|p| max_abs(&(p - &p0)) < tol.integrality)
        .ok_or_else(|| {
            AlgebraError::ConsistencyFailure("principal idempotent not found among projections".into())
        })?;
    idempotents.swap(0, principal);

    let mut degrees = Vec::with_capacity(idempotents.len());
    let mut multiplicities = Vec::with_capacity(idempotents.len());
    let mut supports = Vec::with_capacity(idempotents.len());
    for (i, p) in idempotents.iter().enumerate() {
        let trace = p.trace();
        if trace.im.abs() > tol.integrality {
            return Err(AlgebraError::NonIntegralInvariant(format!(
                "trace of projection {i} has imaginary part {}",
                trace.im
            )));
        }
        let mn = trace.re.round();
        if (trace.re - mn).abs() > tol.integrality || mn < 1.0 {
            return Err(AlgebraError::NonIntegralInvariant(format!(
                "trace of projection {i} is {} (not a positive integer)",
                trace.re
            )));
        }
        let mn = mn as usize;
        let rank = span_rank(adjacency.iter().map(|a| a * p), n, tol);
        let n_p = (rank as f64).sqrt().round() as usize;
        if n_p * n_p != rank {
            return Err(AlgebraError::NonIntegralInvariant(format!(
                "dim span{{A_R P_{i}}} = {rank} is not a perfect square"
            )));
        }
        if mn % n_p != 0 {
            return Err(AlgebraError::NonIntegralInvariant(format!(
                "trace {mn} of projection {i} is not divisible by degree {n_p}"
            )));
        }
        degrees.push(n_p);
        multiplicities.push(mn / n_p);
        let supp: Vec<usize> = (0..s.fiber_count())
            .filter(|&x| fiber_block_norm(s, p, x) > tol.residual)
            .collect();
        if supp.is_empty() {
            return Err(AlgebraError::ConsistencyFailure(format!(
                "projection {i} has empty support"
            )));
        }
        supports.push(supp);
    }

    let sum_sq: usize = degrees.iter().map(|d| d * d).sum();
    if sum_sq != k {
        return Err(AlgebraError::ConsistencyFailure(format!(
            "sum of n_P^2 = {sum_sq}, expected |R| = {k}"
        )));
    }
    let sum_mn: usize = degrees
        .iter()
        .zip(&multiplicities)
        .map(|(d, m)| d * m)
        .sum();
    if sum_mn != n {
        return Err(AlgebraError::ConsistencyFailure(format!(
            "sum of m_P n_P = {sum_mn}, expected |V| = {n}"
        )));
    }

    Ok(IdempotentDecomposition {
        idempotents,
        degrees,
        multiplicities,
        supports,
        principal_index: 0,
    })
}

/// Numeric rank of a set of matrices viewed as vectors.
fn span_rank(matrices: impl Iterator<Item = CMatrix>, n: usize, tol: &Tolerances) -> usize {
    let vectors: Vec<CMatrix> = matrices.collect();
    let mut stacked = CMatrix::zeros(vectors.len(), n * n);
    for (i, m) in vectors.iter().enumerate() {
        for (j, x) in m.iter().enumerate() {
            stacked[(i, j)] = *x;
        }
    }
    let singular = stacked.svd(false, false).singular_values;
    let largest = singular.iter().fold(0.0f64, |a, &b| a.max(b));
    if largest <= 0.0 {
        return 0;
    }
    singular.iter().filter(|&&x| x > tol.rank * largest).count()
}

fn fiber_block_norm(s: &Scheme, p: &CMatrix, fiber: usize) -> f64 {
    let pts = &s.fibers()[fiber];
    let mut max = 0.0f64;
    for &u in pts {
        for &v in pts {
            max = max.max(p[(u, v)].norm());
        }
    }
    max
}

/// `P . I_U` for a union of fibers: zeroes all columns outside `U`.
pub fn restrict_idempotent(
    s: &Scheme,
    dec: &IdempotentDecomposition,
    p_index: usize,
    fiber_set: &[usize],
) -> CMatrix {
    let mut keep = vec![false; s.point_count()];
    for &f in fiber_set {
        for &v in &s.fibers()[f] {
            keep[v] = true;
        }
    }
    let mut out = dec.idempotents[p_index].clone();
    for v in 0..s.point_count() {
        if !keep[v] {
            for u in 0..s.point_count() {
                out[(u, v)] = Complex::ZERO;
            }
        }
    }
    out
}

/// `Supp(P)`: the fibers where `P I_X` exceeds tolerance.
pub fn support(_s: &Scheme, dec: &IdempotentDecomposition, p_index: usize) -> Vec<usize> {
    dec.supports[p_index].clone()
}

/// The degree `n_{P_X}` of the restriction of `P` to a fiber, zero when the
/// restriction vanishes.
pub fn restricted_degree(
    s: &Scheme,
    dec: &IdempotentDecomposition,
    p_index: usize,
    fiber: usize,
) -> Result<usize, AlgebraError> {
    let tol = Tolerances::default();
    let p = &dec.idempotents[p_index];
    if fiber_block_norm(s, p, fiber) <= tol.residual {
        return Ok(0);
    }
    // P commutes with I_X, so P_X lives on the X-block.
    let pts = &s.fibers()[fiber];
    let m = pts.len();
    let block = CMatrix::from_fn(m, m, |i, j| p[(pts[i], pts[j])]);
    let rels = s.relations_between(fiber, fiber);
    let rank = span_rank(
        rels.iter().map(|r| {
            let a = CMatrix::from_fn(m, m, |i, j| {
                if s.color(pts[i], pts[j]) == r.index {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::ZERO
                }
            });
            a * &block
        }),
        m,
        &tol,
    );
    let n_px = (rank as f64).sqrt().round() as usize;
    if n_px * n_px != rank {
        return Err(AlgebraError::NonIntegralInvariant(format!(
            "dim span{{A_R P_X}} = {rank} is not a perfect square (P {p_index}, fiber {fiber})"
        )));
    }
    Ok(n_px)
}

/// `dim A_{X,Y}` via the shared-support sum of `n_{P_X} n_{P_Y}`, asserted
/// against the combinatorial count `|R_{X,Y}|`.
pub fn dim_a_xy(
    s: &Scheme,
    dec: &IdempotentDecomposition,
    x: usize,
    y: usize,
) -> Result<usize, AlgebraError> {
    let mut total = 0usize;
    for p in 0..dec.len() {
        let nx = restricted_degree(s, dec, p, x)?;
        let ny = restricted_degree(s, dec, p, y)?;
        total += nx * ny;
    }
    let combinatorial = s.relations_between(x, y).len();
    if total != combinatorial {
        return Err(AlgebraError::ConsistencyFailure(format!(
            "dim A_[{x},{y}]: algebraic count {total} != |R_XY| = {combinatorial}"
        )));
    }
    Ok(total)
}
