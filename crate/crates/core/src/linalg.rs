//! Exact linear algebra over the integers and over Z_q.
//!
//! Lattice points and basis vectors are held as arbitrary-precision integers
//! ([`IntVector`], [`IntBasis`]); matrices that only ever appear reduced
//! modulo an odd modulus q live in [`ModMatrix`] with entries in `[0, q)`.
//! Floating point enters exactly twice — Gram–Schmidt orthogonalization and
//! Euclidean norms — and never touches the integer arithmetic that decides
//! membership or congruence questions.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Relative tolerance below which a Gram–Schmidt norm is treated as zero.
const GS_DEPENDENT_TOL: f64 = 1e-12;

/// Errors from the linear-algebra substrate.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    /// Operand shapes do not line up.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    /// Input vectors are linearly dependent where independence is required.
    #[error("linearly dependent input (Gram-Schmidt norm underflow at column {column})")]
    DependentInput { column: usize },
    /// The target vector lies outside the column span of the matrix.
    #[error("no solution: target outside column span")]
    NoSolution,
    /// A matrix entry or modulus violates its range constraint.
    #[error("invalid modular matrix: {context}")]
    InvalidMatrix { context: String },
}

fn dim_err(context: impl Into<String>) -> LinalgError {
    LinalgError::DimensionMismatch {
        context: context.into(),
    }
}

// ---------------------------------------------------------------------------
// IntVector
// ---------------------------------------------------------------------------

/// Integer vector with arbitrary-precision entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntVector {
    entries: Vec<BigInt>,
}

impl IntVector {
    /// Wraps raw big-integer entries.
    pub fn new(entries: Vec<BigInt>) -> Self {
        Self { entries }
    }

    /// The all-zero vector of length `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![BigInt::zero(); n],
        }
    }

    /// Builds a vector from machine integers.
    pub fn from_i64s(values: &[i64]) -> Self {
        Self {
            entries: values.iter().map(|&v| BigInt::from(v)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &BigInt {
        &self.entries[i]
    }

    /// True when every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Coordinatewise sum.
    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.len() != other.len() {
            return Err(dim_err(format!(
                "vector add: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Coordinatewise difference.
    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.len() != other.len() {
            return Err(dim_err(format!(
                "vector sub: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Scales every entry by `c`.
    pub fn scale(&self, c: i64) -> Self {
        let c = BigInt::from(c);
        Self {
            entries: self.entries.iter().map(|e| e * &c).collect(),
        }
    }

    /// Concatenates `self` followed by `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Self { entries }
    }

    /// Splits into consecutive blocks of length `block_len`.
    pub fn split_blocks(&self, block_len: usize) -> Result<Vec<IntVector>, LinalgError> {
        if block_len == 0 || !self.len().is_multiple_of(block_len) {
            return Err(dim_err(format!(
                "cannot split length {} into blocks of {}",
                self.len(),
                block_len
            )));
        }
        Ok(self
            .entries
            .chunks(block_len)
            .map(|c| IntVector::new(c.to_vec()))
            .collect())
    }

    /// Entries reduced into `[0, q)`.
    pub fn reduce_mod(&self, q: u64) -> Vec<u64> {
        let qb = BigInt::from(q);
        self.entries
            .iter()
            .map(|e| {
                let mut r = e % &qb;
                if r.is_negative() {
                    r += &qb;
                }
                r.to_u64().expect("residue fits u64")
            })
            .collect()
    }

    /// Exact squared Euclidean norm.
    pub fn norm_sq(&self) -> BigInt {
        self.entries.iter().map(|e| e * e).sum()
    }

    /// Euclidean norm (exact squared norm, one final floating square root).
    pub fn l2_norm(&self) -> f64 {
        self.norm_sq().to_f64().expect("norm fits f64").sqrt()
    }

    /// Entries converted to `f64` (used only to steer samplers, never for
    /// exactness-critical arithmetic).
    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| e.to_f64().expect("entry fits f64"))
            .collect()
    }

    /// Entries as `i64` when they all fit.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(|e| e.to_i64()).collect()
    }
}

/// Euclidean norm of an integer vector.
pub fn l2_norm(x: &IntVector) -> f64 {
    x.l2_norm()
}

// ---------------------------------------------------------------------------
// ModMatrix
// ---------------------------------------------------------------------------

/// Row-major matrix over Z_q for an odd modulus `q >= 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    q: u64,
    entries: Vec<u64>,
}

impl ModMatrix {
    /// Validates the modulus and entry ranges and builds a matrix.
    pub fn new(rows: usize, cols: usize, q: u64, entries: Vec<u64>) -> Result<Self, LinalgError> {
        if q < 3 || q.is_multiple_of(2) {
            return Err(LinalgError::InvalidMatrix {
                context: format!("modulus must be odd and >= 3, got {q}"),
            });
        }
        if entries.len() != rows * cols {
            return Err(dim_err(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|&&e| e >= q) {
            return Err(LinalgError::InvalidMatrix {
                context: format!("entry {bad} outside [0, {q})"),
            });
        }
        Ok(Self {
            rows,
            cols,
            q,
            entries,
        })
    }

    /// The `rows x cols` zero matrix.
    pub fn zeros(rows: usize, cols: usize, q: u64) -> Result<Self, LinalgError> {
        Self::new(rows, cols, q, vec![0; rows * cols])
    }

    /// The `n x n` identity.
    pub fn identity(n: usize, q: u64) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(n, n, q)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Uniformly random matrix over Z_q.
    pub fn uniform(rows: usize, cols: usize, q: u64, rng: &mut impl rand::Rng) -> Self {
        let entries = (0..rows * cols).map(|_| rng.gen_range(0..q)).collect();
        Self::new(rows, cols, q, entries).expect("uniform entries are in range")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        debug_assert!(v < self.q);
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Horizontally concatenates blocks sharing row count and modulus.
    pub fn concat_cols(blocks: &[&ModMatrix]) -> Result<ModMatrix, LinalgError> {
        let first = blocks.first().ok_or_else(|| dim_err("no blocks"))?;
        let (rows, q) = (first.rows, first.q);
        if blocks.iter().any(|b| b.rows != rows || b.q != q) {
            return Err(dim_err("concat blocks disagree on rows or modulus"));
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for b in blocks {
                entries.extend_from_slice(b.row(r));
            }
        }
        ModMatrix::new(rows, cols, q, entries)
    }

    /// Splits into consecutive column blocks of width `block_cols`.
    pub fn split_col_blocks(&self, block_cols: usize) -> Result<Vec<ModMatrix>, LinalgError> {
        if block_cols == 0 || !self.cols.is_multiple_of(block_cols) {
            return Err(dim_err(format!(
                "cannot split {} columns into blocks of {}",
                self.cols, block_cols
            )));
        }
        let count = self.cols / block_cols;
        let mut out = Vec::with_capacity(count);
        for b in 0..count {
            let mut entries = Vec::with_capacity(self.rows * block_cols);
            for r in 0..self.rows {
                let row = self.row(r);
                entries.extend_from_slice(&row[b * block_cols..(b + 1) * block_cols]);
            }
            out.push(ModMatrix::new(self.rows, block_cols, self.q, entries)?);
        }
        Ok(out)
    }

    /// `A * x mod q` with exact integer arithmetic before reduction.
    pub fn mat_vec_mod(&self, x: &IntVector) -> Result<IntVector, LinalgError> {
        if x.len() != self.cols {
            return Err(dim_err(format!(
                "mat_vec: {}x{} times length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        // Fast path: machine-word entries (the common case at desk scale).
        // Residues of x mod q fit in u64 and q^2 * cols stays within u128.
        if self
            .cols
            .checked_mul(self.q as usize)
            .and_then(|v| v.checked_mul(self.q as usize))
            .is_some()
        {
            let xr = x.reduce_mod(self.q);
            let q = self.q as u128;
            let out = (0..self.rows)
                .map(|r| {
                    let row = self.row(r);
                    let mut acc: u128 = 0;
                    for (a, b) in row.iter().zip(&xr) {
                        acc += (*a as u128) * (*b as u128);
                        // Keep the accumulator bounded; q^2 per term.
                        if acc >= u128::MAX - q * q {
                            acc %= q;
                        }
                    }
                    BigInt::from((acc % q) as u64)
                })
                .collect();
            return Ok(IntVector::new(out));
        }
        // Exact fallback for very large moduli.
        let qb = BigInt::from(self.q);
        let out = (0..self.rows)
            .map(|r| {
                let mut acc = BigInt::zero();
                for (a, b) in self.row(r).iter().zip(x.entries()) {
                    acc += BigInt::from(*a) * b;
                }
                let mut rem = acc % &qb;
                if rem.is_negative() {
                    rem += &qb;
                }
                rem
            })
            .collect();
        Ok(IntVector::new(out))
    }

    /// Rank over the field Z_q (q prime).
    pub fn rank_mod(&self) -> usize {
        let mut m: Vec<Vec<u64>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, pivot);
            let inv = inv_mod(m[rank][col], self.q);
            for e in &mut m[rank][col..] {
                *e = mul_mod(*e, inv, self.q);
            }
            // Take the pivot row out so eliminating the others borrows cleanly.
            let pivot_vals = std::mem::take(&mut m[rank]);
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row[col] != 0 {
                    let f = row[col];
                    for (e, &p) in row[col..].iter_mut().zip(&pivot_vals[col..]) {
                        *e = sub_mod(*e, mul_mod(f, p, self.q), self.q);
                    }
                }
            }
            m[rank] = pivot_vals;
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

/// `A * x mod q`; entries of the result lie in `[0, q)`.
pub fn mat_vec_mod(a: &ModMatrix, x: &IntVector) -> Result<IntVector, LinalgError> {
    a.mat_vec_mod(x)
}

// ---------------------------------------------------------------------------
// Modular scalar helpers (q odd prime, fits in u64)
// ---------------------------------------------------------------------------

pub(crate) fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (q - b)
    }
}

/// Modular inverse for prime modulus via Fermat exponentiation.
pub(crate) fn inv_mod(a: u64, q: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(q), "inverse of zero");
    pow_mod(a % q, q - 2, q)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc: u64 = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

// ---------------------------------------------------------------------------
// solve_mod
// ---------------------------------------------------------------------------

/// Solves `A x = t (mod q)` for prime q by Gaussian elimination.
///
/// Pivoting is deterministic: columns are swept left to right and the first
/// nonzero entry at or below the current pivot row is chosen. Free variables
/// are fixed to zero, so the returned representative is a pure function of
/// `(A, t)`. Returns [`LinalgError::NoSolution`] when `t` is outside the
/// column span.
pub fn solve_mod(a: &ModMatrix, t: &IntVector) -> Result<IntVector, LinalgError> {
    if t.len() != a.rows() {
        return Err(dim_err(format!(
            "solve_mod: {} rows vs target length {}",
            a.rows(),
            t.len()
        )));
    }
    let q = a.modulus();
    let tr = t.reduce_mod(q);
    let mut m: Vec<Vec<u64>> = (0..a.rows())
        .map(|r| {
            let mut row = a.row(r).to_vec();
            row.push(tr[r]);
            row
        })
        .collect();
    let (rows, cols) = (a.rows(), a.cols());

    let mut pivot_cols = Vec::new();
    let mut pivot_row = 0usize;
    for col in 0..cols {
        let Some(p) = (pivot_row..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = inv_mod(m[pivot_row][col], q);
        for e in &mut m[pivot_row][col..] {
            *e = mul_mod(*e, inv, q);
        }
        // Take the pivot row out so eliminating the others borrows cleanly.
        let pivot_vals = std::mem::take(&mut m[pivot_row]);
        for (r, row) in m.iter_mut().enumerate() {
            if r != pivot_row && row[col] != 0 {
                let f = row[col];
                for (e, &p) in row[col..].iter_mut().zip(&pivot_vals[col..]) {
                    *e = sub_mod(*e, mul_mod(f, p, q), q);
                }
            }
        }
        m[pivot_row] = pivot_vals;
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }

    // Inconsistent row: all-zero coefficients with nonzero right-hand side.
    for row in &m[pivot_row..] {
        if row[..cols].iter().all(|&e| e == 0) && row[cols] != 0 {
            return Err(LinalgError::NoSolution);
        }
    }

    let mut x = vec![0u64; cols];
    for (r, &col) in pivot_cols.iter().enumerate() {
        x[col] = m[r][cols];
    }
    Ok(IntVector::new(x.into_iter().map(BigInt::from).collect()))
}

// ---------------------------------------------------------------------------
// Gram–Schmidt
// ---------------------------------------------------------------------------

/// Orthogonalization of integer columns in floating point.
///
/// Returns the unnormalized orthogonal vectors and their norms. Modified
/// Gram–Schmidt with one reorthogonalization pass keeps pairwise relative
/// inner products around machine precision at the dimensions used here.
pub fn gram_schmidt(columns: &[IntVector]) -> Result<(Vec<Vec<f64>>, Vec<f64>), LinalgError> {
    if columns.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let dim = columns[0].len();
    if columns.iter().any(|c| c.len() != dim) {
        return Err(dim_err("gram_schmidt: ragged columns"));
    }
    let input_scale = columns
        .iter()
        .map(|c| c.l2_norm())
        .fold(0.0f64, f64::max)
        .max(1.0);

    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
    let mut norms = Vec::with_capacity(columns.len());
    for (i, col) in columns.iter().enumerate() {
        let mut v = col.to_f64_vec();
        // Twice-through projection removal ("twice is enough").
        for _ in 0..2 {
            for prev in ortho.iter() {
                let nn = dot(prev, prev);
                if nn == 0.0 {
                    continue;
                }
                let mu = dot(&v, prev) / nn;
                for (vi, pi) in v.iter_mut().zip(prev) {
                    *vi -= mu * pi;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm <= GS_DEPENDENT_TOL * input_scale {
            return Err(LinalgError::DependentInput { column: i });
        }
        ortho.push(v);
        norms.push(norm);
    }
    Ok((ortho, norms))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// IntBasis
// ---------------------------------------------------------------------------

/// Ordered set of linearly independent integer columns with cached
/// Gram–Schmidt data.
#[derive(Debug, Clone)]
pub struct IntBasis {
    dim: usize,
    columns: Vec<IntVector>,
    gs_vectors: Vec<Vec<f64>>,
    gs_norms: Vec<f64>,
    columns_f64: Vec<Vec<f64>>,
}

impl IntBasis {
    /// Builds a basis, rejecting linearly dependent columns.
    pub fn new(columns: Vec<IntVector>) -> Result<Self, LinalgError> {
        let (gs_vectors, gs_norms) = gram_schmidt(&columns)?;
        Ok(Self::assemble(columns, gs_vectors, gs_norms))
    }

    /// Builds without the independence check; Gram–Schmidt data is still
    /// computed best-effort (zero norms mark dependent columns).
    ///
    /// Intended for verification paths that must be able to represent
    /// malformed inputs; samplers require a basis built with [`Self::new`].
    pub fn new_unchecked(columns: Vec<IntVector>) -> Self {
        let dim = columns.first().map_or(0, IntVector::len);
        let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
        let mut norms = Vec::with_capacity(columns.len());
        for col in &columns {
            let mut v = if col.len() == dim {
                col.to_f64_vec()
            } else {
                vec![0.0; dim]
            };
            for _ in 0..2 {
                for prev in ortho.iter() {
                    let nn = dot(prev, prev);
                    if nn == 0.0 {
                        continue;
                    }
                    let mu = dot(&v, prev) / nn;
                    for (vi, pi) in v.iter_mut().zip(prev) {
                        *vi -= mu * pi;
                    }
                }
            }
            norms.push(dot(&v, &v).sqrt());
            ortho.push(v);
        }
        Self::assemble(columns, ortho, norms)
    }

    fn assemble(columns: Vec<IntVector>, gs_vectors: Vec<Vec<f64>>, gs_norms: Vec<f64>) -> Self {
        let columns_f64 = columns.iter().map(IntVector::to_f64_vec).collect();
        Self {
            dim: columns.first().map_or(0, IntVector::len),
            columns,
            gs_vectors,
            gs_norms,
            columns_f64,
        }
    }

    /// Ambient dimension (length of each column).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of columns.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[IntVector] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> &IntVector {
        &self.columns[i]
    }

    /// Cached Gram–Schmidt norms, in column order.
    pub fn gs_norms(&self) -> &[f64] {
        &self.gs_norms
    }

    /// Cached orthogonalized vectors, in column order.
    pub fn gs_vectors(&self) -> &[Vec<f64>] {
        &self.gs_vectors
    }

    /// Columns as `f64` (sampler steering only).
    pub fn columns_f64(&self) -> &[Vec<f64>] {
        &self.columns_f64
    }

    /// Largest Gram–Schmidt norm; the basis quality figure.
    pub fn max_gs_norm(&self) -> f64 {
        self.gs_norms.iter().copied().fold(0.0, f64::max)
    }
}

impl PartialEq for IntBasis {
    fn eq(&self, other: &Self) -> bool {
        self.columns == other.columns
    }
}

impl Eq for IntBasis {}

// ---------------------------------------------------------------------------
// Exact determinant
// ---------------------------------------------------------------------------

/// Determinant of the square matrix whose columns are given, via Bareiss
/// fraction-free elimination (exact, arbitrary precision).
pub fn det_columns(columns: &[IntVector]) -> Result<BigInt, LinalgError> {
    let n = columns.len();
    if n == 0 {
        return Ok(BigInt::from(1));
    }
    if columns.iter().any(|c| c.len() != n) {
        return Err(dim_err("det_columns: matrix not square"));
    }
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|r| columns.iter().map(|c| c.entry(r).clone()).collect())
        .collect();
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev; // Exact by the Bareiss identity.
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Ok(m[n - 1][n - 1].clone() * sign)
}
