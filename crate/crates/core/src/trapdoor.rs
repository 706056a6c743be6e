//! Trapdoor generation for q-ary kernel lattices.
//!
//! [`trap_gen`] produces a statistically well-mixed matrix `A` over Z_q
//! together with a short basis `T` of the lattice
//! `{ x : A x = 0 (mod q) }`. The construction plants a power-of-two gadget:
//! `A = [Abar | G - Abar R]` with `Abar` uniform and `R` a small random
//! matrix, so `A [R; I] = G`. A full short basis is assembled from two
//! families of kernel vectors:
//!
//! * gadget family — images of the standard gadget-lattice basis, covering
//!   the `h * w` gadget coordinates (`w` = bits of the modulus);
//! * unit family — one vector per remaining coordinate, closing each column
//!   of `Abar` with the binary decomposition of its negation.
//!
//! The basis has determinant `q^h` exactly (the kernel lattice is covered in
//! full, not a sublattice), which [`verify_trapdoor`] checks by an exact
//! Bareiss determinant against the rank of `A`.

use crate::linalg::{det_columns, gram_schmidt, IntBasis, IntVector, ModMatrix};
use crate::rng::RandomSource;
use num_bigint::BigInt;
use num_traits::Signed;
use rand::Rng;
use thiserror::Error;

/// Errors from trapdoor generation.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrapdoorError {
    /// Too few columns to host the gadget block next to a mixing block.
    #[error("dimension constraint violated: n = {n} must exceed h * ceil(log2 q) = {gadget_cols}")]
    DimensionConstraint { n: usize, gadget_cols: usize },
    /// The modulus is not an odd number at least 3.
    #[error("modulus must be an odd number >= 3, got {q}")]
    InvalidModulus { q: u64 },
}

/// A matrix together with a short basis of its kernel lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapdoorPair {
    matrix: ModMatrix,
    basis: IntBasis,
    quality: f64,
}

impl TrapdoorPair {
    /// Assembles a pair from raw parts without checking any invariant.
    ///
    /// Exists so that [`verify_trapdoor`] can be exercised on malformed
    /// inputs; honest pairs come from [`trap_gen`].
    pub fn from_parts(matrix: ModMatrix, basis: IntBasis, quality: f64) -> Self {
        Self {
            matrix,
            basis,
            quality,
        }
    }

    pub fn matrix(&self) -> &ModMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &IntBasis {
        &self.basis
    }

    /// Largest Gram–Schmidt norm of the basis.
    pub fn quality(&self) -> f64 {
        self.quality
    }
}

/// Independent report on a claimed trapdoor pair; every field is recomputed
/// from scratch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapdoorReport {
    /// Every basis column maps to the zero syndrome.
    pub membership: bool,
    /// The basis spans the full kernel lattice: `|det T| = q^rank(A)`.
    pub full_lattice: bool,
    /// Fresh maximum Gram–Schmidt norm.
    pub quality: f64,
}

/// Number of binary digits needed for residues in `[0, q)`.
fn gadget_digits(q: u64) -> usize {
    (64 - (q - 1).leading_zeros()) as usize
}

/// Generates a trapdoor pair for an `h x n` matrix over Z_q.
///
/// Requires `n > h * ceil(log2 q)` so the gadget block fits beside at least
/// one mixing column. Scheme-level key generation derives `h` from `n` far
/// below this ceiling; the generator itself accepts any dimensions that
/// leave the construction intact.
pub fn trap_gen(
    q: u64,
    h: usize,
    n: usize,
    rng: &mut RandomSource,
) -> Result<TrapdoorPair, TrapdoorError> {
    if q < 3 || q.is_multiple_of(2) {
        return Err(TrapdoorError::InvalidModulus { q });
    }
    let w = gadget_digits(q);
    let gadget_cols = h * w;
    if n <= gadget_cols {
        return Err(TrapdoorError::DimensionConstraint { n, gadget_cols });
    }
    let mix_cols = n - gadget_cols;

    let a_bar = ModMatrix::uniform(h, mix_cols, q, rng);
    // Small mixing matrix R over {-1, 0, 1}.
    let r: Vec<Vec<i8>> = (0..mix_cols)
        .map(|_| (0..gadget_cols).map(|_| rng.gen_range(-1i8..=1)).collect())
        .collect();

    // Gadget block G - Abar R (mod q). G stacks one power-of-two row block
    // per output row: G[b][b*w + j] = 2^j.
    let mut a_entries = Vec::with_capacity(h * n);
    for row in 0..h {
        a_entries.extend_from_slice(a_bar.row(row));
        for col in 0..gadget_cols {
            let mut acc: i128 = 0;
            for (i, r_row) in r.iter().enumerate() {
                acc += a_bar.get(row, i) as i128 * r_row[col] as i128;
            }
            let block = col / w;
            let digit = col % w;
            let g = if block == row { 1i128 << digit } else { 0 };
            let val = (g - acc).rem_euclid(q as i128) as u64;
            a_entries.push(val);
        }
    }
    let a = ModMatrix::new(h, n, q, a_entries).expect("entries reduced mod q");

    // Basis columns. Each abstract kernel vector (top; bottom) with
    // `Abar top + G bottom = 0` maps to the concrete column
    // (top + R bottom; bottom) for A.
    let lift = |bottom: &[i64]| -> IntVector {
        let mut top = vec![0i64; mix_cols];
        for (i, r_row) in r.iter().enumerate() {
            let mut acc: i64 = 0;
            for (j, &b) in bottom.iter().enumerate() {
                if b != 0 {
                    acc += r_row[j] as i64 * b;
                }
            }
            top[i] = acc;
        }
        let mut entries = top;
        entries.extend_from_slice(bottom);
        IntVector::from_i64s(&entries)
    };

    let mut columns = Vec::with_capacity(n);
    // Gadget family: per row block, the standard basis of the gadget lattice
    // (2 e_j - e_{j+1}, closed by the binary digits of q).
    for block in 0..h {
        for j in 0..w {
            let mut bottom = vec![0i64; gadget_cols];
            if j + 1 < w {
                bottom[block * w + j] = 2;
                bottom[block * w + j + 1] = -1;
            } else {
                for (i, slot) in bottom[block * w..(block + 1) * w].iter_mut().enumerate() {
                    *slot = ((q >> i) & 1) as i64;
                }
            }
            columns.push(lift(&bottom));
        }
    }
    // Unit family: close column i of Abar with the digits of its negation.
    for i in 0..mix_cols {
        let mut bottom = vec![0i64; gadget_cols];
        for block in 0..h {
            let neg = (q - a_bar.get(block, i)) % q;
            for (d, slot) in bottom[block * w..(block + 1) * w].iter_mut().enumerate() {
                *slot = ((neg >> d) & 1) as i64;
            }
        }
        let mut col = lift(&bottom);
        // Add the unit coordinate on top of the mixed part.
        let mut entries: Vec<BigInt> = col.entries().to_vec();
        entries[i] += 1;
        col = IntVector::new(entries);
        columns.push(col);
    }

    for (i, col) in columns.iter().enumerate() {
        let image = a.mat_vec_mod(col).expect("column length n");
        assert!(
            image.is_zero(),
            "trapdoor construction broken: column {i} has nonzero syndrome"
        );
    }

    let basis = IntBasis::new(columns).expect("gadget basis is independent by construction");
    let quality = basis.max_gs_norm();
    Ok(TrapdoorPair {
        matrix: a,
        basis,
        quality,
    })
}

/// Recomputes every trapdoor invariant from scratch.
pub fn verify_trapdoor(pair: &TrapdoorPair) -> TrapdoorReport {
    let a = pair.matrix();
    let basis = pair.basis();
    let q = a.modulus();

    let shapes_ok = basis.len() == a.cols() && basis.dim() == a.cols();
    let membership = shapes_ok
        && basis.columns().iter().all(|col| {
            a.mat_vec_mod(col)
                .map(|image| image.is_zero())
                .unwrap_or(false)
        });

    let full_lattice = shapes_ok && {
        let det = det_columns(basis.columns()).expect("square by shape check");
        let expected = BigInt::from(q).pow(a.rank_mod() as u32);
        det.abs() == expected
    };

    let quality = gram_schmidt(basis.columns())
        .map(|(_, norms)| norms.into_iter().fold(0.0, f64::max))
        .unwrap_or_else(|_| {
            // Dependent columns: report the best-effort figure.
            IntBasis::new_unchecked(basis.columns().to_vec()).max_gs_norm()
        });

    TrapdoorReport {
        membership,
        full_lattice,
        quality,
    }
}
