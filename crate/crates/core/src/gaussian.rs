//! Discrete Gaussian sampling over the integers, over q-ary lattices, and
//! over their cosets.
//!
//! Three layers build on each other:
//!
//! * [`sample_z`] — one-dimensional rejection sampling of `D_{Z,s,c}`
//!   proportional to `rho_{s,c}(x) = exp(-pi (x-c)^2 / s^2)`, truncated to
//!   `[c - 12s, c + 12s]` (mass outside is far below any statistical test).
//! * [`sample_dom`] — coordinatewise product sampler over `Z^n`, the domain
//!   distribution for public preimage material.
//! * [`sample_pre`] / [`sample_gaussian`] — randomized nearest-plane walk
//!   over a short basis, producing coset preimages `A x = u (mod q)` and
//!   lattice points near an arbitrary center respectively.
//!
//! Integer outputs are exact integer combinations of basis columns; floating
//! point only steers the per-level centers of the walk.

use crate::linalg::{solve_mod, IntBasis, IntVector, LinalgError, ModMatrix};
use crate::rng::RandomSource;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use thiserror::Error;

/// Hard floor for any one-dimensional width: below this the discrete
/// Gaussian is too spiky for the rejection sampler's guarantees.
pub const MIN_WIDTH: f64 = 0.8;

/// Truncation radius of the 1-D sampler, in units of the width.
const TAIL_CUT: f64 = 12.0;

/// Errors from the Gaussian samplers.
#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    /// Width is not a positive finite number.
    #[error("width must be positive and finite, got {width}")]
    InvalidWidth { width: f64 },
    /// Width below the 1-D smoothing floor.
    #[error("width {width} below sampling floor {floor}")]
    WidthBelowFloor { width: f64, floor: f64 },
    /// Supplied basis is not a trapdoor for the matrix.
    #[error("basis is not a trapdoor for the matrix: {context}")]
    InvalidTrapdoor { context: String },
    /// The syndrome has no preimage (matrix does not reach it).
    #[error("target syndrome outside the column span of the matrix")]
    NoCosetRepresentative,
    /// Operand shapes do not line up.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
}

/// Positive finite Gaussian width parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussWidth(f64);

impl GaussWidth {
    /// Validates that `s` is positive and finite.
    pub fn new(s: f64) -> Result<Self, SamplerError> {
        if !s.is_finite() || s <= 0.0 {
            return Err(SamplerError::InvalidWidth { width: s });
        }
        Ok(Self(s))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Samples `D_{Z,s,c}` by rejection against the continuous Gaussian weight.
///
/// Rejects widths below [`MIN_WIDTH`]; acceptance probability is about
/// `1/24` per round independent of `s`, so the loop terminates quickly.
pub fn sample_z(center: f64, width: GaussWidth, rng: &mut RandomSource) -> Result<i64, SamplerError> {
    let s = width.get();
    if s < MIN_WIDTH {
        return Err(SamplerError::WidthBelowFloor {
            width: s,
            floor: MIN_WIDTH,
        });
    }
    let lo = (center - TAIL_CUT * s).ceil() as i64;
    let hi = (center + TAIL_CUT * s).floor() as i64;
    debug_assert!(lo <= hi);
    loop {
        let x = rng.gen_range(lo..=hi);
        let d = x as f64 - center;
        let accept = (-std::f64::consts::PI * d * d / (s * s)).exp();
        if rng.gen::<f64>() < accept {
            return Ok(x);
        }
    }
}

/// Samples `n` independent coordinates of `D_{Z,s}` (the domain sampler).
pub fn sample_dom(
    n: usize,
    width: GaussWidth,
    rng: &mut RandomSource,
) -> Result<IntVector, SamplerError> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(BigInt::from(sample_z(0.0, width, rng)?));
    }
    Ok(IntVector::new(out))
}

/// Checks that every basis column lies in the kernel lattice of `a` and that
/// shapes line up; shared precondition of the lattice samplers.
fn check_trapdoor(a: &ModMatrix, basis: &IntBasis) -> Result<(), SamplerError> {
    if basis.dim() != a.cols() || basis.len() != a.cols() {
        return Err(SamplerError::DimensionMismatch {
            context: format!(
                "matrix has {} columns, basis is {} vectors of dimension {}",
                a.cols(),
                basis.len(),
                basis.dim()
            ),
        });
    }
    for (i, col) in basis.columns().iter().enumerate() {
        let image = a
            .mat_vec_mod(col)
            .map_err(|e| SamplerError::DimensionMismatch {
                context: e.to_string(),
            })?;
        if !image.is_zero() {
            return Err(SamplerError::InvalidTrapdoor {
                context: format!("column {i} maps to a nonzero syndrome"),
            });
        }
    }
    Ok(())
}

/// Validates the requested width against the basis quality: errors below
/// `0.8 * max_gs_norm` (the per-level floor would be violated) and logs a
/// warning below `max_gs_norm * sqrt(log2 dim)` (outside the smoothing
/// regime the indistinguishability analysis assumes; tolerated at toy scale).
fn check_width_for_basis(width: GaussWidth, basis: &IntBasis) -> Result<(), SamplerError> {
    let s = width.get();
    let quality = basis.max_gs_norm();
    let floor = MIN_WIDTH * quality;
    if s < floor {
        return Err(SamplerError::WidthBelowFloor { width: s, floor });
    }
    let dim = basis.dim().max(2) as f64;
    let asymptotic = quality * dim.log2().sqrt();
    if s < asymptotic {
        log::warn!(
            "gaussian width {s:.3} below smoothing guideline {asymptotic:.3} \
             (basis quality {quality:.3}); statistical guarantees weaken"
        );
    }
    Ok(())
}

/// Randomized nearest-plane walk: samples a lattice point of `L(basis)`
/// distributed as `D_{L,s,center}`. Level `i` uses width `s / |b*_i|` and
/// the exact column is subtracted from the running center.
fn klein_walk(basis: &IntBasis, s: f64, center: &[f64], rng: &mut RandomSource) -> IntVector {
    let dim = basis.dim();
    let mut c = center.to_vec();
    let mut coeffs = vec![0i64; basis.len()];
    for i in (0..basis.len()).rev() {
        let gs = &basis.gs_vectors()[i];
        let norm = basis.gs_norms()[i];
        let center_i = crate::linalg::dot(&c, gs) / (norm * norm);
        let width_i = GaussWidth::new(s / norm).expect("per-level width positive");
        let z = sample_z(center_i, width_i, rng).expect("per-level width above floor");
        coeffs[i] = z;
        let col = &basis.columns_f64()[i];
        for (cj, bj) in c.iter_mut().zip(col) {
            *cj -= z as f64 * bj;
        }
    }
    // Exact integer combination of the basis columns.
    let mut out = vec![BigInt::zero(); dim];
    for (i, &z) in coeffs.iter().enumerate() {
        if z == 0 {
            continue;
        }
        let zb = BigInt::from(z);
        for (o, e) in out.iter_mut().zip(basis.column(i).entries()) {
            *o += &zb * e;
        }
    }
    IntVector::new(out)
}

/// Samples a preimage `x` with `A x = u (mod q)`, distributed as the
/// discrete Gaussian of width `s` over the coset, centered at the origin.
///
/// A coset representative `t0` is solved exactly, the walk targets `-t0`
/// over the kernel lattice, and `t0` plus the walk result is returned.
pub fn sample_pre(
    a: &ModMatrix,
    basis: &IntBasis,
    u: &IntVector,
    width: GaussWidth,
    rng: &mut RandomSource,
) -> Result<IntVector, SamplerError> {
    check_trapdoor(a, basis)?;
    check_width_for_basis(width, basis)?;
    if u.len() != a.rows() {
        return Err(SamplerError::DimensionMismatch {
            context: format!("syndrome length {} vs {} rows", u.len(), a.rows()),
        });
    }
    let t0 = match solve_mod(a, u) {
        Ok(t0) => t0,
        Err(LinalgError::NoSolution) => return Err(SamplerError::NoCosetRepresentative),
        Err(e) => {
            return Err(SamplerError::DimensionMismatch {
                context: e.to_string(),
            })
        }
    };
    let center: Vec<f64> = t0.to_f64_vec().iter().map(|v| -v).collect();
    let v = klein_walk(basis, width.get(), &center, rng);
    let x = t0.add(&v).expect("dimensions agree");
    debug_assert_eq!(
        a.mat_vec_mod(&x).unwrap().reduce_mod(a.modulus()),
        u.reduce_mod(a.modulus())
    );
    Ok(x)
}

/// Samples a point of the kernel lattice of `a` near the real center `c`,
/// distributed as `D_{L,s,c}`.
pub fn sample_gaussian(
    a: &ModMatrix,
    basis: &IntBasis,
    width: GaussWidth,
    center: &[f64],
    rng: &mut RandomSource,
) -> Result<IntVector, SamplerError> {
    check_trapdoor(a, basis)?;
    check_width_for_basis(width, basis)?;
    if center.len() != basis.dim() {
        return Err(SamplerError::DimensionMismatch {
            context: format!("center length {} vs dimension {}", center.len(), basis.dim()),
        });
    }
    Ok(klein_walk(basis, width.get(), center, rng))
}
