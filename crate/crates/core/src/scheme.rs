//! The four scheme algorithms: parameter setup, key generation, ring
//! signing, signature combination, and verification.
//!
//! Parameters live in [`SchemeParams`]: an odd prime modulus `q`, message
//! length `k` (with `k/2` odd), row count `h = ⌊n / (6·log₂ q)⌋`, Gaussian
//! width `V = √(2nk·log₂ q)·log₂ n`, and `k` uniform target vectors
//! `α_1, ..., α_k` in `Z_q^h`. Two profiles differ only in the modulus
//! floor: `paper` insists on `q ≥ (nk)³`, `toy` on `q ≥ 2^14` so the whole
//! scheme runs at desk scale.
//!
//! Signing decomposes the message into two admissible halves, draws an
//! extended preimage for each half's target under the ring matrix, and adds
//! them over the integers; when one half is zero a single preimage suffices.
//! Signatures on the same ring and tag combine by entrywise addition.
//! Verification checks the norm gate `‖e‖ ≤ 2kV√(2kℓn)` and the target
//! equation `A_R·e ≡ t (mod q)`.
//!
//! Verification knows two modes. `Canonical` (the default) computes the
//! target from the deterministic integer lift of the message and accepts
//! every honestly signed message. `Paper` computes it from the raw bits,
//! which coincides with the lift only when the decomposition has no
//! overlap — low-weight messages verify under `Canonical` but not under
//! `Paper`; both modes are exposed deliberately.

use crate::decompose::{decompose, BitMessage, DecomposeError, LiftedMessage};
use crate::ext_preimage::{gen_sample_pre, ExtPreimageError, ExtTarget};
use crate::gaussian::{GaussWidth, SamplerError};
use crate::linalg::{IntBasis, IntVector, LinalgError, ModMatrix};
use crate::rng::RandomSource;
use crate::trapdoor::{trap_gen, TrapdoorError};
use rand::Rng;
use thiserror::Error;

/// Errors from parameter setup and the scheme algorithms.
#[derive(Debug, Error)]
pub enum SchemeError {
    /// `k` must be positive with `k/2` odd, i.e. `k = 2 (mod 4)`.
    #[error("k mod 4 != 2 (got k={k})")]
    InvalidK { k: usize },
    /// `h = ⌊n/(6 log₂ q)⌋` vanished; the caller must raise `n`.
    #[error("infeasible dimensions: n={n} gives h=0 under q={q}")]
    InfeasibleDimensions { n: usize, q: u64 },
    /// The profile floor left no representable modulus.
    #[error("modulus floor {floor} out of range")]
    ModulusOutOfRange { floor: u128 },
    /// Reconstructed parameters failed validation.
    #[error("invalid parameters: {context}")]
    InvalidParams { context: String },
    /// Tag length must equal `k`.
    #[error("tag length {got} does not match k={expected}")]
    TagLength { got: usize, expected: usize },
    /// Message length must equal `k`.
    #[error("message length {got} does not match k={expected}")]
    MessageLength { got: usize, expected: usize },
    /// Ring members disagree with the parameters or each other.
    #[error("ring shape mismatch: {context}")]
    RingShape { context: String },
    /// The signer's public matrix is not a ring member.
    #[error("signer not in ring")]
    SignerNotInRing,
    /// Labels are not a permutation of the member positions.
    #[error("malformed labels: {context}")]
    MalformedLabels { context: String },
    /// Signature vector shape inconsistent with the ring.
    #[error("malformed signature: {context}")]
    MalformedSignature { context: String },
    /// Combination inputs carry different label vectors.
    #[error("signatures from mixed rings cannot be combined")]
    MixedRings,
    /// At most `k` signatures may be combined.
    #[error("too many signatures to combine: {got} > {max}")]
    CombineTooMany { got: usize, max: usize },
    /// Combination coefficients are bits.
    #[error("combination coefficient {value} is not a bit")]
    CombineCoefficient { value: u8 },
    /// Combination needs at least one signature.
    #[error("nothing to combine")]
    EmptyCombine,
    /// Paper-profile trapdoor quality exceeded its asserted bound.
    #[error("trapdoor quality {quality:.3} exceeds bound {bound:.3}")]
    TrapdoorQuality { quality: f64, bound: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    ExtPreimage(#[from] ExtPreimageError),
    #[error(transparent)]
    Trapdoor(#[from] TrapdoorError),
}

/// Parameter profile: `Paper` enforces the `q ≥ (nk)³` floor; `Toy`
/// substitutes a `2^14` floor so everything runs at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Toy,
    Paper,
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Profile::Toy => write!(f, "toy"),
            Profile::Paper => write!(f, "paper"),
        }
    }
}

/// Public parameters shared by everyone.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeParams {
    n: usize,
    k: usize,
    q: u64,
    h: usize,
    v: f64,
    alphas: Vec<Vec<u64>>,
    profile: Profile,
    max_combine: usize,
}

impl SchemeParams {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// The Gaussian width `V`.
    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn alphas(&self) -> &[Vec<u64>] {
        &self.alphas
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// Maximum number of signatures one combination may take (equals `k`).
    pub fn max_combine(&self) -> usize {
        self.max_combine
    }

    /// The signing width as a checked [`GaussWidth`].
    pub fn sign_width(&self) -> Result<GaussWidth, SchemeError> {
        Ok(GaussWidth::new(self.v)?)
    }

    /// The verifier's norm gate `2kV√(2kℓn)` for rings of size `ell`.
    pub fn verify_norm_bound(&self, ell: usize) -> f64 {
        2.0 * self.k as f64 * self.v * (2.0 * self.k as f64 * (ell * self.n) as f64).sqrt()
    }

    /// Rebuilds parameters from stored fields, revalidating every invariant
    /// that setup guarantees (used by deserialization).
    pub fn from_raw_parts(
        n: usize,
        k: usize,
        q: u64,
        h: usize,
        v: f64,
        alphas: Vec<Vec<u64>>,
        profile: Profile,
    ) -> Result<Self, SchemeError> {
        if k == 0 || k % 4 != 2 {
            return Err(SchemeError::InvalidK { k });
        }
        if n == 0 {
            return Err(SchemeError::InvalidParams {
                context: "n must be positive".into(),
            });
        }
        if h == 0 {
            return Err(SchemeError::InfeasibleDimensions { n, q });
        }
        if q < 3 || q.is_multiple_of(2) || !is_prime_u64(q) {
            return Err(SchemeError::InvalidParams {
                context: format!("q={q} is not an odd prime"),
            });
        }
        if !v.is_finite() || v <= 0.0 {
            return Err(SchemeError::InvalidParams {
                context: "V must be positive and finite".into(),
            });
        }
        if alphas.len() != k {
            return Err(SchemeError::InvalidParams {
                context: format!("expected {k} target vectors, got {}", alphas.len()),
            });
        }
        if alphas.iter().any(|a| a.len() != h) {
            return Err(SchemeError::InvalidParams {
                context: format!("target vectors must have length h={h}"),
            });
        }
        if alphas.iter().flatten().any(|&e| e >= q) {
            return Err(SchemeError::InvalidParams {
                context: "target vector entry out of range".into(),
            });
        }
        Ok(Self {
            n,
            k,
            q,
            h,
            v,
            alphas,
            profile,
            max_combine: k,
        })
    }

    /// Replaces the target vectors, keeping everything else (the embedding
    /// step of the security reduction swaps in targets with known preimages).
    pub fn with_alphas(&self, alphas: Vec<Vec<u64>>) -> Result<Self, SchemeError> {
        Self::from_raw_parts(self.n, self.k, self.q, self.h, self.v, alphas, self.profile)
    }
}

/// Derives public parameters for dimension `n` and message length `k`.
///
/// The modulus is the smallest odd prime at or above the profile floor
/// (`(nk)³` for `Paper`, `2^14` for `Toy`); then `h = ⌊n/(6·log₂ q)⌋`
/// (an error if that is zero) and `V = √(2nk·log₂ q)·log₂ n`. The `k`
/// target vectors are drawn uniformly from the supplied source.
pub fn setup(
    n: usize,
    k: usize,
    profile: Profile,
    rng: &mut RandomSource,
) -> Result<SchemeParams, SchemeError> {
    if k == 0 || k % 4 != 2 {
        return Err(SchemeError::InvalidK { k });
    }
    if n == 0 {
        return Err(SchemeError::InvalidParams {
            context: "n must be positive".into(),
        });
    }
    let floor: u128 = match profile {
        Profile::Paper => {
            let nk = (n as u128) * (k as u128);
            nk * nk * nk
        }
        Profile::Toy => 1 << 14,
    };
    if floor > (1u128 << 62) {
        return Err(SchemeError::ModulusOutOfRange { floor });
    }
    let q = next_odd_prime(floor as u64);
    let log2q = (q as f64).log2();
    let h = (n as f64 / (6.0 * log2q)).floor() as usize;
    if h == 0 {
        return Err(SchemeError::InfeasibleDimensions { n, q });
    }
    let v = (2.0 * (n * k) as f64 * log2q).sqrt() * (n as f64).log2();
    let alphas = (0..k)
        .map(|_| (0..h).map(|_| rng.gen_range(0..q)).collect())
        .collect();
    Ok(SchemeParams {
        n,
        k,
        q,
        h,
        v,
        alphas,
        profile,
        max_combine: k,
    })
}

/// A user's secret: a short basis for their public matrix's kernel lattice,
/// with the Gram–Schmidt quality cached.
#[derive(Debug, Clone, PartialEq)]
pub struct SecretKey {
    basis: IntBasis,
    quality: f64,
}

impl SecretKey {
    pub fn basis(&self) -> &IntBasis {
        &self.basis
    }

    pub fn quality(&self) -> f64 {
        self.quality
    }

    /// Wraps a stored basis, recomputing the cached quality.
    pub fn from_basis(basis: IntBasis) -> Self {
        let quality = basis.max_gs_norm();
        Self { basis, quality }
    }
}

/// A user's key pair: opaque identifier, public matrix, secret basis.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyPair {
    user_id: u64,
    public: ModMatrix,
    secret: SecretKey,
}

impl KeyPair {
    pub fn user_id(&self) -> u64 {
        self.user_id
    }

    pub fn public(&self) -> &ModMatrix {
        &self.public
    }

    pub fn secret(&self) -> &SecretKey {
        &self.secret
    }

    /// Reassembles a pair from stored components without re-running key
    /// generation (used by deserialization; shapes are still checked).
    pub fn from_parts(
        user_id: u64,
        public: ModMatrix,
        secret: SecretKey,
    ) -> Result<Self, SchemeError> {
        if secret.basis.dim() != public.cols() {
            return Err(SchemeError::InvalidParams {
                context: "secret basis dimension does not match public matrix".into(),
            });
        }
        Ok(Self {
            user_id,
            public,
            secret,
        })
    }
}

/// Generates a key pair: a public matrix statistically close to uniform
/// together with a short basis of its kernel lattice.
///
/// Under the `Paper` profile the basis quality is asserted against the
/// `20·√(n·log₂ q)` bound; the `Toy` profile only reports it (the signing
/// width checks still apply per key at sign time).
pub fn keygen(
    params: &SchemeParams,
    user_id: u64,
    rng: &mut RandomSource,
) -> Result<KeyPair, SchemeError> {
    let pair = trap_gen(params.q, params.h, params.n, rng)?;
    let quality = pair.quality();
    let bound = 20.0 * ((params.n as f64) * (params.q as f64).log2()).sqrt();
    match params.profile {
        Profile::Paper => {
            if quality > bound {
                return Err(SchemeError::TrapdoorQuality { quality, bound });
            }
        }
        Profile::Toy => {
            log::debug!(
                "trapdoor quality {quality:.3} vs reference bound {bound:.3} (ratio {:.3})",
                quality / bound
            );
        }
    }
    Ok(KeyPair {
        user_id,
        public: pair.matrix().clone(),
        secret: SecretKey {
            basis: pair.basis().clone(),
            quality,
        },
    })
}

/// An ordered ring of member public matrices plus the label vector that
/// fixes how signature blocks map onto members.
///
/// Labels are 1-based member positions; block `j` of a signature under this
/// ring is bound to member `labels[j] - 1`. A freshly formed ring uses the
/// identity labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    members: Vec<ModMatrix>,
    labels: Vec<u32>,
}

impl Ring {
    /// Ring with identity labels `1..=ℓ`.
    pub fn new(members: Vec<ModMatrix>) -> Result<Self, SchemeError> {
        let labels = (1..=members.len() as u32).collect();
        Self::with_labels(members, labels)
    }

    /// Ring with an explicit label permutation.
    pub fn with_labels(members: Vec<ModMatrix>, labels: Vec<u32>) -> Result<Self, SchemeError> {
        if members.is_empty() {
            return Err(SchemeError::RingShape {
                context: "ring is empty".into(),
            });
        }
        let (rows, cols, q) = (members[0].rows(), members[0].cols(), members[0].modulus());
        if members
            .iter()
            .any(|m| m.rows() != rows || m.cols() != cols || m.modulus() != q)
        {
            return Err(SchemeError::RingShape {
                context: "members disagree on shape or modulus".into(),
            });
        }
        check_labels(&labels, members.len())?;
        Ok(Self { members, labels })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ModMatrix] {
        &self.members
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// 0-based position of a public matrix among the members.
    pub fn member_position(&self, public: &ModMatrix) -> Option<usize> {
        self.members.iter().position(|m| m == public)
    }

    /// Members arranged in block order according to `labels`
    /// (block `j` holds member `labels[j] - 1`).
    fn arranged(&self, labels: &[u32]) -> Vec<ModMatrix> {
        labels
            .iter()
            .map(|&l| self.members[(l - 1) as usize].clone())
            .collect()
    }
}

/// Checks that `labels` is a permutation of `1..=len`.
fn check_labels(labels: &[u32], len: usize) -> Result<(), SchemeError> {
    if labels.len() != len {
        return Err(SchemeError::MalformedLabels {
            context: format!("{} labels for {len} members", labels.len()),
        });
    }
    let mut seen = vec![false; len];
    for &l in labels {
        let idx = l as usize;
        if idx == 0 || idx > len {
            return Err(SchemeError::MalformedLabels {
                context: format!("label {l} out of range 1..={len}"),
            });
        }
        if seen[idx - 1] {
            return Err(SchemeError::MalformedLabels {
                context: format!("label {l} repeated"),
            });
        }
        seen[idx - 1] = true;
    }
    Ok(())
}

/// A `k`-bit tag; each bit selects the sign of one target vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tag {
    bits: Vec<u8>,
}

impl Tag {
    /// Validates that every entry is a bit.
    pub fn new(bits: Vec<u8>) -> Result<Self, SchemeError> {
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return Err(SchemeError::InvalidParams {
                context: format!("tag entry at index {i} is not a bit"),
            });
        }
        Ok(Self { bits })
    }

    /// A uniformly random tag of length `k`.
    pub fn random(k: usize, rng: &mut RandomSource) -> Self {
        Self {
            bits: (0..k).map(|_| rng.gen_range(0..=1u8)).collect(),
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// A ring signature: the integer vector `e` of length `ℓ·n` and a copy of
/// the label vector binding blocks to ring members.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    e: IntVector,
    labels: Vec<u32>,
}

impl Signature {
    pub fn e(&self) -> &IntVector {
        &self.e
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Reassembles a signature from stored components (used by
    /// deserialization; consistency against a ring is checked at verify).
    pub fn from_parts(e: IntVector, labels: Vec<u32>) -> Self {
        Self { e, labels }
    }
}

/// The verification target `t ∈ Z_q^h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target(IntVector);

impl Target {
    pub fn vector(&self) -> &IntVector {
        &self.0
    }

    pub fn into_vector(self) -> IntVector {
        self.0
    }
}

/// Computes `t = Σ_j (−1)^{τ_j}·m_j·α_j (mod q)`, with the sign realized
/// as multiplication by `q − m_j` when the tag bit is set. `entries` are
/// the integer message entries (bits of a half, or a lift's entries).
pub fn compute_target(
    params: &SchemeParams,
    tag: &Tag,
    entries: &[u64],
) -> Result<Target, SchemeError> {
    if tag.len() != params.k {
        return Err(SchemeError::TagLength {
            got: tag.len(),
            expected: params.k,
        });
    }
    if entries.len() != params.k {
        return Err(SchemeError::MessageLength {
            got: entries.len(),
            expected: params.k,
        });
    }
    let q = params.q;
    let mut t = vec![0u64; params.h];
    for (j, (&m_j, alpha)) in entries.iter().zip(&params.alphas).enumerate() {
        let mut c = m_j % q;
        if tag.bits[j] == 1 {
            c = (q - c) % q;
        }
        for (acc, &a) in t.iter_mut().zip(alpha) {
            let term = (c as u128 * a as u128) % q as u128;
            *acc = ((*acc as u128 + term) % q as u128) as u64;
        }
    }
    Ok(Target(IntVector::from_i64s(
        &t.into_iter().map(|x| x as i64).collect::<Vec<_>>(),
    )))
}

/// Checks a ring against the parameters' dimensions.
fn check_ring(params: &SchemeParams, ring: &Ring) -> Result<(), SchemeError> {
    let m = &ring.members()[0];
    if m.rows() != params.h || m.cols() != params.n || m.modulus() != params.q {
        return Err(SchemeError::RingShape {
            context: format!(
                "members are {}x{} mod {}, parameters need {}x{} mod {}",
                m.rows(),
                m.cols(),
                m.modulus(),
                params.h,
                params.n,
                params.q
            ),
        });
    }
    Ok(())
}

/// Signs `message` under `ring` on behalf of `key`, which must be a ring
/// member.
///
/// The message decomposes into halves `(u, v)`; when one half is zero a
/// single extended preimage on the message's own target suffices, otherwise
/// one preimage per half is drawn and the signature is their integer sum.
/// Every block except the signer's is a plain domain sample, so the output
/// does not depend on which member signed beyond their trapdoor's validity.
pub fn sign(
    params: &SchemeParams,
    key: &KeyPair,
    ring: &Ring,
    tag: &Tag,
    message: &BitMessage,
    rng: &mut RandomSource,
) -> Result<Signature, SchemeError> {
    if tag.len() != params.k {
        return Err(SchemeError::TagLength {
            got: tag.len(),
            expected: params.k,
        });
    }
    if message.len() != params.k {
        return Err(SchemeError::MessageLength {
            got: message.len(),
            expected: params.k,
        });
    }
    check_ring(params, ring)?;
    let position = ring
        .member_position(key.public())
        .ok_or(SchemeError::SignerNotInRing)?;
    let block_index = ring
        .labels
        .iter()
        .position(|&l| l as usize == position + 1)
        .expect("labels are a permutation of member positions");

    let width = params.sign_width()?;
    let blocks = ring.arranged(&ring.labels);
    let pair = decompose(message);

    let preimage_for = |entries: &[u64], rng: &mut RandomSource| -> Result<IntVector, SchemeError> {
        let t = compute_target(params, tag, entries)?;
        let target = ExtTarget::new(blocks.clone(), block_index, t.into_vector(), width)?;
        Ok(gen_sample_pre(&target, key.secret().basis(), rng)?)
    };

    let bit_entries =
        |m: &BitMessage| -> Vec<u64> { m.bits().iter().map(|&b| u64::from(b)).collect() };

    let e = if pair.u().is_zero() || pair.v().is_zero() {
        preimage_for(&bit_entries(message), rng)?
    } else {
        let e_u = preimage_for(&bit_entries(pair.u()), rng)?;
        let e_v = preimage_for(&bit_entries(pair.v()), rng)?;
        e_u.add(&e_v)?
    };
    Ok(Signature {
        e,
        labels: ring.labels.clone(),
    })
}

/// Combines up to `k` signatures over the same ring and tag with bit
/// coefficients: `e = Σ c_j e_j` over the integers, labels preserved.
pub fn combine(
    params: &SchemeParams,
    ring: &Ring,
    tag: &Tag,
    pairs: &[(u8, &Signature)],
) -> Result<Signature, SchemeError> {
    if tag.len() != params.k {
        return Err(SchemeError::TagLength {
            got: tag.len(),
            expected: params.k,
        });
    }
    check_ring(params, ring)?;
    if pairs.is_empty() {
        return Err(SchemeError::EmptyCombine);
    }
    if pairs.len() > params.max_combine {
        return Err(SchemeError::CombineTooMany {
            got: pairs.len(),
            max: params.max_combine,
        });
    }
    if let Some(&(c, _)) = pairs.iter().find(|&&(c, _)| c > 1) {
        return Err(SchemeError::CombineCoefficient { value: c });
    }
    let labels = pairs[0].1.labels().to_vec();
    check_labels(&labels, ring.len())?;
    if pairs.iter().any(|(_, s)| s.labels() != labels) {
        return Err(SchemeError::MixedRings);
    }
    let dim = ring.len() * params.n;
    if let Some((_, bad)) = pairs.iter().find(|(_, s)| s.e().len() != dim) {
        return Err(SchemeError::MalformedSignature {
            context: format!("vector length {} does not match {dim}", bad.e().len()),
        });
    }
    let mut e = IntVector::zeros(dim);
    for &(c, sig) in pairs {
        if c == 1 {
            e = e.add(sig.e())?;
        }
    }
    Ok(Signature { e, labels })
}

/// Message forms accepted by verification.
#[derive(Debug, Clone, PartialEq)]
pub enum VerifyMessage {
    /// A plain bit message (fresh signatures).
    Bits(BitMessage),
    /// An integer lift (combined signatures, or recomputed lifts).
    Lifted(LiftedMessage),
}

/// Target derivation mode. `Canonical` computes the target from the
/// message's deterministic lift and is complete for every message; `Paper`
/// uses the raw bits, which only matches signatures of messages whose
/// decomposition has zero overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VerifyMode {
    #[default]
    Canonical,
    Paper,
}

/// Why a structurally valid signature was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// `‖e‖` exceeds `2kV√(2kℓn)`.
    NormBound,
    /// `A_R·e ≠ t (mod q)`.
    TargetMismatch,
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectReason::NormBound => write!(f, "norm bound exceeded"),
            RejectReason::TargetMismatch => write!(f, "target equation mismatch"),
        }
    }
}

/// Verification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Verifies a signature: norm gate `‖e‖ ≤ 2kV√(2kℓn)`, then the target
/// equation `A_R·e ≡ t (mod q)` with `A_R` reconstructed from the
/// signature's labels over the verifier's member order.
pub fn verify(
    params: &SchemeParams,
    ring: &Ring,
    tag: &Tag,
    message: &VerifyMessage,
    signature: &Signature,
    mode: VerifyMode,
) -> Result<Verdict, SchemeError> {
    if tag.len() != params.k {
        return Err(SchemeError::TagLength {
            got: tag.len(),
            expected: params.k,
        });
    }
    check_ring(params, ring)?;
    check_labels(signature.labels(), ring.len())?;
    let dim = ring.len() * params.n;
    if signature.e().len() != dim {
        return Err(SchemeError::MalformedSignature {
            context: format!(
                "vector length {} does not match ring dimension {dim}",
                signature.e().len()
            ),
        });
    }

    let entries: Vec<u64> = match (message, mode) {
        (VerifyMessage::Bits(m), VerifyMode::Paper) => {
            m.bits().iter().map(|&b| u64::from(b)).collect()
        }
        (VerifyMessage::Bits(m), VerifyMode::Canonical) => {
            decompose(m).lift().entries().to_vec()
        }
        (VerifyMessage::Lifted(lm), _) => lm.entries().to_vec(),
    };

    if signature.e().l2_norm() > params.verify_norm_bound(ring.len()) {
        return Ok(Verdict::Reject(RejectReason::NormBound));
    }

    let t = compute_target(params, tag, &entries)?;
    let blocks = ring.arranged(signature.labels());
    let a_r = ModMatrix::concat_cols(&blocks.iter().collect::<Vec<_>>())?;
    let lhs = a_r.mat_vec_mod(signature.e())?;
    if lhs.reduce_mod(params.q) == t.vector().reduce_mod(params.q) {
        Ok(Verdict::Accept)
    } else {
        Ok(Verdict::Reject(RejectReason::TargetMismatch))
    }
}

/// Deterministic Miller–Rabin for `u64` (the listed witness set decides
/// primality for every 64-bit integer).
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Smallest odd prime greater than or equal to `floor`.
fn next_odd_prime(floor: u64) -> u64 {
    let mut candidate = floor.max(3);
    if candidate.is_multiple_of(2) {
        candidate += 1;
    }
    while !is_prime_u64(candidate) {
        candidate += 2;
    }
    candidate
}
