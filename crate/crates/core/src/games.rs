//! Executable security experiments: the anonymity game, the unforgeability
//! game's bookkeeping (forgery classification), and the reduction machinery
//! that embeds a SIS instance into the scheme's parameters, simulates
//! signatures without any trapdoor, and extracts a SIS solution from a
//! forgery.
//!
//! These harnesses mechanize the challengers exactly: fresh keys per trial,
//! uniform tags per sign-query group, and a challenge bit the adversary must
//! guess. Adversaries are pluggable; [`BlockNormDistinguisher`] ships as the
//! built-in statistical adversary. Security itself is asymptotic — the
//! experiments measure desk-scale statistics (guess rates, KS p-values,
//! abort rates) instead of proving anything.

use crate::decompose::{decompose, BitMessage, LiftedMessage};
use crate::ext_preimage::{ExtPreimageError, IndistReport};
use crate::gaussian::{sample_dom, SamplerError};
use crate::linalg::{IntVector, LinalgError, ModMatrix};
use crate::rng::RandomSource;
use crate::scheme::{
    keygen, sign, verify, KeyPair, Ring, SchemeError, SchemeParams, Signature, Tag,
    VerifyMessage, VerifyMode,
};
use crate::stats::{ks_two_sample, KsTest, StatsError};
use rand::Rng;
use thiserror::Error;

/// Errors from experiment configuration and execution.
#[derive(Debug, Error)]
pub enum GamesError {
    /// A script referenced a user index outside the key list.
    #[error("unknown user index {index} (have {users} users)")]
    UnknownUser { index: usize, users: usize },
    /// The challenge must name two distinct signers.
    #[error("challenge signers must differ")]
    ChallengeSignersEqual,
    /// A challenge signer is missing from the challenge ring.
    #[error("challenge signer {index} not in the challenge ring")]
    SignerNotInChallengeRing { index: usize },
    /// Miscellaneous configuration problems.
    #[error("invalid experiment configuration: {context}")]
    InvalidConfig { context: String },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    ExtPreimage(#[from] ExtPreimageError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

// ---------------------------------------------------------------------------
// Transcripts
// ---------------------------------------------------------------------------

/// One answered sign query: the signer, the ring used, the group's fresh
/// tag, and the issued signatures (one per basis message).
#[derive(Debug, Clone)]
pub struct SignRecord {
    pub signer: usize,
    pub ring: Ring,
    pub tag: Tag,
    pub messages: Vec<BitMessage>,
    pub signatures: Vec<Signature>,
}

/// The challenge phase of one anonymity trial.
#[derive(Debug, Clone)]
pub struct ChallengeRecord {
    pub s0: usize,
    pub s1: usize,
    pub ring: Ring,
    pub tag: Tag,
    pub message: BitMessage,
    pub b: u8,
    pub signature: Signature,
    pub guess: u8,
}

/// Everything one experiment run observed.
#[derive(Debug, Clone, Default)]
pub struct GameTranscript {
    /// Public matrices of all users, in key-generation order.
    pub user_publics: Vec<ModMatrix>,
    /// Indices of corrupted users (secret key revealed).
    pub corrupted: Vec<usize>,
    /// Sign queries in order.
    pub sign_log: Vec<SignRecord>,
    /// Challenge record (anonymity game only).
    pub challenge: Option<ChallengeRecord>,
    /// Whether the adversary won this trial.
    pub win: Option<bool>,
}

// ---------------------------------------------------------------------------
// Anonymity experiment
// ---------------------------------------------------------------------------

/// One scripted sign query: user index, ring member indices (ordered), and
/// the subspace's basis messages, all sharing one fresh tag.
#[derive(Debug, Clone)]
pub struct AnonSignQuery {
    pub signer: usize,
    pub ring_members: Vec<usize>,
    pub basis_messages: Vec<BitMessage>,
}

/// The challenge tuple the scripted adversary submits.
#[derive(Debug, Clone)]
pub struct AnonChallenge {
    pub s0: usize,
    pub s1: usize,
    pub ring_members: Vec<usize>,
    /// Adversary-chosen tag; `None` draws a fresh uniform tag per trial.
    pub tag: Option<Tag>,
    pub message: BitMessage,
}

/// A deterministic adversary schedule for the anonymity game.
#[derive(Debug, Clone)]
pub struct AnonymityScript {
    pub corruptions: Vec<usize>,
    pub sign_queries: Vec<AnonSignQuery>,
    pub challenge: AnonChallenge,
}

impl AnonymityScript {
    /// The minimal full-exposure script: no extra queries, challenge between
    /// users 0 and 1 over the full ring.
    pub fn simple_challenge(users: usize, message: BitMessage) -> Self {
        Self {
            corruptions: (0..users).collect(),
            sign_queries: Vec::new(),
            challenge: AnonChallenge {
                s0: 0,
                s1: 1,
                ring_members: (0..users).collect(),
                tag: None,
                message,
            },
        }
    }
}

/// What the adversary sees when guessing: the whole trial (anonymity holds
/// under full key exposure, so even the secret keys are in view).
pub struct AnonTrialView<'a> {
    pub params: &'a SchemeParams,
    pub keys: &'a [KeyPair],
    pub challenge_ring: &'a Ring,
    pub s0: usize,
    pub s1: usize,
    pub tag: &'a Tag,
    pub message: &'a BitMessage,
    pub signature: &'a Signature,
}

impl AnonTrialView<'_> {
    /// The signature block index bound to `user` in the challenge ring.
    pub fn block_of_user(&self, user: usize) -> Option<usize> {
        let position = self
            .challenge_ring
            .member_position(self.keys[user].public())?;
        self.signature
            .labels()
            .iter()
            .position(|&l| l as usize == position + 1)
    }
}

/// An anonymity-game adversary: guess the challenge bit from the view.
pub trait AnonymityAdversary {
    fn guess(&self, view: &AnonTrialView<'_>) -> u8;
}

/// Built-in statistical adversary: compares the Euclidean norms of the two
/// candidate signers' signature blocks and guesses the smaller one. Any
/// systematic norm difference between the trapdoor-sampled block and the
/// plain-sampled blocks would show up as advantage.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlockNormDistinguisher;

impl AnonymityAdversary for BlockNormDistinguisher {
    fn guess(&self, view: &AnonTrialView<'_>) -> u8 {
        let n = view.params.n();
        let blocks = view
            .signature
            .e()
            .split_blocks(n)
            .expect("signature length is a multiple of n");
        let norm_of = |user: usize| -> f64 {
            view.block_of_user(user)
                .map(|b| blocks[b].l2_norm())
                .unwrap_or(f64::INFINITY)
        };
        if norm_of(view.s0) <= norm_of(view.s1) {
            0
        } else {
            1
        }
    }
}

/// Outcome of [`run_anonymity_experiment`].
#[derive(Debug)]
pub struct AnonymityReport {
    pub trials: usize,
    pub wins: usize,
    pub guess_rate: f64,
    /// `|guess_rate - 1/2|`.
    pub advantage: f64,
    /// KS over challenge-signature norms, split by the challenge bit.
    pub norm_ks: KsTest,
    /// KS over pooled challenge-signature coordinates, split by the bit.
    pub coord_ks: KsTest,
    pub transcripts: Vec<GameTranscript>,
}

impl AnonymityReport {
    /// Line-delimited report: one `key=value` record per trial plus a
    /// summary line. Deterministic formatting for byte-stable output.
    pub fn report_lines(&self) -> Vec<String> {
        let mut lines = Vec::with_capacity(self.trials + 1);
        for (i, t) in self.transcripts.iter().enumerate() {
            let c = t.challenge.as_ref().expect("anonymity trial has challenge");
            lines.push(format!(
                "trial={} b={} guess={} win={} sig_norm={:.6}",
                i,
                c.b,
                c.guess,
                t.win.unwrap_or(false),
                c.signature.e().l2_norm()
            ));
        }
        lines.push(format!(
            "trials={} wins={} guess_rate={:.6} advantage={:.6} norm_ks_p={:.6} coord_ks_p={:.6}",
            self.trials, self.wins, self.guess_rate, self.advantage,
            self.norm_ks.p_value, self.coord_ks.p_value
        ));
        lines
    }
}

fn check_user(index: usize, users: usize) -> Result<(), GamesError> {
    if index >= users {
        return Err(GamesError::UnknownUser { index, users });
    }
    Ok(())
}

fn ring_of_users(keys: &[KeyPair], members: &[usize]) -> Result<Ring, GamesError> {
    for &m in members {
        check_user(m, keys.len())?;
    }
    Ok(Ring::new(
        members.iter().map(|&m| keys[m].public().clone()).collect(),
    )?)
}

/// Runs the anonymity game `trials` times: fresh keys per trial, scripted
/// corruption and sign queries, then a challenge signature by `s_b` for a
/// uniform bit `b`, handed to the adversary for a guess.
///
/// Every issued signature is verified in canonical mode (a transcript
/// invariant); the report aggregates the guess rate and KS statistics
/// comparing the `b = 0` and `b = 1` signature populations.
pub fn run_anonymity_experiment(
    params: &SchemeParams,
    users: usize,
    script: &AnonymityScript,
    trials: usize,
    adversary: &dyn AnonymityAdversary,
    rng: &mut RandomSource,
) -> Result<AnonymityReport, GamesError> {
    // Validate the script once, against user count rather than keys.
    let ch = &script.challenge;
    if ch.s0 == ch.s1 {
        return Err(GamesError::ChallengeSignersEqual);
    }
    for &u in script
        .corruptions
        .iter()
        .chain(ch.ring_members.iter())
        .chain([&ch.s0, &ch.s1])
    {
        check_user(u, users)?;
    }
    for i in [ch.s0, ch.s1] {
        if !ch.ring_members.contains(&i) {
            return Err(GamesError::SignerNotInChallengeRing { index: i });
        }
    }
    for q in &script.sign_queries {
        check_user(q.signer, users)?;
        if !q.ring_members.contains(&q.signer) {
            return Err(GamesError::SignerNotInChallengeRing { index: q.signer });
        }
        for &m in &q.ring_members {
            check_user(m, users)?;
        }
    }

    let mut wins = 0usize;
    let mut norms = (Vec::new(), Vec::new());
    let mut coords = (Vec::new(), Vec::new());
    let mut transcripts = Vec::with_capacity(trials);

    for _ in 0..trials {
        let keys: Vec<KeyPair> = (0..users)
            .map(|u| keygen(params, u as u64, rng))
            .collect::<Result<_, _>>()?;
        let mut transcript = GameTranscript {
            user_publics: keys.iter().map(|k| k.public().clone()).collect(),
            corrupted: script.corruptions.clone(),
            ..GameTranscript::default()
        };

        for q in &script.sign_queries {
            let ring = ring_of_users(&keys, &q.ring_members)?;
            let tag = Tag::random(params.k(), rng);
            let mut signatures = Vec::with_capacity(q.basis_messages.len());
            for m in &q.basis_messages {
                let sig = sign(params, &keys[q.signer], &ring, &tag, m, rng)?;
                let verdict = verify(
                    params,
                    &ring,
                    &tag,
                    &VerifyMessage::Bits(m.clone()),
                    &sig,
                    VerifyMode::Canonical,
                )?;
                debug_assert!(verdict.is_accept());
                signatures.push(sig);
            }
            transcript.sign_log.push(SignRecord {
                signer: q.signer,
                ring,
                tag,
                messages: q.basis_messages.clone(),
                signatures,
            });
        }

        let ring = ring_of_users(&keys, &ch.ring_members)?;
        let tag = match &ch.tag {
            Some(t) => t.clone(),
            None => Tag::random(params.k(), rng),
        };
        let b: u8 = rng.gen_range(0..=1);
        let signer = if b == 0 { ch.s0 } else { ch.s1 };
        let signature = sign(params, &keys[signer], &ring, &tag, &ch.message, rng)?;
        let verdict = verify(
            params,
            &ring,
            &tag,
            &VerifyMessage::Bits(ch.message.clone()),
            &signature,
            VerifyMode::Canonical,
        )?;
        if !verdict.is_accept() {
            return Err(GamesError::InvalidConfig {
                context: "challenge signature failed verification".into(),
            });
        }

        let view = AnonTrialView {
            params,
            keys: &keys,
            challenge_ring: &ring,
            s0: ch.s0,
            s1: ch.s1,
            tag: &tag,
            message: &ch.message,
            signature: &signature,
        };
        let guess = adversary.guess(&view);
        let win = guess == b;
        wins += usize::from(win);

        let bucket_norms = if b == 0 { &mut norms.0 } else { &mut norms.1 };
        bucket_norms.push(signature.e().l2_norm());
        let bucket_coords = if b == 0 { &mut coords.0 } else { &mut coords.1 };
        bucket_coords.extend(signature.e().to_f64_vec());

        transcript.challenge = Some(ChallengeRecord {
            s0: ch.s0,
            s1: ch.s1,
            ring,
            tag,
            message: ch.message.clone(),
            b,
            signature,
            guess,
        });
        transcript.win = Some(win);
        transcripts.push(transcript);
    }

    let guess_rate = wins as f64 / trials as f64;
    Ok(AnonymityReport {
        trials,
        wins,
        guess_rate,
        advantage: (guess_rate - 0.5).abs(),
        norm_ks: ks_two_sample(&norms.0, &norms.1)?,
        coord_ks: ks_two_sample(&coords.0, &coords.1)?,
        transcripts,
    })
}

/// Signer-swap statistic at the scheme level: one fixed ring of two keys,
/// `samples` signatures by each member on the same `(tag, message)`, and KS
/// statistics over the two populations' coordinates and norms.
pub fn signer_swap_stat(
    params: &SchemeParams,
    samples: usize,
    rng: &mut RandomSource,
) -> Result<IndistReport, GamesError> {
    let k0 = keygen(params, 0, rng)?;
    let k1 = keygen(params, 1, rng)?;
    let ring = Ring::new(vec![k0.public().clone(), k1.public().clone()]).unwrap();
    let tag = Tag::random(params.k(), rng);
    let message = BitMessage::all_ones(params.k()).unwrap();

    let mut coords = (Vec::new(), Vec::new());
    let mut norms = (Vec::new(), Vec::new());
    for _ in 0..samples {
        let sa = sign(params, &k0, &ring, &tag, &message, rng)?;
        let sb = sign(params, &k1, &ring, &tag, &message, rng)?;
        norms.0.push(sa.e().l2_norm());
        norms.1.push(sb.e().l2_norm());
        coords.0.extend(sa.e().to_f64_vec());
        coords.1.extend(sb.e().to_f64_vec());
    }
    Ok(IndistReport {
        coordinate_ks: ks_two_sample(&coords.0, &coords.1)?,
        norm_ks: ks_two_sample(&norms.0, &norms.1)?,
    })
}

/// Re-exported building block: KS comparison of extended preimages drawn
/// with two different signer trapdoors over one shared block list. See
/// [`signer_indistinguishability_stat`].
pub use crate::ext_preimage::signer_indistinguishability_stat as preimage_signer_stat;

// ---------------------------------------------------------------------------
// SIS embedding and the Case-1 simulator
// ---------------------------------------------------------------------------

/// A SIS challenge: a matrix `A ∈ Z_q^{h×ℓn}` and the norm bound `β`.
#[derive(Debug, Clone)]
pub struct SisInstance {
    matrix: ModMatrix,
    beta: f64,
}

impl SisInstance {
    pub fn new(matrix: ModMatrix, beta: f64) -> Result<Self, GamesError> {
        if !beta.is_finite() || beta <= 0.0 {
            return Err(GamesError::InvalidConfig {
                context: "beta must be positive".into(),
            });
        }
        Ok(Self { matrix, beta })
    }

    /// A uniform instance shaped for rings of size `ell`, with the
    /// reduction's bound `β = 4kV√(2kℓn)`.
    pub fn from_params(
        params: &SchemeParams,
        ell: usize,
        rng: &mut RandomSource,
    ) -> Result<Self, GamesError> {
        if ell == 0 {
            return Err(GamesError::InvalidConfig {
                context: "ring size must be positive".into(),
            });
        }
        let matrix = ModMatrix::uniform(params.h(), ell * params.n(), params.q(), rng);
        Self::new(matrix, sis_beta(params, ell))
    }

    pub fn matrix(&self) -> &ModMatrix {
        &self.matrix
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// The reduction's solution bound `β = 4kV√(2kℓn)` (twice the verifier's
/// norm gate, since a solution is a difference of two gate-passing vectors).
pub fn sis_beta(params: &SchemeParams, ell: usize) -> f64 {
    2.0 * params.verify_norm_bound(ell)
}

/// Parameters with embedded targets: `α_i = A·x_i` for secret short `x_i`.
#[derive(Debug, Clone)]
pub struct EmbeddedSetup {
    params: SchemeParams,
    instance: SisInstance,
    x_vectors: Vec<IntVector>,
    ell: usize,
}

impl EmbeddedSetup {
    /// The scheme parameters with the embedded `α` vectors swapped in.
    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn instance(&self) -> &SisInstance {
        &self.instance
    }

    /// The secret preimages of the embedded targets.
    pub fn x_vectors(&self) -> &[IntVector] {
        &self.x_vectors
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// The challenge ring: the instance matrix split into `ℓ` member blocks.
    pub fn ring(&self) -> Result<Ring, GamesError> {
        let blocks = self.instance.matrix().split_col_blocks(self.params.n())?;
        Ok(Ring::new(blocks)?)
    }
}

/// Embeds a SIS instance into the public parameters: samples `k` short
/// vectors `x_i` at width `V/√(k/2)` and sets `α_i = A·x_i (mod q)`, which
/// is statistically close to uniform while giving the embedder a secret
/// preimage of every target.
pub fn embed_sis(
    instance: &SisInstance,
    params: &SchemeParams,
    rng: &mut RandomSource,
) -> Result<EmbeddedSetup, GamesError> {
    let a = instance.matrix();
    if a.rows() != params.h() || a.modulus() != params.q() {
        return Err(GamesError::InvalidConfig {
            context: "instance shape does not match parameters".into(),
        });
    }
    if a.cols() == 0 || !a.cols().is_multiple_of(params.n()) {
        return Err(GamesError::InvalidConfig {
            context: format!("instance width {} is not a multiple of n", a.cols()),
        });
    }
    let ell = a.cols() / params.n();
    let width = crate::gaussian::GaussWidth::new(params.v() / (params.k() as f64 / 2.0).sqrt())?;
    let mut x_vectors = Vec::with_capacity(params.k());
    let mut alphas = Vec::with_capacity(params.k());
    for _ in 0..params.k() {
        let x = sample_dom(a.cols(), width, rng)?;
        alphas.push(a.mat_vec_mod(&x)?.reduce_mod(params.q()));
        x_vectors.push(x);
    }
    Ok(EmbeddedSetup {
        params: params.with_alphas(alphas)?,
        instance: instance.clone(),
        x_vectors,
        ell,
    })
}

/// Case-1 simulated signature: `e = Σ_p (−1)^{τ_p}(u_p + v_p)·x_p` over the
/// integers — no trapdoor involved. Deterministic given the embedding.
pub fn sim_sign_case1(
    setup: &EmbeddedSetup,
    tag: &Tag,
    message: &BitMessage,
) -> Result<Signature, GamesError> {
    let k = setup.params.k();
    if tag.len() != k {
        return Err(GamesError::Scheme(SchemeError::TagLength {
            got: tag.len(),
            expected: k,
        }));
    }
    if message.len() != k {
        return Err(GamesError::Scheme(SchemeError::MessageLength {
            got: message.len(),
            expected: k,
        }));
    }
    let lifted = decompose(message).lift();
    let dim = setup.ell * setup.params.n();
    let mut e = IntVector::zeros(dim);
    for (p, (&c, x)) in lifted.entries().iter().zip(&setup.x_vectors).enumerate() {
        if c == 0 {
            continue;
        }
        let signed = if tag.bits()[p] == 1 {
            -(c as i64)
        } else {
            c as i64
        };
        e = e.add(&x.scale(signed))?;
    }
    let labels = (1..=setup.ell as u32).collect();
    Ok(Signature::from_parts(e, labels))
}

/// KS comparison between real (trapdoor-path) and simulated (Case-1)
/// signatures.
#[derive(Debug, Clone, Copy)]
pub struct RealVsSimReport {
    pub norm_ks: KsTest,
    pub coord_ks: KsTest,
}

/// Draws `samples` real signatures (fixed fresh ring of size `ell`, signer
/// block 0) and `samples` simulated signatures (fresh embedding vectors per
/// draw) on the all-ones message with a shared fresh tag per draw, and
/// compares norms and pooled coordinates.
///
/// The all-ones message is the weight class whose simulated width matches
/// the real two-path width exactly (`Σ(u_p+v_p)² = k`); `sim_width_scale`
/// scales the simulator's sampling width — 1.0 for the match test, 2.0 for
/// the negative control.
pub fn distribution_match_scaled(
    params: &SchemeParams,
    ell: usize,
    samples: usize,
    sim_width_scale: f64,
    rng: &mut RandomSource,
) -> Result<RealVsSimReport, GamesError> {
    let keys: Vec<KeyPair> = (0..ell)
        .map(|u| keygen(params, u as u64, rng))
        .collect::<Result<_, _>>()?;
    let ring = Ring::new(keys.iter().map(|k| k.public().clone()).collect())?;
    let message = BitMessage::all_ones(params.k()).unwrap();
    let dim = ell * params.n();
    let sim_width = crate::gaussian::GaussWidth::new(
        sim_width_scale * params.v() / (params.k() as f64 / 2.0).sqrt(),
    )?;

    let mut real_norms = Vec::with_capacity(samples);
    let mut sim_norms = Vec::with_capacity(samples);
    let mut real_coords = Vec::new();
    let mut sim_coords = Vec::new();
    for _ in 0..samples {
        let tag = Tag::random(params.k(), rng);
        let real = sign(params, &keys[0], &ring, &tag, &message, rng)?;
        real_norms.push(real.e().l2_norm());
        real_coords.extend(real.e().to_f64_vec());

        // Fresh embedding vectors; the simulated signature is their signed
        // sum over the lift of the all-ones message (all entries 1).
        let mut e = IntVector::zeros(dim);
        for p in 0..params.k() {
            let x = sample_dom(dim, sim_width, rng)?;
            let signed = if tag.bits()[p] == 1 { -1 } else { 1 };
            e = e.add(&x.scale(signed))?;
        }
        sim_norms.push(e.l2_norm());
        sim_coords.extend(e.to_f64_vec());
    }
    Ok(RealVsSimReport {
        norm_ks: ks_two_sample(&real_norms, &sim_norms)?,
        coord_ks: ks_two_sample(&real_coords, &sim_coords)?,
    })
}

/// Real-vs-simulated distribution match at the faithful simulator width;
/// the instance fixes the ring shape (`ℓ = cols/n`).
pub fn distribution_match_real_vs_sim(
    params: &SchemeParams,
    instance: &SisInstance,
    samples: usize,
    rng: &mut RandomSource,
) -> Result<RealVsSimReport, GamesError> {
    let a = instance.matrix();
    if a.rows() != params.h() || a.modulus() != params.q() || !a.cols().is_multiple_of(params.n()) {
        return Err(GamesError::InvalidConfig {
            context: "instance shape does not match parameters".into(),
        });
    }
    distribution_match_scaled(params, a.cols() / params.n(), samples, 1.0, rng)
}

// ---------------------------------------------------------------------------
// Forgery classification and SIS extraction
// ---------------------------------------------------------------------------

/// A forgery the adversary submits: ring, tag, lifted message, signature.
#[derive(Debug, Clone)]
pub struct ForgeryClaim {
    pub ring: Ring,
    pub tag: Tag,
    pub message: LiftedMessage,
    pub signature: Signature,
}

/// Why a claim does not count as a forgery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    /// Fails scheme verification (canonical mode).
    FailsVerification,
    /// The exact tuple (ring, tag, message) was answered by a sign query.
    AnsweredBySignQuery,
    /// The claimed ring contains a corrupted user.
    RingIntersectsCorrupted,
    /// The tag was queried and the message lies in that query's span.
    MessageInQueriedSpan,
}

/// Forgery classification per the unforgeability game's winning conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForgeryClass {
    Invalid(InvalidReason),
    /// Tag never appeared in any sign query.
    Type1,
    /// Tag was queried, message outside that query's message subspace.
    Type2,
}

/// Packs a bit message into a `u64` mask (message lengths are ≤ 64 here).
fn bit_mask(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64 & 1) << i))
}

/// F₂-span membership by Gaussian elimination on bit masks.
fn in_f2_span(basis: &[u64], target: u64) -> bool {
    let mut rows: Vec<u64> = basis.to_vec();
    let mut t = target;
    for bit in 0..64 {
        let pivot_mask = 1u64 << bit;
        let Some(pos) = rows.iter().position(|&r| r & pivot_mask != 0) else {
            continue;
        };
        let pivot = rows.swap_remove(pos);
        rows.iter_mut().for_each(|r| {
            if *r & pivot_mask != 0 {
                *r ^= pivot;
            }
        });
        if t & pivot_mask != 0 {
            t ^= pivot;
        }
    }
    t == 0
}

/// Applies the unforgeability game's winning conditions to a claim given
/// the transcript: verification, corruption disjointness, freshness of the
/// tuple, then Type-1 (fresh tag) / Type-2 (queried tag, message outside
/// the queried F₂-span; lifted messages are reduced mod 2 first).
pub fn classify_forgery(
    params: &SchemeParams,
    transcript: &GameTranscript,
    claim: &ForgeryClaim,
) -> ForgeryClass {
    let verdict = verify(
        params,
        &claim.ring,
        &claim.tag,
        &VerifyMessage::Lifted(claim.message.clone()),
        &claim.signature,
        VerifyMode::Canonical,
    );
    if !matches!(verdict, Ok(v) if v.is_accept()) {
        return ForgeryClass::Invalid(InvalidReason::FailsVerification);
    }

    for &c in &transcript.corrupted {
        if let Some(public) = transcript.user_publics.get(c) {
            if claim.ring.member_position(public).is_some() {
                return ForgeryClass::Invalid(InvalidReason::RingIntersectsCorrupted);
            }
        }
    }

    // Condition 3: the exact tuple was issued. The challenger signed basis
    // messages; their canonical lifted form is what a claim could replay.
    for record in &transcript.sign_log {
        if record.ring != claim.ring || record.tag != claim.tag {
            continue;
        }
        if record
            .messages
            .iter()
            .any(|m| decompose(m).lift() == claim.message)
        {
            return ForgeryClass::Invalid(InvalidReason::AnsweredBySignQuery);
        }
    }

    let tag_matches: Vec<&SignRecord> = transcript
        .sign_log
        .iter()
        .filter(|r| r.tag == claim.tag)
        .collect();
    if tag_matches.is_empty() {
        return ForgeryClass::Type1;
    }
    let target = bit_mask(claim.message.parity().bits());
    for record in &tag_matches {
        let basis: Vec<u64> = record
            .messages
            .iter()
            .map(|m| bit_mask(m.bits()))
            .collect();
        if !in_f2_span(&basis, target) {
            return ForgeryClass::Type2;
        }
    }
    ForgeryClass::Invalid(InvalidReason::MessageInQueriedSpan)
}

/// Why SIS extraction failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractionFailure {
    /// The candidate `e* − x` vanished (the forgery equals the embedded
    /// combination exactly).
    Zero,
    /// The claim does not verify, or the candidate is not in the kernel.
    Membership,
    /// The candidate exceeds the instance bound β.
    Norm,
}

/// Extraction outcome: a solution vector or a failure reason (failures are
/// values, not errors — the reduction's analysis bounds their probability).
#[derive(Debug, Clone, PartialEq)]
pub enum Extraction {
    Solution(IntVector),
    Failed(ExtractionFailure),
}

/// Extracts a SIS solution from a verifying forgery against an embedded
/// setup: `x = Σ_i (−1)^{τ*_i} m*_i x_i`, candidate `e* − x`; returns the
/// candidate if it is nonzero, in the kernel of the instance matrix, and of
/// norm at most β.
pub fn extract_sis_solution(setup: &EmbeddedSetup, claim: &ForgeryClaim) -> Extraction {
    let ring = match setup.ring() {
        Ok(r) => r,
        Err(_) => return Extraction::Failed(ExtractionFailure::Membership),
    };
    let verdict = verify(
        setup.params(),
        &ring,
        &claim.tag,
        &VerifyMessage::Lifted(claim.message.clone()),
        &claim.signature,
        VerifyMode::Canonical,
    );
    if !matches!(verdict, Ok(v) if v.is_accept()) {
        return Extraction::Failed(ExtractionFailure::Membership);
    }

    let dim = setup.ell * setup.params.n();
    let mut x = IntVector::zeros(dim);
    for (i, (&m_i, x_i)) in claim
        .message
        .entries()
        .iter()
        .zip(setup.x_vectors())
        .enumerate()
    {
        if m_i == 0 {
            continue;
        }
        let signed = if claim.tag.bits()[i] == 1 {
            -(m_i as i64)
        } else {
            m_i as i64
        };
        x = x.add(&x_i.scale(signed)).expect("embedding dims agree");
    }
    let candidate = match claim.signature.e().sub(&x) {
        Ok(c) => c,
        Err(_) => return Extraction::Failed(ExtractionFailure::Membership),
    };
    if candidate.is_zero() {
        return Extraction::Failed(ExtractionFailure::Zero);
    }
    let image = setup
        .instance
        .matrix()
        .mat_vec_mod(&candidate)
        .expect("candidate has instance dimension");
    if !image.is_zero() {
        return Extraction::Failed(ExtractionFailure::Membership);
    }
    if candidate.l2_norm() > setup.instance.beta() {
        return Extraction::Failed(ExtractionFailure::Norm);
    }
    Extraction::Solution(candidate)
}

// ---------------------------------------------------------------------------
// Abort-rate experiment
// ---------------------------------------------------------------------------

/// Empirical non-abort rate of the reduction's ring-guessing step, with the
/// combinatorial reference bound `1/(2·q_E·C(q_E, ⌊q_E/2⌋))`.
#[derive(Debug, Clone, Copy)]
pub struct AbortReport {
    pub trials: usize,
    pub non_aborts: usize,
    pub rate: f64,
    pub bound: f64,
}

impl AbortReport {
    pub fn report_lines(&self) -> Vec<String> {
        vec![format!(
            "trials={} non_aborts={} rate={:.6} bound={:.6}",
            self.trials, self.non_aborts, self.rate, self.bound
        )]
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Monte Carlo over the reduction's guessing step: the challenger guesses a
/// ring size `ℓ ∈ [q_E]` and an index vector `w ∈ [q_E]^ℓ`; the adversary
/// corrupts a uniform half of the users and forges over a uniform ordered
/// ring of uncorrupted users. Non-abort means no corruption hits `w` and the
/// forgery ring equals the guess exactly. The rate is reported against the
/// paper-side lower bound; nothing is asserted.
pub fn abort_rate_experiment(users: usize, trials: usize, rng: &mut RandomSource) -> AbortReport {
    assert!(users >= 2, "need at least two users");
    let mut non_aborts = 0usize;
    for _ in 0..trials {
        let ell_guess = rng.gen_range(1..=users);
        let w: Vec<usize> = (0..ell_guess).map(|_| rng.gen_range(0..users)).collect();

        // Adversary corrupts a uniform half of the users.
        let mut order: Vec<usize> = (0..users).collect();
        for i in (1..users).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let (corrupted, honest) = order.split_at(users / 2);
        if w.iter().any(|u| corrupted.contains(u)) {
            continue; // abort at corruption time
        }

        // Forgery ring: uniform ordered tuple of distinct honest users.
        let mut pool = honest.to_vec();
        for i in (1..pool.len()).rev() {
            pool.swap(i, rng.gen_range(0..=i));
        }
        let ell_forge = rng.gen_range(1..=pool.len());
        let forge_ring = &pool[..ell_forge];
        if forge_ring == w.as_slice() {
            non_aborts += 1;
        }
    }
    let bound = 1.0 / (2.0 * users as f64 * binomial(users as u64, users as u64 / 2) as f64);
    AbortReport {
        trials,
        non_aborts,
        rate: non_aborts as f64 / trials as f64,
        bound,
    }
}

// ---------------------------------------------------------------------------
// Forgery-simulation driver (used by the CLI experiment command)
// ---------------------------------------------------------------------------

/// Headline statistics of the reduction machinery in one run.
#[derive(Debug, Clone, Copy)]
pub struct ForgeSimReport {
    pub sims: usize,
    pub sim_verify_rate: f64,
    pub norm_ks: KsTest,
    pub coord_ks: KsTest,
    pub extraction_ok: bool,
    pub self_cancel_zero: bool,
}

impl ForgeSimReport {
    pub fn report_lines(&self) -> Vec<String> {
        vec![format!(
            "sims={} sim_verify_rate={:.6} norm_ks_p={:.6} coord_ks_p={:.6} extraction_ok={} self_cancel_zero={}",
            self.sims,
            self.sim_verify_rate,
            self.norm_ks.p_value,
            self.coord_ks.p_value,
            self.extraction_ok,
            self.self_cancel_zero,
        )]
    }
}

/// Exercises the reduction end to end: embedded-simulator verification rate
/// over random `(τ, m)`, the real-vs-sim KS match, a constructed-witness
/// extraction, and the self-cancellation case.
pub fn run_forgery_simulation(
    params: &SchemeParams,
    ell: usize,
    sims: usize,
    ks_samples: usize,
    rng: &mut RandomSource,
) -> Result<ForgeSimReport, GamesError> {
    // Simulator verification rate under a uniform embedded instance.
    let instance = SisInstance::from_params(params, ell, rng)?;
    let setup = embed_sis(&instance, params, rng)?;
    let ring = setup.ring()?;
    let mut accepted = 0usize;
    for _ in 0..sims {
        let tag = Tag::random(params.k(), rng);
        let message = BitMessage::uniform(params.k(), rng).unwrap();
        let sig = sim_sign_case1(&setup, &tag, &message)?;
        let verdict = verify(
            setup.params(),
            &ring,
            &tag,
            &VerifyMessage::Bits(message),
            &sig,
            VerifyMode::Canonical,
        )?;
        accepted += usize::from(verdict.is_accept());
    }

    let ks = distribution_match_real_vs_sim(params, &instance, ks_samples, rng)?;

    // Constructed-witness extraction: build the instance out of trapdoor
    // keys so a short kernel vector is samplable, then forge e* = x + w.
    let keys: Vec<KeyPair> = (0..ell)
        .map(|u| keygen(params, u as u64, rng))
        .collect::<Result<_, _>>()?;
    let blocks: Vec<&ModMatrix> = keys.iter().map(|k| k.public()).collect();
    let known = ModMatrix::concat_cols(&blocks)?;
    let trapdoored = SisInstance::new(known, sis_beta(params, ell))?;
    let setup2 = embed_sis(&trapdoored, params, rng)?;
    let witness = kernel_vector(setup2.params(), &keys, rng)?;
    let tag = Tag::random(params.k(), rng);
    let message = BitMessage::uniform(params.k(), rng).unwrap();
    let claim = witness_claim(&setup2, &tag, &message, &witness)?;
    let extraction_ok = match extract_sis_solution(&setup2, &claim) {
        Extraction::Solution(sol) => {
            sol == witness
                && setup2
                    .instance()
                    .matrix()
                    .mat_vec_mod(&sol)?
                    .is_zero()
                && sol.l2_norm() <= setup2.instance().beta()
        }
        Extraction::Failed(_) => false,
    };

    // Self-cancellation: the simulator's own output extracts to zero.
    let sim = sim_sign_case1(&setup2, &tag, &message)?;
    let self_claim = ForgeryClaim {
        ring: setup2.ring()?,
        tag,
        message: decompose(&message).lift(),
        signature: sim,
    };
    let self_cancel_zero = matches!(
        extract_sis_solution(&setup2, &self_claim),
        Extraction::Failed(ExtractionFailure::Zero)
    );

    Ok(ForgeSimReport {
        sims,
        sim_verify_rate: accepted as f64 / sims as f64,
        norm_ks: ks.norm_ks,
        coord_ks: ks.coord_ks,
        extraction_ok,
        self_cancel_zero,
    })
}

/// A short nonzero kernel vector of the concatenated key matrices, via an
/// extended preimage of the zero syndrome under the first key's trapdoor.
pub fn kernel_vector(
    params: &SchemeParams,
    keys: &[KeyPair],
    rng: &mut RandomSource,
) -> Result<IntVector, GamesError> {
    use crate::ext_preimage::{gen_sample_pre, ExtTarget};
    let blocks: Vec<ModMatrix> = keys.iter().map(|k| k.public().clone()).collect();
    let zero = IntVector::zeros(params.h());
    let width = params.sign_width()?;
    loop {
        let target = ExtTarget::new(blocks.clone(), 0, zero.clone(), width)?;
        let w = gen_sample_pre(&target, keys[0].secret().basis(), rng)?;
        if !w.is_zero() {
            return Ok(w);
        }
    }
}

/// Builds the forgery claim `e* = x + w` over the embedded setup, where `x`
/// is the embedded combination for `(tag, message)` and `w` a known kernel
/// vector. Verifies by construction when `w` is in the kernel.
pub fn witness_claim(
    setup: &EmbeddedSetup,
    tag: &Tag,
    message: &BitMessage,
    witness: &IntVector,
) -> Result<ForgeryClaim, GamesError> {
    let sim = sim_sign_case1(setup, tag, message)?;
    let e = sim.e().add(witness)?;
    Ok(ForgeryClaim {
        ring: setup.ring()?,
        tag: tag.clone(),
        message: decompose(message).lift(),
        signature: Signature::from_parts(e, sim.labels().to_vec()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::combine_lifts;
    use crate::scheme::{combine, setup, Profile};
    use crate::stats::chi_square_uniform;

    fn toy_params(seed: u8) -> SchemeParams {
        let mut rng = RandomSource::from_seed([seed; 32]);
        setup(96, 6, Profile::Toy, &mut rng).unwrap()
    }

    #[test]
    fn anonymity_script_validation() {
        let params = toy_params(60);
        let mut rng = RandomSource::from_seed([61u8; 32]);
        let m = BitMessage::all_ones(6).unwrap();
        let mut script = AnonymityScript::simple_challenge(2, m.clone());
        script.challenge.s1 = 0;
        assert!(matches!(
            run_anonymity_experiment(&params, 2, &script, 1, &BlockNormDistinguisher, &mut rng),
            Err(GamesError::ChallengeSignersEqual)
        ));
        let mut script = AnonymityScript::simple_challenge(2, m.clone());
        script.corruptions.push(5);
        assert!(matches!(
            run_anonymity_experiment(&params, 2, &script, 1, &BlockNormDistinguisher, &mut rng),
            Err(GamesError::UnknownUser { index: 5, .. })
        ));
        let mut script = AnonymityScript::simple_challenge(3, m);
        script.challenge.ring_members = vec![0, 2];
        assert!(matches!(
            run_anonymity_experiment(&params, 3, &script, 1, &BlockNormDistinguisher, &mut rng),
            Err(GamesError::SignerNotInChallengeRing { index: 1 })
        ));
    }

    #[test]
    fn anonymity_runs_under_full_corruption_with_queries() {
        let params = toy_params(62);
        let mut rng = RandomSource::from_seed([63u8; 32]);
        let m = BitMessage::new(vec![1, 0, 1, 0, 1, 0]).unwrap();
        let mut script = AnonymityScript::simple_challenge(2, m);
        script.sign_queries.push(AnonSignQuery {
            signer: 1,
            ring_members: vec![0, 1],
            basis_messages: vec![
                BitMessage::new(vec![1, 0, 0, 0, 0, 0]).unwrap(),
                BitMessage::new(vec![0, 1, 1, 1, 0, 0]).unwrap(),
            ],
        });
        let report =
            run_anonymity_experiment(&params, 2, &script, 4, &BlockNormDistinguisher, &mut rng)
                .unwrap();
        assert_eq!(report.trials, 4);
        assert_eq!(report.transcripts.len(), 4);
        for t in &report.transcripts {
            assert_eq!(t.corrupted, vec![0, 1]);
            assert_eq!(t.sign_log.len(), 1);
            assert_eq!(t.sign_log[0].signatures.len(), 2);
            assert!(t.challenge.is_some());
        }
        let lines = report.report_lines();
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("trials=4"));
    }

    #[test]
    fn embedded_alphas_recompute_exactly_and_look_uniform() {
        let params = toy_params(64);
        let mut rng = RandomSource::from_seed([65u8; 32]);
        let mut pooled = Vec::new();
        let mut first = true;
        while pooled.len() < 10_000 {
            let instance = SisInstance::from_params(&params, 2, &mut rng).unwrap();
            let setup = embed_sis(&instance, &params, &mut rng).unwrap();
            for (alpha, x) in setup.params().alphas().iter().zip(setup.x_vectors()) {
                let recomputed = instance.matrix().mat_vec_mod(x).unwrap().reduce_mod(params.q());
                assert_eq!(&recomputed, alpha);
            }
            if first {
                // Width bound on the embedded preimages, first batch.
                let bound = (params.v() / 3f64.sqrt()) * ((2 * params.n()) as f64).sqrt();
                for x in setup.x_vectors() {
                    assert!(x.l2_norm() <= bound, "embedded x too long");
                }
                first = false;
            }
            pooled.extend(setup.params().alphas().iter().map(|a| a[0]));
        }
        let test = chi_square_uniform(&pooled, params.q(), 64).unwrap();
        assert!(test.p_value > 0.01, "chi2 p={}", test.p_value);
    }

    #[test]
    fn simulated_signatures_verify_and_zero_message_gives_zero() {
        let params = toy_params(66);
        let mut rng = RandomSource::from_seed([67u8; 32]);
        let instance = SisInstance::from_params(&params, 2, &mut rng).unwrap();
        let setup = embed_sis(&instance, &params, &mut rng).unwrap();
        let ring = setup.ring().unwrap();
        for trial in 0..200 {
            let tag = Tag::random(6, &mut rng);
            let message = BitMessage::uniform(6, &mut rng).unwrap();
            let sig = sim_sign_case1(&setup, &tag, &message).unwrap();
            let verdict = verify(
                setup.params(),
                &ring,
                &tag,
                &VerifyMessage::Bits(message.clone()),
                &sig,
                VerifyMode::Canonical,
            )
            .unwrap();
            assert!(verdict.is_accept(), "trial {trial} rejected");
            let bound = 2.0 * params.v() * ((2 * params.k() * 2 * params.n()) as f64).sqrt();
            assert!(sig.e().l2_norm() <= bound, "trial {trial} norm");
        }
        let zero = BitMessage::zero(6).unwrap();
        let sig = sim_sign_case1(&setup, &Tag::random(6, &mut rng), &zero).unwrap();
        assert!(sig.e().is_zero());
    }

    #[test]
    fn real_vs_sim_distributions_match_with_working_controls() {
        let params = toy_params(75);
        let mut rng = RandomSource::from_seed([76u8; 32]);
        let instance = SisInstance::from_params(&params, 2, &mut rng).unwrap();

        // Faithful width: indistinguishable at this sample size.
        let report = distribution_match_real_vs_sim(&params, &instance, 1200, &mut rng).unwrap();
        assert!(report.norm_ks.p_value > 0.01, "norm p={}", report.norm_ks.p_value);
        assert!(
            report.coord_ks.p_value > 0.01,
            "coord p={}",
            report.coord_ks.p_value
        );

        // Doubled simulator width: detected decisively.
        let control = distribution_match_scaled(&params, 2, 600, 2.0, &mut rng).unwrap();
        assert!(
            control.norm_ks.p_value < 0.001,
            "negative control p={}",
            control.norm_ks.p_value
        );

        // Shape mismatch is a configuration error.
        let narrow = SisInstance::from_params(&params, 1, &mut rng).unwrap();
        let wrong = SisInstance::new(
            ModMatrix::uniform(params.h() + 1, params.n(), params.q(), &mut rng),
            narrow.beta(),
        )
        .unwrap();
        assert!(matches!(
            distribution_match_real_vs_sim(&params, &wrong, 10, &mut rng),
            Err(GamesError::InvalidConfig { .. })
        ));
    }

    #[test]
    fn classification_follows_the_winning_conditions() {
        let params = toy_params(68);
        let mut rng = RandomSource::from_seed([69u8; 32]);
        let keys: Vec<KeyPair> = (0..2)
            .map(|u| keygen(&params, u, &mut rng).unwrap())
            .collect();
        let ring = Ring::new(keys.iter().map(|k| k.public().clone()).collect()).unwrap();
        let tag = Tag::random(6, &mut rng);
        let m1 = BitMessage::new(vec![1, 0, 0, 0, 0, 0]).unwrap();
        let m2 = BitMessage::new(vec![0, 1, 0, 0, 0, 0]).unwrap();
        let sig1 = sign(&params, &keys[0], &ring, &tag, &m1, &mut rng).unwrap();
        let sig2 = sign(&params, &keys[0], &ring, &tag, &m2, &mut rng).unwrap();
        let transcript = GameTranscript {
            user_publics: keys.iter().map(|k| k.public().clone()).collect(),
            corrupted: vec![],
            sign_log: vec![SignRecord {
                signer: 0,
                ring: ring.clone(),
                tag: tag.clone(),
                messages: vec![m1.clone(), m2.clone()],
                signatures: vec![sig1.clone(), sig2.clone()],
            }],
            challenge: None,
            win: None,
        };

        // Replaying an issued signature: Invalid (condition 3).
        let replay = ForgeryClaim {
            ring: ring.clone(),
            tag: tag.clone(),
            message: decompose(&m1).lift(),
            signature: sig1.clone(),
        };
        assert_eq!(
            classify_forgery(&params, &transcript, &replay),
            ForgeryClass::Invalid(InvalidReason::AnsweredBySignQuery)
        );

        // Same tag, message in the queried span (m1 + m2), not itself
        // issued: Invalid (condition 4 fails).
        let sig_sum = combine(&params, &ring, &tag, &[(1, &sig1), (1, &sig2)]).unwrap();
        let in_span = ForgeryClaim {
            ring: ring.clone(),
            tag: tag.clone(),
            message: combine_lifts(&[decompose(&m1).lift(), decompose(&m2).lift()]).unwrap(),
            signature: sig_sum,
        };
        assert_eq!(
            classify_forgery(&params, &transcript, &in_span),
            ForgeryClass::Invalid(InvalidReason::MessageInQueriedSpan)
        );

        // Same tag, message outside the span: Type2.
        let m_out = BitMessage::new(vec![0, 0, 1, 0, 0, 0]).unwrap();
        let sig_out = sign(&params, &keys[0], &ring, &tag, &m_out, &mut rng).unwrap();
        let type2 = ForgeryClaim {
            ring: ring.clone(),
            tag: tag.clone(),
            message: decompose(&m_out).lift(),
            signature: sig_out.clone(),
        };
        assert_eq!(
            classify_forgery(&params, &transcript, &type2),
            ForgeryClass::Type2
        );

        // Fresh tag: Type1.
        let fresh_tag = Tag::new(tag.bits().iter().map(|b| b ^ 1).collect()).unwrap();
        let sig_fresh = sign(&params, &keys[0], &ring, &fresh_tag, &m_out, &mut rng).unwrap();
        let type1 = ForgeryClaim {
            ring: ring.clone(),
            tag: fresh_tag.clone(),
            message: decompose(&m_out).lift(),
            signature: sig_fresh.clone(),
        };
        assert_eq!(
            classify_forgery(&params, &transcript, &type1),
            ForgeryClass::Type1
        );

        // Corrupting a ring member invalidates everything.
        let mut corrupted = transcript.clone();
        corrupted.corrupted.push(0);
        assert_eq!(
            classify_forgery(&params, &corrupted, &type1),
            ForgeryClass::Invalid(InvalidReason::RingIntersectsCorrupted)
        );

        // A claim that fails verification is Invalid regardless.
        let garbage = ForgeryClaim {
            ring,
            tag: fresh_tag,
            message: decompose(&m1).lift(),
            signature: sig_fresh,
        };
        assert_eq!(
            classify_forgery(&params, &transcript, &garbage),
            ForgeryClass::Invalid(InvalidReason::FailsVerification)
        );
    }

    #[test]
    fn f2_span_elimination_is_correct() {
        // Basis {110000, 011000}: span contains 101000 (sum), not 100100.
        let basis = [0b000011u64, 0b000110];
        assert!(in_f2_span(&basis, 0b000101));
        assert!(in_f2_span(&basis, 0b000011));
        assert!(in_f2_span(&basis, 0));
        assert!(!in_f2_span(&basis, 0b001001));
        assert!(!in_f2_span(&[], 1));
        assert!(in_f2_span(&[], 0));
    }

    #[test]
    fn extraction_recovers_a_constructed_witness() {
        let params = toy_params(70);
        let mut rng = RandomSource::from_seed([71u8; 32]);
        let keys: Vec<KeyPair> = (0..2)
            .map(|u| keygen(&params, u, &mut rng).unwrap())
            .collect();
        let blocks: Vec<&ModMatrix> = keys.iter().map(|k| k.public()).collect();
        let instance =
            SisInstance::new(ModMatrix::concat_cols(&blocks).unwrap(), sis_beta(&params, 2))
                .unwrap();
        let setup = embed_sis(&instance, &params, &mut rng).unwrap();
        let witness = kernel_vector(setup.params(), &keys, &mut rng).unwrap();
        assert!(instance.matrix().mat_vec_mod(&witness).unwrap().is_zero());

        let tag = Tag::random(6, &mut rng);
        let message = BitMessage::new(vec![1, 1, 0, 1, 0, 0]).unwrap();
        let claim = witness_claim(&setup, &tag, &message, &witness).unwrap();
        match extract_sis_solution(&setup, &claim) {
            Extraction::Solution(sol) => {
                assert_eq!(sol, witness);
                assert!(instance.matrix().mat_vec_mod(&sol).unwrap().is_zero());
                assert!(sol.l2_norm() <= instance.beta());
            }
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn extraction_failure_reasons_are_reported() {
        let params = toy_params(72);
        let mut rng = RandomSource::from_seed([73u8; 32]);
        let instance = SisInstance::from_params(&params, 2, &mut rng).unwrap();
        let setup = embed_sis(&instance, &params, &mut rng).unwrap();
        let tag = Tag::random(6, &mut rng);
        let message = BitMessage::new(vec![1, 0, 1, 1, 0, 1]).unwrap();

        // Self-cancellation: the simulator's own signature extracts to zero.
        let sim = sim_sign_case1(&setup, &tag, &message).unwrap();
        let self_claim = ForgeryClaim {
            ring: setup.ring().unwrap(),
            tag: tag.clone(),
            message: decompose(&message).lift(),
            signature: sim.clone(),
        };
        assert_eq!(
            extract_sis_solution(&setup, &self_claim),
            Extraction::Failed(ExtractionFailure::Zero)
        );

        // Non-verifying claim: membership failure.
        let mut bumped = sim.e().to_i64_vec().unwrap();
        bumped[0] += 1;
        let bad_claim = ForgeryClaim {
            ring: setup.ring().unwrap(),
            tag: tag.clone(),
            message: decompose(&message).lift(),
            signature: Signature::from_parts(
                IntVector::from_i64s(&bumped),
                sim.labels().to_vec(),
            ),
        };
        assert_eq!(
            extract_sis_solution(&setup, &bad_claim),
            Extraction::Failed(ExtractionFailure::Membership)
        );

        // Tiny beta turns a genuine witness into a norm failure. The claim
        // must still verify, so beta is shrunk only on the instance copy
        // handed to the extractor.
        let keys: Vec<KeyPair> = (0..2)
            .map(|u| keygen(&params, u, &mut rng).unwrap())
            .collect();
        let blocks: Vec<&ModMatrix> = keys.iter().map(|k| k.public()).collect();
        let known = ModMatrix::concat_cols(&blocks).unwrap();
        let honest = SisInstance::new(known.clone(), sis_beta(&params, 2)).unwrap();
        let setup2 = embed_sis(&honest, &params, &mut rng).unwrap();
        let witness = kernel_vector(setup2.params(), &keys, &mut rng).unwrap();
        let claim = witness_claim(&setup2, &tag, &message, &witness).unwrap();
        let squeezed = EmbeddedSetup {
            params: setup2.params().clone(),
            instance: SisInstance::new(known, 1.0).unwrap(),
            x_vectors: setup2.x_vectors().to_vec(),
            ell: setup2.ell(),
        };
        assert_eq!(
            extract_sis_solution(&squeezed, &claim),
            Extraction::Failed(ExtractionFailure::Norm)
        );
    }

    #[test]
    fn abort_rate_is_reported_against_the_bound() {
        let mut rng = RandomSource::from_seed([74u8; 32]);
        let report = abort_rate_experiment(4, 50_000, &mut rng);
        assert_eq!(report.trials, 50_000);
        assert!((0.0..=1.0).contains(&report.rate));
        assert!((report.bound - 1.0 / 48.0).abs() < 1e-12);
        // The guessing game should clear its own lower bound comfortably
        // (3σ slack at this sample size).
        let sigma = (report.rate * (1.0 - report.rate) / 50_000f64).sqrt();
        assert!(report.rate + 3.0 * sigma >= report.bound, "{report:?}");
        assert!(report.report_lines()[0].starts_with("trials=50000"));
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(10, 5), 252);
        assert_eq!(binomial(6, 0), 1);
    }
}
