//! Binary message decomposition and lifting.
//!
//! A message is a bit vector of length `k` with `k = 2 (mod 4)`, so that
//! `kappa = k/2` is odd. [`decompose`] splits a message `m` into two halves
//! `(u, v)` whose entrywise integer sum is congruent to `m` mod 2 and whose
//! weights land in the admissible band `{0} ∪ [kappa-1, kappa+1]`. Low-weight
//! messages cannot reach the band with disjoint halves, so both halves are
//! padded with the same prefix of the zero positions; those shared positions
//! are the *overlap* and surface as entries equal to 2 in the lift `u + v`.
//!
//! [`lift`] materializes `u + v` over the integers, and [`combine_lifts`]
//! adds lifts entrywise — the message-side image of signature combination.

use crate::rng::RandomSource;
use rand::Rng;
use thiserror::Error;

/// Errors for message construction and lifting.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecomposeError {
    /// Message length must be positive and congruent to 2 mod 4.
    #[error("message length {len} is not congruent to 2 mod 4")]
    InvalidLength { len: usize },
    /// Bit vectors may only contain 0 and 1.
    #[error("entry at index {index} is not a bit")]
    InvalidBit { index: usize },
    /// Lifted entries are bounded by 2k (k combinations of entries at most 2).
    #[error("lifted entry {value} at index {index} exceeds the bound {bound}")]
    EntryTooLarge {
        index: usize,
        value: u64,
        bound: u64,
    },
    /// Combination inputs must agree on length and be non-empty.
    #[error("cannot combine lifts: {context}")]
    CombineShape { context: String },
}

/// A validated message: bits of length `k = 2 (mod 4)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMessage {
    bits: Vec<u8>,
}

impl BitMessage {
    /// Validates length (`k = 2 mod 4`, non-zero) and bit range.
    pub fn new(bits: Vec<u8>) -> Result<Self, DecomposeError> {
        if bits.is_empty() || bits.len() % 4 != 2 {
            return Err(DecomposeError::InvalidLength { len: bits.len() });
        }
        if let Some(index) = bits.iter().position(|&b| b > 1) {
            return Err(DecomposeError::InvalidBit { index });
        }
        Ok(Self { bits })
    }

    /// The all-zero message of length `k`.
    pub fn zero(k: usize) -> Result<Self, DecomposeError> {
        Self::new(vec![0; k])
    }

    /// The all-one message of length `k`.
    pub fn all_ones(k: usize) -> Result<Self, DecomposeError> {
        Self::new(vec![1; k])
    }

    /// A uniformly random message of length `k`.
    pub fn uniform(k: usize, rng: &mut RandomSource) -> Result<Self, DecomposeError> {
        Self::new((0..k).map(|_| rng.gen_range(0..=1u8)).collect())
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

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn is_zero(&self) -> bool {
        self.weight() == 0
    }
}

/// The two halves produced by [`decompose`], plus their overlap size
/// (the number of positions set in both halves).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionPair {
    u: BitMessage,
    v: BitMessage,
    overlap: usize,
}

impl DecompositionPair {
    pub fn u(&self) -> &BitMessage {
        &self.u
    }

    pub fn v(&self) -> &BitMessage {
        &self.v
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    /// Entrywise integer sum `u + v`.
    pub fn lift(&self) -> LiftedMessage {
        lift(self)
    }
}

/// Splits `m` into halves `(u, v)` with `u + v = m (mod 2)` and weights in
/// the admissible band, deterministically.
///
/// Writing `w` for the weight of `m` and `kappa = k/2`:
/// - `w = 0` gives `(0, 0)`; `w = kappa - 1` gives `(m, 0)`;
///   `w` in `{kappa, kappa + 1}` gives `(0, m)` — all with no overlap.
/// - Otherwise the support of `m` is split between the halves (`a` positions
///   to `u`, the rest to `v`, in ascending order) and both halves are padded
///   with the first `o` zero positions of `m`, where for odd `w`:
///   `a = (w-1)/2`, `o = kappa - 1 - a`, and for even `w`: `a = (w-2)/2`,
///   `o = kappa - w/2`. This leaves `u` at weight `kappa - 1` and `v` at
///   weight `kappa` (odd `w`) or `kappa + 1` (even `w`).
pub fn decompose(m: &BitMessage) -> DecompositionPair {
    let k = m.len();
    let kappa = k / 2;
    let w = m.weight();
    let support: Vec<usize> = (0..k).filter(|&i| m.bits[i] == 1).collect();
    let zeros: Vec<usize> = (0..k).filter(|&i| m.bits[i] == 0).collect();

    // (positions of the support going to u, shared zero-padding count)
    let (a, o) = if w == 0 {
        (0, 0)
    } else if w == kappa - 1 {
        (w, 0)
    } else if w == kappa || w == kappa + 1 {
        (0, 0)
    } else if w % 2 == 1 {
        let a = (w - 1) / 2;
        (a, kappa - 1 - a)
    } else {
        ((w - 2) / 2, kappa - w / 2)
    };

    let mut u_bits = vec![0u8; k];
    let mut v_bits = vec![0u8; k];
    for &i in &support[..a] {
        u_bits[i] = 1;
    }
    for &i in &support[a..] {
        v_bits[i] = 1;
    }
    for &i in &zeros[..o] {
        u_bits[i] = 1;
        v_bits[i] = 1;
    }
    DecompositionPair {
        u: BitMessage { bits: u_bits },
        v: BitMessage { bits: v_bits },
        overlap: o,
    }
}

/// A lifted message: non-negative integer entries, length `k = 2 (mod 4)`.
///
/// A single decomposition lifts to entries in `{0, 1, 2}`; combining up to
/// `k` lifts keeps entries at most `2k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedMessage {
    entries: Vec<u64>,
}

impl LiftedMessage {
    /// Validates length and the `2k` entry bound. This is the entry point
    /// for externally supplied lifted messages (e.g. parsed CLI input).
    pub fn from_entries(entries: Vec<u64>) -> Result<Self, DecomposeError> {
        if entries.is_empty() || entries.len() % 4 != 2 {
            return Err(DecomposeError::InvalidLength {
                len: entries.len(),
            });
        }
        let bound = 2 * entries.len() as u64;
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, &v)| v > bound) {
            return Err(DecomposeError::EntryTooLarge {
                index,
                value,
                bound,
            });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entrywise reduction mod 2 — the bit message a single lift encodes.
    pub fn parity(&self) -> BitMessage {
        BitMessage {
            bits: self.entries.iter().map(|&e| (e % 2) as u8).collect(),
        }
    }
}

/// Entrywise integer sum of a decomposition's halves.
pub fn lift(pair: &DecompositionPair) -> LiftedMessage {
    let entries = pair
        .u
        .bits
        .iter()
        .zip(&pair.v.bits)
        .map(|(&a, &b)| u64::from(a) + u64::from(b))
        .collect();
    LiftedMessage { entries }
}

/// Entrywise sum of several lifts (exact, over the integers).
pub fn combine_lifts(lifts: &[LiftedMessage]) -> Result<LiftedMessage, DecomposeError> {
    let first = lifts.first().ok_or_else(|| DecomposeError::CombineShape {
        context: "no lifts supplied".into(),
    })?;
    let k = first.len();
    if let Some(bad) = lifts.iter().find(|l| l.len() != k) {
        return Err(DecomposeError::CombineShape {
            context: format!("length {} does not match {}", bad.len(), k),
        });
    }
    let mut entries = vec![0u64; k];
    for l in lifts {
        for (acc, &e) in entries.iter_mut().zip(&l.entries) {
            *acc += e;
        }
    }
    Ok(LiftedMessage { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn msg(bits: &[u8]) -> BitMessage {
        BitMessage::new(bits.to_vec()).unwrap()
    }

    /// Admissible half: zero, or weight within one of `kappa`.
    fn in_band(m: &BitMessage) -> bool {
        let kappa = m.len() / 2;
        let w = m.weight();
        w == 0 || (w + 1 >= kappa && w <= kappa + 1)
    }

    #[test]
    fn constructor_rejects_bad_lengths_and_bits() {
        assert_eq!(
            BitMessage::new(vec![]),
            Err(DecomposeError::InvalidLength { len: 0 })
        );
        assert_eq!(
            BitMessage::new(vec![0; 4]),
            Err(DecomposeError::InvalidLength { len: 4 })
        );
        assert_eq!(
            BitMessage::new(vec![0, 2, 0, 0, 0, 0]),
            Err(DecomposeError::InvalidBit { index: 1 })
        );
        assert!(BitMessage::new(vec![0; 6]).is_ok());
        assert!(BitMessage::new(vec![1; 10]).is_ok());
    }

    #[test]
    fn zero_message_decomposes_to_zero_halves() {
        let pair = decompose(&BitMessage::zero(6).unwrap());
        assert!(pair.u().is_zero());
        assert!(pair.v().is_zero());
        assert_eq!(pair.overlap(), 0);
    }

    #[test]
    fn band_weights_map_to_pure_halves() {
        // Weight kappa - 1 keeps the message in u; kappa and kappa + 1 in v.
        let m2 = msg(&[1, 1, 0, 0, 0, 0]);
        let p2 = decompose(&m2);
        assert_eq!((p2.u(), p2.v()), (&m2, &BitMessage::zero(6).unwrap()));

        for m in [msg(&[1, 1, 1, 0, 0, 0]), msg(&[1, 1, 1, 1, 0, 0])] {
            let p = decompose(&m);
            assert!(p.u().is_zero());
            assert_eq!(p.v(), &m);
            assert_eq!(p.overlap(), 0);
        }
    }

    #[test]
    fn weight_one_message_needs_overlap_two() {
        // The halves must reach weight kappa - 1 = 2 at least, so both absorb
        // the first two zero positions of the message.
        let pair = decompose(&msg(&[1, 0, 0, 0, 0, 0]));
        assert_eq!(pair.u(), &msg(&[0, 1, 1, 0, 0, 0]));
        assert_eq!(pair.v(), &msg(&[1, 1, 1, 0, 0, 0]));
        assert_eq!(pair.overlap(), 2);
        assert_eq!(pair.lift().entries(), &[1, 2, 2, 0, 0, 0]);
    }

    #[test]
    fn full_weight_message_splits_without_overlap() {
        let pair = decompose(&BitMessage::all_ones(6).unwrap());
        assert_eq!(pair.u(), &msg(&[1, 1, 0, 0, 0, 0]));
        assert_eq!(pair.v(), &msg(&[0, 0, 1, 1, 1, 1]));
        assert_eq!(pair.overlap(), 0);
        assert_eq!(pair.lift().entries(), &[1; 6]);
    }

    /// Brute-force reference: all pairs of admissible halves that sum to `m`
    /// mod 2, and the least overlap among them.
    fn least_possible_overlap(m: &BitMessage) -> usize {
        let k = m.len();
        let mut best = usize::MAX;
        for u_mask in 0u32..(1 << k) {
            for v_mask in 0u32..(1 << k) {
                let u = BitMessage {
                    bits: (0..k).map(|i| ((u_mask >> i) & 1) as u8).collect(),
                };
                let v = BitMessage {
                    bits: (0..k).map(|i| ((v_mask >> i) & 1) as u8).collect(),
                };
                if !in_band(&u) || !in_band(&v) {
                    continue;
                }
                let parity_ok = (0..k)
                    .all(|i| (u.bits[i] + v.bits[i]) % 2 == m.bits()[i]);
                if parity_ok {
                    best = best.min((u_mask & v_mask).count_ones() as usize);
                }
            }
        }
        best
    }

    #[test]
    fn exhaustive_k6_decompositions_are_valid_and_overlap_minimal() {
        let kappa = 3usize;
        for mask in 0u32..64 {
            let m = BitMessage {
                bits: (0..6).map(|i| ((mask >> i) & 1) as u8).collect(),
            };
            let w = m.weight();
            let pair = decompose(&m);
            let lifted = pair.lift();

            assert!(in_band(pair.u()), "u out of band for {m:?}");
            assert!(in_band(pair.v()), "v out of band for {m:?}");
            assert_eq!(lifted.parity(), m, "parity broken for {m:?}");
            // Overlap positions are exactly the entries equal to 2.
            assert_eq!(
                lifted.entries().iter().filter(|&&e| e == 2).count(),
                pair.overlap()
            );
            // Sum of squared lift entries is w + 4o.
            let sq: u64 = lifted.entries().iter().map(|&e| e * e).sum();
            assert_eq!(sq as usize, w + 4 * pair.overlap());
            // The construction attains the least overlap any admissible
            // pair can achieve.
            assert_eq!(pair.overlap(), least_possible_overlap(&m), "m={m:?}");
            // At k = 6 only weight-1 messages are forced to overlap.
            if w == 1 {
                assert_eq!(pair.overlap(), kappa - 1);
            } else {
                assert_eq!(pair.overlap(), 0);
            }
        }
    }

    #[test]
    fn k10_weight_classes_follow_the_padding_formula() {
        let k = 10usize;
        let kappa = 5usize;
        for mask in 0u32..(1 << k) {
            let m = BitMessage {
                bits: (0..k).map(|i| ((mask >> i) & 1) as u8).collect(),
            };
            let w = m.weight();
            let pair = decompose(&m);
            assert!(in_band(pair.u()));
            assert!(in_band(pair.v()));
            assert_eq!(pair.lift().parity(), m);
            let expected_overlap = match w {
                0 => 0,
                _ if w == kappa - 1 || w == kappa || w == kappa + 1 => 0,
                _ if w % 2 == 1 => kappa - 1 - (w - 1) / 2,
                _ => kappa - w / 2,
            };
            assert_eq!(pair.overlap(), expected_overlap, "w={w}");
        }
    }

    #[test]
    fn lift_equals_message_exactly_iff_no_overlap() {
        for mask in 0u32..64 {
            let m = BitMessage {
                bits: (0..6).map(|i| ((mask >> i) & 1) as u8).collect(),
            };
            let pair = decompose(&m);
            let exact = pair
                .lift()
                .entries()
                .iter()
                .zip(m.bits())
                .all(|(&e, &b)| e == u64::from(b));
            assert_eq!(exact, pair.overlap() == 0, "m={m:?}");
        }
    }

    #[test]
    fn combine_lifts_adds_entrywise() {
        let a = LiftedMessage::from_entries(vec![1, 0, 2, 2, 0, 0]).unwrap();
        let b = LiftedMessage::from_entries(vec![0, 1, 0, 0, 1, 0]).unwrap();
        let sum = combine_lifts(&[a, b]).unwrap();
        assert_eq!(sum.entries(), &[1, 1, 2, 2, 1, 0]);
    }

    #[test]
    fn combine_lifts_rejects_shape_mismatches() {
        assert!(matches!(
            combine_lifts(&[]),
            Err(DecomposeError::CombineShape { .. })
        ));
        let a = LiftedMessage::from_entries(vec![1, 0, 0, 0, 0, 0]).unwrap();
        let b = LiftedMessage::from_entries(vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 1]).unwrap();
        assert!(matches!(
            combine_lifts(&[a, b]),
            Err(DecomposeError::CombineShape { .. })
        ));
    }

    #[test]
    fn lifted_constructor_enforces_entry_bound() {
        assert!(matches!(
            LiftedMessage::from_entries(vec![13, 0, 0, 0, 0, 0]),
            Err(DecomposeError::EntryTooLarge { index: 0, value: 13, bound: 12 })
        ));
        assert!(LiftedMessage::from_entries(vec![12, 0, 0, 0, 0, 0]).is_ok());
        assert!(matches!(
            LiftedMessage::from_entries(vec![1, 1, 1, 1]),
            Err(DecomposeError::InvalidLength { len: 4 })
        ));
    }
}
