//! Linearly homomorphic ring signatures over integer lattices.
//!
//! This crate implements a ring signature scheme whose signatures can be
//! added: given signatures on messages `m_1, …, m_p` under the same ring and
//! tag, anyone can combine them into a signature on `Σ c_j m_j` for 0/1
//! coefficients — without any secret key. Signing hides the signer inside
//! the ring; messages are short bit strings decomposed into a balanced pair
//! of halves before preimage sampling keeps signatures short.
//!
//! The crate is organized bottom-up:
//!
//! - [`rng`], [`linalg`], [`stats`]: deterministic randomness, exact
//!   integer/modular linear algebra, and the statistical tests the
//!   experiment harnesses rely on.
//! - [`gaussian`]: discrete Gaussian sampling over the integers and over
//!   lattice cosets (the randomized nearest-plane walk).
//! - [`trapdoor`]: gadget-based trapdoor generation — a public matrix
//!   statistically close to uniform together with a short basis of its
//!   kernel lattice.
//! - [`ext_preimage`]: preimage sampling for a concatenation of public
//!   matrices when only one block's trapdoor is known.
//! - [`decompose`]: the message decomposition `m ↦ (u, v)` and the lifted
//!   integer messages that make combined signatures verifiable.
//! - [`scheme`]: parameter setup, key generation, signing, combining, and
//!   verification.
//! - [`serial`]: a canonical, versioned binary encoding for every artifact.
//! - [`games`]: executable security experiments — the anonymity game, the
//!   forgery classifier, and the SIS embedding/extraction machinery.
//!
//! # Example
//!
//! ```
//! use lhrs::decompose::BitMessage;
//! use lhrs::rng::RandomSource;
//! use lhrs::scheme::{
//!     combine, keygen, setup, sign, verify, Profile, Ring, Tag,
//!     VerifyMessage, VerifyMode,
//! };
//!
//! let mut rng = RandomSource::from_seed([7u8; 32]);
//! let params = setup(96, 6, Profile::Toy, &mut rng)?;
//!
//! // Two users; user 0 signs inside the two-member ring.
//! let alice = keygen(&params, 0, &mut rng)?;
//! let bob = keygen(&params, 1, &mut rng)?;
//! let ring = Ring::new(vec![alice.public().clone(), bob.public().clone()])?;
//! let tag = Tag::random(params.k(), &mut rng);
//!
//! let m1 = BitMessage::new(vec![1, 0, 1, 0, 0, 0])?;
//! let m2 = BitMessage::new(vec![0, 1, 1, 0, 0, 0])?;
//! let s1 = sign(&params, &alice, &ring, &tag, &m1, &mut rng)?;
//! let s2 = sign(&params, &alice, &ring, &tag, &m2, &mut rng)?;
//!
//! let v1 = verify(&params, &ring, &tag, &VerifyMessage::Bits(m1.clone()),
//!                 &s1, VerifyMode::Canonical)?;
//! assert!(v1.is_accept());
//!
//! // Anyone can add the two signatures; the sum verifies against the
//! // summed (lifted) message.
//! let sum = combine(&params, &ring, &tag, &[(1, &s1), (1, &s2)])?;
//! let lifted = lhrs::decompose::combine_lifts(&[
//!     lhrs::decompose::decompose(&m1).lift(),
//!     lhrs::decompose::decompose(&m2).lift(),
//! ])?;
//! let v = verify(&params, &ring, &tag, &VerifyMessage::Lifted(lifted),
//!                &sum, VerifyMode::Canonical)?;
//! assert!(v.is_accept());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod decompose;
pub mod ext_preimage;
pub mod games;
pub mod gaussian;
pub mod linalg;
pub mod rng;
pub mod scheme;
pub mod serial;
pub mod stats;
pub mod trapdoor;

pub use decompose::{BitMessage, DecompositionPair, LiftedMessage};
pub use gaussian::GaussWidth;
pub use linalg::{IntBasis, IntVector, ModMatrix};
pub use rng::RandomSource;
pub use scheme::{
    KeyPair, Profile, Ring, SchemeError, SchemeParams, Signature, Tag, Verdict,
    VerifyMessage, VerifyMode,
};
