//! Canonical binary serialization for parameters, keys, signatures, tags.
//!
//! Layout: magic bytes `LHRS`, a 2-byte little-endian format version, an
//! object kind byte (1 = params, 2 = public key, 3 = secret key,
//! 4 = signature, 5 = tag), then the payload. Counts are 4-byte
//! little-endian unsigned; every integer (including matrix entries) is a
//! length-prefixed little-endian two's-complement byte string; matrices are
//! row-major, bases column-major; the width `V` is its IEEE-754 bit pattern,
//! little-endian. Equal objects serialize to equal bytes, and every reader
//! revalidates the object's invariants on the way in.

use crate::linalg::{IntBasis, IntVector, LinalgError, ModMatrix};
use crate::scheme::{KeyPair, Profile, SchemeError, SchemeParams, SecretKey, Signature, Tag};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

const MAGIC: [u8; 4] = *b"LHRS";
const VERSION: u16 = 1;

/// Object kind bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    Params = 1,
    PublicKey = 2,
    SecretKey = 3,
    Signature = 4,
    Tag = 5,
}

impl Kind {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(Kind::Params),
            2 => Some(Kind::PublicKey),
            3 => Some(Kind::SecretKey),
            4 => Some(Kind::Signature),
            5 => Some(Kind::Tag),
            _ => None,
        }
    }
}

/// Errors raised while decoding canonical bytes.
#[derive(Debug, Error)]
pub enum SerialError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported format version {got}")]
    UnsupportedVersion { got: u16 },
    #[error("wrong object kind: expected {expected:?}, got {got}")]
    WrongKind { expected: Kind, got: u8 },
    #[error("truncated input while reading {context}")]
    Truncated { context: &'static str },
    #[error("malformed payload: {context}")]
    Malformed { context: String },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new(kind: Kind) -> Self {
        let mut buf = Vec::with_capacity(64);
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.push(kind as u8);
        Self { buf }
    }

    fn put_count(&mut self, n: usize) {
        let n = u32::try_from(n).expect("count exceeds format range");
        self.buf.extend_from_slice(&n.to_le_bytes());
    }

    fn put_int(&mut self, value: &BigInt) {
        let bytes = value.to_signed_bytes_le();
        self.put_count(bytes.len());
        self.buf.extend_from_slice(&bytes);
    }

    fn put_u64(&mut self, value: u64) {
        self.put_int(&BigInt::from(value));
    }

    fn put_f64(&mut self, value: f64) {
        self.buf.extend_from_slice(&value.to_le_bytes());
    }

    fn finish(self) -> Vec<u8> {
        self.buf
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8], expected: Kind) -> Result<Self, SerialError> {
        let mut r = Self { data, pos: 0 };
        if r.take(4, "magic")? != MAGIC {
            return Err(SerialError::BadMagic);
        }
        let version = u16::from_le_bytes(r.take(2, "version")?.try_into().unwrap());
        if version != VERSION {
            return Err(SerialError::UnsupportedVersion { got: version });
        }
        let kind = r.take(1, "kind")?[0];
        if Kind::from_byte(kind) != Some(expected) {
            return Err(SerialError::WrongKind { expected, got: kind });
        }
        Ok(r)
    }

    fn take(&mut self, n: usize, context: &'static str) -> Result<&'a [u8], SerialError> {
        if self.data.len() - self.pos < n {
            return Err(SerialError::Truncated { context });
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn get_count(&mut self, context: &'static str) -> Result<usize, SerialError> {
        let bytes = self.take(4, context)?;
        Ok(u32::from_le_bytes(bytes.try_into().unwrap()) as usize)
    }

    fn get_int(&mut self, context: &'static str) -> Result<BigInt, SerialError> {
        let len = self.get_count(context)?;
        if len == 0 {
            return Err(SerialError::Malformed {
                context: format!("zero-length integer in {context}"),
            });
        }
        Ok(BigInt::from_signed_bytes_le(self.take(len, context)?))
    }

    fn get_u64(&mut self, context: &'static str) -> Result<u64, SerialError> {
        self.get_int(context)?
            .to_u64()
            .ok_or_else(|| SerialError::Malformed {
                context: format!("integer out of u64 range in {context}"),
            })
    }

    fn get_f64(&mut self, context: &'static str) -> Result<f64, SerialError> {
        Ok(f64::from_le_bytes(self.take(8, context)?.try_into().unwrap()))
    }

    fn finish(self) -> Result<(), SerialError> {
        if self.pos != self.data.len() {
            return Err(SerialError::Malformed {
                context: format!("{} trailing bytes", self.data.len() - self.pos),
            });
        }
        Ok(())
    }
}

fn put_matrix(w: &mut Writer, m: &ModMatrix) {
    w.put_count(m.rows());
    w.put_count(m.cols());
    w.put_u64(m.modulus());
    for &e in m.entries() {
        w.put_u64(e);
    }
}

fn get_matrix(r: &mut Reader) -> Result<ModMatrix, SerialError> {
    let rows = r.get_count("matrix rows")?;
    let cols = r.get_count("matrix cols")?;
    let q = r.get_u64("matrix modulus")?;
    let mut entries = Vec::with_capacity(rows * cols);
    for _ in 0..rows.saturating_mul(cols) {
        entries.push(r.get_u64("matrix entry")?);
    }
    Ok(ModMatrix::new(rows, cols, q, entries)?)
}

fn put_vector(w: &mut Writer, v: &IntVector) {
    w.put_count(v.len());
    for e in v.entries() {
        w.put_int(e);
    }
}

fn get_vector(r: &mut Reader) -> Result<IntVector, SerialError> {
    let len = r.get_count("vector length")?;
    let mut entries = Vec::with_capacity(len);
    for _ in 0..len {
        entries.push(r.get_int("vector entry")?);
    }
    Ok(IntVector::new(entries))
}

/// Serializes public parameters (kind 1).
pub fn params_to_bytes(params: &SchemeParams) -> Vec<u8> {
    let mut w = Writer::new(Kind::Params);
    w.buf.push(match params.profile() {
        Profile::Toy => 0,
        Profile::Paper => 1,
    });
    w.put_count(params.n());
    w.put_count(params.k());
    w.put_u64(params.q());
    w.put_count(params.h());
    w.put_f64(params.v());
    for alpha in params.alphas() {
        for &e in alpha {
            w.put_u64(e);
        }
    }
    w.finish()
}

/// Parses and revalidates public parameters.
pub fn params_from_bytes(data: &[u8]) -> Result<SchemeParams, SerialError> {
    let mut r = Reader::new(data, Kind::Params)?;
    let profile = match r.take(1, "profile")?[0] {
        0 => Profile::Toy,
        1 => Profile::Paper,
        other => {
            return Err(SerialError::Malformed {
                context: format!("unknown profile byte {other}"),
            })
        }
    };
    let n = r.get_count("n")?;
    let k = r.get_count("k")?;
    let q = r.get_u64("q")?;
    let h = r.get_count("h")?;
    let v = r.get_f64("V")?;
    let mut alphas = Vec::with_capacity(k);
    for _ in 0..k {
        let mut alpha = Vec::with_capacity(h);
        for _ in 0..h {
            alpha.push(r.get_u64("alpha entry")?);
        }
        alphas.push(alpha);
    }
    r.finish()?;
    Ok(SchemeParams::from_raw_parts(n, k, q, h, v, alphas, profile)?)
}

/// Serializes a public key (kind 2): user id plus the public matrix.
pub fn public_key_to_bytes(user_id: u64, matrix: &ModMatrix) -> Vec<u8> {
    let mut w = Writer::new(Kind::PublicKey);
    w.put_u64(user_id);
    put_matrix(&mut w, matrix);
    w.finish()
}

/// Parses a public key.
pub fn public_key_from_bytes(data: &[u8]) -> Result<(u64, ModMatrix), SerialError> {
    let mut r = Reader::new(data, Kind::PublicKey)?;
    let user_id = r.get_u64("user id")?;
    let matrix = get_matrix(&mut r)?;
    r.finish()?;
    Ok((user_id, matrix))
}

/// Serializes a full key pair (kind 3): user id, public matrix, and the
/// secret basis column-major.
pub fn key_pair_to_bytes(key: &KeyPair) -> Vec<u8> {
    let mut w = Writer::new(Kind::SecretKey);
    w.put_u64(key.user_id());
    put_matrix(&mut w, key.public());
    let basis = key.secret().basis();
    w.put_count(basis.dim());
    w.put_count(basis.len());
    for column in basis.columns() {
        for e in column.entries() {
            w.put_int(e);
        }
    }
    w.finish()
}

/// Parses a key pair, re-running the Gram–Schmidt validation on the basis.
pub fn key_pair_from_bytes(data: &[u8]) -> Result<KeyPair, SerialError> {
    let mut r = Reader::new(data, Kind::SecretKey)?;
    let user_id = r.get_u64("user id")?;
    let public = get_matrix(&mut r)?;
    let dim = r.get_count("basis dimension")?;
    let ncols = r.get_count("basis column count")?;
    let mut columns = Vec::with_capacity(ncols);
    for _ in 0..ncols {
        let mut entries = Vec::with_capacity(dim);
        for _ in 0..dim {
            entries.push(r.get_int("basis entry")?);
        }
        columns.push(IntVector::new(entries));
    }
    r.finish()?;
    let basis = IntBasis::new(columns)?;
    Ok(KeyPair::from_parts(
        user_id,
        public,
        SecretKey::from_basis(basis),
    )?)
}

/// Serializes a signature (kind 4): the vector `e` then the labels.
pub fn signature_to_bytes(sig: &Signature) -> Vec<u8> {
    let mut w = Writer::new(Kind::Signature);
    put_vector(&mut w, sig.e());
    w.put_count(sig.labels().len());
    for &l in sig.labels() {
        w.put_count(l as usize);
    }
    w.finish()
}

/// Parses a signature (label/ring consistency is checked at verify time).
pub fn signature_from_bytes(data: &[u8]) -> Result<Signature, SerialError> {
    let mut r = Reader::new(data, Kind::Signature)?;
    let e = get_vector(&mut r)?;
    let count = r.get_count("label count")?;
    let mut labels = Vec::with_capacity(count);
    for _ in 0..count {
        let l = r.get_count("label")?;
        labels.push(u32::try_from(l).map_err(|_| SerialError::Malformed {
            context: format!("label {l} out of range"),
        })?);
    }
    r.finish()?;
    Ok(Signature::from_parts(e, labels))
}

/// Serializes a tag (kind 5).
pub fn tag_to_bytes(tag: &Tag) -> Vec<u8> {
    let mut w = Writer::new(Kind::Tag);
    w.put_count(tag.len());
    w.buf.extend_from_slice(tag.bits());
    w.finish()
}

/// Parses a tag.
pub fn tag_from_bytes(data: &[u8]) -> Result<Tag, SerialError> {
    let mut r = Reader::new(data, Kind::Tag)?;
    let len = r.get_count("tag length")?;
    let bits = r.take(len, "tag bits")?.to_vec();
    r.finish()?;
    Ok(Tag::new(bits)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::BitMessage;
    use crate::rng::RandomSource;
    use crate::scheme::{keygen, setup, sign, Ring};
    use proptest::prelude::*;

    fn toy_params() -> SchemeParams {
        let mut rng = RandomSource::from_seed([31u8; 32]);
        setup(96, 6, Profile::Toy, &mut rng).unwrap()
    }

    #[test]
    fn params_round_trip_and_determinism() {
        let params = toy_params();
        let bytes = params_to_bytes(&params);
        assert_eq!(bytes, params_to_bytes(&params));
        assert_eq!(&bytes[..4], b"LHRS");
        assert_eq!(bytes[6], Kind::Params as u8);
        let back = params_from_bytes(&bytes).unwrap();
        assert_eq!(back, params);
    }

    #[test]
    fn key_pair_round_trip() {
        let params = toy_params();
        let mut rng = RandomSource::from_seed([32u8; 32]);
        let key = keygen(&params, 7, &mut rng).unwrap();
        let bytes = key_pair_to_bytes(&key);
        let back = key_pair_from_bytes(&bytes).unwrap();
        assert_eq!(back.user_id(), 7);
        assert_eq!(back.public(), key.public());
        assert_eq!(back.secret().basis(), key.secret().basis());

        let pk_bytes = public_key_to_bytes(key.user_id(), key.public());
        let (id, matrix) = public_key_from_bytes(&pk_bytes).unwrap();
        assert_eq!(id, 7);
        assert_eq!(&matrix, key.public());
    }

    #[test]
    fn signature_round_trip_preserves_negative_entries() {
        let params = toy_params();
        let mut rng = RandomSource::from_seed([33u8; 32]);
        let key = keygen(&params, 0, &mut rng).unwrap();
        let ring = Ring::new(vec![key.public().clone()]).unwrap();
        let tag = Tag::random(6, &mut rng);
        let m = BitMessage::new(vec![1, 0, 1, 1, 0, 1]).unwrap();
        let sig = sign(&params, &key, &ring, &tag, &m, &mut rng).unwrap();
        assert!(
            sig.e().entries().iter().any(|e| e.sign() == num_bigint::Sign::Minus),
            "fixture should exercise negative entries"
        );
        let back = signature_from_bytes(&signature_to_bytes(&sig)).unwrap();
        assert_eq!(&back, &sig);
    }

    #[test]
    fn tag_round_trip() {
        let tag = Tag::new(vec![1, 0, 0, 1, 1, 0]).unwrap();
        let back = tag_from_bytes(&tag_to_bytes(&tag)).unwrap();
        assert_eq!(back, tag);
    }

    #[test]
    fn corrupt_headers_are_rejected() {
        let params = toy_params();
        let good = params_to_bytes(&params);

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(matches!(
            params_from_bytes(&bad_magic),
            Err(SerialError::BadMagic)
        ));

        let mut bad_version = good.clone();
        bad_version[4] = 9;
        assert!(matches!(
            params_from_bytes(&bad_version),
            Err(SerialError::UnsupportedVersion { got: 9 })
        ));

        // A tag is not a params object.
        let tag_bytes = tag_to_bytes(&Tag::new(vec![0, 1]).unwrap());
        assert!(matches!(
            params_from_bytes(&tag_bytes),
            Err(SerialError::WrongKind { .. })
        ));
    }

    #[test]
    fn truncation_and_trailing_bytes_are_rejected() {
        let params = toy_params();
        let good = params_to_bytes(&params);
        for cut in [5, 8, 20, good.len() - 1] {
            assert!(
                matches!(
                    params_from_bytes(&good[..cut]),
                    Err(SerialError::Truncated { .. })
                ),
                "cut at {cut}"
            );
        }
        let mut padded = good.clone();
        padded.push(0);
        assert!(matches!(
            params_from_bytes(&padded),
            Err(SerialError::Malformed { .. })
        ));
    }

    #[test]
    fn loaded_params_are_revalidated() {
        // Binary-patch q from 16411 to the composite 16409 = 61·269; the
        // reader must refuse the parameters. Offset: header (7 bytes),
        // profile (1), n and k counts (4 each), q length prefix (4) puts the
        // low byte of q at 20.
        let params = toy_params();
        let mut bytes = params_to_bytes(&params);
        assert_eq!(&bytes[20..22], &[0x1B, 0x40], "layout drifted");
        bytes[20] = 0x19;
        assert!(matches!(
            params_from_bytes(&bytes),
            Err(SerialError::Scheme(SchemeError::InvalidParams { .. }))
        ));
    }

    proptest! {
        #[test]
        fn arbitrary_signature_vectors_round_trip(
            entries in proptest::collection::vec(-1_000_000i64..1_000_000, 1..64),
            labels in proptest::collection::vec(1u32..16, 1..8),
        ) {
            let sig = Signature::from_parts(IntVector::from_i64s(&entries), labels);
            let back = signature_from_bytes(&signature_to_bytes(&sig)).unwrap();
            prop_assert_eq!(back, sig);
        }

        #[test]
        fn arbitrary_tags_round_trip(bits in proptest::collection::vec(0u8..2, 0..32)) {
            let tag = Tag::new(bits).unwrap();
            let back = tag_from_bytes(&tag_to_bytes(&tag)).unwrap();
            prop_assert_eq!(back, tag);
        }
    }
}
