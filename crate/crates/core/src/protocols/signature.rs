//! Interactive signature: the verifier proves the signer holds a document by
//! sending only its digest and a fresh `R = T_r(x)`. The signer answers
//! `C = H(T_s(R) ‖ 0x1F ‖ doc)`, which the verifier recomputes with `T_r(y)`.

use std::collections::HashMap;

use rand::RngCore;
use sha2::{Digest, Sha256};

use super::{apply, Channel, ProtocolError, PublicParams, Result, SecretKey};
use crate::bigreal::{render_fixed, Real};

/// Byte between the rendered value and the document in the signed string.
pub const SIG_SEPARATOR: u8 = 0x1f;

/// Fresh-`r` attempts before giving up with `VerifyFailed`.
const SIG_ATTEMPTS: usize = 2;

pub type Digest32 = [u8; 32];

/// Documents indexed by SHA-256.
#[derive(Clone, Debug, Default)]
pub struct DocumentStore {
    docs: HashMap<Digest32, Vec<u8>>,
}

impl DocumentStore {
    pub fn new() -> DocumentStore {
        DocumentStore::default()
    }

    pub fn insert(&mut self, doc: impl Into<Vec<u8>>) -> Digest32 {
        let doc = doc.into();
        let digest = Sha256::digest(&doc).into();
        self.docs.insert(digest, doc);
        digest
    }

    pub fn get(&self, digest: &Digest32) -> Option<&[u8]> {
        self.docs.get(digest).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigRequest {
    pub digest: Digest32,
    pub r_value: Real,
}

fn signed_digest(value: &Real, agree_digits: u32, doc: &[u8]) -> Digest32 {
    let mut h = Sha256::new();
    h.update(render_fixed(value, agree_digits).as_bytes());
    h.update([SIG_SEPARATOR]);
    h.update(doc);
    h.finalize().into()
}

/// Request for `doc` against the signer's parameters; the returned index is
/// kept by the verifier.
pub fn sig_request(
    doc: &[u8],
    params: &PublicParams,
    rng: &mut dyn RngCore,
) -> Result<(SigRequest, SecretKey)> {
    let r = SecretKey::random(params.precision.max_index_digits, rng);
    let req = SigRequest {
        digest: Sha256::digest(doc).into(),
        r_value: apply(&params.x, r.index())?,
    };
    Ok((req, r))
}

pub fn sig_respond(
    store: &DocumentStore,
    req: &SigRequest,
    secret: &SecretKey,
    params: &PublicParams,
) -> Result<Digest32> {
    let doc = store
        .get(&req.digest)
        .ok_or(ProtocolError::NotInPossession)?;
    let shared = apply(&req.r_value, secret.index())?;
    Ok(signed_digest(&shared, params.agree_digits(), doc))
}

pub fn sig_verify(c: &Digest32, doc: &[u8], r: &SecretKey, params: &PublicParams) -> Result<bool> {
    let shared = apply(&params.y, r.index())?;
    Ok(signed_digest(&shared, params.agree_digits(), doc) == *c)
}

/// Full exchange: on a mismatch the verifier retries once with a fresh `r`
/// before reporting `VerifyFailed`.
pub fn run_signature(
    doc: &[u8],
    params: &PublicParams,
    signer: &SecretKey,
    store: &DocumentStore,
    rng: &mut dyn RngCore,
    channel: &mut Channel,
) -> Result<Digest32> {
    let d = params.digits();
    for _ in 0..SIG_ATTEMPTS {
        let (req, r) = sig_request(doc, params, rng)?;
        let sent = channel.send(
            "sig.request",
            "verifier",
            vec![hex::encode(req.digest), render_fixed(&req.r_value, d)],
        );
        let req = parse_request(&sent, d)?;
        let c = sig_respond(store, &req, signer, params)?;
        let got = channel.send_hex("sig.response", "signer", &[&c])?;
        let c: Digest32 = got
            .into_iter()
            .next()
            .and_then(|v| v.try_into().ok())
            .ok_or_else(|| malformed("sig.response", "expected one 32-byte digest"))?;
        if sig_verify(&c, doc, &r, params)? {
            return Ok(c);
        }
    }
    Err(ProtocolError::VerifyFailed)
}

fn malformed(step: &str, reason: &str) -> ProtocolError {
    ProtocolError::Malformed {
        step: step.into(),
        reason: reason.into(),
    }
}

fn parse_request(values: &[String], digits: u32) -> Result<SigRequest> {
    let [digest, r] = values else {
        return Err(malformed("sig.request", "expected digest and R"));
    };
    let digest = hex::decode(digest)
        .ok()
        .and_then(|v| v.try_into().ok())
        .ok_or_else(|| malformed("sig.request", "bad digest"))?;
    Ok(SigRequest {
        digest,
        r_value: super::transcript::parse_real("sig.request", r, digits)?,
    })
}
