//! Turning a shared real into key material.
//!
//! Both sides render their shared value to `N_agree` fractional digits and
//! hash the string. Two values that agree on `N_agree` digits can still round
//! differently at the last digit, so the parties first exchange confirmation
//! tags at `N_agree` and at `N_agree - FALLBACK_DIGITS`; the first level on
//! which all tags match is used, otherwise the exchange fails.

use sha2::{Digest, Sha256};

use super::{ProtocolError, Result};
use crate::bigreal::{render_fixed, Real};

/// Digits dropped for the single retry after a confirmation mismatch.
pub const FALLBACK_DIGITS: u32 = 5;

const CONFIRM_DOMAIN: &[u8] = b"chebkex-confirm\x1f";

#[derive(Clone, Debug, PartialEq)]
pub struct SessionKey {
    pub raw: Real,
    pub digits_used: u32,
    pub key_bytes: [u8; 32],
}

impl SessionKey {
    /// SHA-256 of the fixed rendering of `raw` at `digits` fractional digits.
    pub fn derive(raw: &Real, digits: u32) -> SessionKey {
        let rendering = render_fixed(raw, digits);
        SessionKey {
            raw: raw.clone(),
            digits_used: digits,
            key_bytes: Sha256::digest(rendering.as_bytes()).into(),
        }
    }

    pub fn hex(&self) -> String {
        hex::encode(self.key_bytes)
    }
}

fn fallback_level(agree_digits: u32) -> u32 {
    agree_digits.saturating_sub(FALLBACK_DIGITS).max(1)
}

fn tag(raw: &Real, digits: u32) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(CONFIRM_DOMAIN);
    h.update(render_fixed(raw, digits).as_bytes());
    h.finalize().into()
}

/// Key-confirmation tags; they reveal nothing usable as the key itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Confirmation {
    pub primary: [u8; 32],
    pub fallback: [u8; 32],
}

impl Confirmation {
    pub fn of(raw: &Real, agree_digits: u32) -> Confirmation {
        Confirmation {
            primary: tag(raw, agree_digits),
            fallback: tag(raw, fallback_level(agree_digits)),
        }
    }

    pub fn to_hex(&self) -> [String; 2] {
        [hex::encode(self.primary), hex::encode(self.fallback)]
    }

    pub fn from_hex(primary: &str, fallback: &str) -> Option<Confirmation> {
        let decode = |s: &str| -> Option<[u8; 32]> { hex::decode(s).ok()?.try_into().ok() };
        Some(Confirmation {
            primary: decode(primary)?,
            fallback: decode(fallback)?,
        })
    }
}

/// Key for `raw` given the peer's tags.
pub fn settle(raw: &Real, agree_digits: u32, peer: &Confirmation) -> Result<SessionKey> {
    settle_all(raw, agree_digits, std::slice::from_ref(peer))
}

/// Key for `raw` when every peer's tags must match ours.
pub fn settle_all(raw: &Real, agree_digits: u32, peers: &[Confirmation]) -> Result<SessionKey> {
    let own = Confirmation::of(raw, agree_digits);
    if peers.iter().all(|p| p.primary == own.primary) {
        // equal renderings at N_agree imply equal ones at the fallback level
        // except on a rounding tie; a differing fallback tag means tampering
        if peers.iter().all(|p| p.fallback == own.fallback) {
            return Ok(SessionKey::derive(raw, agree_digits));
        }
        return Err(ProtocolError::KeyMismatch {
            required: agree_digits,
        });
    }
    if peers.iter().all(|p| p.fallback == own.fallback) {
        return Ok(SessionKey::derive(raw, fallback_level(agree_digits)));
    }
    Err(ProtocolError::KeyMismatch {
        required: agree_digits,
    })
}
