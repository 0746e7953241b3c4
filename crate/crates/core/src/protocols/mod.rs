//! Protocol flows over the reals: two-party and three-party key agreement,
//! proof of knowledge of a secret index, mutual authentication, multiplicative
//! El Gamal, interactive signatures and group secrets.
//!
//! Every flow is a deterministic function of its RNG seeds. In-process
//! runners pass each message through a [`Channel`] as rendered decimal
//! strings, so transcripts can be recorded, replayed and tampered with.

mod auth;
mod behalf;
mod conference;
mod dh;
mod elgamal;
mod group;
mod session;
mod signature;
mod transcript;

pub use auth::{
    elgamal_challenge_response, mutual_auth_product, pok_challenge, pok_respond, pok_verify,
    run_pok, AuthParty, NONCE_BITS,
};
pub use behalf::{
    behalf_from_secrets, behalf_issue, behalf_secret, fingerprint, group_fingerprint, BehalfGroup,
    BehalfPeer, Fingerprint, GroupFingerprint,
};
pub use conference::{run_conference, ConferenceParty, CONFERENCE_SIZE};
pub use dh::{dh_confirm, dh_exchange, dh_public, dh_raw, dh_shared, negotiate_dh, DhOutcome};
pub use elgamal::{
    elgamal_decrypt, elgamal_encrypt, elgamal_encrypt_with, message_digit_limit, Ciphertext,
    DECRYPT_TOLERANCE, MASK_FLOOR_EXP,
};
pub use group::{
    group_apply_chain, group_issue, partial_group_issue, partial_group_secret, PartialGroup,
};
pub use session::{settle, settle_all, Confirmation, SessionKey, FALLBACK_DIGITS};
pub use signature::{
    run_signature, sig_request, sig_respond, sig_verify, DocumentStore, SigRequest, SIG_SEPARATOR,
};
pub use transcript::{flip_digit, Channel, Transcript, TranscriptLine};

use rand::RngCore;
use thiserror::Error;

use crate::bigreal::{Real, RealError};
use crate::chebyshev::{self, ChebError, Degree, Engine};
use crate::modfield::FieldError;
use crate::sampling;

/// Engine used by the protocol flows unless a caller picks another.
pub const DEFAULT_ENGINE: Engine = Engine::Matrix;

/// Public arguments are drawn from `[-X_BOUND, X_BOUND]`, in hundredths.
pub const X_BOUND_HUNDREDTHS: u32 = 99;

/// Safety margin added by [`precision_plan`].
pub const PLAN_MARGIN: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("confirmation tags differ at {required} digits and at the fallback level")]
    KeyMismatch { required: u32 },
    #[error("El Gamal mask |T_r(y)| stayed below 1e-{MASK_FLOOR_EXP} after {0} draws")]
    MaskTooSmall(u32),
    #[error("decrypted value is {0} away from the nearest integer")]
    DecryptOutOfTolerance(String),
    #[error("message has {digits} digits; at most {limit} fit the agreed precision")]
    MessageTooLarge { digits: u32, limit: u32 },
    #[error("responder holds no document with the requested digest")]
    NotInPossession,
    #[error("signature check failed")]
    VerifyFailed,
    #[error("peer failed to prove knowledge of its secret index")]
    AuthFailed,
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("malformed protocol message at step {step}: {reason}")]
    Malformed { step: String, reason: String },
    #[error(transparent)]
    Cheb(#[from] ChebError),
    #[error(transparent)]
    Real(#[from] RealError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, ProtocolError>;

/// Numeric working parameters fixed for a session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Precision {
    /// Decimal digits `D` of every real in the session.
    pub digits: u32,
    /// Leading digits `N_agree` both sides must share.
    pub agree_digits: u32,
    /// Upper bound on the decimal size of a peer's random index.
    pub max_index_digits: u32,
}

impl Precision {
    pub fn new(digits: u32, agree_digits: u32, max_index_digits: u32) -> Result<Precision> {
        let p = Precision {
            digits,
            agree_digits,
            max_index_digits,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.digits < crate::bigreal::MIN_DIGITS {
            return Err(RealError::PrecisionTooLow(self.digits).into());
        }
        if self.agree_digits == 0 || self.agree_digits >= self.digits {
            return Err(ProtocolError::BadParams(format!(
                "agreement of {} digits must lie in 1..{}",
                self.agree_digits, self.digits
            )));
        }
        if self.max_index_digits == 0 {
            return Err(ProtocolError::BadParams(
                "index size must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `D = N + n * G + margin`: digits needed so that `n` parties holding
/// `G`-digit indices still share `N` digits.
pub fn precision_plan(agree_digits: u32, n_parties: u32, index_digits: u32) -> u32 {
    agree_digits + n_parties * index_digits + PLAN_MARGIN
}

/// A party's secret index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey {
    s: Degree,
}

impl SecretKey {
    pub fn new(s: Degree) -> Result<SecretKey> {
        if s.is_zero() {
            return Err(ProtocolError::BadParams(
                "secret index must be positive".into(),
            ));
        }
        Ok(SecretKey { s })
    }

    pub fn random(index_digits: u32, rng: &mut dyn RngCore) -> SecretKey {
        SecretKey {
            s: Degree::random_with_digits(index_digits, rng),
        }
    }

    pub fn index(&self) -> &Degree {
        &self.s
    }

    /// Decimal digit count `G` of the index.
    pub fn index_digits(&self) -> u32 {
        self.s.decimal_digits()
    }
}

/// Published pair `(x, y = T_s(x))` together with the working precision.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicParams {
    pub x: Real,
    pub y: Real,
    pub precision: Precision,
}

impl PublicParams {
    pub fn digits(&self) -> u32 {
        self.precision.digits
    }

    pub fn agree_digits(&self) -> u32 {
        self.precision.agree_digits
    }
}

/// Samples `x` uniformly from `[-0.99, 0.99]` on the `10^-D` grid.
pub fn sample_x(digits: u32, rng: &mut dyn RngCore) -> Result<Real> {
    Ok(sampling::symmetric_decimal(
        X_BOUND_HUNDREDTHS,
        digits,
        rng,
    )?)
}

fn check_x(x: &Real) -> Result<()> {
    if x.abs().to_f64() > f64::from(X_BOUND_HUNDREDTHS) / 100.0 {
        return Err(ProtocolError::BadParams(format!(
            "public argument {} outside [-0.99, 0.99]",
            crate::bigreal::render_sci(x, 12)
        )));
    }
    Ok(())
}

/// Draws a secret with `index_digits` digits and publishes `y = T_s(x)`.
/// When `x` is `None` it is sampled at the session precision.
pub fn keygen(
    x: Option<Real>,
    index_digits: u32,
    precision: Precision,
    rng: &mut dyn RngCore,
) -> Result<(SecretKey, PublicParams)> {
    precision.validate()?;
    if index_digits == 0 {
        return Err(ProtocolError::BadParams(
            "index size must be positive".into(),
        ));
    }
    let x = match x {
        Some(x) => x.with_digits(precision.digits)?,
        None => sample_x(precision.digits, rng)?,
    };
    check_x(&x)?;
    let secret = SecretKey::random(index_digits, rng);
    let params = public_for(&secret, x, precision)?;
    Ok((secret, params))
}

/// Public parameters for a given secret and argument.
pub fn public_for(secret: &SecretKey, x: Real, precision: Precision) -> Result<PublicParams> {
    let x = x.with_digits(precision.digits)?;
    let y = apply(&x, secret.index())?;
    Ok(PublicParams { x, y, precision })
}

pub(crate) fn apply(v: &Real, n: &Degree) -> Result<Real> {
    Ok(chebyshev::eval(v, n, DEFAULT_ENGINE)?)
}
