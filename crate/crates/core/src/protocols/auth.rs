//! Authentication against published parameters `(x, y = T_s(x))`.
//!
//! Proof of knowledge: the verifier sends `T_r(x)` for a fresh `r`, the
//! prover answers `T_s(T_r(x))`, which the verifier compares with `T_r(y)`.
//! Mutual authentication either multiplies two such directional secrets or
//! has one side answer an El Gamal challenge.

use rand::RngCore;
use rug::Integer;

use super::elgamal::{elgamal_decrypt, elgamal_encrypt, Ciphertext};
use super::session::{settle, Confirmation, SessionKey};
use super::{apply, Channel, ProtocolError, PublicParams, Result, SecretKey};
use crate::bigreal::{agreement_digits, Real};
use crate::sampling;

/// Size of the El Gamal challenge nonce.
pub const NONCE_BITS: u32 = 128;

/// A party holding its secret index and the parameters it published.
#[derive(Clone, Debug)]
pub struct AuthParty {
    pub secret: SecretKey,
    pub public: PublicParams,
}

/// Fresh ephemeral index with `max_index_digits` digits and the challenge
/// `T_r(x)`.
pub fn pok_challenge(params: &PublicParams, rng: &mut dyn RngCore) -> Result<(SecretKey, Real)> {
    let r = SecretKey::random(params.precision.max_index_digits, rng);
    let challenge = apply(&params.x, r.index())?;
    Ok((r, challenge))
}

/// `T_s(challenge)`.
pub fn pok_respond(secret: &SecretKey, challenge: &Real) -> Result<Real> {
    apply(challenge, secret.index())
}

/// True iff the response matches `T_r(y)` on `N_agree` digits.
pub fn pok_verify(r: &SecretKey, response: &Real, params: &PublicParams) -> Result<bool> {
    let expected = apply(&params.y, r.index())?;
    Ok(agreement_digits(response, &expected) >= params.agree_digits())
}

/// Verifier challenges `prover` against the parameters the verifier holds
/// for it. Fails with `AuthFailed` on a wrong response.
pub fn run_pok(
    pinned: &PublicParams,
    prover: &SecretKey,
    verifier_rng: &mut dyn RngCore,
    channel: &mut Channel,
) -> Result<()> {
    let d = pinned.digits();
    let (r, challenge) = pok_challenge(pinned, verifier_rng)?;
    let challenge = channel.send_real("pok.challenge", "verifier", &challenge, d)?;
    let response = pok_respond(prover, &challenge)?;
    let response = channel.send_real("pok.response", "prover", &response, d)?;
    if pok_verify(&r, &response, pinned)? {
        Ok(())
    } else {
        Err(ProtocolError::AuthFailed)
    }
}

/// Both directions at once: Alice challenges Bob's parameters, Bob challenges
/// Alice's, and the common secret is `T_{r s}(x_B) * T_{r' s'}(x_A)`. Each
/// side uses its pinned copy of the other's parameters. Bob confirms first.
pub fn mutual_auth_product(
    alice: &AuthParty,
    bob_pinned_by_alice: &PublicParams,
    bob: &AuthParty,
    alice_pinned_by_bob: &PublicParams,
    rng_alice: &mut dyn RngCore,
    rng_bob: &mut dyn RngCore,
    channel: &mut Channel,
) -> Result<(SessionKey, SessionKey)> {
    let prec = alice.public.precision;
    if bob.public.precision != prec {
        return Err(ProtocolError::BadParams(
            "parties use different precisions".into(),
        ));
    }
    prec.validate()?;
    let d = prec.digits;

    let (r, ch_a) = pok_challenge(bob_pinned_by_alice, rng_alice)?;
    let ch_a = channel.send_real("auth.challenge", "alice", &ch_a, d)?;
    let (r2, ch_b) = pok_challenge(alice_pinned_by_bob, rng_bob)?;
    let ch_b = channel.send_real("auth.challenge", "bob", &ch_b, d)?;

    let k_alice = &apply(&bob_pinned_by_alice.y, r.index())? * &pok_respond(&alice.secret, &ch_b)?;
    let k_bob = &pok_respond(&bob.secret, &ch_a)? * &apply(&alice_pinned_by_bob.y, r2.index())?;

    let n = prec.agree_digits;
    let bob_tags = super::dh::send_tags(channel, "bob", &Confirmation::of(&k_bob, n))?;
    let alice_key = settle(&k_alice, n, &bob_tags)?;
    let alice_tags = super::dh::send_tags(channel, "alice", &Confirmation::of(&k_alice, n))?;
    let bob_key = settle(&k_bob, n, &alice_tags)?;
    Ok((alice_key, bob_key))
}

/// Bob encrypts a random `NONCE_BITS` nonce to Alice's pinned parameters;
/// only the holder of Alice's secret can return it.
pub fn elgamal_challenge_response(
    alice_pinned_by_bob: &PublicParams,
    alice: &SecretKey,
    rng_bob: &mut dyn RngCore,
    channel: &mut Channel,
) -> Result<()> {
    let d = alice_pinned_by_bob.digits();
    let bound = Integer::from(1) << NONCE_BITS;
    let nonce = sampling::below(&bound, rng_bob) + 1u32;
    let ct = elgamal_encrypt(alice_pinned_by_bob, &nonce, rng_bob)?;
    let sent = channel.send("auth.nonce", "bob", ct.render(d).to_vec());
    let [q, r] = <[String; 2]>::try_from(sent).map_err(|_| ProtocolError::Malformed {
        step: "auth.nonce".into(),
        reason: "expected Q and R".into(),
    })?;
    let answer = match elgamal_decrypt(alice, &Ciphertext::parse(&q, &r, d)?) {
        Ok(n) => n.to_string(),
        Err(ProtocolError::DecryptOutOfTolerance(_)) => "0".to_string(),
        Err(e) => return Err(e),
    };
    let back = channel.send("auth.nonce_reply", "alice", vec![answer]);
    match back.as_slice() {
        [s] if *s == nonce.to_string() => Ok(()),
        _ => Err(ProtocolError::AuthFailed),
    }
}
