//! Two-party agreement: `T_a(T_b(x)) = T_b(T_a(x)) = T_{ab}(x)`.

use super::session::{settle, Confirmation, SessionKey};
use super::{Channel, Precision, Result, SecretKey};
use crate::bigreal::{agreement_digits, Real};
use crate::chebyshev::{self, Engine, OpCount};

/// `T_s(x)` with the chosen engine.
pub fn dh_public(secret: &SecretKey, x: &Real, engine: Engine) -> Result<(Real, OpCount)> {
    Ok(chebyshev::eval_counted(x, secret.index(), engine)?)
}

/// `T_s(peer)`: the raw shared value.
pub fn dh_shared(secret: &SecretKey, peer_value: &Real, engine: Engine) -> Result<(Real, OpCount)> {
    Ok(chebyshev::eval_counted(peer_value, secret.index(), engine)?)
}

/// One side's unconfirmed key from the peer's public value.
pub fn dh_exchange(
    secret: &SecretKey,
    peer_value: &Real,
    precision: &Precision,
) -> Result<SessionKey> {
    let (raw, _) = dh_shared(secret, peer_value, super::DEFAULT_ENGINE)?;
    Ok(SessionKey::derive(&raw, precision.agree_digits))
}

#[derive(Clone, Debug)]
pub struct DhOutcome {
    pub alice: SessionKey,
    pub bob: SessionKey,
    /// Digits on which the two raw shared values agree.
    pub agreement: u32,
    /// Ring operations of all four evaluations.
    pub ops: OpCount,
}

/// Public values and both raw shared values, passed through `channel`.
pub fn dh_raw(
    alice: &SecretKey,
    bob: &SecretKey,
    x: &Real,
    precision: &Precision,
    engine: Engine,
    channel: &mut Channel,
) -> Result<(Real, Real, OpCount)> {
    precision.validate()?;
    let d = precision.digits;
    let x = x.with_digits(d)?;
    let mut ops = OpCount::default();

    let (a_pub, o) = dh_public(alice, &x, engine)?;
    ops += o;
    let a_pub = channel.send_real("dh.public", "alice", &a_pub, d)?;
    let (b_pub, o) = dh_public(bob, &x, engine)?;
    ops += o;
    let b_pub = channel.send_real("dh.public", "bob", &b_pub, d)?;

    let (k_alice, o) = dh_shared(alice, &b_pub, engine)?;
    ops += o;
    let (k_bob, o) = dh_shared(bob, &a_pub, engine)?;
    ops += o;
    Ok((k_alice, k_bob, ops))
}

/// Bob sends his tags and Alice settles, then the reverse.
pub fn dh_confirm(
    k_alice: &Real,
    k_bob: &Real,
    agree_digits: u32,
    channel: &mut Channel,
) -> Result<(SessionKey, SessionKey)> {
    let bob_tags = send_tags(channel, "bob", &Confirmation::of(k_bob, agree_digits))?;
    let alice_key = settle(k_alice, agree_digits, &bob_tags)?;
    let alice_tags = send_tags(channel, "alice", &Confirmation::of(k_alice, agree_digits))?;
    let bob_key = settle(k_bob, agree_digits, &alice_tags)?;
    Ok((alice_key, bob_key))
}

/// Runs both sides of the agreement in-process. Bob confirms first, then
/// Alice; either side settling on a mismatch aborts with `KeyMismatch`.
pub fn negotiate_dh(
    alice: &SecretKey,
    bob: &SecretKey,
    x: &Real,
    precision: &Precision,
    engine: Engine,
    channel: &mut Channel,
) -> Result<DhOutcome> {
    let (k_alice, k_bob, ops) = dh_raw(alice, bob, x, precision, engine, channel)?;
    let (alice_key, bob_key) = dh_confirm(&k_alice, &k_bob, precision.agree_digits, channel)?;
    Ok(DhOutcome {
        agreement: agreement_digits(&k_alice, &k_bob),
        alice: alice_key,
        bob: bob_key,
        ops,
    })
}

pub(crate) fn send_tags(
    channel: &mut Channel,
    sender: &str,
    c: &Confirmation,
) -> Result<Confirmation> {
    let got = channel.send_hex("confirm", sender, &[&c.primary, &c.fallback])?;
    let malformed = || super::ProtocolError::Malformed {
        step: "confirm".into(),
        reason: "expected two 32-byte tags".into(),
    };
    let [p, f] = <[Vec<u8>; 2]>::try_from(got).map_err(|_| malformed())?;
    Ok(Confirmation {
        primary: p.try_into().map_err(|_| malformed())?,
        fallback: f.try_into().map_err(|_| malformed())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::Degree;
    use crate::protocols::transcript::flip_digit;
    use crate::protocols::{sample_x, ProtocolError};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn run(d: u32, n: u32, g: u32, seed: u64, channel: &mut Channel) -> Result<DhOutcome> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let prec = Precision::new(d, n, g).unwrap();
        let x = sample_x(d, &mut rng).unwrap();
        let a = SecretKey::random(g, &mut rng);
        let b = SecretKey::random(g, &mut rng);
        negotiate_dh(&a, &b, &x, &prec, Engine::Matrix, channel)
    }

    #[test]
    fn unit_secrets_share_x() {
        let prec = Precision::new(40, 20, 1).unwrap();
        let one = SecretKey::new(Degree::from_u64(1)).unwrap();
        let x = Real::from_decimal("0.3", 40).unwrap();
        let out = negotiate_dh(&one, &one, &x, &prec, Engine::Matrix, &mut Channel::new()).unwrap();
        assert_eq!(out.alice.key_bytes, out.bob.key_bytes);
        assert_eq!(out.alice, SessionKey::derive(&x, 20));
    }

    #[test]
    fn honest_run_at_d300() {
        let out = run(300, 100, 60, 11, &mut Channel::new()).unwrap();
        assert!(out.agreement >= 150, "agreement {}", out.agreement);
        assert_eq!(out.alice.key_bytes, out.bob.key_bytes);
        assert_eq!(out.alice.digits_used, 100);
    }

    #[test]
    fn overambitious_agreement_fails() {
        let err = run(300, 295, 60, 12, &mut Channel::new()).unwrap_err();
        assert_eq!(err, ProtocolError::KeyMismatch { required: 295 });
    }

    #[test]
    fn tampered_public_value_fails() {
        let mut ch = Channel::with_tamper(|step, v| {
            if step == "dh.public" {
                flip_digit(v, 10)
            }
        });
        assert!(matches!(
            run(120, 80, 15, 13, &mut ch),
            Err(ProtocolError::KeyMismatch { .. })
        ));
    }

    #[test]
    fn replay_is_byte_identical() {
        let mut c1 = Channel::new();
        let mut c2 = Channel::new();
        let a = run(100, 50, 20, 14, &mut c1).unwrap();
        let b = run(100, 50, 20, 14, &mut c2).unwrap();
        assert_eq!(a.alice.key_bytes, b.alice.key_bytes);
        assert_eq!(c1.transcript().to_text(), c2.transcript().to_text());
        assert_eq!(c1.transcript().lines.len(), 4);
    }
}
