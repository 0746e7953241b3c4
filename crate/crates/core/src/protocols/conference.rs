//! Three-party conference key `T_{abc}(x)` in two rounds. Party `i` applies
//! its secret to the round-1 value of party `i+1` (mod 3) and later to the
//! round-2 value it receives from party `i+1`, which already carries the two
//! other secrets.

use super::session::{settle_all, Confirmation, SessionKey};
use super::{apply, Channel, Precision, ProtocolError, Result, SecretKey};
use crate::bigreal::Real;

pub const CONFERENCE_SIZE: usize = 3;

const NAMES: [&str; CONFERENCE_SIZE] = ["alice", "bob", "chiara"];

#[derive(Clone, Debug)]
pub struct ConferenceParty {
    pub index: usize,
    secret: SecretKey,
    x: Real,
    precision: Precision,
}

impl ConferenceParty {
    pub fn new(index: usize, secret: SecretKey, x: &Real, precision: Precision) -> Result<Self> {
        if index >= CONFERENCE_SIZE {
            return Err(ProtocolError::BadParams(format!(
                "conference party index {index} out of range"
            )));
        }
        Ok(ConferenceParty {
            index,
            secret,
            x: x.with_digits(precision.digits)?,
            precision,
        })
    }

    pub fn name(&self) -> &'static str {
        NAMES[self.index]
    }

    /// Index of the party whose values this one consumes.
    pub fn successor(&self) -> usize {
        (self.index + 1) % CONFERENCE_SIZE
    }

    /// `T_s(x)`.
    pub fn round1(&self) -> Result<Real> {
        apply(&self.x, self.secret.index())
    }

    /// `T_s` of the successor's round-1 value.
    pub fn round2(&self, successor_round1: &Real) -> Result<Real> {
        apply(successor_round1, self.secret.index())
    }

    /// `T_s` of the successor's round-2 value: the common `T_{abc}(x)`.
    pub fn shared_value(&self, successor_round2: &Real) -> Result<Real> {
        apply(successor_round2, self.secret.index())
    }

    /// Unconfirmed key from the successor's round-2 value.
    pub fn finish(&self, successor_round2: &Real) -> Result<SessionKey> {
        let raw = self.shared_value(successor_round2)?;
        Ok(SessionKey::derive(&raw, self.precision.agree_digits))
    }
}

/// Runs all three parties in-process, including the confirmation round in
/// which every party checks the tags of both others.
pub fn run_conference(
    secrets: [SecretKey; CONFERENCE_SIZE],
    x: &Real,
    precision: &Precision,
    channel: &mut Channel,
) -> Result<[SessionKey; CONFERENCE_SIZE]> {
    precision.validate()?;
    let d = precision.digits;
    let parties: Vec<ConferenceParty> = secrets
        .into_iter()
        .enumerate()
        .map(|(i, s)| ConferenceParty::new(i, s, x, *precision))
        .collect::<Result<_>>()?;

    let mut round1 = Vec::with_capacity(CONFERENCE_SIZE);
    for p in &parties {
        round1.push(channel.send_real("conf.round1", p.name(), &p.round1()?, d)?);
    }
    let mut round2 = Vec::with_capacity(CONFERENCE_SIZE);
    for p in &parties {
        let v = p.round2(&round1[p.successor()])?;
        round2.push(channel.send_real("conf.round2", p.name(), &v, d)?);
    }
    let raws: Vec<Real> = parties
        .iter()
        .map(|p| p.shared_value(&round2[p.successor()]))
        .collect::<Result<_>>()?;

    let n = precision.agree_digits;
    let mut tags = Vec::with_capacity(CONFERENCE_SIZE);
    for (p, raw) in parties.iter().zip(&raws) {
        tags.push(super::dh::send_tags(
            channel,
            p.name(),
            &Confirmation::of(raw, n),
        )?);
    }
    let mut keys = Vec::with_capacity(CONFERENCE_SIZE);
    for (i, raw) in raws.iter().enumerate() {
        let others: Vec<Confirmation> = (0..CONFERENCE_SIZE)
            .filter(|k| *k != i)
            .map(|k| tags[k])
            .collect();
        keys.push(settle_all(raw, n, &others)?);
    }
    Ok(keys.try_into().expect("three parties"))
}
