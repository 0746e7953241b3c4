//! Secret on behalf of a group. Peer `i` holds `s_i` and the cofactor
//! `s'_i = Π_{k≠i} s_k` and applies them consecutively, so every peer reaches
//! the same `T_{s * alice}(x)` on the leading digits while rounding noise in
//! the trailing digits identifies which peer computed it.

use rand::RngCore;

use super::{
    apply, public_for, sample_x, Precision, ProtocolError, PublicParams, Result, SecretKey,
};
use crate::bigreal::{agreement_digits, render_fixed, Real};
use crate::chebyshev::Degree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehalfPeer {
    pub index: usize,
    pub own: SecretKey,
    pub cofactor: SecretKey,
}

#[derive(Clone, Debug)]
pub struct BehalfGroup {
    pub peers: Vec<BehalfPeer>,
    pub public: PublicParams,
}

/// Draws `peers` indices of `index_digits` digits each and publishes
/// `y = T_s(x)` for their product `s`.
pub fn behalf_issue(
    x: Option<Real>,
    peers: usize,
    index_digits: u32,
    precision: Precision,
    rng: &mut dyn RngCore,
) -> Result<BehalfGroup> {
    precision.validate()?;
    if peers < 2 || index_digits == 0 {
        return Err(ProtocolError::BadParams(
            "need at least two peers with positive indices".into(),
        ));
    }
    let x = match x {
        Some(x) => x.with_digits(precision.digits)?,
        None => sample_x(precision.digits, rng)?,
    };
    let own: Vec<SecretKey> = (0..peers)
        .map(|_| SecretKey::random(index_digits, rng))
        .collect();
    behalf_from_secrets(own, x, precision)
}

/// Issues the group for given peer indices.
pub fn behalf_from_secrets(
    own: Vec<SecretKey>,
    x: Real,
    precision: Precision,
) -> Result<BehalfGroup> {
    let total = SecretKey::new(Degree::product(own.iter().map(SecretKey::index)))?;
    let peers = (0..own.len())
        .map(|i| {
            let co = Degree::product(
                own.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i)
                    .map(|(_, s)| s.index()),
            );
            Ok(BehalfPeer {
                index: i,
                own: own[i].clone(),
                cofactor: SecretKey::new(co)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BehalfGroup {
        peers,
        public: public_for(&total, x, precision)?,
    })
}

/// `T_{s_i}(T_{s'_i}(alice_value))`.
pub fn behalf_secret(peer: &BehalfPeer, alice_value: &Real) -> Result<Real> {
    apply(
        &apply(alice_value, peer.cofactor.index())?,
        peer.own.index(),
    )
}

/// Where two values rendered at `digits` fractional digits disagree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    /// Leading digits on which the values agree.
    pub equal_prefix_len: u32,
    /// First and last differing fractional positions (1-based) of the
    /// renderings; `None` when the renderings are identical.
    pub divergence_window: Option<(u32, u32)>,
}

pub fn fingerprint(a: &Real, b: &Real, digits: u32) -> Fingerprint {
    let ra = render_fixed(a, digits);
    let rb = render_fixed(b, digits);
    let frac = |s: &str| {
        s.split_once('.')
            .map(|(_, f)| f.to_string())
            .unwrap_or_default()
    };
    let (fa, fb) = (frac(&ra), frac(&rb));
    let differing: Vec<u32> = fa
        .bytes()
        .zip(fb.bytes())
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, _)| i as u32 + 1)
        .collect();
    let window = if ra == rb {
        None
    } else {
        // a sign or integer-part mismatch counts as position 0
        let start = if ra[..ra.len() - fa.len()] != rb[..rb.len() - fb.len()] {
            0
        } else {
            differing.first().copied().unwrap_or(0)
        };
        Some((start, differing.last().copied().unwrap_or(start)))
    };
    Fingerprint {
        equal_prefix_len: agreement_digits(a, b),
        divergence_window: window,
    }
}

/// Agreement of a group of peer values with Alice's and among each other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupFingerprint {
    /// Smallest agreement between any peer and Alice.
    pub vs_alice: u32,
    /// Earliest position at which two peers' renderings differ; `None` when
    /// all peers rendered identically.
    pub inter_peer_onset: Option<u32>,
    /// Fingerprints of every peer pair `(i, j)`, `i < j`.
    pub pairs: Vec<((usize, usize), Fingerprint)>,
}

pub fn group_fingerprint(alice: &Real, peers: &[Real], digits: u32) -> GroupFingerprint {
    let vs_alice = peers
        .iter()
        .map(|p| agreement_digits(p, alice))
        .min()
        .unwrap_or(digits);
    let mut pairs = Vec::new();
    for i in 0..peers.len() {
        for j in i + 1..peers.len() {
            pairs.push(((i, j), fingerprint(&peers[i], &peers[j], digits)));
        }
    }
    let inter_peer_onset = pairs
        .iter()
        .filter_map(|(_, f)| f.divergence_window.map(|w| w.0))
        .min();
    GroupFingerprint {
        vs_alice,
        inter_peer_onset,
        pairs,
    }
}
