//! Group secrets. A trusted issuer splits the index `s = Π s_i` among
//! members, who apply their factors one after the other to Alice's
//! `R = T_r(x)`. In the threshold variant the issuer shares `s` itself with
//! Shamir's scheme over a prime `p > s`.

use rand::RngCore;
use rug::ops::Pow;
use rug::Integer;

use super::{
    apply, public_for, sample_x, Precision, ProtocolError, PublicParams, Result, SecretKey,
};
use crate::bigreal::Real;
use crate::chebyshev::Degree;
use crate::modfield::{shamir_deal, shamir_reconstruct, PrimeField, Share};

fn resolve_x(x: Option<Real>, precision: &Precision, rng: &mut dyn RngCore) -> Result<Real> {
    match x {
        Some(x) => Ok(x.with_digits(precision.digits)?),
        None => sample_x(precision.digits, rng),
    }
}

/// Member secrets of `index_digits` digits each and `y = T_{Π s_i}(x)`.
pub fn group_issue(
    x: Option<Real>,
    members: usize,
    index_digits: u32,
    precision: Precision,
    rng: &mut dyn RngCore,
) -> Result<(Vec<SecretKey>, PublicParams)> {
    precision.validate()?;
    if members == 0 || index_digits == 0 {
        return Err(ProtocolError::BadParams(
            "group needs members with positive indices".into(),
        ));
    }
    let x = resolve_x(x, &precision, rng)?;
    let secrets: Vec<SecretKey> = (0..members)
        .map(|_| SecretKey::random(index_digits, rng))
        .collect();
    let s = SecretKey::new(Degree::product(secrets.iter().map(SecretKey::index)))?;
    Ok((secrets, public_for(&s, x, precision)?))
}

/// Applies each secret in turn, last one first.
pub fn group_apply_chain(r_value: &Real, secrets: &[&SecretKey]) -> Result<Real> {
    let mut v = r_value.clone();
    for s in secrets.iter().rev() {
        v = apply(&v, s.index())?;
    }
    Ok(v)
}

/// Issued threshold group: any `degree + 1` shares recover the index.
#[derive(Clone, Debug)]
pub struct PartialGroup {
    pub public: PublicParams,
    pub field: PrimeField,
    pub degree: usize,
    pub shares: Vec<Share>,
}

/// Draws `s` with `index_digits` digits, picks `p` as the first prime above
/// `10^index_digits` and deals `count` shares of a degree-`degree` polynomial.
pub fn partial_group_issue(
    x: Option<Real>,
    degree: usize,
    count: usize,
    index_digits: u32,
    precision: Precision,
    rng: &mut dyn RngCore,
) -> Result<(SecretKey, PartialGroup)> {
    precision.validate()?;
    let x = resolve_x(x, &precision, rng)?;
    let s = SecretKey::random(index_digits, rng);
    let field = PrimeField::new(Integer::from(10).pow(index_digits).next_prime())?;
    let shares = shamir_deal(s.index().as_integer(), degree, count, &field, rng)?;
    let public = public_for(&s, x, precision)?;
    Ok((
        s,
        PartialGroup {
            public,
            field,
            degree,
            shares,
        },
    ))
}

/// Reconstructs the index from `shares` and returns `T_s(r_value)`.
pub fn partial_group_secret(
    shares: &[Share],
    degree: usize,
    field: &PrimeField,
    r_value: &Real,
) -> Result<Real> {
    let s = shamir_reconstruct(shares, degree, field)?;
    let s = SecretKey::new(Degree::new(s)?)?;
    apply(r_value, s.index())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigreal::agreement_digits;
    use crate::chebyshev::{self, Engine};
    use crate::modfield::FieldError;
    use crate::protocols::{dh_exchange, precision_plan};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn single_member_is_plain_agreement() {
        let prec = Precision::new(150, 60, 30).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(71);
        let (secrets, public) = group_issue(None, 1, 30, prec, &mut rng).unwrap();
        let r = SecretKey::random(30, &mut rng);
        let big_r = apply(&public.x, r.index()).unwrap();
        let group_side = group_apply_chain(&big_r, &[&secrets[0]]).unwrap();
        assert_eq!(
            dh_exchange(&secrets[0], &big_r, &prec).unwrap(),
            crate::protocols::SessionKey::derive(&group_side, 60)
        );
        let alice_side = apply(&public.y, r.index()).unwrap();
        assert!(agreement_digits(&group_side, &alice_side) >= 60);
    }

    #[test]
    fn every_order_agrees() {
        let g = 15;
        let d = precision_plan(60, 4, g);
        let prec = Precision::new(d, 60, g).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(72);
        let (s, public) = group_issue(None, 3, g, prec, &mut rng).unwrap();
        let r = SecretKey::random(g, &mut rng);
        let big_r = apply(&public.x, r.index()).unwrap();
        let alice = apply(&public.y, r.index()).unwrap();
        let orders = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let values: Vec<Real> = orders
            .iter()
            .map(|o| group_apply_chain(&big_r, &[&s[o[0]], &s[o[1]], &s[o[2]]]).unwrap())
            .collect();
        let total = Degree::product([s[0].index(), s[1].index(), s[2].index(), r.index()]);
        let direct = chebyshev::eval(&public.x, &total, Engine::Matrix).unwrap();
        for v in &values {
            assert!(agreement_digits(v, &alice) >= 60);
            assert!(agreement_digits(v, &direct) >= 60);
            for w in &values {
                assert!(agreement_digits(v, w) >= 60);
            }
        }
    }

    #[test]
    fn threshold_subsets_recover_the_secret() {
        let prec = Precision::new(150, 60, 20).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(73);
        let (s, group) = partial_group_issue(None, 2, 5, 20, prec, &mut rng).unwrap();
        assert!(group.field.p() > s.index().as_integer());
        let r = SecretKey::random(20, &mut rng);
        let big_r = apply(&group.public.x, r.index()).unwrap();
        let alice = apply(&group.public.y, r.index()).unwrap();
        for subset in [[0, 1, 2], [2, 3, 4], [4, 0, 3]] {
            let picked: Vec<Share> = subset.iter().map(|&i| group.shares[i].clone()).collect();
            let v = partial_group_secret(&picked, 2, &group.field, &big_r).unwrap();
            assert!(agreement_digits(&v, &alice) >= 60);
        }
        let two = &group.shares[..2];
        assert!(matches!(
            partial_group_secret(two, 2, &group.field, &big_r),
            Err(ProtocolError::Field(FieldError::InsufficientShares {
                needed: 3,
                got: 2
            }))
        ));
    }
}
