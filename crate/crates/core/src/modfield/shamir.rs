//! Threshold sharing of a secret over a prime field: the issuer hides `s` as
//! the constant term of a random degree-`m` polynomial, any `m + 1` points
//! recover it by Lagrange interpolation at zero.

use std::collections::HashSet;

use rand::RngCore;
use rug::ops::RemRounding;
use rug::Integer;

use super::{FieldError, PrimeField};
use crate::sampling;

/// One point `(z, P(z))` of the sharing polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Share {
    pub z: Integer,
    pub y: Integer,
}

/// Splits `secret` into `count` shares, any `degree + 1` of which recover it.
/// Abscissas are distinct random nonzero field elements.
pub fn shamir_deal(
    secret: &Integer,
    degree: usize,
    count: usize,
    field: &PrimeField,
    rng: &mut dyn RngCore,
) -> Result<Vec<Share>, FieldError> {
    let p = field.p();
    if !field.contains(secret) {
        return Err(FieldError::BadParams(format!("secret not in [0, {p})")));
    }
    if degree + 1 > count {
        return Err(FieldError::BadParams(format!(
            "{count} shares cannot carry a degree-{degree} polynomial"
        )));
    }
    if *p <= count {
        return Err(FieldError::BadParams(format!(
            "{count} shares need more than {p} field elements"
        )));
    }

    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(secret.clone());
    for k in 1..=degree {
        let mut a = sampling::below(p, rng);
        // leading coefficient must be nonzero
        while k == degree && a == 0 {
            a = sampling::below(p, rng);
        }
        coeffs.push(a);
    }

    let nonzero_bound = Integer::from(p - 1u32);
    let mut used = HashSet::with_capacity(count);
    let mut shares = Vec::with_capacity(count);
    while shares.len() < count {
        let z = sampling::below(&nonzero_bound, rng) + 1u32;
        if !used.insert(z.clone()) {
            continue;
        }
        let y = horner(&coeffs, &z, p);
        shares.push(Share { z, y });
    }
    Ok(shares)
}

fn horner(coeffs: &[Integer], z: &Integer, p: &Integer) -> Integer {
    let mut acc = Integer::new();
    for c in coeffs.iter().rev() {
        acc = Integer::from(&acc * z) + c;
        acc = acc.rem_euc(p);
    }
    acc
}

/// Recovers `P(0)` from at least `degree + 1` shares with distinct abscissas.
/// All supplied shares enter the interpolation.
pub fn shamir_reconstruct(
    shares: &[Share],
    degree: usize,
    field: &PrimeField,
) -> Result<Integer, FieldError> {
    if shares.len() < degree + 1 {
        return Err(FieldError::InsufficientShares {
            needed: degree + 1,
            got: shares.len(),
        });
    }
    let p = field.p();
    let mut seen = HashSet::with_capacity(shares.len());
    for s in shares {
        let z = field.reduce(&s.z);
        if z == 0 {
            return Err(FieldError::BadParams("share abscissa is zero".into()));
        }
        if !seen.insert(z.clone()) {
            return Err(FieldError::DuplicateAbscissa(z.to_string()));
        }
    }
    interpolate_at_zero(shares, p)
}

pub(crate) fn interpolate_at_zero(shares: &[Share], p: &Integer) -> Result<Integer, FieldError> {
    let mut secret = Integer::new();
    for (i, si) in shares.iter().enumerate() {
        let mut num = Integer::from(1);
        let mut den = Integer::from(1);
        for (j, sj) in shares.iter().enumerate() {
            if i == j {
                continue;
            }
            num = (num * &sj.z).rem_euc(p);
            den = (den * Integer::from(&sj.z - &si.z)).rem_euc(p);
        }
        let inv = den.invert(p).map_err(|d| FieldError::NotInvertible {
            e: d.to_string(),
            modulus: p.to_string(),
        })?;
        secret = (secret + Integer::from(&si.y * &num) * inv).rem_euc(p);
    }
    Ok(secret)
}
