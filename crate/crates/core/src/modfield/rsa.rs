//! RSA with Chebyshev polynomials in place of monomials: `T_d` and `T_e`
//! are mutually inverse permutations of `Z_n` when
//! `d e = 1 (mod lcm(p^2 - 1, q^2 - 1))`.

use rug::Integer;

use super::{is_prime, t_mod, FieldError};
use crate::chebyshev::Degree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebRsaKey {
    pub n: Integer,
    pub e: Integer,
    pub d: Integer,
    pub p: Integer,
    pub q: Integer,
}

impl ChebRsaKey {
    /// `lcm(p^2 - 1, q^2 - 1)`.
    pub fn lambda(&self) -> Integer {
        lambda(&self.p, &self.q)
    }
}

fn lambda(p: &Integer, q: &Integer) -> Integer {
    let p2 = Integer::from(p * p) - 1u32;
    let q2 = Integer::from(q * q) - 1u32;
    p2.lcm(&q2)
}

pub fn cheb_rsa_keygen(p: &Integer, q: &Integer, e: &Integer) -> Result<ChebRsaKey, FieldError> {
    for f in [p, q] {
        if !is_prime(f) {
            return Err(FieldError::NotPrime(f.to_string()));
        }
    }
    if p == q {
        return Err(FieldError::BadParams("p and q must differ".into()));
    }
    if *e < 1 {
        return Err(FieldError::BadParams(
            "public index must be positive".into(),
        ));
    }
    let l = lambda(p, q);
    let d = e
        .clone()
        .invert(&l)
        .map_err(|_| FieldError::NotInvertible {
            e: e.to_string(),
            modulus: l.to_string(),
        })?;
    Ok(ChebRsaKey {
        n: Integer::from(p * q),
        e: e.clone(),
        d,
        p: p.clone(),
        q: q.clone(),
    })
}

fn check_range(v: &Integer, key: &ChebRsaKey) -> Result<(), FieldError> {
    if *v < 0 || *v >= key.n {
        Err(FieldError::MessageOutOfRange(v.to_string()))
    } else {
        Ok(())
    }
}

/// `X = T_d(N) mod n`, computed with the secret index.
pub fn cheb_rsa_encrypt(message: &Integer, key: &ChebRsaKey) -> Result<Integer, FieldError> {
    check_range(message, key)?;
    t_mod(
        &Degree::new(key.d.clone()).expect("d is positive"),
        message,
        &key.n,
    )
}

/// `N = T_e(X) mod n`, computed with the public index.
pub fn cheb_rsa_decrypt(cipher: &Integer, key: &ChebRsaKey) -> Result<Integer, FieldError> {
    check_range(cipher, key)?;
    t_mod(
        &Degree::new(key.e.clone()).expect("e is positive"),
        cipher,
        &key.n,
    )
}
