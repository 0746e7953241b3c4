//! Chebyshev polynomials over `Z/mZ` and the finite-field schemes built on
//! them: threshold sharing of a secret index, Chebyshev-RSA and the reduction
//! of the cosh form to an ordinary discrete logarithm.

mod dlog;
mod rsa;
mod shamir;

pub use dlog::{cosh_dlog, sqrt_mod, DLOG_MAX_PRIME};
pub use rsa::{cheb_rsa_decrypt, cheb_rsa_encrypt, cheb_rsa_keygen, ChebRsaKey};
pub use shamir::{shamir_deal, shamir_reconstruct, Share};

use rug::integer::IsPrime;
use rug::ops::RemRounding;
use rug::Integer;
use thiserror::Error;

use crate::chebyshev::Degree;

/// Miller-Rabin rounds used when validating a prime.
pub const PRIME_ROUNDS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(String),
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("need at least {needed} shares, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error("two shares use the abscissa {0}")]
    DuplicateAbscissa(String),
    #[error("{e} has no inverse modulo {modulus}")]
    NotInvertible { e: String, modulus: String },
    #[error("message {0} is outside the residue range")]
    MessageOutOfRange(String),
    #[error("no exponent maps the base to the target")]
    NoSolution,
}

/// Prime modulus, checked probabilistically on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: Integer,
}

impl PrimeField {
    pub fn new(p: Integer) -> Result<PrimeField, FieldError> {
        if !is_prime(&p) {
            return Err(FieldError::NotPrime(p.to_string()));
        }
        Ok(PrimeField { p })
    }

    pub fn from_u64(p: u64) -> Result<PrimeField, FieldError> {
        PrimeField::new(Integer::from(p))
    }

    pub fn p(&self) -> &Integer {
        &self.p
    }

    /// Canonical representative in `[0, p)`.
    pub fn reduce(&self, v: &Integer) -> Integer {
        v.clone().rem_euc(&self.p)
    }

    pub fn contains(&self, v: &Integer) -> bool {
        *v >= 0 && *v < self.p
    }
}

pub(crate) fn is_prime(p: &Integer) -> bool {
    *p >= 2 && p.is_probably_prime(PRIME_ROUNDS) != IsPrime::No
}

/// `T_n(x) mod m` by binary powering of `[[0, 1], [-1, 2x]]` with every entry
/// reduced modulo `m`.
pub fn t_mod(n: &Degree, x: &Integer, modulus: &Integer) -> Result<Integer, FieldError> {
    if *modulus < 2 {
        return Err(FieldError::BadModulus(modulus.to_string()));
    }
    let m = modulus;
    let red = |v: Integer| -> Integer { v.rem_euc(m) };
    let x = red(x.clone());
    let two_x = red(Integer::from(&x * 2u32));

    // row-major [a11, a12, a21, a22]
    let mul = |l: &[Integer; 4], r: &[Integer; 4]| -> [Integer; 4] {
        [
            red(Integer::from(&l[0] * &r[0]) + Integer::from(&l[1] * &r[2])),
            red(Integer::from(&l[0] * &r[1]) + Integer::from(&l[1] * &r[3])),
            red(Integer::from(&l[2] * &r[0]) + Integer::from(&l[3] * &r[2])),
            red(Integer::from(&l[2] * &r[1]) + Integer::from(&l[3] * &r[3])),
        ]
    };
    let mut result = [
        Integer::from(1),
        Integer::new(),
        Integer::new(),
        Integer::from(1),
    ];
    let mut base = [
        Integer::new(),
        Integer::from(1),
        red(Integer::from(-1)),
        two_x,
    ];
    let mut e = n.as_integer().clone();
    while e != 0 {
        if e.is_odd() {
            result = mul(&result, &base);
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = mul(&base, &base);
    }
    let [r11, r12, _, _] = result;
    Ok(red(r11 + r12 * x))
}
