//! Over `F_p` the relation `y = T_m(g)` is `y = cosh(m * arccosh g)`, and
//! with `u = g + sqrt(g^2 - 1)` it becomes `y + sqrt(y^2 - 1) = u^m`: an
//! ordinary discrete logarithm. Brute force only; small primes.

use rug::ops::RemRounding;
use rug::Integer;

use super::{t_mod, FieldError, PrimeField};
use crate::chebyshev::Degree;

/// Largest prime accepted by [`cosh_dlog`].
pub const DLOG_MAX_PRIME: u64 = 1_000_000;

/// Some square root of `a` modulo the odd prime `p`, by exhaustive search.
pub fn sqrt_mod(a: &Integer, field: &PrimeField) -> Option<Integer> {
    let p = field.p();
    let a = field.reduce(a);
    if a == 0 {
        return Some(Integer::new());
    }
    // Euler's criterion first, then search
    let e = Integer::from(p - 1u32) >> 1;
    if a.clone().pow_mod(&e, p).ok()? != 1 {
        return None;
    }
    let p_u64 = p.to_u64()?;
    (1..p_u64)
        .map(Integer::from)
        .find(|r| Integer::from(r * r).rem_euc(p) == a)
}

/// Finds `m` with `T_m(g) = y (mod p)`, or [`FieldError::NoSolution`] when
/// `g^2 - 1` or `y^2 - 1` is a non-residue or no exponent matches. The
/// smallest such `m` is returned.
pub fn cosh_dlog(g: &Integer, y: &Integer, field: &PrimeField) -> Result<Integer, FieldError> {
    let p = field.p();
    if *p > DLOG_MAX_PRIME || *p == 2 {
        return Err(FieldError::BadParams(format!(
            "brute-force dlog needs an odd prime <= {DLOG_MAX_PRIME}"
        )));
    }
    let g = field.reduce(g);
    let y = field.reduce(y);
    let disc = |v: &Integer| Integer::from(v * v) - 1u32;
    let rg = sqrt_mod(&disc(&g), field).ok_or(FieldError::NoSolution)?;
    let ry = sqrt_mod(&disc(&y), field).ok_or(FieldError::NoSolution)?;

    let u = field.reduce(&Integer::from(&g + &rg));
    // both roots: u^m may hit y + r or its inverse y - r
    let targets = [
        field.reduce(&Integer::from(&y + &ry)),
        field.reduce(&Integer::from(&y - &ry)),
    ];

    let order_bound = p.to_u64().expect("bounded prime");
    let mut power = Integer::from(1);
    for m in 0..order_bound {
        if targets.contains(&power) {
            let m = Integer::from(m);
            if t_mod(&Degree::new(m.clone()).expect("nonnegative"), &g, p)? == y {
                return Ok(m);
            }
        }
        power = (power * &u).rem_euc(p);
        if power == 1 && m > 0 {
            // cycled through the subgroup generated by u
            if !targets.contains(&power) {
                break;
            }
        }
    }
    Err(FieldError::NoSolution)
}
