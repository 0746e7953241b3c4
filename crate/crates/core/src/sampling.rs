//! Uniform sampling of big integers and decimal reals from a caller's RNG.
//!
//! Every random quantity in the crate goes through here so that seeded
//! generators reproduce transcripts byte for byte.

use rand::RngCore;
use rug::integer::Order;
use rug::ops::Pow;
use rug::Integer;

use crate::bigreal::{Real, RealError};

/// Uniform integer in `[0, bound)`. `bound` must be positive.
pub fn below(bound: &Integer, rng: &mut dyn RngCore) -> Integer {
    assert!(*bound > 0, "sampling bound must be positive");
    let bits = bound.significant_bits() as usize;
    let nbytes = bits.div_ceil(8);
    let top_mask: u8 = match bits % 8 {
        0 => 0xff,
        r => (1u8 << r) - 1,
    };
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        if let Some(last) = buf.last_mut() {
            *last &= top_mask;
        }
        let candidate = Integer::from_digits(&buf, Order::Lsf);
        if candidate < *bound {
            return candidate;
        }
    }
}

/// Uniform integer in `[lo, hi)`.
pub fn in_range(lo: &Integer, hi: &Integer, rng: &mut dyn RngCore) -> Integer {
    let span = Integer::from(hi - lo);
    below(&span, rng) + lo
}

/// Uniform integer with exactly `digits` decimal digits.
pub fn with_decimal_digits(digits: u32, rng: &mut dyn RngCore) -> Integer {
    assert!(digits >= 1);
    let lo = Integer::from(10).pow(digits - 1);
    let hi = Integer::from(10).pow(digits);
    in_range(&lo, &hi, rng)
}

/// Uniform decimal in `[-bound, bound]` on the grid `10^-digits`, where
/// `bound = bound_hundredths / 100`. The value is a short exact decimal
/// rounded once to the working precision.
pub fn symmetric_decimal(
    bound_hundredths: u32,
    digits: u32,
    rng: &mut dyn RngCore,
) -> Result<Real, RealError> {
    let half = Integer::from(bound_hundredths) * Integer::from(10).pow(digits);
    let span = Integer::from(&half * 2u32) + 1u32;
    let k = below(&span, rng) - half;
    Real::from_scaled(&k, digits + 2, digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn below_stays_in_range_and_hits_all_values() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let bound = Integer::from(7);
        let mut seen = [false; 7];
        for _ in 0..500 {
            let v = below(&bound, &mut rng);
            assert!((0..7).contains(&v));
            seen[v.to_usize().unwrap()] = true;
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn decimal_digit_count_is_exact() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for g in [1u32, 2, 17, 105] {
            for _ in 0..20 {
                let v = with_decimal_digits(g, &mut rng);
                assert_eq!(v.to_string().len(), g as usize);
            }
        }
    }

    #[test]
    fn symmetric_decimal_within_bound() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = symmetric_decimal(99, 30, &mut rng).unwrap();
            assert!(x.to_f64().abs() <= 0.99);
        }
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let a = with_decimal_digits(50, &mut ChaCha20Rng::seed_from_u64(9));
        let b = with_decimal_digits(50, &mut ChaCha20Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}
