//! Multiplicative El Gamal over the reals: `Q = N * T_r(y)`, `R = T_r(x)`,
//! recovered as the integer nearest to `Q / T_s(R)`.

use rand::RngCore;
use rug::Integer;

use super::{apply, Precision, ProtocolError, PublicParams, Result, SecretKey};
use crate::bigreal::{render_fixed, render_sci, Real};

/// Masks with `|T_r(y)| < 10^-MASK_FLOOR_EXP` are redrawn.
pub const MASK_FLOOR_EXP: u32 = 10;

/// Largest accepted distance between `Q / T_s(R)` and its nearest integer.
pub const DECRYPT_TOLERANCE: f64 = 0.1;

const MAX_MASK_DRAWS: u32 = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct Ciphertext {
    pub q: Real,
    pub r: Real,
}

impl Ciphertext {
    /// `Q` in scientific form with `D` significant digits, `R` in fixed form.
    pub fn render(&self, digits: u32) -> [String; 2] {
        [
            render_sci(&self.q, digits as usize),
            render_fixed(&self.r, digits),
        ]
    }

    pub fn parse(q: &str, r: &str, digits: u32) -> Result<Ciphertext> {
        Ok(Ciphertext {
            q: super::transcript::parse_real("elgamal", q, digits)?,
            r: super::transcript::parse_real("elgamal", r, digits)?,
        })
    }
}

/// Largest message size, in decimal digits, the session precision carries.
pub fn message_digit_limit(precision: &Precision) -> u32 {
    precision.agree_digits.saturating_sub(2)
}

/// Encrypts a positive integer to `params`. The ephemeral index has
/// `max_index_digits` digits.
pub fn elgamal_encrypt(
    params: &PublicParams,
    message: &Integer,
    rng: &mut dyn RngCore,
) -> Result<Ciphertext> {
    let prec = params.precision;
    prec.validate()?;
    if *message < 1 {
        return Err(ProtocolError::BadParams(
            "message must be a positive integer".into(),
        ));
    }
    let digits = message.to_string().len() as u32;
    let limit = message_digit_limit(&prec);
    if digits > limit {
        return Err(ProtocolError::MessageTooLarge { digits, limit });
    }
    for _ in 0..MAX_MASK_DRAWS {
        let r = SecretKey::random(prec.max_index_digits, rng);
        let mask = apply(&params.y, r.index())?;
        if !mask_ok(&mask) {
            continue;
        }
        let q = mask.mul_integer(message);
        return Ok(Ciphertext {
            q,
            r: apply(&params.x, r.index())?,
        });
    }
    Err(ProtocolError::MaskTooSmall(MAX_MASK_DRAWS))
}

fn mask_ok(mask: &Real) -> bool {
    mask.log10_abs() >= -f64::from(MASK_FLOOR_EXP)
}

/// Encrypts with a caller-chosen ephemeral index. The mask floor still applies.
pub fn elgamal_encrypt_with(
    params: &PublicParams,
    message: &Integer,
    r: &SecretKey,
) -> Result<Ciphertext> {
    let mask = apply(&params.y, r.index())?;
    if !mask_ok(&mask) {
        return Err(ProtocolError::MaskTooSmall(1));
    }
    Ok(Ciphertext {
        q: mask.mul_integer(message),
        r: apply(&params.x, r.index())?,
    })
}

pub fn elgamal_decrypt(secret: &SecretKey, ct: &Ciphertext) -> Result<Integer> {
    let unmask = apply(&ct.r, secret.index())?;
    if unmask.is_zero() {
        return Err(ProtocolError::DecryptOutOfTolerance("inf".into()));
    }
    let v = &ct.q / &unmask;
    let (n, dist) = v
        .round_to_integer()
        .ok_or_else(|| ProtocolError::DecryptOutOfTolerance("inf".into()))?;
    if dist.to_f64() > DECRYPT_TOLERANCE {
        return Err(ProtocolError::DecryptOutOfTolerance(render_sci(&dist, 6)));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::Degree;
    use crate::protocols::{keygen, public_for};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use rug::ops::Pow;

    #[test]
    fn unit_indices_round_trip() {
        let prec = Precision::new(50, 30, 1).unwrap();
        let one = SecretKey::new(Degree::from_u64(1)).unwrap();
        let params = public_for(&one, Real::from_decimal("0.5", 50).unwrap(), prec).unwrap();
        let ct = elgamal_encrypt_with(&params, &Integer::from(1), &one).unwrap();
        // Q = 1 * T_1(T_1(x)) = x
        assert_eq!(ct.q, params.x);
        assert_eq!(elgamal_decrypt(&one, &ct).unwrap(), 1);
    }

    #[test]
    fn nine_digit_message_at_d300() {
        let prec = Precision::new(300, 100, 60).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(31);
        let (s, params) = keygen(None, 60, prec, &mut rng).unwrap();
        let n = Integer::from(123_456_789);
        let ct = elgamal_encrypt(&params, &n, &mut rng).unwrap();
        assert_eq!(elgamal_decrypt(&s, &ct).unwrap(), n);
    }

    #[test]
    fn masking_is_exact_before_rounding() {
        let prec = Precision::new(80, 40, 5).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(32);
        let (_, params) = keygen(None, 5, prec, &mut rng).unwrap();
        let r = SecretKey::random(5, &mut rng);
        let n = Integer::from(987_654_321u64);
        let ct = elgamal_encrypt_with(&params, &n, &r).unwrap();
        let mask = apply(&params.y, r.index()).unwrap();
        let (back, dist) = (&ct.q / &mask).round_to_integer().unwrap();
        assert_eq!(back, n);
        assert!(dist.log10_abs() < -70.0);
    }

    #[test]
    fn oversized_message_is_rejected() {
        let prec = Precision::new(100, 30, 10).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(33);
        let (_, params) = keygen(None, 10, prec, &mut rng).unwrap();
        let n = Integer::from(10).pow(29u32);
        assert_eq!(
            elgamal_encrypt(&params, &n, &mut rng).unwrap_err(),
            ProtocolError::MessageTooLarge {
                digits: 30,
                limit: 28
            }
        );
        let n = Integer::from(10).pow(27u32);
        assert!(elgamal_encrypt(&params, &n, &mut rng).is_ok());
        assert!(elgamal_encrypt(&params, &Integer::new(), &mut rng).is_err());
    }

    #[test]
    fn wrong_secret_fails_tolerance() {
        let prec = Precision::new(120, 60, 10).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(34);
        let (s, params) = keygen(None, 10, prec, &mut rng).unwrap();
        let ct = elgamal_encrypt(&params, &Integer::from(10).pow(40u32), &mut rng).unwrap();
        let wrong =
            SecretKey::new(Degree::new(s.index().as_integer().clone() + 1u32).unwrap()).unwrap();
        assert!(matches!(
            elgamal_decrypt(&wrong, &ct),
            Err(ProtocolError::DecryptOutOfTolerance(_))
        ));
    }

    #[test]
    fn rendered_ciphertext_survives_parsing() {
        let prec = Precision::new(200, 80, 30).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(35);
        let (s, params) = keygen(None, 30, prec, &mut rng).unwrap();
        let n: Integer = "31415926535897932384626433832795".parse().unwrap();
        let ct = elgamal_encrypt(&params, &n, &mut rng).unwrap();
        let [q, r] = ct.render(200);
        let back = Ciphertext::parse(&q, &r, 200).unwrap();
        assert_eq!(elgamal_decrypt(&s, &back).unwrap(), n);
    }
}
