//! Closed-form resource estimates for quantum attacks: Shor on RSA and a
//! Grover search over Chebyshev indices with fixed-point registers.
//!
//! All quantities are exact integers; [`sci`] renders them with a fixed
//! number of significant digits as `m.mm·10ᵉ`.

use rug::ops::Pow;
use rug::Integer;
use thiserror::Error;

/// Smallest register width accepted by the estimators.
pub const MIN_BITS: u32 = 8;

/// Physical qubits needed for 2048-bit RSA once error correction is added.
pub const RSA_QUBITS_WITH_CORRECTION: u64 = 15_000;

/// How far today's devices are below [`RSA_QUBITS_WITH_CORRECTION`].
pub const RSA_TECHNOLOGY_GAP: u64 = 1_500;

/// Fixed-point widening of each register (n integer bits, 3n fraction bits).
pub const FIXED_POINT_WIDENING: u64 = 4;
/// Registers kept live: 1 exponent + 4 matrix + 2 temporary + 8 products.
pub const REGISTERS: u64 = 1 + 4 + 2 + 8;
/// Average conditional 2x2 multiplications per exponent bit.
pub const CMUL2_PER_CYCLE: u64 = 12;
/// Elementary operations per CMUL2 in units of (register width)^3.
pub const CMUL2_CUBIC_COST: u64 = 90;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QcError {
    #[error("register width of {0} bits is below the minimum of {MIN_BITS}")]
    TooFewBits(u32),
    #[error("digit count must be positive")]
    ZeroDigits,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceEstimate {
    pub qubits: Integer,
    pub ops_per_try: Integer,
}

fn check_bits(n_bits: u32) -> Result<Integer, QcError> {
    if n_bits < MIN_BITS {
        Err(QcError::TooFewBits(n_bits))
    } else {
        Ok(Integer::from(n_bits))
    }
}

/// Shor's algorithm on an `n`-bit RSA modulus: `3n` qubits, `30 n^4` operations.
pub fn shor_rsa(n_bits: u32) -> Result<ResourceEstimate, QcError> {
    let n = check_bits(n_bits)?;
    Ok(ResourceEstimate {
        qubits: Integer::from(&n * 3u32),
        ops_per_try: Integer::from((&n).pow(4u32)) * 30u32,
    })
}

/// Grover search over an `n`-bit Chebyshev index:
/// qubits `n * 4 * 12 * 15 * (4n)`, operations `n * 4 * 12 * 90 * (4n)^3`.
pub fn grover_tpoly(n_bits: u32) -> Result<ResourceEstimate, QcError> {
    let n = check_bits(n_bits)?;
    let width = Integer::from(&n * FIXED_POINT_WIDENING);
    let cycles = Integer::from(&width * CMUL2_PER_CYCLE);
    Ok(ResourceEstimate {
        qubits: Integer::from(&cycles * REGISTERS) * &width,
        ops_per_try: Integer::from(&cycles * CMUL2_CUBIC_COST) * width.pow(3u32),
    })
}

/// Bits of a `digits`-digit secret under the 2325-bits-per-700-digits rule,
/// rounded up.
pub fn digits_to_bits(digits: u64) -> Result<u64, QcError> {
    if digits == 0 {
        return Err(QcError::ZeroDigits);
    }
    Ok((digits * 2325).div_ceil(700))
}

/// Average classical cost of one matrix-power evaluation:
/// `(12 * bits, 6 * bits)` multiplications and additions.
pub fn matrix_attack_ops(digits: u64) -> Result<(u64, u64), QcError> {
    let bits = digits_to_bits(digits)?;
    Ok((12 * bits, 6 * bits))
}

const SUPERSCRIPT: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn round_significant(value: &Integer, sig: usize) -> (String, usize) {
    assert!(sig >= 1);
    let digits = value.to_string();
    let len = digits.len();
    if len <= sig {
        let padded = format!("{digits:0<sig$}");
        return (padded, len - 1);
    }
    let divisor = Integer::from(10).pow((len - sig) as u32);
    let (mut q, r) = value.clone().div_rem(divisor.clone());
    // half up
    if Integer::from(&r * 2u32) >= divisor {
        q += 1u32;
    }
    let mut mant = q.to_string();
    let mut exp = len - 1;
    if mant.len() > sig {
        mant.truncate(sig);
        exp += 1;
    }
    (mant, exp)
}

fn split_mantissa(mant: &str) -> String {
    if mant.len() == 1 {
        mant.to_string()
    } else {
        format!("{}.{}", &mant[..1], &mant[1..])
    }
}

/// `value` with `sig` significant digits as `m.mm·10ᵉ`, e.g. `"3.02·10⁹"`.
pub fn sci(value: &Integer, sig: usize) -> String {
    let (mant, exp) = round_significant(value, sig);
    let sup: String = exp
        .to_string()
        .bytes()
        .map(|b| SUPERSCRIPT[(b - b'0') as usize])
        .collect();
    format!("{}·10{}", split_mantissa(&mant), sup)
}

/// ASCII form of [`sci`], e.g. `"3.02e9"`.
pub fn sci_ascii(value: &Integer, sig: usize) -> String {
    let (mant, exp) = round_significant(value, sig);
    format!("{}e{}", split_mantissa(&mant), exp)
}

/// One row of the attack comparison table with the significant digits used
/// to display each column.
#[derive(Clone, Debug)]
pub struct AttackRow {
    pub attack: String,
    pub estimate: ResourceEstimate,
    pub qubit_sig: usize,
    pub ops_sig: usize,
}

impl AttackRow {
    pub fn qubits_display(&self) -> String {
        sci(&self.estimate.qubits, self.qubit_sig)
    }

    pub fn ops_display(&self) -> String {
        sci(&self.estimate.ops_per_try, self.ops_sig)
    }
}

/// Shor on `rsa_bits`-bit RSA followed by Grover rows for each width.
pub fn attack_table(rsa_bits: u32, grover_bits: &[u32]) -> Result<Vec<AttackRow>, QcError> {
    let mut rows = vec![AttackRow {
        attack: format!("Shor's algorithm on RSA, n = {rsa_bits} bit"),
        estimate: shor_rsa(rsa_bits)?,
        qubit_sig: 1,
        ops_sig: 2,
    }];
    for &bits in grover_bits {
        rows.push(AttackRow {
            attack: format!("Grover's algorithm on T polynomials, n = {bits} bit"),
            estimate: grover_tpoly(bits)?,
            qubit_sig: 3,
            ops_sig: 3,
        });
    }
    Ok(rows)
}

/// How far a Grover attack sits above corrected RSA-breaking hardware, and
/// the combined distance from currently realized devices.
#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub qubit_factor_over_rsa: f64,
    pub distance_from_today: f64,
}

pub fn qubit_gap(grover_bits: u32) -> Result<GapReport, QcError> {
    let est = grover_tpoly(grover_bits)?;
    let factor = est.qubits.to_f64() / RSA_QUBITS_WITH_CORRECTION as f64;
    Ok(GapReport {
        qubit_factor_over_rsa: factor,
        distance_from_today: factor * RSA_TECHNOLOGY_GAP as f64,
    })
}
