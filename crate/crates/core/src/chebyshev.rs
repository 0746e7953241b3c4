//! Evaluation of Chebyshev polynomials of the first kind, `T_n(x)`, over
//! [`Real`]s.
//!
//! Four engines compute the same value:
//!
//! * [`eval_recurrence`]: the three-term recurrence `T_{k+1} = 2x T_k - T_{k-1}`,
//!   linear in `n`.
//! * [`eval_trig`]: `cos(n * arccos x)` on `[-1, 1]`.
//! * [`eval_matrix`]: square-and-multiply on the generator `[[0, 1], [-1, 2x]]`,
//!   whose `n`-th power maps `(T_0, T_1)` to `(T_n, T_{n+1})`.
//! * [`eval_cayley`]: the same binary power carried out on linear residues
//!   `a*L + b` modulo the characteristic polynomial `L^2 - 2x L + 1`.
//!
//! The counting engines report the ring multiplications and additions they
//! performed so the per-bit costs can be compared.

use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use rand::RngCore;
use rug::{Assign, Float, Integer};
use thiserror::Error;

use crate::bigreal::{Real, RealError};
use crate::sampling;

/// Largest degree the recurrence engine accepts (exclusive).
pub const RECURRENCE_LIMIT: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChebError {
    #[error("degree {0} exceeds the recurrence engine limit of 2^32")]
    DegreeTooLarge(String),
    #[error("polynomial degree must be nonnegative, got {0}")]
    NegativeDegree(String),
    #[error(transparent)]
    Real(#[from] RealError),
}

/// Polynomial degree; in the protocols this is a party's secret index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Degree(Integer);

impl Degree {
    pub fn new(n: Integer) -> Result<Degree, ChebError> {
        if n < 0 {
            Err(ChebError::NegativeDegree(n.to_string()))
        } else {
            Ok(Degree(n))
        }
    }

    pub fn from_u64(n: u64) -> Degree {
        Degree(Integer::from(n))
    }

    /// Uniform degree with exactly `digits` decimal digits.
    pub fn random_with_digits(digits: u32, rng: &mut dyn RngCore) -> Degree {
        Degree(sampling::with_decimal_digits(digits, rng))
    }

    pub fn as_integer(&self) -> &Integer {
        &self.0
    }

    pub fn into_integer(self) -> Integer {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    pub fn bit_len(&self) -> u32 {
        self.0.significant_bits()
    }

    /// Number of decimal digits (1 for zero).
    pub fn decimal_digits(&self) -> u32 {
        self.0.to_string().len() as u32
    }

    pub fn product<'a, I: IntoIterator<Item = &'a Degree>>(factors: I) -> Degree {
        let mut acc = Integer::from(1);
        for f in factors {
            acc *= &f.0;
        }
        Degree(acc)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Degree {
    type Err = ChebError;
    fn from_str(s: &str) -> Result<Degree, ChebError> {
        let n =
            Integer::from_str(s.trim()).map_err(|_| ChebError::NegativeDegree(s.to_string()))?;
        Degree::new(n)
    }
}

impl From<u64> for Degree {
    fn from(n: u64) -> Degree {
        Degree::from_u64(n)
    }
}

/// Ring operation counters for one evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub muls: u64,
    pub adds: u64,
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        self.muls += rhs.muls;
        self.adds += rhs.adds;
    }
}

/// 2x2 matrix of reals sharing one precision.
#[derive(Clone, Debug)]
pub struct Mat2 {
    pub a11: Real,
    pub a12: Real,
    pub a21: Real,
    pub a22: Real,
}

impl Mat2 {
    pub fn identity(digits: u32) -> Result<Mat2, RealError> {
        let (zero, one) = (Real::zero(digits)?, Real::one(digits)?);
        Ok(Mat2 {
            a11: one.clone(),
            a12: zero.clone(),
            a21: zero,
            a22: one,
        })
    }

    /// The generator `[[0, 1], [-1, 2x]]` given `2x`.
    pub fn generator(two_x: &Real) -> Result<Mat2, RealError> {
        let d = two_x.digits();
        Ok(Mat2 {
            a11: Real::zero(d)?,
            a12: Real::one(d)?,
            a21: Real::from_i64(-1, d)?,
            a22: two_x.clone(),
        })
    }

    /// Schoolbook product: 8 multiplications, 4 additions.
    pub fn mul_counted(&self, rhs: &Mat2, ops: &mut OpCount) -> Mat2 {
        ops.muls += 8;
        ops.adds += 4;
        Mat2 {
            a11: &self.a11 * &rhs.a11 + &self.a12 * &rhs.a21,
            a12: &self.a11 * &rhs.a12 + &self.a12 * &rhs.a22,
            a21: &self.a21 * &rhs.a11 + &self.a22 * &rhs.a21,
            a22: &self.a21 * &rhs.a12 + &self.a22 * &rhs.a22,
        }
    }
}

/// Residue `a*L + b` of a power of `L` modulo `L^2 - 2x L + 1`.
#[derive(Clone, Debug)]
pub struct LinPoly {
    pub a: Real,
    pub b: Real,
}

impl LinPoly {
    /// `L^0 = 0*L + 1`.
    pub fn one(digits: u32) -> Result<LinPoly, RealError> {
        Ok(LinPoly {
            a: Real::zero(digits)?,
            b: Real::one(digits)?,
        })
    }

    /// `L^1 = 1*L + 0`.
    pub fn lambda(digits: u32) -> Result<LinPoly, RealError> {
        Ok(LinPoly {
            a: Real::one(digits)?,
            b: Real::zero(digits)?,
        })
    }

    /// Product reduced with `L^2 = 2x L - 1`: 5 multiplications, 3 additions.
    pub fn mul_mod(&self, rhs: &LinPoly, two_x: &Real, ops: &mut OpCount) -> LinPoly {
        ops.muls += 5;
        ops.adds += 3;
        let aa = &self.a * &rhs.a;
        LinPoly {
            a: &aa * two_x + &self.a * &rhs.b + &rhs.a * &self.b,
            b: &self.b * &rhs.b - &aa,
        }
    }
}

/// Engine selector for [`eval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    Recurrence,
    Trig,
    Matrix,
    Cayley,
}

impl Engine {
    pub const ALL: [Engine; 4] = [
        Engine::Recurrence,
        Engine::Trig,
        Engine::Matrix,
        Engine::Cayley,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Recurrence => "recurrence",
            Engine::Trig => "trig",
            Engine::Matrix => "matrix",
            Engine::Cayley => "cayley",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Engine, String> {
        match s.to_ascii_lowercase().as_str() {
            "recurrence" | "convolution" => Ok(Engine::Recurrence),
            "trig" | "cos" => Ok(Engine::Trig),
            "matrix" => Ok(Engine::Matrix),
            "cayley" | "cayley-hamilton" => Ok(Engine::Cayley),
            other => Err(format!("unknown engine {other:?}")),
        }
    }
}

/// `T_n(x)` by the three-term recurrence. Each step is counted as two
/// multiplications (`x * T_k`, then doubling) and one subtraction.
pub fn eval_recurrence(x: &Real, n: &Degree) -> Result<(Real, OpCount), ChebError> {
    let steps = n
        .as_integer()
        .to_u64()
        .filter(|v| *v < RECURRENCE_LIMIT)
        .ok_or_else(|| ChebError::DegreeTooLarge(n.to_string()))?;
    let mut ops = OpCount::default();
    let d = x.digits();
    if steps == 0 {
        return Ok((Real::one(d)?, ops));
    }
    let two = Real::from_i64(2, d)?;
    let mut prev = Real::one(d)?;
    let mut cur = x.clone();
    for _ in 1..steps {
        let next = &(&(x * &cur) * &two) - &prev;
        ops.muls += 2;
        ops.adds += 1;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok((cur, ops))
}

/// `T_n(x) = cos(n * arccos x)` for `x` in `[-1, 1]`. The degree multiplies
/// the angle as an exact integer, rounded once.
pub fn eval_trig(x: &Real, n: &Degree) -> Result<Real, ChebError> {
    let theta = x.arccos()?;
    Ok(theta.mul_integer(n.as_integer()).cos())
}

/// In-place 2x2 kernel over raw floats, row-major. Performs the same
/// roundings in the same order as [`Mat2::mul_counted`].
struct MatKernel {
    prec: u32,
    t0: Float,
    t1: Float,
    out: [Float; 4],
}

impl MatKernel {
    fn new(prec: u32) -> MatKernel {
        MatKernel {
            prec,
            t0: Float::new(prec),
            t1: Float::new(prec),
            out: std::array::from_fn(|_| Float::new(prec)),
        }
    }

    /// `out = l * r`; the caller swaps `out` into place.
    fn mul(&mut self, l: &[Float; 4], r: &[Float; 4], ops: &mut OpCount) {
        for (row, col, slot) in [(0, 0, 0), (0, 1, 1), (2, 0, 2), (2, 1, 3)] {
            self.t0.assign(&l[row] * &r[col]);
            self.t1.assign(&l[row + 1] * &r[col + 2]);
            self.out[slot].assign(&self.t0 + &self.t1);
        }
        ops.muls += 8;
        ops.adds += 4;
    }

    fn load(&self, m: &Mat2) -> [Float; 4] {
        [&m.a11, &m.a12, &m.a21, &m.a22].map(|v| Float::with_val(self.prec, v.as_float()))
    }
}

/// `T_n(x)` from the `n`-th power of the generator matrix by binary
/// exponentiation, then `T_n = R11 * T_0 + R12 * T_1`.
pub fn eval_matrix(x: &Real, n: &Degree) -> Result<(Real, OpCount), ChebError> {
    let mut ops = OpCount::default();
    let d = x.digits();
    let two_x = x + x;
    ops.adds += 1;

    let mut kernel = MatKernel::new(x.precision_bits());
    let mut result = kernel.load(&Mat2::identity(d)?);
    let mut base = kernel.load(&Mat2::generator(&two_x)?);
    let mut e = n.as_integer().clone();
    while e != 0 {
        if e.is_odd() {
            kernel.mul(&result, &base, &mut ops);
            std::mem::swap(&mut kernel.out, &mut result);
        }
        e >>= 1;
        // the final squaring would be discarded
        if e == 0 {
            break;
        }
        kernel.mul(&base, &base, &mut ops);
        std::mem::swap(&mut kernel.out, &mut base);
    }

    ops.muls += 1;
    ops.adds += 1;
    let [r11, r12, _, _] = result;
    let tail = Float::with_val(x.precision_bits(), &r12 * x.as_float());
    let value = Float::with_val(x.precision_bits(), &r11 + &tail);
    Ok((Real::from_float(value, d), ops))
}

/// Reference version of [`eval_matrix`] built on [`Mat2::mul_counted`].
pub fn eval_matrix_reference(x: &Real, n: &Degree) -> Result<(Real, OpCount), ChebError> {
    let mut ops = OpCount::default();
    let d = x.digits();
    let two_x = x + x;
    ops.adds += 1;

    let mut result = Mat2::identity(d)?;
    let mut base = Mat2::generator(&two_x)?;
    let mut e = n.as_integer().clone();
    while e != 0 {
        if e.is_odd() {
            result = result.mul_counted(&base, &mut ops);
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.mul_counted(&base, &mut ops);
    }

    ops.muls += 1;
    ops.adds += 1;
    Ok((&result.a11 + &(&result.a12 * x), ops))
}

/// `T_n(x)` from `L^n = a L + b` modulo the characteristic polynomial. Since
/// `A^n = a A + b I` and the first row of `A` is `(0, 1)`, `T_n = b + a x`.
pub fn eval_cayley(x: &Real, n: &Degree) -> Result<(Real, OpCount), ChebError> {
    let mut ops = OpCount::default();
    let d = x.digits();
    let two_x = x + x;
    ops.adds += 1;

    let mut result = LinPoly::one(d)?;
    let mut base = LinPoly::lambda(d)?;
    let mut e = n.as_integer().clone();
    while e != 0 {
        if e.is_odd() {
            result = result.mul_mod(&base, &two_x, &mut ops);
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.mul_mod(&base, &two_x, &mut ops);
    }

    ops.muls += 1;
    ops.adds += 1;
    Ok((&result.b + &(&result.a * x), ops))
}

/// Dispatches to one engine and returns its operation count. The trig engine
/// reports the single angle multiplication and no additions; its
/// transcendental calls are not counted.
pub fn eval_counted(x: &Real, n: &Degree, engine: Engine) -> Result<(Real, OpCount), ChebError> {
    match engine {
        Engine::Recurrence => eval_recurrence(x, n),
        Engine::Trig => eval_trig(x, n).map(|v| (v, OpCount { muls: 1, adds: 0 })),
        Engine::Matrix => eval_matrix(x, n),
        Engine::Cayley => eval_cayley(x, n),
    }
}

pub fn eval(x: &Real, n: &Degree, engine: Engine) -> Result<Real, ChebError> {
    eval_counted(x, n, engine).map(|(v, _)| v)
}
