//! Scalar backends: exact rationals and tolerance-parameterized floats.
//!
//! Every sign decision in the geometry kernel goes through [`Scalar::sign`].
//! The rational backend decides signs exactly; the float backend treats
//! `|x| <= tol` as zero, where `tol` travels with each value (combining as
//! the max of the operands' tolerances, with exact constants carrying zero).

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

thread_local! {
    static AMBIENT_TOL: std::cell::Cell<f64> = const { std::cell::Cell::new(DEFAULT_TOL) };
}

/// Set the zero-test tolerance attached to newly parsed float values on
/// this thread (scenario inputs); existing values keep theirs.
pub fn set_ambient_tol(tol: f64) {
    AMBIENT_TOL.with(|t| t.set(tol));
}

pub fn ambient_tol() -> f64 {
    AMBIENT_TOL.with(|t| t.get())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Rational,
    Float64,
}

impl Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => write!(f, "rational"),
            Backend::Float64 => write!(f, "f64"),
        }
    }
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn ratio(num: i64, den: i64) -> Self;

    fn sign(&self) -> Sign;
    fn to_f64(&self) -> f64;
    fn recip(&self) -> Self;

    /// Parse from the text forms used in model and scenario files.
    fn parse(text: &str) -> Result<Self>;
    /// Canonical text form; rationals render as `p/q`.
    fn repr(&self) -> String;

    /// Rescale a ray representative to canonical form in place.
    /// Rational: primitive integer vector. Float: max-norm one.
    fn canonicalize_ray(v: &mut [Self]);

    fn add_assign_mul(&mut self, a: &Self, b: &Self);
    fn sub_assign_mul(&mut self, a: &Self, b: &Self);

    fn is_zero(&self) -> bool {
        self.sign() == Sign::Zero
    }
    fn is_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }
    fn is_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    /// Heuristic magnitude used only for pivot selection; exactness is
    /// never decided by this value.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

fn parse_decimal_as_rational(text: &str) -> Option<BigRational> {
    let (int_part, frac_part) = text.split_once('.')?;
    let digits: String = format!("{}{}", int_part.trim_start_matches('-'), frac_part);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = digits.parse().ok()?;
    let numer = if int_part.starts_with('-') { -numer } else { numer };
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(BigRational::new(numer, denom))
}

impl Scalar for BigRational {
    const BACKEND: Backend = Backend::Rational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn sign(&self) -> Sign {
        if Zero::is_zero(self) {
            Sign::Zero
        } else if Signed::is_positive(self) {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn recip(&self) -> Self {
        BigRational::recip(self)
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let n: BigInt = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational: {text}")))?;
            let d: BigInt = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational: {text}")))?;
            if Zero::is_zero(&d) {
                return Err(Error::Parse(format!("zero denominator: {text}")));
            }
            return Ok(BigRational::new(n, d));
        }
        if let Ok(n) = text.parse::<BigInt>() {
            return Ok(BigRational::from_integer(n));
        }
        parse_decimal_as_rational(text)
            .ok_or_else(|| Error::Parse(format!("bad rational: {text}")))
    }

    fn repr(&self) -> String {
        if num_traits::One::is_one(self.denom()) {
            format!("{}", self.numer())
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn canonicalize_ray(v: &mut [Self]) {
        if v.iter().all(|x| Zero::is_zero(x)) {
            return;
        }
        let mut lcm = BigInt::one();
        for x in v.iter() {
            lcm = lcm.lcm(x.denom());
        }
        let mut gcd = BigInt::zero();
        let scaled: Vec<BigInt> = v
            .iter()
            .map(|x| x.numer() * (&lcm / x.denom()))
            .collect();
        for n in &scaled {
            gcd = gcd.gcd(n);
        }
        for (slot, n) in v.iter_mut().zip(scaled) {
            *slot = BigRational::from_integer(n / &gcd);
        }
    }

    fn add_assign_mul(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn sub_assign_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

/// Float backend value: an `f64` together with the zero-test tolerance it
/// was built with. Arithmetic propagates the larger tolerance; constants
/// carry tolerance zero so they never loosen a computation.
#[derive(Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub tol: f64,
}

impl Approx {
    pub fn new(value: f64) -> Self {
        Approx {
            value,
            tol: ambient_tol(),
        }
    }
    pub fn with_tol(value: f64, tol: f64) -> Self {
        Approx { value, tol }
    }
    fn join(self, other: Self, value: f64) -> Self {
        Approx {
            value,
            tol: self.tol.max(other.tol),
        }
    }
}

impl Debug for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.value)
    }
}

impl Display for Approx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.value)
    }
}

impl Add for Approx {
    type Output = Approx;
    fn add(self, rhs: Approx) -> Approx {
        self.join(rhs, self.value + rhs.value)
    }
}
impl Sub for Approx {
    type Output = Approx;
    fn sub(self, rhs: Approx) -> Approx {
        self.join(rhs, self.value - rhs.value)
    }
}
impl Mul for Approx {
    type Output = Approx;
    fn mul(self, rhs: Approx) -> Approx {
        self.join(rhs, self.value * rhs.value)
    }
}
impl Div for Approx {
    type Output = Approx;
    fn div(self, rhs: Approx) -> Approx {
        self.join(rhs, self.value / rhs.value)
    }
}
impl Neg for Approx {
    type Output = Approx;
    fn neg(self) -> Approx {
        Approx {
            value: -self.value,
            tol: self.tol,
        }
    }
}

impl Scalar for Approx {
    const BACKEND: Backend = Backend::Float64;

    fn zero() -> Self {
        Approx { value: 0.0, tol: 0.0 }
    }
    fn one() -> Self {
        Approx { value: 1.0, tol: 0.0 }
    }
    fn from_int(n: i64) -> Self {
        Approx {
            value: n as f64,
            tol: 0.0,
        }
    }
    fn ratio(num: i64, den: i64) -> Self {
        Approx {
            value: num as f64 / den as f64,
            tol: 0.0,
        }
    }

    fn sign(&self) -> Sign {
        let tol = if self.tol > 0.0 { self.tol } else { ambient_tol() };
        if self.value.abs() <= tol {
            Sign::Zero
        } else if self.value > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn to_f64(&self) -> f64 {
        self.value
    }

    fn recip(&self) -> Self {
        Approx {
            value: 1.0 / self.value,
            tol: self.tol,
        }
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let n: f64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number: {text}")))?;
            let d: f64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number: {text}")))?;
            return Ok(Approx::new(n / d));
        }
        let v: f64 = text
            .parse()
            .map_err(|_| Error::Parse(format!("bad number: {text}")))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("non-finite number: {text}")));
        }
        Ok(Approx::new(v))
    }

    fn repr(&self) -> String {
        format!("{:?}", self.value)
    }

    fn canonicalize_ray(v: &mut [Self]) {
        let max = v
            .iter()
            .map(|x| x.value.abs())
            .fold(0.0f64, f64::max);
        if max == 0.0 {
            return;
        }
        for x in v.iter_mut() {
            x.value /= max;
        }
    }

    fn add_assign_mul(&mut self, a: &Self, b: &Self) {
        self.value += a.value * b.value;
        self.tol = self.tol.max(a.tol).max(b.tol);
    }
    fn sub_assign_mul(&mut self, a: &Self, b: &Self) {
        self.value -= a.value * b.value;
        self.tol = self.tol.max(a.tol).max(b.tol);
    }
}
