//! Extended-precision scalars and rounding to IEEE target formats.
//!
//! [`BigReal`] wraps an MPFR float. Every operation rounds to nearest at the
//! larger of the operand precisions, so results are deterministic for a fixed
//! precision. Exact small constants (`zero`, `one`, small integers) carry a
//! low precision and never degrade a full-precision operand they meet.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Smallest supported decimal precision.
pub const MIN_DIGITS: u32 = 16;

/// Mantissa bits needed to carry `ndigits` significant decimal digits.
pub fn digits_to_bits(ndigits: u32) -> u32 {
    (f64::from(ndigits) * std::f64::consts::LOG2_10).ceil() as u32
}

/// Real scalar at a configurable binary precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(Float);

pub type BigComplex = Complex<BigReal>;

impl BigReal {
    pub fn from_float(f: Float) -> Self {
        BigReal(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn zero_with(bits: u32) -> Self {
        BigReal(Float::new(bits))
    }

    pub fn from_f64(v: f64, bits: u32) -> Self {
        BigReal(Float::with_val(bits.max(53), v))
    }

    pub fn from_i64(v: i64, bits: u32) -> Self {
        BigReal(Float::with_val(bits.max(64), v))
    }

    /// Correctly rounded `num/den`.
    pub fn from_ratio(num: i64, den: i64, bits: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse(format!("{num}/0: zero denominator")));
        }
        let r = Rational::from((num, den));
        Ok(BigReal(Float::with_val(bits, &r)))
    }

    pub fn from_rational(r: &Rational, bits: u32) -> Self {
        BigReal(Float::with_val(bits, r))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Same value rounded (or exactly widened) to `bits`.
    pub fn with_prec(&self, bits: u32) -> Self {
        BigReal(Float::with_val(bits, &self.0))
    }

    pub fn is_zero_value(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        BigReal(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Self {
        BigReal(self.0.clone().exp())
    }

    pub fn ln(&self) -> Self {
        BigReal(self.0.clone().ln())
    }

    pub fn powi(&self, n: i32) -> Self {
        BigReal(Float::with_val(self.prec(), (&self.0).pow(n)))
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i32) -> Self {
        let mut f = self.0.clone();
        f <<= k;
        BigReal(f)
    }

    /// Binary exponent `e` with `|x| in [2^(e-1), 2^e)`; `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Maximum of two values, keeping the larger precision.
    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Decimal scientific string with `ndigits` significant digits.
    pub fn to_decimal(&self, ndigits: u32) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        self.0.to_string_radix(10, Some(ndigits as usize))
    }

    fn binop(self, rhs: Self, f: impl FnOnce(&mut Float, &Float)) -> Self {
        let prec = self.0.prec().max(rhs.0.prec());
        let mut x = self.0;
        if x.prec() < prec {
            x.set_prec(prec);
        }
        f(&mut x, &rhs.0);
        BigReal(x)
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(20)))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for BigReal {
    type Output = BigReal;
    fn add(self, rhs: BigReal) -> BigReal {
        self.binop(rhs, |a, b| *a += b)
    }
}

impl Sub for BigReal {
    type Output = BigReal;
    fn sub(self, rhs: BigReal) -> BigReal {
        self.binop(rhs, |a, b| *a -= b)
    }
}

impl Mul for BigReal {
    type Output = BigReal;
    fn mul(self, rhs: BigReal) -> BigReal {
        self.binop(rhs, |a, b| *a *= b)
    }
}

impl Div for BigReal {
    type Output = BigReal;
    fn div(self, rhs: BigReal) -> BigReal {
        self.binop(rhs, |a, b| *a /= b)
    }
}

impl Rem for BigReal {
    type Output = BigReal;
    fn rem(self, rhs: BigReal) -> BigReal {
        self.binop(rhs, |a, b| *a %= b)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl<'a> Add<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn add(self, rhs: &BigReal) -> BigReal {
        BigReal(Float::with_val(self.prec().max(rhs.prec()), &self.0 + &rhs.0))
    }
}

impl<'a> Sub<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn sub(self, rhs: &BigReal) -> BigReal {
        BigReal(Float::with_val(self.prec().max(rhs.prec()), &self.0 - &rhs.0))
    }
}

impl<'a> Mul<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn mul(self, rhs: &BigReal) -> BigReal {
        BigReal(Float::with_val(self.prec().max(rhs.prec()), &self.0 * &rhs.0))
    }
}

impl<'a> Div<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn div(self, rhs: &BigReal) -> BigReal {
        BigReal(Float::with_val(self.prec().max(rhs.prec()), &self.0 / &rhs.0))
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal(Float::new(1))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal(Float::with_val(1, 1))
    }
}

impl Num for BigReal {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self> {
        let parsed = Float::parse_radix(s, radix as i32)
            .map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        Ok(BigReal(Float::with_val(128, parsed)))
    }
}

/// Scalar operations shared by `f32`, `f64` and [`BigReal`], so that matrix
/// kernels, polynomial arithmetic and the Newton machinery are written once.
pub trait Real:
    Clone + fmt::Debug + PartialOrd + Send + Sync + Num + Neg<Output = Self>
{
    /// `v` carried at the precision of `self`.
    fn constant(&self, v: f64) -> Self;
    fn abs(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Unit roundoff of the precision `self` is carried at.
    fn unit_roundoff(&self) -> f64;
}

impl Real for f64 {
    fn constant(&self, v: f64) -> Self {
        v
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn unit_roundoff(&self) -> f64 {
        f64::EPSILON / 2.0
    }
}

impl Real for f32 {
    fn constant(&self, v: f64) -> Self {
        v as f32
    }
    fn abs(&self) -> Self {
        f32::abs(*self)
    }
    fn sqrt(&self) -> Self {
        f32::sqrt(*self)
    }
    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
    fn unit_roundoff(&self) -> f64 {
        f64::from(f32::EPSILON) / 2.0
    }
}

impl Real for BigReal {
    fn constant(&self, v: f64) -> Self {
        BigReal::from_f64(v, self.prec())
    }
    fn abs(&self) -> Self {
        BigReal::abs(self)
    }
    fn sqrt(&self) -> Self {
        BigReal::sqrt(self)
    }
    fn to_f64(&self) -> f64 {
        BigReal::to_f64(self)
    }
    fn unit_roundoff(&self) -> f64 {
        2f64.powi(-(self.prec() as i32))
    }
}

/// `|z|` without intermediate overflow concerns at extended precision.
pub fn cabs<T: Real>(z: &Complex<T>) -> T {
    (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt()
}

/// Principal square root.
pub fn csqrt<T: Real>(z: &Complex<T>) -> Complex<T> {
    let r = cabs(z);
    if r.is_zero() {
        return Complex::new(r.clone(), r);
    }
    let half = r.constant(0.5);
    let re = ((r.clone() + z.re.clone()) * half.clone()).sqrt();
    let mut im = ((r - z.re.clone()) * half).sqrt();
    if z.im < z.im.constant(0.0) {
        im = -im;
    }
    Complex::new(re, im)
}

/// Parse a decimal literal (`"0.1"`, `"-2.5e-3"`) or an integer ratio
/// (`"1/40320"`), correctly rounded to `ndigits` decimal digits.
pub fn parse_number(text: &str, ndigits: u32) -> Result<BigReal> {
    parse_number_bits(text, digits_to_bits(ndigits))
}

/// [`parse_number`] rounded to `bits` instead of a digit count.
pub fn parse_number_bits(text: &str, bits: u32) -> Result<BigReal> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = t.split_once('/') {
        let parse_int = |x: &str| {
            x.trim()
                .parse::<Integer>()
                .map_err(|_| Error::Parse(format!("malformed ratio {t:?}")))
        };
        let (p, q) = (parse_int(p)?, parse_int(q)?);
        if q.is_zero() {
            return Err(Error::Parse(format!("{t}: zero denominator")));
        }
        return Ok(BigReal::from_rational(&Rational::from((p, q)), bits));
    }
    if !t
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
    {
        return Err(Error::Parse(format!("malformed number {t:?}")));
    }
    let parsed = Float::parse(t).map_err(|_| Error::Parse(format!("malformed number {t:?}")))?;
    let f = Float::with_val(bits, parsed);
    if !f.is_finite() {
        return Err(Error::Parse(format!("non-finite number {t:?}")));
    }
    Ok(BigReal(f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Single,
    Double,
}

/// IEEE target format and its unit roundoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionTarget {
    pub kind: TargetKind,
    pub u: f64,
}

impl PrecisionTarget {
    pub const SINGLE: PrecisionTarget = PrecisionTarget { kind: TargetKind::Single, u: 5.960464477539063e-8 };
    pub const DOUBLE: PrecisionTarget = PrecisionTarget { kind: TargetKind::Double, u: 1.1102230246251565e-16 };

    pub fn new(kind: TargetKind) -> Self {
        match kind {
            TargetKind::Single => Self::SINGLE,
            TargetKind::Double => Self::DOUBLE,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "single" => Ok(Self::SINGLE),
            "double" => Ok(Self::DOUBLE),
            other => Err(Error::InvalidPrecision(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            TargetKind::Single => "single",
            TargetKind::Double => "double",
        }
    }

    /// Table default for the extended working precision.
    pub fn default_digits(&self) -> u32 {
        match self.kind {
            TargetKind::Single => 16,
            TargetKind::Double => 32,
        }
    }

    fn format(&self) -> (u32, i32) {
        match self.kind {
            TargetKind::Single => (24, -126),
            TargetKind::Double => (53, -1022),
        }
    }
}

/// Round to the nearest value of the target format (ties to even). Single
/// results are returned widened to `f64`, which is exact.
pub fn round_to_target(x: &BigReal, target: PrecisionTarget) -> Result<f64> {
    let (mant, emin) = target.format();
    let f = &x.0;
    if f.is_nan() || f.is_infinite() {
        return Err(Error::RoundingOverflow(format!("{f}")));
    }
    if f.is_zero() {
        return Ok(if f.is_sign_negative() { -0.0 } else { 0.0 });
    }
    let exp = f.get_exp().expect("nonzero finite");
    let max = match target.kind {
        TargetKind::Single => f64::from(f32::MAX),
        TargetKind::Double => f64::MAX,
    };
    let value = if exp > emin {
        let (r, _) = Float::with_val_round(mant, f, Round::Nearest);
        r.to_f64()
    } else {
        // subnormal range: round to an integer multiple of the smallest quantum
        let shift = mant as i32 - 1 - emin;
        let mut scaled = Float::with_val(f.prec().max(64), f);
        scaled <<= shift;
        let k = scaled.round_even().to_f64();
        k * 2f64.powi(-shift / 2) * 2f64.powi(-(shift - shift / 2))
    };
    if !value.is_finite() || value.abs() > max {
        return Err(Error::RoundingOverflow(x.to_decimal(20)));
    }
    Ok(value)
}

/// Target floats used by the evaluators.
pub trait TargetFloat: Real + Copy + fmt::LowerExp {
    const TARGET: PrecisionTarget;
    fn from_f64_exact(v: f64) -> Self;
    fn round_from(x: &BigReal) -> Result<Self> {
        round_to_target(x, Self::TARGET).map(Self::from_f64_exact)
    }
}

impl TargetFloat for f64 {
    const TARGET: PrecisionTarget = PrecisionTarget::DOUBLE;
    fn from_f64_exact(v: f64) -> Self {
        v
    }
}

impl TargetFloat for f32 {
    const TARGET: PrecisionTarget = PrecisionTarget::SINGLE;
    fn from_f64_exact(v: f64) -> Self {
        v as f32
    }
}

/// C99-style hexadecimal float (`0x1.8p-1`), exact for every finite `f64`.
pub fn to_hex_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if biased == 0 && frac == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if biased == 0 { (0, -1022) } else { (1, biased - 1023) };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let esign = if exp < 0 { '-' } else { '+' };
    if digits.is_empty() {
        format!("{sign}0x{lead}p{esign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{digits}p{esign}{}", exp.abs())
    }
}

/// Inverse of [`to_hex_float`]; accepts any hex float whose value is exact in `f64`.
pub fn parse_hex_float(text: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("malformed hex float {text:?}"));
    let t = text.trim();
    match t {
        "inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let (neg, rest) = match t.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X")).ok_or_else(bad)?;
    let (mant, exp) = rest.split_once(['p', 'P']).ok_or_else(bad)?;
    let exp: i32 = exp.parse().map_err(|_| bad())?;
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() || frac_part.len() > 13 {
        return Err(bad());
    }
    let ip = u64::from_str_radix(int_part, 16).map_err(|_| bad())?;
    let fp = if frac_part.is_empty() {
        0
    } else {
        u64::from_str_radix(frac_part, 16).map_err(|_| bad())? << (4 * (13 - frac_part.len()))
    };
    if ip > 0xf {
        return Err(bad());
    }
    // value = (ip * 2^52 + fp) * 2^(exp - 52), assembled exactly via MPFR
    let m = Float::with_val(64, ip) * Float::with_val(64, 1u64 << 52) + Float::with_val(64, fp);
    let mut m = Float::with_val(64, m);
    m <<= exp - 52;
    let out = BigReal(m);
    let v = round_to_target(&out, PrecisionTarget::DOUBLE)?;
    if Float::with_val(64, v) != out.0 {
        return Err(bad());
    }
    Ok(if neg { -v } else { v })
}

/// Total order used for canonical sorting of rounded values.
pub fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}
