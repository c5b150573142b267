//! The coefficient field.
//!
//! Two backends share one value type: exact Gaussian rationals (the field
//! Q(i), enough for every recursion constant k + m + i*eta*j when eta is
//! rational) and binary floating complex numbers with a per-value precision
//! in bits. Arithmetic never mixes the two; the series layer rejects such
//! combinations with [`Error::Config`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use dashu_float::round::mode::HalfAway;
use dashu_float::FBig;
use dashu_int::ops::UnsignedAbs;
use dashu_int::{IBig, UBig};
use num::bigint::Sign;
use num::{BigInt, BigRational, Complex, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Binary floating point number with a precision carried by the value.
pub type Float = FBig<HalfAway, 2>;
pub type Complex64 = Complex<f64>;
pub type GaussianRational = Complex<BigRational>;

/// Which arithmetic the coefficients live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    #[default]
    Exact,
    Float { bits: u32 },
}

impl Backend {
    pub const DEFAULT_BITS: u32 = 128;

    pub fn float(bits: u32) -> Result<Self> {
        if bits < 24 {
            return Err(Error::Config(format!(
                "float precision must be at least 24 bits, got {bits}"
            )));
        }
        Ok(Backend::Float { bits })
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Backend::Exact)
    }

    pub fn bits(self) -> Option<u32> {
        match self {
            Backend::Exact => None,
            Backend::Float { bits } => Some(bits),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float { .. } => "float",
        }
    }

    /// Common backend of two operands; float precisions combine by maximum.
    pub fn combine(self, other: Backend) -> Result<Backend> {
        match (self, other) {
            (Backend::Exact, Backend::Exact) => Ok(Backend::Exact),
            (Backend::Float { bits: a }, Backend::Float { bits: b }) => {
                Ok(Backend::Float { bits: a.max(b) })
            }
            _ => Err(Error::Config(format!(
                "backend mismatch: {} vs {}",
                self.name(),
                other.name()
            ))),
        }
    }

    /// Threshold below which a float coefficient counts as zero when
    /// normalizing series. 1e-30 at 128 bits, scaled with the precision.
    pub fn zero_tol(self) -> f64 {
        match self {
            Backend::Exact => 0.0,
            Backend::Float { bits } => 2f64.powi(-(bits as i32 - 28)),
        }
    }

    pub fn zero(self) -> ComplexScalar {
        self.int(0)
    }

    pub fn one(self) -> ComplexScalar {
        self.int(1)
    }

    pub fn int(self, v: i64) -> ComplexScalar {
        match self {
            Backend::Exact => ComplexScalar::Exact(Complex::new(
                BigRational::from_integer(BigInt::from(v)),
                BigRational::zero(),
            )),
            Backend::Float { bits } => ComplexScalar::Float(FloatComplex {
                re: int_to_float(&IBig::from(v), bits),
                im: float_zero(bits),
            }),
        }
    }

    pub fn rational(self, q: &BigRational) -> ComplexScalar {
        self.gaussian(&Complex::new(q.clone(), BigRational::zero()))
    }

    pub fn gaussian(self, c: &GaussianRational) -> ComplexScalar {
        match self {
            Backend::Exact => ComplexScalar::Exact(c.clone()),
            Backend::Float { bits } => ComplexScalar::Float(FloatComplex {
                re: rational_to_float(&c.re, bits),
                im: rational_to_float(&c.im, bits),
            }),
        }
    }

    /// Nearest representable value of an `f64` pair. Exact mode converts the
    /// binary value exactly.
    pub fn from_c64(self, z: Complex64) -> Result<ComplexScalar> {
        let re = BigRational::from_float(z.re)
            .ok_or_else(|| Error::Numerical(format!("non-finite value {}", z.re)))?;
        let im = BigRational::from_float(z.im)
            .ok_or_else(|| Error::Numerical(format!("non-finite value {}", z.im)))?;
        Ok(self.gaussian(&Complex::new(re, im)))
    }

    /// Parses a `[re, im]` pair of textual numbers (`"p/q"`, integers or
    /// decimals with optional exponent).
    pub fn parse_pair(self, re: &str, im: &str) -> Result<ComplexScalar> {
        let re = parse_rational(re)?;
        let im = parse_rational(im)?;
        Ok(self.gaussian(&Complex::new(re, im)))
    }

    pub fn parse_real(self, s: &str) -> Result<ComplexScalar> {
        self.parse_pair(s, "0")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloatComplex {
    pub re: Float,
    pub im: Float,
}

/// A complex coefficient in one of the two backends.
#[derive(Clone, Debug, PartialEq)]
pub enum ComplexScalar {
    Exact(GaussianRational),
    Float(FloatComplex),
}

impl ComplexScalar {
    pub fn backend(&self) -> Backend {
        match self {
            ComplexScalar::Exact(_) => Backend::Exact,
            ComplexScalar::Float(f) => Backend::Float {
                bits: f.re.precision().max(f.im.precision()) as u32,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ComplexScalar::Exact(c) => c.is_zero(),
            ComplexScalar::Float(f) => f.re == Float::ZERO && f.im == Float::ZERO,
        }
    }

    /// Exactly zero in exact mode; both parts at most `tol` in float mode.
    pub fn is_negligible(&self, tol: f64) -> bool {
        match self {
            ComplexScalar::Exact(c) => c.is_zero(),
            ComplexScalar::Float(f) => {
                f.re.to_f64().value().abs() <= tol && f.im.to_f64().value().abs() <= tol
            }
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            ComplexScalar::Exact(c) => Complex::new(
                c.re.to_f64().unwrap_or(f64::NAN),
                c.im.to_f64().unwrap_or(f64::NAN),
            ),
            ComplexScalar::Float(f) => Complex::new(f.re.to_f64().value(), f.im.to_f64().value()),
        }
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn as_exact(&self) -> Option<&GaussianRational> {
        match self {
            ComplexScalar::Exact(c) => Some(c),
            ComplexScalar::Float(_) => None,
        }
    }

    /// Real part as an exact rational (exact backend) or float converted
    /// exactly to a dyadic rational.
    pub fn re_rational(&self) -> BigRational {
        match self {
            ComplexScalar::Exact(c) => c.re.clone(),
            ComplexScalar::Float(f) => float_to_rational(&f.re),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            ComplexScalar::Exact(c) => c.im.is_zero(),
            ComplexScalar::Float(f) => f.im == Float::ZERO,
        }
    }

    /// Multiplication by the imaginary unit.
    pub fn mul_i(&self) -> ComplexScalar {
        match self {
            ComplexScalar::Exact(c) => ComplexScalar::Exact(Complex::new(-c.im.clone(), c.re.clone())),
            ComplexScalar::Float(f) => ComplexScalar::Float(FloatComplex {
                re: -f.im.clone(),
                im: f.re.clone(),
            }),
        }
    }

    pub fn mul_int(&self, k: i64) -> ComplexScalar {
        match self {
            ComplexScalar::Exact(c) => {
                let k = BigRational::from_integer(BigInt::from(k));
                ComplexScalar::Exact(Complex::new(&c.re * &k, &c.im * &k))
            }
            ComplexScalar::Float(f) => {
                let k = IBig::from(k);
                ComplexScalar::Float(FloatComplex {
                    re: &f.re * &k,
                    im: &f.im * &k,
                })
            }
        }
    }

    pub fn conj(&self) -> ComplexScalar {
        match self {
            ComplexScalar::Exact(c) => ComplexScalar::Exact(c.conj()),
            ComplexScalar::Float(f) => ComplexScalar::Float(FloatComplex {
                re: f.re.clone(),
                im: -f.im.clone(),
            }),
        }
    }

    /// Division; `None` when the divisor is exactly zero.
    pub fn checked_div(&self, rhs: &ComplexScalar) -> Option<ComplexScalar> {
        if rhs.is_zero() {
            return None;
        }
        Some(match (self, rhs) {
            (ComplexScalar::Exact(a), ComplexScalar::Exact(b)) => ComplexScalar::Exact(a / b),
            (ComplexScalar::Float(a), ComplexScalar::Float(b)) => {
                let den = &b.re * &b.re + &b.im * &b.im;
                let re = (&a.re * &b.re + &a.im * &b.im) / &den;
                let im = (&a.im * &b.re - &a.re * &b.im) / &den;
                ComplexScalar::Float(FloatComplex { re, im })
            }
            _ => mismatch(),
        })
    }

    pub fn inv(&self) -> Option<ComplexScalar> {
        self.backend().one().checked_div(self)
    }

    pub fn pow(&self, e: u32) -> ComplexScalar {
        let mut acc = self.backend().one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Converts into another backend. Float to exact is exact (dyadic).
    pub fn convert(&self, to: Backend) -> ComplexScalar {
        match (self, to) {
            (ComplexScalar::Exact(c), b) => b.gaussian(c),
            (ComplexScalar::Float(f), Backend::Exact) => ComplexScalar::Exact(Complex::new(
                float_to_rational(&f.re),
                float_to_rational(&f.im),
            )),
            (ComplexScalar::Float(f), Backend::Float { bits }) => {
                ComplexScalar::Float(FloatComplex {
                    re: f.re.clone().with_precision(bits as usize).value(),
                    im: f.im.clone().with_precision(bits as usize).value(),
                })
            }
        }
    }

    /// Textual `[re, im]` pair: `p/q` strings in exact mode, decimal strings
    /// carrying enough digits to round-trip in float mode.
    pub fn to_strings(&self) -> [String; 2] {
        match self {
            ComplexScalar::Exact(c) => [c.re.to_string(), c.im.to_string()],
            ComplexScalar::Float(f) => [float_to_decimal(&f.re), float_to_decimal(&f.im)],
        }
    }
}

fn mismatch() -> ! {
    panic!("scalar backend mismatch; series operations must check backends first")
}

macro_rules! binop {
    ($trait:ident, $method:ident, $exact:expr, $float:expr) => {
        impl<'a> $trait<&'a ComplexScalar> for &'a ComplexScalar {
            type Output = ComplexScalar;
            fn $method(self, rhs: &'a ComplexScalar) -> ComplexScalar {
                match (self, rhs) {
                    (ComplexScalar::Exact(a), ComplexScalar::Exact(b)) => {
                        ComplexScalar::Exact($exact(a, b))
                    }
                    (ComplexScalar::Float(a), ComplexScalar::Float(b)) => {
                        ComplexScalar::Float($float(a, b))
                    }
                    _ => mismatch(),
                }
            }
        }
    };
}

binop!(
    Add,
    add,
    |a: &GaussianRational, b: &GaussianRational| a + b,
    |a: &FloatComplex, b: &FloatComplex| FloatComplex {
        re: &a.re + &b.re,
        im: &a.im + &b.im
    }
);
binop!(
    Sub,
    sub,
    |a: &GaussianRational, b: &GaussianRational| a - b,
    |a: &FloatComplex, b: &FloatComplex| FloatComplex {
        re: &a.re - &b.re,
        im: &a.im - &b.im
    }
);
binop!(
    Mul,
    mul,
    |a: &GaussianRational, b: &GaussianRational| a * b,
    |a: &FloatComplex, b: &FloatComplex| FloatComplex {
        re: &a.re * &b.re - &a.im * &b.im,
        im: &a.re * &b.im + &a.im * &b.re
    }
);

impl Neg for &ComplexScalar {
    type Output = ComplexScalar;
    fn neg(self) -> ComplexScalar {
        match self {
            ComplexScalar::Exact(c) => ComplexScalar::Exact(-c.clone()),
            ComplexScalar::Float(f) => ComplexScalar::Float(FloatComplex {
                re: -f.re.clone(),
                im: -f.im.clone(),
            }),
        }
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [re, im] = self.to_strings();
        write!(f, "({re}) + ({im})i")
    }
}

/// Parses `p/q`, a signed integer, or a decimal such as `-1.25e-3`, exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Format(format!("not a number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::Format(format!("zero denominator in {s:?}")));
        }
        return Ok(n / d);
    }
    let (neg, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(p) => (
            &body[..p],
            body[p + 1..].parse::<i32>().map_err(|_| bad())?,
        ),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(numer);
    if scale >= 0 {
        q *= BigRational::from_integer(num::pow(ten, scale as usize));
    } else {
        q /= BigRational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -q } else { q })
}

fn float_zero(bits: u32) -> Float {
    Float::ZERO.with_precision(bits as usize).value()
}

fn int_to_float(v: &IBig, bits: u32) -> Float {
    Float::from(v.clone()).with_precision(bits as usize).value()
}

fn bigint_to_ibig(b: &BigInt) -> IBig {
    let (sign, bytes) = b.to_bytes_le();
    let mag = IBig::from(UBig::from_le_bytes(&bytes));
    if sign == Sign::Minus {
        -mag
    } else {
        mag
    }
}

fn ibig_to_bigint(v: &IBig) -> BigInt {
    let sign = if *v < IBig::ZERO { Sign::Minus } else { Sign::Plus };
    let mag = v.unsigned_abs().to_le_bytes();
    BigInt::from_bytes_le(sign, &mag)
}

pub(crate) fn rational_to_float(q: &BigRational, bits: u32) -> Float {
    if q.is_zero() {
        return float_zero(bits);
    }
    // extra guard bits so the final division is the only significant rounding
    let wide = bits + 16;
    let n = int_to_float(&bigint_to_ibig(q.numer()), wide);
    let d = int_to_float(&bigint_to_ibig(q.denom()), wide);
    (n / d).with_precision(bits as usize).value()
}

pub(crate) fn float_to_rational(x: &Float) -> BigRational {
    let sig = ibig_to_bigint(x.repr().significand());
    let exp = x.repr().exponent();
    let two = BigInt::from(2);
    if exp >= 0 {
        BigRational::from_integer(sig * num::pow(two, exp as usize))
    } else {
        BigRational::new(sig, num::pow(two, (-exp) as usize))
    }
}

fn float_to_decimal(x: &Float) -> String {
    if *x == Float::ZERO {
        return "0".to_string();
    }
    let digits = (x.precision() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 3;
    let q = float_to_rational(x);
    decimal_string(&q, digits)
}

/// Scientific decimal with `digits` significant digits, e.g. `-1.2345e-7`.
fn decimal_string(q: &BigRational, digits: usize) -> String {
    let neg = q.is_negative();
    let a = q.abs();
    // estimate the decimal exponent, then correct
    let approx = a.to_f64().unwrap_or(1.0);
    let mut e10: i64 = if approx > 0.0 && approx.is_finite() {
        approx.log10().floor() as i64
    } else {
        0
    };
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |e: i64| -> BigRational {
        if e >= 0 {
            num::pow(ten.clone(), e as usize)
        } else {
            BigRational::one() / num::pow(ten.clone(), (-e) as usize)
        }
    };
    loop {
        let scaled = &a / pow10(e10);
        if scaled >= ten {
            e10 += 1;
        } else if scaled < BigRational::one() {
            e10 -= 1;
        } else {
            break;
        }
    }
    let scaled = &a / pow10(e10 - digits as i64 + 1);
    let mut mant = scaled.round().to_integer();
    if mant >= num::pow(BigInt::from(10), digits) {
        mant /= 10;
        e10 += 1;
    }
    let s = mant.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e10}")
    } else {
        format!("{sign}{head}.{tail}e{e10}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), q(3, 4));
        assert_eq!(parse_rational("-7").unwrap(), q(-7, 1));
        assert_eq!(parse_rational("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_rational("-1.5e-2").unwrap(), q(-3, 200));
        assert_eq!(parse_rational("2E3").unwrap(), q(2000, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn exact_field_operations() {
        let b = Backend::Exact;
        let a = b.parse_pair("1", "-1").unwrap();
        let c = b.parse_pair("1/2", "3").unwrap();
        let prod = &a * &c;
        // (1 - i)(1/2 + 3i) = 1/2 + 3i - i/2 + 3 = 7/2 + 5/2 i
        assert_eq!(prod, b.parse_pair("7/2", "5/2").unwrap());
        let back = prod.checked_div(&c).unwrap();
        assert_eq!(back, a);
        assert!(a.checked_div(&b.zero()).is_none());
        assert_eq!(a.mul_i(), b.parse_pair("1", "1").unwrap());
    }

    #[test]
    fn float_precision_is_max_of_operands() {
        let lo = Backend::Float { bits: 64 }.int(3);
        let hi = Backend::Float { bits: 160 }.int(7);
        let s = &lo + &hi;
        assert_eq!(s.backend(), Backend::Float { bits: 160 });
        let d = hi.checked_div(&lo).unwrap();
        assert_eq!(d.backend(), Backend::Float { bits: 160 });
    }

    #[test]
    fn float_matches_exact_on_rationals() {
        let bits = 128;
        let fb = Backend::Float { bits };
        let x = q(22, 7);
        let y = q(-355, 113);
        let exact = Backend::Exact.rational(&x).checked_div(&Backend::Exact.rational(&y)).unwrap();
        let float = fb.rational(&x).checked_div(&fb.rational(&y)).unwrap();
        let diff = (&exact.convert(fb) - &float).abs_f64();
        assert!(diff <= 2f64.powi(-(bits as i32 - 8)) * exact.abs_f64());
    }

    #[test]
    fn float_strings_round_trip() {
        let fb = Backend::Float { bits: 128 };
        let v = fb.rational(&q(1, 3)).checked_div(&fb.parse_pair("0", "7").unwrap()).unwrap();
        let [re, im] = v.to_strings();
        let back = fb.parse_pair(&re, &im).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.to_strings(), [re, im]);
    }

    #[test]
    fn zero_tolerance_scales_with_precision() {
        let t128 = Backend::Float { bits: 128 }.zero_tol();
        assert!(t128 < 1e-30 && t128 > 1e-31);
        assert!(Backend::Float { bits: 256 }.zero_tol() < t128);
        assert_eq!(Backend::Exact.zero_tol(), 0.0);
    }
}
