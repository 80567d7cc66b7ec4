use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

/// Exact rational number (arbitrary precision, always reduced).
pub type Rat = BigRational;

/// A Gaussian rational `re + im·i` with exact rational components.
///
/// This is the base field of the whole library: every coefficient of every
/// polynomial, rational function, series and matrix is a `Scalar`.  All
/// arithmetic is exact; equality is decidable and canonical.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: Rat,
    pub im: Rat,
}

fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

impl Scalar {
    pub fn new(re: Rat, im: Rat) -> Self {
        Scalar { re, im }
    }

    /// The integer `n` as a scalar.
    pub fn int(n: i64) -> Self {
        Scalar { re: rat_int(n), im: Rat::zero() }
    }

    /// The rational `num/den` as a scalar. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar { re: Rat::new(BigInt::from(num), BigInt::from(den)), im: Rat::zero() }
    }

    /// The Gaussian rational `a/b + (c/d)·i`. Panics if `b == 0` or `d == 0`.
    pub fn gauss(a: i64, b: i64, c: i64, d: i64) -> Self {
        assert!(b != 0 && d != 0, "zero denominator");
        Scalar {
            re: Rat::new(BigInt::from(a), BigInt::from(b)),
            im: Rat::new(BigInt::from(c), BigInt::from(d)),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { re: Rat::zero(), im: Rat::one() }
    }

    /// An arbitrary-precision rational integer as a scalar.
    pub fn from_bigint(n: BigInt) -> Self {
        Scalar { re: Rat::from_integer(n), im: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// True iff the value is a rational number (no imaginary part).
    pub fn is_rational(&self) -> bool {
        self.im.is_zero()
    }

    /// True iff the value is a rational integer.
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Norm `re² + im²` (a nonnegative rational; zero iff the value is zero).
    pub fn norm(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact inverse; `DivisionByZero` on zero.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("scalar".into()));
        }
        let n = self.norm();
        Ok(Scalar { re: &self.re / &n, im: -(&self.im / &n) })
    }

    /// Integer power (negative allowed for nonzero values).
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Scalar::int(1));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::int(1);
        for _ in 0..e.unsigned_abs() {
            acc *= base.clone();
        }
        Ok(acc)
    }

    /// Exact square root in ℚ(i), if one exists.
    ///
    /// Solves `(x + y·i)² = re + im·i` exactly: requires `√(re² + im²)` and the
    /// resulting half-sums to be perfect rational squares.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Scalar::int(0));
        }
        if self.im.is_zero() {
            if self.re.is_negative() {
                let y = rat_sqrt(&(-self.re.clone()))?;
                return Some(Scalar { re: Rat::zero(), im: y });
            }
            let x = rat_sqrt(&self.re)?;
            return Some(Scalar { re: x, im: Rat::zero() });
        }
        // x² − y² = re, 2xy = im;  x² + y² = √(re² + im²) =: s  (must be rational)
        let s = rat_sqrt(&self.norm())?;
        let two = rat_int(2);
        let x2 = (&self.re + &s) / &two;
        let x = rat_sqrt(&x2)?;
        if x.is_zero() {
            return None; // im ≠ 0 requires x ≠ 0
        }
        let y = &self.im / (&two * &x);
        let cand = Scalar { re: x, im: y };
        debug_assert_eq!(cand.clone() * cand.clone(), *self);
        Some(cand)
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    if r.is_zero() {
        return Some(Rat::zero());
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rat::new(sn, sd))
    } else {
        None
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl<'a> Add<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar { re: self.re + &rhs.re, im: self.im + &rhs.im }
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl<'a> Sub<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        Scalar { re: self.re - &rhs.re, im: self.im - &rhs.im }
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        self.re -= rhs.re;
        self.im -= rhs.im;
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        Scalar { re, im }
    }
}

impl<'a> Mul<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self * rhs.clone()
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = self.clone() * rhs;
    }
}

impl Div for Scalar {
    type Output = Scalar;
    /// Exact division. Panics on division by zero (use `inv` for a checked path).
    // Division of Gaussian rationals is multiplication by the exact inverse.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Scalar) -> Scalar {
        self * rhs.inv().expect("scalar division by zero")
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::int(0)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::int(1)
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form used by every file format:
///   "0", "3", "-1/2", "i", "-i", "2*i", "1/2+3/4*i", "1-i", ...
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let imag_part = |im: &Rat| -> String {
            if im.is_one() {
                "i".to_string()
            } else {
                format!("{}*i", fmt_rat(im))
            }
        };
        if self.im.is_zero() {
            write!(f, "{}", fmt_rat(&self.re))
        } else if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{}", imag_part(&-self.im.clone()))
            } else {
                write!(f, "{}", imag_part(&self.im))
            }
        } else if self.im.is_negative() {
            write!(f, "{}-{}", fmt_rat(&self.re), imag_part(&-self.im.clone()))
        } else {
            write!(f, "{}+{}", fmt_rat(&self.re), imag_part(&self.im))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn parse_rat(s: &str) -> std::result::Result<Rat, String> {
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num_s).map_err(|_| format!("bad integer {num_s:?}"))?;
    let den = BigInt::from_str(den_s).map_err(|_| format!("bad integer {den_s:?}"))?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rat::new(num, den))
}

/// One signed term: either a rational or a rational multiple of `i`.
fn parse_term(term: &str) -> std::result::Result<(Rat, bool), String> {
    let (sign, body) = match term.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, term.strip_prefix('+').unwrap_or(term)),
    };
    if body.is_empty() {
        return Err("empty term".into());
    }
    let (is_imag, mag) = if body == "i" {
        (true, Rat::one())
    } else if let Some(coef) = body.strip_suffix("*i") {
        (true, parse_rat(coef)?)
    } else {
        (false, parse_rat(body)?)
    };
    let mag = if sign < 0 { -mag } else { mag };
    Ok((mag, is_imag))
}

impl FromStr for Scalar {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty scalar".into());
        }
        if s.contains(char::is_whitespace) {
            return Err("scalar literal may not contain whitespace".into());
        }
        // Split into at most two terms at a '+'/'-' that is not the leading sign.
        let bytes = s.as_bytes();
        let mut split_at = None;
        for (idx, &b) in bytes.iter().enumerate().skip(1) {
            if b == b'+' || b == b'-' {
                split_at = Some(idx);
            }
        }
        let terms: Vec<&str> = match split_at {
            Some(idx) => vec![&s[..idx], &s[idx..]],
            None => vec![s],
        };
        let mut re = Rat::zero();
        let mut im = Rat::zero();
        let mut seen_re = false;
        let mut seen_im = false;
        for t in terms {
            let (mag, is_imag) = parse_term(t)?;
            if is_imag {
                if seen_im {
                    return Err("two imaginary terms".into());
                }
                seen_im = true;
                im = mag;
            } else {
                if seen_re {
                    return Err("two rational terms".into());
                }
                seen_re = true;
                re = mag;
            }
        }
        Ok(Scalar { re, im })
    }
}
