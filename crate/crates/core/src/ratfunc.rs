use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::series::TruncSeries;
use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Rational function over the Gaussian rationals, kept in canonical form:
/// denominator monic, gcd(num, den) = 1, and zero represented as 0/1.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut f = RatFunc { num, den };
        f.reduce();
        f
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn constant(s: Scalar) -> Self {
        RatFunc::from_poly(Poly::constant(s))
    }

    pub fn int(n: i64) -> Self {
        RatFunc::constant(Scalar::int(n))
    }

    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Poly::one();
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.deg() != Some(0) {
            self.num = self.num.div_exact(&g);
            self.den = self.den.div_exact(&g);
        }
        let lc = self.den.lc();
        if !lc.is_one() {
            let lc_inv = lc.inv().expect("nonzero leading coefficient");
            self.num = self.num.scale(&lc_inv);
            self.den = self.den.scale(&lc_inv);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.deg() == Some(0)
    }

    /// The polynomial part when the function is a polynomial.
    pub fn as_poly(&self) -> Option<Poly> {
        if self.is_polynomial() {
            Some(self.num.clone())
        } else {
            None
        }
    }

    pub fn derivative(&self) -> RatFunc {
        // (n/d)' = (n'd − nd')/d²
        let n = self.num.derivative() * self.den.clone() - self.num.clone() * self.den.derivative();
        let d = self.den.clone() * self.den.clone();
        RatFunc::new(n, d)
    }

    pub fn eval(&self, p: &Scalar) -> Result<Scalar> {
        let d = self.den.eval(p);
        if d.is_zero() {
            return Err(Error::PoleAtPoint(format!("evaluation at pole z = {p}")));
        }
        Ok(self.num.eval(p) / d)
    }

    pub fn is_holomorphic_at(&self, p: &Scalar) -> bool {
        !self.den.eval(p).is_zero()
    }

    /// Order of vanishing at `p` (negative at a pole); None for the zero function.
    pub fn ord_at(&self, p: &Scalar) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let on = self.num.ord_at(p).expect("nonzero numerator") as i64;
        let od = self.den.ord_at(p).expect("nonzero denominator") as i64;
        Some(on - od)
    }

    pub fn pow(&self, e: i64) -> RatFunc {
        if e == 0 {
            return RatFunc::from_poly(Poly::one());
        }
        let base = if e < 0 {
            assert!(!self.is_zero(), "negative power of zero");
            RatFunc::new(self.den.clone(), self.num.clone())
        } else {
            self.clone()
        };
        let mut acc = RatFunc::from_poly(Poly::one());
        for _ in 0..e.unsigned_abs() {
            acc = acc * base.clone();
        }
        acc
    }

    /// Composition `self ∘ g` of rational functions.
    pub fn compose(&self, g: &RatFunc) -> RatFunc {
        // Write self = Σ a_i z^i / Σ b_j z^j and clear denominators of g:
        // with g = u/v and m = max(deg num, deg den),
        //   self(g) = (Σ a_i u^i v^{m−i}) / (Σ b_j u^j v^{m−j}).
        let m = self.num.deg().unwrap_or(0).max(self.den.deg().unwrap_or(0));
        let u = g.num.clone();
        let v = g.den.clone();
        let mut upow = vec![Poly::one()];
        let mut vpow = vec![Poly::one()];
        for k in 1..=m {
            upow.push(upow[k - 1].clone() * u.clone());
            vpow.push(vpow[k - 1].clone() * v.clone());
        }
        let lift = |p: &Poly| {
            let mut acc = Poly::zero();
            for i in 0..=p.deg().unwrap_or(0) {
                let c = p.coeff(i);
                if c.is_zero() {
                    continue;
                }
                acc = acc + (upow[i].clone() * vpow[m - i].clone()).scale(&c);
            }
            acc
        };
        let n = lift(&self.num);
        let d = lift(&self.den);
        assert!(!d.is_zero(), "composition denominator vanishes identically");
        RatFunc::new(n, d)
    }

    /// Laurent expansion at `center`, exact through exponent `order − 1`.
    pub fn expand_at(&self, center: &Scalar, order: i64) -> TruncSeries {
        if self.is_zero() {
            return TruncSeries::zero(center.clone(), order);
        }
        let vn = self.num.ord_at(center).expect("nonzero") as i64;
        let vd = self.den.ord_at(center).expect("nonzero") as i64;
        let val = vn - vd;
        if val >= order {
            return TruncSeries::zero(center.clone(), order);
        }
        // Need unit-part series of num and den to (order − val) terms beyond
        // their valuations.
        let terms = (order - val) as usize;
        let ns = poly_series_at(&self.num, center, vn as usize, terms);
        let ds = poly_series_at(&self.den, center, vd as usize, terms);
        let s = ns.mul(&ds.inverse());
        debug_assert!(s.known_to() >= order);
        TruncSeries::new(
            center.clone(),
            s.val(),
            (s.val()..order).map(|e| s.coeff(e)).collect(),
        )
    }

    /// Residue at `p`: the coefficient of `(z − p)^{−1}` in the local expansion.
    pub fn residue_at(&self, p: &Scalar) -> Scalar {
        if self.is_zero() {
            return Scalar::int(0);
        }
        let s = self.expand_at(p, 0);
        if s.val() > -1 {
            return Scalar::int(0);
        }
        s.coeff(-1)
    }
}

/// Series of a polynomial at `center` with known valuation `v`, producing
/// `terms` known coefficients starting at exponent `v`.
fn poly_series_at(p: &Poly, center: &Scalar, v: usize, terms: usize) -> TruncSeries {
    // Shift: q(t) = p(center + t); its coefficients are exact.
    let shifted = p.compose(&Poly::new(vec![center.clone(), Scalar::int(1)]));
    let deg = shifted.deg().expect("nonzero polynomial");
    let hi = (v + terms).min(deg + 1);
    let coeffs: Vec<Scalar> = (v..hi.max(v)).map(|k| shifted.coeff(k)).collect();
    let mut c = coeffs;
    c.resize(terms, Scalar::int(0)); // polynomial: higher coefficients truly zero
    TruncSeries::new(center.clone(), v as i64, c)
}

/// Laurent expansion helper mirroring the library-level entry point.
pub fn series_expand(f: &RatFunc, center: &Scalar, order: i64) -> TruncSeries {
    f.expand_at(center, order)
}

/// Residue of a rational 1-form `f · dz` at `p`.
pub fn residue_at(f: &RatFunc, p: &Scalar) -> Scalar {
    f.residue_at(p)
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        RatFunc::new(
            self.num.clone() * rhs.den.clone() + rhs.num.clone() * self.den.clone(),
            self.den * rhs.den,
        )
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        self + (-rhs)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -self.num, den: self.den }
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        RatFunc::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl Div for RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: RatFunc) -> RatFunc {
        assert!(!rhs.is_zero(), "division by zero rational function");
        RatFunc::new(self.num * rhs.den, self.den * rhs.num)
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::from_poly(Poly::zero())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }
}

impl std::fmt::Display for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl std::fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::str::FromStr for RatFunc {
    type Err = String;

    /// Accepts `(num)/(den)` with `num`, `den` in the `c0; c1; …` polynomial
    /// form, or a bare polynomial.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('(') {
            let mid = rest
                .find(")/(")
                .ok_or_else(|| "expected (num)/(den)".to_string())?;
            let num_s = &rest[..mid];
            let den_s = rest[mid + 3..]
                .strip_suffix(')')
                .ok_or_else(|| "missing closing parenthesis".to_string())?;
            let num: Poly = num_s.parse()?;
            let den: Poly = den_s.parse()?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(RatFunc::new(num, den))
        } else {
            Ok(RatFunc::from_poly(s.parse()?))
        }
    }
}
