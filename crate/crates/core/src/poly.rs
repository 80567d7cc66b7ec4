use crate::error::{Error, Result};
use crate::scalar::{Rat, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial in one variable `z` over the Gaussian rationals.
///
/// Coefficients are stored ascending (`c[k]` multiplies `z^k`) with trailing
/// zeros stripped; the zero polynomial is the empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    pub c: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut c: Vec<Scalar>) -> Self {
        while c.last().is_some_and(Scalar::is_zero) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::int(1))
    }

    pub fn constant(s: Scalar) -> Self {
        Poly::new(vec![s])
    }

    /// The variable `z`.
    pub fn x() -> Self {
        Poly::new(vec![Scalar::int(0), Scalar::int(1)])
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&n| Scalar::int(n)).collect())
    }

    /// Monic `∏ (z − r)` over the given roots.
    pub fn from_roots(roots: &[Scalar]) -> Self {
        let mut p = Poly::one();
        for r in roots {
            p = p * Poly::new(vec![-r.clone(), Scalar::int(1)]);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lc(&self) -> Scalar {
        self.c.last().cloned().unwrap_or_else(|| Scalar::int(0))
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.c.get(k).cloned().unwrap_or_else(|| Scalar::int(0))
    }

    pub fn eval(&self, p: &Scalar) -> Scalar {
        let mut acc = Scalar::int(0);
        for c in self.c.iter().rev() {
            acc = acc * p.clone() + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| Scalar::int(k as i64) * v.clone())
            .collect();
        Poly::new(c)
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        Poly::new(self.c.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lc().inv().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    /// Substitute another polynomial: `self(g(z))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.c.iter().rev() {
            acc = acc * g.clone() + Poly::constant(c.clone());
        }
        acc
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn divmod(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let mut r = self.clone();
        let mut q = vec![Scalar::int(0); self.c.len().saturating_sub(d.c.len()) + 1];
        let dlc_inv = d.lc().inv().expect("nonzero leading coefficient");
        while let (Some(rd), Some(dd)) = (r.deg(), d.deg()) {
            if rd < dd {
                break;
            }
            let k = rd - dd;
            let f = r.lc() * dlc_inv.clone();
            // r -= f·z^k·d
            let mut shifted = vec![Scalar::int(0); k];
            shifted.extend(d.c.iter().map(|c| c.clone() * f.clone()));
            r = r - Poly::new(shifted);
            q[k] = f;
            if r.deg().is_none_or(|nd| nd < rd) {
                continue;
            }
            unreachable!("division failed to reduce degree");
        }
        (Poly::new(q), r)
    }

    /// Exact division; panics if the remainder is nonzero.
    pub fn div_exact(&self, d: &Poly) -> Poly {
        let (q, r) = self.divmod(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            Poly::zero()
        } else {
            a.monic()
        }
    }

    /// True iff the polynomial has no repeated roots (gcd with derivative constant).
    pub fn is_squarefree(&self) -> bool {
        if self.deg().is_none_or(|d| d <= 1) {
            return true;
        }
        self.gcd(&self.derivative()).deg() == Some(0)
    }

    /// Order of vanishing at `p` (0 if `p` is not a root; `None` for the zero polynomial).
    pub fn ord_at(&self, p: &Scalar) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let mut k = 0;
        let mut cur = self.clone();
        loop {
            if !cur.eval(p).is_zero() {
                return Some(k);
            }
            let lin = Poly::new(vec![-p.clone(), Scalar::int(1)]);
            cur = cur.div_exact(&lin);
            k += 1;
        }
    }

    /// All roots with multiplicity, requiring the polynomial to split over ℚ(i).
    ///
    /// Linear and quadratic factors are solved exactly (quadratic formula with the
    /// exact Gaussian square root); higher degrees are reduced by Gaussian-integer
    /// rational-root extraction.  `NonRationalBranchPoint` if a factor does not
    /// split.
    pub fn roots(&self) -> Result<Vec<(Scalar, usize)>> {
        assert!(!self.is_zero(), "roots of the zero polynomial");
        let mut found: Vec<Scalar> = Vec::new();
        let mut cur = self.clone();
        // roots at 0
        while cur.deg().is_some_and(|d| d >= 1) && cur.c[0].is_zero() {
            found.push(Scalar::int(0));
            cur = Poly::new(cur.c[1..].to_vec());
        }
        loop {
            match cur.deg() {
                None | Some(0) => break,
                Some(1) => {
                    found.push(-(cur.c[0].clone() / cur.c[1].clone()));
                    break;
                }
                Some(2) => {
                    let (a, b, c) = (cur.c[2].clone(), cur.c[1].clone(), cur.c[0].clone());
                    let disc = b.clone() * b.clone() - Scalar::int(4) * a.clone() * c;
                    let sq = disc.sqrt().ok_or_else(|| {
                        Error::NonRationalBranchPoint(format!("irrational quadratic {cur}"))
                    })?;
                    let two_a = Scalar::int(2) * a;
                    found.push((-b.clone() + sq.clone()) / two_a.clone());
                    found.push((-b - sq) / two_a);
                    break;
                }
                Some(_) => {
                    let r = gaussian_rational_root(&cur).ok_or_else(|| {
                        Error::NonRationalBranchPoint(format!("unsplit factor {cur}"))
                    })?;
                    let lin = Poly::new(vec![-r.clone(), Scalar::int(1)]);
                    cur = cur.div_exact(&lin);
                    found.push(r);
                }
            }
        }
        let mut out: Vec<(Scalar, usize)> = Vec::new();
        for r in found {
            match out.iter_mut().find(|(s, _)| *s == r) {
                Some((_, m)) => *m += 1,
                None => out.push((r, 1)),
            }
        }
        Ok(out)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        let n = self.c.len().max(rhs.c.len());
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.c.get(k).cloned().unwrap_or_else(|| Scalar::int(0));
            let b = rhs.c.get(k).cloned().unwrap_or_else(|| Scalar::int(0));
            c.push(a + b);
        }
        Poly::new(c)
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.c.into_iter().map(|c| -c).collect())
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Scalar::int(0); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] += a.clone() * b.clone();
            }
        }
        Poly::new(c)
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::one()
    }
}

/// Canonical ascending coefficient list: "c0; c1; c2".  Zero is "0".
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.c.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parses the `Display` form: ascending coefficients separated by `;`.
impl std::str::FromStr for Poly {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let mut c = Vec::new();
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                return Err("empty polynomial coefficient".into());
            }
            c.push(part.parse::<Scalar>()?);
        }
        Ok(Poly::new(c))
    }
}

// ---------------------------------------------------------------------------
// Gaussian-integer rational-root extraction (for factors of degree ≥ 3)
// ---------------------------------------------------------------------------

type GInt = (BigInt, BigInt); // a + b·i with integer a, b

fn g_mul(x: &GInt, y: &GInt) -> GInt {
    (&x.0 * &y.0 - &x.1 * &y.1, &x.0 * &y.1 + &x.1 * &y.0)
}

fn g_norm(x: &GInt) -> BigInt {
    &x.0 * &x.0 + &x.1 * &x.1
}

fn g_is_zero(x: &GInt) -> bool {
    x.0.is_zero() && x.1.is_zero()
}

/// Exact Gaussian-integer division, if the quotient is a Gaussian integer.
fn g_div_exact(x: &GInt, y: &GInt) -> Option<GInt> {
    let n = g_norm(y);
    if n.is_zero() {
        return None;
    }
    let re_num = &x.0 * &y.0 + &x.1 * &y.1;
    let im_num = &x.1 * &y.0 - &x.0 * &y.1;
    if (&re_num % &n).is_zero() && (&im_num % &n).is_zero() {
        Some((re_num / &n, im_num / n))
    } else {
        None
    }
}

/// Prime factorization of a positive integer by trial division.
fn factor_int(mut n: BigInt) -> Vec<(BigInt, u32)> {
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0u32;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// A Gaussian prime above the rational prime `p`.
fn gaussian_prime_above(p: &BigInt) -> GInt {
    if *p == BigInt::from(2) {
        return (BigInt::one(), BigInt::one());
    }
    if (p % BigInt::from(4)) == BigInt::from(3) {
        return (p.clone(), BigInt::zero());
    }
    // p ≡ 1 (mod 4): find a² + b² = p by search (inputs here are small).
    let mut a = BigInt::one();
    loop {
        let rem = p - &a * &a;
        if rem <= BigInt::zero() {
            unreachable!("sum-of-two-squares search failed");
        }
        let b = rem.sqrt();
        if &b * &b == rem {
            return (a, b);
        }
        a += 1;
    }
}

/// All divisors of a nonzero Gaussian integer, up to unit factors.
fn gaussian_divisors(g: &GInt) -> Vec<GInt> {
    let mut primes: Vec<(GInt, u32)> = Vec::new();
    let mut rest = g.clone();
    for (p, _) in factor_int(g_norm(g)) {
        let pi = gaussian_prime_above(&p);
        for cand in [pi.clone(), (pi.0.clone(), -pi.1.clone())] {
            let mut e = 0u32;
            while let Some(q) = g_div_exact(&rest, &cand) {
                rest = q;
                e += 1;
                if e > 512 {
                    break;
                }
            }
            if e > 0 {
                primes.push((cand, e));
            }
            if pi.1.is_zero() {
                break; // inert prime: conjugate is the same up to units
            }
        }
    }
    let mut divs = vec![(BigInt::one(), BigInt::zero())];
    for (pi, e) in primes {
        let mut next = Vec::new();
        for d in &divs {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..e {
                acc = g_mul(&acc, &pi);
                next.push(acc.clone());
            }
        }
        divs = next;
    }
    divs
}

/// One root in ℚ(i) of a polynomial of degree ≥ 1, if any exists.
fn gaussian_rational_root(p: &Poly) -> Option<Scalar> {
    // Clear denominators to get Gaussian-integer coefficients.
    let mut lcm = BigInt::one();
    for c in &p.c {
        for d in [c.re.denom(), c.im.denom()] {
            let g = num_integer::gcd(lcm.clone(), d.clone());
            lcm = lcm / g * d;
        }
    }
    let ic: Vec<GInt> = p
        .c
        .iter()
        .map(|c| {
            let s = Scalar::new(
                c.re.clone() * Rat::from_integer(lcm.clone()),
                c.im.clone() * Rat::from_integer(lcm.clone()),
            );
            (s.re.to_integer(), s.im.to_integer())
        })
        .collect();
    let c0 = ic.first()?.clone();
    let cn = ic.last()?.clone();
    if g_is_zero(&c0) {
        return Some(Scalar::int(0));
    }
    let units = [
        Scalar::int(1),
        Scalar::int(-1),
        Scalar::i(),
        -Scalar::i(),
    ];
    for d0 in gaussian_divisors(&c0) {
        for d1 in gaussian_divisors(&cn) {
            let num = Scalar::new(Rat::from_integer(d0.0.clone()), Rat::from_integer(d0.1.clone()));
            let den = Scalar::new(Rat::from_integer(d1.0.clone()), Rat::from_integer(d1.1.clone()));
            if den.is_zero() {
                continue;
            }
            let base = num / den;
            for u in &units {
                let cand = base.clone() * u.clone();
                if p.eval(&cand).is_zero() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Poly {
        Poly::x()
    }

    #[test]
    fn degree_of_product_adds() {
        let p = Poly::from_ints(&[1, 2, 3]);
        let q = Poly::from_ints(&[-5, 0, 0, 7]);
        assert_eq!(
            (p.clone() * q.clone()).deg(),
            Some(p.deg().unwrap() + q.deg().unwrap())
        );
    }

    #[test]
    fn zero_is_canonical() {
        let p = Poly::from_ints(&[1, 1]);
        let q = Poly::from_ints(&[-1, -1]);
        assert_eq!(p + q, Poly::zero());
        assert_eq!(Poly::new(vec![Scalar::int(0), Scalar::int(0)]), Poly::zero());
    }

    #[test]
    fn divmod_and_gcd() {
        // (z²−1) = (z−1)(z+1)
        let p = Poly::from_ints(&[-1, 0, 1]);
        let d = Poly::from_ints(&[-1, 1]);
        let (q, r) = p.divmod(&d);
        assert!(r.is_zero());
        assert_eq!(q, Poly::from_ints(&[1, 1]));
        let g = p.gcd(&Poly::from_ints(&[1, 1]));
        assert_eq!(g, Poly::from_ints(&[1, 1]));
    }

    #[test]
    fn squarefree_detection() {
        assert!(Poly::from_ints(&[-1, 0, 1]).is_squarefree()); // z²−1
        assert!(!Poly::from_ints(&[1, 2, 1]).is_squarefree()); // (z+1)²
        assert!(Poly::from_ints(&[0, 2]).is_squarefree()); // 2z
    }

    #[test]
    fn compose_and_eval_agree() {
        let p = Poly::from_ints(&[1, -3, 2]);
        let g = Poly::from_ints(&[2, 5]);
        let at = Scalar::ratio(3, 7);
        assert_eq!(p.compose(&g).eval(&at), p.eval(&g.eval(&at)));
    }

    #[test]
    fn roots_linear_quadratic() {
        // 2z + 6 → −3
        assert_eq!(
            Poly::from_ints(&[6, 2]).roots().unwrap(),
            vec![(Scalar::int(-3), 1)]
        );
        // z² + 1 → ±i
        let r = Poly::from_ints(&[1, 0, 1]).roots().unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|(s, m)| *s == Scalar::i() && *m == 1));
        assert!(r.iter().any(|(s, m)| *s == -Scalar::i() && *m == 1));
        // z² − 2 does not split over ℚ(i)
        assert!(matches!(
            Poly::from_ints(&[-2, 0, 1]).roots(),
            Err(Error::NonRationalBranchPoint(_))
        ));
    }

    #[test]
    fn roots_higher_degree_with_multiplicity() {
        // z·(z−1)²·(z+i) degree 4
        let p = Poly::from_roots(&[
            Scalar::int(0),
            Scalar::int(1),
            Scalar::int(1),
            -Scalar::i(),
        ]);
        let mut r = p.roots().unwrap();
        r.sort_by_key(|(_, m)| *m);
        assert!(r.contains(&(Scalar::int(1), 2)));
        assert!(r.contains(&(Scalar::int(0), 1)));
        assert!(r.contains(&(-Scalar::i(), 1)));
    }

    #[test]
    fn roots_gaussian_cubic() {
        // (z − (1+i))·(z − 1/2)·(z + 2) with a scale factor
        let p = Poly::from_roots(&[Scalar::gauss(1, 1, 1, 1), Scalar::ratio(1, 2), Scalar::int(-2)])
            .scale(&Scalar::int(6));
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.contains(&(Scalar::gauss(1, 1, 1, 1), 1)));
        assert!(r.contains(&(Scalar::ratio(1, 2), 1)));
        assert!(r.contains(&(Scalar::int(-2), 1)));
    }

    #[test]
    fn ord_at_counts_multiplicity() {
        let p = Poly::from_roots(&[Scalar::int(2), Scalar::int(2), Scalar::int(3)]);
        assert_eq!(p.ord_at(&Scalar::int(2)), Some(2));
        assert_eq!(p.ord_at(&Scalar::int(3)), Some(1));
        assert_eq!(p.ord_at(&Scalar::int(0)), Some(0));
    }

    #[test]
    fn display_form() {
        let p = Poly::new(vec![Scalar::int(0), -Scalar::i(), Scalar::ratio(1, 2)]);
        assert_eq!(p.to_string(), "0; -i; 1/2");
        assert_eq!(z().to_string(), "0; 1");
        assert_eq!(Poly::zero().to_string(), "0");
    }
}
