use crate::scalar::Scalar;

/// Truncated Laurent series at a center:
///
///   Σ_{e = val}^{known_to − 1}  c[e − val] · (z − center)^e
///
/// `known_to` (exclusive) records the precision: coefficients for exponents
/// `val .. known_to` are exact, everything beyond is unknown.  A series whose
/// known coefficients are all zero keeps an empty coefficient list with `val`
/// equal to `known_to`.
///
/// Arithmetic tracks precision pessimistically and never reports a coefficient
/// it has not actually computed.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    pub center: Scalar,
    val: i64,
    c: Vec<Scalar>,
}

impl TruncSeries {
    /// Build from explicit coefficients for exponents `val, val+1, …`.
    pub fn new(center: Scalar, val: i64, c: Vec<Scalar>) -> Self {
        let mut s = TruncSeries { center, val, c };
        s.normalize();
        s
    }

    /// The zero-to-precision series known through exponent `known_to − 1`.
    pub fn zero(center: Scalar, known_to: i64) -> Self {
        TruncSeries { center, val: known_to, c: vec![] }
    }

    /// Constant series known through exponent `known_to − 1`.
    pub fn constant(center: Scalar, value: Scalar, known_to: i64) -> Self {
        assert!(known_to >= 1);
        let mut c = vec![value];
        c.resize(known_to.max(1) as usize, Scalar::int(0));
        TruncSeries::new(center, 0, c)
    }

    /// The series of `z` (the coordinate itself) at `center`, known through
    /// exponent `known_to − 1`: `center + t`.
    pub fn coordinate(center: Scalar, known_to: i64) -> Self {
        assert!(known_to >= 2);
        let mut c = vec![center.clone(), Scalar::int(1)];
        c.resize(known_to as usize, Scalar::int(0));
        TruncSeries::new(center, 0, c)
    }

    fn normalize(&mut self) {
        while let Some(first) = self.c.first() {
            if first.is_zero() {
                self.c.remove(0);
                self.val += 1;
            } else {
                break;
            }
        }
    }

    /// First exponent with a (possibly zero-by-coincidence) stored coefficient.
    /// For a series that is zero to precision this equals `known_to`.
    pub fn val(&self) -> i64 {
        self.val
    }

    /// Exclusive upper bound of exactly-known exponents.
    pub fn known_to(&self) -> i64 {
        self.val + self.c.len() as i64
    }

    /// True iff every known coefficient is zero.
    pub fn is_zero_known(&self) -> bool {
        self.c.is_empty()
    }

    /// Coefficient of `(z − center)^e`; panics if `e` is beyond the known range.
    pub fn coeff(&self, e: i64) -> Scalar {
        assert!(e < self.known_to(), "coefficient {e} beyond known precision");
        if e < self.val {
            Scalar::int(0)
        } else {
            self.c[(e - self.val) as usize].clone()
        }
    }

    /// Value at the center (coefficient of exponent 0); requires val ≥ 0.
    pub fn value_at_center(&self) -> Scalar {
        assert!(self.val >= 0 || self.is_zero_known(), "pole at center");
        if self.known_to() <= 0 {
            panic!("value unknown at this precision");
        }
        self.coeff(0)
    }

    fn assert_same_center(&self, other: &TruncSeries) {
        assert!(self.center == other.center, "series centers differ");
    }

    pub fn add(&self, other: &TruncSeries) -> TruncSeries {
        self.assert_same_center(other);
        let kt = self.known_to().min(other.known_to());
        let val = self.val.min(other.val).min(kt);
        let mut c = vec![Scalar::int(0); (kt - val) as usize];
        for (e, slot) in c.iter_mut().enumerate() {
            let e = val + e as i64;
            let mut v = Scalar::int(0);
            if e >= self.val && e < self.known_to() {
                v += self.coeff(e);
            }
            if e >= other.val && e < other.known_to() {
                v += other.coeff(e);
            }
            *slot = v;
        }
        TruncSeries::new(self.center.clone(), val, c)
    }

    pub fn neg(&self) -> TruncSeries {
        TruncSeries {
            center: self.center.clone(),
            val: self.val,
            c: self.c.iter().map(|x| -x.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &TruncSeries) -> TruncSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> TruncSeries {
        TruncSeries::new(
            self.center.clone(),
            self.val,
            self.c.iter().map(|x| x.clone() * s.clone()).collect(),
        )
    }

    pub fn mul(&self, other: &TruncSeries) -> TruncSeries {
        self.assert_same_center(other);
        if self.is_zero_known() || other.is_zero_known() {
            // Precision: a factor that is zero to its precision makes the product
            // zero out to (zero factor precision + other valuation).
            let kt = (self.known_to() + other.val).min(other.known_to() + self.val);
            return TruncSeries::zero(self.center.clone(), kt);
        }
        let kt = (self.known_to() + other.val).min(other.known_to() + self.val);
        let val = self.val + other.val;
        let mut c = vec![Scalar::int(0); (kt - val).max(0) as usize];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                let e = (i + j) as i64;
                if e < kt - val {
                    c[e as usize] += a.clone() * b.clone();
                }
            }
        }
        TruncSeries::new(self.center.clone(), val, c)
    }

    /// Multiplicative inverse; panics if the series is zero to precision.
    pub fn inverse(&self) -> TruncSeries {
        assert!(!self.is_zero_known(), "inverting a series that is zero to precision");
        let u0 = self.c[0].clone();
        let u0_inv = u0.inv().expect("unit leading coefficient");
        let n = self.c.len();
        let mut inv = vec![Scalar::int(0); n];
        inv[0] = u0_inv.clone();
        for k in 1..n {
            // Σ_{j=0..k} u_j · inv_{k−j} = 0
            let mut acc = Scalar::int(0);
            for j in 1..=k {
                acc += self.c[j].clone() * inv[k - j].clone();
            }
            inv[k] = -(acc * u0_inv.clone());
        }
        TruncSeries::new(self.center.clone(), -self.val, inv)
    }

    pub fn div(&self, other: &TruncSeries) -> TruncSeries {
        self.mul(&other.inverse())
    }

    /// Derivative with respect to `z`.
    pub fn derivative(&self) -> TruncSeries {
        let mut c = Vec::with_capacity(self.c.len());
        for (k, v) in self.c.iter().enumerate() {
            let e = self.val + k as i64;
            c.push(Scalar::int(e) * v.clone());
        }
        // d/dz lowers every exponent by one; precision shrinks accordingly.
        TruncSeries::new(self.center.clone(), self.val - 1, c)
    }

    /// Integer power (negative allowed when the series is a unit to precision).
    pub fn pow(&self, e: i64) -> TruncSeries {
        if e == 0 {
            return TruncSeries::constant(self.center.clone(), Scalar::int(1), self.known_to() - self.val);
        }
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Composition `self ∘ g` for a chart-like inner series `g`.
    ///
    /// Requires `g(center_g) = center_self`, i.e. the shifted series
    /// `h = g − center_self` has valuation ≥ 1.  The result is centered at
    /// `g.center`.  Handles negative valuations of `self` through `h^{−1}`.
    pub fn compose(&self, g: &TruncSeries) -> TruncSeries {
        let h = g.sub(&TruncSeries::constant(
            g.center.clone(),
            self.center.clone(),
            g.known_to().max(1),
        ));
        assert!(
            h.is_zero_known() || h.val() >= 1,
            "inner series must map its center to the outer center"
        );
        let kt = h.known_to().min(self.known_to());
        let mut acc = TruncSeries::zero(g.center.clone(), kt);
        if self.val >= 0 {
            // Horner from the top known coefficient down.
            for e in (self.val..self.known_to()).rev() {
                acc = acc.mul(&h).add(&TruncSeries::constant(g.center.clone(), self.coeff(e), kt));
            }
            for _ in 0..self.val {
                acc = acc.mul(&h);
            }
        } else {
            let hinv = h.inverse();
            for e in self.val..self.known_to() {
                let term = if e >= 0 { h.pow(e.max(1)) } else { hinv.pow(-e) };
                let term = if e == 0 {
                    TruncSeries::constant(g.center.clone(), Scalar::int(1), kt)
                } else {
                    term
                };
                acc = acc.add(&term.scale(&self.coeff(e)));
            }
        }
        acc
    }

    /// Compare all known coefficients on the overlapping precision range.
    pub fn agrees_with(&self, other: &TruncSeries) -> bool {
        if self.center != other.center {
            return false;
        }
        let kt = self.known_to().min(other.known_to());
        let lo = self.val.min(other.val);
        for e in lo..kt {
            let a = if e >= self.val && e < self.known_to() { self.coeff(e) } else { Scalar::int(0) };
            let b = if e >= other.val && e < other.known_to() { other.coeff(e) } else { Scalar::int(0) };
            if a != b {
                return false;
            }
        }
        true
    }
}

impl std::fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .map(|(k, v)| format!("{}·t^{}", v, self.val + k as i64))
            .collect();
        write!(
            f,
            "[center {}; O(t^{})] {}",
            self.center,
            self.known_to(),
            if terms.is_empty() { "0".into() } else { terms.join(" + ") }
        )
    }
}
