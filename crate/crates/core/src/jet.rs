use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::series::TruncSeries;

/// Line bundle identified by its twist data: K_X-power `b` (so the tangent
/// bundle is b = −1) and O(S)-power `m` at a marked point.  Tensoring adds
/// componentwise.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BundleSymbol {
    pub b: i64,
    pub m: i64,
}

impl BundleSymbol {
    pub const fn new(b: i64, m: i64) -> Self {
        BundleSymbol { b, m }
    }

    /// The tangent bundle TX.
    pub const fn tx() -> Self {
        BundleSymbol { b: -1, m: 0 }
    }

    /// The twisted tangent bundle TX ⊗ O(S).
    pub const fn twisted_tx() -> Self {
        BundleSymbol { b: -1, m: 1 }
    }

    /// K_X^{⊗p}.
    pub const fn k_power(p: i64) -> Self {
        BundleSymbol { b: p, m: 0 }
    }

    pub const fn tensor(self, o: BundleSymbol) -> Self {
        BundleSymbol { b: self.b + o.b, m: self.m + o.m }
    }
}

/// Frame discipline tag: every jet-coordinate object names the chart and
/// bundle its coordinates refer to; operations that combine two objects
/// require equal frames.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JetFrame {
    pub chart: String,
    pub symbol: BundleSymbol,
    /// Coordinate convention: components are raw derivative values
    /// (f(p), f′(p), …), not Taylor coefficients.
    pub convention: &'static str,
}

impl JetFrame {
    pub fn affine(symbol: BundleSymbol) -> Self {
        JetFrame { chart: "z".into(), symbol, convention: "raw-derivative" }
    }

    pub fn named(chart: &str, symbol: BundleSymbol) -> Self {
        JetFrame { chart: chart.into(), symbol, convention: "raw-derivative" }
    }
}

/// Order-k jet of a section in a chart frame: components are the raw
/// derivative values (f(p), f′(p), …, f^{(k)}(p)) of the local representative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JetVec {
    pub comps: Vec<Scalar>,
}

impl JetVec {
    pub fn new(comps: Vec<Scalar>) -> Self {
        assert!(!comps.is_empty());
        JetVec { comps }
    }

    pub fn order(&self) -> usize {
        self.comps.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Scalar::is_zero)
    }
}

/// Order-k jet of a series at its center: (f(p), f′(p), …, f^{(k)}(p)).
/// The series must be centred at `p` and known to at least k+1 coefficients.
pub fn jet_of(f: &TruncSeries, k: usize, p: &Scalar) -> Result<JetVec> {
    assert!(&f.center == p, "series must be centred at the jet point");
    if !f.is_zero_known() && f.val() < 0 {
        return Err(Error::PoleAtPoint(format!("pole of order {} at z = {p}", -f.val())));
    }
    assert!(
        f.known_to() > (k as i64),
        "series precision too low for an order-{k} jet"
    );
    let mut comps = Vec::with_capacity(k + 1);
    let mut fact = Scalar::int(1);
    for j in 0..=k as i64 {
        if j > 0 {
            fact *= Scalar::int(j);
        }
        let c = if j >= f.val() { f.coeff(j) } else { Scalar::int(0) };
        comps.push(c * fact.clone());
    }
    Ok(JetVec { comps })
}

/// Drop the top derivative: J^k → J^{k−1}.
pub fn jet_project(v: &JetVec) -> JetVec {
    assert!(v.order() >= 1, "cannot project an order-0 jet");
    JetVec { comps: v.comps[..v.comps.len() - 1].to_vec() }
}

/// The tautological inclusion J³ ↪ J¹(J²): an order-3 jet becomes the value
/// and first derivative of the order-2 jet curve.
pub fn nested_jet(v: &JetVec) -> (JetVec, JetVec) {
    assert_eq!(v.order(), 3, "nested_jet expects an order-3 jet");
    let value = JetVec { comps: v.comps[0..3].to_vec() };
    let deriv = JetVec { comps: v.comps[1..4].to_vec() };
    (value, deriv)
}

/// The standard jet filtration in any order-2 frame:
/// F¹ = {v₀ = v₁ = 0} = span(ê₂),  F² = {v₀ = 0} = span(ê₁, ê₂).
pub struct StdFiltration;

impl StdFiltration {
    pub fn f1_basis() -> Vec<Vec<Scalar>> {
        vec![vec![Scalar::int(0), Scalar::int(0), Scalar::int(1)]]
    }

    pub fn f2_basis() -> Vec<Vec<Scalar>> {
        vec![
            vec![Scalar::int(0), Scalar::int(1), Scalar::int(0)],
            vec![Scalar::int(0), Scalar::int(0), Scalar::int(1)],
        ]
    }

    pub fn in_f1(v: &[Scalar]) -> bool {
        v.len() == 3 && v[0].is_zero() && v[1].is_zero()
    }

    pub fn in_f2(v: &[Scalar]) -> bool {
        v.len() == 3 && v[0].is_zero()
    }
}

// ---- chart-transition calculus, generic over the coefficient ring ----

/// Minimal differential-field interface shared by rational functions and
/// truncated series, so the transition recursion is written once.
pub(crate) trait ChartField: Clone {
    fn deriv(&self) -> Self;
    fn add_(&self, o: &Self) -> Self;
    fn mul_(&self, o: &Self) -> Self;
    fn div_(&self, o: &Self) -> Self;
    fn neg_(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn powi_(&self, e: i64) -> Self;
    /// Invertible as a local unit (nonzero function / nonvanishing at center).
    fn is_unit(&self) -> bool;
}

impl ChartField for RatFunc {
    fn deriv(&self) -> Self {
        self.derivative()
    }
    fn add_(&self, o: &Self) -> Self {
        self.clone() + o.clone()
    }
    fn mul_(&self, o: &Self) -> Self {
        self.clone() * o.clone()
    }
    fn div_(&self, o: &Self) -> Self {
        self.clone() / o.clone()
    }
    fn neg_(&self) -> Self {
        -self.clone()
    }
    fn zero_like(&self) -> Self {
        RatFunc::int(0)
    }
    fn one_like(&self) -> Self {
        RatFunc::int(1)
    }
    fn powi_(&self, e: i64) -> Self {
        self.pow(e)
    }
    fn is_unit(&self) -> bool {
        !self.is_zero()
    }
}

impl ChartField for TruncSeries {
    fn deriv(&self) -> Self {
        self.derivative()
    }
    fn add_(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn mul_(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn div_(&self, o: &Self) -> Self {
        self.div(o)
    }
    fn neg_(&self) -> Self {
        self.neg()
    }
    fn zero_like(&self) -> Self {
        TruncSeries::zero(self.center.clone(), self.known_to())
    }
    fn one_like(&self) -> Self {
        TruncSeries::constant(self.center.clone(), Scalar::int(1), self.known_to().max(1))
    }
    fn powi_(&self, e: i64) -> Self {
        self.pow(e)
    }
    fn is_unit(&self) -> bool {
        !self.is_zero_known() && self.val() == 0
    }
}

/// Rows a_{ij} with f^{(i)} = Σ_j a_{ij}·(g^{(j)}∘φ), where f = u·(g∘φ) is
/// the z-chart representative of the w-chart representative g under w = φ(z)
/// and u = (φ′)^b · (φ/z)^{−m}.  The matrix maps w-chart jets to z-chart
/// jets and is lower-triangular with diagonal (φ′)^{b+i}·(φ/z)^{−m}.
fn transition_hat<T: ChartField>(
    phi: &T,
    coord: &T,
    lb: BundleSymbol,
    k: usize,
) -> Result<Vec<Vec<T>>> {
    let dphi = phi.deriv();
    if !dphi.is_unit() {
        return Err(Error::NonInvertibleChart(
            "chart map has vanishing derivative".into(),
        ));
    }
    let mut u = dphi.powi_(lb.b);
    if lb.m != 0 {
        let ratio = phi.div_(coord);
        if !ratio.is_unit() {
            return Err(Error::NonInvertibleChart(
                "twisted transition requires the chart map to fix the marked point at the center"
                    .into(),
            ));
        }
        u = u.mul_(&ratio.powi_(-lb.m));
    }
    let n = k + 1;
    let zero = phi.zero_like();
    let mut rows: Vec<Vec<T>> = vec![vec![zero.clone(); n]];
    rows[0][0] = u;
    for i in 0..k {
        let mut next = vec![zero.clone(); n];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut v = rows[i][j].deriv();
            if j > 0 {
                v = v.add_(&dphi.mul_(&rows[i][j - 1]));
            }
            *slot = v;
        }
        rows.push(next);
    }
    Ok(rows)
}

/// Inverse of a lower-triangular matrix with unit diagonal entries,
/// by forward substitution.
fn invert_lower<T: ChartField>(l: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = l.len();
    let zero = l[0][0].zero_like();
    let mut x: Vec<Vec<T>> = vec![vec![zero.clone(); n]; n];
    for i in 0..n {
        x[i][i] = l[i][i].one_like().div_(&l[i][i]);
        for j in (0..i).rev() {
            let mut acc = zero.clone();
            for k in j..i {
                acc = acc.add_(&l[i][k].mul_(&x[k][j]));
            }
            x[i][j] = acc.neg_().div_(&l[i][i]);
        }
    }
    x
}

fn check_twist_center(phi_center: &Scalar, lb: BundleSymbol) -> Result<()> {
    if lb.m != 0 && !phi_center.is_zero() {
        return Err(Error::NonInvertibleChart(
            "twisted transitions are only supported at the marked point 0".into(),
        ));
    }
    Ok(())
}

/// Chart-transition matrix for order-k jets of sections of the bundle `lb`
/// under w = φ(z), with rational-function entries: maps z-chart jet
/// coordinates to w-chart jet coordinates, T = T̂^{−1}.
pub fn jet_transition_matrix_rat(
    phi: &RatFunc,
    lb: BundleSymbol,
    k: usize,
) -> Result<Mat<RatFunc>> {
    if lb.m != 0 {
        match phi.ord_at(&Scalar::int(0)) {
            Some(v) if v >= 1 => {}
            _ => {
                return Err(Error::NonInvertibleChart(
                    "twisted transition requires φ(0) = 0".into(),
                ))
            }
        }
    }
    let hat = transition_hat(phi, &RatFunc::x(), lb, k)?;
    let inv = invert_lower(&hat);
    Ok(Mat::from_rows(inv))
}

/// Same matrix with truncated-series entries centred at φ's center
/// (the spec-level entry point for arbitrary invertible series charts).
pub fn jet_transition_matrix(
    phi: &TruncSeries,
    lb: BundleSymbol,
    k: usize,
) -> Result<Vec<Vec<TruncSeries>>> {
    check_twist_center(&phi.center, lb)?;
    let kt = phi.known_to().max(2);
    let coord = TruncSeries::coordinate(phi.center.clone(), kt);
    let hat = transition_hat(phi, &coord, lb, k)?;
    Ok(invert_lower(&hat))
}

/// Determinant of the order-2 tangent-bundle jet transition; equals the
/// constant 1 for every invertible chart map (canonical determinant
/// trivialization of the order-2 tangent jet bundle).
pub fn det_jet_transition(phi: &TruncSeries) -> Result<TruncSeries> {
    let t = jet_transition_matrix(phi, BundleSymbol::tx(), 2)?;
    Ok(det3_series(&t))
}

/// Exact rational-function variant of the determinant trivialization.
pub fn det_jet_transition_rat(phi: &RatFunc) -> Result<RatFunc> {
    let t = jet_transition_matrix_rat(phi, BundleSymbol::tx(), 2)?;
    Ok(t.det())
}

fn det3_series(t: &[Vec<TruncSeries>]) -> TruncSeries {
    assert_eq!(t.len(), 3);
    let m = |i: usize, j: usize| t[i][j].clone();
    let term = |a: TruncSeries, b: TruncSeries, c: TruncSeries| a.mul(&b).mul(&c);
    term(m(0, 0), m(1, 1), m(2, 2))
        .add(&term(m(0, 1), m(1, 2), m(2, 0)))
        .add(&term(m(0, 2), m(1, 0), m(2, 1)))
        .sub(&term(m(0, 2), m(1, 1), m(2, 0)))
        .sub(&term(m(0, 0), m(1, 2), m(2, 1)))
        .sub(&term(m(0, 1), m(1, 0), m(2, 2)))
}

/// Apply a rational transition matrix to a jet at the point p.
pub fn transition_apply(t: &Mat<RatFunc>, p: &Scalar, v: &JetVec) -> Result<JetVec> {
    let tp = t.eval(p)?;
    Ok(JetVec { comps: tp.matvec(&v.comps) })
}

/// z-chart representative of a section given by its w-chart representative g
/// under w = φ(z): f = (φ′)^b · (φ/z)^{−m} · (g∘φ).
pub fn pull_section(g_w: &RatFunc, phi: &RatFunc, lb: BundleSymbol) -> RatFunc {
    let dphi = phi.derivative();
    let mut u = dphi.pow(lb.b);
    if lb.m != 0 {
        u = u * (phi.clone() / RatFunc::x()).pow(-lb.m);
    }
    u * g_w.compose(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn series_of_poly(coeffs: &[i64], order: i64) -> TruncSeries {
        RatFunc::from_poly(Poly::from_ints(coeffs)).expand_at(&Scalar::int(0), order)
    }

    #[test]
    fn jets_are_raw_derivatives() {
        // f = z² at 0, order 2 → (0, 0, 2)
        let f = series_of_poly(&[0, 0, 1], 4);
        let j = jet_of(&f, 2, &Scalar::int(0)).unwrap();
        assert_eq!(j.comps, vec![Scalar::int(0), Scalar::int(0), Scalar::int(2)]);
        // f = z³ at 0, order 3 → (0,0,0,6)
        let f3 = series_of_poly(&[0, 0, 0, 1], 5);
        let j3 = jet_of(&f3, 3, &Scalar::int(0)).unwrap();
        assert_eq!(
            j3.comps,
            vec![Scalar::int(0), Scalar::int(0), Scalar::int(0), Scalar::int(6)]
        );
        // f = 1 + z at center 1 → (2, 1)
        let g = RatFunc::from_poly(Poly::from_ints(&[1, 1])).expand_at(&Scalar::int(1), 3);
        let jg = jet_of(&g, 1, &Scalar::int(1)).unwrap();
        assert_eq!(jg.comps, vec![Scalar::int(2), Scalar::int(1)]);
    }

    #[test]
    fn jet_of_pole_rejected() {
        let f = RatFunc::new(Poly::one(), Poly::from_ints(&[0, 1])).expand_at(&Scalar::int(0), 4);
        assert!(matches!(
            jet_of(&f, 2, &Scalar::int(0)),
            Err(Error::PoleAtPoint(_))
        ));
    }

    #[test]
    fn project_and_nest() {
        let v = JetVec::new(vec![
            Scalar::int(1),
            Scalar::int(2),
            Scalar::int(3),
            Scalar::int(4),
        ]);
        assert_eq!(
            jet_project(&v).comps,
            vec![Scalar::int(1), Scalar::int(2), Scalar::int(3)]
        );
        let (val, der) = nested_jet(&v);
        assert_eq!(val.comps, vec![Scalar::int(1), Scalar::int(2), Scalar::int(3)]);
        assert_eq!(der.comps, vec![Scalar::int(2), Scalar::int(3), Scalar::int(4)]);
        // injectivity: zero image forces zero jet
        let z = JetVec::new(vec![Scalar::int(0); 4]);
        let (a, b) = nested_jet(&z);
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn identity_and_translation_transitions() {
        let id = jet_transition_matrix_rat(&RatFunc::x(), BundleSymbol::tx(), 2).unwrap();
        assert_eq!(id, Mat::identity(3));
        // translation w = z + 5: jets of tangent fields transform trivially
        let shift = RatFunc::from_poly(Poly::from_ints(&[5, 1]));
        let t = jet_transition_matrix_rat(&shift, BundleSymbol::tx(), 2).unwrap();
        assert_eq!(t, Mat::identity(3));
    }

    #[test]
    fn scaling_transition_diagonal() {
        // w = a·z on TX at k = 2 → diag(a, 1, 1/a)
        let a = Scalar::int(7);
        let phi = RatFunc::from_poly(Poly::new(vec![Scalar::int(0), a.clone()]));
        let t = jet_transition_matrix_rat(&phi, BundleSymbol::tx(), 2).unwrap();
        let want = Mat::from_rows(vec![
            vec![RatFunc::constant(a.clone()), RatFunc::int(0), RatFunc::int(0)],
            vec![RatFunc::int(0), RatFunc::int(1), RatFunc::int(0)],
            vec![
                RatFunc::int(0),
                RatFunc::int(0),
                RatFunc::constant(a.inv().unwrap()),
            ],
        ]);
        assert_eq!(t, want);
    }

    #[test]
    fn naturality_for_rational_charts() {
        // T · jet_z(f) = jet_w(g) at corresponding points, f = pull_section(g).
        let charts = [
            RatFunc::from_poly(Poly::from_ints(&[1, 1])),            // z + 1
            RatFunc::from_poly(Poly::from_ints(&[0, 2])),            // 2z
            RatFunc::new(Poly::from_ints(&[0, 1]), Poly::from_ints(&[1, -1])), // z/(1−z)
            RatFunc::from_poly(Poly::from_ints(&[0, 1, 1])),         // z + z² (invertible near 0)
        ];
        let g_w = RatFunc::from_poly(Poly::from_ints(&[3, 0, 1])); // section rep in w chart
        let p = Scalar::ratio(1, 3);
        for lb in [BundleSymbol::tx(), BundleSymbol::k_power(2)] {
            for phi in &charts {
                let f_z = pull_section(&g_w, phi, lb);
                let t = jet_transition_matrix_rat(phi, lb, 2).unwrap();
                let fz_series = f_z.expand_at(&p, 4);
                let jz = jet_of(&fz_series, 2, &p).unwrap();
                let w_p = phi.eval(&p).unwrap();
                let gw_series = g_w.expand_at(&w_p, 4);
                let jw = jet_of(&gw_series, 2, &w_p).unwrap();
                let mapped = transition_apply(&t, &p, &jz).unwrap();
                assert_eq!(mapped, jw, "chart {phi}, bundle {lb:?}");
            }
        }
    }

    #[test]
    fn twisted_naturality_at_marked_point() {
        // m = 1 twist, chart w = 2z + z² fixing the marked point 0.
        let phi = RatFunc::from_poly(Poly::from_ints(&[0, 2, 1]));
        let lb = BundleSymbol::twisted_tx();
        let g_w = RatFunc::from_poly(Poly::from_ints(&[1, 1]));
        let f_z = pull_section(&g_w, &phi, lb);
        let t = jet_transition_matrix_rat(&phi, lb, 2).unwrap();
        // check naturality at a point near (but not at) the twist point
        let p = Scalar::ratio(1, 5);
        let jz = jet_of(&f_z.expand_at(&p, 4), 2, &p).unwrap();
        let w_p = phi.eval(&p).unwrap();
        let jw = jet_of(&g_w.expand_at(&w_p, 4), 2, &w_p).unwrap();
        assert_eq!(transition_apply(&t, &p, &jz).unwrap(), jw);
        // twisted transitions reject charts moving the marked point
        let bad = RatFunc::from_poly(Poly::from_ints(&[1, 1]));
        assert!(matches!(
            jet_transition_matrix_rat(&bad, lb, 2),
            Err(Error::NonInvertibleChart(_))
        ));
    }

    #[test]
    fn non_invertible_chart_rejected() {
        let phi = RatFunc::from_poly(Poly::from_ints(&[4])); // constant map
        assert!(matches!(
            jet_transition_matrix_rat(&phi, BundleSymbol::tx(), 2),
            Err(Error::NonInvertibleChart(_))
        ));
        let phi2 = series_of_poly(&[0, 0, 1], 6); // w = z², derivative vanishes at 0
        assert!(matches!(
            jet_transition_matrix(&phi2, BundleSymbol::tx(), 2),
            Err(Error::NonInvertibleChart(_))
        ));
    }

    #[test]
    fn determinant_trivialization() {
        // Möbius chart
        let moe = RatFunc::new(Poly::from_ints(&[0, 1]), Poly::from_ints(&[1, -1]));
        assert_eq!(det_jet_transition_rat(&moe).unwrap(), RatFunc::int(1));
        // non-Möbius invertible chart w = z + z²
        let phi = series_of_poly(&[0, 1, 1], 8);
        let d = det_jet_transition(&phi).unwrap();
        assert!(d.known_to() >= 4);
        assert_eq!(d.coeff(0), Scalar::int(1));
        for e in 1..d.known_to() {
            assert!(d.coeff(e).is_zero(), "exponent {e}");
        }
        // exact rational check for the same chart
        let phi_rat = RatFunc::from_poly(Poly::from_ints(&[0, 1, 1]));
        assert_eq!(det_jet_transition_rat(&phi_rat).unwrap(), RatFunc::int(1));
    }

    #[test]
    fn transitions_preserve_filtration() {
        // lower-triangularity ⇒ F² = {v₀=0} and F¹ = {v₀=v₁=0} are preserved
        let phi = RatFunc::new(Poly::from_ints(&[0, 1]), Poly::from_ints(&[1, -1]));
        let t = jet_transition_matrix_rat(&phi, BundleSymbol::tx(), 2).unwrap();
        let p = Scalar::ratio(1, 7);
        for v in StdFiltration::f1_basis() {
            let out = transition_apply(&t, &p, &JetVec::new(v)).unwrap();
            assert!(StdFiltration::in_f1(&out.comps));
        }
        for v in StdFiltration::f2_basis() {
            let out = transition_apply(&t, &p, &JetVec::new(v)).unwrap();
            assert!(StdFiltration::in_f2(&out.comps));
        }
    }

    #[test]
    fn functoriality_of_transitions() {
        // T(φ∘ψ) = (T(φ)∘ψ) · T(ψ) for rational charts.
        let psi = RatFunc::from_poly(Poly::from_ints(&[1, 1])); // y = z + 1
        let phi = RatFunc::from_poly(Poly::from_ints(&[0, 3])); // w = 3y
        let comp = phi.compose(&psi);
        let lb = BundleSymbol::k_power(2);
        let t_comp = jet_transition_matrix_rat(&comp, lb, 3).unwrap();
        let t_psi = jet_transition_matrix_rat(&psi, lb, 3).unwrap();
        let t_phi = jet_transition_matrix_rat(&phi, lb, 3).unwrap();
        let t_phi_at_psi = t_phi.map(|e| e.compose(&psi));
        assert_eq!(t_comp, t_phi_at_psi.mul(&t_psi));
    }
}
