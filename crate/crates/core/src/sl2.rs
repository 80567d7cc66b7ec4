use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::{Rat, Scalar};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Polynomial vector field `p(z)·∂z` on the affine chart.
///
/// The global fields of the projective line have deg ≤ 2 (basis
/// ∂z, z∂z, z²∂z); the type itself admits any polynomial coefficient so that
/// checkers can feed it non-global fields too.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorFieldPoly {
    pub p: Poly,
}

impl VectorFieldPoly {
    pub fn new(p: Poly) -> Self {
        VectorFieldPoly { p }
    }

    pub fn zero() -> Self {
        VectorFieldPoly { p: Poly::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    /// Basis field z^j·∂z for j = 0, 1, 2.
    pub fn basis(j: usize) -> Self {
        assert!(j <= 2);
        let mut c = vec![Scalar::int(0); j + 1];
        c[j] = Scalar::int(1);
        VectorFieldPoly { p: Poly::new(c) }
    }
}

impl std::fmt::Display for VectorFieldPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})·d/dz", self.p)
    }
}

/// Lie bracket of vector fields: [u∂, v∂] = (u·v′ − v·u′)·∂.
pub fn vf_bracket(u: &VectorFieldPoly, v: &VectorFieldPoly) -> VectorFieldPoly {
    VectorFieldPoly {
        p: u.p.clone() * v.p.derivative() - v.p.clone() * u.p.derivative(),
    }
}

/// Trace-free 2×2 matrix (an element of the Lie algebra of the projective
/// automorphism group).  The trace condition is checked where it matters
/// (`sl2_to_vf`), so near-miss inputs surface as typed errors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Sl2Elt {
    pub m: Mat<Scalar>,
}

impl Sl2Elt {
    pub fn new(m: Mat<Scalar>) -> Self {
        assert_eq!((m.rows, m.cols), (2, 2), "2×2 matrix required");
        Sl2Elt { m }
    }

    pub fn from_entries(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Self {
        Sl2Elt::new(Mat::from_rows(vec![vec![a, b], vec![c, d]]))
    }

    pub fn e() -> Self {
        Sl2Elt::new(Mat::from_i64(&[&[0, 1], &[0, 0]]))
    }

    pub fn h() -> Self {
        Sl2Elt::new(Mat::from_i64(&[&[1, 0], &[0, -1]]))
    }

    pub fn f() -> Self {
        Sl2Elt::new(Mat::from_i64(&[&[0, 0], &[1, 0]]))
    }

    pub fn is_traceless(&self) -> bool {
        self.m.trace().is_zero()
    }
}

/// The bracket on trace-free matrices transported from vector fields through
/// `sl2_to_vf` (flow-generator convention): [M, N] = N·M − M·N.
///
/// With this bracket `sl2_to_vf` is a Lie-algebra isomorphism; with the
/// matrix commutator M·N − N·M it would be an anti-isomorphism, because
/// differentiating a left action reverses brackets.
pub fn sl2_bracket(x: &Sl2Elt, y: &Sl2Elt) -> Sl2Elt {
    Sl2Elt::new(y.m.mul(&x.m).sub(&x.m.mul(&y.m)))
}

/// Generator of the flow induced on the affine coordinate by `exp(t·M)`:
/// (a, b; c, d) ↦ (b + (a − d)·z − c·z²)·∂z.
pub fn sl2_to_vf(m: &Sl2Elt) -> Result<VectorFieldPoly> {
    let tr = m.m.trace();
    if !tr.is_zero() {
        return Err(Error::NonTraceless(format!("trace = {tr}")));
    }
    let a = m.m.at(0, 0).clone();
    let b = m.m.at(0, 1).clone();
    let c = m.m.at(1, 0).clone();
    let d = m.m.at(1, 1).clone();
    Ok(VectorFieldPoly {
        p: Poly::new(vec![b, a - d, -c]),
    })
}

/// Express a vector field with deg ≤ 2 coefficient in the basis
/// (∂z, z∂z, z²∂z); None if the degree exceeds 2.
fn vf_coords(v: &VectorFieldPoly) -> Option<[Scalar; 3]> {
    if v.p.deg().unwrap_or(0) > 2 {
        return None;
    }
    Some([v.p.coeff(0), v.p.coeff(1), v.p.coeff(2)])
}

/// Killing-form Gram matrix in the basis (∂z, z∂z, z²∂z), computed literally
/// as κ_{jk} = trace(ad(u_j) ∘ ad(u_k)) from the structure constants of
/// `vf_bracket`.
pub fn killing_matrix() -> Mat<Scalar> {
    let basis: Vec<VectorFieldPoly> = (0..3).map(VectorFieldPoly::basis).collect();
    let ads: Vec<Mat<Scalar>> = basis
        .iter()
        .map(|x| {
            // ad(x): columns = coordinates of [x, u_k]
            let cols: Vec<[Scalar; 3]> = basis
                .iter()
                .map(|u| vf_coords(&vf_bracket(x, u)).expect("bracket stays deg ≤ 2"))
                .collect();
            let mut m = Mat::zero(3, 3);
            for (k, col) in cols.iter().enumerate() {
                for (i, entry) in col.iter().enumerate() {
                    m.set(i, k, entry.clone());
                }
            }
            m
        })
        .collect();
    let mut gram = Mat::zero(3, 3);
    for j in 0..3 {
        for k in 0..3 {
            gram.set(j, k, ads[j].mul(&ads[k]).trace());
        }
    }
    gram
}

/// Killing-form Gram matrix in the trace-free matrix basis (E, H, F),
/// computed the same way from the transported bracket.  (The Gram matrix is
/// independent of the bracket's sign convention.)
pub fn killing_matrix_w() -> Mat<Scalar> {
    let basis = [Sl2Elt::e(), Sl2Elt::h(), Sl2Elt::f()];
    // coordinates of [[α, β], [γ, −α]] in (E, H, F): (β, α, γ)
    let coords = |m: &Sl2Elt| -> [Scalar; 3] {
        [
            m.m.at(0, 1).clone(),
            m.m.at(0, 0).clone(),
            m.m.at(1, 0).clone(),
        ]
    };
    let ads: Vec<Mat<Scalar>> = basis
        .iter()
        .map(|x| {
            let mut m = Mat::zero(3, 3);
            for (k, u) in basis.iter().enumerate() {
                let col = coords(&sl2_bracket(x, u));
                for (i, entry) in col.iter().enumerate() {
                    m.set(i, k, entry.clone());
                }
            }
            m
        })
        .collect();
    let mut gram = Mat::zero(3, 3);
    for j in 0..3 {
        for k in 0..3 {
            gram.set(j, k, ads[j].mul(&ads[k]).trace());
        }
    }
    gram
}

/// Projective-linear transformation of the line, stored as a 2×2 matrix with
/// nonzero determinant in a canonical projective scaling: entries are
/// coprime Gaussian integers and the first nonzero entry lies in the
/// canonical half-plane (positive real part, or zero real part and positive
/// imaginary part).  Structural equality is therefore projective equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MoebiusMap {
    m: Mat<Scalar>,
}

impl MoebiusMap {
    pub fn new(m: Mat<Scalar>) -> Option<Self> {
        assert_eq!((m.rows, m.cols), (2, 2), "2×2 matrix required");
        if m.det().is_zero() {
            return None;
        }
        Some(MoebiusMap { m: canonical_projective(&m) })
    }

    pub fn from_entries(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Option<Self> {
        MoebiusMap::new(Mat::from_rows(vec![vec![a, b], vec![c, d]]))
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Option<Self> {
        MoebiusMap::new(Mat::from_i64(&[&[a, b], &[c, d]]))
    }

    pub fn identity() -> Self {
        MoebiusMap::new(Mat::identity(2)).expect("identity is invertible")
    }

    pub fn matrix(&self) -> &Mat<Scalar> {
        &self.m
    }

    /// The action on the affine coordinate: z ↦ (a·z + b)/(c·z + d).
    pub fn to_ratfunc(&self) -> RatFunc {
        let a = self.m.at(0, 0).clone();
        let b = self.m.at(0, 1).clone();
        let c = self.m.at(1, 0).clone();
        let d = self.m.at(1, 1).clone();
        RatFunc::new(
            Poly::new(vec![b, a]),
            Poly::new(vec![d, c]),
        )
    }

    pub fn apply(&self, z: &Scalar) -> Result<Scalar> {
        self.to_ratfunc().eval(z)
    }

    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        MoebiusMap::new(self.m.mul(&other.m)).expect("product of invertibles")
    }

    pub fn inverse(&self) -> MoebiusMap {
        let a = self.m.at(0, 0).clone();
        let b = self.m.at(0, 1).clone();
        let c = self.m.at(1, 0).clone();
        let d = self.m.at(1, 1).clone();
        MoebiusMap::new(Mat::from_rows(vec![vec![d, -b], vec![-c, a]]))
            .expect("adjugate of invertible")
    }
}

impl std::fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_ratfunc())
    }
}

/// Recognize a rational function as a projective-linear map: returns the
/// matrix iff f = (a·z + b)/(c·z + d) with a·d − b·c ≠ 0.
pub fn is_moebius(f: &RatFunc) -> Option<MoebiusMap> {
    if f.is_zero() {
        return None;
    }
    let num = f.num();
    let den = f.den();
    if num.deg().unwrap_or(0) > 1 || den.deg().unwrap_or(0) > 1 {
        return None;
    }
    let a = num.coeff(1);
    let b = num.coeff(0);
    let c = den.coeff(1);
    let d = den.coeff(0);
    MoebiusMap::from_entries(a, b, c, d)
}

// ---- canonical projective scaling over the Gaussian integers ----

#[derive(Clone, PartialEq, Eq)]
struct GInt(BigInt, BigInt); // a + b·i

impl GInt {
    fn is_zero(&self) -> bool {
        self.0.is_zero() && self.1.is_zero()
    }
    fn norm(&self) -> BigInt {
        &self.0 * &self.0 + &self.1 * &self.1
    }
    fn mul(&self, o: &GInt) -> GInt {
        GInt(&self.0 * &o.0 - &self.1 * &o.1, &self.0 * &o.1 + &self.1 * &o.0)
    }
    fn conj(&self) -> GInt {
        GInt(self.0.clone(), -self.1.clone())
    }
    fn sub(&self, o: &GInt) -> GInt {
        GInt(&self.0 - &o.0, &self.1 - &o.1)
    }
}

fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    // nearest integer to n/d, exact arithmetic
    let num: BigInt = n * 2 + d;
    let den: BigInt = d * 2;
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    if r.is_negative() {
        q - 1
    } else {
        q
    }
}

/// Nearest-Gaussian-integer division, then Euclidean gcd.
fn g_gcd(a: &GInt, b: &GInt) -> GInt {
    let mut x = a.clone();
    let mut y = b.clone();
    while !y.is_zero() {
        let n = x.mul(&y.conj());
        let d = y.norm();
        let q = GInt(round_div(&n.0, &d), round_div(&n.1, &d));
        let r = x.sub(&q.mul(&y));
        x = y;
        y = r;
    }
    x
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::lcm(a, b)
}

/// Scale a nonzero matrix so entries are coprime Gaussian integers with the
/// first nonzero entry in the canonical half-plane.
fn canonical_projective(m: &Mat<Scalar>) -> Mat<Scalar> {
    // clear denominators
    let mut l = BigInt::one();
    for i in 0..m.rows {
        for j in 0..m.cols {
            let e = m.at(i, j);
            l = lcm_big(&l, e.re.denom());
            l = lcm_big(&l, e.im.denom());
        }
    }
    let lr = Rat::from_integer(l);
    let ints: Vec<GInt> = (0..m.rows)
        .flat_map(|i| (0..m.cols).map(move |j| (i, j)))
        .map(|(i, j)| {
            let e = m.at(i, j);
            GInt((&e.re * &lr).to_integer(), (&e.im * &lr).to_integer())
        })
        .collect();
    // divide by gcd content
    let mut g = GInt(BigInt::zero(), BigInt::zero());
    for e in &ints {
        if !e.is_zero() {
            g = if g.is_zero() { e.clone() } else { g_gcd(&g, e) };
        }
    }
    assert!(!g.is_zero(), "zero matrix has no projective scaling");
    let gn = g.norm();
    let reduced: Vec<GInt> = ints
        .iter()
        .map(|e| {
            let p = e.mul(&g.conj());
            GInt(
                num_integer::Integer::div_floor(&p.0, &gn),
                num_integer::Integer::div_floor(&p.1, &gn),
            )
        })
        .collect();
    // unit normalization on the first nonzero entry
    let first = reduced.iter().find(|e| !e.is_zero()).expect("nonzero matrix");
    let unit = pick_unit(first);
    let out: Vec<Scalar> = reduced
        .iter()
        .map(|e| {
            let u = e.mul(&unit);
            Scalar::new(Rat::from_integer(u.0), Rat::from_integer(u.1))
        })
        .collect();
    Mat::from_rows(vec![out[0..2].to_vec(), out[2..4].to_vec()])
}

/// Unit u ∈ {1, i, −1, −i} making u·e have positive real part, or zero real
/// part and positive imaginary part.
fn pick_unit(e: &GInt) -> GInt {
    let candidates = [
        GInt(BigInt::one(), BigInt::zero()),
        GInt(BigInt::zero(), BigInt::one()),
        GInt(-BigInt::one(), BigInt::zero()),
        GInt(BigInt::zero(), -BigInt::one()),
    ];
    for u in candidates {
        let p = e.mul(&u);
        if p.0.is_positive() || (p.0.is_zero() && p.1.is_positive()) {
            return u;
        }
    }
    unreachable!("some unit multiple lands in the half-plane");
}
