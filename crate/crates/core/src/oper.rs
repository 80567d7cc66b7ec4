//! The unbranched oper layer: monic third-order operators on vector fields,
//! their companion connections on the order-2 tangent jet bundle, the
//! canonical bilinear pairing, and the checkers (filtration conditions,
//! second fundamental forms, determinant triviality, bracket closure,
//! Möbius equivariance) that single out projective structures.

use crate::error::{Error, Result};
use crate::jet::{jet_of, BundleSymbol, JetFrame, JetVec};
use crate::jet::jet_transition_matrix_rat;
use crate::matrix::Mat;
use crate::ode::{solve_flat_sections, solve_scalar_ode3};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::series::TruncSeries;
use crate::sl2::{killing_matrix, MoebiusMap};

/// Monic third-order differential operator on vector fields,
/// f·∂z ↦ (f‴ + a2·f″ + a1·f′ + a0·f)·(dz)²; the leading coefficient is
/// fixed at 1, so the operator is determined by the lower coefficient triple.
#[derive(Clone, PartialEq, Debug)]
pub struct ThirdOrderOp {
    pub a2: RatFunc,
    pub a1: RatFunc,
    pub a0: RatFunc,
}

impl ThirdOrderOp {
    pub fn new(a2: RatFunc, a1: RatFunc, a0: RatFunc) -> Self {
        ThirdOrderOp { a2, a1, a0 }
    }

    pub fn from_polys(a2: Poly, a1: Poly, a0: Poly) -> Self {
        ThirdOrderOp::new(
            RatFunc::from_poly(a2),
            RatFunc::from_poly(a1),
            RatFunc::from_poly(a0),
        )
    }

    /// Coefficient row (a0, a1, a2, 1) acting on order-3 jets.
    pub fn row(&self) -> [RatFunc; 4] {
        [self.a0.clone(), self.a1.clone(), self.a2.clone(), RatFunc::int(1)]
    }

    /// Apply to a rational coefficient function.
    pub fn apply_rat(&self, f: &RatFunc) -> RatFunc {
        let d1 = f.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        d3 + self.a2.clone() * d2 + self.a1.clone() * d1 + self.a0.clone() * f.clone()
    }

    /// Apply to a truncated series (coefficients expanded at the series
    /// center); the result loses three orders of precision, as a third
    /// derivative must.
    pub fn apply_series(&self, f: &TruncSeries) -> TruncSeries {
        let kt = f.known_to();
        let c = &f.center;
        let d1 = f.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        d3.add(&self.a2.expand_at(c, kt).mul(&d2))
            .add(&self.a1.expand_at(c, kt).mul(&d1))
            .add(&self.a0.expand_at(c, kt).mul(f))
    }

    /// Value on an order-3 jet at the point `p`:
    /// f‴ + a2(p)·f″ + a1(p)·f′ + a0(p)·f.  With zero coefficients this is
    /// the left inverse of the inclusion that realizes a quadratic-twist
    /// value c as the jet (0,0,0,c).
    pub fn on_jet3(&self, j: &JetVec, p: &Scalar) -> Result<Scalar> {
        assert_eq!(j.order(), 3, "order-3 jet expected");
        Ok(j.comps[3].clone()
            + self.a2.eval(p)? * j.comps[2].clone()
            + self.a1.eval(p)? * j.comps[1].clone()
            + self.a0.eval(p)? * j.comps[0].clone())
    }

    pub fn is_holomorphic_at(&self, p: &Scalar) -> bool {
        self.a2.is_holomorphic_at(p) && self.a1.is_holomorphic_at(p) && self.a0.is_holomorphic_at(p)
    }
}

/// Connection on the order-2 tangent jet bundle in a chart frame.
/// Flatness convention: a section v is flat iff v′ + A·v = 0.
#[derive(Clone, PartialEq, Debug)]
pub struct Connection {
    pub a: Mat<RatFunc>,
    pub frame: JetFrame,
}

impl Connection {
    /// Connection in the standard affine chart frame.
    pub fn in_affine_chart(a: Mat<RatFunc>) -> Self {
        assert_eq!((a.rows, a.cols), (3, 3), "order-2 jet connection is 3×3");
        Connection { a, frame: JetFrame::affine(BundleSymbol::tx()) }
    }
}

/// Symmetric bilinear pairing on the order-2 jet bundle, with values allowed
/// a pole divisor of multiplicity `twist` at marked points.
#[derive(Clone, PartialEq, Debug)]
pub struct BilinearTwisted {
    pub mat: Mat<RatFunc>,
    pub twist: i64,
}

impl BilinearTwisted {
    /// Validates exact symmetry and nondegeneracy (determinant nonzero as a
    /// rational function).
    pub fn new(mat: Mat<RatFunc>, twist: i64) -> Result<Self> {
        if mat.transpose() != mat {
            return Err(Error::ConditionViolation("bilinear matrix is not symmetric".into()));
        }
        if mat.det().is_zero() {
            return Err(Error::ConditionViolation("bilinear matrix is degenerate".into()));
        }
        Ok(BilinearTwisted { mat, twist })
    }

    pub fn apply(&self, v: &[Scalar], w: &[Scalar], p: &Scalar) -> Result<Scalar> {
        let m = self.mat.eval(p)?;
        let mw = m.matvec(w);
        let mut acc = Scalar::int(0);
        for (a, b) in v.iter().zip(mw) {
            acc += a.clone() * b;
        }
        Ok(acc)
    }
}

/// Jet matrix of the global vector-field basis (∂z, z·∂z, z²·∂z): column j
/// holds the order-k jet of the coefficient function z^j.  For k = 2 this is
/// the frame G(z) = [[1,z,z²],[0,1,2z],[0,0,2]] identifying the jet bundle
/// with the trivial rank-3 bundle, with constant determinant 2.
pub fn psi_matrix(k: usize) -> Mat<Poly> {
    assert!(k == 2 || k == 3, "jet order must be 2 or 3");
    let rows: Vec<Vec<Poly>> = (0..=k)
        .map(|i| {
            (0..3usize)
                .map(|j| {
                    let mut p = Poly::new(vec![Scalar::int(0); j].into_iter().chain([Scalar::int(1)]).collect());
                    for _ in 0..i {
                        p = p.derivative();
                    }
                    p
                })
                .collect()
        })
        .collect();
    Mat::from_rows(rows)
}

/// The canonical order-three operator with zero lower coefficients:
/// f·∂z ↦ f‴·(dz)².  Its kernel is spanned by the global fields 1, z, z².
pub fn delta0() -> ThirdOrderOp {
    ThirdOrderOp::new(RatFunc::int(0), RatFunc::int(0), RatFunc::int(0))
}

/// Companion connection of a monic third-order operator: the unique
/// connection whose flat sections are exactly the order-2 jet curves
/// (s, s′, s″) of solutions of the operator.
pub fn varpi(op: &ThirdOrderOp) -> Connection {
    let z = RatFunc::int(0);
    let m1 = RatFunc::int(-1);
    Connection::in_affine_chart(Mat::from_rows(vec![
        vec![z.clone(), m1.clone(), z.clone()],
        vec![z.clone(), z.clone(), m1],
        vec![op.a0.clone(), op.a1.clone(), op.a2.clone()],
    ]))
}

/// The canonical flat connection: companion of the zero-coefficient operator.
pub fn canonical_connection() -> Connection {
    varpi(&delta0())
}

/// Results of the three defining conditions on an oper connection.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct OperConditions {
    /// The connection maps the deepest filtration step into the next one
    /// (no component onto the quotient line).
    pub c1: bool,
    /// The second fundamental form at the deepest step is the constant 1.
    pub c2: bool,
    /// The second fundamental form on the middle graded piece is the
    /// constant 1.
    pub c3: bool,
}

impl OperConditions {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3
    }
}

/// Filtration conditions for the standard jet filtration
/// F¹ = span(ê₂) ⊂ F² = span(ê₁, ê₂): with flatness v′ + A·v = 0,
/// ∇(F¹) ⊆ F²⊗K iff A[0][2] ≡ 0, and the two second fundamental forms are
/// read off the (1,2)- and (0,1)-entries (canonical normalization below).
pub fn oper_conditions(d: &Connection) -> OperConditions {
    let one = RatFunc::int(1);
    let c1 = d.a.at(0, 2).is_zero();
    let c2 = sff(d, 1).is_ok_and(|s| s == one);
    let c3 = sff(d, 2).is_ok_and(|s| s == one);
    OperConditions { c1, c2, c3 }
}

/// Second fundamental form of the filtration step `level` (1 = deepest line
/// F¹ into F²/F¹; 2 = middle graded piece F²/F¹ into J²/F²), as a rational
/// function under the canonical identification of both graded lines with the
/// trivial bundle — normalized so the canonical connection yields +1.
///
/// Level 2 is only defined once the connection maps F¹ into F² (otherwise
/// the induced map on the quotient is ill-defined): `NotNested`.
pub fn sff(d: &Connection, level: u8) -> Result<RatFunc> {
    match level {
        1 => Ok(-d.a.at(1, 2).clone()),
        2 => {
            if !d.a.at(0, 2).is_zero() {
                return Err(Error::NotNested);
            }
            Ok(-d.a.at(0, 1).clone())
        }
        _ => panic!("filtration level must be 1 or 2"),
    }
}

/// Canonical symmetric pairing on order-2 tangent jets: transport of the
/// Killing form of the global vector fields through the jet frame,
/// B = (G^{-1})ᵀ·κ·G^{-1}.  Constant, nondegenerate, and parallel for the
/// canonical connection; the deepest filtration line is isotropic and its
/// orthogonal complement is the middle filtration step.
pub fn killing_form_b0() -> BilinearTwisted {
    let g = psi_matrix(2).map(|p| RatFunc::from_poly(p.clone()));
    let ginv = g.inverse().expect("jet frame is invertible");
    let kappa = Mat::from_scalars(&killing_matrix());
    let mat = ginv.transpose().mul(&kappa).mul(&ginv);
    BilinearTwisted::new(mat, 0).expect("canonical pairing is symmetric and nondegenerate")
}

/// Sample points for generic-position checks, consumed in order; poles of
/// the object under test are skipped.
fn generic_points() -> Vec<Scalar> {
    let mut pts = vec![
        Scalar::ratio(1, 3),
        Scalar::ratio(-2, 5),
        Scalar::ratio(3, 7),
        Scalar::ratio(1, 2),
        Scalar::int(-1),
        Scalar::int(2),
        Scalar::ratio(5, 3),
        Scalar::ratio(-7, 2),
        Scalar::int(4),
        Scalar::ratio(-5, 4),
    ];
    for n in 5..35 {
        pts.push(Scalar::ratio(2 * n + 1, n));
    }
    pts
}

/// The tautology test for jet-bundle connections: flat-extend each basis
/// vector v at a generic point, take the lowest component of the extension,
/// and re-jet it to order 2; the connection passes iff the re-jet equals v
/// for all basis vectors (checked at 3 generic rational points, solving to
/// `n` series coefficients).
pub fn f_d_is_identity(d: &Connection, n: i64) -> bool {
    let order = n.max(4);
    let mut tested = 0usize;
    for p in generic_points() {
        if tested == 3 {
            break;
        }
        if !d.a.is_holomorphic_at(&p) {
            continue;
        }
        tested += 1;
        for b in 0..3usize {
            let mut init = vec![Scalar::int(0); 3];
            init[b] = Scalar::int(1);
            let Ok(sols) = solve_flat_sections(&d.a, &p, &init, order) else {
                return false;
            };
            let Ok(rejet) = jet_of(&sols[0], 2, &p) else {
                return false;
            };
            if rejet.comps != init {
                return false;
            }
        }
    }
    tested == 3
}

/// The induced connection on the determinant line is the trivial one iff the
/// trace vanishes identically.
pub fn det_connection_trivial(d: &Connection) -> bool {
    d.a.trace().is_zero()
}

/// Bracket-closure of the solution space at the basepoint 0 (series check,
/// exact arithmetic): build three independent formal solutions, bracket each
/// pair as vector-field coefficients (u·v′ − v·u′), apply the operator, and
/// require vanishing through series order `n`.
pub fn bracket_closure(op: &ThirdOrderOp, n: i64) -> Result<bool> {
    let p = Scalar::int(0);
    if !op.is_holomorphic_at(&p) {
        return Err(Error::PoleAtBasepoint(
            "operator coefficients must be regular at the basepoint 0".into(),
        ));
    }
    bracket_closure_at(op, &p, n)
}

/// Bracket-closure at an arbitrary regular basepoint.
pub fn bracket_closure_at(op: &ThirdOrderOp, p: &Scalar, n: i64) -> Result<bool> {
    if !op.is_holomorphic_at(p) {
        return Err(Error::PoleAtBasepoint(format!(
            "operator coefficients must be regular at the basepoint {p}"
        )));
    }
    let coeffs = [op.a0.clone(), op.a1.clone(), op.a2.clone()];
    // Margin: the bracket costs one derivative and the operator three, so
    // n+5 solution coefficients pin the result exactly through order n.
    let order = n + 5;
    let mut sols = Vec::with_capacity(3);
    for b in 0..3usize {
        let mut init = [Scalar::int(0), Scalar::int(0), Scalar::int(0)];
        init[b] = Scalar::int(1);
        sols.push(solve_scalar_ode3(&coeffs, p, &init, order)?);
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let u = &sols[i];
            let v = &sols[j];
            let w = u.mul(&v.derivative()).sub(&v.mul(&u.derivative()));
            let res = op.apply_series(&w);
            assert!(res.known_to() > n, "insufficient series precision");
            for e in res.val()..=n {
                if !res.coeff(e).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A monic third-order operator defines a projective structure iff its
/// companion connection has trivial determinant and its solution space is
/// closed under the vector-field bracket.
pub fn projective_operator_check(op: &ThirdOrderOp) -> Result<bool> {
    Ok(det_connection_trivial(&varpi(op)) && bracket_closure(op, 8)?)
}

/// Transport of a jet-bundle connection matrix under the chart change
/// w = φ(z): with T the order-2 jet transition (z-jets to w-jets),
/// A_z = T⁻¹·T′ + φ′·T⁻¹·(A∘φ)·T.
pub fn pullback_connection(a_w: &Mat<RatFunc>, phi: &RatFunc) -> Result<Mat<RatFunc>> {
    let t = jet_transition_matrix_rat(phi, BundleSymbol::tx(), 2)?;
    let tinv = t
        .inverse()
        .ok_or_else(|| Error::NonInvertibleChart("jet transition is singular".into()))?;
    let dphi = phi.derivative();
    let a_comp = a_w.map(|f| f.compose(phi));
    Ok(tinv.mul(&t.derivative()).add(&tinv.mul(&a_comp).mul(&t).scale(&dphi)))
}

/// Transport of a monic third-order operator under w = φ(z): the coefficient
/// row transforms by R_z = (φ′)²·(R∘φ)·T₃ with T₃ the order-3 tangent jet
/// transition; the leading coefficient is preserved (symbol 1 stays 1).
pub fn pullback_operator(op_w: &ThirdOrderOp, phi: &RatFunc) -> Result<ThirdOrderOp> {
    let t3 = jet_transition_matrix_rat(phi, BundleSymbol::tx(), 3)?;
    let dphi2 = phi.derivative().pow(2);
    let row_w = op_w.row();
    let mut row_z = vec![RatFunc::int(0); 4];
    for (j, slot) in row_z.iter_mut().enumerate() {
        let mut acc = RatFunc::int(0);
        for (k, rw) in row_w.iter().enumerate() {
            acc = acc + rw.compose(phi) * t3.at(k, j).clone();
        }
        *slot = acc * dphi2.clone();
    }
    let lead = row_z[3].clone();
    if lead.is_zero() {
        return Err(Error::NonInvertibleChart("transported operator lost its symbol".into()));
    }
    Ok(ThirdOrderOp::new(
        row_z[2].clone() / lead.clone(),
        row_z[1].clone() / lead.clone(),
        row_z[0].clone() / lead,
    ))
}

/// Transport of a jet-bundle bilinear pairing under w = φ(z):
/// B_z = (φ′)^weight · Tᵀ·(B∘φ)·T, where `weight` is the power of the
/// canonical bundle twisting the values (0 for function-valued pairings).
pub fn pullback_bilinear(
    b_w: &Mat<RatFunc>,
    phi: &RatFunc,
    weight: i64,
) -> Result<Mat<RatFunc>> {
    let t = jet_transition_matrix_rat(phi, BundleSymbol::tx(), 2)?;
    let b_comp = b_w.map(|f| f.compose(phi));
    Ok(t.transpose()
        .mul(&b_comp)
        .mul(&t)
        .scale(&phi.derivative().pow(weight)))
}

/// Equivariance flags of the three canonical objects under a Möbius map.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct MoebiusEquivariance {
    pub delta0: bool,
    pub d0: bool,
    pub b0: bool,
}

/// Pull the canonical operator, connection, and pairing back through the
/// chart change w = g(z) and compare with the originals as exact rational
/// identities.
pub fn moebius_equivariance_check(g: &MoebiusMap) -> Result<MoebiusEquivariance> {
    let phi = g.to_ratfunc();
    let op = delta0();
    let d0_mat = canonical_connection().a;
    let b0_mat = killing_form_b0().mat;
    Ok(MoebiusEquivariance {
        delta0: pullback_operator(&op, &phi)? == op,
        d0: pullback_connection(&d0_mat, &phi)? == d0_mat,
        b0: pullback_bilinear(&b0_mat, &phi, 0)? == b0_mat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::mat3;
    use crate::ode::{bilinear_is_parallel, connection_from_flat_frame};

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(Poly::from_ints(n), Poly::from_ints(d))
    }

    fn rp(n: &[i64]) -> RatFunc {
        RatFunc::from_poly(Poly::from_ints(n))
    }

    #[test]
    fn jet_frame_matrix_order2() {
        let g = psi_matrix(2);
        let want = mat3([
            [Poly::from_ints(&[1]), Poly::from_ints(&[0, 1]), Poly::from_ints(&[0, 0, 1])],
            [Poly::from_ints(&[0]), Poly::from_ints(&[1]), Poly::from_ints(&[0, 2])],
            [Poly::from_ints(&[0]), Poly::from_ints(&[0]), Poly::from_ints(&[2])],
        ]);
        assert_eq!(g, want);
        // Constant nonzero determinant: fiberwise isomorphism.
        assert_eq!(g.det(), Poly::from_ints(&[2]));
        // Evaluation at the origin.
        let g0 = g.map(|p| p.eval(&Scalar::int(0)));
        assert_eq!(g0, Mat::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]]));
    }

    #[test]
    fn jet_frame_matrix_order3_bottom_row_vanishes() {
        let g = psi_matrix(3);
        assert_eq!((g.rows, g.cols), (4, 3));
        for j in 0..3 {
            assert!(g.at(3, j).is_zero(), "third derivatives of 1, z, z² vanish");
        }
    }

    #[test]
    fn canonical_operator_values() {
        let op = delta0();
        // z² is annihilated; z³ maps to the constant 6.
        assert!(op.apply_rat(&rp(&[0, 0, 1])).is_zero());
        assert_eq!(op.apply_rat(&rp(&[0, 0, 0, 1])), rp(&[6]));
        // Left-inverse property on quadratic-twist values: (0,0,0,c) ↦ c.
        let c = Scalar::ratio(9, 7);
        let j = JetVec::new(vec![Scalar::int(0), Scalar::int(0), Scalar::int(0), c.clone()]);
        assert_eq!(op.on_jet3(&j, &Scalar::ratio(1, 5)).unwrap(), c);
    }

    #[test]
    fn companion_of_canonical_operator_matches_flat_frame_oracle() {
        let d0 = canonical_connection();
        // Independent oracle: A = −G′·G⁻¹ for the flat frame G = psi_matrix(2).
        let g = psi_matrix(2).map(|p| RatFunc::from_poly(p.clone()));
        let a = connection_from_flat_frame(&g).unwrap();
        assert_eq!(d0.a, a);
        assert_eq!(
            d0.a,
            Mat::from_int_rows(&[&[0, -1, 0], &[0, 0, -1], &[0, 0, 0]])
        );
    }

    #[test]
    fn flat_section_with_quadratic_jet() {
        // Initial jet (0,0,2) at 0 integrates to (z², 2z, 2).
        let d0 = canonical_connection();
        let init = [Scalar::int(0), Scalar::int(0), Scalar::int(2)];
        let sols = solve_flat_sections(&d0.a, &Scalar::int(0), &init, 6).unwrap();
        assert!(sols[0].agrees_with(&rp(&[0, 0, 1]).expand_at(&Scalar::int(0), 6)));
        assert!(sols[1].agrees_with(&rp(&[0, 2]).expand_at(&Scalar::int(0), 6)));
        assert!(sols[2].agrees_with(&rp(&[2]).expand_at(&Scalar::int(0), 6)));
    }

    #[test]
    fn flat_sections_are_solution_jet_curves() {
        // Generic operator: coefficients (a2, a1, a0) = (z, 1, 2z²).
        let op = ThirdOrderOp::from_polys(
            Poly::from_ints(&[0, 1]),
            Poly::from_ints(&[1]),
            Poly::from_ints(&[0, 0, 2]),
        );
        let d = varpi(&op);
        let p = Scalar::ratio(1, 4);
        let init = [Scalar::int(1), Scalar::int(-2), Scalar::int(3)];
        let sols = solve_flat_sections(&d.a, &p, &init, 12).unwrap();
        // v1 = v0′ and v2 = v0″ through the overlapping precision.
        assert!(sols[1].agrees_with(&sols[0].derivative()));
        assert!(sols[2].agrees_with(&sols[0].derivative().derivative()));
        // v0 solves the scalar equation: apply the operator, expect zero.
        let res = op.apply_series(&sols[0]);
        assert!(res.is_zero_known());
    }

    #[test]
    fn filtration_conditions_and_forms() {
        let d0 = canonical_connection();
        let c = oper_conditions(&d0);
        assert!(c.c1 && c.c2 && c.c3);
        assert_eq!(sff(&d0, 1).unwrap(), RatFunc::int(1));
        assert_eq!(sff(&d0, 2).unwrap(), RatFunc::int(1));

        // Any companion connection passes all three conditions.
        let op = ThirdOrderOp::from_polys(
            Poly::from_ints(&[5, 1]),
            Poly::from_ints(&[0, 3]),
            Poly::from_ints(&[7]),
        );
        assert!(oper_conditions(&varpi(&op)).all());

        // Doubling the (row 2, col 3) entry rescales the deepest-step form.
        let mut a = d0.a.clone();
        a.set(1, 2, RatFunc::int(-2));
        let c = oper_conditions(&Connection::in_affine_chart(a));
        assert!(c.c1 && !c.c2 && c.c3);

        // Doubling the (row 1, col 2) entry rescales the middle-step form.
        let mut a = d0.a.clone();
        a.set(0, 1, RatFunc::int(-2));
        let c = oper_conditions(&Connection::in_affine_chart(a));
        assert!(c.c1 && c.c2 && !c.c3);
    }

    #[test]
    fn form_scaling_and_nesting_failure() {
        // Scaling the deepest-step block by h is read back by the form.
        let h = rp(&[3, 0, 1]);
        let mut a = canonical_connection().a;
        a.set(1, 2, -h.clone());
        assert_eq!(sff(&Connection::in_affine_chart(a), 1).unwrap(), h);

        // A nonzero (row 1, col 3) entry destroys the level-2 form.
        let mut a = canonical_connection().a;
        a.set(0, 2, RatFunc::int(1));
        let d = Connection::in_affine_chart(a);
        assert!(!oper_conditions(&d).c1);
        assert!(matches!(sff(&d, 2), Err(Error::NotNested)));
        // Level 1 is still defined.
        assert_eq!(sff(&d, 1).unwrap(), RatFunc::int(1));
    }

    #[test]
    fn canonical_pairing_frozen_and_parallel() {
        let b0 = killing_form_b0();
        assert_eq!(b0.twist, 0);
        assert_eq!(
            b0.mat,
            Mat::from_int_rows(&[&[0, 0, -2], &[0, 2, 0], &[-2, 0, 0]])
        );
        // Deepest line isotropic; orthogonal to the middle step.
        assert!(b0.mat.at(2, 2).is_zero());
        assert!(b0.mat.at(2, 1).is_zero());
        // Nondegenerate with constant determinant.
        let det = b0.mat.det();
        assert_eq!(det, RatFunc::int(-8));
        // Parallel under the canonical connection.
        assert!(bilinear_is_parallel(&canonical_connection().a, &b0.mat));
    }

    #[test]
    fn rejet_tautology_checker() {
        assert!(f_d_is_identity(&canonical_connection(), 8));
        let op = ThirdOrderOp::from_polys(
            Poly::zero(),
            Poly::from_ints(&[0, 4]),
            Poly::from_ints(&[2]),
        );
        assert!(f_d_is_identity(&varpi(&op), 8));
        // A non-companion connection fails: flat extension of ê₁ has
        // lowest component with doubled first derivative.
        let a = Mat::from_int_rows(&[&[0, -2, 0], &[0, 0, -1], &[0, 0, 0]]);
        assert!(!f_d_is_identity(&Connection::in_affine_chart(a), 8));
    }

    #[test]
    fn determinant_connection_flag() {
        assert!(det_connection_trivial(&canonical_connection()));
        let with_a2 = ThirdOrderOp::from_polys(Poly::one(), Poly::zero(), Poly::zero());
        assert!(!det_connection_trivial(&varpi(&with_a2)));
        let no_a2 = ThirdOrderOp::from_polys(
            Poly::zero(),
            Poly::from_ints(&[1, 2, 3]),
            Poly::from_ints(&[-4, 5]),
        );
        assert!(det_connection_trivial(&varpi(&no_a2)));
    }

    #[test]
    fn bracket_closure_examples() {
        assert!(bracket_closure(&delta0(), 8).unwrap());
        // (0, 0, 1): solution space of f‴ + f = 0 is not bracket-closed.
        let bad = ThirdOrderOp::from_polys(Poly::zero(), Poly::zero(), Poly::one());
        assert!(!bracket_closure(&bad, 8).unwrap());
        // (0, 4z, 2): symmetric square of y″ + z·y = 0, bracket-closed.
        let sym = ThirdOrderOp::from_polys(
            Poly::zero(),
            Poly::from_ints(&[0, 4]),
            Poly::from_ints(&[2]),
        );
        assert!(bracket_closure(&sym, 10).unwrap());
        // Dropping the constant term breaks closure.
        let off = ThirdOrderOp::from_polys(Poly::zero(), Poly::from_ints(&[0, 4]), Poly::zero());
        assert!(!bracket_closure(&off, 8).unwrap());
        // Poles at the basepoint are rejected.
        let pole = ThirdOrderOp::new(RatFunc::int(0), RatFunc::int(0), rf(&[1], &[0, 1]));
        assert!(matches!(bracket_closure(&pole, 8), Err(Error::PoleAtBasepoint(_))));
        // ... but the same operator can be tested at a shifted basepoint.
        assert!(bracket_closure_at(&pole, &Scalar::int(1), 6).is_ok());
    }

    #[test]
    fn projective_operator_examples() {
        assert!(projective_operator_check(&delta0()).unwrap());
        let sym = ThirdOrderOp::from_polys(
            Poly::zero(),
            Poly::from_ints(&[0, 4]),
            Poly::from_ints(&[2]),
        );
        assert!(projective_operator_check(&sym).unwrap());
        let off = ThirdOrderOp::from_polys(Poly::zero(), Poly::from_ints(&[0, 4]), Poly::zero());
        assert!(!projective_operator_check(&off).unwrap());
    }

    #[test]
    fn companion_map_is_affine_in_the_operator() {
        let op = ThirdOrderOp::from_polys(
            Poly::from_ints(&[1, 1]),
            Poly::from_ints(&[0, 2]),
            Poly::from_ints(&[3]),
        );
        let th = (rp(&[0, 0, 5]), rp(&[-1]), rp(&[2, 2]));
        let shifted = ThirdOrderOp::new(
            op.a2.clone() + th.2.clone(),
            op.a1.clone() + th.1.clone(),
            op.a0.clone() + th.0.clone(),
        );
        let diff = varpi(&shifted).a.sub(&varpi(&op).a);
        let mut want = Mat::<RatFunc>::zero(3, 3);
        want.set(2, 0, th.0);
        want.set(2, 1, th.1);
        want.set(2, 2, th.2);
        assert_eq!(diff, want);
    }

    #[test]
    fn moebius_equivariance_of_canonical_objects() {
        let cases = [
            MoebiusMap::from_ints(1, 1, 0, 1).unwrap(), // z + 1
            MoebiusMap::from_ints(2, 0, 0, 1).unwrap(), // 2z
            MoebiusMap::identity(),
            MoebiusMap::from_ints(0, 1, 1, 0).unwrap(), // 1/z
            MoebiusMap::from_ints(2, 1, 1, -1).unwrap(), // (2z+1)/(z−1)
        ];
        for g in cases {
            let r = moebius_equivariance_check(&g).unwrap();
            assert!(r.delta0 && r.d0 && r.b0, "equivariance failed for {g:?}");
        }
    }

    #[test]
    fn non_moebius_chart_breaks_the_canonical_operator() {
        // w = z² is invertible away from 0 but not projective: the pulled-back
        // operator acquires lower-order terms (the classical obstruction).
        let phi = rp(&[0, 0, 1]);
        let pulled = pullback_operator(&delta0(), &phi).unwrap();
        assert_ne!(pulled, delta0());
        // The connection transport still preserves flatness structure:
        // companion of the pulled-back operator need not match, but the
        // symbol normalization must hold (leading row entry was 1).
        let d0m = canonical_connection().a;
        let pulled_conn = pullback_connection(&d0m, &phi).unwrap();
        assert_ne!(pulled_conn, d0m);
    }
}
