//! The branched projective-oper layer: the trace-free 2×2 model attached to
//! a polynomial developing map, its induced pair (twisted bilinear form,
//! logarithmic connection) on the order-2 jet bundle, the five pair
//! conditions, the per-branch-point obstruction computed by two independent
//! methods, the oper criterion, and the reconstruction round-trip through
//! elementary modifications.

use crate::error::{Error, Result};
use crate::logconn::{
    hecke_modify, nu_frame_model, residue, BranchDivisor, HeckeModification, LogConnection,
    NuFrameModel, ResidueReport,
};
use crate::matrix::Mat;
use crate::ode::{bilinear_is_parallel, connection_from_flat_frame, gauge_transform, solve_flat_sections};
use crate::oper::BilinearTwisted;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::sl2::{killing_matrix_w, Sl2Elt};

/// The trace-free 2×2 model of a branched projective structure: the constant
/// Lie-algebra bundle with its trace-form pairing, the developing-map
/// filtration (nilpotents fixing the developing line inside the Borel
/// preserving it), and the trivial connection.
#[derive(Clone, Debug)]
pub struct Sl2Oper {
    /// Developing map z ↦ [1 : σ(z)].
    pub sigma: Poly,
    /// Reduced critical divisor of σ.
    pub divisor: BranchDivisor,
    /// Basis (E, H, F) of the trace-free 2×2 matrices.
    pub w_frame: [Sl2Elt; 3],
    /// Trace-form pairing matrix in the (E, H, F) basis.
    pub b_w: Mat<Scalar>,
    /// Column span (in (E,H,F) coordinates) of the nilpotents n(z) with
    /// image and kernel equal to the developing line span(1, σ(z)).
    pub f1_frame: Vec<Vec<RatFunc>>,
    /// Column span of the Borel subalgebra preserving the developing line.
    pub f2_frame: Vec<Vec<RatFunc>>,
    /// Connection matrix on the trivial bundle (identically zero).
    pub d_w: Mat<RatFunc>,
    /// The adapted-frame jet model of σ (flat frame, branch data, induced
    /// logarithmic connection).
    pub model: NuFrameModel,
}

/// Flow generator of a trace-free 2×2 matrix in the affine chart where the
/// line span(1, σ)ᵀ has coordinate σ (second homogeneous coordinate over
/// first): [[a,b],[c,−a]] generates (c − 2a·u − b·u²)·∂u.  This is the
/// pullback under u ↦ 1/u of the generator in the complementary chart.
pub fn section_chart_vf(w: &Sl2Elt) -> Result<Poly> {
    let tr = w.m.trace();
    if !tr.is_zero() {
        return Err(Error::NonTraceless(format!("trace = {tr}")));
    }
    let a = w.m.at(0, 0).clone();
    let b = w.m.at(0, 1).clone();
    let c = w.m.at(1, 0).clone();
    Ok(Poly::new(vec![c, -(a.clone() + a), -b]))
}

/// Build the model attached to a polynomial developing map.  The critical
/// points of σ must be simple and split over the Gaussian rationals.
pub fn build_sl2_model(sigma: &Poly) -> Result<Sl2Oper> {
    let model = nu_frame_model(sigma)?;
    for (p, mult) in &model.branch_points {
        if *mult > 1 {
            return Err(Error::NonReducedDivisor(format!(
                "critical point {p} of the developing map has multiplicity {mult}"
            )));
        }
    }
    let points: Vec<Scalar> = model.branch_points.iter().map(|(p, _)| p.clone()).collect();
    let divisor = BranchDivisor::new(points)?;

    let s = RatFunc::from_poly(sigma.clone());
    let s2 = s.clone() * s.clone();
    // Nilpotent direction: [[−σ, 1],[−σ², σ]] has coordinates (1, −σ, −σ²)
    // in (E, H, F).
    let f1 = vec![RatFunc::int(1), -s.clone(), -s2];
    // Borel complement: [[1, 0],[2σ, −1]] has coordinates (0, 1, 2σ).
    let h = vec![RatFunc::int(0), RatFunc::int(1), RatFunc::int(2) * s];
    Ok(Sl2Oper {
        sigma: sigma.clone(),
        divisor,
        w_frame: [Sl2Elt::e(), Sl2Elt::h(), Sl2Elt::f()],
        b_w: killing_matrix_w(),
        f1_frame: vec![f1.clone()],
        f2_frame: vec![f1, h],
        d_w: Mat::zero(3, 3),
        model,
    })
}

/// Exact checks of the defining conditions of the trace-free model.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BranchedOperReport {
    /// Pairing vanishes on the nilpotent line.
    pub b_isotropic_f1: bool,
    /// Orthogonal complement of the nilpotent line is the Borel subbundle.
    pub f1_perp_is_f2: bool,
    /// Connection leaves the pairing covariant-constant.
    pub d_preserves_b: bool,
    /// Induced determinant connection is trivial (trace-free matrix).
    pub det_trivial: bool,
    /// Connection maps the nilpotent line into the Borel subbundle.
    pub d_f1_in_f2: bool,
    /// The induced form on the nilpotent line vanishes exactly on the
    /// critical divisor (equals the monic divisor polynomial up to a
    /// nonzero constant).
    pub sff_is_canonical: bool,
}

impl BranchedOperReport {
    pub fn all(&self) -> bool {
        self.b_isotropic_f1
            && self.f1_perp_is_f2
            && self.d_preserves_b
            && self.det_trivial
            && self.d_f1_in_f2
            && self.sff_is_canonical
    }
}

fn pairing(b: &Mat<Scalar>, u: &[RatFunc], v: &[RatFunc]) -> RatFunc {
    let brat = Mat::from_scalars(b);
    let bv = brat.matvec(v);
    let mut acc = RatFunc::int(0);
    for (a, c) in u.iter().zip(bv) {
        acc = acc + a.clone() * c;
    }
    acc
}

/// Rank of the matrix whose columns are the given vectors.
fn col_rank(cols: &[Vec<RatFunc>]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let rows = cols[0].len();
    let mut m = Mat::<RatFunc>::zero(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, ci) in c.iter().enumerate() {
            m.set(i, j, ci.clone());
        }
    }
    m.rank()
}

fn in_span(cols: &[Vec<RatFunc>], v: &[RatFunc]) -> bool {
    let mut aug = cols.to_vec();
    aug.push(v.to_vec());
    col_rank(&aug) == col_rank(cols)
}

fn is_nonzero_constant(f: &RatFunc) -> bool {
    f.is_polynomial() && f.num().deg() == Some(0)
}

/// Apply a connection to a section: 𝐃(v) = v′ + A·v.
fn connection_apply(a: &Mat<RatFunc>, v: &[RatFunc]) -> Vec<RatFunc> {
    let av = a.matvec(v);
    v.iter()
        .zip(av)
        .map(|(c, w)| c.derivative() + w)
        .collect()
}

/// Check the defining conditions on the stored frames of the model.
pub fn branched_oper_conditions(o: &Sl2Oper) -> BranchedOperReport {
    let f1 = &o.f1_frame[0];
    let b_isotropic_f1 = pairing(&o.b_w, f1, f1).is_zero();

    // Complement: every stored Borel generator pairs to zero with the
    // nilpotent line, the Borel span is 2-dimensional containing the
    // nilpotent line, and the pairing functional is not identically zero.
    let all_perp = o.f2_frame.iter().all(|v| pairing(&o.b_w, f1, v).is_zero());
    let functional_nonzero = (0..3).any(|k| {
        let mut e = vec![RatFunc::int(0); 3];
        e[k] = RatFunc::int(1);
        !pairing(&o.b_w, f1, &e).is_zero()
    });
    let f1_perp_is_f2 = all_perp
        && functional_nonzero
        && col_rank(&o.f2_frame) == 2
        && in_span(&o.f2_frame, f1);

    let b_rat = Mat::from_scalars(&o.b_w);
    let d_preserves_b = bilinear_is_parallel(&o.d_w, &b_rat);
    let det_trivial = o.d_w.trace().is_zero();

    let df1 = connection_apply(&o.d_w, f1);
    let d_f1_in_f2 = in_span(&o.f2_frame, &df1);

    // Decompose 𝐃(f1) over the Borel frame; the coefficient on the
    // complement generator is the induced form on the nilpotent line.
    let sff_is_canonical = (|| {
        if o.f2_frame.len() != 2 {
            return false;
        }
        let mut m = Mat::<RatFunc>::zero(3, 2);
        for (j, c) in o.f2_frame.iter().enumerate() {
            for (i, ci) in c.iter().enumerate() {
                m.set(i, j, ci.clone());
            }
        }
        // Solve m·(α, β)ᵀ = 𝐃(f1) by echelon reduction of the augmented
        // system; inconsistency means failure.
        let mut aug = Mat::<RatFunc>::zero(3, 3);
        for (i, d) in df1.iter().enumerate() {
            aug.set(i, 0, m.at(i, 0).clone());
            aug.set(i, 1, m.at(i, 1).clone());
            aug.set(i, 2, d.clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&2) || pivots.len() != 2 {
            return false;
        }
        let beta = r.at(1, 2).clone();
        let q = RatFunc::from_poly(o.divisor.vanishing_poly());
        is_nonzero_constant(&(beta / q))
    })();

    BranchedOperReport {
        b_isotropic_f1,
        f1_perp_is_f2,
        d_preserves_b,
        det_trivial,
        d_f1_in_f2,
        sff_is_canonical,
    }
}

/// The jet-evaluation map of the model: its columns are the adapted-frame
/// order-2 jets of the quadratic vector fields cut out along the developing
/// section by flat extensions of the (E, H, F) frame.  Flat extensions are
/// produced by the series solver at the requested order and checked to be
/// exact before the closed rational form is emitted.
pub fn phi_map(o: &Sl2Oper, order: i64) -> Result<Mat<RatFunc>> {
    assert!(order >= 2, "jet construction needs order ≥ 2");
    let basepoint = Scalar::int(1);
    let mut t = Mat::<RatFunc>::zero(3, 3);
    for (k, w) in o.w_frame.iter().enumerate() {
        // Flat extension of the k-th frame vector through the stored
        // connection (exercises the solver; exact for this model).
        let mut init = vec![Scalar::int(0); 3];
        init[k] = Scalar::int(1);
        let flats = solve_flat_sections(&o.d_w, &basepoint, &init, order)?;
        for (j, s) in flats.iter().enumerate() {
            for e in 0..order {
                let expect = if e == 0 { init[j].clone() } else { Scalar::int(0) };
                if s.coeff(e) != expect {
                    return Err(Error::ConditionViolation(
                        "flat extension of the frame is not constant; only the \
                         trivial model connection is supported in rational form"
                            .into(),
                    ));
                }
            }
        }
        // The vector field cut out along the section, as a combination of
        // the solution functions (1, σ, σ²).
        let vf = section_chart_vf(w)?;
        for i in 0..3 {
            t.set(i, k, RatFunc::constant(vf.coeff(i)));
        }
    }
    Ok(o.model.g_nu.mul(&t))
}

/// A candidate pair: a twist-2 symmetric form and a logarithmic connection
/// on the order-2 jet bundle over the same divisor.
#[derive(Clone, Debug)]
pub struct PairBD {
    pub b: BilinearTwisted,
    pub d: LogConnection,
}

/// Push the trivial model connection and the trace-form pairing through the
/// jet-evaluation map.
pub fn build_pair(o: &Sl2Oper) -> Result<PairBD> {
    let phi = phi_map(o, 6)?;
    let a = connection_from_flat_frame(&phi)?;
    let d = LogConnection::new(a, o.divisor.clone())?;

    let phi_inv = phi
        .inverse()
        .ok_or_else(|| Error::ConditionViolation("jet-evaluation map is singular".into()))?;
    let b_rat = Mat::from_scalars(&o.b_w);
    let mat = phi_inv.transpose().mul(&b_rat).mul(&phi_inv);
    // Twist discipline: entries have poles of order at most two on the
    // divisor and none elsewhere.
    let q2 = RatFunc::from_poly(o.divisor.vanishing_poly()).pow(2);
    for i in 0..3 {
        for j in 0..3 {
            if !(mat.at(i, j).clone() * q2.clone()).is_polynomial() {
                return Err(Error::ConditionViolation(format!(
                    "pairing entry ({i},{j}) exceeds the allowed twist"
                )));
            }
        }
    }
    let b = BilinearTwisted::new(mat, 2)?;
    Ok(PairBD { b, d })
}

/// The five defining conditions on a candidate pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PairConditions {
    /// Filtration isotropy and orthogonality: B(F¹,F¹) = 0, (F¹)⊥ = F²,
    /// with B symmetric and nondegenerate.
    pub isotropy: bool,
    /// B is covariant-constant for the connection.
    pub parallel: bool,
    /// 𝐃 maps F¹ onto F²-twisted and F² onto the full twisted bundle.
    pub filtration_image: bool,
    /// Residue eigenvalues are {−2, −1, 0} at every divisor point.
    pub residue_eigenvalues: bool,
    /// Eigenvalue −2 line is the F¹ fiber; eigenvalue −1 line lies in F².
    pub eigenspace_alignment: bool,
}

impl PairConditions {
    pub fn all(&self) -> bool {
        self.isotropy
            && self.parallel
            && self.filtration_image
            && self.residue_eigenvalues
            && self.eigenspace_alignment
    }
}

/// Evaluate the five conditions exactly.
pub fn pair_conditions(p: &PairBD) -> Result<PairConditions> {
    let b = &p.b.mat;
    let a = &p.d.a;

    let isotropy = *b == b.transpose()
        && !b.det().is_zero()
        && b.at(2, 2).is_zero()
        && b.at(1, 2).is_zero()
        && !b.at(0, 2).is_zero();

    let parallel = bilinear_is_parallel(a, b);

    // In the standard filtration frame: no component of 𝐃(F¹) escapes F²,
    // and the two successive-quotient maps are unit constants (the chart
    // normalization of an isomorphism onto the twisted image).
    let filtration_image = a.at(0, 2).is_zero()
        && is_nonzero_constant(a.at(1, 2))
        && is_nonzero_constant(a.at(0, 1));

    let mut residue_eigenvalues = true;
    let mut eigenspace_alignment = true;
    let want: Vec<Scalar> = [-2, -1, 0].iter().map(|&n| Scalar::int(n)).collect();
    for x in p.d.divisor.points() {
        let rep = residue(&p.d, x)?;
        if rep.spectrum() != want {
            residue_eigenvalues = false;
            eigenspace_alignment = false;
            continue;
        }
        let e2 = rep.eigen.eigenspace_of(&Scalar::int(-2)).expect("eigenvalue present");
        let e1 = rep.eigen.eigenspace_of(&Scalar::int(-1)).expect("eigenvalue present");
        if e2.len() != 1
            || !crate::jet::StdFiltration::in_f1(&e2[0])
            || e1.len() != 1
            || !crate::jet::StdFiltration::in_f2(&e1[0])
        {
            eigenspace_alignment = false;
        }
    }

    Ok(PairConditions {
        isotropy,
        parallel,
        filtration_image,
        residue_eigenvalues,
        eigenspace_alignment,
    })
}

/// Which of the two independent procedures computed an obstruction value.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PhiMethod {
    /// Laurent-coefficient bookkeeping of 𝐃 applied to a vanishing
    /// extension of the −1-eigenvector.
    Ledger,
    /// Residue of the twice-modified connection.
    Residue,
}

impl std::fmt::Display for PhiMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhiMethod::Ledger => write!(f, "ledger"),
            PhiMethod::Residue => write!(f, "residue"),
        }
    }
}

/// Obstruction value at one branch point, as the scalar coordinate of the
/// induced map from the −1-eigenline to the −2-eigenline, in the frames
/// given by eigenvectors normalized to leading coordinate 1.
#[derive(Clone, PartialEq, Debug)]
pub struct PhiReport {
    pub point: Scalar,
    pub value: Scalar,
    pub method: PhiMethod,
}

fn normalize_leading(v: &[Scalar]) -> Result<Vec<Scalar>> {
    let lead = v
        .iter()
        .find(|c| !c.is_zero())
        .ok_or_else(|| Error::ConditionViolation("zero eigenvector".into()))?;
    let inv = lead.inv()?;
    Ok(v.iter().map(|c| c.clone() * inv.clone()).collect())
}

/// Normalized eigenvectors (u₀, u₋₁, u₋₂) at a divisor point, as the
/// columns of a constant frame matrix.
fn eigenframe(rep: &ResidueReport) -> Result<Mat<Scalar>> {
    let mut p = Mat::<Scalar>::zero(3, 3);
    for (j, val) in [0i64, -1, -2].iter().enumerate() {
        let space = rep
            .eigen
            .eigenspace_of(&Scalar::int(*val))
            .ok_or_else(|| {
                Error::ConditionViolation(format!("missing residue eigenvalue {val}"))
            })?;
        if space.len() != 1 {
            return Err(Error::ConditionViolation(format!(
                "residue eigenvalue {val} is not simple"
            )));
        }
        let u = normalize_leading(&space[0])?;
        for (i, ui) in u.iter().enumerate() {
            p.set(i, j, ui.clone());
        }
    }
    Ok(p)
}

struct TwoStage {
    rep1: ResidueReport,
    rep2: ResidueReport,
    h1: HeckeModification,
    h2: HeckeModification,
}

/// Run the two elementary modifications at `x`: first along the
/// 0-eigenspace of the residue, then along the 0-eigenspace of the
/// intermediate residue.
fn two_stage_at(d: &LogConnection, x: &Scalar) -> Result<TwoStage> {
    let rep = residue(d, x)?;
    let l = rep
        .eigen
        .eigenspace_of(&Scalar::int(0))
        .ok_or_else(|| Error::ConditionViolation("residue has no 0-eigenvalue".into()))?
        .clone();
    let h1 = hecke_modify(d, x, &l)?;
    let rep1 = residue(&h1.connection, x)?;
    let m = rep1
        .eigen
        .eigenspace_of(&Scalar::int(0))
        .ok_or_else(|| {
            Error::ConditionViolation("intermediate residue has no 0-eigenvalue".into())
        })?
        .clone();
    let h2 = hecke_modify(&h1.connection, x, &m)?;
    let rep2 = residue(&h2.connection, x)?;
    Ok(TwoStage { rep1, rep2, h1, h2 })
}

/// Compute the obstruction at a branch point by the requested method.  The
/// five pair conditions must hold.
pub fn phi_obstruction(p: &PairBD, x: &Scalar, method: PhiMethod) -> Result<PhiReport> {
    let conds = pair_conditions(p)?;
    if !conds.all() {
        return Err(Error::ConditionViolation(
            "pair conditions fail; obstruction undefined".into(),
        ));
    }
    if !p.d.divisor.contains(x) {
        return Err(Error::ConditionViolation(format!(
            "{x} is not a divisor point"
        )));
    }
    let rep = residue(&p.d, x)?;
    let frame = eigenframe(&rep)?;

    let value = match method {
        PhiMethod::Ledger => {
            // Extend the −1-eigenvector v as ṽ = (z−x)·v, apply 𝐃, verify
            // the result vanishes at x, and read the −2-eigencoordinate of
            // the first-order value.
            let v: Vec<Scalar> = frame.col(1);
            let t = RatFunc::new(Poly::new(vec![-x.clone(), Scalar::int(1)]), Poly::one());
            let vt: Vec<RatFunc> = v
                .iter()
                .map(|c| RatFunc::constant(c.clone()) * t.clone())
                .collect();
            let dv = connection_apply(&p.d.a, &vt);
            for comp in &dv {
                if !comp.is_holomorphic_at(x) || !comp.eval(x)?.is_zero() {
                    return Err(Error::ConditionViolation(
                        "connection applied to the vanishing extension does not vanish".into(),
                    ));
                }
            }
            let first_order: Vec<Scalar> = dv
                .iter()
                .map(|comp| (comp.clone() / t.clone()).eval(x))
                .collect::<Result<_>>()?;
            let coords = frame
                .solve(&first_order)
                .ok_or_else(|| Error::ConditionViolation("eigenframe is singular".into()))?;
            coords[2].clone()
        }
        PhiMethod::Residue => {
            // In the eigenframe the two modifications are canonical; the
            // obstruction is the component of the final residue mapping the
            // −1-direction into the −2-direction.
            let frame_rat = Mat::from_scalars(&frame);
            let a_tilde = gauge_transform(&p.d.a, &frame_rat)?;
            let d_tilde = LogConnection::new(a_tilde, p.d.divisor.clone())?;
            let stages = two_stage_at(&d_tilde, x)?;
            stages.rep2.matrix.at(2, 1).clone()
        }
    };
    Ok(PhiReport { point: x.clone(), value, method })
}

/// Outcome of the full criterion: the five conditions plus every
/// obstruction value by both methods.
#[derive(Clone, Debug)]
pub struct OperCriterion {
    pub is_branched_oper: bool,
    pub conditions: PairConditions,
    pub phi: Vec<PhiReport>,
}

/// A pair defines a branched oper exactly when the five conditions hold and
/// every branch-point obstruction vanishes.
pub fn oper_criterion(p: &PairBD) -> Result<OperCriterion> {
    let conditions = pair_conditions(p)?;
    if !conditions.all() {
        return Ok(OperCriterion { is_branched_oper: false, conditions, phi: vec![] });
    }
    let mut phi = Vec::new();
    let mut all_zero = true;
    for x in p.d.divisor.points() {
        for method in [PhiMethod::Ledger, PhiMethod::Residue] {
            let rep = phi_obstruction(p, x, method)?;
            all_zero &= rep.value.is_zero();
            phi.push(rep);
        }
    }
    Ok(OperCriterion { is_branched_oper: all_zero, conditions, phi })
}

/// Trivial local monodromy at every divisor point, decided by the exact
/// equivalent: the twice-modified connection has zero residue there.
pub fn monodromy_trivial(p: &PairBD) -> Result<bool> {
    let conds = pair_conditions(p)?;
    if !conds.all() {
        return Err(Error::ConditionViolation(
            "pair conditions fail; monodromy test undefined".into(),
        ));
    }
    for x in p.d.divisor.points() {
        let rep = residue(&p.d, x)?;
        let frame = Mat::from_scalars(&eigenframe(&rep)?);
        let d_tilde = LogConnection::new(gauge_transform(&p.d.a, &frame)?, p.d.divisor.clone())?;
        let stages = two_stage_at(&d_tilde, x)?;
        if !stages.rep2.matrix.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Residue spectra recorded while reducing at one divisor point.
#[derive(Clone, Debug)]
pub struct StageSpectra {
    pub point: Scalar,
    pub after_first: Vec<Scalar>,
    pub after_second: Vec<Scalar>,
}

/// Everything recovered from a pair that passes the criterion: the regular
/// connection on the modified bundle, the untwisted nondegenerate form, the
/// saturated filtration, and the total frame map witnessing the
/// modifications.
#[derive(Clone, Debug)]
pub struct ReconstructedOper {
    pub connection: LogConnection,
    pub bilinear: BilinearTwisted,
    pub f1: Vec<Vec<RatFunc>>,
    pub f2: Vec<Vec<RatFunc>>,
    pub frame_map: Mat<RatFunc>,
    pub stages: Vec<StageSpectra>,
}

/// Clear denominators and common polynomial factors from a rational vector.
fn saturate_vector(v: &[RatFunc]) -> Vec<RatFunc> {
    let mut den = Poly::one();
    for c in v {
        let g = den.gcd(c.den());
        den = (den * c.den().clone()).div_exact(&g);
    }
    let nums: Vec<Poly> = v
        .iter()
        .map(|c| (c.clone() * RatFunc::from_poly(den.clone())).num().clone())
        .collect();
    let mut g = Poly::zero();
    for n in &nums {
        g = g.gcd(n);
    }
    if g.is_zero() || g.deg() == Some(0) {
        return nums.into_iter().map(RatFunc::from_poly).collect();
    }
    nums.into_iter()
        .map(|n| RatFunc::from_poly(n.div_exact(&g)))
        .collect()
}

/// Reduce a criterion-passing pair at every branch point and return the
/// recovered oper data.
pub fn reconstruct_oper(p: &PairBD) -> Result<ReconstructedOper> {
    let crit = oper_criterion(p)?;
    if !crit.is_branched_oper {
        return Err(Error::NotAnOper(
            "pair fails the oper criterion; reconstruction impossible".into(),
        ));
    }
    let mut d = p.d.clone();
    let mut frame_map = Mat::<RatFunc>::identity(3);
    let mut stages = Vec::new();
    for x in p.d.divisor.points() {
        let two = two_stage_at(&d, x)?;
        stages.push(StageSpectra {
            point: x.clone(),
            after_first: two.rep1.spectrum(),
            after_second: two.rep2.spectrum(),
        });
        frame_map = frame_map.mul(&two.h1.frame_map).mul(&two.h2.frame_map);
        d = two.h2.connection;
    }
    for x in p.d.divisor.points() {
        if !d.is_regular_at(x) {
            return Err(Error::NotAnOper(format!(
                "modified connection is still singular at {x}"
            )));
        }
    }
    let connection = LogConnection::new(d.a, BranchDivisor::empty())?;

    let b_mat = frame_map.transpose().mul(&p.b.mat).mul(&frame_map);
    if !is_nonzero_constant(&b_mat.det()) {
        return Err(Error::NotAnOper(
            "recovered pairing is not an untwisted nondegenerate form".into(),
        ));
    }
    let bilinear = BilinearTwisted::new(b_mat, 0)?;

    let inv = frame_map
        .inverse()
        .ok_or_else(|| Error::ConditionViolation("frame map is singular".into()))?;
    let f1 = vec![saturate_vector(&inv.col(2))];
    let f2 = vec![saturate_vector(&inv.col(1)), saturate_vector(&inv.col(2))];
    Ok(ReconstructedOper { connection, bilinear, f1, f2, frame_map, stages })
}

/// The canonical non-oper witness: perturb the branched model pair for
/// σ = z² by adding the constant skew (for the pairing) nilpotent
/// c·(E₁₀ + E₂₁) to the connection matrix.  All five pair conditions
/// survive, and both obstruction methods report the value c at the branch
/// point.
pub fn perturbed_pair(c: &Scalar) -> Result<PairBD> {
    let oper = build_sl2_model(&Poly::from_ints(&[0, 0, 1]))?;
    let pair = build_pair(&oper)?;
    let mut a = pair.d.a.clone();
    let c_rat = RatFunc::constant(c.clone());
    a.set(1, 0, a.at(1, 0).clone() + c_rat.clone());
    a.set(2, 1, a.at(2, 1).clone() + c_rat);
    let d = LogConnection::new(a, pair.d.divisor.clone())?;
    Ok(PairBD { b: pair.b, d })
}
