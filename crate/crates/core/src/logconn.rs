//! Logarithmic connections on the twisted order-2 jet bundle over a branch
//! divisor: exact residues with integer eigendata, the local model induced by
//! a ramified chart map, twisted second fundamental forms, and elementary
//! (Hecke-type) modifications with their residue transfer law.

use crate::eigen::{integer_eigendata, EigenData};
use crate::error::{Error, Result};
use crate::jet::{BundleSymbol, JetFrame};
use crate::matrix::Mat;
use crate::ode::{connection_from_flat_frame, gauge_transform};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;

/// Reduced effective divisor on the affine chart: a list of pairwise
/// distinct points.
#[derive(Clone, PartialEq, Debug)]
pub struct BranchDivisor {
    points: Vec<Scalar>,
}

impl BranchDivisor {
    pub fn new(points: Vec<Scalar>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if points[..i].contains(p) {
                return Err(Error::NonReducedDivisor(format!("point {p} repeats")));
            }
        }
        Ok(BranchDivisor { points })
    }

    pub fn empty() -> Self {
        BranchDivisor { points: vec![] }
    }

    pub fn points(&self) -> &[Scalar] {
        &self.points
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, p: &Scalar) -> bool {
        self.points.contains(p)
    }

    /// Monic polynomial vanishing simply on the divisor.
    pub fn vanishing_poly(&self) -> Poly {
        Poly::from_roots(&self.points)
    }
}

/// Connection matrix with at worst simple poles, all located on the divisor;
/// away from the divisor it is an ordinary connection on the twisted
/// order-2 jet bundle.  Flatness convention: v′ + A·v = 0.
#[derive(Clone, PartialEq, Debug)]
pub struct LogConnection {
    pub a: Mat<RatFunc>,
    pub divisor: BranchDivisor,
    pub frame: JetFrame,
}

impl LogConnection {
    /// Validates the pole discipline: every entry multiplied by the divisor's
    /// vanishing polynomial must be a polynomial (at worst simple poles on
    /// the divisor, none elsewhere).
    pub fn new(a: Mat<RatFunc>, divisor: BranchDivisor) -> Result<Self> {
        assert_eq!((a.rows, a.cols), (3, 3), "order-2 jet connection is 3×3");
        let q = RatFunc::from_poly(divisor.vanishing_poly());
        for i in 0..3 {
            for j in 0..3 {
                if !(a.at(i, j).clone() * q.clone()).is_polynomial() {
                    return Err(Error::ConditionViolation(format!(
                        "entry ({i},{j}) is not logarithmic along the divisor"
                    )));
                }
            }
        }
        Ok(LogConnection {
            a,
            divisor,
            frame: JetFrame::affine(BundleSymbol::twisted_tx()),
        })
    }

    pub fn is_regular_at(&self, p: &Scalar) -> bool {
        self.a.is_holomorphic_at(p)
    }
}

/// Exact residue data of a logarithmic connection at one point.
#[derive(Clone, PartialEq, Debug)]
pub struct ResidueReport {
    pub point: Scalar,
    pub matrix: Mat<Scalar>,
    pub eigen: EigenData,
    /// True iff the residue is semisimple (diagonalizable), i.e. has no
    /// nilpotent part.
    pub nilpotent_part_zero: bool,
}

impl ResidueReport {
    /// Eigenvalues with algebraic multiplicity, ascending.
    pub fn spectrum(&self) -> Vec<Scalar> {
        self.eigen.spectrum()
    }
}

/// Entrywise residue at `p` with full integer eigendata.  At points where
/// the connection is holomorphic this is the zero report.
pub fn residue(d: &LogConnection, p: &Scalar) -> Result<ResidueReport> {
    let matrix = d.a.residue(p);
    let eigen = integer_eigendata(&matrix)?;
    let nilpotent_part_zero = eigen.is_diagonalizable();
    Ok(ResidueReport { point: p.clone(), matrix, eigen, nilpotent_part_zero })
}

/// The adapted-frame model of a developing map σ: the flat frame, branch
/// data, and induced logarithmic connection, all exact.
///
/// Construction: the three pulled-back global fields have solution functions
/// (1, σ, σ²); their jet-curve matrix J conjugated by the adapted frame
/// change C = [[1,0,0],[0,1,0],[0,r,1]] with r = q′/q (q the monic form of
/// σ′) yields a flat frame G = C⁻¹·J/lc whose connection −G′·G⁻¹ has at
/// worst simple poles on the branch locus.
#[derive(Clone, Debug)]
pub struct NuFrameModel {
    /// Flat frame of the connection in the adapted coordinates.
    pub g_nu: Mat<RatFunc>,
    /// Monic polynomial whose roots (with multiplicity) are the critical
    /// points of σ.
    pub q: Poly,
    /// Logarithmic derivative q′/q.
    pub r: RatFunc,
    /// Critical points with multiplicities (branching orders).
    pub branch_points: Vec<(Scalar, usize)>,
    /// The induced connection matrix.
    pub a: Mat<RatFunc>,
}

/// Build the adapted-frame model for a polynomial developing map.
/// The critical points must split over the Gaussian rationals.
pub fn nu_frame_model(sigma: &Poly) -> Result<NuFrameModel> {
    if sigma.deg().is_none_or(|d| d < 1) {
        return Err(Error::ConditionViolation(
            "developing map must be a nonconstant polynomial".into(),
        ));
    }
    let dsigma = sigma.derivative();
    let lc = dsigma.lc();
    let q = dsigma.monic();
    let branch_points = if q.deg() == Some(0) { vec![] } else { q.roots()? };
    let r = RatFunc::new(q.derivative(), q.clone());

    // Jet curves of the solution functions (1, σ, σ²).
    let s = [Poly::one(), sigma.clone(), sigma.clone() * sigma.clone()];
    let row0: Vec<RatFunc> = s.iter().map(|p| RatFunc::from_poly(p.clone())).collect();
    let row1: Vec<RatFunc> = row0.iter().map(RatFunc::derivative).collect();
    let row2: Vec<RatFunc> = row1.iter().map(RatFunc::derivative).collect();
    let jets = Mat::from_rows(vec![row0, row1, row2]);

    let mut c_inv = Mat::<RatFunc>::identity(3);
    c_inv.set(2, 1, -r.clone());
    let lc_inv = RatFunc::constant(lc.inv().expect("nonzero leading coefficient"));
    let g_nu = c_inv.mul(&jets).scale(&lc_inv);
    let a = connection_from_flat_frame(&g_nu)?;
    Ok(NuFrameModel { g_nu, q, r, branch_points, a })
}

/// Local branched model at a single totally ramified point of branching
/// order `n`: the connection induced at x = 0 by the chart map w = x^{n+1}.
/// Its residue there is diag(0, −n, −2n); for n = 1 the eigenvalues are
/// {−2, −1, 0}, the eigenvalue −2 line is the deepest filtration step, and
/// the eigenvalue −1 line lies in the middle filtration step.
pub fn branched_model_connection(n: i64) -> LogConnection {
    assert!(n >= 1, "branching order must be positive");
    // σ = x^{n+1}
    let mut c = vec![Scalar::int(0); (n + 1) as usize];
    c.push(Scalar::int(1));
    let sigma = Poly::new(c);
    let model = nu_frame_model(&sigma).expect("monomial model is exact");
    let divisor = BranchDivisor::new(vec![Scalar::int(0)]).expect("single point");
    let mut d = LogConnection::new(model.a, divisor).expect("model connection is logarithmic");
    d.frame = JetFrame::affine(BundleSymbol::new(-1, n));
    d
}

/// Twisted second fundamental form of the filtration step `level`, as the
/// scalar form in the adapted-frame identification (the same canonical
/// normalization as the unbranched form, carried over the twist).  For
/// connections arising from branched developing maps both levels return the
/// constant 1 — the canonical section of the divisor line bundle.
pub fn sff_log(d: &LogConnection, level: u8) -> Result<RatFunc> {
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

/// Result of an elementary modification: the induced connection on the
/// modified sheaf and the frame map expressing the modified frame in the
/// original one.
#[derive(Clone, Debug)]
pub struct HeckeModification {
    pub connection: LogConnection,
    pub frame_map: Mat<RatFunc>,
}

/// Coordinates of `v` in the span of `basis`, if it lies there.
fn coords_in_span(basis: &[Vec<Scalar>], v: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = v.len();
    let k = basis.len();
    let mut aug = Mat::<Scalar>::zero(n, k + 1);
    for (j, b) in basis.iter().enumerate() {
        for (i, bi) in b.iter().enumerate() {
            aug.set(i, j, bi.clone());
        }
    }
    for (i, vi) in v.iter().enumerate() {
        aug.set(i, k, vi.clone());
    }
    let (r, pivots) = aug.rref();
    if pivots.contains(&k) {
        return None; // inconsistent: v is outside the span
    }
    let mut x = vec![Scalar::int(0); k];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = r.at(row, k).clone();
    }
    Some(x)
}

/// Canonical (reduced-echelon) basis of the span of the given vectors,
/// together with the pivot positions.
fn canonical_basis(l: &[Vec<Scalar>]) -> (Vec<Vec<Scalar>>, Vec<usize>) {
    if l.is_empty() {
        return (vec![], vec![]);
    }
    let m = Mat::from_rows(l.to_vec());
    let (r, pivots) = m.rref();
    let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
    (basis, pivots)
}

/// Elementary modification of the sheaf at `p` along the fiber subspace L:
/// the modified sheaf keeps sections whose value at `p` lies in L.  The new
/// frame keeps an L-adapted basis and multiplies complementary directions by
/// (z−p); the returned connection is the induced one in that frame.
///
/// Preconditions: the residue at `p` must preserve L
/// (`ResidueDoesNotPreserve`), and L must be spanned by residue eigenvectors
/// (`EigenspaceDimensionMismatch`) — the transfer law (eigenvalues on L
/// unchanged, transverse eigenvalues shifted by +1) is only meaningful then.
pub fn hecke_modify(
    d: &LogConnection,
    p: &Scalar,
    l: &[Vec<Scalar>],
) -> Result<HeckeModification> {
    for v in l {
        assert_eq!(v.len(), 3, "fiber vectors have 3 components");
    }
    let (basis, pivots) = canonical_basis(l);
    let dim = basis.len();

    if dim == 3 {
        // Full fiber: nothing changes.
        return Ok(HeckeModification {
            connection: d.clone(),
            frame_map: Mat::identity(3),
        });
    }

    let res = d.a.residue(p);
    // The residue must preserve L.
    let mut restricted = Mat::<Scalar>::zero(dim.max(1), dim.max(1));
    for (j, b) in basis.iter().enumerate() {
        let rb = res.matvec(b);
        let Some(coords) = coords_in_span(&basis, &rb) else {
            return Err(Error::ResidueDoesNotPreserve);
        };
        for (i, c) in coords.into_iter().enumerate() {
            restricted.set(i, j, c);
        }
    }
    // L must be spanned by residue eigenvectors: the restriction of the
    // residue to L must be semisimple (with integer spectrum).
    if dim > 0 {
        let eig = integer_eigendata(&restricted)?;
        if !eig.is_diagonalizable() {
            return Err(Error::EigenspaceDimensionMismatch);
        }
    }

    // Adapted frame: canonical L-basis vectors in their pivot positions,
    // (z−p)·ê_j in the complementary positions.
    let zp = RatFunc::new(
        Poly::new(vec![-p.clone(), Scalar::int(1)]),
        Poly::one(),
    );
    let mut g = Mat::<RatFunc>::zero(3, 3);
    for j in 0..3usize {
        if let Some(k) = pivots.iter().position(|&c| c == j) {
            for (i, bi) in basis[k].iter().enumerate() {
                g.set(i, j, RatFunc::constant(bi.clone()));
            }
        } else {
            g.set(j, j, zp.clone());
        }
    }

    let a_prime = gauge_transform(&d.a, &g)?;
    let divisor = if d.divisor.contains(p) {
        d.divisor.clone()
    } else {
        let mut pts = d.divisor.points().to_vec();
        pts.push(p.clone());
        BranchDivisor::new(pts)?
    };
    let mut connection = LogConnection::new(a_prime, divisor)?;
    connection.frame = d.frame.clone();
    Ok(HeckeModification { connection, frame_map: g })
}
