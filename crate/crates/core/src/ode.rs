use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;
use crate::series::TruncSeries;

/// Expand a matrix of rational functions at `p` into matrix-valued Taylor
/// coefficients `A_0 … A_{order−1}`; errors if any entry has a pole at `p`.
pub fn matrix_taylor_at(
    a: &Mat<RatFunc>,
    p: &Scalar,
    order: i64,
    what: &str,
) -> Result<Vec<Mat<Scalar>>> {
    assert!(order >= 1);
    if !a.is_holomorphic_at(p) {
        return Err(Error::PoleAtBasepoint(format!("{what} has a pole at z = {p}")));
    }
    let series: Vec<Vec<TruncSeries>> = (0..a.rows)
        .map(|i| (0..a.cols).map(|j| a.at(i, j).expand_at(p, order)).collect())
        .collect();
    Ok((0..order)
        .map(|k| {
            let mut m = Mat::zero(a.rows, a.cols);
            for (i, row) in series.iter().enumerate() {
                for (j, s) in row.iter().enumerate() {
                    let c = if k >= s.val() { s.coeff(k) } else { Scalar::int(0) };
                    m.set(i, j, c);
                }
            }
            m
        })
        .collect())
}

/// Exact power-series solution of the flat-section equation
///
///   v′ + A·v = 0,   v(p) = init,
///
/// truncated after `order` coefficients.  The connection matrix must be
/// holomorphic at the basepoint.
pub fn solve_flat_sections(
    a: &Mat<RatFunc>,
    p: &Scalar,
    init: &[Scalar],
    order: i64,
) -> Result<Vec<TruncSeries>> {
    let n = a.rows;
    assert_eq!(a.rows, a.cols, "connection matrix must be square");
    assert_eq!(init.len(), n, "initial vector length mismatch");
    assert!(order >= 1, "need at least one coefficient");
    let ajs = matrix_taylor_at(a, p, order, "connection matrix")?;
    // (k+1)·c_{k+1} = −Σ_{j=0..k} A_j · c_{k−j}
    let mut c: Vec<Vec<Scalar>> = vec![init.to_vec()];
    for k in 0..(order - 1) as usize {
        let mut rhs = vec![Scalar::int(0); n];
        for (j, aj) in ajs.iter().enumerate().take(k + 1) {
            let av = aj.matvec(&c[k - j]);
            for (slot, x) in rhs.iter_mut().zip(av) {
                *slot += x;
            }
        }
        let inv_kp1 = Scalar::int(k as i64 + 1).inv().expect("nonzero");
        c.push(rhs.into_iter().map(|x| -(x * inv_kp1.clone())).collect());
    }
    Ok((0..n)
        .map(|comp| {
            TruncSeries::new(
                p.clone(),
                0,
                (0..order as usize).map(|k| c[k][comp].clone()).collect(),
            )
        })
        .collect())
}

/// Power-series solution of the scalar third-order equation
///
///   v‴ + a2·v″ + a1·v′ + a0·v = 0
///
/// with prescribed 2-jet (v, v′, v″)(p), via its companion first-order system.
pub fn solve_scalar_ode3(
    coeffs: &[RatFunc; 3],
    p: &Scalar,
    init_jet: &[Scalar; 3],
    order: i64,
) -> Result<TruncSeries> {
    let [a0, a1, a2] = coeffs.clone();
    let z = RatFunc::int(0);
    let m1 = RatFunc::int(-1);
    let companion = Mat::from_rows(vec![
        vec![z.clone(), m1.clone(), z.clone()],
        vec![z.clone(), z.clone(), m1],
        vec![a0, a1, a2],
    ]);
    let sols = solve_flat_sections(&companion, p, init_jet.as_slice(), order)?;
    Ok(sols[0].clone())
}

/// Connection matrix annihilating the columns of a flat frame: A = −G′·G⁻¹,
/// so that G′ + A·G = 0 holds identically.
pub fn connection_from_flat_frame(g: &Mat<RatFunc>) -> Result<Mat<RatFunc>> {
    let inv = g
        .inverse()
        .ok_or_else(|| Error::DivisionByZero("flat frame is singular".into()))?;
    Ok(g.derivative().mul(&inv).neg())
}

/// Gauge action on a connection matrix: A ↦ g⁻¹·A·g + g⁻¹·g′
/// (so that sections transform by v ↦ g⁻¹·v).
pub fn gauge_transform(a: &Mat<RatFunc>, g: &Mat<RatFunc>) -> Result<Mat<RatFunc>> {
    let inv = g
        .inverse()
        .ok_or_else(|| Error::DivisionByZero("gauge matrix is singular".into()))?;
    Ok(inv.mul(&a.mul(g).add(&g.derivative())))
}

/// A bilinear pairing B is parallel for the connection A exactly when
/// B′ = Aᵀ·B + B·A as an identity of rational functions.
pub fn bilinear_is_parallel(a: &Mat<RatFunc>, b: &Mat<RatFunc>) -> bool {
    b.derivative() == a.transpose().mul(b).add(&b.mul(a))
}

/// Verify v′ + A·v = 0 through the full known precision of the given series
/// solution (a consistency check for independently produced solutions).
pub fn is_flat_to_precision(
    a: &Mat<RatFunc>,
    p: &Scalar,
    v: &[TruncSeries],
) -> Result<bool> {
    let order = v.iter().map(|s| s.known_to()).min().unwrap_or(1);
    let ajs = matrix_taylor_at(a, p, order.max(1), "connection matrix")?;
    // residual r = v′ + Av must vanish in all exponents < order − 1
    for comp in 0..v.len() {
        let d = v[comp].derivative();
        for e in 0..(order - 1) {
            let mut acc = if e >= d.val() && e < d.known_to() { d.coeff(e) } else { Scalar::int(0) };
            for (j, aj) in ajs.iter().enumerate() {
                let j = j as i64;
                if j > e {
                    break;
                }
                for (w, vw) in v.iter().enumerate() {
                    let k = e - j;
                    let c = if k >= vw.val() && k < vw.known_to() {
                        vw.coeff(k)
                    } else {
                        Scalar::int(0)
                    };
                    acc += aj.at(comp, w).clone() * c;
                }
            }
            if !acc.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
