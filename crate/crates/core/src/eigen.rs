use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::poly::Poly;
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Characteristic polynomial det(z·I − M), monic of degree n.
pub fn char_poly(m: &Mat<Scalar>) -> Poly {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut zi_minus_m: Mat<Poly> = Mat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut e = -Poly::constant(m.at(i, j).clone());
            if i == j {
                e = e + Poly::x();
            }
            zi_minus_m.set(i, j, e);
        }
    }
    zi_minus_m.det()
}

/// One eigenvalue of an integer-spectrum matrix, with its multiplicities and
/// an exact eigenspace basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPair {
    pub value: Scalar,
    pub alg_mult: usize,
    pub geo_mult: usize,
    pub eigenspace: Vec<Vec<Scalar>>,
}

/// Full exact spectral data for a matrix all of whose eigenvalues are
/// rational integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenData {
    pub char_poly: Poly,
    pub pairs: Vec<EigenPair>,
}

impl EigenData {
    pub fn eigenvalues(&self) -> Vec<Scalar> {
        self.pairs.iter().map(|p| p.value.clone()).collect()
    }

    /// Spectrum with multiplicity, ascending.
    pub fn spectrum(&self) -> Vec<Scalar> {
        let mut out = Vec::new();
        for p in &self.pairs {
            for _ in 0..p.alg_mult {
                out.push(p.value.clone());
            }
        }
        out
    }

    pub fn eigenspace_of(&self, value: &Scalar) -> Option<&Vec<Vec<Scalar>>> {
        self.pairs.iter().find(|p| &p.value == value).map(|p| &p.eigenspace)
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.pairs.iter().all(|p| p.alg_mult == p.geo_mult)
    }
}

/// Exact spectral decomposition for matrices whose eigenvalues are all
/// rational integers; errors otherwise.
pub fn integer_eigendata(m: &Mat<Scalar>) -> Result<EigenData> {
    let cp = char_poly(m);
    let roots = integer_roots_exhaustive(&cp)?;
    let mut pairs = Vec::new();
    for (value, alg_mult) in roots {
        let n = m.rows;
        let mut shifted = m.clone();
        for i in 0..n {
            let d = shifted.at(i, i).clone() - value.clone();
            shifted.set(i, i, d);
        }
        let eigenspace = shifted.kernel_basis();
        let geo_mult = eigenspace.len();
        pairs.push(EigenPair { value, alg_mult, geo_mult, eigenspace });
    }
    Ok(EigenData { char_poly: cp, pairs })
}

/// All roots of a monic polynomial, required to be rational integers;
/// returns (value, multiplicity) sorted ascending.
fn integer_roots_exhaustive(p: &Poly) -> Result<Vec<(Scalar, usize)>> {
    let deg = p.deg().expect("characteristic polynomial is nonzero");
    for k in 0..=deg {
        if !p.coeff(k).is_rational() || !p.coeff(k).re.is_integer() {
            return Err(Error::NonIntegerEigenvalue(format!(
                "characteristic polynomial has non-integer coefficient {} at degree {k}",
                p.coeff(k)
            )));
        }
    }
    let mut work = p.clone();
    let mut found: Vec<(BigInt, usize)> = Vec::new();

    // Strip roots at zero.
    let zeros = work.ord_at(&Scalar::int(0)).unwrap_or(0);
    if zeros > 0 {
        found.push((BigInt::zero(), zeros));
        for _ in 0..zeros {
            work = work.div_exact(&Poly::new(vec![Scalar::int(0), Scalar::int(1)]));
        }
    }

    while work.deg().unwrap_or(0) >= 1 {
        let c0 = work.coeff(0).re.to_integer().abs();
        debug_assert!(!c0.is_zero());
        let mut root: Option<BigInt> = None;
        'search: for d in divisors_of(&c0) {
            for cand in [d.clone(), -d] {
                let s = Scalar::from_bigint(cand.clone());
                if work.eval(&s).is_zero() {
                    root = Some(cand);
                    break 'search;
                }
            }
        }
        let Some(r) = root else {
            return Err(Error::NonIntegerEigenvalue(format!(
                "no rational-integer root of remaining factor ({work})"
            )));
        };
        let rs = Scalar::from_bigint(r.clone());
        let lin = Poly::new(vec![-rs.clone(), Scalar::int(1)]);
        let mut mult = 0;
        while work.eval(&rs).is_zero() && work.deg().unwrap_or(0) >= 1 {
            work = work.div_exact(&lin);
            mult += 1;
        }
        if let Some((_, m)) = found.iter_mut().find(|(v, _)| *v == r) {
            *m += mult;
        } else {
            found.push((r, mult));
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(found
        .into_iter()
        .map(|(v, m)| (Scalar::from_bigint(v), m))
        .collect())
}

/// Positive divisors of a positive integer via trial division.
fn divisors_of(n: &BigInt) -> Vec<BigInt> {
    let mut divs = vec![BigInt::from(1)];
    let mut rest = n.clone();
    let mut p = BigInt::from(2);
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
        p += 1;
    }
    if rest > BigInt::from(1) {
        factors.push((rest, 1));
    }
    for (prime, emax) in factors {
        let current = divs.clone();
        let mut pk = BigInt::from(1);
        for _ in 0..emax {
            pk = &pk * &prime;
            for d in &current {
                divs.push(d * &pk);
            }
        }
    }
    divs.sort();
    divs
}
