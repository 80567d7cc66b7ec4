//! Pair suite: structural checks on a (pairing, logarithmic connection)
//! pair read from a file — twist and pole discipline, symmetry and the
//! isotropy structure, parallelism, the filtration image conditions, residue
//! eigendata at each marked point, and the pointwise obstruction computed by
//! two independent methods.

use so3oper_core::{
    bilinear_is_parallel, gauge_transform, phi_obstruction, residue, Mat, PairBD, PhiMethod,
    Poly, RatFunc, Scalar, StdFiltration,
};

use crate::report::{Mutator, SuiteReport};
use crate::suites::perturb_connection;

fn s(n: i64) -> Scalar {
    Scalar::int(n)
}

pub fn run(pair: &PairBD, order: i64, mutator: &mut Mutator) -> SuiteReport {
    let mut rep = SuiteReport::new("pair", order);
    let points: Vec<Scalar> = pair.d.divisor.points().to_vec();

    // --- Twist and pole discipline. ---
    {
        let twist = if mutator.corrupt("p01") { pair.b.twist + 1 } else { pair.b.twist };
        rep.record("p01", "pairing carries the canonical twist 2 along the divisor", twist == 2);
    }
    {
        let mut b = pair.b.mat.clone();
        if mutator.corrupt("p02") {
            let pole = RatFunc::new(Poly::one(), Poly::from_ints(&[-7, 1]));
            b.set(0, 0, b.at(0, 0).clone() + pole);
        }
        let qhat = RatFunc::from_poly(pair.d.divisor.vanishing_poly());
        let q2 = qhat.clone() * qhat.clone();
        let mut pass = true;
        for i in 0..3 {
            for j in 0..3 {
                if !(b.at(i, j).clone() * q2.clone()).is_polynomial() {
                    pass = false;
                }
                if !(pair.d.a.at(i, j).clone() * qhat.clone()).is_polynomial() {
                    pass = false;
                }
            }
        }
        rep.record(
            "p02",
            "pairing entries have at worst double poles and the connection simple poles on the divisor",
            pass,
        );
    }

    // --- Symmetry, nondegeneracy, isotropy structure. ---
    {
        let mut b = pair.b.mat.clone();
        if mutator.corrupt("p03") {
            b.set(0, 1, b.at(0, 1).clone() + RatFunc::int(1));
        }
        let pass = b == b.transpose() && !b.det().is_zero();
        rep.record("p03", "pairing is symmetric and nondegenerate", pass);
    }
    {
        let mut b = pair.b.mat.clone();
        if mutator.corrupt("p04") {
            b.set(2, 2, RatFunc::int(1));
        }
        let pass = b.at(2, 2).is_zero()
            && b.at(1, 2).is_zero()
            && b.at(2, 1).is_zero()
            && !b.at(0, 2).is_zero();
        rep.record(
            "p04",
            "deepest line is isotropic and pairs nontrivially only with the quotient direction",
            pass,
        );
    }

    // --- Parallelism and filtration image. ---
    {
        let mut b = pair.b.mat.clone();
        if mutator.corrupt("p05") {
            b = b.scale(&RatFunc::x());
        }
        rep.record(
            "p05",
            "pairing is covariant-constant for the connection",
            bilinear_is_parallel(&pair.d.a, &b),
        );
    }
    {
        let mut a = pair.d.a.clone();
        if mutator.corrupt("p06") {
            a.set(0, 2, RatFunc::int(1));
        }
        let nonzero_const = |f: &RatFunc| -> bool {
            !f.is_zero() && f.as_poly().is_some_and(|p| p.deg() == Some(0))
        };
        let pass = a.at(0, 2).is_zero() && nonzero_const(a.at(1, 2)) && nonzero_const(a.at(0, 1));
        rep.record(
            "p06",
            "connection maps each filtration step into the next with constant fundamental forms",
            pass,
        );
    }

    // --- Residue eigendata at the marked points. ---
    {
        let d = if mutator.corrupt("p07") {
            let mut out = pair.d.clone();
            out.a = pair.d.a.scale(&RatFunc::int(2));
            out
        } else {
            pair.d.clone()
        };
        let expected = vec![s(-2), s(-1), s(0)];
        let pass = points.iter().all(|x| {
            residue(&d, x).is_ok_and(|r| r.spectrum() == expected && r.nilpotent_part_zero)
        });
        rep.record(
            "p07",
            "residue spectrum at every marked point is {-2, -1, 0}, semisimple",
            pass,
        );
    }
    {
        let d = if mutator.corrupt("p08") {
            let p = Mat::from_int_rows(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
            let a = gauge_transform(&pair.d.a, &p).expect("permutation frame is invertible");
            let mut out = pair.d.clone();
            out.a = a;
            out
        } else {
            pair.d.clone()
        };
        let pass = points.iter().all(|x| {
            residue(&d, x).is_ok_and(|r| {
                let deepest = r.eigen.eigenspace_of(&s(-2)).is_some_and(|sp| {
                    sp.len() == 1 && sp.iter().all(|v| StdFiltration::in_f1(v))
                });
                let middle = r.eigen.eigenspace_of(&s(-1)).is_some_and(|sp| {
                    sp.len() == 1 && sp.iter().all(|v| StdFiltration::in_f2(v))
                });
                deepest && middle
            })
        });
        rep.record(
            "p08",
            "residue eigenlines align with the jet filtration at every marked point",
            pass,
        );
    }

    // --- The obstruction, two ways. ---
    {
        let p = if mutator.corrupt("p09") {
            PairBD { b: pair.b.clone(), d: perturb_connection(&pair.d) }
        } else {
            pair.clone()
        };
        let pass = points.iter().all(|x| {
            phi_obstruction(&p, x, PhiMethod::Ledger).is_ok_and(|r| r.value.is_zero())
        });
        rep.record(
            "p09",
            "obstruction vanishes at every marked point (coefficient-ledger method)",
            pass,
        );
    }
    {
        let p = if mutator.corrupt("p10") {
            PairBD { b: pair.b.clone(), d: perturb_connection(&pair.d) }
        } else {
            pair.clone()
        };
        let pass = points.iter().all(|x| {
            phi_obstruction(&p, x, PhiMethod::Residue).is_ok_and(|r| r.value.is_zero())
        });
        rep.record(
            "p10",
            "obstruction vanishes at every marked point (modification-residue method)",
            pass,
        );
    }
    {
        let alt = if mutator.corrupt("p11") {
            PairBD { b: pair.b.clone(), d: perturb_connection(&pair.d) }
        } else {
            pair.clone()
        };
        let pass = points.iter().all(|x| {
            let ledger = phi_obstruction(pair, x, PhiMethod::Ledger);
            let residue_m = phi_obstruction(&alt, x, PhiMethod::Residue);
            match (ledger, residue_m) {
                (Ok(a), Ok(b)) => a.value == b.value,
                _ => false,
            }
        });
        rep.record(
            "p11",
            "both obstruction methods agree at every marked point",
            pass,
        );
    }

    rep.finish()
}
