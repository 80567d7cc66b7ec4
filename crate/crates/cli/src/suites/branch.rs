//! Branch-point suite: the local model connection at a totally ramified
//! point of branching order n — pole discipline, the frozen residue, its
//! eigenstructure against the jet filtration, twisted fundamental forms, the
//! series solver cross-check, and the elementary-modification transfer law.

use so3oper_core::{
    branched_model_connection, gauge_transform, hecke_modify, nu_frame_model, residue,
    sff_log, solve_flat_sections, LogConnection, Mat, Poly, RatFunc, Scalar, StdFiltration,
};

use crate::report::{Mutator, SuiteReport};

fn s(n: i64) -> Scalar {
    Scalar::int(n)
}

/// Conjugate the connection by a constant permutation-type frame change
/// (constant gauge, so no derivative term appears).
fn conjugated(d: &LogConnection, p: Mat<RatFunc>) -> LogConnection {
    let a = gauge_transform(&d.a, &p).expect("permutation frame is invertible");
    LogConnection::new(a, d.divisor.clone()).expect("conjugation preserves pole discipline")
}

pub fn run(n: i64, order: i64, mutator: &mut Mutator) -> SuiteReport {
    let mut rep = SuiteReport::new(&format!("branch(n={n})"), order);
    let zero = s(0);
    let d = branched_model_connection(n);
    let sigma = Poly::new({
        let mut c = vec![s(0); (n + 1) as usize];
        c.push(s(1));
        c
    });
    let model = nu_frame_model(&sigma).expect("monomial developing map is exact");

    // --- Pole discipline. ---
    {
        let mut a = d.a.clone();
        if mutator.corrupt("b01") {
            a.set(0, 0, RatFunc::new(Poly::one(), Poly::from_ints(&[0, 0, 1])));
        }
        let x = RatFunc::x();
        let mut pass = d.divisor.points() == std::slice::from_ref(&zero);
        for i in 0..3 {
            for j in 0..3 {
                if !(a.at(i, j).clone() * x.clone()).is_polynomial() {
                    pass = false;
                }
            }
        }
        rep.record(
            "b01",
            "connection has at worst a simple pole, and only at the branch point",
            pass,
        );
    }

    // --- Residue data. ---
    {
        let dd = if mutator.corrupt("b02") {
            LogConnection::new(d.a.scale(&RatFunc::int(2)), d.divisor.clone()).unwrap()
        } else {
            d.clone()
        };
        let frozen = Mat::from_i64(&[&[0, 0, 0], &[0, -n, 0], &[0, 0, -2 * n]]);
        let pass = residue(&dd, &zero).is_ok_and(|r| r.matrix == frozen);
        rep.record(
            "b02",
            "residue at the branch point is the diagonal matrix (0, -n, -2n)",
            pass,
        );
    }
    {
        let dd = if mutator.corrupt("b03") {
            let mut a = d.a.clone();
            a.set(0, 0, a.at(0, 0).clone() + RatFunc::new(Poly::one(), Poly::from_ints(&[0, 1])));
            LogConnection::new(a, d.divisor.clone()).unwrap()
        } else {
            d.clone()
        };
        let expected = vec![s(-2 * n), s(-n), s(0)];
        let pass = residue(&dd, &zero).is_ok_and(|r| r.spectrum() == expected);
        rep.record("b03", "residue spectrum is {-2n, -n, 0} in ascending order", pass);
    }
    {
        let dd = if mutator.corrupt("b04") {
            // Repeated eigenvalue with a nilpotent block: kill the middle
            // diagonal residue and couple the first two coordinates.
            let mut a = d.a.clone();
            let inv_x = RatFunc::new(Poly::one(), Poly::from_ints(&[0, 1]));
            a.set(1, 1, a.at(1, 1).clone() + RatFunc::constant(s(n)) * inv_x.clone());
            a.set(0, 1, a.at(0, 1).clone() + inv_x);
            LogConnection::new(a, d.divisor.clone()).unwrap()
        } else {
            d.clone()
        };
        let pass = residue(&dd, &zero).is_ok_and(|r| r.nilpotent_part_zero);
        rep.record("b04", "residue is semisimple (no nilpotent part)", pass);
    }
    {
        let dd = if mutator.corrupt("b05") {
            conjugated(&d, Mat::from_int_rows(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]))
        } else {
            d.clone()
        };
        let pass = residue(&dd, &zero).is_ok_and(|r| {
            r.eigen.eigenspace_of(&s(-2 * n)).is_some_and(|space| {
                space.len() == 1 && space.iter().all(|v| StdFiltration::in_f1(v))
            })
        });
        rep.record(
            "b05",
            "eigenspace of the most negative eigenvalue is the deepest filtration line",
            pass,
        );
    }
    {
        let dd = if mutator.corrupt("b06") {
            conjugated(&d, Mat::from_int_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]))
        } else {
            d.clone()
        };
        let pass = residue(&dd, &zero).is_ok_and(|r| {
            r.eigen.eigenspace_of(&s(-n)).is_some_and(|space| {
                space.len() == 1 && space.iter().all(|v| StdFiltration::in_f2(v))
            })
        });
        rep.record(
            "b06",
            "eigenspace of the middle eigenvalue lies in the middle filtration step",
            pass,
        );
    }

    // --- Twisted fundamental forms. ---
    {
        let dd = if mutator.corrupt("b07") {
            let mut a = d.a.clone();
            a.set(1, 2, a.at(1, 2).clone() * RatFunc::int(2));
            LogConnection::new(a, d.divisor.clone()).unwrap()
        } else {
            d.clone()
        };
        let pass = sff_log(&dd, 1).is_ok_and(|f| f == RatFunc::int(1));
        rep.record(
            "b07",
            "twisted fundamental form at the deepest step is the constant 1",
            pass,
        );
    }
    {
        let dd = if mutator.corrupt("b08") {
            let mut a = d.a.clone();
            a.set(0, 1, a.at(0, 1).clone() * RatFunc::int(2));
            LogConnection::new(a, d.divisor.clone()).unwrap()
        } else {
            d.clone()
        };
        let pass = sff_log(&dd, 2).is_ok_and(|f| f == RatFunc::int(1));
        rep.record(
            "b08",
            "twisted fundamental form on the middle graded piece is the constant 1",
            pass,
        );
    }

    // --- Series solver cross-check. ---
    {
        let corrupt = mutator.corrupt("b09");
        let basepoint = s(1);
        let ord = order.max(4);
        let mut pass = true;
        for k in 0..3usize {
            let col = model.g_nu.col(k);
            let values: so3oper_core::Result<Vec<Scalar>> =
                col.iter().map(|e| e.eval(&basepoint)).collect();
            let Ok(mut init) = values else {
                pass = false;
                continue;
            };
            if k == 0 && corrupt {
                init[0] = init[0].clone() + s(1);
            }
            match solve_flat_sections(&model.a, &basepoint, &init, ord) {
                Ok(sols) => {
                    for (j, sol) in sols.iter().enumerate() {
                        let expect = col[j].expand_at(&basepoint, ord);
                        for e in 0..ord {
                            if sol.coeff(e) != expect.coeff(e) {
                                pass = false;
                            }
                        }
                    }
                }
                Err(_) => pass = false,
            }
        }
        rep.record(
            "b09",
            "series solutions from jet initial data reproduce the closed-form frame",
            pass,
        );
    }

    // --- Elementary modification transfer law. ---
    {
        let corrupt = mutator.corrupt("b10");
        let pass = (|| -> Option<bool> {
            let r = residue(&d, &zero).ok()?;
            let line = if corrupt {
                r.eigen.eigenspace_of(&s(-n))?.clone()
            } else {
                r.eigen.eigenspace_of(&s(0))?.clone()
            };
            let modified = hecke_modify(&d, &zero, &line).ok()?;
            let spec = residue(&modified.connection, &zero).ok()?.spectrum();
            // Already ascending for every n ≥ 1.
            let expected = vec![s(-2 * n + 1), s(-n + 1), s(0)];
            Some(spec == expected)
        })()
        .unwrap_or(false);
        rep.record(
            "b10",
            "one modification along the eigenvalue-0 line shifts the transverse eigenvalues by 1",
            pass,
        );
    }
    {
        let start = if mutator.corrupt("b11") {
            LogConnection::new(d.a.scale(&RatFunc::int(2)), d.divisor.clone()).unwrap()
        } else {
            d.clone()
        };
        let pass = (|| -> Option<bool> {
            let mut current = start;
            for _ in 0..(2 * n) {
                let r = residue(&current, &zero).ok()?;
                let line = r.eigen.eigenspace_of(&s(0))?.clone();
                current = hecke_modify(&current, &zero, &line).ok()?.connection;
            }
            Some(current.is_regular_at(&zero))
        })()
        .unwrap_or(false);
        rep.record(
            "b11",
            "2n modifications along the eigenvalue-0 line make the connection regular",
            pass,
        );
    }

    rep.finish()
}
