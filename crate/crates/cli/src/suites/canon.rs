//! Unbranched suite: the order-2 jet frame of the global quadratic vector
//! fields, the canonical third-order operator and its companion connection,
//! the transported pairing, Möbius equivariance, and the operator
//! characterization of projective structures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use so3oper_core::{
    bilinear_is_parallel, canonical_connection, connection_from_flat_frame, delta0,
    det_connection_trivial, det_jet_transition, f_d_is_identity, killing_form_b0, killing_matrix,
    moebius_equivariance_check, oper_conditions, projective_operator_check, psi_matrix,
    pullback_operator, sff, solve_flat_sections, solve_scalar_ode3, vf_bracket, Connection, Mat,
    MoebiusMap, Poly, RatFunc, Scalar, ThirdOrderOp, TruncSeries, VectorFieldPoly,
};

use crate::report::{Mutator, SuiteReport};

fn s(n: i64) -> Scalar {
    Scalar::int(n)
}

pub fn run(order: i64, mutator: &mut Mutator) -> SuiteReport {
    let mut rep = SuiteReport::new("canon", order);
    let one = RatFunc::int(1);

    // --- The order-2 jet frame of 1, z, z². ---
    {
        let mut psi = psi_matrix(2);
        if mutator.corrupt("c01") {
            psi.set(0, 0, psi.at(0, 0).clone() + Poly::one());
        }
        let expected = Mat::from_rows(vec![
            vec![Poly::from_ints(&[1]), Poly::from_ints(&[0, 1]), Poly::from_ints(&[0, 0, 1])],
            vec![Poly::zero(), Poly::from_ints(&[1]), Poly::from_ints(&[0, 2])],
            vec![Poly::zero(), Poly::zero(), Poly::from_ints(&[2])],
        ]);
        rep.record(
            "c01",
            "order-2 jet frame of the quadratic fields matches its closed form",
            psi == expected,
        );
    }
    {
        let mut psi = psi_matrix(2);
        if mutator.corrupt("c02") {
            psi.set(2, 2, Poly::zero());
        }
        rep.record(
            "c02",
            "determinant of the jet frame is the nonzero constant 2",
            psi.det() == Poly::from_ints(&[2]),
        );
    }
    {
        let mut psi = psi_matrix(2);
        if mutator.corrupt("c03") {
            let row = [psi.at(1, 0).clone(), psi.at(1, 1).clone(), psi.at(1, 2).clone()];
            for (j, p) in row.into_iter().enumerate() {
                psi.set(2, j, p);
            }
        }
        let points = [s(1), s(-1), s(2), Scalar::ratio(1, 3), Scalar::ratio(-2, 5)];
        let pass = points.iter().all(|p| {
            let mut m = Mat::<Scalar>::zero(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    m.set(i, j, psi.at(i, j).eval(p));
                }
            }
            m.rank() == 3
        });
        rep.record("c03", "jet frame is fiberwise injective at five sample points", pass);
    }

    // --- The canonical third-order operator. ---
    {
        let mut op = delta0();
        if mutator.corrupt("c04") {
            op.a1 = RatFunc::from_poly(Poly::from_ints(&[0, 4]));
        }
        rep.record(
            "c04",
            "canonical operator has vanishing lower-order coefficients",
            op.a0.is_zero() && op.a1.is_zero() && op.a2.is_zero(),
        );
    }
    {
        let op = if mutator.corrupt("c05") {
            ThirdOrderOp::new(RatFunc::int(0), RatFunc::int(1), RatFunc::int(0))
        } else {
            delta0()
        };
        // On the order-3 jet of a function the operator row returns
        // Σ aᵢ·f⁽ⁱ⁾ + f‴: zero on 1, z, z² and the constant 6 on z³.
        let p = Scalar::ratio(1, 3);
        let apply = |f: &Poly| -> Scalar {
            let row = op.row();
            let mut derivative = f.clone();
            let mut acc = s(0);
            for entry in row.iter() {
                let coef = entry.eval(&p).expect("operator regular at sample point");
                acc += coef * derivative.eval(&p);
                derivative = derivative.derivative();
            }
            acc
        };
        let pass = apply(&Poly::from_ints(&[1])).is_zero()
            && apply(&Poly::from_ints(&[0, 1])).is_zero()
            && apply(&Poly::from_ints(&[0, 0, 1])).is_zero()
            && apply(&Poly::from_ints(&[0, 0, 0, 1])) == s(6);
        rep.record(
            "c05",
            "operator kills the quadratic fields and returns the top derivative on cubes",
            pass,
        );
    }
    {
        let coeffs = if mutator.corrupt("c06") {
            [RatFunc::int(0), RatFunc::int(1), RatFunc::int(0)]
        } else {
            [RatFunc::int(0), RatFunc::int(0), RatFunc::int(0)]
        };
        let mut pass = true;
        let mut values = Mat::<Scalar>::zero(3, 3);
        for b in 0..3usize {
            let mut init = [s(0), s(0), s(0)];
            init[b] = s(1);
            match solve_scalar_ode3(&coeffs, &s(0), &init, order.max(6)) {
                Ok(sol) => {
                    for e in 3..order.max(6) {
                        if !sol.coeff(e).is_zero() {
                            pass = false;
                        }
                    }
                    for e in 0..3usize {
                        values.set(e, b, sol.coeff(e as i64));
                    }
                }
                Err(_) => pass = false,
            }
        }
        pass = pass && values.rank() == 3;
        rep.record(
            "c06",
            "kernel of the canonical operator through the series order is spanned by 1, z, z²",
            pass,
        );
    }

    // --- The companion connection. ---
    {
        let op = if mutator.corrupt("c07") {
            ThirdOrderOp::new(RatFunc::int(0), RatFunc::int(0), RatFunc::int(1))
        } else {
            delta0()
        };
        let frozen = Mat::from_int_rows(&[&[0, -1, 0], &[0, 0, -1], &[0, 0, 0]]);
        rep.record(
            "c07",
            "companion connection of the canonical operator equals the canonical matrix",
            so3oper_core::varpi(&op).a == frozen,
        );
    }
    {
        let mut frame = psi_matrix(2).map(|p| RatFunc::from_poly(p.clone()));
        if mutator.corrupt("c08") {
            // A cubic is outside the kernel, so the frame stops being flat
            // (a constant column recombination would not change anything).
            let cubic = RatFunc::from_poly(Poly::from_ints(&[0, 0, 0, 1]));
            frame.set(0, 2, frame.at(0, 2).clone() + cubic);
        }
        let pass = connection_from_flat_frame(&frame)
            .map(|a| a == canonical_connection().a)
            .unwrap_or(false);
        rep.record(
            "c08",
            "canonical connection is minus the logarithmic derivative of the jet frame",
            pass,
        );
    }
    {
        let frame = psi_matrix(2).map(|p| RatFunc::from_poly(p.clone()));
        let basepoint = s(1);
        let d = canonical_connection();
        let mut pass = true;
        for k in 0..3 {
            let col = frame.col(k);
            let mut init: Vec<Scalar> =
                col.iter().map(|e| e.eval(&basepoint).unwrap()).collect();
            if k == 0 && mutator.corrupt("c09") {
                init[0] = init[0].clone() + s(1);
            }
            match solve_flat_sections(&d.a, &basepoint, &init, order.max(4)) {
                Ok(sols) => {
                    for (j, sol) in sols.iter().enumerate() {
                        let expect = col[j].expand_at(&basepoint, order.max(4));
                        for e in 0..order.max(4) {
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
            "c09",
            "flat sections of the canonical connection reproduce the jet-frame columns",
            pass,
        );
    }

    // --- Oper conditions and fundamental forms. ---
    let tampered_connection = |corrupt: bool, i: usize, j: usize, v: RatFunc| -> Connection {
        let mut d = canonical_connection();
        if corrupt {
            d.a.set(i, j, v);
        }
        d
    };
    {
        let d = tampered_connection(mutator.corrupt("c10"), 0, 2, one.clone());
        rep.record(
            "c10",
            "canonical connection maps each filtration step into the next",
            oper_conditions(&d).all(),
        );
    }
    {
        let d = tampered_connection(mutator.corrupt("c11"), 1, 2, RatFunc::int(-2));
        rep.record(
            "c11",
            "fundamental form at the deepest filtration step is the constant 1",
            sff(&d, 1).is_ok_and(|f| f == one),
        );
    }
    {
        let d = tampered_connection(mutator.corrupt("c12"), 0, 1, -RatFunc::x());
        rep.record(
            "c12",
            "fundamental form on the middle graded piece is the constant 1",
            sff(&d, 2).is_ok_and(|f| f == one),
        );
    }
    {
        let d = tampered_connection(mutator.corrupt("c13"), 0, 0, one.clone());
        rep.record(
            "c13",
            "induced connection on the determinant line is trivial",
            det_connection_trivial(&d),
        );
    }
    {
        let d = tampered_connection(mutator.corrupt("c14"), 0, 0, one.clone());
        rep.record(
            "c14",
            "flat extension followed by value projection is the identity on jets",
            f_d_is_identity(&d, order),
        );
    }

    // --- The pairing. ---
    {
        let mut gram = killing_matrix();
        if mutator.corrupt("c15") {
            gram = gram.scale(&s(2));
        }
        let basis = [
            VectorFieldPoly { p: Poly::from_ints(&[1]) },
            VectorFieldPoly { p: Poly::from_ints(&[0, 1]) },
            VectorFieldPoly { p: Poly::from_ints(&[0, 0, 1]) },
        ];
        let ad = |w: &VectorFieldPoly| -> Mat<Scalar> {
            let mut m = Mat::<Scalar>::zero(3, 3);
            for (j, b) in basis.iter().enumerate() {
                let br = vf_bracket(w, b);
                for i in 0..3 {
                    m.set(i, j, br.p.coeff(i));
                }
            }
            m
        };
        let mut pass = true;
        for i in 0..3 {
            for j in 0..3 {
                let trace = ad(&basis[i]).mul(&ad(&basis[j])).trace();
                if &trace != gram.at(i, j) {
                    pass = false;
                }
            }
        }
        rep.record(
            "c15",
            "pairing of the quadratic fields matches the trace-of-adjoint oracle",
            pass,
        );
    }
    {
        let mut b0 = killing_form_b0();
        if mutator.corrupt("c16") {
            b0.mat.set(1, 1, RatFunc::int(3));
        }
        let frozen = Mat::from_int_rows(&[&[0, 0, -2], &[0, 2, 0], &[-2, 0, 0]]);
        rep.record(
            "c16",
            "transported pairing on jets is the frozen constant matrix of determinant -8",
            b0.mat == frozen && b0.twist == 0 && b0.mat.det() == RatFunc::int(-8),
        );
    }
    {
        let mut b0 = killing_form_b0().mat;
        if mutator.corrupt("c17") {
            b0.set(2, 2, one.clone());
        }
        let pass = b0.at(2, 2).is_zero()
            && b0.at(1, 2).is_zero()
            && b0.at(2, 1).is_zero()
            && !b0.at(0, 2).is_zero()
            && b0 == b0.transpose();
        rep.record(
            "c17",
            "deepest line is isotropic and its orthogonal complement is the middle step",
            pass,
        );
    }
    {
        let mut b0 = killing_form_b0().mat;
        if mutator.corrupt("c18") {
            b0.set(1, 1, RatFunc::int(4));
        }
        rep.record(
            "c18",
            "pairing is covariant-constant for the canonical connection",
            bilinear_is_parallel(&canonical_connection().a, &b0),
        );
    }

    // --- Equivariance. ---
    {
        let maps = [
            MoebiusMap::from_ints(1, 1, 0, 1).unwrap(),
            MoebiusMap::from_ints(2, 0, 0, 1).unwrap(),
            MoebiusMap::from_ints(1, 0, -1, 1).unwrap(),
        ];
        let mut pass = maps.iter().all(|g| {
            moebius_equivariance_check(g)
                .map(|r| r.delta0 && r.d0 && r.b0)
                .unwrap_or(false)
        });
        if mutator.corrupt("c19") {
            // A genuinely non-Möbius chart must break equivariance; demand
            // (wrongly) that it does not.
            let phi = RatFunc::from_poly(Poly::from_ints(&[0, 1, 1]));
            pass = pass
                && pullback_operator(&delta0(), &phi)
                    .map(|op| op == delta0())
                    .unwrap_or(false);
        }
        rep.record(
            "c19",
            "canonical objects are equivariant under translation, scaling, and inversion-type maps",
            pass,
        );
    }

    // --- Operator characterization of projective structures. ---
    {
        let sym = ThirdOrderOp::from_polys(
            Poly::zero(),
            Poly::from_ints(&[0, 4]),
            Poly::from_ints(&[2]),
        );
        let off1 = ThirdOrderOp::from_polys(Poly::zero(), Poly::from_ints(&[0, 4]), Poly::zero());
        let off2 = ThirdOrderOp::from_polys(Poly::zero(), Poly::zero(), Poly::from_ints(&[1]));
        let candidate = if mutator.corrupt("c20") { off1.clone() } else { sym.clone() };
        let pass = projective_operator_check(&candidate).unwrap_or(false)
            && !projective_operator_check(&off1).unwrap_or(true)
            && !projective_operator_check(&off2).unwrap_or(true);
        rep.record(
            "c20",
            "bracket closure and determinant triviality single out projective operators",
            pass,
        );
    }
    {
        let sym = ThirdOrderOp::from_polys(
            Poly::zero(),
            Poly::from_ints(&[0, 4]),
            Poly::from_ints(&[2]),
        );
        let counterexample = if mutator.corrupt("c21") {
            canonical_connection()
        } else {
            Connection::in_affine_chart(Mat::from_int_rows(&[
                &[0, -2, 0],
                &[0, 0, -1],
                &[0, 0, 0],
            ]))
        };
        let pass = f_d_is_identity(&so3oper_core::varpi(&sym), order)
            && !f_d_is_identity(&counterexample, order);
        rep.record(
            "c21",
            "jet tautology holds for companion connections and fails for the counterexample",
            pass,
        );
    }

    // --- Determinant triviality of jet transitions. ---
    {
        let corrupt = mutator.corrupt("c22");
        let mut rng = ChaCha8Rng::seed_from_u64(0x0C0D_EC22);
        let mut pass = true;
        for _ in 0..20 {
            let mut coeffs: Vec<Scalar> = Vec::new();
            let lead = loop {
                let c = rng.gen_range(-3..=3i64);
                if c != 0 {
                    break c;
                }
            };
            coeffs.push(if corrupt { s(0) } else { s(lead) });
            for _ in 0..6 {
                coeffs.push(s(rng.gen_range(-2..=2)));
            }
            let chart = TruncSeries::new(s(0), 1, coeffs);
            match det_jet_transition(&chart) {
                Ok(det) => {
                    if det.coeff(0) != s(1) {
                        pass = false;
                    }
                    for e in 1..det.known_to() {
                        if !det.coeff(e).is_zero() {
                            pass = false;
                        }
                    }
                }
                Err(_) => pass = false,
            }
        }
        rep.record(
            "c22",
            "determinant line transition of random invertible charts is identically 1",
            pass,
        );
    }

    rep.finish()
}
