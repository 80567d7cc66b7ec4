//! End-to-end pipeline over a family of developing maps: model construction,
//! defining conditions, jet-evaluation map, induced pair, pair conditions,
//! obstruction by both methods, monodromy, file round-trip, and full
//! reconstruction with exact witness identities.

use so3oper_core::{
    branched_oper_conditions, build_pair, build_sl2_model, canonical_connection, gauge_transform,
    killing_form_b0, killing_matrix_w, monodromy_trivial, oper_criterion, pair_conditions,
    perturbed_pair, phi_map, phi_obstruction, read_pair, reconstruct_oper, sff_log, write_pair,
    Error, Mat, PhiMethod, Poly, RatFunc, Scalar,
};

fn s(n: i64) -> Scalar {
    Scalar::int(n)
}

/// Developing maps exercising: the identity chart, a nonunit linear
/// coefficient, one and two integer branch points, Gaussian branch points
/// (±i), and non-integer rational branch points (1/2 and −2).
fn developing_maps() -> Vec<Poly> {
    vec![
        Poly::from_ints(&[0, 1]),
        Poly::from_ints(&[1, 2]),
        Poly::from_ints(&[0, 0, 1]),
        Poly::from_ints(&[0, 0, 1, 1]),
        Poly::new(vec![s(0), s(1), s(0), Scalar::ratio(1, 3)]),
        Poly::new(vec![s(0), s(-1), Scalar::ratio(3, 4), Scalar::ratio(1, 3)]),
    ]
}

#[test]
fn full_pipeline_for_every_developing_map() {
    for sigma in developing_maps() {
        let oper = build_sl2_model(&sigma).expect("model builds");
        assert!(
            branched_oper_conditions(&oper).all(),
            "model conditions fail for σ = {sigma}"
        );

        // Jet-evaluation map: invertible off the critical divisor, and its
        // determinant is constant times the cube of the divisor polynomial.
        let phi = phi_map(&oper, 6).unwrap();
        let q3 = RatFunc::from_poly(oper.divisor.vanishing_poly()).pow(3);
        assert_eq!(phi.det(), RatFunc::int(-4) * q3);

        let pair = build_pair(&oper).expect("pair builds");
        let conds = pair_conditions(&pair).unwrap();
        assert!(conds.all(), "pair conditions fail for σ = {sigma}");

        // Twist bookkeeping: the distinguished pairing entry has a pole of
        // order exactly two at every branch point.
        for x in pair.d.divisor.points() {
            assert_eq!(pair.b.mat.at(0, 2).ord_at(x), Some(-2), "σ = {sigma} at {x}");
        }

        // Both obstruction procedures agree and vanish at every point.
        for x in pair.d.divisor.points() {
            let ledger = phi_obstruction(&pair, x, PhiMethod::Ledger).unwrap();
            let residue_m = phi_obstruction(&pair, x, PhiMethod::Residue).unwrap();
            assert_eq!(ledger.value, residue_m.value);
            assert!(ledger.value.is_zero(), "σ = {sigma} at {x}");
        }
        let crit = oper_criterion(&pair).unwrap();
        assert!(crit.is_branched_oper);
        assert_eq!(crit.phi.len(), 2 * pair.d.divisor.degree());
        assert!(monodromy_trivial(&pair).unwrap());

        // Interchange format preserves the verdict.
        let doc = read_pair(&write_pair(&pair, Some(&sigma))).unwrap();
        assert!(oper_criterion(&doc.pair).unwrap().is_branched_oper);

        // Reconstruction: regular connection, untwisted form with constant
        // nonzero determinant, and the flat-frame witness carrying the
        // recovered form to the trace-form pairing.
        let rec = reconstruct_oper(&pair).unwrap();
        for x in pair.d.divisor.points() {
            assert!(rec.connection.is_regular_at(x));
        }
        for st in &rec.stages {
            assert_eq!(st.after_first, vec![s(-1), s(0), s(0)]);
            assert_eq!(st.after_second, vec![s(0), s(0), s(0)]);
        }
        assert_eq!(rec.bilinear.twist, 0);
        let det_b = rec.bilinear.mat.det();
        assert!(det_b.is_polynomial() && det_b.num().deg() == Some(0));

        let h = rec.frame_map.inverse().unwrap().mul(&phi);
        assert_eq!(h.det(), RatFunc::int(-4));
        assert!(gauge_transform(&rec.connection.a, &h).unwrap().is_zero());
        let carried = h.transpose().mul(&rec.bilinear.mat).mul(&h);
        assert_eq!(carried, Mat::from_scalars(&killing_matrix_w()));
    }
}

#[test]
fn unbranched_pair_is_the_canonical_oper() {
    let oper = build_sl2_model(&Poly::from_ints(&[0, 1])).unwrap();
    let pair = build_pair(&oper).unwrap();
    assert_eq!(pair.d.a, canonical_connection().a);
    assert_eq!(pair.b.mat, killing_form_b0().mat);
    assert_eq!(pair.d.divisor.degree(), 0);

    // The induced forms on the filtration steps are the constants of the
    // unbranched normal form.
    assert_eq!(sff_log(&pair.d, 1).unwrap(), RatFunc::int(1));
    assert_eq!(sff_log(&pair.d, 2).unwrap(), RatFunc::int(1));
}

#[test]
fn perturbed_pairs_fail_exactly_at_the_obstruction() {
    let witnesses = [s(1), Scalar::i(), Scalar::gauss(1, 2, -3, 1)];
    for c in witnesses {
        let pair = perturbed_pair(&c).unwrap();

        // All five structural conditions still hold...
        assert!(pair_conditions(&pair).unwrap().all());

        // ...but the obstruction equals the perturbation scalar, by both
        // procedures, so the criterion and reconstruction reject the pair.
        let ledger = phi_obstruction(&pair, &s(0), PhiMethod::Ledger).unwrap();
        let residue_m = phi_obstruction(&pair, &s(0), PhiMethod::Residue).unwrap();
        assert_eq!(ledger.value, c);
        assert_eq!(residue_m.value, c);
        assert!(!oper_criterion(&pair).unwrap().is_branched_oper);
        assert!(!monodromy_trivial(&pair).unwrap());
        assert!(matches!(reconstruct_oper(&pair), Err(Error::NotAnOper(_))));

        // The verdict survives a file round-trip.
        let doc = read_pair(&write_pair(&pair, None)).unwrap();
        let again = phi_obstruction(&doc.pair, &s(0), PhiMethod::Residue).unwrap();
        assert_eq!(again.value, c);
    }
}

#[test]
fn higher_multiplicity_branching_is_outside_the_pair_theory() {
    // Developing maps with a critical point of multiplicity ≥ 2 are refused
    // by the model builder: the pair correspondence needs a reduced divisor.
    for sigma in [Poly::from_ints(&[0, 0, 0, 1]), Poly::from_ints(&[0, 0, 0, 0, 1])] {
        assert!(matches!(
            build_sl2_model(&sigma),
            Err(Error::NonReducedDivisor(_))
        ));
    }
}
