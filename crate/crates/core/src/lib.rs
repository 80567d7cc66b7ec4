//! Exact symbolic verification library for projective-line oper geometry:
//! Gaussian-rational arithmetic, jet-bundle calculus, oper connections,
//! logarithmic connections at branch points, Hecke-type elementary
//! modifications, and the branch-point obstruction characterizing branched
//! orthogonal opers.

pub mod error;
pub mod scalar;
pub mod poly;
pub mod ratfunc;
pub mod series;
pub mod matrix;
pub mod eigen;
pub mod ode;
pub mod sl2;
pub mod jet;
pub mod branched;
pub mod logconn;
pub mod oper;
pub mod pairfile;

pub use error::{Error, Result};
pub use scalar::{Rat, Scalar};
pub use poly::Poly;
pub use ratfunc::{residue_at, series_expand, RatFunc};
pub use series::TruncSeries;
pub use matrix::{mat3, Mat};
pub use eigen::{char_poly, integer_eigendata, EigenData, EigenPair};
pub use ode::{
    bilinear_is_parallel, connection_from_flat_frame, gauge_transform, matrix_taylor_at,
    solve_flat_sections, solve_scalar_ode3,
};
pub use sl2::{
    is_moebius, killing_matrix, killing_matrix_w, sl2_bracket, sl2_to_vf, vf_bracket, MoebiusMap,
    Sl2Elt, VectorFieldPoly,
};
pub use jet::{
    det_jet_transition, det_jet_transition_rat, jet_of, jet_project, jet_transition_matrix,
    jet_transition_matrix_rat, nested_jet, pull_section, transition_apply, BundleSymbol, JetFrame,
    JetVec, StdFiltration,
};
pub use branched::{
    branched_oper_conditions, build_pair, build_sl2_model, monodromy_trivial, oper_criterion,
    pair_conditions, perturbed_pair, phi_map, phi_obstruction, reconstruct_oper, section_chart_vf,
    BranchedOperReport, OperCriterion, PairBD, PairConditions, PhiMethod, PhiReport,
    ReconstructedOper, Sl2Oper, StageSpectra,
};
pub use logconn::{
    branched_model_connection, hecke_modify, nu_frame_model, residue, sff_log, BranchDivisor,
    HeckeModification, LogConnection, NuFrameModel, ResidueReport,
};
pub use pairfile::{read_pair, write_pair, PairDocument};
pub use oper::{
    bracket_closure, bracket_closure_at, canonical_connection, delta0, det_connection_trivial,
    f_d_is_identity, killing_form_b0, moebius_equivariance_check, oper_conditions,
    projective_operator_check, psi_matrix, pullback_bilinear, pullback_connection,
    pullback_operator, sff, varpi, BilinearTwisted, Connection, MoebiusEquivariance,
    OperConditions, ThirdOrderOp,
};
