//! Check suites for the four subcommands.  Each suite takes the validated
//! input, an expansion order, and the fault-injection tracker, and returns a
//! deterministic report.

pub mod branch;
pub mod canon;
pub mod pair;
pub mod roundtrip;

use so3oper_core::{LogConnection, RatFunc};

/// The corruption used by obstruction-related checks: a constant matrix
/// added to the connection in the two subdiagonal slots.  On a pair built
/// from a quadratic developing map this preserves every structural condition
/// while shifting the obstruction away from zero; on other inputs it may
/// instead break a structural condition — either way the targeted check
/// fails.
pub fn perturb_connection(d: &LogConnection) -> LogConnection {
    let mut a = d.a.clone();
    let one = RatFunc::int(1);
    a.set(1, 0, a.at(1, 0).clone() + one.clone());
    a.set(2, 1, a.at(2, 1).clone() + one);
    let mut out = d.clone();
    out.a = a;
    out
}
