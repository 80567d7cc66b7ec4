//! Plain-text interchange format for candidate pairs (version 1).
//!
//! Layout, line oriented, in this exact order:
//!
//! ```text
//! pair-format 1
//! sigma 0; 0; 1                (optional: developing-map coefficients, ascending)
//! points 0                     (divisor points, `; `-separated; bare `points` if empty)
//! twist 2
//! B <i> <j> (num)/(den)        (9 lines, row-major)
//! D <i> <j> (num)/(den)        (9 lines, row-major)
//! ```
//!
//! Scalars use the canonical text form of the base field (`-1/2`, `i`,
//! `1/2+3/4*i`, …); polynomials are `; `-joined coefficient lists in
//! ascending order.  Blank lines and `#` comments are tolerated on input;
//! the writer emits none, so its output is byte-stable.

use std::fmt::Write as _;

use crate::branched::PairBD;
use crate::error::{Error, Result};
use crate::logconn::{BranchDivisor, LogConnection};
use crate::matrix::Mat;
use crate::oper::BilinearTwisted;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::scalar::Scalar;

/// A parsed pair file: the pair itself plus the optional developing map it
/// was generated from.
#[derive(Clone, Debug)]
pub struct PairDocument {
    pub pair: PairBD,
    pub sigma: Option<Poly>,
}

/// Serialize a pair (and optionally the developing map that produced it) in
/// the canonical byte-stable form.
pub fn write_pair(pair: &PairBD, sigma: Option<&Poly>) -> String {
    let mut out = String::new();
    out.push_str("pair-format 1\n");
    if let Some(s) = sigma {
        writeln!(out, "sigma {s}").unwrap();
    }
    let pts = pair.d.divisor.points();
    if pts.is_empty() {
        out.push_str("points\n");
    } else {
        let list: Vec<String> = pts.iter().map(|p| p.to_string()).collect();
        writeln!(out, "points {}", list.join("; ")).unwrap();
    }
    writeln!(out, "twist {}", pair.b.twist).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            writeln!(out, "B {i} {j} {}", pair.b.mat.at(i, j)).unwrap();
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            writeln!(out, "D {i} {j} {}", pair.d.a.at(i, j)).unwrap();
        }
    }
    out
}

/// Significant lines with their 1-based positions (blank and comment lines
/// removed, CRLF tolerated).
struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    next: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            last_line = idx + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            items.push((idx + 1, line));
        }
        Lines { items, next: 0, last_line }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.next).copied()
    }

    fn take(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.items.get(self.next) {
            Some(&item) => {
                self.next += 1;
                Ok(item)
            }
            None => Err(Error::parse(
                self.last_line + 1,
                1,
                format!("unexpected end of file; expected {what}"),
            )),
        }
    }
}

fn field<'a>(line: &'a str, prefix: &str) -> Option<&'a str> {
    if line == prefix.trim_end() {
        Some("")
    } else {
        line.strip_prefix(prefix)
    }
}

/// Parse the canonical pair format.  Syntax failures report 1-based line and
/// column; semantic failures (non-symmetric form, pole outside the divisor,
/// repeated divisor points) surface as the corresponding validation errors.
pub fn read_pair(text: &str) -> Result<PairDocument> {
    let mut lines = Lines::new(text);

    let (ln, header) = lines.take("header 'pair-format 1'")?;
    if header != "pair-format 1" {
        return Err(Error::parse(ln, 1, "expected header 'pair-format 1'"));
    }

    let mut sigma = None;
    if let Some((ln, line)) = lines.peek() {
        if let Some(rest) = field(line, "sigma ") {
            lines.next += 1;
            let p: Poly = rest
                .parse()
                .map_err(|e: String| Error::parse(ln, "sigma ".len() + 1, e))?;
            sigma = Some(p);
        }
    }

    let (ln, line) = lines.take("'points' line")?;
    let rest = field(line, "points ")
        .ok_or_else(|| Error::parse(ln, 1, "expected 'points' line"))?;
    let mut points = Vec::new();
    if !rest.trim().is_empty() {
        let mut col = "points ".len() + 1;
        for part in rest.split(';') {
            let p: Scalar = part
                .trim()
                .parse()
                .map_err(|e: String| Error::parse(ln, col, e))?;
            points.push(p);
            col += part.len() + 1;
        }
    }
    let divisor = BranchDivisor::new(points)?;

    let (ln, line) = lines.take("'twist' line")?;
    let rest = field(line, "twist ")
        .ok_or_else(|| Error::parse(ln, 1, "expected 'twist' line"))?;
    let twist: i64 = rest
        .trim()
        .parse()
        .map_err(|_| Error::parse(ln, "twist ".len() + 1, format!("bad integer {rest:?}")))?;

    let mut read_block = |tag: &str| -> Result<Mat<RatFunc>> {
        let mut m = Mat::<RatFunc>::zero(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let (ln, line) = lines.take(&format!("entry '{tag} {i} {j}'"))?;
                let prefix = format!("{tag} {i} {j} ");
                let rest = line.strip_prefix(&prefix).ok_or_else(|| {
                    Error::parse(ln, 1, format!("expected entry '{tag} {i} {j}'"))
                })?;
                let f: RatFunc = rest
                    .parse()
                    .map_err(|e: String| Error::parse(ln, prefix.len() + 1, e))?;
                m.set(i, j, f);
            }
        }
        Ok(m)
    };

    let b_mat = read_block("B")?;
    let d_mat = read_block("D")?;

    if let Some((ln, line)) = lines.peek() {
        return Err(Error::parse(ln, 1, format!("unexpected trailing content {line:?}")));
    }

    let b = BilinearTwisted::new(b_mat, twist)?;
    let d = LogConnection::new(d_mat, divisor)?;
    Ok(PairDocument { pair: PairBD { b, d }, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branched::{build_pair, build_sl2_model, perturbed_pair};

    fn model_pair(sig: &[i64]) -> (PairBD, Poly) {
        let sigma = Poly::from_ints(sig);
        let pair = build_pair(&build_sl2_model(&sigma).unwrap()).unwrap();
        (pair, sigma)
    }

    fn assert_pairs_equal(a: &PairBD, b: &PairBD) {
        assert_eq!(a.b.mat, b.b.mat);
        assert_eq!(a.b.twist, b.b.twist);
        assert_eq!(a.d.a, b.d.a);
        assert_eq!(a.d.divisor.points(), b.d.divisor.points());
    }

    #[test]
    fn canonical_round_trip_is_byte_stable() {
        for sig in [&[0i64, 1][..], &[0, 0, 1], &[0, 0, 1, 1]] {
            let (pair, sigma) = model_pair(sig);
            let text = write_pair(&pair, Some(&sigma));
            let doc = read_pair(&text).unwrap();
            assert_pairs_equal(&doc.pair, &pair);
            assert_eq!(doc.sigma.as_ref(), Some(&sigma));
            assert_eq!(write_pair(&doc.pair, doc.sigma.as_ref()), text);
        }
    }

    #[test]
    fn sigma_line_is_optional() {
        let (pair, _) = model_pair(&[0, 0, 1]);
        let text = write_pair(&pair, None);
        assert!(!text.contains("sigma"));
        let doc = read_pair(&text).unwrap();
        assert!(doc.sigma.is_none());
        assert_pairs_equal(&doc.pair, &pair);
    }

    #[test]
    fn perturbed_pair_round_trips() {
        let pair = perturbed_pair(&Scalar::int(7)).unwrap();
        let text = write_pair(&pair, None);
        let doc = read_pair(&text).unwrap();
        assert_pairs_equal(&doc.pair, &pair);
    }

    #[test]
    fn gaussian_scalars_round_trip() {
        // Diagonal form with Gaussian-rational entries over an empty divisor.
        let entries = [
            Scalar::gauss(1, 1, 1, 1),   // 1+i
            Scalar::gauss(0, 1, -3, 4),  // -3/4*i
            Scalar::ratio(1, 2),         // 1/2
        ];
        let mut b = Mat::<RatFunc>::zero(3, 3);
        for (k, e) in entries.iter().enumerate() {
            b.set(k, k, RatFunc::constant(e.clone()));
        }
        let pair = PairBD {
            b: BilinearTwisted::new(b, 2).unwrap(),
            d: LogConnection::new(Mat::zero(3, 3), BranchDivisor::empty()).unwrap(),
        };
        let text = write_pair(&pair, None);
        assert!(text.contains("1+i"));
        assert!(text.contains("-3/4*i"));
        let doc = read_pair(&text).unwrap();
        assert_pairs_equal(&doc.pair, &pair);
        assert_eq!(write_pair(&doc.pair, None), text);
    }

    #[test]
    fn comments_and_blank_lines_are_tolerated() {
        let (pair, sigma) = model_pair(&[0, 0, 1]);
        let canonical = write_pair(&pair, Some(&sigma));
        let mut noisy = String::from("# candidate pair\n\n");
        for line in canonical.lines() {
            noisy.push_str(line);
            noisy.push_str("\n\n");
        }
        let doc = read_pair(&noisy).unwrap();
        assert_pairs_equal(&doc.pair, &pair);
        assert_eq!(write_pair(&doc.pair, doc.sigma.as_ref()), canonical);
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        // Empty input: header missing.
        match read_pair("") {
            Err(Error::Parse { line: 1, col: 1, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        // Wrong header.
        match read_pair("pair-format 2\n") {
            Err(Error::Parse { line: 1, col: 1, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }

        let (pair, sigma) = model_pair(&[0, 0, 1]);
        let canonical = write_pair(&pair, Some(&sigma));

        // Corrupt the twist number.
        let bad = canonical.replace("twist 2", "twist two");
        match read_pair(&bad) {
            Err(Error::Parse { line: 4, col: 7, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }

        // Break an entry tag (out-of-order index).
        let bad = canonical.replace("B 0 0 ", "B 0 9 ");
        match read_pair(&bad) {
            Err(Error::Parse { line: 5, col: 1, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }

        // Break a rational-function literal.
        let first_b = canonical.lines().nth(4).unwrap().to_string();
        let bad = canonical.replace(&first_b, "B 0 0 (1)/(0)");
        match read_pair(&bad) {
            Err(Error::Parse { line: 5, col: 7, msg }) => {
                assert!(msg.contains("zero denominator"));
            }
            other => panic!("unexpected: {other:?}"),
        }

        // Truncated file.
        let truncated: String =
            canonical.lines().take(10).map(|l| format!("{l}\n")).collect();
        match read_pair(&truncated) {
            Err(Error::Parse { line: 11, col: 1, msg }) => {
                assert!(msg.contains("end of file"));
            }
            other => panic!("unexpected: {other:?}"),
        }

        // Trailing garbage.
        let bad = format!("{canonical}extra stuff\n");
        match read_pair(&bad) {
            Err(Error::Parse { msg, .. }) => assert!(msg.contains("trailing")),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn semantic_errors_surface_as_validation_failures() {
        let (pair, sigma) = model_pair(&[0, 0, 1]);
        let canonical = write_pair(&pair, Some(&sigma));

        // Repeated divisor point.
        let bad = canonical.replace("points 0", "points 0; 0");
        assert!(matches!(read_pair(&bad), Err(Error::NonReducedDivisor(_))));

        // Pole outside the declared divisor: move the divisor point away.
        let bad = canonical.replace("points 0", "points 1");
        assert!(matches!(read_pair(&bad), Err(Error::ConditionViolation(_))));

        // Non-symmetric form: change an off-diagonal entry only.
        let b01 = canonical
            .lines()
            .find(|l| l.starts_with("B 0 1 "))
            .unwrap()
            .to_string();
        let bad = canonical.replace(&b01, "B 0 1 (0; 1)/(1)");
        assert!(matches!(read_pair(&bad), Err(Error::ConditionViolation(_))));
    }
}
