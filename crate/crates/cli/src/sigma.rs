//! Parser for developing-map arguments.  Two forms are accepted:
//!
//! * the coefficient-list form of the library text format, ascending and
//!   `;`-separated: `0; 0; 1` is z²;
//! * a symbolic sum of monomials in `z` with rational coefficients:
//!   `z^2`, `z^2+z^3`, `z^3/3+z`, `2*z+1`, `-3/4*z^2`.

use so3oper_core::{Poly, Scalar};

pub fn parse_sigma(text: &str) -> Result<Poly, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty developing map".into());
    }
    if text.contains(';') {
        return text.parse::<Poly>();
    }
    parse_symbolic(text)
}

fn parse_rational(token: &str) -> Result<Scalar, String> {
    let token = token.trim();
    let (num_s, den_s) = match token.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (token, "1"),
    };
    let num: i64 = num_s
        .parse()
        .map_err(|_| format!("bad integer {num_s:?} in developing map"))?;
    let den: i64 = den_s
        .parse()
        .map_err(|_| format!("bad integer {den_s:?} in developing map"))?;
    if den == 0 {
        return Err("zero denominator in developing map".into());
    }
    Ok(Scalar::ratio(num, den))
}

fn parse_symbolic(text: &str) -> Result<Poly, String> {
    // Split into signed terms at top-level '+'/'-'.
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for (k, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && k > 0 {
            terms.push((negative, std::mem::take(&mut current)));
            negative = ch == '-';
        } else if ch == '-' && k == 0 {
            negative = true;
        } else {
            current.push(ch);
        }
    }
    terms.push((negative, current));

    let mut coeffs: Vec<Scalar> = Vec::new();
    let mut bump = |deg: usize, value: Scalar| {
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, Scalar::int(0));
        }
        let slot = coeffs[deg].clone();
        coeffs[deg] = slot + value;
    };

    for (neg, term) in terms {
        if term.is_empty() {
            return Err("empty term in developing map".into());
        }
        let (deg, mut value) = match term.find('z') {
            None => (0usize, parse_rational(&term)?),
            Some(zpos) => {
                let pre = &term[..zpos];
                let post = &term[zpos + 1..];
                let coef = if pre.is_empty() {
                    Scalar::int(1)
                } else {
                    parse_rational(pre.strip_suffix('*').unwrap_or(pre))?
                };
                let (deg, denom) = if let Some(rest) = post.strip_prefix('^') {
                    match rest.split_once('/') {
                        Some((e, d)) => (e.to_string(), Some(d.to_string())),
                        None => (rest.to_string(), None),
                    }
                } else if let Some(d) = post.strip_prefix('/') {
                    ("1".to_string(), Some(d.to_string()))
                } else if post.is_empty() {
                    ("1".to_string(), None)
                } else {
                    return Err(format!("cannot parse term {term:?}"));
                };
                let deg: usize = deg
                    .parse()
                    .map_err(|_| format!("bad exponent in term {term:?}"))?;
                let mut c = coef;
                if let Some(d) = denom {
                    let d: i64 = d
                        .parse()
                        .map_err(|_| format!("bad denominator in term {term:?}"))?;
                    if d == 0 {
                        return Err("zero denominator in developing map".into());
                    }
                    c *= Scalar::ratio(1, d);
                }
                (deg, c)
            }
        };
        if neg {
            value = -value;
        }
        bump(deg, value);
    }
    Ok(Poly::new(coeffs))
}
