//! A small parser for monic polynomial expressions: sums of `z^k`
//! monomials with real or parenthesized complex coefficients, for example
//! `z^2-1`, `z^3 + (1+2i)*z - (0.5-0.25i)`, or `z^2 + 3z + 2`.

use num_complex::Complex64;
use webstrata::MonicPolynomial;

/// Parse an expression into a monic polynomial. The leading coefficient
/// must be exactly 1 and the degree at least 1.
pub fn parse_polynomial(text: &str) -> Result<MonicPolynomial, String> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err("empty expression".into());
    }
    let mut coeffs: Vec<Complex64> = Vec::new();
    for (sign, term) in split_terms(&cleaned)? {
        let (coef, power) = parse_term(term)?;
        if coeffs.len() <= power {
            coeffs.resize(power + 1, Complex64::new(0.0, 0.0));
        }
        coeffs[power] += sign * coef;
    }
    while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
        coeffs.pop();
    }
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Err("the polynomial must have degree at least 1".into());
    }
    let lead = coeffs[degree];
    if (lead - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(format!(
            "the polynomial must be monic; the z^{degree} coefficient is {lead}"
        ));
    }
    coeffs.pop();
    MonicPolynomial::new(coeffs).map_err(|e| e.to_string())
}

/// Split into signed terms at top-level `+`/`-`.
fn split_terms(s: &str) -> Result<Vec<(f64, &str)>, String> {
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut sign = 1.0;
    let mut i = 0usize;
    if bytes[0] == b'+' || bytes[0] == b'-' {
        sign = if bytes[0] == b'-' { -1.0 } else { 1.0 };
        start = 1;
        i = 1;
    }
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| "unbalanced parentheses".to_string())?;
            }
            b'+' | b'-' if depth == 0 => {
                if start == i {
                    return Err(format!("empty term before position {i}"));
                }
                terms.push((sign, &s[start..i]));
                sign = if bytes[i] == b'-' { -1.0 } else { 1.0 };
                start = i + 1;
            }
            _ => {}
        }
        i += 1;
    }
    if depth != 0 {
        return Err("unbalanced parentheses".into());
    }
    if start >= s.len() {
        return Err("trailing operator".into());
    }
    terms.push((sign, &s[start..]));
    Ok(terms)
}

/// Parse one unsigned term: optional coefficient, optional `*`, optional
/// `z` with optional `^k`.
fn parse_term(term: &str) -> Result<(Complex64, usize), String> {
    let mut rest = term;
    let mut coef: Option<Complex64> = None;

    if rest.starts_with('(') {
        let close = matching_paren(rest)?;
        coef = Some(parse_complex(&rest[1..close])?);
        rest = &rest[close + 1..];
    } else if rest.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        let end = rest
            .find(|c: char| !c.is_ascii_digit() && c != '.' && c != 'e' && c != 'E')
            .unwrap_or(rest.len());
        let num: f64 = rest[..end]
            .parse()
            .map_err(|_| format!("bad number `{}`", &rest[..end]))?;
        rest = &rest[end..];
        if let Some(r) = rest.strip_prefix('i') {
            coef = Some(Complex64::new(0.0, num));
            rest = r;
        } else {
            coef = Some(Complex64::new(num, 0.0));
        }
    } else if let Some(r) = rest.strip_prefix('i') {
        coef = Some(Complex64::new(0.0, 1.0));
        rest = r;
    }

    rest = rest.strip_prefix('*').unwrap_or(rest);

    let power = if let Some(r) = rest.strip_prefix('z') {
        rest = r;
        if let Some(r) = rest.strip_prefix('^') {
            let end = r
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(r.len());
            let k: usize = r[..end]
                .parse()
                .map_err(|_| format!("bad exponent in `{term}`"))?;
            rest = &r[end..];
            k
        } else {
            1
        }
    } else {
        0
    };

    if !rest.is_empty() {
        return Err(format!("unexpected `{rest}` in term `{term}`"));
    }
    let coef = match coef {
        Some(c) => c,
        None if power > 0 => Complex64::new(1.0, 0.0),
        None => return Err(format!("empty term `{term}`")),
    };
    Ok((coef, power))
}

fn matching_paren(s: &str) -> Result<usize, String> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
            _ => {}
        }
    }
    Err("unbalanced parentheses".into())
}

/// Parse `a`, `a+bi`, `a-bi`, `bi`, `i`, or `-i` (no outer parentheses).
fn parse_complex(s: &str) -> Result<Complex64, String> {
    if s.is_empty() {
        return Err("empty coefficient".into());
    }
    // split at the last top-level sign that is not an exponent sign
    let bytes = s.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-')
            && bytes[i - 1] != b'e'
            && bytes[i - 1] != b'E'
        {
            split = Some(i);
            break;
        }
    }
    let (first, second) = match split {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    if second.is_empty() {
        return parse_real_or_imaginary(first);
    }
    let a = parse_real_or_imaginary(first)?;
    let b = parse_real_or_imaginary(second)?;
    if a.im != 0.0 && b.im != 0.0 {
        return Err(format!("two imaginary parts in `{s}`"));
    }
    Ok(a + b)
}

fn parse_real_or_imaginary(s: &str) -> Result<Complex64, String> {
    if let Some(body) = s.strip_suffix('i') {
        let value: f64 = match body {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => body.parse().map_err(|_| format!("bad number `{body}`"))?,
        };
        Ok(Complex64::new(0.0, value))
    } else {
        let value: f64 = s.parse().map_err(|_| format!("bad number `{s}`"))?;
        Ok(Complex64::new(value, 0.0))
    }
}
