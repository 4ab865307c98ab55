//! Plain-text PLQ files and number formatting.
//!
//! A PLQ file holds one piece per line as four whitespace-separated tokens `x a b c`.
//! Blank lines and lines starting with `#` are skipped. Infinities are written
//! `inf`, `+inf` or `-inf` in any letter case.

use crate::error::{Error, Result};
use crate::plq::PlqFunction;
use crate::tolerance::Tolerance;

/// Shortest round-trip decimal form, with `inf`, `-inf` and `nan` spelled out.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{}", v + 0.0)
    }
}

/// Parses a number token; accepts `inf`/`-inf`/`+inf`/`nan` case-insensitively.
pub fn parse_num(token: &str) -> Option<f64> {
    match token.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        t => t.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Parses the rows of a PLQ file without validating them.
pub fn parse_plq_rows(text: &str) -> Result<Vec<[f64; 4]>> {
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(Error::Parse {
                line: k + 1,
                message: format!("expected 4 tokens, found {}", tokens.len()),
            });
        }
        let mut row = [0.0; 4];
        for (slot, tok) in row.iter_mut().zip(&tokens) {
            *slot = match parse_num(tok) {
                Some(v) if !v.is_nan() => v,
                _ => {
                    return Err(Error::Parse {
                        line: k + 1,
                        message: format!("invalid number `{tok}`"),
                    })
                }
            };
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Parses and validates a PLQ file. Validation failures are reported against
/// the line that holds the offending row.
pub fn parse_plq(text: &str) -> Result<PlqFunction> {
    parse_plq_with(text, Tolerance::default())
}

pub fn parse_plq_with(text: &str, tol: Tolerance) -> Result<PlqFunction> {
    let rows = parse_plq_rows(text)?;
    PlqFunction::with_tolerance(&rows, tol).map_err(|e| {
        let row = match &e {
            Error::NonFinite { row }
            | Error::NotSorted { row }
            | Error::NonConvexPiece { row }
            | Error::SlopeDecreasing { row }
            | Error::Discontinuous { row }
            | Error::BadInfinityConvention { row } => Some(*row),
            _ => None,
        };
        match row {
            Some(r) => Error::Parse {
                line: data_line_number(text, r),
                message: e.to_string(),
            },
            None => e,
        }
    })
}

fn data_line_number(text: &str, row: usize) -> usize {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .nth(row)
        .map(|(k, _)| k + 1)
        .unwrap_or(0)
}

pub fn to_plq_text(f: &PlqFunction) -> String {
    let mut out = String::new();
    for p in f.pieces() {
        out.push_str(&format!(
            "{} {} {} {}\n",
            fmt_num(p.x),
            fmt_num(p.a),
            fmt_num(p.b),
            fmt_num(p.c)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_convex_plq;
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_infinities() {
        let f = parse_plq("# |x|\n0 0 -1 0\n\n  INF 0 1 0\n").unwrap();
        assert_eq!(
            f.to_rows(),
            vec![[0.0, 0.0, -1.0, 0.0], [f64::INFINITY, 0.0, 1.0, 0.0]]
        );
        let g = parse_plq("0 0 0 +Inf\ninf 1 0 0").unwrap();
        assert_eq!(g.domain().lo, 0.0);
    }

    #[test]
    fn reports_line_numbers() {
        match parse_plq("# header\n0 0 -1\ninf 0 1 0\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_plq("# header\n0 0 1 0\n# gap\ninf 0 -1 0\n") {
            Err(Error::Parse { line: 2, message }) => assert!(message.contains("slope")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_plq("0 0 0 nan\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_plq("abc 0 0 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn formats_numbers() {
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_num(f64::NAN), "nan");
        assert_eq!(fmt_num(0.1 + 0.2), "0.30000000000000004");
    }

    proptest! {
        #[test]
        fn text_round_trip(pieces in 1usize..40, seed in any::<u64>()) {
            let f = generate_convex_plq(pieces, seed);
            let g = parse_plq(&to_plq_text(&f)).unwrap();
            prop_assert_eq!(g, f);
        }
    }
}
