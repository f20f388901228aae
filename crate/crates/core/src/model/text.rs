//! Line-oriented instance format:
//!
//! ```text
//! owa-winner v1
//! <n> <m> <K>
//! owa <alpha_1> ... <alpha_K>        (or: owa-family <name> <params...>)
//! <m utilities of agent 1>
//! ...
//! <m utilities of agent n>
//! ```
//!
//! `#` starts a comment; blank lines are ignored. Numbers may be integers,
//! decimals or fractions (`2/3`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Instance, OwaVector, UtilityMatrix};
use crate::number::{format_rational, parse_rational, Rational};
use crate::owa::OwaFamily;

pub const MAGIC: &str = "owa-winner v1";

struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl Line<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn err_at(&self, token: usize, message: impl Into<String>) -> Error {
        let column = self.tokens.get(token).map_or(1, |t| t.column);
        self.err(column, message)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &body[s..pos],
                        column: body[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then_some(Line {
            number: i + 1,
            tokens,
        })
    })
}

fn eof_error(text: &str, message: &str) -> Error {
    Error::Parse {
        line: text.lines().count().max(1),
        column: 1,
        message: format!("unexpected end of input: {message}"),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);

    let magic = lines
        .next()
        .ok_or_else(|| eof_error(text, "missing `owa-winner v1` header"))?;
    let words: Vec<&str> = magic.tokens.iter().map(|t| t.text).collect();
    if words != ["owa-winner", "v1"] {
        return Err(magic.err_at(0, format!("expected `{MAGIC}`")));
    }

    let header = lines
        .next()
        .ok_or_else(|| eof_error(text, "missing `<n> <m> <K>` line"))?;
    if header.tokens.len() != 3 {
        return Err(header.err_at(
            header.tokens.len().min(3),
            "malformed header: expected `<n> <m> <K>`",
        ));
    }
    let mut dims = [0usize; 3];
    for (i, name) in ["n", "m", "K"].iter().enumerate() {
        dims[i] = header.tokens[i]
            .text
            .parse()
            .ok()
            .filter(|v| *v >= 1)
            .ok_or_else(|| {
                header.err_at(i, format!("malformed header: {name} must be a positive integer"))
            })?;
    }
    let [n, m, k] = dims;
    if k > m {
        return Err(header.err_at(2, format!("K exceeds item count (K = {k}, m = {m})")));
    }

    let owa_line = lines
        .next()
        .ok_or_else(|| eof_error(text, "missing `owa` line"))?;
    let (owa, family) = match owa_line.tokens[0].text {
        "owa" => {
            let weights = owa_line.tokens[1..]
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let v = parse_rational(t.text).map_err(|e| owa_line.err_at(i + 1, e))?;
                    if v < Rational::from_integer(0) {
                        return Err(owa_line.err_at(i + 1, "negative OWA weight"));
                    }
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            if weights.len() != k {
                return Err(owa_line.err_at(
                    0,
                    format!("OWA length {} does not match K = {k}", weights.len()),
                ));
            }
            let owa = OwaVector::new(weights).map_err(|e| owa_line.err_at(0, e.to_string()))?;
            (owa, None)
        }
        "owa-family" => {
            let words: Vec<&str> = owa_line.tokens[1..].iter().map(|t| t.text).collect();
            let family = OwaFamily::parse(&words).map_err(|e| owa_line.err_at(1, e))?;
            let owa = crate::owa::make_owa(&family, k)
                .map_err(|e| owa_line.err_at(1, e.to_string()))?;
            (owa, Some(family))
        }
        _ => return Err(owa_line.err_at(0, "expected `owa` or `owa-family`")),
    };
    if owa.is_all_zero() {
        return Err(owa_line.err_at(0, "all-zero OWA vector"));
    }

    let mut rows = Vec::with_capacity(n);
    for agent in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| eof_error(text, &format!("expected {n} utility rows, found {agent}")))?;
        if line.tokens.len() != m {
            return Err(line.err_at(
                line.tokens.len().min(m),
                format!("expected {m} utilities, found {}", line.tokens.len()),
            ));
        }
        let row = line
            .tokens
            .iter()
            .enumerate()
            .map(|(j, t)| {
                let v = parse_rational(t.text).map_err(|e| line.err_at(j, e))?;
                if v < Rational::from_integer(0) {
                    return Err(line.err_at(j, "negative utility"));
                }
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if let Some(extra) = lines.next() {
        return Err(extra.err_at(0, "unexpected content after the last utility row"));
    }

    let utilities = UtilityMatrix::new(rows)?;
    match family {
        Some(f) => Instance::with_family(utilities, f, k),
        None => Instance::new(utilities, owa),
    }
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "{} {} {}", inst.n(), inst.m(), inst.k());
    match inst.family() {
        Some(f) => {
            let _ = writeln!(out, "owa-family {f}");
        }
        None => {
            let w: Vec<String> = inst.owa().as_slice().iter().map(format_rational).collect();
            let _ = writeln!(out, "owa {}", w.join(" "));
        }
    }
    for row in inst.utilities().rows() {
        let w: Vec<String> = row.iter().map(format_rational).collect();
        let _ = writeln!(out, "{}", w.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata::exjl_utilities;

    const EXJL: &str = "\
# running example
owa-winner v1
3 6 3
owa 2 1 0
10 10 9 8 5 0
6 5 0 10 8 10   # agent 2
8 0 10 6 10 7
";

    #[test]
    fn parses_running_example() {
        let inst = parse_instance(EXJL).unwrap();
        assert_eq!((inst.n(), inst.m(), inst.k()), (3, 6, 3));
        assert_eq!(inst.utilities(), &exjl_utilities());
        assert_eq!(inst.owa(), &OwaVector::from_integers(&[2, 1, 0]).unwrap());
    }

    #[test]
    fn single_zero_utility_is_valid() {
        let inst = parse_instance("owa-winner v1\n1 1 1\nowa 1\n0\n").unwrap();
        assert_eq!(inst.k(), 1);
    }

    #[test]
    fn family_line() {
        let inst = parse_instance("owa-winner v1\n1 3 3\nowa-family harmonic\n1 2 3\n").unwrap();
        assert_eq!(inst.family(), Some(&OwaFamily::Harmonic));
        assert_eq!(inst.owa().as_slice()[2], Rational::new(1, 3));
    }

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_instance(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn k_exceeds_m() {
        let (line, column, msg) = parse_err("owa-winner v1\n2 3 4\nowa 1 1 1 1\n");
        assert_eq!((line, column), (2, 5));
        assert!(msg.contains("K exceeds item count"));
    }

    #[test]
    fn diagnostics_point_at_offending_token() {
        let (line, column, msg) = parse_err("owa-winner v1\n1 2 1\nowa 1\n3 -1\n");
        assert_eq!((line, column), (4, 3));
        assert!(msg.contains("negative utility"));

        let (line, _, msg) = parse_err("owa-winner v1\n1 2 2\nowa 1\n3 1\n");
        assert_eq!(line, 3);
        assert!(msg.contains("does not match K"));

        let (_, _, msg) = parse_err("owa-winner v1\n1 2 2\nowa 0 0\n3 1\n");
        assert!(msg.contains("all-zero"));

        let (line, _, msg) = parse_err("owa-winner v1\n1 x 2\n");
        assert_eq!(line, 2);
        assert!(msg.contains("malformed header"));

        let (line, _, _) = parse_err("owa-winner v2\n");
        assert_eq!(line, 1);

        let (_, _, msg) = parse_err("owa-winner v1\n2 2 1\nowa 1\n1 1\n");
        assert!(msg.contains("end of input"));

        let (line, _, _) = parse_err("owa-winner v1\n1 2 1\nowa 1\n1 1\n1 1\n");
        assert_eq!(line, 5);

        let (line, column, _) = parse_err("owa-winner v1\n1 2 1\nowa-family zipf\n1 1\n");
        assert_eq!((line, column), (3, 12));
    }

    #[test]
    fn serialize_then_parse() {
        let inst = parse_instance(EXJL).unwrap();
        assert_eq!(parse_instance(&serialize_instance(&inst)).unwrap(), inst);
        let fam = parse_instance("owa-winner v1\n2 2 2\nowa-family gprog 3/2\n1/2 0.25\n1 0\n").unwrap();
        let text = serialize_instance(&fam);
        assert!(text.contains("owa-family gprog 3/2"));
        assert_eq!(parse_instance(&text).unwrap(), fam);
    }
}
