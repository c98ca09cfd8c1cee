//! Plain-text grammar for catalog functions.
//!
//! Base kinds:
//!   `ball a=<amp> r=<radius> n=<dim>`
//!   `gauss n=<dim>`
//!   `power alpha=<a> r=<radius> n=<dim>`
//!   `step n=<dim> edges=<r1,r2,...> values=<v1,v2,...>`
//!   `witness n=<dim> p=<p0>`
//!   `zero n=<dim>`
//! Wrappers:
//!   `abs(<expr>)`, `neg(<expr>)`, `scale c=<f> (<expr>)`,
//!   `shift by=<d1,d2,...> (<expr>)`, `trunc r=<radius> (<expr>)`
//!
//! Keys may appear in any order; errors carry the byte position and the
//! expected tokens.

use crate::functions::{FunctionError, TestFunction};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err<T>(&self, at: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: at, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_alphabetic() || c == b'_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err(start, "expected an identifier (kind, wrapper, or key)");
        }
        Ok((self.src[start..self.pos].to_string(), start))
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(self.pos, format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E'))
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map_err(|_| ParseError { position: start, message: format!("expected a number, got {text:?}") })
    }

    fn number_list(&mut self) -> Result<Vec<f64>, ParseError> {
        let mut out = vec![self.number()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            out.push(self.number()?);
        }
        Ok(out)
    }

    /// Key/value pairs up to an opening paren, closing paren, or end of input.
    fn args(&mut self) -> Result<Vec<(String, usize, Vec<f64>)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some(b'(') | Some(b')') => return Ok(out),
                _ => {}
            }
            let (key, at) = self.ident()?;
            self.expect(b'=')?;
            let values = self.number_list()?;
            out.push((key, at, values));
        }
    }

    fn expr(&mut self) -> Result<TestFunction, ParseError> {
        let (head, head_at) = self.ident()?;
        match head.as_str() {
            "abs" | "neg" => {
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(if head == "abs" {
                    TestFunction::abs(inner)
                } else {
                    TestFunction::negated(inner)
                })
            }
            "scale" | "shift" | "trunc" => {
                let args = self.args()?;
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b')')?;
                let build = |r: Result<TestFunction, FunctionError>| {
                    r.map_err(|e| ParseError { position: head_at, message: e.to_string() })
                };
                match head.as_str() {
                    "scale" => {
                        let c = require_scalar(&args, "c", head_at)?;
                        build(TestFunction::scaled(c, inner))
                    }
                    "shift" => {
                        let by = require_list(&args, "by", head_at)?;
                        build(TestFunction::shifted(by, inner))
                    }
                    _ => {
                        let r = require_scalar(&args, "r", head_at)?;
                        build(TestFunction::truncated(r, inner))
                    }
                }
            }
            "ball" | "gauss" | "power" | "step" | "witness" | "zero" => {
                let args = self.args()?;
                let build = |r: Result<TestFunction, FunctionError>| {
                    r.map_err(|e| ParseError { position: head_at, message: e.to_string() })
                };
                match head.as_str() {
                    "ball" => {
                        let a = require_scalar(&args, "a", head_at)?;
                        let r = require_scalar(&args, "r", head_at)?;
                        let n = require_dim(&args, head_at)?;
                        build(TestFunction::ball(n, a, r))
                    }
                    "gauss" => build(TestFunction::gaussian(require_dim(&args, head_at)?)),
                    "power" => {
                        let alpha = require_scalar(&args, "alpha", head_at)?;
                        let r = require_scalar(&args, "r", head_at)?;
                        let n = require_dim(&args, head_at)?;
                        build(TestFunction::truncated_power(n, alpha, r))
                    }
                    "step" => {
                        let n = require_dim(&args, head_at)?;
                        let edges = require_list(&args, "edges", head_at)?;
                        let values = require_list(&args, "values", head_at)?;
                        build(TestFunction::radial_step(n, edges, values))
                    }
                    "witness" => {
                        let n = require_dim(&args, head_at)?;
                        let p = require_scalar(&args, "p", head_at)?;
                        build(TestFunction::weak_lp_witness(n, p))
                    }
                    _ => build(TestFunction::zero(require_dim(&args, head_at)?)),
                }
            }
            other => self.err(
                head_at,
                format!(
                    "unknown kind {other:?}; expected one of ball, gauss, power, step, \
                     witness, zero, abs, neg, scale, shift, trunc"
                ),
            ),
        }
    }
}

fn find<'a>(args: &'a [(String, usize, Vec<f64>)], key: &str) -> Option<&'a Vec<f64>> {
    args.iter().find(|(k, _, _)| k == key).map(|(_, _, v)| v)
}

fn require_scalar(args: &[(String, usize, Vec<f64>)], key: &str, at: usize) -> Result<f64, ParseError> {
    match find(args, key) {
        Some(v) if v.len() == 1 => Ok(v[0]),
        Some(_) => Err(ParseError { position: at, message: format!("key '{key}' expects a single number") }),
        None => Err(ParseError { position: at, message: format!("missing required key '{key}'") }),
    }
}

fn require_list(args: &[(String, usize, Vec<f64>)], key: &str, at: usize) -> Result<Vec<f64>, ParseError> {
    find(args, key)
        .cloned()
        .ok_or_else(|| ParseError { position: at, message: format!("missing required key '{key}'") })
}

fn require_dim(args: &[(String, usize, Vec<f64>)], at: usize) -> Result<usize, ParseError> {
    let v = require_scalar(args, "n", at)?;
    if v.fract() != 0.0 || v < 1.0 || v > 64.0 {
        return Err(ParseError { position: at, message: format!("key 'n' must be a small positive integer, got {v}") });
    }
    Ok(v as usize)
}

/// Parse a function spec string into a catalog entry.
pub fn parse_function(src: &str) -> Result<TestFunction, ParseError> {
    let mut p = Parser::new(src);
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(ParseError {
            position: p.pos,
            message: "unexpected trailing input".into(),
        });
    }
    Ok(f)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl TestFunction {
    /// Render back to the grammar accepted by [`parse_function`].
    pub fn spec_string(&self) -> String {
        match self {
            TestFunction::Zero { dim } => format!("zero n={dim}"),
            TestFunction::BallIndicator { dim, amplitude, radius } => {
                format!("ball a={amplitude} r={radius} n={dim}")
            }
            TestFunction::RadialStep { dim, edges, values } => {
                format!("step n={dim} edges={} values={}", join(edges), join(values))
            }
            TestFunction::Gaussian { dim } => format!("gauss n={dim}"),
            TestFunction::TruncatedPower { dim, alpha, radius } => {
                format!("power alpha={alpha} r={radius} n={dim}")
            }
            TestFunction::WeakLpWitness { dim, p0 } => format!("witness n={dim} p={p0}"),
            TestFunction::Shifted { shift, inner } => {
                format!("shift by={} ({})", join(shift), inner.spec_string())
            }
            TestFunction::Scaled { factor, inner } => {
                format!("scale c={factor} ({})", inner.spec_string())
            }
            TestFunction::AbsValue { inner } => format!("abs({})", inner.spec_string()),
            TestFunction::Negated { inner } => format!("neg({})", inner.spec_string()),
            TestFunction::Truncated { radius, inner } => {
                format!("trunc r={radius} ({})", inner.spec_string())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_readme_examples() {
        assert_eq!(
            parse_function("ball a=1 r=1 n=1").unwrap(),
            TestFunction::ball(1, 1.0, 1.0).unwrap()
        );
        assert_eq!(parse_function("gauss n=2").unwrap(), TestFunction::gaussian(2).unwrap());
        assert_eq!(
            parse_function("power alpha=0.5 r=1 n=1").unwrap(),
            TestFunction::truncated_power(1, 0.5, 1.0).unwrap()
        );
        assert_eq!(
            parse_function("abs(ball a=1 r=2 n=1)").unwrap(),
            TestFunction::abs(TestFunction::ball(1, 1.0, 2.0).unwrap())
        );
        assert_eq!(
            parse_function("neg(ball a=1 r=0.5 n=1)").unwrap(),
            TestFunction::negated(TestFunction::ball(1, 1.0, 0.5).unwrap())
        );
    }

    #[test]
    fn parses_nested_wrappers() {
        let f = parse_function("scale c=-2 (shift by=0.5,0.5 (step n=2 edges=1,2 values=1,0.5))")
            .unwrap();
        assert_eq!(f.dimension(), 2);
        assert!(!f.is_radial());
        let s = f.spec_string();
        assert_eq!(parse_function(&s).unwrap(), f);
    }

    #[test]
    fn key_order_is_free() {
        assert_eq!(
            parse_function("ball n=1 a=2 r=3").unwrap(),
            parse_function("ball a=2 r=3 n=1").unwrap()
        );
    }

    #[test]
    fn error_positions() {
        let e = parse_function("bogus a=1").unwrap_err();
        assert_eq!(e.position, 0);
        assert!(e.message.contains("unknown kind"));

        let e = parse_function("ball a=1 r=x n=1").unwrap_err();
        assert!(e.message.contains("expected a number"));

        let e = parse_function("ball a=1 n=1").unwrap_err();
        assert!(e.message.contains("missing required key 'r'"));

        let e = parse_function("ball a=1 r=1 n=1 garbage").unwrap_err();
        assert!(e.message.contains("expected '='"));
    }

    #[test]
    fn spec_string_round_trip() {
        for s in [
            "zero n=1",
            "ball a=1 r=1 n=3",
            "step n=1 edges=0.5,1 values=2,-1",
            "witness n=2 p=2",
            "trunc r=2 (gauss n=1)",
        ] {
            let f = parse_function(s).unwrap();
            assert_eq!(parse_function(&f.spec_string()).unwrap(), f);
        }
    }
}
