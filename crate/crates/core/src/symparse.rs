//! Parser for symbol expressions such as `2i*z^-1 + z^2 + 7/10*z^3`.
//!
//! Grammar (whitespace is ignored everywhere):
//!
//! ```text
//! expr    := sign? term (sign term)*
//! term    := coeff ('*'? var power?)? | var power?
//! coeff   := atom | '(' sign? atom (sign atom)* ')'
//! atom    := number ('/' number)? 'i'? | 'i'
//! var     := 'z' | 't' | 'zeta' | 'tau'
//! power   := '^' (sign? integer | '(' sign? integer ')')
//! ```
//!
//! Under [`Convention::ZetaInverse`] the expression is `p(1/zeta)`, so a term
//! `c z^k` sets `a_{-k} = c`; under [`Convention::Direct`] it sets `a_k = c`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::symbol::LaurentSymbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// The text is `p(1/zeta)`, as printed in figure captions.
    #[default]
    ZetaInverse,
    /// The text is `p(t)`.
    Direct,
}

impl Convention {
    fn index(self, power: i32) -> i32 {
        match self {
            Convention::ZetaInverse => -power,
            Convention::Direct => power,
        }
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "zeta_inverse" | "inverse" => Ok(Convention::ZetaInverse),
            "direct" => Ok(Convention::Direct),
            other => Err(Error::Config(format!(
                "unknown convention {other:?} (expected zeta_inverse or direct)"
            ))),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::ZetaInverse => "zeta_inverse",
            Convention::Direct => "direct",
        })
    }
}

/// Parsed expression: `(coefficient, power)` terms in source order, unmerged.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolExpr {
    pub source: String,
    pub terms: Vec<(C64, i32)>,
}

impl SymbolExpr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let terms = Parser::new(text).expr()?;
        Ok(Self {
            source: text.to_string(),
            terms,
        })
    }

    pub fn to_symbol(&self, convention: Convention) -> Result<LaurentSymbol> {
        LaurentSymbol::new(self.terms.iter().map(|&(c, k)| (convention.index(k), c)))
    }
}

pub fn parse_symbol(text: &str, convention: Convention) -> Result<LaurentSymbol> {
    SymbolExpr::parse(text)?.to_symbol(convention)
}

/// A complex literal in the coefficient grammar, e.g. `1+1i`, `-0.5i`, `3/4`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let expr = SymbolExpr::parse(text)?;
    if let Some(&(_, k)) = expr.terms.iter().find(|t| t.1 != 0) {
        return Err(Error::Config(format!(
            "{text:?} is not a complex number (contains z^{k})"
        )));
    }
    Ok(expr.terms.iter().map(|t| t.0).sum())
}

/// Inverse of [`parse_symbol`]: every coefficient is written in shortest
/// round-trip form, so re-parsing reproduces the coefficients exactly.
pub fn format_symbol(sym: &LaurentSymbol, convention: Convention) -> String {
    let mut terms: Vec<(i32, C64)> = sym
        .terms()
        .into_iter()
        .map(|(j, c)| (convention.index(j), c))
        .collect();
    terms.sort_by_key(|t| t.0);
    let mut out = String::new();
    for (n, (k, c)) in terms.into_iter().enumerate() {
        let (neg, body) = if c.im == 0.0 {
            (c.re < 0.0, format!("{}", c.re.abs()))
        } else if c.re == 0.0 {
            (c.im < 0.0, format!("{}i", c.im.abs()))
        } else {
            let s = if c.im < 0.0 { '-' } else { '+' };
            (false, format!("({}{s}{}i)", c.re, c.im.abs()))
        };
        match (n, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
        if k != 0 {
            out.push_str(&format!("*z^{k}"));
        }
    }
    out
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn fail<T>(&mut self, expected: &[&str]) -> Result<T, ParseError> {
        self.skip_ws();
        Err(ParseError {
            position: self.src[..self.pos].chars().count(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn sign(&mut self) -> Option<f64> {
        if self.eat('+') {
            Some(1.0)
        } else if self.eat('-') {
            Some(-1.0)
        } else {
            None
        }
    }

    fn expr(&mut self) -> Result<Vec<(C64, i32)>, ParseError> {
        let mut terms = Vec::new();
        let mut s = self.sign().unwrap_or(1.0);
        loop {
            let (c, k) = self.term()?;
            terms.push((c * s, k));
            if self.peek().is_none() {
                return Ok(terms);
            }
            match self.sign() {
                Some(next) => s = next,
                None => return self.fail(&["'+'", "'-'", "end of input"]),
            }
        }
    }

    fn term(&mut self) -> Result<(C64, i32), ParseError> {
        let coeff = self.coeff()?;
        let starred = coeff.is_some() && self.eat('*');
        let power = if self.var() {
            Some(self.power()?)
        } else if starred {
            return self.fail(&["'z'"]);
        } else {
            None
        };
        match (coeff, power) {
            (None, None) => self.fail(&["number", "'i'", "'('", "'z'"]),
            (c, k) => Ok((c.unwrap_or(C64::new(1.0, 0.0)), k.unwrap_or(0))),
        }
    }

    fn coeff(&mut self) -> Result<Option<C64>, ParseError> {
        if self.eat('(') {
            let mut total = C64::new(0.0, 0.0);
            let mut s = self.sign().unwrap_or(1.0);
            loop {
                match self.atom()? {
                    Some(a) => total += a * s,
                    None => return self.fail(&["number", "'i'"]),
                }
                if self.eat(')') {
                    return Ok(Some(total));
                }
                match self.sign() {
                    Some(next) => s = next,
                    None => return self.fail(&["'+'", "'-'", "')'"]),
                }
            }
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Option<C64>, ParseError> {
        if self.peek() == Some('i')
            && !self.rest()[1..].starts_with(|c: char| c.is_ascii_alphabetic())
        {
            self.pos += 1;
            return Ok(Some(C64::new(0.0, 1.0)));
        }
        let Some(mut x) = self.number() else {
            return Ok(None);
        };
        if self.eat('/') {
            match self.number() {
                Some(d) if d != 0.0 => x /= d,
                Some(_) => return self.fail(&["nonzero denominator"]),
                None => return self.fail(&["number"]),
            }
        }
        if self.peek() == Some('i')
            && !self.rest()[1..].starts_with(|c: char| c.is_ascii_alphabetic())
        {
            self.pos += 1;
            return Ok(Some(C64::new(0.0, x)));
        }
        Ok(Some(C64::new(x, 0.0)))
    }

    /// Unsigned decimal with optional fraction and exponent.
    fn number(&mut self) -> Option<f64> {
        self.skip_ws();
        let bytes = self.rest().as_bytes();
        let mut n = 0;
        let digits = |b: &[u8], mut i: usize| {
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        n = digits(bytes, n);
        let int_digits = n;
        if n < bytes.len() && bytes[n] == b'.' {
            n = digits(bytes, n + 1);
        }
        if n == 0 || (int_digits == 0 && n == 1) {
            return None;
        }
        if n < bytes.len() && (bytes[n] == b'e' || bytes[n] == b'E') {
            let mut m = n + 1;
            if m < bytes.len() && (bytes[m] == b'+' || bytes[m] == b'-') {
                m += 1;
            }
            let end = digits(bytes, m);
            if end > m {
                n = end;
            }
        }
        let value = self.rest()[..n].parse::<f64>().ok()?;
        self.pos += n;
        Some(value)
    }

    fn var(&mut self) -> bool {
        self.skip_ws();
        for name in ["zeta", "tau", "z", "t"] {
            let r = self.rest();
            if r.starts_with(name)
                && !r[name.len()..].starts_with(|c: char| c.is_ascii_alphanumeric())
            {
                self.pos += name.len();
                return true;
            }
        }
        false
    }

    fn power(&mut self) -> Result<i32, ParseError> {
        if !self.eat('^') {
            return Ok(1);
        }
        let paren = self.eat('(');
        let s = self.sign().unwrap_or(1.0) as i32;
        self.skip_ws();
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return self.fail(&["integer exponent"]);
        }
        let Ok(k) = self.rest()[..len].parse::<i32>() else {
            return self.fail(&["exponent within i32 range"]);
        };
        self.pos += len;
        if paren && !self.eat(')') {
            return self.fail(&["')'"]);
        }
        Ok(s * k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+1i").unwrap(), C64::new(1.0, 1.0));
        assert_eq!(parse_complex("-0.5i").unwrap(), C64::new(0.0, -0.5));
        assert_eq!(parse_complex(" 3/4 - 2i ").unwrap(), C64::new(0.75, -2.0));
        assert!(parse_complex("1 + z").is_err());
    }
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn figure_captions() {
        let s = parse_symbol("2i*z^-1 + z^2 + 7/10*z^3", Convention::ZetaInverse).unwrap();
        assert_eq!(
            s.terms(),
            vec![(-3, c(0.7, 0.0)), (-2, c(1.0, 0.0)), (1, c(0.0, 2.0))]
        );
        assert_eq!((s.n_plus(), s.n_minus()), (1, 3));

        let s = parse_symbol(
            "2*z^-3 - z^-2 + 2i*z^-1 - 4*z^2 - 2i*z^3",
            Convention::ZetaInverse,
        )
        .unwrap();
        assert_eq!(
            s.terms(),
            vec![
                (-3, c(0.0, -2.0)),
                (-2, c(-4.0, 0.0)),
                (1, c(0.0, 2.0)),
                (2, c(-1.0, 0.0)),
                (3, c(2.0, 0.0)),
            ]
        );
        let s = parse_symbol("z", Convention::Direct).unwrap();
        assert_eq!(s.terms(), vec![(1, c(1.0, 0.0))]);
    }

    #[test]
    fn coefficient_forms() {
        let s = parse_symbol(
            "(1+2i)*z^2 + (-0.5 - i) z^(-1) + 3 + 1e-3i t",
            Convention::Direct,
        )
        .unwrap();
        assert_eq!(s.coeff(2), c(1.0, 2.0));
        assert_eq!(s.coeff(-1), c(-0.5, -1.0));
        assert_eq!(s.coeff(0), c(3.0, 0.0));
        assert_eq!(s.coeff(1), c(0.0, 1e-3));
        let s = parse_symbol("-i*zeta + z - z", Convention::Direct).unwrap();
        assert_eq!(s.terms(), vec![(1, c(0.0, -1.0))]);
    }

    #[test]
    fn errors() {
        let e = SymbolExpr::parse("2*z^ * 1").unwrap_err();
        assert_eq!(e.position, 5);
        assert_eq!(e.expected, vec!["integer exponent".to_string()]);
        let e = SymbolExpr::parse("z z").unwrap_err();
        assert_eq!(e.position, 2);
        assert!(SymbolExpr::parse("").is_err());
        assert!(SymbolExpr::parse("2*").is_err());
        assert!(SymbolExpr::parse("1/0*z").is_err());
        assert!(SymbolExpr::parse("(1+2i*z").is_err());
        assert!(matches!(
            parse_symbol("z - z", Convention::Direct),
            Err(Error::EmptySymbol)
        ));
        assert!(matches!(
            parse_symbol("3 + 2i", Convention::Direct),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn format_fig2() {
        let text = "2*z^-3 - z^-2 + 2i*z^-1 - 4*z^2 - 2i*z^3";
        let s = parse_symbol(text, Convention::ZetaInverse).unwrap();
        assert_eq!(
            format_symbol(&s, Convention::ZetaInverse),
            "2*z^-3 - 1*z^-2 + 2i*z^-1 - 4*z^2 - 2i*z^3"
        );
    }

    fn coefficient() -> impl Strategy<Value = C64> {
        let part = prop_oneof![
            Just(0.0),
            -10.0..10.0f64,
            (-9i32..9).prop_map(|k| k as f64 / 4.0)
        ];
        (part.clone(), part)
            .prop_filter("nonzero", |(a, b)| *a != 0.0 || *b != 0.0)
            .prop_map(|(a, b)| C64::new(a, b))
    }

    fn symbol() -> impl Strategy<Value = LaurentSymbol> {
        prop::collection::btree_map(-6i32..=6, coefficient(), 1..6)
            .prop_filter_map("non-constant", |m| LaurentSymbol::new(m).ok())
    }

    fn coeff_text(c: C64) -> String {
        let s = if c.im < 0.0 { '-' } else { '+' };
        format!("({}{s}{}i)", c.re, c.im.abs())
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(s in symbol(), direct in any::<bool>()) {
            let conv = if direct { Convention::Direct } else { Convention::ZetaInverse };
            let text = format_symbol(&s, conv);
            prop_assert_eq!(parse_symbol(&text, conv).unwrap(), s);
        }

        #[test]
        fn zeta_inverse_equals_direct_of_mirror(
            terms in prop::collection::vec((coefficient(), -5i32..=5, any::<bool>()), 1..7)
        ) {
            let render = |flip: i32| -> String {
                terms
                    .iter()
                    .map(|(c, k, star)| format!("{}{}z^{}", coeff_text(*c), if *star { "*" } else { " " }, flip * k))
                    .collect::<Vec<_>>()
                    .join(" + ")
            };
            let a = parse_symbol(&render(1), Convention::ZetaInverse);
            let b = parse_symbol(&render(-1), Convention::Direct);
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
            }
        }
    }
}
