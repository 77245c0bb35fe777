//! The analytic functional `J(w1, w2, w3, w4)` restricted to finite sums of
//! rational monomials, evaluated at `(f(r), conj f(r), F(rho), conj F(rho))`.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! sum         := ['+'|'-'] term (('+'|'-') term)*
//! term        := (complex_lit | factor) (('*'|'/') factor)*
//! factor      := ('w1'|'w2'|'w3'|'w4') ('^' int)?
//! complex_lit := float | float 'i' | '(' float ('+'|'-') float 'i' ')'
//! ```
//!
//! Division by a factor negates its exponent, so `w1/w3` is `w1 * w3^-1`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::FunctionalError;

/// One monomial `coeff * w1^e1 * w2^e2 * w3^e3 * w4^e4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: Complex64,
    pub exponents: [i32; 4],
}

impl Term {
    fn is_constant(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSpec {
    terms: Vec<Term>,
}

/// `(w1, w2) = (f(r), F(rho))`; the four coordinates are
/// `(w1, conj w1, w2, conj w2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub w1: Complex64,
    pub w2: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientPair {
    pub p: Complex64,
    pub q: Complex64,
    pub alpha: f64,
}

impl EvalPoint {
    pub fn new(w1: Complex64, w2: Complex64) -> Result<Self, FunctionalError> {
        let pt = Self { w1, w2 };
        pt.validate()?;
        Ok(pt)
    }

    pub fn validate(&self) -> Result<(), FunctionalError> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        if !finite(self.w1) || !finite(self.w2) {
            return Err(FunctionalError::Point("coordinates must be finite"));
        }
        if self.w1 == Complex64::new(0.0, 0.0) || self.w2 == Complex64::new(0.0, 0.0) {
            return Err(FunctionalError::Point("w1 and w2 must be nonzero"));
        }
        if self.w1 == self.w2 {
            return Err(FunctionalError::Point("w1 and w2 must differ"));
        }
        Ok(())
    }

    /// The point `omega_0 = (w1, conj w1, w2, conj w2)`.
    pub fn omega(&self) -> [Complex64; 4] {
        [self.w1, self.w1.conj(), self.w2, self.w2.conj()]
    }
}

fn monomial(omega: &[Complex64; 4], exponents: &[i32; 4]) -> Result<Complex64, FunctionalError> {
    let mut value = Complex64::new(1.0, 0.0);
    for (i, (&w, &e)) in omega.iter().zip(exponents).enumerate() {
        if e == 0 {
            continue;
        }
        if e < 0 && w == Complex64::new(0.0, 0.0) {
            return Err(FunctionalError::Domain { coordinate: i + 1 });
        }
        value *= w.powi(e);
    }
    Ok(value)
}

impl FunctionalSpec {
    /// Builds a spec from raw terms, merging equal exponent tuples and
    /// dropping terms whose coefficients cancel.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self, FunctionalError> {
        if terms.is_empty() {
            return Err(FunctionalError::Empty);
        }
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.iter_mut().find(|t| t.exponents == term.exponents) {
                Some(existing) => existing.coeff += term.coeff,
                None => merged.push(term),
            }
        }
        merged.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        if merged.is_empty() {
            return Err(FunctionalError::Empty);
        }
        if merged.iter().all(Term::is_constant) {
            return Err(FunctionalError::Constant);
        }
        Ok(Self { terms: merged })
    }

    /// The default demonstration functional `w1/w3 = f(r)/F(rho)`.
    pub fn ratio() -> Self {
        Self {
            terms: vec![Term {
                coeff: Complex64::new(1.0, 0.0),
                exponents: [1, 0, -1, 0],
            }],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// True when every coefficient is real, so that `J(conj w) = conj J(w)`.
    pub fn has_real_coefficients(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.im == 0.0)
    }

    pub fn eval(&self, pt: &EvalPoint) -> Result<Complex64, FunctionalError> {
        self.eval_at(&pt.omega())
    }

    /// Evaluates at four independent coordinates.
    pub fn eval_at(&self, omega: &[Complex64; 4]) -> Result<Complex64, FunctionalError> {
        self.terms.iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| {
            Ok(acc + t.coeff * monomial(omega, &t.exponents)?)
        })
    }

    pub fn gradient(&self, pt: &EvalPoint) -> Result<[Complex64; 4], FunctionalError> {
        self.gradient_at(&pt.omega())
    }

    /// Exact partials `dJ/dw_i`, treating the four coordinates as independent.
    pub fn gradient_at(&self, omega: &[Complex64; 4]) -> Result<[Complex64; 4], FunctionalError> {
        // domain of J itself
        self.eval_at(omega)?;
        let mut grad = [Complex64::new(0.0, 0.0); 4];
        for term in &self.terms {
            for (i, slot) in grad.iter_mut().enumerate() {
                let e = term.exponents[i];
                if e == 0 {
                    continue;
                }
                let mut lowered = term.exponents;
                lowered[i] -= 1;
                *slot += term.coeff * f64::from(e) * monomial(omega, &lowered)?;
            }
        }
        Ok(grad)
    }

    /// `p = e^{-i alpha} dJ/dw1 + e^{i alpha} conj(dJ/dw2)`,
    /// `q = e^{-i alpha} dJ/dw3 + e^{i alpha} conj(dJ/dw4)`.
    pub fn pq(&self, pt: &EvalPoint, alpha: f64) -> Result<GradientPair, FunctionalError> {
        let alpha = normalize_angle(alpha);
        let g = self.gradient(pt)?;
        let rot = Complex64::from_polar(1.0, -alpha);
        let p = rot * g[0] + rot.conj() * g[1].conj();
        let q = rot * g[2] + rot.conj() * g[3].conj();
        Ok(GradientPair { p, q, alpha })
    }
}

/// Maps an angle into `[0, 2 pi)`.
pub fn normalize_angle(alpha: f64) -> f64 {
    let a = alpha.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

impl fmt::Display for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, term) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)", term.coeff.re, term.coeff.im)?;
            for (i, &e) in term.exponents.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*w{}", i + 1)?,
                    _ => write!(f, "*w{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl FromStr for FunctionalSpec {
    type Err = FunctionalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_functional(s)
    }
}

pub fn parse_functional(text: &str) -> Result<FunctionalSpec, FunctionalError> {
    let mut parser = Parser::new(text);
    let terms = parser.sum()?;
    FunctionalSpec::from_terms(terms)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, FunctionalError> {
        Err(FunctionalError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    /// Returns `Some(sign)` when the next token is `+`, `-` or U+2212.
    fn sign(&mut self) -> Option<f64> {
        match self.peek() {
            Some('+') => {
                self.bump();
                Some(1.0)
            }
            Some('-') | Some('\u{2212}') => {
                self.bump();
                Some(-1.0)
            }
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Vec<Term>, FunctionalError> {
        if self.peek().is_none() {
            return self.error("empty functional");
        }
        let mut terms = Vec::new();
        let mut sign = self.sign().unwrap_or(1.0);
        loop {
            let mut term = self.term()?;
            term.coeff *= sign;
            terms.push(term);
            match self.sign() {
                Some(s) => sign = s,
                None => break,
            }
        }
        if self.peek().is_some() {
            return self.error("unexpected trailing input");
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term, FunctionalError> {
        let mut term = Term {
            coeff: Complex64::new(1.0, 0.0),
            exponents: [0; 4],
        };
        match self.peek() {
            Some('w') => {
                let (i, e) = self.factor()?;
                term.exponents[i] += e;
            }
            Some(c) if c == '(' || c == '.' || c.is_ascii_digit() => {
                term.coeff = self.complex_lit()?;
            }
            Some(c) => return self.error(format!("expected a term, found '{c}'")),
            None => return self.error("expected a term, found end of input"),
        }
        loop {
            let op = match self.peek() {
                Some('*') => 1,
                Some('/') => -1,
                _ => break,
            };
            self.bump();
            let (i, e) = self.factor()?;
            term.exponents[i] += op * e;
        }
        Ok(term)
    }

    fn factor(&mut self) -> Result<(usize, i32), FunctionalError> {
        if self.peek() != Some('w') {
            return self.error("expected w1, w2, w3 or w4");
        }
        self.bump();
        let index = match self.peek_raw() {
            Some(d @ '1'..='4') => {
                self.pos += 1;
                d as usize - '1' as usize
            }
            _ => return self.error("expected coordinate index 1..4 after 'w'"),
        };
        let mut exponent = 1;
        if self.peek() == Some('^') {
            self.bump();
            exponent = self.integer()?;
        }
        Ok((index, exponent))
    }

    fn integer(&mut self) -> Result<i32, FunctionalError> {
        let sign = self.sign().unwrap_or(1.0) as i32;
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected an integer exponent");
        }
        match self.src[start..self.pos].parse::<i32>() {
            Ok(v) => Ok(sign * v),
            Err(_) => {
                self.pos = start;
                self.error("exponent out of range")
            }
        }
    }

    fn float(&mut self) -> Result<f64, FunctionalError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = self.pos;
        let mut seen_digit = false;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            seen_digit |= bytes[end].is_ascii_digit();
            end += 1;
        }
        if !seen_digit {
            return self.error("expected a number");
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut exp_end = end + 1;
            if exp_end < bytes.len() && (bytes[exp_end] == b'+' || bytes[exp_end] == b'-') {
                exp_end += 1;
            }
            let digits_start = exp_end;
            while exp_end < bytes.len() && bytes[exp_end].is_ascii_digit() {
                exp_end += 1;
            }
            if exp_end > digits_start {
                end = exp_end;
            }
        }
        match self.src[start..end].parse::<f64>() {
            Ok(v) => {
                self.pos = end;
                Ok(v)
            }
            Err(_) => self.error("malformed number"),
        }
    }

    fn imaginary_unit(&mut self) -> bool {
        if self.peek() == Some('i') {
            self.bump();
            true
        } else {
            false
        }
    }

    fn complex_lit(&mut self) -> Result<Complex64, FunctionalError> {
        if self.peek() == Some('(') {
            self.bump();
            let re_sign = self.sign().unwrap_or(1.0);
            let re = re_sign * self.float()?;
            let Some(im_sign) = self.sign() else {
                return self.error("expected '+' or '-' inside complex literal");
            };
            let im = im_sign * self.float()?;
            if !self.imaginary_unit() {
                return self.error("expected 'i' after imaginary part");
            }
            if self.bump() != Some(')') {
                return self.error("expected ')'");
            }
            return Ok(Complex64::new(re, im));
        }
        let v = self.float()?;
        if self.imaginary_unit() {
            Ok(Complex64::new(0.0, v))
        } else {
            Ok(Complex64::new(v, 0.0))
        }
    }
}
