//! Sparse multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::linalg::{Int, Rat};

pub type Monomial = Vec<u32>;

/// Terms are keyed by exponent vectors; the lexicographically largest key is
/// the leading term (lex order with the first variable largest).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Rat::one())
    }

    pub fn monomial(nvars: usize, exps: Monomial, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &[u32]) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    /// `Some((c, m))` when the polynomial is a single term `c * x^m`.
    pub fn as_term(&self) -> Option<(Monomial, Rat)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((m.clone(), c.clone()))
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut acc: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m: Monomial = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                *acc.entry(m).or_insert_with(Rat::zero) += c1 * c2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Poly {
            nvars: self.nvars,
            terms: acc,
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut r = self.clone();
        let mut q = Poly::zero(self.nvars);
        while let Some((rm, rc)) = r.leading() {
            if rm.iter().zip(&lm).any(|(a, b)| a < b) {
                return None;
            }
            let m: Monomial = rm.iter().zip(&lm).map(|(a, b)| a - b).collect();
            let c = rc / &lc;
            let t = Poly::monomial(self.nvars, m, c);
            r = r.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }

    pub fn eval(&self, pt: &[Rat]) -> Rat {
        let mut s = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in pt.iter().zip(m) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            s += t;
        }
        s
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[i] == 0 {
                continue;
            }
            let mut n = m.clone();
            n[i] -= 1;
            out.add_term(n, c * Rat::from_integer(Int::from(m[i])));
        }
        out
    }

    /// Order of vanishing at a point: the least `r` such that some partial
    /// derivative of order `r` is nonzero there.
    pub fn multiplicity_at(&self, pt: &[Rat]) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let mut layer = vec![self.clone()];
        let mut r = 0;
        loop {
            if layer.iter().any(|p| !p.eval(pt).is_zero()) {
                return r;
            }
            let mut next: Vec<Poly> = Vec::new();
            for p in &layer {
                for i in 0..self.nvars {
                    let d = p.derivative(i);
                    if !d.is_zero() && !next.contains(&d) {
                        next.push(d);
                    }
                }
            }
            layer = next;
            r += 1;
        }
    }

    /// Makes the leading coefficient 1 (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => self.scale(&(Rat::one() / c)),
        }
    }

    /// Normalizes so that the leading coefficient is positive.
    pub fn sign_normalized(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    /// Coefficient vector with respect to a list of monomials; `None` if a
    /// term falls outside the list.
    pub fn coords(&self, basis: &BTreeMap<Monomial, usize>) -> Option<Vec<Rat>> {
        let mut v = vec![Rat::zero(); basis.len()];
        for (m, c) in &self.terms {
            v[*basis.get(m)?] = c.clone();
        }
        Some(v)
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = fmt_monomial(m, names);
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            match (mono.is_empty(), a.is_one()) {
                (true, _) => s.push_str(&a.to_string()),
                (false, true) => s.push_str(&mono),
                (false, false) => {
                    s.push_str(&a.to_string());
                    s.push('*');
                    s.push_str(&mono);
                }
            }
        }
        s
    }

    /// Parses an expression built from rationals, variables, `+ - * ^`,
    /// division by constants, and parentheses.
    pub fn parse(text: &str, names: &[String]) -> Result<Poly, ParseError> {
        let toks = tokenize(text)?;
        let mut p = Parser {
            toks,
            pos: 0,
            names,
            len: text.len(),
        };
        let e = p.sum()?;
        if p.pos < p.toks.len() {
            return Err(ParseError {
                offset: p.toks[p.pos].0,
                message: "unexpected token".into(),
            });
        }
        Ok(e)
    }
}

/// All exponent vectors of total degree `d` in `n` variables, lex descending.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill(&mut out, &mut cur, 0, d);
    out
}

fn fill(out: &mut Vec<Monomial>, cur: &mut Monomial, i: usize, left: u32) {
    let n = cur.len();
    if n == 0 {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i == n - 1 {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        fill(out, cur, i + 1, left - e);
    }
    cur[i] = 0;
}

pub fn monomial_index(monos: &[Monomial]) -> BTreeMap<Monomial, usize> {
    monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()
}

pub fn fmt_monomial(m: &[u32], names: &[String]) -> String {
    let parts: Vec<String> = m
        .iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    parts.join("*")
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display(&names))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Int),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push((st, Tok::Num(s[st..i].parse().unwrap())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((st, Tok::Ident(s[st..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ParseError {
                offset: i,
                message: format!("unexpected character '{c}'"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    names: &'a [String],
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            message: msg.into(),
        })
    }

    fn sum(&mut self) -> Result<Poly, ParseError> {
        let n = self.names.len();
        let mut acc = match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                self.product()?.neg()
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?);
                }
                Some(Tok::Op('-')) => {
                    self.pos += 1;
                    acc = acc.sub(&self.product()?);
                }
                _ => break,
            }
        }
        debug_assert_eq!(acc.nvars, n);
        Ok(acc)
    }

    fn product(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    let at = self.offset();
                    let d = self.power()?;
                    match d.as_term() {
                        Some((m, c)) if m.iter().all(|&e| e == 0) => {
                            acc = acc.scale(&(Rat::one() / c));
                        }
                        _ => {
                            return Err(ParseError {
                                offset: at,
                                message: "division by a non-constant".into(),
                            })
                        }
                    }
                }
                // implicit multiplication such as `2x` or `x y`
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(e)) => {
                    self.pos += 1;
                    let e: u32 = match e.try_into() {
                        Ok(e) => e,
                        Err(_) => return self.err("exponent too large"),
                    };
                    return Ok(base.pow(e));
                }
                _ => return self.err("expected exponent"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        let n = self.names.len();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Poly::constant(n, Rat::from_integer(v)))
            }
            Some(Tok::Ident(name)) => match self.names.iter().position(|x| *x == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Poly::var(n, i))
                }
                None => self.err(&format!("unknown variable '{name}'")),
            },
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            _ => self.err("expected a term"),
        }
    }
}
