//! Sparse multivariate polynomials with rational coefficients over named
//! variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::Rat;
use crate::error::{Error, Result};

pub type Assignment = BTreeMap<String, Rat>;

/// Variable name to positive exponent.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(BTreeMap<String, u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(name: &str) -> Self {
        Monomial(BTreeMap::from([(name.to_string(), 1)]))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn powers(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(v, &e)| (v.as_str(), e))
    }

    pub fn exponent(&self, var: &str) -> u32 {
        self.0.get(var).copied().unwrap_or(0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (v, e) in &other.0 {
            *out.entry(v.clone()).or_insert(0) += e;
        }
        Monomial(out)
    }

    fn without(&self, var: &str) -> Monomial {
        let mut out = self.0.clone();
        out.remove(var);
        Monomial(out)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rat) -> Self {
        let mut p = Poly::zero();
        p.push(Monomial::one(), c);
        p
    }

    pub fn var(name: &str) -> Self {
        let mut p = Poly::zero();
        p.push(Monomial::var(name), Rat::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.push(m, c);
        }
        p
    }

    fn push(&mut self, m: Monomial, c: Rat) {
        let slot = self.terms.entry(m).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value if no variable occurs.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.0.keys().cloned()).collect()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<Rat> {
        self.substitute(assignment).as_constant().ok_or_else(|| {
            let missing = self
                .variables()
                .into_iter()
                .find(|v| !assignment.contains_key(v))
                .unwrap_or_default();
            Error::Unassigned(missing)
        })
    }

    /// Replaces every assigned variable by its value.
    pub fn substitute(&self, assignment: &Assignment) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = BTreeMap::new();
            for (v, &e) in &m.0 {
                match assignment.get(v) {
                    Some(value) => {
                        for _ in 0..e {
                            coef = &coef * value;
                        }
                    }
                    None => {
                        rest.insert(v.clone(), e);
                    }
                }
            }
            out.push(Monomial(rest), coef);
        }
        out
    }

    /// Writes `self = Σ_i c_i·vars_i + c_0` when every term has degree at most
    /// one in `vars` jointly; the `c_i` may involve other variables.
    pub fn affine_in(&self, vars: &[String]) -> Option<(Vec<Poly>, Poly)> {
        let mut coeffs = vec![Poly::zero(); vars.len()];
        let mut constant = Poly::zero();
        for (m, c) in &self.terms {
            let hits: Vec<usize> = (0..vars.len()).filter(|&i| m.exponent(&vars[i]) > 0).collect();
            match hits.as_slice() {
                [] => constant.push(m.clone(), c.clone()),
                [i] if m.exponent(&vars[*i]) == 1 => coeffs[*i].push(m.without(&vars[*i]), c.clone()),
                _ => return None,
            }
        }
        Some((coeffs, constant))
    }
}

impl From<Rat> for Poly {
    fn from(c: Rat) -> Self {
        Poly::constant(c)
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.push(m.clone(), c.clone());
        }
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.push(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly { (&self).$f(&rhs) }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &Poly) -> Poly { (&self).$f(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (sign, abs) = if c.is_negative() {
                ("-", c.abs())
            } else {
                ("+", c.clone())
            };
            match (k, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if m.is_one() || abs != Rat::one() {
                factors.push(abs.to_string());
            }
            for (v, e) in m.powers() {
                factors.push(if e == 1 { v.to_string() } else { format!("{v}^{e}") });
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Poly::constant(Rat::from_int(n))),
        }
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for Poly {
    type Err = Error;

    /// Grammar: sums and differences of products of factors, where a factor
    /// is a rational literal, an identifier, or a parenthesised expression,
    /// optionally raised to a natural power with `^`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parser = Parser { text: s, pos: 0 };
        let p = parser.expr()?;
        parser.skip_ws();
        if parser.pos != s.len() {
            return Err(parser.fail("unexpected trailing input"));
        }
        Ok(p)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn fail(&self, reason: &str) -> Error {
        Error::ParsePoly {
            text: self.text.to_string(),
            reason: format!("{reason} at offset {}", self.pos),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = if self.eat('-') {
            -self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while self.eat('*') {
            acc = acc * self.power()?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        let exp: u32 = digits
            .parse()
            .map_err(|_| self.fail("expected a natural exponent"))?;
        Ok((0..exp).fold(Poly::constant(Rat::one()), |acc, _| &acc * &base))
    }

    fn atom(&mut self) -> Result<Poly> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.fail("expected `)`"));
                }
                Ok(inner)
            }
            Some('-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let literal = self
                    .take_while(|c| c.is_ascii_digit() || c == '.' || c == '/')
                    .to_string();
                literal.parse::<Rat>().map(Poly::constant)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
                Ok(Poly::var(name))
            }
            _ => Err(self.fail("expected a number, variable or `(`")),
        }
    }
}
