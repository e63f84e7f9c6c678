//! Symbolic generators Φ(p, Θ): expression trees over the Laplace variable,
//! a small parser/printer for them, evaluation on complex p, and the preset
//! generator families.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::{Error, Result};

/// Named real modulation parameters Θ.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct ParamSet {
    bindings: BTreeMap<String, f64>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut set = Self::new();
        for (name, value) in pairs {
            set.insert(name.into(), value)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, name: String, value: f64) -> Result<()> {
        if name.is_empty() {
            return Err(Error::InvalidParams("empty parameter name".into()));
        }
        if !value.is_finite() {
            return Err(Error::InvalidParams(format!("non-finite value for `{name}`")));
        }
        self.bindings.insert(name, value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        self.bindings
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnboundParameter(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Expression tree for a dynamic memory generator.
///
/// `Power` exponents are real scalars; quotients are written with negative
/// exponents. The Laplace variable is always spelled `p`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorExpr {
    Variable,
    Constant(f64),
    Parameter(String),
    Sum(Vec<GeneratorExpr>),
    Product(Vec<GeneratorExpr>),
    Power(Box<GeneratorExpr>, f64),
}

impl GeneratorExpr {
    /// Value of Φ(p, Θ). Powers use the principal branch (cut along the
    /// negative real axis).
    pub fn eval(&self, theta: &ParamSet, p: Complex64) -> Result<Complex64> {
        match self {
            GeneratorExpr::Variable => Ok(p),
            GeneratorExpr::Constant(c) => Ok(Complex64::new(*c, 0.0)),
            GeneratorExpr::Parameter(name) => Ok(Complex64::new(theta.get(name)?, 0.0)),
            GeneratorExpr::Sum(items) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for item in items {
                    acc += item.eval(theta, p)?;
                }
                Ok(acc)
            }
            GeneratorExpr::Product(items) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for item in items {
                    acc *= item.eval(theta, p)?;
                }
                Ok(acc)
            }
            GeneratorExpr::Power(base, exponent) => {
                let b = base.eval(theta, p)?;
                if b.norm() == 0.0 {
                    if *exponent > 0.0 {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    if *exponent == 0.0 {
                        return Ok(Complex64::new(1.0, 0.0));
                    }
                    return Err(Error::BranchPoint(*exponent));
                }
                Ok(b.powf(*exponent))
            }
        }
    }

    /// Φ(p, Θ)^(−α), the Laplace symbol of the kernel Ψ_α.
    pub fn symbol_power(&self, theta: &ParamSet, alpha: f64, p: Complex64) -> Result<Complex64> {
        let phi = self.eval(theta, p)?;
        if phi.norm() == 0.0 {
            return Err(Error::SymbolPole(p));
        }
        Ok(phi.powf(-alpha))
    }

    /// If Φ(p, Θ) = a·p + b with the given bindings, returns `(a, b)`.
    pub fn affine_coefficients(&self, theta: &ParamSet) -> Option<(f64, f64)> {
        match self {
            GeneratorExpr::Variable => Some((1.0, 0.0)),
            GeneratorExpr::Constant(c) => Some((0.0, *c)),
            GeneratorExpr::Parameter(name) => Some((0.0, theta.get(name).ok()?)),
            GeneratorExpr::Sum(items) => {
                let mut acc = (0.0, 0.0);
                for item in items {
                    let (a, b) = item.affine_coefficients(theta)?;
                    acc.0 += a;
                    acc.1 += b;
                }
                Some(acc)
            }
            GeneratorExpr::Product(items) => {
                let mut acc = (0.0, 1.0);
                for item in items {
                    let (a, b) = item.affine_coefficients(theta)?;
                    // (a1 p + b1)(a2 p + b2) stays affine only without a p^2 term.
                    if acc.0 != 0.0 && a != 0.0 {
                        return None;
                    }
                    acc = (acc.0 * b + a * acc.1, acc.1 * b);
                }
                Some(acc)
            }
            GeneratorExpr::Power(base, exponent) => {
                if *exponent == 1.0 {
                    return base.affine_coefficients(theta);
                }
                if *exponent == 0.0 {
                    return Some((0.0, 1.0));
                }
                let (a, b) = base.affine_coefficients(theta)?;
                if a != 0.0 {
                    return None;
                }
                let v = b.powf(*exponent);
                v.is_finite().then_some((0.0, v))
            }
        }
    }

    /// Canonical text form; `parse_generator` round-trips it.
    pub fn print(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out
    }

    // prec: 0 sum context, 1 product context, 2 power-base context
    fn write(&self, out: &mut String, prec: u8) {
        match self {
            GeneratorExpr::Variable => out.push('p'),
            GeneratorExpr::Parameter(name) => out.push_str(name),
            GeneratorExpr::Constant(c) => {
                if *c < 0.0 && prec >= 2 {
                    let _ = write!(out, "({c})");
                } else {
                    let _ = write!(out, "{c}");
                }
            }
            GeneratorExpr::Sum(items) => {
                let parens = prec >= 1;
                if parens {
                    out.push('(');
                }
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" + ");
                    }
                    item.write(out, 0);
                }
                if parens {
                    out.push(')');
                }
            }
            GeneratorExpr::Product(items) => {
                let parens = prec >= 2;
                if parens {
                    out.push('(');
                }
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" * ");
                    }
                    item.write(out, 1);
                }
                if parens {
                    out.push(')');
                }
            }
            GeneratorExpr::Power(base, exponent) => {
                base.write(out, 2);
                out.push('^');
                if *exponent < 0.0 {
                    let _ = write!(out, "-{}", -exponent);
                } else {
                    let _ = write!(out, "{exponent}");
                }
            }
        }
    }
}

/// Preset generator families.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorPreset {
    /// Φ(p) = p (power-law memory).
    Classical,
    /// Φ(p) = p + λ, λ > 0 (exponentially tempered memory).
    Tempered { lambda: f64 },
    /// Φ(p) = a·p + b, a > 0, b ≥ 0 (scaled tempered memory).
    Affine { a: f64, b: f64 },
    /// Φ(p) = p^ρ, 0 < ρ ≤ 1.
    PowerScaled { rho: f64 },
    /// Φ(p) = (p+λ)^μ + η·p^ν, the crossover generator.
    Hybrid { lambda: f64, eta: f64, mu: f64, nu: f64 },
    /// User-supplied expression text.
    Custom(String),
}

impl GeneratorPreset {
    /// Expression and parameter bindings realizing the preset.
    pub fn make(&self) -> Result<(GeneratorExpr, ParamSet)> {
        match self {
            GeneratorPreset::Classical => Ok((GeneratorExpr::Variable, ParamSet::new())),
            GeneratorPreset::Tempered { lambda } => {
                if !(*lambda > 0.0) {
                    return Err(Error::InvalidParams(format!(
                        "tempered preset needs λ > 0, got {lambda}"
                    )));
                }
                let expr = GeneratorExpr::Sum(vec![
                    GeneratorExpr::Variable,
                    GeneratorExpr::Parameter("lambda".into()),
                ]);
                Ok((expr, ParamSet::from_pairs([("lambda", *lambda)])?))
            }
            GeneratorPreset::Affine { a, b } => {
                if !(*a > 0.0) || !(*b >= 0.0) {
                    return Err(Error::InvalidParams(format!(
                        "affine preset needs a > 0, b ≥ 0, got a={a}, b={b}"
                    )));
                }
                let expr = GeneratorExpr::Sum(vec![
                    GeneratorExpr::Product(vec![
                        GeneratorExpr::Parameter("a".into()),
                        GeneratorExpr::Variable,
                    ]),
                    GeneratorExpr::Parameter("b".into()),
                ]);
                Ok((expr, ParamSet::from_pairs([("a", *a), ("b", *b)])?))
            }
            GeneratorPreset::PowerScaled { rho } => {
                if !(*rho > 0.0 && *rho <= 1.0) {
                    return Err(Error::InvalidParams(format!(
                        "power-scaled preset needs 0 < ρ ≤ 1, got {rho}"
                    )));
                }
                Ok((
                    GeneratorExpr::Power(Box::new(GeneratorExpr::Variable), *rho),
                    ParamSet::new(),
                ))
            }
            GeneratorPreset::Hybrid { lambda, eta, mu, nu } => {
                if !(*lambda > 0.0 && *eta > 0.0) || !(*mu > 0.0 && *mu < 1.0) || !(*nu > 0.0 && *nu < 1.0)
                {
                    return Err(Error::InvalidParams(format!(
                        "hybrid preset needs λ,η > 0 and μ,ν in (0,1); got λ={lambda}, η={eta}, μ={mu}, ν={nu}"
                    )));
                }
                let expr = GeneratorExpr::Sum(vec![
                    GeneratorExpr::Power(
                        Box::new(GeneratorExpr::Sum(vec![
                            GeneratorExpr::Variable,
                            GeneratorExpr::Parameter("lambda".into()),
                        ])),
                        *mu,
                    ),
                    GeneratorExpr::Product(vec![
                        GeneratorExpr::Parameter("eta".into()),
                        GeneratorExpr::Power(Box::new(GeneratorExpr::Variable), *nu),
                    ]),
                ]);
                Ok((
                    expr,
                    ParamSet::from_pairs([("lambda", *lambda), ("eta", *eta)])?,
                ))
            }
            GeneratorPreset::Custom(text) => Ok((parse_generator(text)?, ParamSet::new())),
        }
    }
}

/// Parse a generator expression.
///
/// Grammar: real literals, identifiers (`p` is the Laplace variable),
/// `+ - * ^ ( )`; `^` requires a real-literal exponent. Subtraction desugars
/// to adding a `(-1)`-scaled term.
pub fn parse_generator(text: &str) -> Result<GeneratorExpr> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse {
            position: parser.tokens[parser.pos].1,
            message: "unexpected trailing input".into(),
        });
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((Token::Plus, i));
                i += 1;
            }
            '-' => {
                tokens.push((Token::Minus, i));
                i += 1;
            }
            '*' => {
                tokens.push((Token::Star, i));
                i += 1;
            }
            '^' => {
                tokens.push((Token::Caret, i));
                i += 1;
            }
            '(' => {
                tokens.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                tokens.push((Token::RParen, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.' | 'e' | 'E') {
                    // allow exponent sign directly after e/E
                    if matches!(bytes[i] as char, 'e' | 'E')
                        && i + 1 < bytes.len()
                        && matches!(bytes[i + 1] as char, '+' | '-')
                    {
                        i += 1;
                    }
                    i += 1;
                }
                let s = &text[start..i];
                let value = s.parse::<f64>().map_err(|_| Error::Parse {
                    position: start,
                    message: format!("invalid number `{s}`"),
                })?;
                tokens.push((Token::Number(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                tokens.push((Token::Ident(text[start..i].to_string()), start));
            }
            other => {
                return Err(Error::Parse {
                    position: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, p)| *p)
            .unwrap_or(usize::MAX)
    }

    fn expr(&mut self) -> Result<GeneratorExpr> {
        let mut items = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    items.push(self.term()?);
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    items.push(negate(rhs));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            GeneratorExpr::Sum(items)
        })
    }

    fn term(&mut self) -> Result<GeneratorExpr> {
        let mut items = vec![self.factor()?];
        while matches!(self.peek(), Some(Token::Star)) {
            self.pos += 1;
            items.push(self.factor()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            GeneratorExpr::Product(items)
        })
    }

    fn factor(&mut self) -> Result<GeneratorExpr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            let exponent = self.literal_exponent()?;
            return Ok(GeneratorExpr::Power(Box::new(base), exponent));
        }
        Ok(base)
    }

    /// Exponents must be real literals (optionally signed or parenthesized).
    fn literal_exponent(&mut self) -> Result<f64> {
        let position = self.here();
        match self.peek().cloned() {
            Some(Token::Number(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Token::Minus) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Token::Number(v)) => {
                        self.pos += 1;
                        Ok(-v)
                    }
                    _ => Err(Error::Parse {
                        position,
                        message: "exponent must be a real literal".into(),
                    }),
                }
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let v = self.literal_exponent()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    _ => Err(Error::Parse {
                        position,
                        message: "unclosed exponent parenthesis".into(),
                    }),
                }
            }
            _ => Err(Error::Parse {
                position,
                message: "exponent must be a real literal".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<GeneratorExpr> {
        let position = self.here();
        match self.peek().cloned() {
            Some(Token::Number(v)) => {
                self.pos += 1;
                Ok(GeneratorExpr::Constant(v))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if name == "p" {
                    Ok(GeneratorExpr::Variable)
                } else {
                    Ok(GeneratorExpr::Parameter(name))
                }
            }
            Some(Token::Minus) => {
                self.pos += 1;
                let inner = self.atom()?;
                Ok(negate(inner))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(Error::Parse {
                        position,
                        message: "unclosed parenthesis".into(),
                    }),
                }
            }
            _ => Err(Error::Parse {
                position,
                message: "expected a literal, identifier, or `(`".into(),
            }),
        }
    }
}

fn negate(expr: GeneratorExpr) -> GeneratorExpr {
    match expr {
        GeneratorExpr::Constant(c) => GeneratorExpr::Constant(-c),
        other => GeneratorExpr::Product(vec![GeneratorExpr::Constant(-1.0), other]),
    }
}
