//! Expression language for algebra elements and scalars.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*'? factor)*
//! factor := atom ('^' uint)?
//! atom   := number | 'i' | 'sqrt2' | symbol | '(' expr ')'
//! number := digits ('.' digits)? (('e' | 'E') ['+' | '-'] digits)? ('/' digits)? 'i'?
//! symbol := 'z' | 'd' | 'a' | 'a*' | 'a_' uint | 'a_' uint '*'
//! ```
//!
//! Juxtaposition is a product. A `*` directly after an `a` symbol belongs
//! to the symbol.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{normal_order, AlgebraElement, EtaSignature, Generator, GeneratorSet};
use crate::error::{Error, Result};
use crate::scalar::Exact;

pub const MAX_INPUT_BYTES: usize = 64 * 1024;
const MAX_DEPTH: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Nonnegative rational, times `i` when `imaginary`.
    Num {
        value: BigRational,
        imaginary: bool,
    },
    Sqrt2,
    Sym(Generator),
    /// Signed terms; `(true, t)` is `- t`. Either at least two terms or a
    /// single negated one.
    Sum(Vec<(bool, Expr)>),
    /// At least two factors.
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Group(Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num { value, imaginary } => {
                write!(f, "{value}")?;
                if *imaginary {
                    write!(f, "i")?;
                }
                Ok(())
            }
            Expr::Sqrt2 => write!(f, "sqrt2"),
            Expr::Sym(g) => write!(f, "{g}"),
            Expr::Sum(terms) => {
                for (k, (neg, t)) in terms.iter().enumerate() {
                    match (k, neg) {
                        (0, false) => write!(f, "{t}")?,
                        (0, true) => write!(f, "-{t}")?,
                        (_, false) => write!(f, " + {t}")?,
                        (_, true) => write!(f, " - {t}")?,
                    }
                }
                Ok(())
            }
            Expr::Product(fs) => {
                for (k, x) in fs.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
            Expr::Pow(b, n) => write!(f, "{b}^{n}"),
            Expr::Group(e) => write!(f, "({e})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

fn fail<T>(offset: usize, expected: &[&str]) -> Result<T> {
    Err(Error::Parse { offset, expected: expected.iter().map(|s| s.to_string()).collect() })
}

const ATOM_START: &[&str] = &["number", "i", "sqrt2", "z", "d", "a", "a*", "a_<n>", "a_<n>*", "("];

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn starts_atom(&mut self) -> bool {
        match self.peek() {
            Some(c) => c.is_ascii_digit() || matches!(c, b'(' | b'z' | b'd' | b'a' | b'i' | b's'),
            None => false,
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(Error::Parse { offset: self.pos, expected: vec!["shallower nesting".into()] });
        }
        let mut terms = Vec::new();
        let mut neg = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            neg = true;
        }
        terms.push((neg, self.term()?));
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push((false, self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    terms.push((true, self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        if terms.len() == 1 && !terms[0].0 {
            Ok(terms.pop().expect("one term").1)
        } else {
            Ok(Expr::Sum(terms))
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut fs = vec![self.factor()?];
        loop {
            if self.peek() == Some(b'*') {
                self.pos += 1;
                fs.push(self.factor()?);
            } else if self.starts_atom() {
                fs.push(self.factor()?);
            } else {
                break;
            }
        }
        Ok(if fs.len() == 1 { fs.pop().expect("one factor") } else { Expr::Product(fs) })
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return fail(start, &["unsigned integer"]);
            }
            let n: u32 = digits
                .parse()
                .map_err(|_| Error::Parse { offset: start, expected: vec!["exponent below 2^32".into()] })?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")
    }

    fn eat(&mut self, word: &str) -> bool {
        if self.src[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(c) = self.peek() else {
            return fail(self.pos, ATOM_START);
        };
        let start = self.pos;
        match c {
            b'(' => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return fail(self.pos, &[")", "+", "-", "*", "^"]);
                }
                self.pos += 1;
                Ok(Expr::Group(Box::new(e)))
            }
            b'0'..=b'9' => self.number(),
            b'z' => {
                self.pos += 1;
                Ok(Expr::Sym(Generator::Z))
            }
            b'd' => {
                self.pos += 1;
                Ok(Expr::Sym(Generator::D))
            }
            b'i' => {
                self.pos += 1;
                Ok(Expr::Num { value: BigRational::one(), imaginary: true })
            }
            b's' => {
                if self.eat("sqrt2") {
                    Ok(Expr::Sqrt2)
                } else {
                    fail(start, &["sqrt2"])
                }
            }
            b'a' => {
                self.pos += 1;
                if self.eat("_") {
                    let at = self.pos;
                    let digits = self.digits();
                    let index: u32 = match digits.parse() {
                        Ok(n) if n > 0 => n,
                        _ => return fail(at, &["mode index >= 1"]),
                    };
                    let dagger = self.eat("*");
                    Ok(Expr::Sym(Generator::Mode { index, dagger }))
                } else if self.eat("*") {
                    Ok(Expr::Sym(Generator::AStar))
                } else {
                    Ok(Expr::Sym(Generator::A))
                }
            }
            _ => fail(start, ATOM_START),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let int = self.digits();
        let mut value = BigRational::from_integer(int.parse::<BigInt>().expect("digits"));
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let at = self.pos;
            let frac = self.digits();
            if frac.is_empty() {
                return fail(at, &["digits"]);
            }
            let num: BigInt = frac.parse().expect("digits");
            let den = BigInt::from(10u32).pow(frac.len() as u32);
            value += BigRational::new(num, den);
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            self.pos += 1;
            let negative = self.eat("-");
            if !negative {
                self.eat("+");
            }
            let at = self.pos;
            let exp: u32 = match self.digits().parse() {
                Ok(e) if e <= 400 => e,
                _ => return fail(at, &["exponent digits (at most 400)"]),
            };
            let scale = BigRational::from_integer(BigInt::from(10u32).pow(exp));
            value = if negative { value / scale } else { value * scale };
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'/' {
            self.pos += 1;
            let at = self.pos;
            let den = self.digits();
            let den: BigInt = match den.parse() {
                Ok(d) if !BigInt::is_zero(&d) => d,
                _ => return fail(at, &["nonzero denominator"]),
            };
            value /= BigRational::from_integer(den);
        }
        let imaginary = self.pos < self.src.len() && self.src[self.pos] == b'i';
        if imaginary {
            self.pos += 1;
        }
        Ok(Expr::Num { value, imaginary })
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    if text.len() > MAX_INPUT_BYTES {
        return Err(Error::InvalidInput(format!("expression exceeds {MAX_INPUT_BYTES} bytes")));
    }
    let mut p = Parser { src: text.as_bytes(), pos: 0, depth: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return fail(p.pos, &["+", "-", "*", "^", "factor", "end of input"]);
    }
    Ok(e)
}

impl Expr {
    pub fn generators(&self, out: &mut Vec<Generator>) {
        match self {
            Expr::Sym(g) => out.push(*g),
            Expr::Sum(ts) => ts.iter().for_each(|(_, t)| t.generators(out)),
            Expr::Product(fs) => fs.iter().for_each(|x| x.generators(out)),
            Expr::Pow(b, _) | Expr::Group(b) => b.generators(out),
            Expr::Num { .. } | Expr::Sqrt2 => {}
        }
    }

    /// Evaluates over `set` without normal ordering.
    pub fn eval(&self, set: &GeneratorSet) -> Result<AlgebraElement<Exact>> {
        Ok(match self {
            Expr::Num { value, imaginary } => {
                let r = Exact::from_rational(value.clone());
                AlgebraElement::scalar(set.clone(), if *imaginary { r * Exact::i() } else { r })
            }
            Expr::Sqrt2 => AlgebraElement::scalar(set.clone(), Exact::sqrt2()),
            Expr::Sym(g) => AlgebraElement::generator(set.clone(), *g)?,
            Expr::Sum(ts) => {
                let mut acc = AlgebraElement::zero(set.clone());
                for (neg, t) in ts {
                    let v = t.eval(set)?;
                    acc = if *neg { acc.checked_sub(&v)? } else { acc.checked_add(&v)? };
                }
                acc
            }
            Expr::Product(fs) => {
                let mut acc = AlgebraElement::one(set.clone());
                for x in fs {
                    acc = acc.checked_mul(&x.eval(set)?)?;
                }
                acc
            }
            Expr::Pow(b, n) => b.eval(set)?.pow(*n),
            Expr::Group(e) => e.eval(set)?,
        })
    }
}

/// Picks the generator set from the symbols used; scalars default to the
/// holomorphic algebra, modes to an all-positive signature unless `eta` is
/// given.
pub fn infer_set(e: &Expr, eta: Option<&EtaSignature>) -> Result<GeneratorSet> {
    let mut gens = Vec::new();
    e.generators(&mut gens);
    let hol = gens.iter().any(|g| matches!(g, Generator::Z | Generator::D));
    let heis = gens.iter().any(|g| matches!(g, Generator::A | Generator::AStar));
    let max_mode = gens
        .iter()
        .filter_map(|g| match g {
            Generator::Mode { index, .. } => Some(*index),
            _ => None,
        })
        .max();
    match (hol, heis, max_mode) {
        (_, _, Some(m)) if !hol && !heis => Ok(GeneratorSet::MultiMode(match eta {
            Some(eta) => eta.clone(),
            None => EtaSignature::standard(m as usize),
        })),
        (true, false, None) | (false, false, None) => Ok(GeneratorSet::Holomorphic),
        (false, true, None) => Ok(GeneratorSet::Heisenberg),
        _ => Err(Error::IncompatibleAlgebras("expression mixes generator families".into())),
    }
}

/// Parses and normal-orders an algebra element.
pub fn parse_element(text: &str, eta: Option<&EtaSignature>) -> Result<AlgebraElement<Exact>> {
    let e = parse_expr(text)?;
    let set = infer_set(&e, eta)?;
    Ok(normal_order(&e.eval(&set)?))
}

/// Parses an expression without generators as an exact scalar.
pub fn parse_scalar(text: &str) -> Result<Exact> {
    let e = parse_expr(text)?;
    let mut gens = Vec::new();
    e.generators(&mut gens);
    if !gens.is_empty() {
        return Err(Error::InvalidInput(format!("{text:?} is not a scalar")));
    }
    let v = e.eval(&GeneratorSet::Holomorphic)?;
    Ok(v.coeff(&[]))
}

/// Parses `"a, b; c, d"` into a 2×2 matrix of exact scalars.
pub fn parse_matrix2(text: &str) -> Result<[[Exact; 2]; 2]> {
    let rows: Vec<&str> = text.split(';').collect();
    if rows.len() != 2 {
        return Err(Error::InvalidInput("a 2x2 matrix needs two rows separated by ';'".into()));
    }
    let mut out: Vec<[Exact; 2]> = Vec::with_capacity(2);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 2 {
            return Err(Error::InvalidInput("each row needs two entries separated by ','".into()));
        }
        out.push([parse_scalar(cols[0])?, parse_scalar(cols[1])?]);
    }
    Ok([out[0].clone(), out[1].clone()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn shapes() {
        assert_eq!(parse_expr("d z").unwrap(), Expr::Product(vec![Expr::Sym(Generator::D), Expr::Sym(Generator::Z)]));
        assert_eq!(
            parse_expr("a_1 a_2*").unwrap(),
            Expr::Product(vec![Expr::Sym(Generator::mode(1)), Expr::Sym(Generator::mode_star(2))])
        );
        let e = parse_expr("(1/2) (d^2 - z^2)").unwrap();
        assert_eq!(e.to_string(), "(1/2) (d^2 - z^2)");
        assert_eq!(
            parse_expr("a*a").unwrap(),
            Expr::Product(vec![Expr::Sym(Generator::AStar), Expr::Sym(Generator::A)])
        );
    }

    #[test]
    fn normal_ordering_through_parser() {
        assert_eq!(parse_element("d z", None).unwrap().to_string(), "z d + 1");
        assert_eq!(parse_element("0.5 z - 1/2 z", None).unwrap().to_string(), "0");
        assert_eq!(parse_scalar("(1/2 sqrt2)^2").unwrap(), Exact::from_ratio(1, 2));
        assert_eq!(parse_scalar("3i * i").unwrap(), Exact::from_i64(-3));
        assert_eq!(parse_scalar("2.5e-1").unwrap(), Exact::from_ratio(1, 4));
        assert_eq!(parse_scalar("-1E+2").unwrap(), Exact::from_i64(-100));
        let x = 0.1f64 + 0.2;
        assert_eq!(parse_scalar(&format!("{x:.16e}")).unwrap().to_c64().re, x);
    }

    #[test]
    fn printed_elements_parse_back() {
        let x = parse_element("(1/2 + 3i) d^2 z - sqrt2 z d + 7/3", None).unwrap();
        assert_eq!(parse_element(&x.to_string(), None).unwrap(), x);
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_expr("z + )").unwrap_err() {
            Error::Parse { offset, expected } => {
                assert_eq!(offset, 4);
                assert!(expected.contains(&"(".to_string()));
            }
            e => panic!("{e:?}"),
        }
        assert!(matches!(parse_expr("z^"), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(parse_expr("1/0"), Err(Error::Parse { .. })));
        assert!(matches!(parse_element("z a", None), Err(Error::IncompatibleAlgebras(_))));
        let deep = "(".repeat(500) + "z" + &")".repeat(500);
        assert!(matches!(parse_expr(&deep), Err(Error::Parse { .. })));
    }

    #[test]
    fn matrix_entries() {
        let m = parse_matrix2("1/2 sqrt2, -1/2 sqrt2 i; 1/2 sqrt2, 1/2 sqrt2 i").unwrap();
        assert_eq!(m[0][1], -(Exact::inv_sqrt2() * Exact::i()));
    }
}
