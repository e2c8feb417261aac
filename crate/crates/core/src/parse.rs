//! Surface syntax for fields.
//!
//! ```text
//! sum     := ['-'] term (('+' | '-') term)*
//! term    := power (('*' | '/') power)*
//! power   := atom ['^' int]
//! atom    := number ['k'] | 'k' | J[a] | F[i,j] | Pf[i,...] | C4 | T | W | W[a]
//!          | d(sum) | '(' sum [sum ...] ')'
//! ```
//! Juxtaposed expressions inside parentheses form right-nested normal
//! products: `(A B C) = (A (B C))`.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::lie::Family;
use crate::ope::OpeEngine;
use crate::scalar::{Scalar, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(Q),
    K,
    Current(usize),
    Skew(usize, usize),
    Pf(Vec<usize>),
    C4,
    T,
    W,
    WIndexed(usize),
    Deriv(Box<Expr>),
    Normal(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i128),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|x| x.1).collect();
            let n = s.parse().map_err(|_| Error::Parse {
                pos,
                msg: format!("integer `{s}` too large"),
            })?;
            out.push((pos, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() {
            // `k` stands alone so that `2k` and `kF[1,2]` lex as juxtapositions
            let start = i;
            i += 1;
            if c != 'k' {
                while i < chars.len() && chars[i].1.is_ascii_alphanumeric() && chars[i].1 != 'k' {
                    i += 1;
                }
            }
            out.push((
                pos,
                Tok::Ident(chars[start..i].iter().map(|x| x.1).collect()),
            ));
        } else if "[](),+-*/^".contains(c) {
            out.push((pos, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

fn starts_atom(t: &Tok) -> bool {
    matches!(t, Tok::Int(_) | Tok::Ident(_) | Tok::Sym('('))
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: format!(
                "expected one of {}, found {}",
                expected.join(" "),
                self.peek()
            ),
        })
    }

    fn sym(&mut self, c: char) -> Result<()> {
        if self.peek() == &Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{c}`")])
        }
    }

    fn int(&mut self) -> Result<i128> {
        match self.peek() {
            Tok::Int(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn index(&mut self) -> Result<usize> {
        let pos = self.pos();
        let n = self.int()?;
        usize::try_from(n).map_err(|_| Error::Parse {
            pos,
            msg: format!("index {n} out of range"),
        })
    }

    fn index_list(&mut self) -> Result<Vec<usize>> {
        self.sym('[')?;
        let mut v = vec![self.index()?];
        while self.peek() == &Tok::Sym(',') {
            self.bump();
            v.push(self.index()?);
        }
        self.sym(']')?;
        Ok(v)
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut e = if self.peek() == &Tok::Sym('-') {
            self.bump();
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    e = Expr::Add(Box::new(e), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    e = Expr::Sub(Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.power()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    e = Expr::Mul(Box::new(e), Box::new(self.power()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    e = Expr::Div(Box::new(e), Box::new(self.power()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let e = self.atom()?;
        if self.peek() == &Tok::Sym('^') {
            self.bump();
            let pos = self.pos();
            let n = self.int()?;
            let n = u32::try_from(n).map_err(|_| Error::Parse {
                pos,
                msg: format!("exponent {n} too large"),
            })?;
            return Ok(Expr::Pow(Box::new(e), n));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let at = self.at;
        match self.bump() {
            Tok::Int(n) => {
                let c = Expr::Num(Q::new(n, 1));
                if self.peek() == &Tok::Ident("k".into()) {
                    let k = self.power()?;
                    return Ok(Expr::Mul(Box::new(c), Box::new(k)));
                }
                Ok(c)
            }
            Tok::Ident(s) => match s.as_str() {
                "k" => Ok(Expr::K),
                "J" => {
                    let v = self.index_list()?;
                    match v[..] {
                        [a] => Ok(Expr::Current(a)),
                        _ => Err(Error::Parse {
                            pos,
                            msg: "J takes one index".into(),
                        }),
                    }
                }
                "F" => {
                    let v = self.index_list()?;
                    match v[..] {
                        [i, j] => Ok(Expr::Skew(i, j)),
                        _ => Err(Error::Parse {
                            pos,
                            msg: "F takes two indices".into(),
                        }),
                    }
                }
                "Pf" => Ok(Expr::Pf(self.index_list()?)),
                "C4" => Ok(Expr::C4),
                "T" => Ok(Expr::T),
                "W" => {
                    if self.peek() == &Tok::Sym('[') {
                        let v = self.index_list()?;
                        match v[..] {
                            [a] => Ok(Expr::WIndexed(a)),
                            _ => Err(Error::Parse {
                                pos,
                                msg: "W takes one index".into(),
                            }),
                        }
                    } else {
                        Ok(Expr::W)
                    }
                }
                "d" => {
                    self.sym('(')?;
                    let e = self.sum()?;
                    self.sym(')')?;
                    Ok(Expr::Deriv(Box::new(e)))
                }
                _ => Err(Error::Parse {
                    pos,
                    msg: format!("expected one of k J F Pf C4 T W d, found `{s}`"),
                }),
            },
            Tok::Sym('(') => {
                let mut items = vec![self.sum()?];
                while starts_atom(self.peek()) {
                    items.push(self.sum()?);
                }
                self.sym(')')?;
                let mut e = items.pop().unwrap_or(Expr::Num(Q::ZERO));
                while let Some(a) = items.pop() {
                    e = Expr::Normal(Box::new(a), Box::new(e));
                }
                Ok(e)
            }
            _ => {
                self.at = at;
                self.fail(&["integer", "k", "J", "F", "Pf", "C4", "T", "W", "d", "`(`"])
            }
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let e = p.sum()?;
    if p.peek() != &Tok::End {
        return p.fail(&["`+`", "`-`", "`*`", "`/`", "end of input"]);
    }
    Ok(e)
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) | Expr::Neg(_) => 0,
        Expr::Mul(..) | Expr::Div(..) => 1,
        Expr::Pow(..) => 2,
        _ => 3,
    }
}

struct Wrap<'a>(&'a Expr, u8);

impl fmt::Display for Wrap<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn list(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) if q.is_integer() => write!(f, "{q}"),
            Expr::Num(q) => write!(f, "({q})"),
            Expr::K => write!(f, "k"),
            Expr::Current(a) => write!(f, "J[{a}]"),
            Expr::Skew(i, j) => write!(f, "F[{i},{j}]"),
            Expr::Pf(v) => write!(f, "Pf[{}]", list(v)),
            Expr::C4 => write!(f, "C4"),
            Expr::T => write!(f, "T"),
            Expr::W => write!(f, "W"),
            Expr::WIndexed(a) => write!(f, "W[{a}]"),
            Expr::Deriv(e) => write!(f, "d({e})"),
            Expr::Normal(a, b) => {
                let wrap = |e: &Expr| match e {
                    Expr::Num(_)
                    | Expr::Neg(_)
                    | Expr::Add(..)
                    | Expr::Sub(..)
                    | Expr::Mul(..)
                    | Expr::Div(..)
                    | Expr::Pow(..) => format!("({e})"),
                    _ => e.to_string(),
                };
                let (l, r) = (wrap(a), wrap(b));
                let glued = l.ends_with(|c: char| c.is_alphanumeric())
                    && r.starts_with(|c: char| c.is_alphanumeric());
                write!(f, "({l}{}{r})", if glued { " " } else { "" })
            }
            Expr::Neg(e) => write!(f, "-{}", Wrap(e, 1)),
            Expr::Add(a, b) => write!(f, "{a} + {}", Wrap(b, 1)),
            Expr::Sub(a, b) => write!(f, "{a} - {}", Wrap(b, 1)),
            Expr::Mul(a, b) => write!(f, "{}*{}", Wrap(a, 1), Wrap(b, 2)),
            Expr::Div(a, b) => write!(f, "{}/{}", Wrap(a, 1), Wrap(b, 2)),
            Expr::Pow(a, n) => write!(f, "{}^{n}", Wrap(a, 3)),
        }
    }
}

enum Value {
    S(Scalar),
    F(Field),
}

impl Value {
    fn field(self, e: &OpeEngine) -> Field {
        match self {
            Value::F(f) => f,
            Value::S(s) => Field::unit(e.tag()).scale(&s),
        }
    }
}

fn need(e: &OpeEngine, family: Family, what: &str) -> Result<()> {
    if e.algebra().family() == family {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "{what} needs the {family:?} family"
        )))
    }
}

impl Expr {
    fn value(&self, e: &OpeEngine) -> Result<Value> {
        let field = |x: &Expr| -> Result<Field> { Ok(x.value(e)?.field(e)) };
        Ok(match self {
            Expr::Num(q) => Value::S(Scalar::from_q(*q)),
            Expr::K => Value::S(Scalar::k()),
            Expr::Current(a) => {
                let dim = e.algebra().dim();
                if *a == 0 || *a > dim {
                    return Err(Error::IndexOutOfRange { index: *a, n: dim });
                }
                Value::F(e.current(a - 1)?)
            }
            Expr::Skew(i, j) => {
                need(e, Family::So, "F[i,j]")?;
                Value::F(e.skew_current(*i, *j)?)
            }
            Expr::Pf(v) => Value::F(e.pf_field_seq(v)?),
            Expr::C4 => Value::F(e.c4_field()?),
            Expr::T => Value::F(e.sugawara_field()?),
            Expr::W => Value::F(e.w_field()?),
            Expr::WIndexed(a) => {
                let ws = e.w_a_fields()?;
                match a.checked_sub(1).and_then(|i| ws.get(i)) {
                    Some(w) => Value::F(w.clone()),
                    None => {
                        return Err(Error::IndexOutOfRange {
                            index: *a,
                            n: ws.len(),
                        })
                    }
                }
            }
            Expr::Deriv(x) => Value::F(e.derivative(&field(x)?)?),
            Expr::Normal(a, b) => Value::F(e.normal_product(&field(a)?, &field(b)?)?),
            Expr::Neg(x) => match x.value(e)? {
                Value::S(s) => Value::S(-s),
                Value::F(f) => Value::F(f.scale(&Scalar::int(-1))),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let minus = matches!(self, Expr::Sub(..));
                match (a.value(e)?, b.value(e)?) {
                    (Value::S(x), Value::S(y)) => Value::S(if minus { x - y } else { x + y }),
                    (x, y) => {
                        let (x, y) = (x.field(e), y.field(e));
                        Value::F(if minus { x.sub(&y)? } else { x.add(&y)? })
                    }
                }
            }
            Expr::Mul(a, b) => match (a.value(e)?, b.value(e)?) {
                (Value::S(x), Value::S(y)) => Value::S(x * y),
                (Value::S(s), Value::F(f)) | (Value::F(f), Value::S(s)) => Value::F(f.scale(&s)),
                (Value::F(_), Value::F(_)) => {
                    return Err(Error::Unsupported(
                        "product of two fields; use (A B) for the normal product".into(),
                    ))
                }
            },
            Expr::Div(a, b) => {
                let d = match b.value(e)? {
                    Value::S(s) if !s.is_zero() => s.recip(),
                    Value::S(_) => return Err(Error::Unsupported("division by zero".into())),
                    Value::F(_) => return Err(Error::Unsupported("division by a field".into())),
                };
                match a.value(e)? {
                    Value::S(x) => Value::S(x * d),
                    Value::F(f) => Value::F(f.scale(&d)),
                }
            }
            Expr::Pow(a, n) => match a.value(e)? {
                Value::S(x) => Value::S((0..*n).fold(Scalar::one(), |acc, _| acc * x.clone())),
                Value::F(_) => return Err(Error::Unsupported("power of a field".into())),
            },
        })
    }

    /// Elaborates to a field of `engine`'s algebra; scalars become
    /// multiples of the vacuum.
    pub fn to_field(&self, engine: &OpeEngine) -> Result<Field> {
        Ok(self.value(engine)?.field(engine))
    }
}

pub fn parse_field(text: &str, engine: &OpeEngine) -> Result<Field> {
    parse_expr(text)?.to_field(engine)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::indexset::IndexSet;
    use crate::lie::LieAlgebra;

    fn so(n: usize) -> OpeEngine {
        OpeEngine::new(Arc::new(LieAlgebra::new(Family::So, n).unwrap()))
    }

    #[test]
    fn currents_and_products() {
        let e = so(6);
        assert_eq!(
            parse_field("F[1,2]", &e).unwrap(),
            e.skew_current(1, 2).unwrap()
        );
        let f = parse_field("(F[1,2](F[3,4]F[5,6]))", &e).unwrap();
        assert_eq!(f.weight().unwrap(), 3);
        assert_eq!(f, parse_field("(F[1,2] F[3,4] F[5,6])", &e).unwrap());
        let pf = parse_field("Pf[1,2,3,4]", &e).unwrap();
        assert_eq!(pf, e.pf_field(&IndexSet::sorted(&[1, 2, 3, 4])).unwrap());
        let three = parse_field("(F[1,2]F[3,4]) - (F[1,3]F[2,4]) + (F[1,4]F[2,3])", &e).unwrap();
        assert_eq!(pf.ratio_to(&three).map(|s| s.is_polynomial()), Some(true));
    }

    #[test]
    fn scalars() {
        let e = so(5);
        let a = parse_field("(2k^2+3k)/2*F[1,2] - (1/3)*d(F[2,3])", &e).unwrap();
        let x = e
            .skew_current(1, 2)
            .unwrap()
            .scale(&"(2k^2+3k)/2".parse::<Scalar>().unwrap());
        let y = e
            .derivative(&e.skew_current(2, 3).unwrap())
            .unwrap()
            .scale(&Scalar::from_q(Q::new(-1, 3)));
        assert_eq!(a, x.add(&y).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let e = so(5);
        match parse_expr("F[1,2] + ") {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 9);
                assert!(msg.contains("expected"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_expr("F[1 2]"),
            Err(Error::Parse { pos: 4, .. })
        ));
        assert!(matches!(
            parse_expr("F[1,2] ?"),
            Err(Error::Parse { pos: 7, .. })
        ));
        assert_eq!(
            parse_field("F[1,7]", &e),
            Err(Error::IndexOutOfRange { index: 7, n: 5 })
        );
        assert_eq!(parse_field("Pf[1,2,3]", &e), Err(Error::OddPfaffian(3)));
    }

    #[test]
    fn print_parse_fixed_point() {
        let e = so(5);
        let alg = e.algebra().clone();
        for s in ["(F[1,2](F[1,2]d(F[3,4])))", "Pf[1,2,3,4]", "C4", "T"] {
            let f = parse_field(s, &e).unwrap();
            let printed = f.display(&alg).to_string();
            let g = parse_field(&printed, &e).unwrap();
            assert_eq!(f, g, "{printed}");
            assert_eq!(printed, g.display(&alg).to_string());
        }
        let ast = parse_expr("-2*(F[1,2]d(F[3,4])) + (k+2)/3*J[1]").unwrap();
        assert_eq!(parse_expr(&ast.to_string()).unwrap(), ast);
    }
}
