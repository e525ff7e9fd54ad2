//! Arithmetic expressions for user-supplied integrands.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := "if" var "==" number "then" expr "else" expr | sum
//! sum     := product (("+" | "-") product)*
//! product := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := number | var | func "(" expr ("," expr)* ")" | "(" expr ")"
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`. Numeric literals are non-negative; a leading minus is the
//! negation operator.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    /// `if var == at then then_ else else_`.
    If {
        var: String,
        at: f64,
        then_: Box<Expr>,
        else_: Box<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Min,
        Func::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character '{ch}' at offset {at}")]
    BadChar { ch: char, at: usize },
    #[error("invalid number '{0}'")]
    BadNumber(String),
    #[error("expected {expected} at offset {at}, found {found}")]
    Expected {
        expected: String,
        found: String,
        at: usize,
    },
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("{func} takes {want} argument(s), got {got}")]
    Arity {
        func: &'static str,
        want: usize,
        got: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    EqEq,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Op(c) => write!(f, "'{c}'"),
            Tok::EqEq => write!(f, "'=='"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError::BadNumber(text.into()))?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if c == '=' && bytes.get(i + 1) == Some(&b'=') {
            out.push((Tok::EqEq, i));
            i += 2;
        } else if "+-*/^(),".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap_or(c);
            return Err(ParseError::BadChar { ch, at: i });
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        let (tok, at) = &self.toks[self.pos];
        Err(ParseError::Expected {
            expected: expected.into(),
            found: tok.to_string(),
            at: *at,
        })
    }

    fn eat_op(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_op(c) {
            Ok(())
        } else {
            self.fail(&format!("'{c}'"))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            _ => self.fail(&format!("'{kw}'")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        if matches!(self.peek(), Tok::Ident(s) if s == "if") {
            self.next();
            let var = match self.next() {
                Tok::Ident(s) if !is_reserved(&s) => s,
                _ => {
                    self.pos -= 1;
                    return self.fail("a variable");
                }
            };
            if self.next() != Tok::EqEq {
                self.pos -= 1;
                return self.fail("'=='");
            }
            let negative = self.eat_op('-');
            let at = match self.next() {
                Tok::Num(v) => if negative { -v } else { v },
                _ => {
                    self.pos -= 1;
                    return self.fail("a number");
                }
            };
            self.keyword("then")?;
            let then_ = self.expr()?;
            self.keyword("else")?;
            let else_ = self.expr()?;
            return Ok(Expr::If {
                var,
                at,
                then_: Box::new(then_),
                else_: Box::new(else_),
            });
        }
        self.sum()
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat_op('^') {
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.next();
                Ok(Expr::Num(v))
            }
            Tok::Op('(') => {
                self.next();
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(s) if s == "if" => self.expr(),
            Tok::Ident(s) if !is_reserved(&s) => {
                self.next();
                if *self.peek() != Tok::Op('(') {
                    return Ok(Expr::Var(s));
                }
                let func = Func::from_name(&s).ok_or_else(|| ParseError::UnknownFunction(s.clone()))?;
                self.next();
                let mut args = vec![self.expr()?];
                while self.eat_op(',') {
                    args.push(self.expr()?);
                }
                self.expect_op(')')?;
                if args.len() != func.arity() {
                    return Err(ParseError::Arity {
                        func: func.name(),
                        want: func.arity(),
                        got: args.len(),
                    });
                }
                Ok(Expr::Call(func, args))
            }
            _ => self.fail("an operand"),
        }
    }
}

fn is_reserved(s: &str) -> bool {
    matches!(s, "if" | "then" | "else")
}

/// Parses a complete expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail("end of input");
    }
    Ok(e)
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::If { .. } => 0,
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    /// Evaluates with `lookup` resolving variable names.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(name) => lookup(name),
            Expr::Neg(e) => -e.eval(lookup),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(lookup), b.eval(lookup));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
            Expr::Call(func, args) => {
                let x = args[0].eval(lookup);
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => x.ln(),
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs(),
                    Func::Min => x.min(args[1].eval(lookup)),
                    Func::Max => x.max(args[1].eval(lookup)),
                }
            }
            Expr::If { var, at, then_, else_ } => {
                if lookup(var) == *at {
                    then_.eval(lookup)
                } else {
                    else_.eval(lookup)
                }
            }
        }
    }

    /// The innermost operation that turns finite inputs into a non-finite
    /// value, evaluated along the branches actually taken.
    pub fn first_fault(&self, lookup: &dyn Fn(&str) -> f64) -> Option<&'static str> {
        match self {
            Expr::Num(_) | Expr::Var(_) => None,
            Expr::Neg(e) => e.first_fault(lookup),
            Expr::Bin(op, a, b) => {
                if let Some(f) = a.first_fault(lookup).or_else(|| b.first_fault(lookup)) {
                    return Some(f);
                }
                let (x, y) = (a.eval(lookup), b.eval(lookup));
                let v = self.eval(lookup);
                if v.is_finite() {
                    return None;
                }
                Some(match op {
                    BinOp::Div if y == 0.0 => "division by zero",
                    BinOp::Pow if x == 0.0 && y < 0.0 => "negative power of zero",
                    BinOp::Pow if x < 0.0 => "non-integer power of a negative number",
                    _ => "overflow",
                })
            }
            Expr::Call(func, args) => {
                if let Some(f) = args.iter().find_map(|a| a.first_fault(lookup)) {
                    return Some(f);
                }
                if self.eval(lookup).is_finite() {
                    return None;
                }
                Some(match func {
                    Func::Log => "logarithm of a non-positive number",
                    Func::Sqrt => "square root of a negative number",
                    _ => "overflow",
                })
            }
            Expr::If { var, at, then_, else_ } => {
                if lookup(var) == *at {
                    then_.first_fault(lookup)
                } else {
                    else_.first_fault(lookup)
                }
            }
        }
    }

    /// Every variable name in the expression, guards included.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Neg(e) => e.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Expr::If { var, then_, else_, .. } => {
                out.push(var.clone());
                then_.collect_vars(out);
                else_.collect_vars(out);
            }
        }
    }

    /// Points patched by guards, as `(variable, value)` pairs.
    pub fn guard_points(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        self.collect_guards(&mut out);
        out
    }

    fn collect_guards(&self, out: &mut Vec<(String, f64)>) {
        match self {
            Expr::Num(_) | Expr::Var(_) => {}
            Expr::Neg(e) => e.collect_guards(out),
            Expr::Bin(_, a, b) => {
                a.collect_guards(out);
                b.collect_guards(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_guards(out)),
            Expr::If { var, at, then_, else_ } => {
                out.push((var.clone(), *at));
                then_.collect_guards(out);
                else_.collect_guards(out);
            }
        }
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    write!(f, "{v:?}")
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write_num(f, *v),
            Expr::Var(name) => write!(f, "{name}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                write_child(f, e, e.precedence() < 3)
            }
            Expr::Bin(BinOp::Pow, a, b) => {
                write_child(f, a, a.precedence() < 5)?;
                write!(f, "^")?;
                write_child(f, b, b.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = self.precedence();
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => " * ",
                    BinOp::Div => " / ",
                    BinOp::Pow => unreachable!(),
                };
                write_child(f, a, a.precedence() < p)?;
                write!(f, "{sym}")?;
                write_child(f, b, b.precedence() <= p)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Expr::If { var, at, then_, else_ } => {
                write!(f, "if {var} == ")?;
                if at.is_sign_negative() {
                    write!(f, "-")?;
                }
                write_num(f, at.abs())?;
                write!(f, " then {then_} else {else_}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: f64) -> impl Fn(&str) -> f64 {
        move |_| v
    }

    #[test]
    fn precedence_fixture() {
        let e = parse("1/x*sin(1/x^3)").unwrap();
        let expected = parse("(1/x) * sin(1 / (x^3))").unwrap();
        assert_eq!(e, expected);
        assert!((e.eval(&x(0.5)) - 2.0 * 8f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn unary_minus_and_power() {
        assert_eq!(parse("-x^2").unwrap().eval(&x(3.0)), -9.0);
        assert_eq!(parse("2^3^2").unwrap().eval(&x(0.0)), 512.0);
        assert_eq!(parse("2^-1").unwrap().eval(&x(0.0)), 0.5);
        assert_eq!(parse("(-x)^2").unwrap().eval(&x(3.0)), 9.0);
        assert_eq!(parse("1 - 2 - 3").unwrap().eval(&x(0.0)), -4.0);
    }

    #[test]
    fn guards() {
        let e = parse("if x == 0 then 0 else 1/x").unwrap();
        assert_eq!(e.eval(&x(0.0)), 0.0);
        assert_eq!(e.eval(&x(0.25)), 4.0);
        assert_eq!(e.guard_points(), vec![("x".to_string(), 0.0)]);
        assert_eq!(parse("1/x").unwrap().first_fault(&x(0.0)), Some("division by zero"));
        assert_eq!(e.first_fault(&x(0.0)), None);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("foo(x)"), Err(ParseError::UnknownFunction(_))));
        assert!(matches!(parse("min(x)"), Err(ParseError::Arity { .. })));
        assert!(matches!(parse("x +"), Err(ParseError::Expected { .. })));
        assert!(matches!(parse("x $ 2"), Err(ParseError::BadChar { ch: '$', .. })));
        assert!(parse("(x").is_err());
    }

    #[test]
    fn printing_round_trips() {
        for src in [
            "1/x*sin(1/x^3)",
            "-(x + 1)^2",
            "(-x)^2",
            "x - (1 - x)",
            "2 * (if x == 0 then 1 else x) + 1",
            "if x == -0.5 then 1e-300 else max(x, 2.5e10)",
            "x / (x / x)",
        ] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} printed as {e}");
        }
    }
}
