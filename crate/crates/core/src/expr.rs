//! A small integer expression language for describing colorings.
//!
//! ```text
//! expr  := term (("+"|"-") term)*
//! term  := factor (("*"|"/"|"%") factor)*
//! factor:= NUM | VAR | "lam" "(" expr ")" | "mu" "(" expr ")" | "pop" "(" expr ")"
//!        | "(" expr ")" | "if" "(" cond "," expr "," expr ")"
//! cond  := expr ("=="|"!="|"<"|"<="|">"|">=") expr
//! ```
//!
//! Values are signed 128-bit integers; `/` and `%` are Euclidean. Overflow,
//! division by zero and `lam`/`mu`/`pop` of a non-positive (or, for `pop`,
//! negative) argument are runtime errors.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    N,
    I,
    J,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::N => "n",
            Var::I => "i",
            Var::J => "j",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Variables an expression may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarSet(&'static [Var]);

impl VarSet {
    pub const POINT: VarSet = VarSet(&[Var::N]);
    pub const PAIR: VarSet = VarSet(&[Var::I, Var::J]);

    pub fn contains(self, v: Var) -> bool {
        self.0.contains(&v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Lam,
    Mu,
    Pop,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Lam => "lam",
            Func::Mu => "mu",
            Func::Pop => "pop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    fn holds(self, a: i128, b: i128) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cond {
    pub op: CmpOp,
    pub lhs: Expr,
    pub rhs: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(u64),
    Var(Var),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    If(Box<Cond>, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared variable '{name}' at {line}:{column}")]
    UndeclaredVariable {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("'{func}' takes {expected} argument(s), found {found} at {line}:{column}")]
    Arity {
        func: &'static str,
        expected: usize,
        found: usize,
        line: usize,
        column: usize,
    },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match *self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UndeclaredVariable { line, column, .. }
            | ParseError::Arity { line, column, .. } => (line, column),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulo by zero")]
    ModuloByZero,
    #[error("{func} undefined at {arg}")]
    BitFunctionDomain { func: &'static str, arg: i128 },
    #[error("arithmetic overflow")]
    Overflow,
    #[error("variable '{0}' is unbound")]
    Unbound(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Ident(String),
    Op(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

const PUNCT: [&str; 15] = [
    "==", "!=", "<=", ">=", "<", ">", "+", "-", "*", "/", "%", "(", ")", ",", "=",
];

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut pos, mut line, mut column) = (0usize, 1usize, 1usize);
    while pos < chars.len() {
        let c = chars[pos];
        if c == '\n' {
            pos += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            pos += 1;
            column += 1;
            continue;
        }
        let start_col = column;
        if c.is_ascii_digit() {
            let start = pos;
            while pos < chars.len() && chars[pos].is_ascii_digit() {
                pos += 1;
            }
            let text: String = chars[start..pos].iter().collect();
            let value = text.parse::<u64>().map_err(|_| ParseError::Syntax {
                line,
                column: start_col,
                message: format!("number {text} is too large"),
            })?;
            column += pos - start;
            out.push(Token {
                tok: Tok::Num(value),
                line,
                column: start_col,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = pos;
            while pos < chars.len() && (chars[pos].is_ascii_alphanumeric() || chars[pos] == '_') {
                pos += 1;
            }
            column += pos - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..pos].iter().collect()),
                line,
                column: start_col,
            });
            continue;
        }
        let rest: String = chars[pos..chars.len().min(pos + 2)].iter().collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(&"=") => {
                return Err(ParseError::Syntax {
                    line,
                    column,
                    message: "unexpected '=' (did you mean '==')".into(),
                })
            }
            Some(p) => {
                pos += p.len();
                column += p.len();
                out.push(Token {
                    tok: Tok::Op(p),
                    line,
                    column: start_col,
                });
            }
            None => {
                return Err(ParseError::Syntax {
                    line,
                    column,
                    message: format!("unexpected character '{c}'"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: VarSet,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(&self.peek().tok, Tok::Op(o) if *o == op)
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Op(o) => format!("'{o}'"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect(&mut self, op: &str) -> Result<(), ParseError> {
        if self.is_op(op) {
            self.bump();
            Ok(())
        } else {
            let found = Self::describe(&self.peek().tok);
            Err(self.syntax(format!("expected '{op}', found {found}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.is_op("+") {
                BinOp::Add
            } else if self.is_op("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.is_op("*") {
                BinOp::Mul
            } else if self.is_op("/") {
                BinOp::Div
            } else if self.is_op("%") {
                BinOp::Mod
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    /// Parses the argument list of a call whose name has been consumed,
    /// reporting arity mismatches against `expected`.
    fn arguments(
        &mut self,
        func: &'static str,
        name_tok: &Token,
        expected: usize,
        first_is_cond: bool,
    ) -> Result<(Option<Cond>, Vec<Expr>), ParseError> {
        self.expect("(")?;
        let arity = |found| ParseError::Arity {
            func,
            expected,
            found,
            line: name_tok.line,
            column: name_tok.column,
        };
        if self.is_op(")") {
            return Err(arity(0));
        }
        let mut cond = None;
        let mut args = Vec::new();
        if first_is_cond {
            cond = Some(self.cond()?);
        } else {
            args.push(self.expr()?);
        }
        let mut found = 1;
        while self.is_op(",") {
            self.bump();
            if found >= expected {
                // Keep counting so the error reports the real arity.
                self.expr()?;
            } else {
                args.push(self.expr()?);
            }
            found += 1;
        }
        if found != expected {
            return Err(arity(found));
        }
        self.expect(")")?;
        Ok((cond, args))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        match &tok.tok {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Num(*n))
            }
            Tok::Op("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                let func = match name.as_str() {
                    "lam" => Some(Func::Lam),
                    "mu" => Some(Func::Mu),
                    "pop" => Some(Func::Pop),
                    _ => None,
                };
                if let Some(func) = func {
                    let (_, mut args) = self.arguments(func.name(), &tok, 1, false)?;
                    return Ok(Expr::Call(func, Box::new(args.remove(0))));
                }
                if name == "if" {
                    let (cond, mut args) = self.arguments("if", &tok, 3, true)?;
                    let otherwise = args.pop().unwrap();
                    let then = args.pop().unwrap();
                    return Ok(Expr::If(
                        Box::new(cond.unwrap()),
                        Box::new(then),
                        Box::new(otherwise),
                    ));
                }
                let var = match name.as_str() {
                    "n" => Some(Var::N),
                    "i" => Some(Var::I),
                    "j" => Some(Var::J),
                    _ => None,
                };
                match var {
                    Some(v) if self.vars.contains(v) => Ok(Expr::Var(v)),
                    _ => Err(ParseError::UndeclaredVariable {
                        name: name.clone(),
                        line: tok.line,
                        column: tok.column,
                    }),
                }
            }
            other => Err(self.syntax(format!("expected an expression, found {}", Self::describe(other)))),
        }
    }

    fn cond(&mut self) -> Result<Cond, ParseError> {
        let lhs = self.expr()?;
        let op = match &self.peek().tok {
            Tok::Op("==") => CmpOp::Eq,
            Tok::Op("!=") => CmpOp::Ne,
            Tok::Op("<") => CmpOp::Lt,
            Tok::Op("<=") => CmpOp::Le,
            Tok::Op(">") => CmpOp::Gt,
            Tok::Op(">=") => CmpOp::Ge,
            other => {
                let found = Self::describe(other);
                return Err(self.syntax(format!("expected a comparison, found {found}")));
            }
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(Cond { op, lhs, rhs })
    }
}

/// Parses `src`, accepting only the variables in `vars`.
pub fn parse_expr(src: &str, vars: VarSet) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, vars };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        let found = Parser::describe(&p.peek().tok);
        return Err(p.syntax(format!("unexpected {found} after expression")));
    }
    Ok(e)
}

/// Variable bindings for evaluation, indexed by [`Var`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Env([Option<i128>; 3]);

impl Env {
    pub fn point(n: u64) -> Self {
        Env([Some(n as i128), None, None])
    }

    pub fn pair(i: u64, j: u64) -> Self {
        Env([None, Some(i as i128), Some(j as i128)])
    }
}

impl Expr {
    pub fn eval(&self, env: &Env) -> Result<i128, EvalError> {
        match self {
            Expr::Num(n) => Ok(*n as i128),
            Expr::Var(v) => env.0[v.index()].ok_or(EvalError::Unbound(v.name())),
            Expr::Call(func, arg) => {
                let a = arg.eval(env)?;
                let domain = || EvalError::BitFunctionDomain {
                    func: func.name(),
                    arg: a,
                };
                match func {
                    Func::Lam if a > 0 => Ok(a.trailing_zeros() as i128),
                    Func::Mu if a > 0 => Ok(a.ilog2() as i128),
                    Func::Pop if a >= 0 => Ok(a.count_ones() as i128),
                    _ => Err(domain()),
                }
            }
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(env)?, r.eval(env)?);
                match op {
                    BinOp::Add => a.checked_add(b).ok_or(EvalError::Overflow),
                    BinOp::Sub => a.checked_sub(b).ok_or(EvalError::Overflow),
                    BinOp::Mul => a.checked_mul(b).ok_or(EvalError::Overflow),
                    BinOp::Div if b == 0 => Err(EvalError::DivisionByZero),
                    BinOp::Div => a.checked_div_euclid(b).ok_or(EvalError::Overflow),
                    BinOp::Mod if b == 0 => Err(EvalError::ModuloByZero),
                    BinOp::Mod => a.checked_rem_euclid(b).ok_or(EvalError::Overflow),
                }
            }
            Expr::If(cond, then, otherwise) => {
                let (a, b) = (cond.lhs.eval(env)?, cond.rhs.eval(env)?);
                if cond.op.holds(a, b) {
                    then.eval(env)
                } else {
                    otherwise.eval(env)
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.precedence(),
            _ => 3,
        }
    }

    /// Every variable mentioned, in first-occurrence order.
    pub fn variables(&self) -> Vec<Var> {
        fn walk(e: &Expr, out: &mut Vec<Var>) {
            match e {
                Expr::Num(_) => {}
                Expr::Var(v) => {
                    if !out.contains(v) {
                        out.push(*v)
                    }
                }
                Expr::Call(_, a) => walk(a, out),
                Expr::Bin(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Expr::If(c, t, o) => {
                    walk(&c.lhs, out);
                    walk(&c.rhs, out);
                    walk(t, out);
                    walk(o, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

/// Canonical form: minimal parentheses, single spaces around binary and
/// comparison operators.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                if l.precedence() < p {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " {} ", op.symbol())?;
                // Operators are left-associative, so an equal-precedence right
                // operand needs parentheses.
                if r.precedence() <= p {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
            Expr::If(c, t, o) => write!(f, "if({} {} {}, {t}, {o})", c.lhs, c.op.symbol(), c.rhs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str) -> Expr {
        parse_expr(src, VarSet::POINT).unwrap()
    }

    fn pp(src: &str) -> Expr {
        parse_expr(src, VarSet::PAIR).unwrap()
    }

    #[test]
    fn parses_modulo_of_lam() {
        assert_eq!(
            p("lam(n) % 2"),
            Expr::Bin(
                BinOp::Mod,
                Box::new(Expr::Call(Func::Lam, Box::new(Expr::Var(Var::N)))),
                Box::new(Expr::Num(2))
            )
        );
    }

    #[test]
    fn parses_conditional() {
        let e = p("if(mu(n) == lam(n), 0, 1)");
        match &e {
            Expr::If(c, t, o) => {
                assert_eq!(c.op, CmpOp::Eq);
                assert_eq!(**t, Expr::Num(0));
                assert_eq!(**o, Expr::Num(1));
            }
            other => panic!("expected conditional, got {other:?}"),
        }
        assert_eq!(e.to_string(), "if(mu(n) == lam(n), 0, 1)");
    }

    #[test]
    fn rejects_undeclared_variable() {
        let err = parse_expr("lam(m)", VarSet::POINT).unwrap_err();
        assert_eq!(
            err,
            ParseError::UndeclaredVariable {
                name: "m".into(),
                line: 1,
                column: 5
            }
        );
        assert!(matches!(
            parse_expr("i + n", VarSet::PAIR),
            Err(ParseError::UndeclaredVariable { .. })
        ));
        assert!(matches!(
            parse_expr("j", VarSet::POINT),
            Err(ParseError::UndeclaredVariable { .. })
        ));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(
            parse_expr("lam(n, 2)", VarSet::POINT),
            Err(ParseError::Arity { func: "lam", expected: 1, found: 2, .. })
        ));
        assert!(matches!(
            parse_expr("pop()", VarSet::POINT),
            Err(ParseError::Arity { func: "pop", expected: 1, found: 0, .. })
        ));
        assert!(matches!(
            parse_expr("if(n < 2, 1)", VarSet::POINT),
            Err(ParseError::Arity { func: "if", expected: 3, found: 2, .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_expr("n +\n  * 2", VarSet::POINT).unwrap_err();
        assert_eq!(err.position(), (2, 3));
        assert!(parse_expr("n = 2", VarSet::POINT).is_err());
        assert!(parse_expr("(n", VarSet::POINT).is_err());
        assert!(parse_expr("n n", VarSet::POINT).is_err());
        assert!(parse_expr("", VarSet::POINT).is_err());
        assert!(parse_expr("n $ 2", VarSet::POINT).is_err());
        assert!(parse_expr("99999999999999999999999", VarSet::POINT).is_err());
        assert!(parse_expr("if(n, 1, 2)", VarSet::POINT).is_err());
    }

    #[test]
    fn evaluation() {
        assert_eq!(p("lam(n) % 2").eval(&Env::point(12)), Ok(0));
        assert_eq!(p("mu(n) % 2").eval(&Env::point(48)), Ok(1));
        assert_eq!(p("pop(n)").eval(&Env::point(7)), Ok(3));
        assert_eq!(pp("(j - i) % 2").eval(&Env::pair(3, 2)), Ok(1));
        assert_eq!(pp("(i - j) / 2").eval(&Env::pair(0, 3)), Ok(-2));
        assert_eq!(pp("if(j < 2, 0, 1)").eval(&Env::pair(0, 1)), Ok(0));
        assert_eq!(p("n / 0").eval(&Env::point(1)), Err(EvalError::DivisionByZero));
        assert_eq!(p("n % 0").eval(&Env::point(1)), Err(EvalError::ModuloByZero));
        assert!(matches!(
            p("lam(n - n)").eval(&Env::point(5)),
            Err(EvalError::BitFunctionDomain { func: "lam", .. })
        ));
        assert!(matches!(
            p("mu(0)").eval(&Env::point(5)),
            Err(EvalError::BitFunctionDomain { func: "mu", .. })
        ));
        assert_eq!(
            p("n * n * n * n * n").eval(&Env::point(u64::MAX)),
            Err(EvalError::Overflow)
        );
    }

    #[test]
    fn printing_is_canonical() {
        for (src, canon) in [
            ("n-(n-1)", "n - (n - 1)"),
            ("(n-n)-1", "n - n - 1"),
            ("(n+1)*2", "(n + 1) * 2"),
            ("n+(1*2)", "n + 1 * 2"),
            ("n%(3%2)", "n % (3 % 2)"),
            ("((lam(((n)))))", "lam(n)"),
            ("if(n>=3,n/2,pop(n))", "if(n >= 3, n / 2, pop(n))"),
        ] {
            let e = p(src);
            assert_eq!(e.to_string(), canon);
            assert_eq!(p(canon), e);
        }
    }

    #[test]
    fn variables_listed() {
        assert_eq!(pp("j - i + j").variables(), vec![Var::J, Var::I]);
        assert!(p("3").variables().is_empty());
    }
}
