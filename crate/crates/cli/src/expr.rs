//! Closed-form input expressions.
//!
//! Scenario configs describe profiles and potentials with a small arithmetic
//! language instead of embedding a scripting runtime.  The grammar, with
//! whitespace ignored everywhere:
//!
//! ```text
//!     expr    := term  (('+' | '-') term)*
//!     term    := prefix (('*' | '/') prefix)*
//!     prefix  := '-' prefix | power
//!     power   := primary ('^' prefix)?
//!     primary := number | 's' | 't' | 'u' | 'v'
//!              | func '(' expr ')' | '(' expr ')'
//!     func    := sin | cos | sinh | cosh | exp
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-s^2`
//! means `-(s^2)` and `2^3^2` means `2^(3^2)`.

use std::fmt;

/// Grid variables an expression may reference.  `u` and `v` are derived from
/// the characteristic pair: `u = (s+t)/2`, `v = (s-t)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    S,
    T,
    U,
    V,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Var::S => 's',
            Var::T => 't',
            Var::U => 'u',
            Var::V => 'v',
        };
        write!(f, "{c}")
    }
}

/// Evaluation point, given by its characteristic coordinates.
#[derive(Clone, Copy, Debug)]
pub struct Vars {
    pub s: f64,
    pub t: f64,
}

impl Vars {
    pub fn new(s: f64, t: f64) -> Self {
        Vars { s, t }
    }

    fn get(&self, v: Var) -> f64 {
        match v {
            Var::S => self.s,
            Var::T => self.t,
            Var::U => 0.5 * (self.s + self.t),
            Var::V => 0.5 * (self.s - self.t),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
}

impl Func {
    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Exp => x.exp(),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug)]
enum Node {
    Num(f64),
    Var(Var),
    Call(Func, Box<Node>),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, at: Vars) -> f64 {
        match self {
            Node::Num(x) => *x,
            Node::Var(v) => at.get(*v),
            Node::Call(f, e) => f.apply(e.eval(at)),
            Node::Neg(e) => -e.eval(at),
            Node::Bin(op, a, b) => {
                let (x, y) = (a.eval(at), b.eval(at));
                match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => x / y,
                    Op::Pow => x.powf(y),
                }
            }
        }
    }

    fn uses(&self, var: Var) -> bool {
        match self {
            Node::Num(_) => false,
            Node::Var(v) => *v == var,
            Node::Call(_, e) | Node::Neg(e) => e.uses(var),
            Node::Bin(_, a, b) => a.uses(var) || b.uses(var),
        }
    }
}

/// Parsed expression tree.
#[derive(Clone, Debug)]
pub struct Expr(Node);

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, String> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(format!("trailing input at byte {}", p.pos));
        }
        Ok(Expr(e))
    }

    pub fn eval(&self, at: Vars) -> f64 {
        self.0.eval(at)
    }

    /// Whether the expression reads the given variable anywhere.
    pub fn uses(&self, var: Var) -> bool {
        self.0.uses(var)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node, String> {
        let mut e = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => Op::Add,
                Some(b'-') => Op::Sub,
                _ => return Ok(e),
            };
            self.pos += 1;
            e = Node::Bin(op, Box::new(e), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Node, String> {
        let mut e = self.prefix()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => Op::Mul,
                Some(b'/') => Op::Div,
                _ => return Ok(e),
            };
            self.pos += 1;
            e = Node::Bin(op, Box::new(e), Box::new(self.prefix()?));
        }
    }

    fn prefix(&mut self) -> Result<Node, String> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.prefix()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, String> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exp = self.prefix()?;
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(format!("expected ')' at byte {}", self.pos));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.name(),
            Some(c) => Err(format!(
                "unexpected character '{}' at byte {}",
                c as char, self.pos
            )),
            None => Err("unexpected end of expression".into()),
        }
    }

    fn number(&mut self) -> Result<Node, String> {
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || *c == b'.')
        {
            self.pos += 1;
        }
        // Exponent only when something numeric actually follows, so that a
        // name such as `exp` right after a literal is left for the caller to
        // reject as a missing operator.
        if let Some(b'e' | b'E') = self.src.get(self.pos) {
            let mut k = self.pos + 1;
            if let Some(b'+' | b'-') = self.src.get(k) {
                k += 1;
            }
            if self.src.get(k).is_some_and(u8::is_ascii_digit) {
                self.pos = k;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse()
            .map(Node::Num)
            .map_err(|_| format!("malformed number '{text}' at byte {start}"))
    }

    fn name(&mut self) -> Result<Node, String> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_alphabetic) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let func = match text {
            "s" => return Ok(Node::Var(Var::S)),
            "t" => return Ok(Node::Var(Var::T)),
            "u" => return Ok(Node::Var(Var::U)),
            "v" => return Ok(Node::Var(Var::V)),
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            _ => return Err(format!("unknown name '{text}' at byte {start}")),
        };
        if !self.eat(b'(') {
            return Err(format!("expected '(' after '{text}' at byte {}", self.pos));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(format!("expected ')' at byte {}", self.pos));
        }
        Ok(Node::Call(func, Box::new(arg)))
    }
}
