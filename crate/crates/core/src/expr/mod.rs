//! A small arithmetic language for metric and vector-field components.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-'? atom ('^' atom)?
//! atom   := number | 'x' digits | func '(' expr (',' expr)? ')' | '(' expr ')'
//! ```
//!
//! `-a^b` parses as `-(a^b)`. Coordinates are `x0 … x{n-1}`. The function set
//! is closed: `sin cos exp sinh cosh tanh sqrt pow`, where `pow` takes two
//! arguments.

mod jet;
mod parse;

use std::fmt;

pub use jet::{Jet2, Real};
pub use parse::parse;

use crate::error::ExprError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sinh,
    Cosh,
    Tanh,
    Sqrt,
    Pow,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            "pow" => Func::Pow,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Parsed expression tree. Immutable after parsing.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) => e.max_var(),
            Expr::Binary(_, l, r) => l.max_var().max(r.max_var()),
            Expr::Call(_, args) => args.iter().filter_map(Expr::max_var).max(),
        }
    }

    /// Evaluates with any numeric carrier; `vars[i]` is coordinate `x_i`.
    pub fn eval<N: Real>(&self, vars: &[N]) -> Result<N, ExprError> {
        Ok(match self {
            Expr::Const(c) => N::constant(*c),
            Expr::Var(i) => *vars.get(*i).ok_or(ExprError::CoordinateOutOfRange {
                index: *i,
                dimension: vars.len(),
                offset: 0,
            })?,
            Expr::Neg(e) => -e.eval(vars)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval(vars)?;
                let b = r.eval(vars)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b.value() == 0.0 {
                            return Err(self.domain("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => self.power(a, b)?,
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(vars)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Tanh => a.tanh(),
                    Func::Sqrt => {
                        let v = a.value();
                        if v < 0.0 || (v == 0.0 && !a.is_constant()) {
                            return Err(
                                self.domain("square root of a negative or zero-with-slope value")
                            );
                        }
                        a.sqrt()
                    }
                    Func::Pow => {
                        let b = args[1].eval(vars)?;
                        self.power(a, b)?
                    }
                }
            }
        })
    }

    /// Plain value at a point.
    pub fn value_at(&self, point: &[f64]) -> Result<f64, ExprError> {
        self.eval(point)
    }

    /// Value, both first derivatives and the mixed second derivative along
    /// coordinate directions `dir_a`, `dir_b`. Exact up to rounding.
    pub fn eval_jet(&self, point: &[f64], dir_a: usize, dir_b: usize) -> Result<Jet2, ExprError> {
        let vars: Vec<Jet2> = point
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet2::variable(v, i, dir_a, dir_b))
            .collect();
        self.eval(&vars)
    }

    fn power<N: Real>(&self, base: N, exponent: N) -> Result<N, ExprError> {
        let b = base.value();
        if exponent.is_constant() {
            let c = exponent.value();
            if b < 0.0 && c.fract() != 0.0 {
                return Err(self.domain("negative base with fractional exponent"));
            }
            if b == 0.0 && c < 0.0 {
                return Err(self.domain("division by zero"));
            }
            Ok(base.powf(c))
        } else {
            if b <= 0.0 {
                return Err(self.domain("non-positive base with variable exponent"));
            }
            Ok((exponent * base.ln()).exp())
        }
    }

    fn domain(&self, reason: &str) -> ExprError {
        ExprError::Domain {
            reason: reason.to_string(),
            subexpression: self.to_string(),
        }
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => write!(f, "{e}"),
        _ => write!(f, "({e})"),
    }
}

/// Prints a fully parenthesized form. Parser-built trees parse back unchanged;
/// a negative constant comes back as a negated one.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_atom(f, e)
            }
            Expr::Binary(op, l, r) => {
                write_atom(f, l)?;
                write!(f, " {} ", op.symbol())?;
                write_atom(f, r)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
