use std::fmt;

use crate::error::{Error, Result};

/// Expression tree over chart coordinates. Variables are indexed by axis.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Bump(Box<Expr>),
}

pub const VAR_NAMES: [&str; 2] = ["x", "y"];

/// `exp(1 - 1/(1 - t^2))` on `|t| < 1`, zero elsewhere.
pub fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

use Expr::*;

fn num(e: &Expr) -> Option<f64> {
    match e {
        Num(v) => Some(*v),
        _ => None,
    }
}

// Folding constructors. They keep derivative trees small and preserve the
// bump-first ordering that lets products short-circuit outside the support.
impl Expr {
    pub fn var(i: usize) -> Expr {
        Var(i)
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (num(&a), num(&b)) {
            (Some(x), Some(y)) => Num(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (num(&a), num(&b)) {
            (Some(x), Some(y)) => Num(x - y),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (num(&a), num(&b)) {
            (Some(x), Some(y)) => Num(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Num(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            _ => Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (num(&a), num(&b)) {
            (Some(x), Some(y)) if y != 0.0 => Num(x / y),
            (Some(x), _) if x == 0.0 => Num(0.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match (num(&a), n) {
            (_, 0) => Num(1.0),
            (_, 1) => a,
            (Some(x), _) if x != 0.0 || n > 0 => Num(x.powi(n)),
            _ => Pow(Box::new(a), n),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Num(x) => Num(-x),
            Neg(inner) => *inner,
            other => Neg(Box::new(other)),
        }
    }

    pub fn sin(a: Expr) -> Expr {
        Sin(Box::new(a))
    }

    pub fn cos(a: Expr) -> Expr {
        Cos(Box::new(a))
    }

    pub fn exp(a: Expr) -> Expr {
        Exp(Box::new(a))
    }

    pub fn bump(a: Expr) -> Expr {
        Bump(Box::new(a))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Num(v) if *v == 0.0)
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Num(_) => None,
            Var(i) => Some(*i),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.max_var().max(b.max_var()),
            Pow(a, _) | Neg(a) | Sin(a) | Cos(a) | Exp(a) | Bump(a) => a.max_var(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Num(v) => *v,
            Var(i) => *x.get(*i).ok_or_else(|| Error::Eval(format!("variable {} not bound", VAR_NAMES[*i])))?,
            Add(a, b) => a.eval(x)? + b.eval(x)?,
            Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Mul(a, b) => {
                let l = a.eval(x)?;
                if l == 0.0 {
                    0.0
                } else {
                    l * b.eval(x)?
                }
            }
            Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(Error::Eval(format!("division by zero in {self} at {x:?}")));
                }
                a.eval(x)? / d
            }
            Pow(a, n) => {
                let v = a.eval(x)?;
                if v == 0.0 && *n < 0 {
                    return Err(Error::Eval(format!("zero to a negative power in {self} at {x:?}")));
                }
                v.powi(*n)
            }
            Neg(a) => -a.eval(x)?,
            Sin(a) => a.eval(x)?.sin(),
            Cos(a) => a.eval(x)?.cos(),
            Exp(a) => a.eval(x)?.exp(),
            Bump(a) => bump(a.eval(x)?),
        })
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Expr {
        match self {
            Num(_) => Num(0.0),
            Var(i) => Num(if *i == var { 1.0 } else { 0.0 }),
            Add(a, b) => Expr::add(a.derivative(var), b.derivative(var)),
            Sub(a, b) => Expr::sub(a.derivative(var), b.derivative(var)),
            Mul(a, b) => Expr::add(
                Expr::mul(a.derivative(var), (**b).clone()),
                Expr::mul((**a).clone(), b.derivative(var)),
            ),
            Div(a, b) => {
                let da = a.derivative(var);
                let db = b.derivative(var);
                let first = Expr::div(da, (**b).clone());
                if db.is_zero() {
                    return first;
                }
                // a/b' = a'/b - a b' / b^2
                Expr::sub(first, Expr::div(Expr::mul((**a).clone(), db), Expr::pow((**b).clone(), 2)))
            }
            Pow(a, n) => Expr::mul(
                Expr::mul(Num(*n as f64), Expr::pow((**a).clone(), n - 1)),
                a.derivative(var),
            ),
            Neg(a) => Expr::neg(a.derivative(var)),
            Sin(a) => Expr::mul(Expr::cos((**a).clone()), a.derivative(var)),
            Cos(a) => Expr::neg(Expr::mul(Expr::sin((**a).clone()), a.derivative(var))),
            Exp(a) => Expr::mul(self.clone(), a.derivative(var)),
            Bump(u) => {
                let du = u.derivative(var);
                if du.is_zero() {
                    return Num(0.0);
                }
                // bump'(u) = bump(u) * (-2u) / (1 - u^2)^2
                let one_minus = Expr::sub(Num(1.0), Expr::pow((**u).clone(), 2));
                let factor = Expr::div(Expr::mul(Expr::mul(Num(-2.0), (**u).clone()), du), Expr::pow(one_minus, 2));
                Expr::mul(self.clone(), factor)
            }
        }
    }
}

/// Fully parenthesized output that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{})", -v),
            Num(v) => write!(f, "{v}"),
            Var(i) => f.write_str(VAR_NAMES[*i]),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Pow(a, n) => write!(f, "({a}^{n})"),
            Neg(a) => write!(f, "(-{a})"),
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Exp(a) => write!(f, "exp({a})"),
            Bump(a) => write!(f, "bump({a})"),
        }
    }
}
