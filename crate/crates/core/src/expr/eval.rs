use num_complex::Complex64;
use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("singular evaluation at z = {z}: {reason} in `{subexpr}`")]
    Singular {
        z: Complex64,
        subexpr: String,
        reason: &'static str,
    },
}

impl EvalError {
    pub fn z(&self) -> Complex64 {
        match self {
            EvalError::Singular { z, .. } => *z,
        }
    }
}

fn singular(z: Complex64, e: &Expr, reason: &'static str) -> EvalError {
    EvalError::Singular {
        z,
        subexpr: e.to_string(),
        reason,
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn powi(base: Complex64, n: i32) -> Complex64 {
    let mut acc = ONE;
    let mut sq = base;
    let mut k = n.unsigned_abs();
    // n = 1 must return `base` bit-for-bit; folding relies on it.
    if k == 1 {
        return if n < 0 { ONE / base } else { base };
    }
    while k > 0 {
        if k & 1 == 1 {
            acc *= sq;
        }
        k >>= 1;
        if k > 0 {
            sq *= sq;
        }
    }
    if n < 0 {
        ONE / acc
    } else {
        acc
    }
}

pub(crate) fn apply(func: Func, a: Complex64) -> Complex64 {
    match func {
        Func::Exp => a.exp(),
        Func::Log => a.ln(),
        Func::Sin => a.sin(),
        Func::Cos => a.cos(),
        Func::Sinh => a.sinh(),
        Func::Cosh => a.cosh(),
        Func::Sqrt => a.sqrt(),
    }
}

/// Evaluates `e` at `z`. Principal branches are used for `log` and `sqrt`.
pub(crate) fn eval(e: &Expr, z: Complex64) -> Result<Complex64, EvalError> {
    let value = match e {
        Expr::Lit(c) => return Ok(*c),
        Expr::Var => return Ok(z),
        Expr::Neg(a) => -eval(a, z)?,
        Expr::Add(a, b) => eval(a, z)? + eval(b, z)?,
        Expr::Sub(a, b) => eval(a, z)? - eval(b, z)?,
        Expr::Mul(a, b) => eval(a, z)? * eval(b, z)?,
        Expr::Div(a, b) => {
            let num = eval(a, z)?;
            let den = eval(b, z)?;
            if den == ZERO {
                return Err(singular(z, e, "division by zero"));
            }
            num / den
        }
        Expr::Pow(a, n) => {
            let base = eval(a, z)?;
            if *n < 0 && base == ZERO {
                return Err(singular(z, e, "negative power of zero"));
            }
            powi(base, *n)
        }
        Expr::Call(func, a) => {
            let arg = eval(a, z)?;
            if matches!(func, Func::Log | Func::Sqrt) && arg == ZERO {
                return Err(singular(z, e, "branch point"));
            }
            apply(*func, arg)
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(singular(z, e, "non-finite value"))
    }
}
