//! Symbolic d/dz.

use num_complex::Complex64;

use super::{Expr, Func};

fn is_lit(e: &Expr, re: f64) -> bool {
    e.literal_value() == Some(Complex64::new(re, 0.0))
}

// The constructors below drop only the trivial 0/1 identities, enough to
// keep derivative trees readable without changing any value.

fn s_neg(a: Expr) -> Expr {
    match a {
        Expr::Lit(c) => Expr::Lit(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::neg(other),
    }
}

fn s_add(a: Expr, b: Expr) -> Expr {
    if is_lit(&a, 0.0) {
        b
    } else if is_lit(&b, 0.0) {
        a
    } else {
        Expr::add(a, b)
    }
}

fn s_sub(a: Expr, b: Expr) -> Expr {
    if is_lit(&b, 0.0) {
        a
    } else if is_lit(&a, 0.0) {
        s_neg(b)
    } else {
        Expr::sub(a, b)
    }
}

fn s_mul(a: Expr, b: Expr) -> Expr {
    if is_lit(&a, 0.0) || is_lit(&b, 0.0) {
        Expr::real(0.0)
    } else if is_lit(&a, 1.0) {
        b
    } else if is_lit(&b, 1.0) {
        a
    } else if is_lit(&b, -1.0) {
        s_neg(a)
    } else if is_lit(&a, -1.0) {
        s_neg(b)
    } else {
        Expr::mul(a, b)
    }
}

fn s_div(a: Expr, b: Expr) -> Expr {
    if is_lit(&a, 0.0) {
        Expr::real(0.0)
    } else if is_lit(&b, 1.0) {
        a
    } else {
        Expr::div(a, b)
    }
}

/// Returns d e / dz.
pub fn differentiate(e: &Expr) -> Expr {
    match e {
        Expr::Lit(_) => Expr::real(0.0),
        Expr::Var => Expr::real(1.0),
        Expr::Neg(a) => s_neg(differentiate(a)),
        Expr::Add(a, b) => s_add(differentiate(a), differentiate(b)),
        Expr::Sub(a, b) => s_sub(differentiate(a), differentiate(b)),
        Expr::Mul(a, b) => s_add(
            s_mul(differentiate(a), (**b).clone()),
            s_mul((**a).clone(), differentiate(b)),
        ),
        Expr::Div(a, b) => {
            let num = s_sub(
                s_mul(differentiate(a), (**b).clone()),
                s_mul((**a).clone(), differentiate(b)),
            );
            s_div(num, Expr::pow((**b).clone(), 2))
        }
        Expr::Pow(a, n) => {
            let da = differentiate(a);
            match *n {
                0 => Expr::real(0.0),
                1 => da,
                2 => s_mul(s_mul(Expr::real(2.0), (**a).clone()), da),
                n => s_mul(
                    s_mul(Expr::real(f64::from(n)), Expr::pow((**a).clone(), n - 1)),
                    da,
                ),
            }
        }
        Expr::Call(func, a) => {
            let da = differentiate(a);
            let arg = (**a).clone();
            match func {
                Func::Exp => s_mul(Expr::call(Func::Exp, arg), da),
                Func::Log => s_div(da, arg),
                Func::Sin => s_mul(Expr::call(Func::Cos, arg), da),
                Func::Cos => s_mul(s_neg(Expr::call(Func::Sin, arg)), da),
                Func::Sinh => s_mul(Expr::call(Func::Cosh, arg), da),
                Func::Cosh => s_mul(Expr::call(Func::Sinh, arg), da),
                Func::Sqrt => s_div(da, s_mul(Expr::real(2.0), Expr::call(Func::Sqrt, arg))),
            }
        }
    }
}
