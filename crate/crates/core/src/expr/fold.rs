//! Constant folding.
//!
//! Literal-only subtrees are collapsed with the same operations `eval` would
//! perform, and the trivial identities (`x + 0`, `x * 1`, `x ^ 1`, ...) are
//! removed. Nothing is reassociated, so values at non-singular points are
//! unchanged.

use num_complex::Complex64;

use super::{eval, Expr};

fn lit_is(e: &Expr, re: f64) -> bool {
    e.literal_value() == Some(Complex64::new(re, 0.0))
}

pub fn constant_fold(e: &Expr) -> Expr {
    let folded = match e {
        Expr::Lit(_) | Expr::Var => return e.clone(),
        Expr::Neg(a) => match constant_fold(a) {
            Expr::Lit(c) => return Expr::Lit(-c),
            Expr::Neg(inner) => return *inner,
            a => Expr::neg(a),
        },
        Expr::Add(a, b) => {
            let (a, b) = (constant_fold(a), constant_fold(b));
            if lit_is(&b, 0.0) {
                return a;
            }
            if lit_is(&a, 0.0) {
                return b;
            }
            Expr::add(a, b)
        }
        Expr::Sub(a, b) => {
            let (a, b) = (constant_fold(a), constant_fold(b));
            if lit_is(&b, 0.0) {
                return a;
            }
            if lit_is(&a, 0.0) {
                return constant_fold(&Expr::neg(b));
            }
            Expr::sub(a, b)
        }
        Expr::Mul(a, b) => {
            let (a, b) = (constant_fold(a), constant_fold(b));
            if lit_is(&a, 0.0) || lit_is(&b, 0.0) {
                return Expr::real(0.0);
            }
            if lit_is(&a, 1.0) {
                return b;
            }
            if lit_is(&b, 1.0) {
                return a;
            }
            Expr::mul(a, b)
        }
        Expr::Div(a, b) => {
            let (a, b) = (constant_fold(a), constant_fold(b));
            if lit_is(&b, 1.0) {
                return a;
            }
            Expr::div(a, b)
        }
        Expr::Pow(a, n) => {
            let a = constant_fold(a);
            match n {
                0 => return Expr::real(1.0),
                1 => return a,
                _ => Expr::pow(a, *n),
            }
        }
        Expr::Call(func, a) => Expr::call(*func, constant_fold(a)),
    };
    collapse_literal(folded)
}

// A node whose children are all literals becomes a literal, unless
// evaluating it is singular; then the node is kept so the error surfaces at
// evaluation time.
fn collapse_literal(e: Expr) -> Expr {
    let all_literal = match &e {
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.is_literal(),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            a.is_literal() && b.is_literal()
        }
        Expr::Lit(_) | Expr::Var => false,
    };
    if !all_literal {
        return e;
    }
    match eval::eval(&e, Complex64::new(0.0, 0.0)) {
        Ok(c) => Expr::Lit(c),
        Err(_) => e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{differentiate, parse};

    fn fold_src(src: &str) -> Expr {
        constant_fold(&parse(src).unwrap())
    }

    #[test]
    fn collapses_literal_products() {
        assert_eq!(fold_src("2*3*z"), parse("6*z").unwrap());
        assert_eq!(fold_src("2*3*z").to_string(), "6*z");
    }

    #[test]
    fn removes_additive_zero() {
        assert_eq!(fold_src("z + 0"), Expr::Var);
        assert_eq!(fold_src("0 + z"), Expr::Var);
        assert_eq!(fold_src("z - 0"), Expr::Var);
        assert_eq!(fold_src("0 - z"), parse("-z").unwrap());
    }

    #[test]
    fn trivial_powers_and_negations() {
        assert_eq!(fold_src("z^1"), Expr::Var);
        assert_eq!(fold_src("exp(z)^0"), Expr::real(1.0));
        assert_eq!(fold_src("--z"), Expr::Var);
        assert_eq!(fold_src("-(2)"), Expr::real(-2.0));
        assert_eq!(fold_src("1*z*1/1"), Expr::Var);
    }

    #[test]
    fn keeps_singular_literal_subtrees() {
        let e = fold_src("z + 1/0");
        assert!(e.eval(Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn folded_cubic_derivative() {
        let d = constant_fold(&differentiate(&parse("z^3").unwrap()));
        let want = parse("3*z^2").unwrap();
        assert_eq!(d, want);
        for k in 0..10 {
            let z = Complex64::new(0.1 * f64::from(k) - 0.4, 0.3 - 0.07 * f64::from(k));
            assert_eq!(d.eval(z).unwrap(), want.eval(z).unwrap());
        }
    }
}
