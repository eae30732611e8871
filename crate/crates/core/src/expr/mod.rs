//! Complex-analytic expressions in one variable `z`.
//!
//! Expressions are parsed from text (see `docs/grammar.md` for the EBNF),
//! evaluated at complex points, differentiated symbolically and
//! constant-folded. An [`Expr`] is immutable once built and is `Send + Sync`,
//! so grids of points can be evaluated concurrently.

mod diff;
mod eval;
mod fold;
mod parser;

use std::fmt;

use num_complex::Complex64;

pub use diff::differentiate;
pub use eval::EvalError;
pub use fold::constant_fold;
pub use parser::{parse, ParseError, ParseErrorKind};

/// Elementary functions admitted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Abstract syntax tree of an analytic expression.
///
/// Exponents are integer literals only, so `Pow` never needs a branch choice.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Complex64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

// `add`, `mul`, ... are tree constructors, not operator overloads
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn real(x: f64) -> Expr {
        Expr::Lit(Complex64::new(x, 0.0))
    }

    pub fn imag_unit() -> Expr {
        Expr::Lit(Complex64::new(0.0, 1.0))
    }

    pub fn var() -> Expr {
        Expr::Var
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        Expr::Pow(Box::new(a), n)
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Expr::Lit(_))
    }

    pub fn literal_value(&self) -> Option<Complex64> {
        match self {
            Expr::Lit(c) => Some(*c),
            _ => None,
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        eval::eval(self, z)
    }

    pub fn differentiate(&self) -> Expr {
        differentiate(self)
    }

    pub fn fold(&self) -> Expr {
        constant_fold(self)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Lit(_) | Expr::Var => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Lit(c) if !is_primary_literal(*c) => 0,
            Expr::Lit(_) | Expr::Var | Expr::Call(..) => 5,
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

// A literal prints without parentheses only if it reads back as one token.
fn is_primary_literal(c: Complex64) -> bool {
    (c.im == 0.0 && c.re.is_sign_positive()) || (c.re == 0.0 && c.im == 1.0)
}

fn write_literal(f: &mut fmt::Formatter<'_>, c: Complex64) -> fmt::Result {
    if c.im == 0.0 {
        if c.re.is_sign_positive() {
            write!(f, "{}", c.re)
        } else {
            write!(f, "-{}", -c.re)
        }
    } else if c.re == 0.0 && c.im == 1.0 {
        f.write_str("i")
    } else if c.re == 0.0 {
        if c.im.is_sign_negative() {
            write!(f, "-{}*i", -c.im)
        } else {
            write!(f, "{}*i", c.im)
        }
    } else if c.im.is_sign_negative() {
        write!(f, "{} - {}*i", c.re, -c.im)
    } else {
        write!(f, "{} + {}*i", c.re, c.im)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Prints in the input grammar, with the minimal parentheses needed for
/// `parse(print(e))` to rebuild `e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(c) => write_literal(f, *c),
            Expr::Var => f.write_str("z"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 3)
            }
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" + ")?;
                write_operand(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" - ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("*")?;
                write_operand(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("/")?;
                write_operand(f, b, 3)
            }
            Expr::Pow(a, n) => {
                write_operand(f, a, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_minimal_parentheses() {
        let cases = [
            ("1 - z^2", "1 - z^2"),
            ("(1 - z)^2", "(1 - z)^2"),
            ("z - (z - 1)", "z - (z - 1)"),
            ("(z - z) - 1", "z - z - 1"),
            ("z/(z*z)", "z/(z*z)"),
            ("-z^2", "-z^2"),
            ("(-z)^2", "(-z)^2"),
            ("z^(-2)", "z^(-2)"),
            ("i*exp(-z)", "i*exp(-z)"),
            ("--z", "--z"),
        ];
        for (src, printed) in cases {
            let e = parse(src).unwrap();
            assert_eq!(e.to_string(), printed, "printing {src}");
        }
    }

    #[test]
    fn complex_literals_print_parenthesized_in_products() {
        let e = Expr::mul(Expr::Lit(Complex64::new(2.0, -3.0)), Expr::Var);
        assert_eq!(e.to_string(), "(2 - 3*i)*z");
        let back = parse(&e.to_string()).unwrap();
        let z = Complex64::new(0.3, 0.7);
        assert_eq!(back.eval(z).unwrap(), e.eval(z).unwrap());
    }

    #[test]
    fn func_names_round_trip() {
        for f in Func::ALL {
            assert_eq!(Func::from_name(f.name()), Some(f));
        }
        assert_eq!(Func::from_name("tan"), None);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn leaf() -> impl Strategy<Value = Expr> {
            prop_oneof![
                Just(Expr::Var),
                Just(Expr::imag_unit()),
                (0u8..6).prop_map(|n| Expr::real(n as f64)),
                (1u8..40).prop_map(|n| Expr::real(n as f64 / 8.0)),
            ]
        }

        /// Random trees over the whole grammar, including branch-cut functions.
        fn any_expr() -> impl Strategy<Value = Expr> {
            leaf().prop_recursive(5, 48, 2, |inner| {
                prop_oneof![
                    inner.clone().prop_map(Expr::neg),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
                    (inner.clone(), -3i32..5).prop_map(|(a, n)| Expr::pow(a, n)),
                    (inner, prop::sample::select(Func::ALL.to_vec()))
                        .prop_map(|(a, f)| Expr::call(f, a)),
                ]
            })
        }

        /// Entire functions only, so values exist everywhere.
        fn entire_expr() -> impl Strategy<Value = Expr> {
            let entire = vec![Func::Exp, Func::Sin, Func::Cos, Func::Sinh, Func::Cosh];
            leaf().prop_recursive(4, 24, 2, move |inner| {
                prop_oneof![
                    inner.clone().prop_map(Expr::neg),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
                    (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
                    (inner.clone(), 0i32..4).prop_map(|(a, n)| Expr::pow(a, n)),
                    (inner, prop::sample::select(entire.clone()))
                        .prop_map(|(a, f)| Expr::call(f, a)),
                ]
            })
        }

        fn point() -> impl Strategy<Value = Complex64> {
            (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
        }

        fn polynomial() -> impl Strategy<Value = (Vec<Complex64>, Expr)> {
            prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..=6).prop_map(|cs| {
                let coeffs: Vec<Complex64> =
                    cs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
                let mut e = Expr::Lit(coeffs[0]);
                for (k, c) in coeffs.iter().enumerate().skip(1) {
                    e = Expr::add(e, Expr::mul(Expr::Lit(*c), Expr::pow(Expr::Var, k as i32)));
                }
                (coeffs, e)
            })
        }

        fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
            (a - b).norm() <= rel * (1.0 + a.norm().max(b.norm()))
        }

        proptest! {
            #[test]
            fn parse_print_parse_is_a_fixpoint(e in any_expr()) {
                let text = e.to_string();
                let once = parse(&text).expect("printed text parses");
                let twice = parse(&once.to_string()).expect("reprinted text parses");
                prop_assert_eq!(&once, &twice, "{}", text);
            }

            #[test]
            fn printing_preserves_values(e in entire_expr(), z in point()) {
                let back = parse(&e.to_string()).unwrap();
                if let (Ok(a), Ok(b)) = (e.eval(z), back.eval(z)) {
                    prop_assert!(close(a, b, 1e-12), "{} vs {}", a, b);
                }
            }

            #[test]
            fn folding_preserves_values(e in entire_expr(), z in point()) {
                let folded = e.fold();
                prop_assert!(folded.size() <= e.size());
                if let (Ok(a), Ok(b)) = (e.eval(z), folded.eval(z)) {
                    prop_assert!(close(a, b, 1e-12), "{} -> {}: {} vs {}", e, folded, a, b);
                }
            }

            #[test]
            fn differentiation_is_linear(
                a in entire_expr(), b in entire_expr(), z in point(),
                (cr, ci) in (-2.0f64..2.0, -2.0f64..2.0),
            ) {
                let c = Complex64::new(cr, ci);
                let combo = Expr::add(Expr::mul(Expr::Lit(c), a.clone()), b.clone());
                let lhs = combo.differentiate().eval(z);
                let rhs = a.differentiate().eval(z).and_then(|da| Ok(c * da + b.differentiate().eval(z)?));
                if let (Ok(l), Ok(r)) = (lhs, rhs) {
                    prop_assert!(close(l, r, 1e-10), "{} vs {}", l, r);
                }
            }

            #[test]
            fn polynomial_derivative_matches_central_difference((coeffs, p) in polynomial(), z in point()) {
                let h = 1e-5;
                let symbolic = p.differentiate().eval(z).unwrap();
                let fd = (p.eval(z + h).unwrap() - p.eval(z - h).unwrap()) / (2.0 * h);
                let exact: Complex64 = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| c * k as f64 * z.powi(k as i32 - 1))
                    .sum();
                prop_assert!(close(symbolic, exact, 1e-12));
                // O(h^2) truncation plus rounding of p/h
                prop_assert!((fd - symbolic).norm() <= 1e-6, "{} vs {}", fd, symbolic);
            }
        }
    }
}
