//! Adaptive Gauss–Legendre quadrature along straight segments of the
//! complex plane.
//!
//! Each panel uses the 15-point rule. A panel is accepted when the rule on
//! the whole panel and the sum of the rule on its two halves agree to the
//! panel's share of the absolute tolerance; otherwise both halves recurse.

use std::sync::OnceLock;

use num_complex::Complex64;
use thiserror::Error;

use crate::complex::ComplexVec3;

pub const PANEL_POINTS: usize = 15;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError<E> {
    #[error("quadrature did not converge on [{from}, {to}]; error estimate {estimate:e}")]
    NonConvergence {
        from: Complex64,
        to: Complex64,
        estimate: f64,
    },
    #[error(transparent)]
    Integrand(E),
}

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// The shared 15-point rule.
    pub fn fifteen() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(PANEL_POINTS))
    }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn panel<F, E>(f: &F, a: Complex64, b: Complex64) -> Result<ComplexVec3, E>
where
    F: Fn(Complex64) -> Result<ComplexVec3, E>,
{
    let rule = GaussLegendre::fifteen();
    let mid = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let mut acc = ComplexVec3::ZERO;
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(mid + half * *x)?;
        acc = acc + v.scale(Complex64::new(*w, 0.0));
    }
    Ok(acc.scale(half))
}

/// Integrates `f(z) dz` along the segment from `a` to `b`.
pub fn integrate_segment<F, E>(
    f: &F,
    a: Complex64,
    b: Complex64,
    tol: f64,
) -> Result<ComplexVec3, QuadratureError<E>>
where
    F: Fn(Complex64) -> Result<ComplexVec3, E>,
{
    if a == b {
        return Ok(ComplexVec3::ZERO);
    }
    let whole = panel(f, a, b).map_err(QuadratureError::Integrand)?;
    refine(f, a, b, whole, tol, 0)
}

fn refine<F, E>(
    f: &F,
    a: Complex64,
    b: Complex64,
    whole: ComplexVec3,
    tol: f64,
    depth: u32,
) -> Result<ComplexVec3, QuadratureError<E>>
where
    F: Fn(Complex64) -> Result<ComplexVec3, E>,
{
    let mid = (a + b) * 0.5;
    let left = panel(f, a, mid).map_err(QuadratureError::Integrand)?;
    let right = panel(f, mid, b).map_err(QuadratureError::Integrand)?;
    let halves = left + right;
    let estimate = if halves.is_finite() && whole.is_finite() {
        (halves - whole).max_modulus()
    } else {
        f64::NAN
    };
    if estimate <= tol {
        return Ok(halves);
    }
    if !estimate.is_finite() || depth >= MAX_DEPTH {
        return Err(QuadratureError::NonConvergence {
            from: a,
            to: b,
            estimate,
        });
    }
    let l = refine(f, a, mid, left, tol * 0.5, depth + 1)?;
    let r = refine(f, mid, b, right, tol * 0.5, depth + 1)?;
    Ok(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn scalar<F: Fn(Complex64) -> Complex64>(
        f: F,
    ) -> impl Fn(Complex64) -> Result<ComplexVec3, Infallible> {
        move |z| {
            Ok(ComplexVec3::new(
                f(z),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ))
        }
    }

    #[test]
    fn rule_weights_sum_to_two() {
        let r = GaussLegendre::fifteen();
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rule_is_exact_to_degree_29() {
        let r = GaussLegendre::fifteen();
        for k in 0..30 {
            let approx: f64 = r
                .nodes
                .iter()
                .zip(&r.weights)
                .map(|(x, w)| w * x.powi(k))
                .sum();
            let exact = if k % 2 == 1 {
                0.0
            } else {
                2.0 / f64::from(k + 1)
            };
            assert!(
                (approx - exact).abs() < 1e-14,
                "degree {k}: {approx} vs {exact}"
            );
        }
    }

    #[test]
    fn known_small_rule() {
        let r = GaussLegendre::new(2);
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15 && (r.nodes[1] - x).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn contour_integral_of_exp() {
        let f = scalar(|z| z.exp());
        let a = Complex64::new(0.0, 0.0);
        let b = Complex64::new(1.0, 2.0);
        let got = integrate_segment(&f, a, b, 1e-12).unwrap().c1;
        let want = b.exp() - a.exp();
        assert!((got - want).norm() < 1e-13);
    }

    #[test]
    fn adapts_to_a_peaked_integrand() {
        // 1/(1 + 100 x^2) on [-1, 1] = atan(10)/5
        let f = scalar(|z| 1.0 / (1.0 + 100.0 * z * z));
        let got = integrate_segment(
            &f,
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            1e-12,
        )
        .unwrap()
        .c1;
        assert!((got.re - 10f64.atan() / 5.0).abs() < 1e-12);
    }

    #[test]
    fn empty_segment() {
        let f = scalar(|z| z);
        let p = Complex64::new(0.5, 0.5);
        assert_eq!(
            integrate_segment(&f, p, p, 1e-10).unwrap(),
            ComplexVec3::ZERO
        );
    }

    #[test]
    fn reports_non_convergence() {
        let f = scalar(|z| {
            if z.re > 0.3 {
                Complex64::new(f64::NAN, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
        let err = integrate_segment(
            &f,
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            1e-10,
        )
        .unwrap_err();
        assert!(matches!(err, QuadratureError::NonConvergence { .. }));
    }
}
