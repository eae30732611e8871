//! Pointwise checks of every identity that forces `H = 0`, collected into a
//! serializable report.
//!
//! Each residual is an absolute value divided by `1 + scale`, where `scale`
//! is the natural magnitude of the quantity (E for the metric identities,
//! `Σ|φ_k|²` for the null condition). Curvature and path-independence
//! residuals are absolute (scale 0). Degenerate samples are left out of
//! every maximum and counted as skipped.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{cvec_square, dot_real, nan_max, norm_sq, RealVec3};
use crate::expr::Expr;
use crate::geometry::{
    convention_constant, fd_jet, mean_curvature_crosscheck, ParametricSurface, SurfaceJet,
    SurfaceSample,
};
use crate::mesh::{sample_surface_grid, ParamDomain};
use crate::weierstrass::{IntegrationPath, SingularBehavior, WeierstrassData};
use crate::Result;

pub const SCHEMA_VERSION: &str = "wrep-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Null-condition, conformality and harmonicity identities.
    pub algebraic: f64,
    /// Mean curvature, both formulas.
    pub curvature: f64,
    /// Analytic vs central-difference derivatives.
    pub finite_difference: f64,
    /// Straight vs axis-aligned integration paths.
    pub path: f64,
    /// Central-difference step.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-10,
            curvature: 1e-8,
            finite_difference: 1e-5,
            path: 1e-9,
            fd_step: 1e-4,
        }
    }
}

impl Tolerances {
    /// Sets a tolerance by its key (`algebraic`, `curvature`,
    /// `finite_difference` or `fd`, `path`, `fd_step`).
    pub fn set(&mut self, key: &str, value: f64) -> std::result::Result<(), String> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(format!("tolerance `{key}` must be positive, got {value}"));
        }
        match key {
            "algebraic" => self.algebraic = value,
            "curvature" => self.curvature = value,
            "finite_difference" | "fd" => self.finite_difference = value,
            "path" => self.path = value,
            "fd_step" => self.fd_step = value,
            _ => return Err(format!("unknown tolerance `{key}`")),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    PhiSquareZero,
    /// `|Re φ|² − |Im φ|²`
    #[serde(rename = "lemma_1")]
    Lemma1,
    /// `Re φ · Im φ`
    #[serde(rename = "lemma_2")]
    Lemma2,
    Orthogonality,
    EqualNorms,
    Harmonicity,
    MeanCurvatureZero,
    CrosscheckZero,
    FdConsistency,
    PathIndependence,
}

impl CheckName {
    pub const ALL: [CheckName; 10] = [
        CheckName::PhiSquareZero,
        CheckName::Lemma1,
        CheckName::Lemma2,
        CheckName::Orthogonality,
        CheckName::EqualNorms,
        CheckName::Harmonicity,
        CheckName::MeanCurvatureZero,
        CheckName::CrosscheckZero,
        CheckName::FdConsistency,
        CheckName::PathIndependence,
    ];

    /// Checks that need only positions and derivatives, not φ.
    pub const GEOMETRIC: [CheckName; 6] = [
        CheckName::Orthogonality,
        CheckName::EqualNorms,
        CheckName::Harmonicity,
        CheckName::MeanCurvatureZero,
        CheckName::CrosscheckZero,
        CheckName::FdConsistency,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::PhiSquareZero => "phi_square_zero",
            CheckName::Lemma1 => "lemma_1",
            CheckName::Lemma2 => "lemma_2",
            CheckName::Orthogonality => "orthogonality",
            CheckName::EqualNorms => "equal_norms",
            CheckName::Harmonicity => "harmonicity",
            CheckName::MeanCurvatureZero => "mean_curvature_zero",
            CheckName::CrosscheckZero => "crosscheck_zero",
            CheckName::FdConsistency => "fd_consistency",
            CheckName::PathIndependence => "path_independence",
        }
    }

    fn tolerance(self, tol: &Tolerances) -> f64 {
        match self {
            CheckName::PhiSquareZero
            | CheckName::Lemma1
            | CheckName::Lemma2
            | CheckName::Orthogonality
            | CheckName::EqualNorms
            | CheckName::Harmonicity => tol.algebraic,
            CheckName::MeanCurvatureZero | CheckName::CrosscheckZero => tol.curvature,
            CheckName::FdConsistency => tol.finite_difference,
            CheckName::PathIndependence => tol.path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: CheckName,
    pub max_abs_residual: f64,
    /// Scale of the sample that produced the maximum.
    pub relative_scale: f64,
    pub tolerance: f64,
    pub samples_checked: usize,
    pub samples_skipped: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: String,
    pub checks: Vec<CheckRecord>,
    /// `(H_vec · n) / textbook H` on the unit sphere.
    pub convention_constant: f64,
    pub overall: bool,
    pub samples_total: usize,
    pub samples_degenerate: usize,
}

impl VerificationReport {
    pub fn check(&self, name: CheckName) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One human-readable line per check.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{:<20} {}  max residual {:.3e}  tol {:.1e}  checked {}  skipped {}",
                    c.name.as_str(),
                    if c.pass { "PASS" } else { "FAIL" },
                    c.max_abs_residual,
                    c.tolerance,
                    c.samples_checked,
                    c.samples_skipped
                )
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// One sample's contribution to a check: `(absolute residual, scale)`, or
/// `None` when the sample could not be checked.
type Residual = Option<(f64, f64)>;

fn residual_vec(v: RealVec3) -> f64 {
    v.max_abs()
}

fn geometric_residuals<S: ParametricSurface + ?Sized>(
    surface: &S,
    s: &SurfaceSample,
    tol: &Tolerances,
) -> [Residual; 6] {
    let form = s.first_form;
    let crosscheck = mean_curvature_crosscheck(s).ok().map(|h| (h.abs(), 0.0));
    let fd = fd_jet(|w| surface.position(w), s.z, tol.fd_step)
        .ok()
        .map(|jet| fd_residual(&s.jet(), &jet));
    [
        Some((form.f.abs(), form.e)),
        Some(((form.e - form.g).abs(), form.e)),
        Some((residual_vec(s.x_uu + s.x_vv), s.x_uu.max_abs())),
        Some((s.h_vec.norm(), 0.0)),
        crosscheck,
        fd,
    ]
}

// Worst relative disagreement over the five derivatives, folded into the
// (residual, scale) shape so that residual / (1 + scale) is the quantity tested.
fn fd_residual(analytic: &SurfaceJet, fd: &SurfaceJet) -> (f64, f64) {
    let pairs = [
        (analytic.x_u, fd.x_u),
        (analytic.x_v, fd.x_v),
        (analytic.x_uu, fd.x_uu),
        (analytic.x_vv, fd.x_vv),
        (analytic.x_uv, fd.x_uv),
    ];
    let worst = pairs
        .iter()
        .map(|(a, b)| (*a - *b).max_abs() / (1.0 + a.max_abs()))
        .fold(0.0, nan_max);
    (worst, 0.0)
}

fn weierstrass_residuals(
    d: &WeierstrassData,
    s: &SurfaceSample,
    tol: &Tolerances,
) -> Vec<Residual> {
    let z = s.z;
    let phi_checks: [Residual; 3] = match d.phi_at(z) {
        Ok(phi) => {
            let (re, im) = (phi.re(), phi.im());
            [
                Some((cvec_square(phi).norm(), phi.modulus_sq())),
                Some(((norm_sq(re) - norm_sq(im)).abs(), norm_sq(re))),
                Some((dot_real(re, im).abs(), norm_sq(re))),
            ]
        }
        Err(_) => [None; 3],
    };
    let base = d.basepoint();
    let straight = d.integrate_phi(z, &IntegrationPath::straight(base, z));
    let bent = d.integrate_phi(z, &IntegrationPath::axis_aligned(base, z));
    let path = match (straight, bent) {
        (Ok(a), Ok(b)) => Some(((a - b).max_modulus(), 0.0)),
        _ => None,
    };
    let mut out = phi_checks.to_vec();
    out.extend(geometric_residuals(d, s, tol));
    out.push(path);
    out
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    max: f64,
    scale: f64,
    checked: usize,
    skipped: usize,
}

impl Accumulator {
    fn add(&mut self, r: Residual) {
        match r {
            Some((abs, scale)) => {
                let value = abs / (1.0 + scale);
                if value.is_nan() || self.max.is_nan() {
                    self.max = f64::NAN;
                } else if value > self.max || self.checked == 0 {
                    self.max = value;
                    self.scale = scale;
                }
                self.checked += 1;
            }
            None => self.skipped += 1,
        }
    }
}

fn build_report(
    names: &[CheckName],
    per_sample: Vec<Option<Vec<Residual>>>,
    samples_degenerate: usize,
    tol: &Tolerances,
) -> VerificationReport {
    let samples_total = per_sample.len();
    let mut acc = vec![Accumulator::default(); names.len()];
    for sample in per_sample {
        match sample {
            Some(rs) => acc.iter_mut().zip(rs).for_each(|(a, r)| a.add(r)),
            None => acc.iter_mut().for_each(|a| a.add(None)),
        }
    }
    let checks: Vec<CheckRecord> = names
        .iter()
        .zip(acc)
        .map(|(name, a)| {
            let tolerance = name.tolerance(tol);
            CheckRecord {
                name: *name,
                max_abs_residual: a.max,
                relative_scale: a.scale,
                tolerance,
                samples_checked: a.checked,
                samples_skipped: a.skipped,
                pass: a.checked > 0 && a.max.is_finite() && a.max <= tolerance,
            }
        })
        .collect();
    VerificationReport {
        schema_version: SCHEMA_VERSION.to_string(),
        overall: checks.iter().all(|c| c.pass),
        checks,
        convention_constant: convention_constant(),
        samples_total,
        samples_degenerate,
    }
}

/// Runs all ten checks for Weierstrass data over `dom`.
pub fn verify(
    d: &WeierstrassData,
    dom: &ParamDomain,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let grid = sample_surface_grid(d, dom, d.policy().behavior)?;
    let degenerate = grid.degenerate();
    let per_sample: Vec<Option<Vec<Residual>>> = grid
        .entries
        .par_iter()
        .map(|e| {
            e.sample()
                .filter(|s| !s.degenerate)
                .map(|s| weierstrass_residuals(d, s, tol))
        })
        .collect();
    Ok(build_report(&CheckName::ALL, per_sample, degenerate, tol))
}

/// Runs the geometric checks on an arbitrary parametric surface. Checks that
/// need φ are not applicable and are left out of the report.
pub fn verify_surface<S: ParametricSurface + ?Sized>(
    surface: &S,
    dom: &ParamDomain,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let grid = sample_surface_grid(surface, dom, SingularBehavior::SkipSample)?;
    let degenerate = grid.degenerate();
    let per_sample: Vec<Option<Vec<Residual>>> = grid
        .entries
        .par_iter()
        .map(|e| {
            e.sample()
                .filter(|s| !s.degenerate)
                .map(|s| geometric_residuals(surface, s, tol).to_vec())
        })
        .collect();
    Ok(build_report(
        &CheckName::GEOMETRIC,
        per_sample,
        degenerate,
        tol,
    ))
}

/// Negative control: Weierstrass data whose second φ component uses
/// `i f (1 − g²)` instead of `i f (1 + g²)`, so φ is no longer null.
pub fn mutated_phi(f: &Expr, g: &Expr) -> WeierstrassData {
    let g_sq = Expr::pow(g.clone(), 2);
    let phi1 = Expr::mul(f.clone(), Expr::sub(Expr::real(1.0), g_sq.clone()));
    let phi2 = Expr::mul(
        Expr::mul(Expr::imag_unit(), f.clone()),
        Expr::sub(Expr::real(1.0), g_sq),
    );
    let phi3 = Expr::mul(Expr::mul(Expr::real(2.0), f.clone()), g.clone());
    WeierstrassData::from_phi(phi1, phi2, phi3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_entries;
    use crate::expr::parse;
    use crate::geometry::Sphere;
    use num_complex::Complex64;

    #[test]
    fn catalog_entries_pass_on_coarse_grids() {
        for entry in catalog_entries() {
            let dom = entry.default_domain.with_resolution(12, 12).unwrap();
            let report = verify(&entry.data, &dom, &Tolerances::default()).unwrap();
            assert!(
                report.overall,
                "{}:\n{}",
                entry.name,
                report.summary_lines().join("\n")
            );
            assert_eq!(report.checks.len(), 10);
            assert!(
                report
                    .check(CheckName::MeanCurvatureZero)
                    .unwrap()
                    .max_abs_residual
                    <= 1e-8
            );
        }
    }

    #[test]
    fn mutated_phi_fails_null_condition() {
        let d = mutated_phi(&parse("1").unwrap(), &parse("z").unwrap());
        let dom = ParamDomain::disk(1.0, Complex64::new(0.0, 0.0), 8, 16).unwrap();
        let report = verify(&d, &dom, &Tolerances::default()).unwrap();
        let check = report.check(CheckName::PhiSquareZero).unwrap();
        assert!(!check.pass);
        assert!(check.max_abs_residual >= 1e-2);
        assert!(!report.overall);
    }

    #[test]
    fn sphere_fails_minimality() {
        let dom = ParamDomain::rectangle(-1.0, 1.0, -1.0, 1.0, 9, 9).unwrap();
        let report = verify_surface(&Sphere { radius: 1.0 }, &dom, &Tolerances::default()).unwrap();
        let h = report.check(CheckName::MeanCurvatureZero).unwrap();
        assert!(!h.pass);
        assert!((h.max_abs_residual - report.convention_constant).abs() < 1e-9);
        assert!(!report.check(CheckName::CrosscheckZero).unwrap().pass);
        assert!(report.check(CheckName::PhiSquareZero).is_none());
        assert!(!report.overall);
    }

    #[test]
    fn residuals_do_not_grow_with_resolution() {
        let tol = Tolerances::default();
        for entry in catalog_entries() {
            let coarse = entry.default_domain.with_resolution(8, 8).unwrap();
            let fine = entry.default_domain.with_resolution(48, 48).unwrap();
            let a = verify(&entry.data, &coarse, &tol).unwrap();
            let b = verify(&entry.data, &fine, &tol).unwrap();
            for (x, y) in a.checks.iter().zip(&b.checks) {
                // identities hold pointwise: a finer grid only finds more float noise
                let bound = 100.0 * x.max_abs_residual + 1e-3 * x.tolerance;
                assert!(
                    y.max_abs_residual <= bound,
                    "{} {:?}: {} -> {}",
                    entry.name,
                    x.name,
                    x.max_abs_residual,
                    y.max_abs_residual
                );
            }
        }
    }

    #[test]
    fn serialized_names_match_summary_names() {
        for name in CheckName::ALL {
            assert_eq!(serde_json::to_value(name).unwrap(), name.as_str());
        }
    }

    #[test]
    fn report_json_round_trips() {
        let entry = crate::catalog::by_name("plane").unwrap();
        let dom = entry.default_domain.with_resolution(3, 3).unwrap();
        let report = verify(&entry.data, &dom, &Tolerances::default()).unwrap();
        let json = report.to_json();
        assert!(json.contains("\"schema_version\": \"wrep-report/1\""));
        assert!(json.contains("\"phi_square_zero\""));
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn degenerate_samples_are_counted_not_checked() {
        let d = WeierstrassData::parse_fg("z", "z").unwrap();
        // φ(0) = 0: a branch point at the center
        let dom = ParamDomain::disk(0.5, Complex64::new(0.0, 0.0), 3, 6).unwrap();
        let report = verify(&d, &dom, &Tolerances::default()).unwrap();
        assert_eq!(report.samples_degenerate, 1);
        assert!(report.checks.iter().all(|c| c.samples_skipped == 1));
        assert!(report.overall, "{}", report.summary_lines().join("\n"));
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("curvature", 1e-6).unwrap();
        t.set("fd", 2e-5).unwrap();
        assert_eq!(t.curvature, 1e-6);
        assert_eq!(t.finite_difference, 2e-5);
        assert!(t.set("bogus", 1.0).is_err());
        assert!(t.set("path", -1.0).is_err());
    }

    #[test]
    fn nan_residual_fails_the_check() {
        let mut a = Accumulator::default();
        a.add(Some((1e-20, 0.0)));
        a.add(Some((f64::NAN, 0.0)));
        a.add(Some((1e-30, 0.0)));
        assert!(a.max.is_nan());
    }
}
