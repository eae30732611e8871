//! Named Weierstrass data with default domains and closed-form checks.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::complex::{nan_max, ComplexVec3, RealVec3};
use crate::mesh::{DomainShape, Grid, ParamDomain};
use crate::weierstrass::WeierstrassData;

pub const DEFAULT_RESOLUTION: usize = 64;

/// Geometric identity an entry's samples must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImplicitCheck {
    /// `x = Re(z − z³/3, i(z + z³/3), z²)` up to the basepoint constant.
    EnneperClosedForm,
    /// `x₁² + x₂² = 4 cosh²(x₃/2)` after removing the basepoint constant.
    CatenoidImplicit,
    /// Each `v = const` row lies on a horizontal line through the x₃ axis.
    HelicoidRuling,
}

impl ImplicitCheck {
    pub fn name(self) -> &'static str {
        match self {
            ImplicitCheck::EnneperClosedForm => "enneper_closed_form",
            ImplicitCheck::CatenoidImplicit => "catenoid_implicit",
            ImplicitCheck::HelicoidRuling => "helicoid_ruling",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            ImplicitCheck::EnneperClosedForm => 1e-9,
            ImplicitCheck::CatenoidImplicit => 1e-6,
            ImplicitCheck::HelicoidRuling => 1e-8,
        }
    }

    /// Largest absolute residual over the evaluated samples of `grid`.
    pub fn max_residual(self, grid: &Grid, basepoint: Complex64) -> f64 {
        let samples = || {
            grid.entries
                .iter()
                .filter_map(|e| e.sample().map(|s| (e.z, s.x)))
        };
        match self {
            ImplicitCheck::EnneperClosedForm => {
                let offset = enneper_primitive(basepoint).re();
                samples()
                    .map(|(z, x)| (x - (enneper_primitive(z).re() - offset)).max_abs())
                    .fold(0.0, nan_max)
            }
            ImplicitCheck::CatenoidImplicit => {
                let offset = catenoid_primitive(basepoint).re();
                samples()
                    .map(|(_, x)| {
                        let p = x + offset;
                        let c = (p.x3 / 2.0).cosh();
                        (p.x1 * p.x1 + p.x2 * p.x2 - 4.0 * c * c).abs()
                    })
                    .fold(0.0, nan_max)
            }
            ImplicitCheck::HelicoidRuling => helicoid_ruling_residual(grid),
        }
    }
}

/// Antiderivative of Enneper's φ with zero constant.
pub fn enneper_primitive(z: Complex64) -> ComplexVec3 {
    let i = Complex64::new(0.0, 1.0);
    let z3 = z * z * z;
    ComplexVec3::new(z - z3 / 3.0, i * (z + z3 / 3.0), z * z)
}

/// Antiderivative of the catenoid's φ with zero constant.
pub fn catenoid_primitive(z: Complex64) -> ComplexVec3 {
    let i = Complex64::new(0.0, 1.0);
    ComplexVec3::new(-2.0 * z.cosh(), 2.0 * i * z.sinh(), 2.0 * z)
}

fn helicoid_ruling_residual(grid: &Grid) -> f64 {
    let (nu, nv) = grid.domain.resolution();
    if !matches!(grid.domain.shape(), DomainShape::Rectangle { .. }) {
        return f64::NAN;
    }
    let mut worst: f64 = 0.0;
    for j in 0..nv {
        let row: Vec<RealVec3> = (0..nu)
            .filter_map(|i| grid.entries[j * nu + i].sample().map(|s| s.x))
            .collect();
        let Some(far) = row
            .iter()
            .copied()
            .max_by(|a, b| a.x1.hypot(a.x2).total_cmp(&b.x1.hypot(b.x2)))
        else {
            continue;
        };
        let len = far.x1.hypot(far.x2);
        let height = row[0].x3;
        for p in &row {
            worst = nan_max(worst, (p.x3 - height).abs());
            if len > 0.0 {
                let off_line = (p.x1 * far.x2 - p.x2 * far.x1) / len;
                worst = nan_max(worst, off_line.abs());
            }
        }
    }
    worst
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub data: WeierstrassData,
    pub default_domain: ParamDomain,
    /// The (f, g) pair the entry comes from, as text.
    pub f: &'static str,
    pub g: &'static str,
    /// φ components as text, for direct-φ entries.
    pub phi: Option<[&'static str; 3]>,
    pub note: &'static str,
    pub closed_form: Option<&'static str>,
    pub implicit_check: Option<ImplicitCheck>,
}

fn fg(f: &str, g: &str) -> WeierstrassData {
    WeierstrassData::parse_fg(f, g).expect("catalog expressions parse")
}

fn unit_disk() -> ParamDomain {
    ParamDomain::disk(
        1.0,
        Complex64::new(0.0, 0.0),
        DEFAULT_RESOLUTION,
        DEFAULT_RESOLUTION,
    )
    .expect("valid disk")
}

fn rect(u0: f64, u1: f64, v0: f64, v1: f64) -> ParamDomain {
    ParamDomain::rectangle(u0, u1, v0, v1, DEFAULT_RESOLUTION, DEFAULT_RESOLUTION)
        .expect("valid rectangle")
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    const POLE_PHI: [&str; 3] = ["z^2 - 1", "i*(z^2 + 1)", "2*z"];
    vec![
        CatalogEntry {
            name: "plane",
            data: fg("1", "0"),
            default_domain: rect(-1.0, 1.0, -1.0, 1.0),
            f: "1",
            g: "0",
            phi: None,
            note: "flat plane x = (u, -v, 0)",
            closed_form: Some("Phi = (z, i z, 0)"),
            implicit_check: None,
        },
        CatalogEntry {
            name: "enneper",
            data: fg("1", "z"),
            default_domain: unit_disk(),
            f: "1",
            g: "z",
            phi: None,
            note: "Enneper's surface",
            closed_form: Some("Phi = (z - z^3/3, i(z + z^3/3), z^2)"),
            implicit_check: Some(ImplicitCheck::EnneperClosedForm),
        },
        CatalogEntry {
            name: "catenoid",
            data: fg("exp(-z)", "exp(z)"),
            default_domain: rect(-1.0, 1.0, -PI, PI),
            f: "exp(-z)",
            g: "exp(z)",
            phi: None,
            note: "catenoid about the x3 axis, neck radius 2",
            closed_form: Some("Phi = (-2 cosh z, 2i sinh z, 2z) + const"),
            implicit_check: Some(ImplicitCheck::CatenoidImplicit),
        },
        CatalogEntry {
            name: "helicoid",
            data: fg("i*exp(-z)", "exp(z)"),
            default_domain: rect(-1.0, 1.0, -PI, PI),
            f: "i*exp(-z)",
            g: "exp(z)",
            phi: None,
            note: "helicoid, the conjugate surface of the catenoid",
            closed_form: Some("x = (2 sinh u sin v, -2 sinh u cos v, -2v)"),
            implicit_check: Some(ImplicitCheck::HelicoidRuling),
        },
        CatalogEntry {
            name: "pole-demo",
            data: WeierstrassData::parse_phi(POLE_PHI[0], POLE_PHI[1], POLE_PHI[2])
                .expect("catalog expressions parse"),
            default_domain: unit_disk(),
            f: "z^2",
            g: "1/z",
            phi: Some(POLE_PHI),
            note: "f=z^2, g=1/z; fg^2=1 analytic",
            closed_form: Some("Phi = (z^3/3 - z, i(z^3/3 + z), z^2)"),
            implicit_check: None,
        },
    ]
}

pub fn by_name(name: &str) -> Option<CatalogEntry> {
    catalog_entries().into_iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    catalog_entries().iter().map(|e| e.name).collect()
}
