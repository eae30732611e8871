//! Normals, first fundamental form and mean curvature.
//!
//! The mean curvature vector is
//!
//! ```text
//!     H = P⊥ (x_v² x_uu − 2 (x_u·x_v) x_uv + x_u² x_vv) / (x_u² x_v² − (x_u·x_v)²)
//! ```
//!
//! where `P⊥` projects onto the normal line. It carries no factor ½, so on a
//! sphere of radius R it has length 2/R, twice the textbook scalar
//! `(eG − 2fF + gE) / (2(EG − F²))` computed by
//! [`mean_curvature_crosscheck`]. The ratio is measured, not assumed; see
//! [`convention_constant`].

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{cross, dot_real, norm_sq, RealVec3};
use crate::weierstrass::{WeierstrassData, WeierstrassError};

/// Relative threshold on `EG − F²` below which a sample counts as a branch point.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate point: EG - F^2 = {discriminant:e}")]
    Degenerate { discriminant: f64 },
}

/// Position and partial derivatives up to second order at one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SurfaceJet {
    pub x: RealVec3,
    pub x_u: RealVec3,
    pub x_v: RealVec3,
    pub x_uu: RealVec3,
    pub x_vv: RealVec3,
    pub x_uv: RealVec3,
}

/// Coefficients E, F, G of the first fundamental form.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FirstForm {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl FirstForm {
    pub fn of(x_u: RealVec3, x_v: RealVec3) -> Self {
        Self {
            e: norm_sq(x_u),
            f: dot_real(x_u, x_v),
            g: norm_sq(x_v),
        }
    }

    /// `EG − F²`.
    pub fn discriminant(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    pub fn is_degenerate(&self) -> bool {
        let d = self.discriminant();
        d.is_nan() || d < DEGENERACY_THRESHOLD * (self.e * self.g + 1.0)
    }
}

/// Everything known about the surface at one parameter value `z = u + iv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceSample {
    #[serde(serialize_with = "ser_complex")]
    pub z: Complex64,
    pub x: RealVec3,
    pub x_u: RealVec3,
    pub x_v: RealVec3,
    pub x_uu: RealVec3,
    pub x_vv: RealVec3,
    pub x_uv: RealVec3,
    /// Unit normal, or zero at a degenerate sample.
    pub normal: RealVec3,
    pub first_form: FirstForm,
    pub h_vec: RealVec3,
    /// `h_vec · normal`.
    pub h_scalar: f64,
    pub degenerate: bool,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl SurfaceSample {
    /// Fills in normal, E/F/G and H from the jet. Degenerate samples get a
    /// zero normal and zero curvature and are flagged.
    pub fn from_jet(z: Complex64, jet: SurfaceJet) -> Self {
        let first_form = FirstForm::of(jet.x_u, jet.x_v);
        let mut s = SurfaceSample {
            z,
            x: jet.x,
            x_u: jet.x_u,
            x_v: jet.x_v,
            x_uu: jet.x_uu,
            x_vv: jet.x_vv,
            x_uv: jet.x_uv,
            normal: RealVec3::ZERO,
            first_form,
            h_vec: RealVec3::ZERO,
            h_scalar: 0.0,
            degenerate: first_form.is_degenerate(),
        };
        if !s.degenerate {
            s.normal = cross(jet.x_u, jet.x_v).scale(1.0 / cross(jet.x_u, jet.x_v).norm());
            s.h_vec = mean_curvature_unchecked(&s);
            s.h_scalar = dot_real(s.h_vec, s.normal);
        }
        s
    }

    pub fn jet(&self) -> SurfaceJet {
        SurfaceJet {
            x: self.x,
            x_u: self.x_u,
            x_v: self.x_v,
            x_uu: self.x_uu,
            x_vv: self.x_vv,
            x_uv: self.x_uv,
        }
    }
}

/// `cross(x_u, x_v)` normalized.
pub fn unit_normal(x_u: RealVec3, x_v: RealVec3) -> Result<RealVec3, GeometryError> {
    let form = FirstForm::of(x_u, x_v);
    if form.is_degenerate() {
        return Err(GeometryError::Degenerate {
            discriminant: form.discriminant(),
        });
    }
    let n = cross(x_u, x_v);
    Ok(n.scale(1.0 / n.norm()))
}

/// `(v·n) n` for a unit `n`.
pub fn project_normal(v: RealVec3, n: RealVec3) -> RealVec3 {
    n.scale(dot_real(v, n))
}

fn mean_curvature_unchecked(s: &SurfaceSample) -> RealVec3 {
    let FirstForm { e, f, g } = s.first_form;
    let numerator = s.x_uu.scale(g) - s.x_uv.scale(2.0 * f) + s.x_vv.scale(e);
    project_normal(numerator.scale(1.0 / (e * g - f * f)), s.normal)
}

/// The mean curvature vector of the surface at `s`.
pub fn mean_curvature_vector(s: &SurfaceSample) -> Result<RealVec3, GeometryError> {
    if s.degenerate {
        return Err(GeometryError::Degenerate {
            discriminant: s.first_form.discriminant(),
        });
    }
    Ok(mean_curvature_unchecked(s))
}

/// Textbook scalar mean curvature `(eG − 2fF + gE) / (2(EG − F²))` relative to
/// the normal `cross(x_u, x_v)`, with second-form coefficients
/// `e = x_uu·n`, `f = x_uv·n`, `g = x_vv·n`.
pub fn mean_curvature_crosscheck(s: &SurfaceSample) -> Result<f64, GeometryError> {
    let form = s.first_form;
    if s.degenerate {
        return Err(GeometryError::Degenerate {
            discriminant: form.discriminant(),
        });
    }
    let n = s.normal;
    let (l, m, nn) = (
        dot_real(s.x_uu, n),
        dot_real(s.x_uv, n),
        dot_real(s.x_vv, n),
    );
    Ok((l * form.g - 2.0 * m * form.f + nn * form.e) / (2.0 * form.discriminant()))
}

/// Something that can report position and derivatives at a parameter value.
pub trait ParametricSurface: Sync {
    fn position(&self, z: Complex64) -> Result<RealVec3, WeierstrassError>;

    fn jet(&self, z: Complex64) -> Result<SurfaceJet, WeierstrassError>;

    fn sample(&self, z: Complex64) -> Result<SurfaceSample, WeierstrassError> {
        Ok(SurfaceSample::from_jet(z, self.jet(z)?))
    }
}

impl ParametricSurface for WeierstrassData {
    fn position(&self, z: Complex64) -> Result<RealVec3, WeierstrassError> {
        self.surface_point(z)
    }

    fn jet(&self, z: Complex64) -> Result<SurfaceJet, WeierstrassError> {
        let (x_u, x_v) = self.first_derivs(z)?;
        let (x_uu, x_vv, x_uv) = self.second_derivs(z)?;
        Ok(SurfaceJet {
            x: self.surface_point(z)?,
            x_u,
            x_v,
            x_uu,
            x_vv,
            x_uv,
        })
    }
}

/// A fully populated sample of Weierstrass data at `z`.
pub fn sample_at(d: &WeierstrassData, z: Complex64) -> Result<SurfaceSample, WeierstrassError> {
    d.sample(z)
}

/// Central-difference jet of `position` at `z` with step `h`.
///
/// First derivatives use the two-point stencil, pure second derivatives the
/// three-point stencil, and `x_uv` the four-corner stencil.
pub fn fd_jet<F>(position: F, z: Complex64, h: f64) -> Result<SurfaceJet, WeierstrassError>
where
    F: Fn(Complex64) -> Result<RealVec3, WeierstrassError>,
{
    let du = Complex64::new(h, 0.0);
    let dv = Complex64::new(0.0, h);
    let x = position(z)?;
    let up = position(z + du)?;
    let um = position(z - du)?;
    let vp = position(z + dv)?;
    let vm = position(z - dv)?;
    let pp = position(z + du + dv)?;
    let pm = position(z + du - dv)?;
    let mp = position(z - du + dv)?;
    let mm = position(z - du - dv)?;
    Ok(SurfaceJet {
        x,
        x_u: (up - um).scale(0.5 / h),
        x_v: (vp - vm).scale(0.5 / h),
        x_uu: (up - x.scale(2.0) + um).scale(1.0 / (h * h)),
        x_vv: (vp - x.scale(2.0) + vm).scale(1.0 / (h * h)),
        x_uv: (pp - pm - mp + mm).scale(0.25 / (h * h)),
    })
}

/// Finite-difference view of another surface: positions come from the
/// wrapped surface, every derivative from [`fd_jet`].
#[derive(Debug, Clone, Copy)]
pub struct FiniteDifference<'a, S: ?Sized> {
    pub surface: &'a S,
    pub step: f64,
}

impl<S: ParametricSurface + ?Sized> ParametricSurface for FiniteDifference<'_, S> {
    fn position(&self, z: Complex64) -> Result<RealVec3, WeierstrassError> {
        self.surface.position(z)
    }

    fn jet(&self, z: Complex64) -> Result<SurfaceJet, WeierstrassError> {
        fd_jet(|w| self.surface.position(w), z, self.step)
    }
}

/// Sphere of radius `radius` about the origin, `x = R(cos u cos v, sin u cos v, sin v)`.
/// Not minimal; used as the negative control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere {
    pub radius: f64,
}

impl ParametricSurface for Sphere {
    fn position(&self, z: Complex64) -> Result<RealVec3, WeierstrassError> {
        Ok(self.jet(z)?.x)
    }

    fn jet(&self, z: Complex64) -> Result<SurfaceJet, WeierstrassError> {
        let r = self.radius;
        let (su, cu) = z.re.sin_cos();
        let (sv, cv) = z.im.sin_cos();
        Ok(SurfaceJet {
            x: RealVec3::new(cu * cv, su * cv, sv).scale(r),
            x_u: RealVec3::new(-su * cv, cu * cv, 0.0).scale(r),
            x_v: RealVec3::new(-cu * sv, -su * sv, cv).scale(r),
            x_uu: RealVec3::new(-cu * cv, -su * cv, 0.0).scale(r),
            x_vv: RealVec3::new(-cu * cv, -su * cv, -sv).scale(r),
            x_uv: RealVec3::new(su * sv, -cu * sv, 0.0).scale(r),
        })
    }
}

/// Parameter at which [`convention_constant`] probes the unit sphere.
pub const CONVENTION_PROBE: Complex64 = Complex64::new(0.3, 0.2);

/// Ratio `(H_vec · n) / crosscheck` measured on the unit sphere.
pub fn convention_constant() -> f64 {
    let s = Sphere { radius: 1.0 }
        .sample(CONVENTION_PROBE)
        .expect("sphere jet is total");
    let textbook = mean_curvature_crosscheck(&s).expect("sphere probe is regular");
    s.h_scalar / textbook
}
