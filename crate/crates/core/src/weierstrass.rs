//! Weierstrass data, the null curve φ, and the surface `x = Re ∫ φ dz`.
//!
//! Derivatives of `x` come straight from φ and φ′ by the Cauchy–Riemann
//! chain rule (`x_u = Re φ`, `x_v = −Im φ`, `x_uu = Re φ′`, `x_vv = −Re φ′`,
//! `x_uv = −Im φ′`); nothing here differentiates numerically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexScalar, ComplexVec3, RealVec3};
use crate::expr::{constant_fold, differentiate, parse, EvalError, Expr, ParseError};
use crate::quadrature::{integrate_segment, QuadratureError, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeierstrassError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("z = {z} lies within {radius} of declared singularity {singularity}")]
    NearSingularity {
        z: Complex64,
        singularity: Complex64,
        radius: f64,
    },
    #[error("integration path passes within {radius} of singularity {singularity}")]
    PathThroughSingularity { singularity: Complex64, radius: f64 },
    #[error("quadrature did not converge between {from} and {to} (error estimate {estimate:e})")]
    NonConvergence {
        from: Complex64,
        to: Complex64,
        estimate: f64,
    },
    #[error("invalid integration path: {0}")]
    InvalidPath(String),
}

impl WeierstrassError {
    /// The parameter value the failure is attributed to, when there is one.
    pub fn z(&self) -> Option<Complex64> {
        match self {
            WeierstrassError::Eval(e) => Some(e.z()),
            WeierstrassError::NearSingularity { z, .. } => Some(*z),
            WeierstrassError::PathThroughSingularity { singularity, .. } => Some(*singularity),
            WeierstrassError::NonConvergence { to, .. } => Some(*to),
            WeierstrassError::InvalidPath(_) => None,
        }
    }
}

impl From<QuadratureError<WeierstrassError>> for WeierstrassError {
    fn from(e: QuadratureError<WeierstrassError>) -> Self {
        match e {
            QuadratureError::NonConvergence { from, to, estimate } => {
                WeierstrassError::NonConvergence { from, to, estimate }
            }
            QuadratureError::Integrand(inner) => inner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularBehavior {
    SkipSample,
    Error,
}

/// How samples near declared singularities are treated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityPolicy {
    exclusion_radius: f64,
    pub behavior: SingularBehavior,
}

impl SingularityPolicy {
    /// Returns `None` unless `exclusion_radius > 0`.
    pub fn new(exclusion_radius: f64, behavior: SingularBehavior) -> Option<Self> {
        (exclusion_radius > 0.0).then_some(Self {
            exclusion_radius,
            behavior,
        })
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }
}

impl Default for SingularityPolicy {
    fn default() -> Self {
        Self {
            exclusion_radius: 1e-6,
            behavior: SingularBehavior::SkipSample,
        }
    }
}

/// Where φ came from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// φ built from the pair (f, g).
    FG { f: Expr, g: Expr },
    /// φ supplied componentwise, e.g. with poles of g already cancelled.
    DirectPhi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Straight,
    /// Horizontal leg first, then vertical.
    AxisAligned,
    Polyline,
}

/// A piecewise-straight path in the parameter plane.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationPath {
    kind: PathKind,
    waypoints: Vec<Complex64>,
}

impl IntegrationPath {
    pub fn straight(from: Complex64, to: Complex64) -> Self {
        Self::build(PathKind::Straight, vec![from, to])
    }

    pub fn axis_aligned(from: Complex64, to: Complex64) -> Self {
        Self::build(
            PathKind::AxisAligned,
            vec![from, Complex64::new(to.re, from.im), to],
        )
    }

    /// A polyline through the given points; repeated consecutive points are
    /// merged.
    pub fn polyline(points: Vec<Complex64>) -> Result<Self, WeierstrassError> {
        if points.is_empty() {
            return Err(WeierstrassError::InvalidPath("no waypoints".into()));
        }
        Ok(Self::build(PathKind::Polyline, points))
    }

    fn build(kind: PathKind, mut waypoints: Vec<Complex64>) -> Self {
        waypoints.dedup();
        Self { kind, waypoints }
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn waypoints(&self) -> &[Complex64] {
        &self.waypoints
    }

    pub fn start(&self) -> Complex64 {
        self.waypoints[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.waypoints.last().expect("paths are never empty")
    }

    fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        self.waypoints.windows(2).map(|w| (w[0], w[1]))
    }
}

fn distance_to_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sqr();
    if len_sq == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len_sq;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Weierstrass data together with its derived φ and φ′.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    source: DataSource,
    phi: [Expr; 3],
    dphi: [Expr; 3],
    basepoint: ComplexScalar,
    policy: SingularityPolicy,
    singularities: Vec<Complex64>,
    tolerance: f64,
}

/// Builds φ = (f(1 − g²), i f(1 + g²), 2 f g).
pub fn make_phi(f: Expr, g: Expr) -> WeierstrassData {
    let one = || Expr::real(1.0);
    let g_sq = || Expr::pow(g.clone(), 2);
    let phi = [
        Expr::mul(f.clone(), Expr::sub(one(), g_sq())),
        Expr::mul(
            Expr::mul(Expr::imag_unit(), f.clone()),
            Expr::add(one(), g_sq()),
        ),
        Expr::mul(Expr::mul(Expr::real(2.0), f.clone()), g.clone()),
    ];
    WeierstrassData::with_phi(DataSource::FG { f, g }, phi)
}

impl WeierstrassData {
    fn with_phi(source: DataSource, phi: [Expr; 3]) -> Self {
        let dphi = phi.clone().map(|p| constant_fold(&differentiate(&p)));
        Self {
            source,
            phi,
            dphi,
            basepoint: Complex64::new(0.0, 0.0),
            policy: SingularityPolicy::default(),
            singularities: Vec::new(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn from_fg(f: Expr, g: Expr) -> Self {
        make_phi(f, g)
    }

    /// Direct-φ mode. Whether the components are null is not checked here;
    /// that is the verifier's job.
    pub fn from_phi(phi1: Expr, phi2: Expr, phi3: Expr) -> Self {
        Self::with_phi(DataSource::DirectPhi, [phi1, phi2, phi3])
    }

    pub fn parse_fg(f: &str, g: &str) -> Result<Self, ParseError> {
        Ok(make_phi(parse(f)?, parse(g)?))
    }

    pub fn parse_phi(phi1: &str, phi2: &str, phi3: &str) -> Result<Self, ParseError> {
        Ok(Self::from_phi(parse(phi1)?, parse(phi2)?, parse(phi3)?))
    }

    pub fn with_basepoint(mut self, z0: Complex64) -> Self {
        self.basepoint = z0;
        self
    }

    pub fn with_policy(mut self, policy: SingularityPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_singularities(mut self, points: Vec<Complex64>) -> Self {
        self.singularities = points;
        self
    }

    /// Absolute quadrature tolerance per component.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn source(&self) -> &DataSource {
        &self.source
    }

    pub fn phi(&self) -> &[Expr; 3] {
        &self.phi
    }

    pub fn dphi(&self) -> &[Expr; 3] {
        &self.dphi
    }

    pub fn basepoint(&self) -> Complex64 {
        self.basepoint
    }

    pub fn policy(&self) -> SingularityPolicy {
        self.policy
    }

    pub fn singularities(&self) -> &[Complex64] {
        &self.singularities
    }

    /// The declared singularity closer than the exclusion radius to `z`.
    pub fn nearby_singularity(&self, z: Complex64) -> Option<Complex64> {
        let r = self.policy.exclusion_radius();
        self.singularities
            .iter()
            .copied()
            .find(|s| (z - *s).norm() < r)
    }

    fn check_point(&self, z: Complex64) -> Result<(), WeierstrassError> {
        match self.nearby_singularity(z) {
            Some(s) => Err(WeierstrassError::NearSingularity {
                z,
                singularity: s,
                radius: self.policy.exclusion_radius(),
            }),
            None => Ok(()),
        }
    }

    fn eval3(exprs: &[Expr; 3], z: Complex64) -> Result<ComplexVec3, WeierstrassError> {
        Ok(ComplexVec3::new(
            exprs[0].eval(z)?,
            exprs[1].eval(z)?,
            exprs[2].eval(z)?,
        ))
    }

    pub fn phi_at(&self, z: Complex64) -> Result<ComplexVec3, WeierstrassError> {
        self.check_point(z)?;
        Self::eval3(&self.phi, z)
    }

    pub fn dphi_at(&self, z: Complex64) -> Result<ComplexVec3, WeierstrassError> {
        self.check_point(z)?;
        Self::eval3(&self.dphi, z)
    }

    /// Φ(z) = ∫ φ dz along `path`, which must run from the basepoint to `z`.
    pub fn integrate_phi(
        &self,
        z: Complex64,
        path: &IntegrationPath,
    ) -> Result<ComplexVec3, WeierstrassError> {
        if path.start() != self.basepoint || path.end() != z {
            return Err(WeierstrassError::InvalidPath(format!(
                "path runs {} -> {}, expected {} -> {}",
                path.start(),
                path.end(),
                self.basepoint,
                z
            )));
        }
        let r = self.policy.exclusion_radius();
        for (a, b) in path.segments() {
            if let Some(s) = self
                .singularities
                .iter()
                .copied()
                .find(|s| distance_to_segment(*s, a, b) < r)
            {
                return Err(WeierstrassError::PathThroughSingularity {
                    singularity: s,
                    radius: r,
                });
            }
        }
        let integrand = |w: Complex64| Self::eval3(&self.phi, w);
        let mut total = ComplexVec3::ZERO;
        for (a, b) in path.segments() {
            total = total + integrate_segment(&integrand, a, b, self.tolerance)?;
        }
        Ok(total)
    }

    /// Φ along the straight path from the basepoint.
    pub fn antiderivative(&self, z: Complex64) -> Result<ComplexVec3, WeierstrassError> {
        self.integrate_phi(z, &IntegrationPath::straight(self.basepoint, z))
    }

    /// x(z) = Re Φ(z), integrated along the straight path from the basepoint.
    pub fn surface_point(&self, z: Complex64) -> Result<RealVec3, WeierstrassError> {
        Ok(self.antiderivative(z)?.re())
    }

    /// (x_u, x_v) = (Re φ, −Im φ).
    pub fn first_derivs(&self, z: Complex64) -> Result<(RealVec3, RealVec3), WeierstrassError> {
        let phi = self.phi_at(z)?;
        Ok((phi.re(), -phi.im()))
    }

    /// (x_uu, x_vv, x_uv) = (Re φ′, −Re φ′, −Im φ′).
    pub fn second_derivs(
        &self,
        z: Complex64,
    ) -> Result<(RealVec3, RealVec3, RealVec3), WeierstrassError> {
        let dphi = self.dphi_at(z)?;
        let x_uu = dphi.re();
        Ok((x_uu, -x_uu, -dphi.im()))
    }
}
