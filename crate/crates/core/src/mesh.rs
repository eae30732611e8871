//! Parameter-domain sampling, triangulation and OBJ/PLY export.
//!
//! Rectangles are sampled on a uniform `nu × nv` lattice, row-major with `u`
//! varying fastest. Disks are sampled on `nu` concentric rings of `nv` points
//! each (radii `R·k/nu`, `k = 1..=nu`, angles `2πj/nv`), preceded by the
//! center, so a disk grid has `1 + nu·nv` points.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::complex::RealVec3;
use crate::geometry::{ParametricSurface, SurfaceSample};
use crate::weierstrass::{SingularBehavior, WeierstrassData, WeierstrassError};
use crate::{Error, Result};

/// A disc of the parameter plane that sampling must avoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exclusion {
    pub center: Complex64,
    pub radius: f64,
}

impl Exclusion {
    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainShape {
    Rectangle { u0: f64, u1: f64, v0: f64, v1: f64 },
    Disk { radius: f64, center: Complex64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDomain {
    shape: DomainShape,
    nu: usize,
    nv: usize,
    excluded: Vec<Exclusion>,
}

impl ParamDomain {
    pub fn rectangle(u0: f64, u1: f64, v0: f64, v1: f64, nu: usize, nv: usize) -> Result<Self> {
        if !(u0 < u1 && v0 < v1) {
            return Err(Error::InvalidDomain(format!(
                "rectangle needs u0 < u1 and v0 < v1, got [{u0}, {u1}] x [{v0}, {v1}]"
            )));
        }
        Self::new(DomainShape::Rectangle { u0, u1, v0, v1 }, nu, nv)
    }

    pub fn disk(radius: f64, center: Complex64, nu: usize, nv: usize) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidDomain(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        Self::new(DomainShape::Disk { radius, center }, nu, nv)
    }

    fn new(shape: DomainShape, nu: usize, nv: usize) -> Result<Self> {
        if nu < 2 || nv < 2 {
            return Err(Error::InvalidDomain(format!(
                "resolution must be at least 2x2, got {nu}x{nv}"
            )));
        }
        Ok(Self {
            shape,
            nu,
            nv,
            excluded: Vec::new(),
        })
    }

    pub fn with_resolution(&self, nu: usize, nv: usize) -> Result<Self> {
        let mut d = Self::new(self.shape, nu, nv)?;
        d.excluded = self.excluded.clone();
        Ok(d)
    }

    pub fn exclude(mut self, center: Complex64, radius: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidDomain(format!(
                "exclusion radius must be positive, got {radius}"
            )));
        }
        self.excluded.push(Exclusion { center, radius });
        Ok(self)
    }

    pub fn shape(&self) -> DomainShape {
        self.shape
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    pub fn excluded(&self) -> &[Exclusion] {
        &self.excluded
    }

    pub fn len(&self) -> usize {
        match self.shape {
            DomainShape::Rectangle { .. } => self.nu * self.nv,
            DomainShape::Disk { .. } => 1 + self.nu * self.nv,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameter value of grid index `k`.
    pub fn point(&self, k: usize) -> Complex64 {
        match self.shape {
            DomainShape::Rectangle { u0, u1, v0, v1 } => {
                let (i, j) = (k % self.nu, k / self.nu);
                let u = u0 + (u1 - u0) * i as f64 / (self.nu - 1) as f64;
                let v = v0 + (v1 - v0) * j as f64 / (self.nv - 1) as f64;
                Complex64::new(u, v)
            }
            DomainShape::Disk { radius, center } => {
                if k == 0 {
                    return center;
                }
                let ring = (k - 1) / self.nv + 1;
                let j = (k - 1) % self.nv;
                let r = radius * ring as f64 / self.nu as f64;
                let theta = 2.0 * PI * j as f64 / self.nv as f64;
                center + Complex64::from_polar(r, theta)
            }
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    fn excludes(&self, z: Complex64) -> bool {
        self.excluded.iter().any(|e| e.contains(z))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SkipReason {
    /// Inside one of the domain's exclusion discs.
    Excluded,
    /// Evaluation failed (pole, branch point, near a declared singularity).
    Singular(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub index: usize,
    pub z: Complex64,
    pub sample: Result<SurfaceSample, SkipReason>,
}

impl GridEntry {
    pub fn sample(&self) -> Option<&SurfaceSample> {
        self.sample.as_ref().ok()
    }

    /// Usable as a mesh vertex: evaluated and not a branch point.
    pub fn is_regular(&self) -> bool {
        self.sample().is_some_and(|s| !s.degenerate)
    }
}

/// Samples in grid order, with the domain they came from.
#[derive(Debug, Clone)]
pub struct Grid {
    pub domain: ParamDomain,
    pub entries: Vec<GridEntry>,
}

impl Grid {
    pub fn skipped(&self) -> usize {
        self.entries.iter().filter(|e| e.sample.is_err()).count()
    }

    pub fn degenerate(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.sample().is_some_and(|s| s.degenerate))
            .count()
    }
}

/// Samples Weierstrass data over `dom`, honoring the data's singularity policy.
pub fn sample_grid(d: &WeierstrassData, dom: &ParamDomain) -> Result<Grid> {
    sample_surface_grid(d, dom, d.policy().behavior)
}

/// Samples any surface over `dom`. Points inside an exclusion disc are always
/// skipped; evaluation failures are skipped or returned according to
/// `behavior`. Work is spread over the current rayon pool; the result is in
/// grid order regardless.
pub fn sample_surface_grid<S: ParametricSurface + ?Sized>(
    surface: &S,
    dom: &ParamDomain,
    behavior: SingularBehavior,
) -> Result<Grid> {
    let entries: Vec<std::result::Result<GridEntry, WeierstrassError>> = (0..dom.len())
        .into_par_iter()
        .map(|index| {
            let z = dom.point(index);
            let sample = if dom.excludes(z) {
                Err(SkipReason::Excluded)
            } else {
                match surface.sample(z) {
                    Ok(s) => Ok(s),
                    Err(e) if behavior == SingularBehavior::Error => return Err(e),
                    Err(e) => Err(SkipReason::Singular(e.to_string())),
                }
            };
            Ok(GridEntry { index, z, sample })
        })
        .collect();
    let entries = entries
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if entries.iter().all(|e| e.sample.is_err()) {
        return Err(Error::AllSamplesSkipped(entries.len()));
    }
    Ok(Grid {
        domain: dom.clone(),
        entries,
    })
}

/// Triangle mesh with optional per-vertex normals.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<RealVec3>,
    pub normals: Option<Vec<RealVec3>>,
    /// Zero-based, counterclockwise about the vertex normals.
    pub faces: Vec<[usize; 3]>,
    /// Grid indices that did not become vertices.
    pub skipped: Vec<usize>,
}

impl Mesh {
    pub fn without_normals(mut self) -> Self {
        self.normals = None;
        self
    }
}

/// Two triangles per complete grid quad (plus the center fan on disks).
/// Quads touching a skipped or degenerate vertex are left out.
pub fn triangulate(grid: &Grid) -> Result<Mesh> {
    let mut vertex_of = vec![None; grid.entries.len()];
    let mut vertices = Vec::new();
    let mut normals = Vec::new();
    let mut skipped = Vec::new();
    for entry in &grid.entries {
        match entry.sample() {
            Some(s) if !s.degenerate => {
                vertex_of[entry.index] = Some(vertices.len());
                vertices.push(s.x);
                normals.push(s.normal);
            }
            _ => skipped.push(entry.index),
        }
    }

    let mut faces = Vec::new();
    let mut quad = |a: usize, b: usize, c: usize, d: usize| {
        if let (Some(a), Some(b), Some(c), Some(d)) =
            (vertex_of[a], vertex_of[b], vertex_of[c], vertex_of[d])
        {
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    };
    let (nu, nv) = grid.domain.resolution();
    match grid.domain.shape() {
        DomainShape::Rectangle { .. } => {
            for j in 0..nv - 1 {
                for i in 0..nu - 1 {
                    let k = j * nu + i;
                    quad(k, k + 1, k + nu + 1, k + nu);
                }
            }
        }
        DomainShape::Disk { .. } => {
            let at = |ring: usize, j: usize| 1 + (ring - 1) * nv + j % nv;
            for ring in 1..nu {
                for j in 0..nv {
                    quad(
                        at(ring, j),
                        at(ring + 1, j),
                        at(ring + 1, j + 1),
                        at(ring, j + 1),
                    );
                }
            }
            for j in 0..nv {
                if let (Some(c), Some(a), Some(b)) =
                    (vertex_of[0], vertex_of[at(1, j)], vertex_of[at(1, j + 1)])
                {
                    faces.push([c, a, b]);
                }
            }
        }
    }
    if faces.is_empty() {
        return Err(Error::EmptyMesh);
    }
    Ok(Mesh {
        vertices,
        normals: Some(normals),
        faces,
        skipped,
    })
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros trimmed,
/// exponent form outside `1e-5 ..= 1e17`. Negative zero prints as `0`.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let digits = (16 - exp) as usize;
        trim_fraction(&format!("{:.*}", digits, x)).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_fraction(mantissa), sign, exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn check_finite(mesh: &Mesh) -> Result<()> {
    if mesh.faces.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let normals = mesh.normals.iter().flatten();
    for (k, v) in mesh.vertices.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(k));
        }
    }
    for (k, n) in normals.enumerate() {
        if !n.is_finite() {
            return Err(Error::NonFinite(k));
        }
    }
    Ok(())
}

fn push_vec(out: &mut String, prefix: &str, v: RealVec3) {
    let _ = writeln!(
        out,
        "{prefix}{} {} {}",
        format_g17(v.x1),
        format_g17(v.x2),
        format_g17(v.x3)
    );
}

/// Wavefront OBJ text: `v` lines, then `vn` lines if present, then faces
/// (1-based; `f a//a b//b c//c` when normals are present).
pub fn obj_string(mesh: &Mesh) -> Result<String> {
    check_finite(mesh)?;
    let mut out = String::new();
    for v in &mesh.vertices {
        push_vec(&mut out, "v ", *v);
    }
    if let Some(normals) = &mesh.normals {
        for n in normals {
            push_vec(&mut out, "vn ", *n);
        }
    }
    for [a, b, c] in &mesh.faces {
        let (a, b, c) = (a + 1, b + 1, c + 1);
        let _ = if mesh.normals.is_some() {
            writeln!(out, "f {a}//{a} {b}//{b} {c}//{c}")
        } else {
            writeln!(out, "f {a} {b} {c}")
        };
    }
    Ok(out)
}

/// ASCII PLY 1.0 text with double-precision vertex properties.
pub fn ply_string(mesh: &Mesh) -> Result<String> {
    check_finite(mesh)?;
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "element vertex {}", mesh.vertices.len());
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    if mesh.normals.is_some() {
        out.push_str("property double nx\nproperty double ny\nproperty double nz\n");
    }
    let _ = writeln!(out, "element face {}", mesh.faces.len());
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for (k, v) in mesh.vertices.iter().enumerate() {
        let _ = write!(
            out,
            "{} {} {}",
            format_g17(v.x1),
            format_g17(v.x2),
            format_g17(v.x3)
        );
        if let Some(normals) = &mesh.normals {
            let n = normals[k];
            let _ = write!(
                out,
                " {} {} {}",
                format_g17(n.x1),
                format_g17(n.x2),
                format_g17(n.x3)
            );
        }
        out.push('\n');
    }
    for [a, b, c] in &mesh.faces {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    Ok(out)
}

pub fn export_obj<W: Write>(mesh: &Mesh, mut sink: W) -> Result<()> {
    let text = obj_string(mesh)?;
    sink.write_all(text.as_bytes())?;
    sink.flush()?;
    Ok(())
}

pub fn export_ply<W: Write>(mesh: &Mesh, mut sink: W) -> Result<()> {
    let text = ply_string(mesh)?;
    sink.write_all(text.as_bytes())?;
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn triangle() -> Mesh {
        Mesh {
            vertices: vec![
                RealVec3::new(0.0, 0.0, 0.0),
                RealVec3::new(1.0, 0.0, 0.0),
                RealVec3::new(0.0, 1.0, 0.0),
            ],
            normals: None,
            faces: vec![[0, 1, 2]],
            skipped: vec![],
        }
    }

    #[test]
    fn g17_matches_printf() {
        // reference strings from printf("%.17g")
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (2.0 / 3.0, "0.66666666666666663"),
            (0.1, "0.10000000000000001"),
            (1e-5, "1.0000000000000001e-05"),
            (1.5e-7, "1.4999999999999999e-07"),
            (1e17, "1e+17"),
            (123456789012345680.0, "1.2345678901234568e+17"),
            (12345678901234567.0, "12345678901234568"),
            (std::f64::consts::PI, "3.1415926535897931"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [1.0 / 3.0, -7.123456789e-12, 6.02214076e23, 1e-300, f64::MAX] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn single_triangle_obj() {
        let text = obj_string(&triangle()).unwrap();
        assert_eq!(text, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    }

    #[test]
    fn single_triangle_ply() {
        let text = ply_string(&triangle()).unwrap();
        let want = "ply\nformat ascii 1.0\nelement vertex 3\nproperty double x\n\
                    property double y\nproperty double z\nelement face 1\n\
                    property list uchar int vertex_indices\nend_header\n\
                    0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        assert_eq!(text, want);
    }

    #[test]
    fn refuses_non_finite_vertices() {
        let mut m = triangle();
        m.vertices[1].x2 = f64::NAN;
        assert!(matches!(obj_string(&m), Err(Error::NonFinite(1))));
        assert!(matches!(ply_string(&m), Err(Error::NonFinite(1))));
    }

    #[test]
    fn domain_validation() {
        assert!(ParamDomain::rectangle(1.0, 0.0, 0.0, 1.0, 4, 4).is_err());
        assert!(ParamDomain::rectangle(0.0, 1.0, 0.0, 1.0, 1, 4).is_err());
        assert!(ParamDomain::disk(0.0, c(0.0, 0.0), 4, 4).is_err());
        assert!(ParamDomain::disk(1.0, c(0.0, 0.0), 4, 4)
            .unwrap()
            .exclude(c(0.0, 0.0), 0.0)
            .is_err());
    }

    #[test]
    fn rectangle_points_are_row_major() {
        let d = ParamDomain::rectangle(0.0, 1.0, 0.0, 2.0, 3, 2).unwrap();
        let pts = d.points();
        assert_eq!(
            pts,
            vec![
                c(0.0, 0.0),
                c(0.5, 0.0),
                c(1.0, 0.0),
                c(0.0, 2.0),
                c(0.5, 2.0),
                c(1.0, 2.0)
            ]
        );
    }

    #[test]
    fn disk_points_are_rings() {
        let d = ParamDomain::disk(2.0, c(1.0, 0.0), 2, 4).unwrap();
        let pts = d.points();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], c(1.0, 0.0));
        assert!((pts[1] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((pts[2] - c(1.0, 1.0)).norm() < 1e-15);
        assert!((pts[5] - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn plane_unit_square_grid() {
        let d = WeierstrassData::parse_fg("1", "0").unwrap();
        let dom = ParamDomain::rectangle(0.0, 1.0, 0.0, 1.0, 2, 2).unwrap();
        let grid = sample_grid(&d, &dom).unwrap();
        let xs: Vec<RealVec3> = grid.entries.iter().map(|e| e.sample().unwrap().x).collect();
        let want = [
            RealVec3::new(0.0, 0.0, 0.0),
            RealVec3::new(1.0, 0.0, 0.0),
            RealVec3::new(0.0, -1.0, 0.0),
            RealVec3::new(1.0, -1.0, 0.0),
        ];
        for (x, w) in xs.iter().zip(want) {
            assert!((*x - w).max_abs() < 1e-15, "{x} vs {w}");
        }
        let mesh = triangulate(&grid).unwrap();
        assert_eq!(mesh.faces.len(), 2);
    }

    #[test]
    fn full_grid_face_count() {
        let d = WeierstrassData::parse_fg("1", "z").unwrap();
        for (nu, nv) in [(2, 2), (3, 5), (7, 4)] {
            let dom = ParamDomain::rectangle(-1.0, 1.0, -1.0, 1.0, nu, nv).unwrap();
            let mesh = triangulate(&sample_grid(&d, &dom).unwrap()).unwrap();
            assert_eq!(mesh.faces.len(), 2 * (nu - 1) * (nv - 1));
            assert_eq!(mesh.vertices.len(), nu * nv);
        }
    }

    #[test]
    fn enneper_disk_center_is_origin() {
        let d = WeierstrassData::parse_fg("1", "z").unwrap();
        let dom = ParamDomain::disk(1.0, c(0.0, 0.0), 4, 8).unwrap();
        let grid = sample_grid(&d, &dom).unwrap();
        assert_eq!(grid.entries[0].sample().unwrap().x, RealVec3::ZERO);
    }

    #[test]
    fn excluded_center_is_skipped() {
        let d = WeierstrassData::parse_phi("z^2 - 1", "i*(z^2 + 1)", "2*z").unwrap();
        let dom = ParamDomain::disk(1.0, c(0.0, 0.0), 4, 8)
            .unwrap()
            .exclude(c(0.0, 0.0), 0.1)
            .unwrap();
        let grid = sample_grid(&d, &dom).unwrap();
        assert_eq!(grid.skipped(), 1);
        assert_eq!(grid.entries[0].sample, Err(SkipReason::Excluded));
        let mesh = triangulate(&grid).unwrap();
        assert_eq!(mesh.skipped, vec![0]);
        // center fan lost, ring quads kept
        assert_eq!(mesh.faces.len(), 2 * 3 * 8);
    }

    #[test]
    fn skipped_center_of_three_by_three_leaves_nothing() {
        let d = WeierstrassData::parse_fg("1", "z").unwrap();
        let dom = ParamDomain::rectangle(-1.0, 1.0, -1.0, 1.0, 3, 3)
            .unwrap()
            .exclude(c(0.0, 0.0), 0.1)
            .unwrap();
        let grid = sample_grid(&d, &dom).unwrap();
        assert_eq!(grid.skipped(), 1);
        assert!(matches!(triangulate(&grid), Err(Error::EmptyMesh)));
    }

    #[test]
    fn all_skipped_is_an_error() {
        let d = WeierstrassData::parse_fg("1", "z").unwrap();
        let dom = ParamDomain::rectangle(-1.0, 1.0, -1.0, 1.0, 2, 2)
            .unwrap()
            .exclude(c(0.0, 0.0), 10.0)
            .unwrap();
        assert!(matches!(
            sample_grid(&d, &dom),
            Err(Error::AllSamplesSkipped(4))
        ));
    }

    #[test]
    fn error_policy_aborts_on_pole() {
        use crate::weierstrass::SingularityPolicy;
        let d = WeierstrassData::parse_fg("z^2", "1/z")
            .unwrap()
            .with_basepoint(c(0.5, 0.5));
        let dom = ParamDomain::disk(1.0, c(0.0, 0.0), 3, 6).unwrap();
        // skip-sample: the pole at the center is dropped
        let grid = sample_grid(&d, &dom).unwrap();
        assert!(matches!(
            grid.entries[0].sample,
            Err(SkipReason::Singular(_))
        ));
        let strict = d.with_policy(SingularityPolicy::new(1e-6, SingularBehavior::Error).unwrap());
        assert!(matches!(
            sample_grid(&strict, &dom),
            Err(Error::Weierstrass(_))
        ));
    }
}
