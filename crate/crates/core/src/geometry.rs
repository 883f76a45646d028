//! Triangulated surfaces and interior volume grids for small bodies.
//!
//! Meshes are flat-panel triangulations used as Nystrom quadrature devices:
//! every panel carries its area, centroid and outward unit normal. Sphere
//! meshes are icosahedral subdivisions with the vertex radius calibrated so
//! the flat-panel area equals the analytic sphere area at every refinement
//! level; ellipsoids are affine images of the calibrated sphere.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::{Point3, Rotation3, Vector3};

use crate::error::{Error, Result};

pub type Point = Point3<f64>;
pub type Vector = Vector3<f64>;

/// Axis-aligned box, used as the particle/medium domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub min: Point,
    pub max: Point,
}

impl Box3 {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if !(min.x < max.x && min.y < max.y && min.z < max.z) {
            return Err(Error::InvalidParameter(format!(
                "box min {:?} must be componentwise below max {:?}",
                min, max
            )));
        }
        Ok(Self { min, max })
    }

    pub fn unit() -> Self {
        Self {
            min: Point::new(0.0, 0.0, 0.0),
            max: Point::new(1.0, 1.0, 1.0),
        }
    }

    pub fn extents(&self) -> Vector {
        self.max - self.min
    }

    pub fn center(&self) -> Point {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn volume(&self) -> f64 {
        let e = self.extents();
        e.x * e.y * e.z
    }

    pub fn contains(&self, p: &Point) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }
}

/// Closed triangulated particle boundary.
///
/// Invariants established at construction: watertight (every edge shared by
/// exactly two panels with opposite orientation), positive signed volume,
/// strictly positive panel areas, unit outward normals.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    vertices: Vec<Point>,
    panels: Vec<[usize; 3]>,
    panel_area: Vec<f64>,
    panel_centroid: Vec<Point>,
    panel_normal: Vec<Vector>,
}

impl SurfaceMesh {
    /// Build a mesh from raw vertices and counter-clockwise (seen from
    /// outside) vertex-index triples, validating all invariants.
    pub fn from_raw(vertices: Vec<Point>, panels: Vec<[usize; 3]>) -> Result<Self> {
        if panels.is_empty() {
            return Err(Error::MeshFile("mesh has no panels".into()));
        }
        let nv = vertices.len();
        for (i, p) in panels.iter().enumerate() {
            for &v in p {
                if v >= nv {
                    return Err(Error::MeshFile(format!(
                        "panel {} references vertex {} but only {} vertices exist",
                        i, v, nv
                    )));
                }
            }
        }
        check_watertight(&panels)?;

        let mut panel_area = Vec::with_capacity(panels.len());
        let mut panel_centroid = Vec::with_capacity(panels.len());
        let mut panel_normal = Vec::with_capacity(panels.len());
        for (i, &[a, b, c]) in panels.iter().enumerate() {
            let (p0, p1, p2) = (vertices[a], vertices[b], vertices[c]);
            let cross = (p1 - p0).cross(&(p2 - p0));
            let doubled = cross.norm();
            let area = 0.5 * doubled;
            if !(area.is_finite() && area > 0.0) {
                return Err(Error::DegeneratePanel { index: i, area });
            }
            panel_area.push(area);
            panel_centroid.push(Point::from((p0.coords + p1.coords + p2.coords) / 3.0));
            panel_normal.push(cross / doubled);
        }

        let mesh = Self {
            vertices,
            panels,
            panel_area,
            panel_centroid,
            panel_normal,
        };
        let vol = mesh.volume();
        if !(vol.is_finite() && vol > 0.0) {
            return Err(Error::BadOrientation(vol));
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn panels(&self) -> &[[usize; 3]] {
        &self.panels
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    pub fn areas(&self) -> &[f64] {
        &self.panel_area
    }

    pub fn centroids(&self) -> &[Point] {
        &self.panel_centroid
    }

    pub fn normals(&self) -> &[Vector] {
        &self.panel_normal
    }

    /// Sum of panel areas.
    pub fn area(&self) -> f64 {
        self.panel_area.iter().sum()
    }

    /// Divergence-theorem signed volume.
    pub fn volume(&self) -> f64 {
        self.panels
            .iter()
            .map(|&[a, b, c]| {
                let (p0, p1, p2) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                p0.coords.dot(&p1.coords.cross(&p2.coords)) / 6.0
            })
            .sum()
    }

    /// Centroid of the enclosed solid.
    pub fn barycenter(&self) -> Point {
        let mut weighted = Vector::zeros();
        let mut vol = 0.0;
        for &[a, b, c] in &self.panels {
            let (p0, p1, p2) = (self.vertices[a], self.vertices[b], self.vertices[c]);
            let v = p0.coords.dot(&p1.coords.cross(&p2.coords)) / 6.0;
            // tetrahedron (0, p0, p1, p2) centroid
            weighted += v * (p0.coords + p1.coords + p2.coords) / 4.0;
            vol += v;
        }
        Point::from(weighted / vol)
    }

    /// Half the diameter of the vertex set, the size parameter `a`.
    pub fn half_diameter(&self) -> f64 {
        let mut max_sq = 0.0f64;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                max_sq = max_sq.max((p - q).norm_squared());
            }
        }
        0.5 * max_sq.sqrt()
    }

    pub fn bounding_box(&self) -> Box3 {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            for i in 0..3 {
                min[i] = min[i].min(v[i]);
                max[i] = max[i].max(v[i]);
            }
        }
        Box3 { min, max }
    }

    /// Uniformly scaled copy.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter(format!("scale {} must be > 0", s)));
        }
        let verts = self.vertices.iter().map(|p| Point::from(p.coords * s)).collect();
        Self::from_raw(verts, self.panels.clone())
    }

    /// Rigidly rotated copy.
    pub fn rotated(&self, r: &Rotation3<f64>) -> Self {
        let verts = self.vertices.iter().map(|p| r * p).collect();
        Self::from_raw(verts, self.panels.clone()).expect("rotation preserves mesh invariants")
    }

    /// Translated copy.
    pub fn translated(&self, t: &Vector) -> Self {
        let verts = self.vertices.iter().map(|p| p + t).collect();
        Self::from_raw(verts, self.panels.clone()).expect("translation preserves mesh invariants")
    }

    /// Generalized winding number test: true when `p` is inside the closed
    /// surface (solid-angle sum over panels exceeds 2π).
    pub fn contains(&self, p: &Point) -> bool {
        let mut total = 0.0;
        for &[a, b, c] in &self.panels {
            total += triangle_solid_angle(
                &(self.vertices[a] - p),
                &(self.vertices[b] - p),
                &(self.vertices[c] - p),
            );
        }
        total > 2.0 * std::f64::consts::PI
    }
}

/// Van Oosterom-Strackee signed solid angle of a triangle seen from the origin.
fn triangle_solid_angle(a: &Vector, b: &Vector, c: &Vector) -> f64 {
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let numer = a.dot(&b.cross(c));
    let denom = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * numer.atan2(denom)
}

fn check_watertight(panels: &[[usize; 3]]) -> Result<()> {
    // key: undirected edge; value: (forward count, backward count)
    let mut edges: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for &[a, b, c] in panels {
        for (u, v) in [(a, b), (b, c), (c, a)] {
            let (key, fwd) = if u < v { ((u, v), true) } else { ((v, u), false) };
            let e = edges.entry(key).or_insert((0, 0));
            if fwd {
                e.0 += 1;
            } else {
                e.1 += 1;
            }
        }
    }
    for (&(a, b), &(fwd, bwd)) in &edges {
        if fwd != 1 || bwd != 1 {
            return Err(Error::NotWatertight { a, b, count: fwd + bwd });
        }
    }
    Ok(())
}

const MAX_REFINEMENT: usize = 8;

/// Unit icosahedron vertices/panels (circumradius 1, outward CCW panels).
fn icosahedron() -> (Vec<Point>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, phi, 0.0], [1.0, phi, 0.0], [-1.0, -phi, 0.0], [1.0, -phi, 0.0],
        [0.0, -1.0, phi], [0.0, 1.0, phi], [0.0, -1.0, -phi], [0.0, 1.0, -phi],
        [phi, 0.0, -1.0], [phi, 0.0, 1.0], [-phi, 0.0, -1.0], [-phi, 0.0, 1.0],
    ];
    let norm = (1.0 + phi * phi).sqrt();
    let vertices = raw
        .iter()
        .map(|v| Point::new(v[0] / norm, v[1] / norm, v[2] / norm))
        .collect();
    let panels = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    (vertices, panels)
}

fn subdivide(vertices: &mut Vec<Point>, panels: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
    let mut out = Vec::with_capacity(panels.len() * 4);
    let mut mid = |i: usize, j: usize, verts: &mut Vec<Point>| -> usize {
        let key = if i < j { (i, j) } else { (j, i) };
        *midpoints.entry(key).or_insert_with(|| {
            let m = (verts[i].coords + verts[j].coords) / 2.0;
            verts.push(Point::from(m / m.norm()));
            verts.len() - 1
        })
    };
    for &[a, b, c] in panels {
        let ab = mid(a, b, vertices);
        let bc = mid(b, c, vertices);
        let ca = mid(c, a, vertices);
        out.push([a, ab, ca]);
        out.push([b, bc, ab]);
        out.push([c, ca, bc]);
        out.push([ab, bc, ca]);
    }
    out
}

/// Unit icosphere with the vertex radius calibrated so the flat-panel area
/// equals 4π exactly at this refinement level.
fn calibrated_unit_icosphere(refinement: usize) -> (Vec<Point>, Vec<[usize; 3]>) {
    let (mut vertices, mut panels) = icosahedron();
    for _ in 0..refinement {
        panels = subdivide(&mut vertices, &panels);
    }
    let flat_area: f64 = panels
        .iter()
        .map(|&[a, b, c]| {
            0.5 * (vertices[b] - vertices[a])
                .cross(&(vertices[c] - vertices[a]))
                .norm()
        })
        .sum();
    let s = (4.0 * std::f64::consts::PI / flat_area).sqrt();
    for v in &mut vertices {
        v.coords *= s;
    }
    (vertices, panels)
}

/// Icosahedral sphere mesh with `20 * 4^refinement` panels. Vertices lie on a
/// common sphere whose radius is calibrated so the mesh area is 4πr² exactly.
pub fn make_sphere_mesh(radius: f64, refinement: usize) -> Result<SurfaceMesh> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sphere radius {} must be > 0",
            radius
        )));
    }
    if refinement > MAX_REFINEMENT {
        return Err(Error::RefinementTooLarge(refinement));
    }
    let (mut vertices, panels) = calibrated_unit_icosphere(refinement);
    for v in &mut vertices {
        v.coords *= radius;
    }
    SurfaceMesh::from_raw(vertices, panels)
}

/// Ellipsoid mesh: the calibrated unit icosphere mapped affinely onto the
/// given semi-axes.
pub fn make_ellipsoid_mesh(semi_axes: [f64; 3], refinement: usize) -> Result<SurfaceMesh> {
    for ax in semi_axes {
        if !(ax.is_finite() && ax > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "semi-axis {} must be > 0",
                ax
            )));
        }
    }
    if refinement > MAX_REFINEMENT {
        return Err(Error::RefinementTooLarge(refinement));
    }
    let (mut vertices, panels) = calibrated_unit_icosphere(refinement);
    for v in &mut vertices {
        v.x *= semi_axes[0];
        v.y *= semi_axes[1];
        v.z *= semi_axes[2];
    }
    SurfaceMesh::from_raw(vertices, panels)
}

/// Sum of panel areas.
pub fn mesh_area(mesh: &SurfaceMesh) -> f64 {
    mesh.area()
}

/// Divergence-theorem signed volume.
pub fn mesh_volume(mesh: &SurfaceMesh) -> f64 {
    mesh.volume()
}

/// Interior quadrature grid: a clipped regular lattice of cell centers.
#[derive(Debug, Clone)]
pub struct VolumeGrid {
    cells: Vec<Point>,
    cell_volume: Vec<f64>,
    spacing: f64,
}

impl VolumeGrid {
    pub fn cells(&self) -> &[Point] {
        &self.cells
    }

    pub fn cell_volumes(&self) -> &[f64] {
        &self.cell_volume
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Lattice pitch.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn total_volume(&self) -> f64 {
        self.cell_volume.iter().sum()
    }
}

/// Regular lattice of cell centers strictly inside the mesh; `resolution`
/// cells span the longest bounding-box edge.
pub fn make_volume_grid(mesh: &SurfaceMesh, resolution: usize) -> Result<VolumeGrid> {
    if resolution == 0 {
        return Err(Error::InvalidParameter(
            "volume grid resolution must be >= 1".into(),
        ));
    }
    let bb = mesh.bounding_box();
    let ext = bb.extents();
    let h = ext.x.max(ext.y).max(ext.z) / resolution as f64;
    let counts = [
        (ext.x / h).ceil() as usize,
        (ext.y / h).ceil() as usize,
        (ext.z / h).ceil() as usize,
    ];
    let mut cells = Vec::new();
    for ix in 0..counts[0] {
        for iy in 0..counts[1] {
            for iz in 0..counts[2] {
                let p = Point::new(
                    bb.min.x + (ix as f64 + 0.5) * h,
                    bb.min.y + (iy as f64 + 0.5) * h,
                    bb.min.z + (iz as f64 + 0.5) * h,
                );
                if mesh.contains(&p) {
                    cells.push(p);
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "volume grid resolution {} produced no interior cells",
            resolution
        )));
    }
    let vol = h * h * h;
    let n = cells.len();
    Ok(VolumeGrid {
        cells,
        cell_volume: vec![vol; n],
        spacing: h,
    })
}

/// Parse the ASCII triangle-list format: line 1 `V F`, then V lines `x y z`,
/// then F lines `i j k` (0-based, counter-clockwise seen from outside).
pub fn parse_mesh_str(src: &str) -> Result<SurfaceMesh> {
    let mut tokens = src.split_whitespace();
    let mut next = |what: &str| -> Result<&str> {
        tokens
            .next()
            .ok_or_else(|| Error::MeshFile(format!("unexpected end of file, expected {}", what)))
    };
    let nv: usize = next("vertex count")?
        .parse()
        .map_err(|e| Error::MeshFile(format!("bad vertex count: {}", e)))?;
    let nf: usize = next("panel count")?
        .parse()
        .map_err(|e| Error::MeshFile(format!("bad panel count: {}", e)))?;
    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let mut coord = [0.0; 3];
        for c in &mut coord {
            *c = next("vertex coordinate")?
                .parse()
                .map_err(|e| Error::MeshFile(format!("vertex {}: {}", i, e)))?;
        }
        vertices.push(Point::new(coord[0], coord[1], coord[2]));
    }
    let mut panels = Vec::with_capacity(nf);
    for i in 0..nf {
        let mut idx = [0usize; 3];
        for v in &mut idx {
            *v = next("panel index")?
                .parse()
                .map_err(|e| Error::MeshFile(format!("panel {}: {}", i, e)))?;
        }
        panels.push(idx);
    }
    if tokens.next().is_some() {
        return Err(Error::MeshFile("trailing tokens after panel list".into()));
    }
    SurfaceMesh::from_raw(vertices, panels)
}

/// Load a mesh from an ASCII triangle-list file.
pub fn load_mesh(path: &Path) -> Result<SurfaceMesh> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::MeshFile(format!("{}: {}", path.display(), e)))?;
    parse_mesh_str(&src)
}
