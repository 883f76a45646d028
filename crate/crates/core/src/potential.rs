//! Discretized layer/volume potentials and the boundary operator A.
//!
//! Quadrature is one-point (centroid) per panel; singular self-interactions
//! are regularized by equal-area-disc / equal-volume-ball closed forms, and
//! the static operator diagonal is fixed by the exact charge-balance column
//! identity. Assembly is deterministic: identical inputs give bit-identical
//! matrices.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Point, SurfaceMesh, VolumeGrid};
use crate::kernels::{disc_self_term, green, green_grad, FOUR_PI};

/// Complex surface density sampled at panel centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelDensity {
    values: Vec<Complex64>,
}

impl PanelDensity {
    pub fn new(mesh: &SurfaceMesh, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != mesh.panel_count() {
            return Err(Error::InvalidParameter(format!(
                "density has {} values but mesh has {} panels",
                values.len(),
                mesh.panel_count()
            )));
        }
        Ok(Self { values })
    }

    pub fn zeros(mesh: &SurfaceMesh) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); mesh.panel_count()],
        }
    }

    pub fn constant(mesh: &SurfaceMesh, c: Complex64) -> Self {
        Self {
            values: vec![c; mesh.panel_count()],
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Total charge: sum of density times panel area.
    pub fn total_charge(&self, mesh: &SurfaceMesh) -> Complex64 {
        self.values
            .iter()
            .zip(mesh.areas())
            .map(|(v, a)| v * a)
            .sum()
    }
}

/// Dense Nystrom matrix of a boundary operator at a fixed wavenumber.
#[derive(Debug, Clone)]
pub struct BoundaryOperatorMatrix {
    entries: Array2<Complex64>,
    wavenumber: f64,
}

impl BoundaryOperatorMatrix {
    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<Complex64> {
        self.entries
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Apply to a density sampled at centroids.
    pub fn apply(&self, density: &PanelDensity) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for s in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..n {
                acc += self.entries[(s, t)] * density.values()[t];
            }
            out[s] = acc;
        }
        out
    }
}

/// Free-space kernel g(x,y) = e^{ik|x−y|}/(4π|x−y|).
pub fn kernel_g(x: &Point, y: &Point, k: f64) -> Result<Complex64> {
    let r = (x - y).norm();
    if r == 0.0 {
        return Err(Error::SingularKernel);
    }
    Ok(green(r, k))
}

/// Relative tolerance deciding that an evaluation point coincides with a
/// panel centroid (the on-surface collocation case).
fn self_panel(mesh: &SurfaceMesh, x: &Point) -> Option<usize> {
    for (j, c) in mesh.centroids().iter().enumerate() {
        if (x - c).norm_squared() < 1e-18 * mesh.areas()[j] {
            return Some(j);
        }
    }
    None
}

/// Single-layer potential of `density` evaluated at `x`, which may be off the
/// surface or at a panel centroid (disc-regularized self term).
pub fn single_layer(mesh: &SurfaceMesh, density: &PanelDensity, k: f64, x: &Point) -> Complex64 {
    let own = self_panel(mesh, x);
    let mut acc = Complex64::new(0.0, 0.0);
    for (t, c) in mesh.centroids().iter().enumerate() {
        if Some(t) == own {
            acc += disc_self_term(mesh.areas()[t], k) * density.values()[t];
        } else {
            acc += green((x - c).norm(), k) * density.values()[t] * mesh.areas()[t];
        }
    }
    acc
}

/// Nystrom matrix of the single-layer operator collocated at centroids
/// (quadrature weights folded in, disc-regularized diagonal).
pub fn assemble_single_layer(mesh: &SurfaceMesh, k: f64) -> Array2<Complex64> {
    let n = mesh.panel_count();
    let cents = mesh.centroids();
    let areas = mesh.areas();
    let mut m = Array2::zeros((n, n));
    for s in 0..n {
        for t in 0..n {
            m[(s, t)] = if s == t {
                disc_self_term(areas[t], k)
            } else {
                green((cents[s] - cents[t]).norm(), k) * areas[t]
            };
        }
    }
    m
}

/// Cross-body single-layer block: potentials of source panels evaluated at
/// the target mesh centroids (no self terms; meshes must be disjoint).
pub fn assemble_single_layer_cross(
    target: &SurfaceMesh,
    source: &SurfaceMesh,
    k: f64,
) -> Array2<Complex64> {
    let mut m = Array2::zeros((target.panel_count(), source.panel_count()));
    for (s, cs) in target.centroids().iter().enumerate() {
        for (t, ct) in source.centroids().iter().enumerate() {
            m[(s, t)] = green((cs - ct).norm(), k) * source.areas()[t];
        }
    }
    m
}

/// Static kernel of A: 2 ∂g₀(s,t)/∂N_s, evaluated between centroids.
fn a0_kernel(cents: &[Point], normals: &[crate::geometry::Vector], s: usize, t: usize) -> f64 {
    let d = cents[s] - cents[t];
    let r2 = d.norm_squared();
    let r = r2.sqrt();
    -2.0 * d.dot(&normals[s]) / (FOUR_PI * r2 * r)
}

/// Boundary operator A (normal derivative of the single layer, factor 2) at
/// wavenumber `k`. The static diagonal is fixed by the exact column identity
/// Σ_s w_s (A₀)_{st} = −1; for k > 0 the smooth remainder kernel is added
/// with zero diagonal.
pub fn assemble_a(mesh: &SurfaceMesh, k: f64) -> BoundaryOperatorMatrix {
    let n = mesh.panel_count();
    let cents = mesh.centroids();
    let normals = mesh.normals();
    let areas = mesh.areas();

    // static kernel values (no quadrature weight yet)
    let mut k0 = Array2::<f64>::zeros((n, n));
    for s in 0..n {
        for t in 0..n {
            if s != t {
                k0[(s, t)] = a0_kernel(cents, normals, s, t);
            }
        }
    }
    for t in 0..n {
        let mut col = 0.0;
        for s in 0..n {
            if s != t {
                col += areas[s] * k0[(s, t)];
            }
        }
        k0[(t, t)] = (-1.0 - col) / areas[t];
    }

    let mut entries = Array2::<Complex64>::zeros((n, n));
    for s in 0..n {
        for t in 0..n {
            entries[(s, t)] = Complex64::new(k0[(s, t)] * areas[t], 0.0);
        }
    }

    if k > 0.0 {
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let d = cents[s] - cents[t];
                let r = d.norm();
                let dn = d.dot(&normals[s]) / r;
                let gp = (Complex64::i() * k * r).exp() * Complex64::new(-1.0, k * r)
                    / (FOUR_PI * r * r);
                let gp0 = -1.0 / (FOUR_PI * r * r);
                entries[(s, t)] += 2.0 * (gp - gp0) * dn * areas[t];
            }
        }
    }

    BoundaryOperatorMatrix {
        entries,
        wavenumber: k,
    }
}

/// Volume potential κ ∫_D g(x,y) u(y) dy by midpoint quadrature over grid
/// cells; a cell whose center lies within half a lattice spacing of `x` is
/// omitted (its contribution is O(h²)).
pub fn volume_potential(
    grid: &VolumeGrid,
    u_values: &[Complex64],
    k: f64,
    kappa: Complex64,
    x: &Point,
) -> Complex64 {
    if kappa == Complex64::new(0.0, 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    let skip = 0.5 * grid.spacing();
    let mut acc = Complex64::new(0.0, 0.0);
    for ((c, u), vol) in grid.cells().iter().zip(u_values).zip(grid.cell_volumes()) {
        let r = (x - c).norm();
        if r < skip {
            continue;
        }
        acc += green(r, k) * u * *vol;
    }
    kappa * acc
}

/// Normal derivative of the volume potential at panel centroids:
/// κ ∂/∂N_s ∫_D g(s,y) u(y) dy.
pub fn normal_derivative_volume_potential(
    grid: &VolumeGrid,
    u_values: &[Complex64],
    k: f64,
    kappa: Complex64,
    mesh: &SurfaceMesh,
) -> PanelDensity {
    let mut values = vec![Complex64::new(0.0, 0.0); mesh.panel_count()];
    if kappa == Complex64::new(0.0, 0.0) {
        return PanelDensity { values };
    }
    for (s, (cent, normal)) in mesh.centroids().iter().zip(mesh.normals()).enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((c, u), vol) in grid.cells().iter().zip(u_values).zip(grid.cell_volumes()) {
            let d = cent - c;
            let g = green_grad(&d, k);
            acc += (g[0] * normal.x + g[1] * normal.y + g[2] * normal.z) * u * *vol;
        }
        values[s] = kappa * acc;
    }
    PanelDensity { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_sphere_mesh, make_volume_grid};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn kernel_static_and_phase_values() {
        let x = Point::new(0.0, 0.0, 0.0);
        let y = Point::new(1.0, 0.0, 0.0);
        let g = kernel_g(&x, &y, 0.0).unwrap();
        assert_relative_eq!(g.re, 1.0 / (4.0 * PI), epsilon = 1e-15);
        assert_relative_eq!(g.im, 0.0, epsilon = 1e-15);

        let y2 = Point::new(PI, 0.0, 0.0);
        let g2 = kernel_g(&x, &y2, 1.0).unwrap();
        assert_relative_eq!(g2.re, -1.0 / (4.0 * PI * PI), epsilon = 1e-15);
        assert_relative_eq!(g2.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn kernel_rejects_coincident_points() {
        let x = Point::new(0.5, 0.5, 0.5);
        assert!(matches!(kernel_g(&x, &x, 1.0), Err(Error::SingularKernel)));
    }

    proptest! {
        #[test]
        fn kernel_symmetry(
            ax in -2.0f64..2.0, ay in -2.0f64..2.0, az in -2.0f64..2.0,
            bx in 3.0f64..5.0, by in -2.0f64..2.0, bz in -2.0f64..2.0,
            k in 0.0f64..3.0,
        ) {
            let x = Point::new(ax, ay, az);
            let y = Point::new(bx, by, bz);
            let g1 = kernel_g(&x, &y, k).unwrap();
            let g2 = kernel_g(&y, &x, k).unwrap();
            prop_assert!((g1 - g2).norm() < 1e-15);
        }

        #[test]
        fn hermitian_symmetry_of_single_layer(k in 0.1f64..2.0) {
            // conjugating k conjugates the potential for real densities
            let mesh = make_sphere_mesh(1.0, 1).unwrap();
            let density = PanelDensity::constant(&mesh, Complex64::new(1.0, 0.0));
            let x = Point::new(3.0, 0.5, -0.2);
            let pos = single_layer(&mesh, &density, k, &x);
            let neg = single_layer(&mesh, &density, -k, &x);
            prop_assert!((pos.conj() - neg).norm() < 1e-12 * pos.norm());
        }
    }

    #[test]
    fn shell_potential_interior_and_exterior() {
        // unit charge density on the unit sphere, k = 0: potential is a = 1
        // inside and a²/|x| outside
        let mesh = make_sphere_mesh(1.0, 3).unwrap();
        let density = PanelDensity::constant(&mesh, Complex64::new(1.0, 0.0));
        let inside = single_layer(&mesh, &density, 0.0, &Point::new(0.0, 0.0, 0.0));
        assert_relative_eq!(inside.re, 1.0, max_relative = 0.01);
        let outside = single_layer(&mesh, &density, 0.0, &Point::new(10.0, 0.0, 0.0));
        assert_relative_eq!(outside.re, 0.1, max_relative = 0.01);
    }

    #[test]
    fn zero_density_gives_zero_potential() {
        let mesh = make_sphere_mesh(1.0, 2).unwrap();
        let density = PanelDensity::zeros(&mesh);
        let v = single_layer(&mesh, &density, 1.0, &Point::new(0.3, 0.3, 0.3));
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn a0_column_identity_and_dimension() {
        let mesh = make_sphere_mesh(1.0, 3).unwrap();
        let a0 = assemble_a(&mesh, 0.0);
        assert_eq!(a0.dim(), mesh.panel_count());
        // the enforced identity: Σ_s w_s k0(s,t) = −1, i.e. the area-weighted
        // column sums of the kernel equal −1 (entries carry the w_t factor)
        let areas = mesh.areas();
        for t in (0..a0.dim()).step_by(97) {
            let mut col = 0.0;
            for s in 0..a0.dim() {
                col += areas[s] * a0.entries()[(s, t)].re / areas[t];
            }
            assert_relative_eq!(col, -1.0, max_relative = 2e-12);
        }
        // discretization check in the row direction: A₀ applied to the
        // constant density equals −1 on the sphere within 2%
        let ones = PanelDensity::constant(&mesh, Complex64::new(1.0, 0.0));
        for v in a0.apply(&ones) {
            assert_relative_eq!(v.re, -1.0, max_relative = 0.02);
        }
    }

    #[test]
    fn a_minus_a0_is_first_order_in_k() {
        let mesh = make_sphere_mesh(1.0, 2).unwrap();
        let a0 = assemble_a(&mesh, 0.0);
        let norm_diff = |k: f64| -> f64 {
            let ak = assemble_a(&mesh, k);
            (ak.entries() - a0.entries())
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let d1 = norm_diff(0.2);
        let d2 = norm_diff(0.1);
        let ratio = d1 / d2;
        // ||A - A0|| = o(ka): halving k must reduce the norm by at least half
        // (the smooth-remainder kernel actually decays quadratically)
        assert!(
            ratio >= 1.8,
            "halving k should at least halve ||A-A0||, ratio {}",
            ratio
        );
    }

    #[test]
    fn assembly_is_deterministic() {
        let mesh = make_sphere_mesh(1.0, 2).unwrap();
        let a1 = assemble_a(&mesh, 0.4);
        let a2 = assemble_a(&mesh, 0.4);
        assert_eq!(a1.entries(), a2.entries());
        let g1 = assemble_single_layer(&mesh, 0.4);
        let g2 = assemble_single_layer(&mesh, 0.4);
        assert_eq!(g1, g2);
    }

    #[test]
    fn newtonian_ball_potential() {
        let mesh = make_sphere_mesh(1.0, 3).unwrap();
        let grid = make_volume_grid(&mesh, 20).unwrap();
        let u = vec![Complex64::new(1.0, 0.0); grid.cell_count()];
        let kappa = Complex64::new(1.0, 0.0);
        // center: κ a²/2
        let center = volume_potential(&grid, &u, 0.0, kappa, &Point::new(0.0, 0.0, 0.0));
        assert_relative_eq!(center.re, 0.5, max_relative = 0.03);
        // far: κ V/(4π·10) = κ/30
        let far = volume_potential(&grid, &u, 0.0, kappa, &Point::new(10.0, 0.0, 0.0));
        assert_relative_eq!(far.re, 1.0 / 30.0, max_relative = 0.02);
        // κ = 0 exactly zero
        let zero = volume_potential(&grid, &u, 0.0, Complex64::new(0.0, 0.0), &Point::new(0.0, 0.0, 0.0));
        assert_eq!(zero, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn normal_derivative_of_ball_potential() {
        let mesh = make_sphere_mesh(1.0, 2).unwrap();
        let grid = make_volume_grid(&mesh, 40).unwrap();
        let u = vec![Complex64::new(1.0, 0.0); grid.cell_count()];
        let kappa = Complex64::new(2.0, 0.0);
        let nd = normal_derivative_volume_potential(&grid, &u, 0.0, kappa, &mesh);
        // interior Newtonian potential κ(3a²−r²)/6, outward derivative −κa/3
        for v in nd.values() {
            assert_relative_eq!(v.re, -2.0 / 3.0, max_relative = 0.05);
        }
        // κ = 0 → identically zero
        let zero = normal_derivative_volume_potential(&grid, &u, 0.0, Complex64::new(0.0, 0.0), &mesh);
        assert!(zero.values().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn normal_derivative_scales_with_mesh() {
        let mesh1 = make_sphere_mesh(1.0, 1).unwrap();
        let mesh2 = make_sphere_mesh(2.0, 1).unwrap();
        let g1 = make_volume_grid(&mesh1, 10).unwrap();
        let g2 = make_volume_grid(&mesh2, 10).unwrap();
        let u1 = vec![Complex64::new(1.0, 0.0); g1.cell_count()];
        let u2 = vec![Complex64::new(1.0, 0.0); g2.cell_count()];
        let kappa = Complex64::new(1.0, 0.0);
        let d1 = normal_derivative_volume_potential(&g1, &u1, 0.0, kappa, &mesh1);
        let d2 = normal_derivative_volume_potential(&g2, &u2, 0.0, kappa, &mesh2);
        let m1: f64 = d1.values().iter().map(|v| v.norm()).sum::<f64>() / d1.values().len() as f64;
        let m2: f64 = d2.values().iter().map(|v| v.norm()).sum::<f64>() / d2.values().len() as f64;
        assert_relative_eq!(m2 / m1, 2.0, max_relative = 0.02);
    }

    #[test]
    fn single_layer_jump_relation() {
        // exterior normal derivative of the single layer approaches (Aσ−σ)/2
        let mesh = make_sphere_mesh(1.0, 3).unwrap();
        let density = PanelDensity::constant(&mesh, Complex64::new(1.0, 0.0));
        let k = 0.0;
        let a = assemble_a(&mesh, k);
        let jump = a.apply(&density);
        let panel = 7;
        let c = mesh.centroids()[panel];
        let n = mesh.normals()[panel];
        let expected = (jump[panel] - density.values()[panel]) / 2.0;
        let mut prev_err = f64::INFINITY;
        for offset in [0.2, 0.1] {
            let xp = c + n * offset;
            let xm = c + n * (offset * 0.5);
            let fd = (single_layer(&mesh, &density, k, &xp)
                - single_layer(&mesh, &density, k, &xm))
                / (offset * 0.5);
            let err = (fd - expected).norm();
            assert!(err < prev_err || err < 0.05 * expected.norm());
            prev_err = err;
        }
    }
}
