//! Boundary-element oracle: asymptotics-free discretized solutions of the
//! one- and few-body scattering problems. Every closed-form amplitude in
//! this crate is validated against these solves at desk scale.
//!
//! Not a general-purpose BEM package: dense assembly only, no interior
//! resonance treatment (the ka guard keeps us far below the first spurious
//! resonance), first-kind Dirichlet accepted with a monitored condition
//! estimate.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Point, SurfaceMesh, Vector, VolumeGrid};
use crate::incident::IncidentField;
use crate::kernels::{ball_self_term, green, green_grad, FOUR_PI};
use crate::linalg;
use crate::potential::{
    assemble_a, assemble_single_layer, assemble_single_layer_cross, PanelDensity,
};

/// Validity and diagnostics knobs for the oracle solvers.
#[derive(Debug, Clone)]
pub struct BemConfig {
    /// Reject problems with k·a above this (small-body validity guard).
    pub max_ka: f64,
    /// Estimate and report the condition number of the system.
    pub check_condition: bool,
}

impl Default for BemConfig {
    fn default() -> Self {
        Self {
            max_ka: 0.5,
            check_condition: true,
        }
    }
}

/// Interior field of a transmission body on its volume grid.
#[derive(Debug, Clone)]
pub struct InteriorField {
    pub grid: VolumeGrid,
    pub values: Vec<Complex64>,
    pub kappa: Complex64,
}

/// Per-body part of a BEM solution.
#[derive(Debug, Clone)]
pub struct BemBody {
    pub mesh: SurfaceMesh,
    pub density: PanelDensity,
    pub interior: Option<InteriorField>,
}

impl BemBody {
    /// Surface-integrated charge Σ σ · area.
    pub fn total_charge(&self) -> Complex64 {
        self.density.total_charge(&self.mesh)
    }
}

/// Solved boundary densities (and interior values for transmission).
#[derive(Debug, Clone)]
pub struct BemSolution {
    pub bodies: Vec<BemBody>,
    pub k: f64,
    /// Reciprocal condition estimate of the discrete system, when requested.
    pub rcond: Option<f64>,
    /// Relative residual of the discrete system.
    pub residual: f64,
}

fn guard_ka(meshes: &[&SurfaceMesh], k: f64, config: &BemConfig) -> Result<()> {
    for mesh in meshes {
        let ka = k * mesh.half_diameter();
        if ka > config.max_ka {
            return Err(Error::InvalidParameter(format!(
                "ka = {:.3} exceeds the small-body validity guard {:.3}",
                ka, config.max_ka
            )));
        }
    }
    Ok(())
}

fn incident_on_panels(incident: &IncidentField, mesh: &SurfaceMesh) -> Vec<Complex64> {
    mesh.centroids().iter().map(|c| incident.value(c)).collect()
}

fn incident_normal_derivative(incident: &IncidentField, mesh: &SurfaceMesh) -> Vec<Complex64> {
    mesh.centroids()
        .iter()
        .zip(mesh.normals())
        .map(|(c, n)| {
            let g = incident.gradient(c);
            g[0] * n.x + g[1] * n.y + g[2] * n.z
        })
        .collect()
}

/// First-kind single-layer solve for soft bodies: ∫ g σ = −u0 collocated at
/// panel centroids, with cross-body kernel blocks for several bodies.
pub fn solve_dirichlet_bem(
    meshes: &[SurfaceMesh],
    k: f64,
    incident: &IncidentField,
    config: &BemConfig,
) -> Result<BemSolution> {
    if meshes.is_empty() {
        return Err(Error::InvalidParameter("no meshes supplied".into()));
    }
    let refs: Vec<&SurfaceMesh> = meshes.iter().collect();
    guard_ka(&refs, k, config)?;

    let sizes: Vec<usize> = meshes.iter().map(|m| m.panel_count()).collect();
    let total: usize = sizes.iter().sum();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect();

    let mut system = Array2::<Complex64>::zeros((total, total));
    for (i, mi) in meshes.iter().enumerate() {
        for (j, mj) in meshes.iter().enumerate() {
            let block = if i == j {
                assemble_single_layer(mi, k)
            } else {
                assemble_single_layer_cross(mi, mj, k)
            };
            for (r, row) in block.outer_iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    system[(offsets[i] + r, offsets[j] + c)] = *v;
                }
            }
        }
    }
    let mut rhs = Array1::<Complex64>::zeros(total);
    for (i, mesh) in meshes.iter().enumerate() {
        for (s, u) in incident_on_panels(incident, mesh).into_iter().enumerate() {
            rhs[offsets[i] + s] = -u;
        }
    }

    let report = linalg::solve_dense(system, rhs, config.check_condition)?;
    let bodies = meshes
        .iter()
        .enumerate()
        .map(|(i, mesh)| {
            let values = report.x.slice(ndarray::s![offsets[i]..offsets[i] + sizes[i]]).to_vec();
            Ok(BemBody {
                mesh: mesh.clone(),
                density: PanelDensity::new(mesh, values)?,
                interior: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BemSolution {
        bodies,
        k,
        rcond: report.rcond,
        residual: report.residual,
    })
}

/// Second-kind impedance solve for one body (ζ = 0 is the hard/Neumann case).
pub fn solve_impedance_bem(
    mesh: &SurfaceMesh,
    k: f64,
    zeta: Complex64,
    incident: &IncidentField,
    config: &BemConfig,
) -> Result<BemSolution> {
    solve_impedance_bem_multi(std::slice::from_ref(mesh), k, &[zeta], incident, config)
}

/// Multi-body impedance/Neumann solve. On body i the collocated equation is
/// u0N − ζᵢ u0 + [Σ_j A_ij σ_j − σ_i]/2 − ζᵢ Σ_j G_ij σ_j = 0.
pub fn solve_impedance_bem_multi(
    meshes: &[SurfaceMesh],
    k: f64,
    zetas: &[Complex64],
    incident: &IncidentField,
    config: &BemConfig,
) -> Result<BemSolution> {
    if meshes.is_empty() || meshes.len() != zetas.len() {
        return Err(Error::InvalidParameter(
            "need equally many meshes and impedances".into(),
        ));
    }
    for z in zetas {
        if z.im > 0.0 {
            return Err(Error::InvalidParameter(format!(
                "boundary impedance must satisfy Im zeta <= 0 (got {})",
                z
            )));
        }
    }
    let refs: Vec<&SurfaceMesh> = meshes.iter().collect();
    guard_ka(&refs, k, config)?;

    let sizes: Vec<usize> = meshes.iter().map(|m| m.panel_count()).collect();
    let total: usize = sizes.iter().sum();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, n| {
            let o = *acc;
            *acc += n;
            Some(o)
        })
        .collect();

    let mut system = Array2::<Complex64>::zeros((total, total));
    for (i, mi) in meshes.iter().enumerate() {
        let zi = zetas[i];
        for (j, mj) in meshes.iter().enumerate() {
            if i == j {
                let a = assemble_a(mi, k).into_entries();
                let g = assemble_single_layer(mi, k);
                for r in 0..sizes[i] {
                    for c in 0..sizes[i] {
                        let mut v = a[(r, c)] / 2.0 - zi * g[(r, c)];
                        if r == c {
                            v -= 0.5;
                        }
                        system[(offsets[i] + r, offsets[i] + c)] = v;
                    }
                }
            } else {
                // smooth cross-body kernels: normal-derivative and single layer
                for (r, (cs, ns)) in mi.centroids().iter().zip(mi.normals()).enumerate() {
                    for (c, (ct, at)) in mj.centroids().iter().zip(mj.areas()).enumerate() {
                        let d = cs - ct;
                        let gg = green_grad(&d, k);
                        let dn = gg[0] * ns.x + gg[1] * ns.y + gg[2] * ns.z;
                        system[(offsets[i] + r, offsets[j] + c)] =
                            dn * *at - zi * green(d.norm(), k) * *at;
                    }
                }
            }
        }
    }

    let mut rhs = Array1::<Complex64>::zeros(total);
    for (i, mesh) in meshes.iter().enumerate() {
        let u0 = incident_on_panels(incident, mesh);
        let u0n = incident_normal_derivative(incident, mesh);
        for s in 0..sizes[i] {
            rhs[offsets[i] + s] = -(u0n[s] - zetas[i] * u0[s]);
        }
    }

    let report = linalg::solve_dense(system, rhs, config.check_condition)?;
    let bodies = meshes
        .iter()
        .enumerate()
        .map(|(i, mesh)| {
            let values = report.x.slice(ndarray::s![offsets[i]..offsets[i] + sizes[i]]).to_vec();
            Ok(BemBody {
                mesh: mesh.clone(),
                density: PanelDensity::new(mesh, values)?,
                interior: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BemSolution {
        bodies,
        k,
        rcond: report.rcond,
        residual: report.residual,
    })
}

/// Coupled transmission solve for one body: unknowns are the surface density
/// σ at panels and the interior field u at volume cells. The boundary row is
/// (I − λA)σ − 2λB₁u = 2λ u0N; the interior row is u − Sσ − Bu = u0.
pub fn solve_transmission_bem(
    mesh: &SurfaceMesh,
    grid: &VolumeGrid,
    k: f64,
    k1: f64,
    rho: f64,
    incident: &IncidentField,
    config: &BemConfig,
) -> Result<BemSolution> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho {} must be > 0", rho)));
    }
    if !(k1.is_finite() && k1 > 0.0) {
        return Err(Error::InvalidParameter(format!("k1 {} must be > 0", k1)));
    }
    guard_ka(&[mesh], k, config)?;
    let lambda = Complex64::new((1.0 - rho) / (1.0 + rho), 0.0);
    let kappa = Complex64::new(k1 * k1 - k * k, 0.0);

    let n = mesh.panel_count();
    let m = grid.cell_count();
    let total = n + m;
    let mut system = Array2::<Complex64>::zeros((total, total));

    // (I − λA) block
    let a = assemble_a(mesh, k).into_entries();
    for r in 0..n {
        for c in 0..n {
            let mut v = -lambda * a[(r, c)];
            if r == c {
                v += 1.0;
            }
            system[(r, c)] = v;
        }
    }
    // −2λB₁ block: B₁[s][c] = κ ∂g(s, y_c)/∂N_s vol_c
    for (s, (cs, ns)) in mesh.centroids().iter().zip(mesh.normals()).enumerate() {
        for (c, (yc, vol)) in grid.cells().iter().zip(grid.cell_volumes()).enumerate() {
            let gg = green_grad(&(cs - yc), k);
            let dn = gg[0] * ns.x + gg[1] * ns.y + gg[2] * ns.z;
            system[(s, n + c)] = -2.0 * lambda * kappa * dn * *vol;
        }
    }
    // −S block: single layer at cell centers
    for (r, yc) in grid.cells().iter().enumerate() {
        for (c, (ct, at)) in mesh.centroids().iter().zip(mesh.areas()).enumerate() {
            system[(n + r, c)] = -green((yc - ct).norm(), k) * *at;
        }
    }
    // (I − B) block with ball-regularized diagonal
    for (r, yr) in grid.cells().iter().enumerate() {
        for (c, (yc, vol)) in grid.cells().iter().zip(grid.cell_volumes()).enumerate() {
            let v = if r == c {
                Complex64::new(1.0, 0.0) - kappa * ball_self_term(*vol, k)
            } else {
                -kappa * green((yr - yc).norm(), k) * *vol
            };
            system[(n + r, n + c)] = v;
        }
    }

    let mut rhs = Array1::<Complex64>::zeros(total);
    for (s, u0n) in incident_normal_derivative(incident, mesh).into_iter().enumerate() {
        rhs[s] = 2.0 * lambda * u0n;
    }
    for (r, yc) in grid.cells().iter().enumerate() {
        rhs[n + r] = incident.value(yc);
    }

    let report = linalg::solve_dense(system, rhs, config.check_condition)?;
    let density = PanelDensity::new(mesh, report.x.slice(ndarray::s![..n]).to_vec())?;
    let interior = InteriorField {
        grid: grid.clone(),
        values: report.x.slice(ndarray::s![n..]).to_vec(),
        kappa,
    };
    Ok(BemSolution {
        bodies: vec![BemBody {
            mesh: mesh.clone(),
            density,
            interior: Some(interior),
        }],
        k,
        rcond: report.rcond,
        residual: report.residual,
    })
}

/// Far-field amplitude A(β) = (1/4π)[Σ e^{−ikβ·t} σ área + κ Σ e^{−ikβ·y} u vol].
pub fn far_field(solution: &BemSolution, directions: &[Vector]) -> Vec<Complex64> {
    let k = solution.k;
    directions
        .iter()
        .map(|beta| {
            let mut acc = Complex64::new(0.0, 0.0);
            for body in &solution.bodies {
                for ((c, a), sigma) in body
                    .mesh
                    .centroids()
                    .iter()
                    .zip(body.mesh.areas())
                    .zip(body.density.values())
                {
                    let phase = (-Complex64::i() * k * beta.dot(&c.coords)).exp();
                    acc += phase * sigma * *a;
                }
                if let Some(interior) = &body.interior {
                    for ((y, vol), u) in interior
                        .grid
                        .cells()
                        .iter()
                        .zip(interior.grid.cell_volumes())
                        .zip(&interior.values)
                    {
                        let phase = (-Complex64::i() * k * beta.dot(&y.coords)).exp();
                        acc += interior.kappa * phase * u * *vol;
                    }
                }
            }
            acc / FOUR_PI
        })
        .collect()
}

/// Total field u0(x) + Σ_bodies [single layer + volume term](x) of a solved
/// oracle problem at an exterior point.
pub fn total_field(solution: &BemSolution, incident: &IncidentField, x: &Point) -> Complex64 {
    let k = solution.k;
    let mut acc = incident.value(x);
    for body in &solution.bodies {
        for ((c, a), sigma) in body
            .mesh
            .centroids()
            .iter()
            .zip(body.mesh.areas())
            .zip(body.density.values())
        {
            acc += green((x - c).norm(), k) * sigma * *a;
        }
        if let Some(interior) = &body.interior {
            for ((y, vol), u) in interior
                .grid
                .cells()
                .iter()
                .zip(interior.grid.cell_volumes())
                .zip(&interior.values)
            {
                acc += interior.kappa * green((x - y).norm(), k) * u * *vol;
            }
        }
    }
    acc
}
