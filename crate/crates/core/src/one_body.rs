//! Closed-form asymptotic amplitudes and scattered fields for a single small
//! body under Dirichlet (soft), impedance, Neumann (hard) and transmission
//! boundary conditions.
//!
//! Soft and impedance bodies scatter isotropically (a single charge Q);
//! hard and transmission bodies carry a dipole correction through the
//! polarizability tensor, so their amplitude depends on the observation
//! direction.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Point, Vector};
use crate::incident::IncidentField;
use crate::kernels::{green, FOUR_PI};
use crate::shape::ShapeFunctionals;

/// Scattering data of one small body: the scattered field is
/// g(x, center) · (q1(β) + volume_term) with β the observation direction.
#[derive(Debug, Clone)]
pub struct OneBodyResult {
    /// Total charge Q = ∫ σ dt.
    pub charge: Complex64,
    /// Dipole moment vector: component p is V · β_pq ∂u0/∂x_q.
    pub dipole: Vector3<Complex64>,
    /// κ u0(x₁) V, present only for transmission bodies.
    pub volume_term: Complex64,
    pub center: Point,
    pub k: f64,
    /// Body size parameter a (half diameter), used for near-field warnings.
    pub body_radius: f64,
}

impl OneBodyResult {
    /// Far-field moment Q₁(β) = Q + ik β·d.
    pub fn q1(&self, beta: &Vector) -> Complex64 {
        let beta_dot = self.dipole[0] * beta.x + self.dipole[1] * beta.y + self.dipole[2] * beta.z;
        self.charge + Complex64::i() * self.k * beta_dot
    }

    /// Scattering amplitude A(β) = (Q₁(β) + κ u₁ V)/4π.
    pub fn amplitude(&self, beta: &Vector) -> Complex64 {
        (self.q1(beta) + self.volume_term) / FOUR_PI
    }
}

/// Soft-body amplitude −C u0(0) / 4π.
pub fn amplitude_dirichlet(capacitance: f64, u0_at_center: Complex64) -> Complex64 {
    -capacitance * u0_at_center / FOUR_PI
}

/// Impedance-body amplitude −ζ₁ |S| u0(0) / 4π. Rejects Im ζ₁ > 0
/// (passivity violation).
pub fn amplitude_impedance(
    zeta: Complex64,
    area: f64,
    u0_at_center: Complex64,
) -> Result<Complex64> {
    if zeta.im > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "boundary impedance must satisfy Im zeta <= 0 (got {})",
            zeta
        )));
    }
    Ok(-zeta * area * u0_at_center / FOUR_PI)
}

/// Hard-body amplitude (V/4π)(ik β_pq ∂u0/∂x_q β_p + ∇²u0) for an arbitrary
/// incident field; reduces to −(k²V/4π)(1 + β_pq β_p α_q) for plane waves.
pub fn amplitude_neumann(
    volume: f64,
    beta_tensor: &Matrix3<f64>,
    k: f64,
    grad_u0: &Vector3<Complex64>,
    lap_u0: Complex64,
    beta: &Vector,
) -> Complex64 {
    let b_grad = contract(beta_tensor, grad_u0);
    let beta_dot = b_grad[0] * beta.x + b_grad[1] * beta.y + b_grad[2] * beta.z;
    volume * (Complex64::i() * k * beta_dot + lap_u0) / FOUR_PI
}

fn contract(b: &Matrix3<f64>, v: &Vector3<Complex64>) -> Vector3<Complex64> {
    Vector3::new(
        b[(0, 0)] * v[0] + b[(0, 1)] * v[1] + b[(0, 2)] * v[2],
        b[(1, 0)] * v[0] + b[(1, 1)] * v[1] + b[(1, 2)] * v[2],
        b[(2, 0)] * v[0] + b[(2, 1)] * v[1] + b[(2, 2)] * v[2],
    )
}

/// Monopole and dipole source strengths of one particle, shared by the
/// one-body transmission formula and the many-body effective-field systems:
/// monopole = V[(1−ρ)(∇²u − κu) + κu], dipole = V · B · ∇u.
pub(crate) fn particle_source(
    u: Complex64,
    grad: &Vector3<Complex64>,
    lap: Complex64,
    rho: f64,
    kappa: Complex64,
    volume: f64,
    tensor: &Matrix3<f64>,
) -> (Complex64, Vector3<Complex64>) {
    let monopole = volume * ((1.0 - rho) * (lap - kappa * u) + kappa * u);
    let b_grad = contract(tensor, grad);
    (monopole, b_grad * Complex64::new(volume, 0.0))
}

/// One-body result for a soft (Dirichlet) body.
pub fn one_body_dirichlet(
    capacitance: f64,
    incident: &IncidentField,
    center: &Point,
    k: f64,
    body_radius: f64,
) -> Result<OneBodyResult> {
    if !(capacitance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "capacitance {} must be > 0",
            capacitance
        )));
    }
    Ok(OneBodyResult {
        charge: -capacitance * incident.value(center),
        dipole: Vector3::zeros(),
        volume_term: Complex64::new(0.0, 0.0),
        center: *center,
        k,
        body_radius,
    })
}

/// One-body result for an impedance body.
pub fn one_body_impedance(
    zeta: Complex64,
    area: f64,
    incident: &IncidentField,
    center: &Point,
    k: f64,
    body_radius: f64,
) -> Result<OneBodyResult> {
    if zeta.im > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "boundary impedance must satisfy Im zeta <= 0 (got {})",
            zeta
        )));
    }
    Ok(OneBodyResult {
        charge: -zeta * area * incident.value(center),
        dipole: Vector3::zeros(),
        volume_term: Complex64::new(0.0, 0.0),
        center: *center,
        k,
        body_radius,
    })
}

/// One-body result for a hard (Neumann) body with polarizability tensor at
/// λ = 1.
pub fn one_body_neumann(
    volume: f64,
    beta_tensor: &Matrix3<f64>,
    incident: &IncidentField,
    center: &Point,
    k: f64,
    body_radius: f64,
) -> OneBodyResult {
    let (monopole, dipole) = particle_source(
        incident.value(center),
        &incident.gradient(center),
        incident.laplacian(center),
        0.0,
        Complex64::new(0.0, 0.0),
        volume,
        beta_tensor,
    );
    OneBodyResult {
        charge: monopole,
        dipole,
        volume_term: Complex64::new(0.0, 0.0),
        center: *center,
        k,
        body_radius,
    }
}

/// One-body transmission result: Q = V(1−ρ)[∇²u0 − κu0], the dipole built
/// from β_pq at λ = (1−ρ)/(1+ρ), and the κ u0 V volume term (u₁ ~ u0).
/// κ := k₁² − k².
pub fn one_body_transmission(
    functionals: &ShapeFunctionals,
    rho: f64,
    k: f64,
    k1: f64,
    incident: &IncidentField,
    center: &Point,
) -> Result<OneBodyResult> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho {} must be > 0", rho)));
    }
    let lambda = (1.0 - rho) / (1.0 + rho);
    if (functionals.lambda - lambda).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "shape functionals were computed at lambda {} but rho {} requires lambda {}",
            functionals.lambda, rho, lambda
        )));
    }
    let kappa = Complex64::new(k1 * k1 - k * k, 0.0);
    let u0 = incident.value(center);
    let (monopole, dipole) = particle_source(
        u0,
        &incident.gradient(center),
        incident.laplacian(center),
        rho,
        kappa,
        functionals.volume,
        &functionals.polarizability,
    );
    // monopole here is V[(1−ρ)(∇²u0 − κu0) + κu0]; split out Q and the
    // volume term so Q matches the surface-integrated density
    let charge = monopole - kappa * u0 * functionals.volume;
    Ok(OneBodyResult {
        charge,
        dipole,
        volume_term: kappa * u0 * functionals.volume,
        center: *center,
        k,
        body_radius: (3.0 * functionals.volume / FOUR_PI).cbrt(),
    })
}

/// Total field u0(x) + g(x, center) · 4π A(β) at an exterior point. Logs a
/// warning when x is closer than 5 body radii (the asymptotic formula
/// degrades there).
pub fn scattered_field_one_body(
    result: &OneBodyResult,
    incident: &IncidentField,
    x: &Point,
) -> Complex64 {
    let d = x - result.center;
    let r = d.norm();
    if r < 5.0 * result.body_radius {
        log::warn!(
            "field point at r = {:.3e} is closer than 5a = {:.3e}; asymptotic field unreliable",
            r,
            5.0 * result.body_radius
        );
    }
    let beta = d / r;
    incident.value(x) + green(r, result.k) * FOUR_PI * result.amplitude(&beta)
}
