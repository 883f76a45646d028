//! Helmholtz kernel evaluations shared by every solver.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::geometry::Vector;

pub const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Free-space kernel e^{ikr}/(4πr) at separation r > 0.
#[inline]
pub fn green(r: f64, k: f64) -> Complex64 {
    (Complex64::i() * k * r).exp() / (FOUR_PI * r)
}

/// Radial derivative g'(r) = e^{ikr}(ikr - 1)/(4π r²).
#[inline]
pub fn green_dr(r: f64, k: f64) -> Complex64 {
    (Complex64::i() * k * r).exp() * (Complex64::new(-1.0, k * r)) / (FOUR_PI * r * r)
}

/// ∇ₓ g(x, y) for d = x − y.
#[inline]
pub fn green_grad(d: &Vector, k: f64) -> Vector3<Complex64> {
    let r = d.norm();
    let gp = green_dr(r, k) / r;
    Vector3::new(gp * d.x, gp * d.y, gp * d.z)
}

/// Single-layer self term: integral of g over a flat disc of the given area,
/// evaluated at the disc center. Exact value (e^{ikR} − 1)/(2ik) with
/// R = sqrt(area/π); series branch below kR = 1e-3 avoids cancellation.
#[inline]
pub fn disc_self_term(area: f64, k: f64) -> Complex64 {
    let radius = (area / std::f64::consts::PI).sqrt();
    let kr = k * radius;
    if kr.abs() < 1e-3 {
        Complex64::new(
            radius / 2.0 * (1.0 - kr * kr / 6.0),
            kr * radius / 4.0,
        )
    } else {
        ((Complex64::i() * kr).exp() - 1.0) / (Complex64::i() * 2.0 * k)
    }
}

/// Volume-potential self term: integral of g over a ball of the given volume,
/// evaluated at its center. Exact value (e^{ika}(1 − ika) − 1)/k² with
/// a = (3V/4π)^{1/3}; series branch below ka = 1e-3 avoids cancellation.
#[inline]
pub fn ball_self_term(volume: f64, k: f64) -> Complex64 {
    let a = (3.0 * volume / FOUR_PI).cbrt();
    let ka = k * a;
    if ka.abs() < 1e-3 {
        Complex64::new(a * a / 2.0 * (1.0 - ka * ka / 4.0), ka * a * a / 3.0)
    } else {
        ((Complex64::i() * ka).exp() * Complex64::new(1.0, -ka) - 1.0) / (k * k)
    }
}

/// Gradient of the dipole kernel G(x) r̂(x) contracted with a real tensor B:
/// returns the 3×3 complex matrix D with D[l][q] = ∂/∂x_l [ g(x,y) (Bᵀ r̂)_q ]
/// for d = x − y. Used by the gradient rows of the tensor-family systems.
pub fn dipole_grad_matrix(d: &Vector, k: f64, b: &Matrix3<f64>) -> Matrix3<Complex64> {
    let r = d.norm();
    let rhat = d / r;
    let g = green(r, k);
    let gp = green_dr(r, k);
    let bt_rhat = b.transpose() * rhat;
    let mut out = Matrix3::zeros();
    for l in 0..3 {
        for q in 0..3 {
            let geometric = b[(l, q)] - bt_rhat[q] * rhat[l];
            out[(l, q)] = gp * rhat[l] * bt_rhat[q] + g * geometric / r;
        }
    }
    out
}
