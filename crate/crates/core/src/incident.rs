//! Incident fields: plane waves and user-supplied smooth Helmholtz solutions.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Point, Vector};

type ValueFn = Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&Point) -> Vector3<Complex64> + Send + Sync>;

/// Incident field, evaluable with value, gradient and Laplacian.
#[derive(Clone)]
pub enum IncidentField {
    /// e^{ik α·x} with |α| = 1.
    Plane { direction: Vector, k: f64 },
    /// Arbitrary smooth field supplied as evaluation contracts.
    Custom {
        value: ValueFn,
        gradient: GradFn,
        laplacian: ValueFn,
    },
}

impl IncidentField {
    pub fn plane(direction: Vector, k: f64) -> Result<Self> {
        let norm = direction.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter(
                "plane-wave direction must be a nonzero vector".into(),
            ));
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavenumber {} must be >= 0",
                k
            )));
        }
        Ok(Self::Plane {
            direction: direction / norm,
            k,
        })
    }

    pub fn custom(value: ValueFn, gradient: GradFn, laplacian: ValueFn) -> Self {
        Self::Custom {
            value,
            gradient,
            laplacian,
        }
    }

    /// Constant field u ≡ c (gradient and Laplacian zero). Useful for
    /// electrostatic (k = 0) problems.
    pub fn constant(c: Complex64) -> Self {
        Self::Custom {
            value: Arc::new(move |_| c),
            gradient: Arc::new(|_| Vector3::zeros()),
            laplacian: Arc::new(|_| Complex64::new(0.0, 0.0)),
        }
    }

    pub fn value(&self, x: &Point) -> Complex64 {
        match self {
            Self::Plane { direction, k } => (Complex64::i() * k * direction.dot(&x.coords)).exp(),
            Self::Custom { value, .. } => value(x),
        }
    }

    pub fn gradient(&self, x: &Point) -> Vector3<Complex64> {
        match self {
            Self::Plane { direction, k } => {
                let u = self.value(x);
                let ik = Complex64::i() * *k;
                Vector3::new(ik * direction.x * u, ik * direction.y * u, ik * direction.z * u)
            }
            Self::Custom { gradient, .. } => gradient(x),
        }
    }

    pub fn laplacian(&self, x: &Point) -> Complex64 {
        match self {
            Self::Plane { k, .. } => -k * k * self.value(x),
            Self::Custom { laplacian, .. } => laplacian(x),
        }
    }
}

impl fmt::Debug for IncidentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plane { direction, k } => f
                .debug_struct("Plane")
                .field("direction", direction)
                .field("k", k)
                .finish(),
            Self::Custom { .. } => f.write_str("Custom {..}"),
        }
    }
}
