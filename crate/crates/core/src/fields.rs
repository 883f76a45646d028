//! Position-dependent scalar and tensor parameters: closed-form expressions,
//! constants, or grid samples with trilinear interpolation.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::{Box3, Point};

/// Scalar parameter field.
#[derive(Debug, Clone)]
pub enum ScalarField {
    Const(Complex64),
    Expr(Expr),
    Grid(GridField),
}

impl ScalarField {
    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::Const(c.into())
    }

    pub fn real(v: f64) -> Self {
        Self::Const(Complex64::new(v, 0.0))
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(Self::Expr(Expr::parse(src)?))
    }

    pub fn eval(&self, p: &Point) -> Complex64 {
        match self {
            Self::Const(c) => *c,
            Self::Expr(e) => e.eval(p),
            Self::Grid(g) => g.eval(p),
        }
    }

    /// Evaluate expecting a real value; rejects significant imaginary parts.
    pub fn eval_real(&self, p: &Point, what: &str) -> Result<f64> {
        let v = self.eval(p);
        if v.im.abs() > 1e-12 * (1.0 + v.re.abs()) {
            return Err(Error::InvalidParameter(format!(
                "{} must be real, got {} at {:?}",
                what, v, p
            )));
        }
        Ok(v.re)
    }
}

/// Node-registered samples on a box, trilinearly interpolated (clamped at
/// the box faces).
#[derive(Debug, Clone)]
pub struct GridField {
    domain: Box3,
    shape: [usize; 3],
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(domain: Box3, shape: [usize; 3], values: Vec<Complex64>) -> Result<Self> {
        if shape.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter(
                "grid field needs at least 2 nodes per axis".into(),
            ));
        }
        if values.len() != shape[0] * shape[1] * shape[2] {
            return Err(Error::InvalidParameter(format!(
                "grid field expects {} values, got {}",
                shape[0] * shape[1] * shape[2],
                values.len()
            )));
        }
        Ok(Self {
            domain,
            shape,
            values,
        })
    }

    fn node(&self, i: usize, j: usize, l: usize) -> Complex64 {
        self.values[(i * self.shape[1] + j) * self.shape[2] + l]
    }

    pub fn eval(&self, p: &Point) -> Complex64 {
        let ext = self.domain.extents();
        let mut idx = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for d in 0..3 {
            let n = self.shape[d];
            let t = ((p[d] - self.domain.min[d]) / ext[d] * (n - 1) as f64)
                .clamp(0.0, (n - 1) as f64);
            let i = (t.floor() as usize).min(n - 2);
            idx[d] = i;
            frac[d] = t - i as f64;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for di in 0..2 {
            for dj in 0..2 {
                for dl in 0..2 {
                    let w = (if di == 0 { 1.0 - frac[0] } else { frac[0] })
                        * (if dj == 0 { 1.0 - frac[1] } else { frac[1] })
                        * (if dl == 0 { 1.0 - frac[2] } else { frac[2] });
                    acc += w * self.node(idx[0] + di, idx[1] + dj, idx[2] + dl);
                }
            }
        }
        acc
    }
}

/// 3×3 real tensor parameter field.
#[derive(Debug, Clone)]
pub enum TensorField {
    Const(Matrix3<f64>),
    /// One scalar expression per entry, row-major.
    Entries(Box<[[ScalarField; 3]; 3]>),
}

impl TensorField {
    pub fn zero() -> Self {
        Self::Const(Matrix3::zeros())
    }

    pub fn isotropic(v: f64) -> Self {
        Self::Const(Matrix3::identity() * v)
    }

    pub fn eval(&self, p: &Point) -> Result<Matrix3<f64>> {
        match self {
            Self::Const(m) => Ok(*m),
            Self::Entries(rows) => {
                let mut m = Matrix3::zeros();
                for (r, row) in rows.iter().enumerate() {
                    for (c, f) in row.iter().enumerate() {
                        m[(r, c)] = f.eval_real(p, "tensor entry")?;
                    }
                }
                Ok(m)
            }
        }
    }
}
