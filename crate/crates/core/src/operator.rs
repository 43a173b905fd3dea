//! Constant-coefficient second-order operators
//! `P[a,D]u = sum a_lj d_l d_j u + sum a_l d_l u + a u` in the plane.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];
pub type CVec2 = [Complex64; 2];

/// Relative threshold on Cholesky pivots below which the principal part is
/// rejected as non-elliptic.
const PIVOT_TOL: f64 = 1e-12;

/// Validated coefficients `(a2, a1, a0)`: `a2` real symmetric positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorCoefficients {
    a2: Mat2,
    a1: CVec2,
    a0: Complex64,
}

/// Reduction `S(x) = det_factor * exp(mu.x) * w(|T^{-1} x|)` of the operator
/// to a radial problem `(Delta + kappa) w = delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedForm {
    /// Lower-triangular Cholesky factor, `a2 = T T^t`.
    pub t: Mat2,
    pub t_inv: Mat2,
    pub a2_inv: Mat2,
    /// `1 / sqrt(det a2)`.
    pub det_factor: f64,
    /// Drift exponent `-(1/2) a2^{-1} a1`.
    pub mu: CVec2,
    /// `a0 - (1/4) a1^t a2^{-1} a1`.
    pub kappa: Complex64,
}

impl OperatorCoefficients {
    pub fn new(a2: Mat2, a1: CVec2, a0: Complex64) -> Result<Self> {
        let finite = a2.iter().flatten().all(|v| v.is_finite())
            && a1.iter().all(|c| c.re.is_finite() && c.im.is_finite())
            && a0.re.is_finite()
            && a0.im.is_finite();
        if !finite {
            return Err(Error::NotElliptic("non-finite coefficient".into()));
        }
        if a2[0][1] != a2[1][0] {
            return Err(Error::NotSymmetric(a2[0][1], a2[1][0]));
        }
        cholesky(&a2)?;
        Ok(Self { a2, a1, a0 })
    }

    /// Real lower-order coefficients, the common case.
    pub fn real(a2: Mat2, a1: Vec2, a0: f64) -> Result<Self> {
        Self::new(
            a2,
            [Complex64::new(a1[0], 0.0), Complex64::new(a1[1], 0.0)],
            Complex64::new(a0, 0.0),
        )
    }

    pub fn laplace() -> Self {
        Self::real([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], 0.0).expect("identity is elliptic")
    }

    pub fn dim(&self) -> usize {
        2
    }

    pub fn a2(&self) -> &Mat2 {
        &self.a2
    }

    pub fn a1(&self) -> &CVec2 {
        &self.a1
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub fn has_lower_order(&self) -> bool {
        self.a1.iter().any(|c| *c != Complex64::new(0.0, 0.0)) || self.a0 != Complex64::new(0.0, 0.0)
    }

    pub fn reduce(&self) -> ReducedForm {
        let t = cholesky(&self.a2).expect("validated at construction");
        let det_t = t[0][0] * t[1][1];
        let t_inv = [
            [1.0 / t[0][0], 0.0],
            [-t[1][0] / det_t, 1.0 / t[1][1]],
        ];
        let a2_inv = inverse(&self.a2);
        let inv_a1 = mat_cvec(&a2_inv, &self.a1);
        let mu = [inv_a1[0] * -0.5, inv_a1[1] * -0.5];
        let quad = self.a1[0] * inv_a1[0] + self.a1[1] * inv_a1[1];
        ReducedForm {
            t,
            t_inv,
            a2_inv,
            det_factor: 1.0 / det_t,
            mu,
            kappa: self.a0 - quad * 0.25,
        }
    }

    /// Central-difference evaluation of `P[a,D]u` at `x` with step `h`.
    pub fn apply_pde<F>(&self, field: F, x: Vec2, h: f64) -> Complex64
    where
        F: Fn(Vec2) -> Complex64,
    {
        let at = |d0: f64, d1: f64| field([x[0] + d0 * h, x[1] + d1 * h]);
        let u0 = at(0.0, 0.0);
        let h2 = h * h;
        let d11 = (at(1.0, 0.0) - u0 * 2.0 + at(-1.0, 0.0)) / h2;
        let d22 = (at(0.0, 1.0) - u0 * 2.0 + at(0.0, -1.0)) / h2;
        let d12 = (at(1.0, 1.0) - at(1.0, -1.0) - at(-1.0, 1.0) + at(-1.0, -1.0)) / (4.0 * h2);
        let d1 = (at(1.0, 0.0) - at(-1.0, 0.0)) / (2.0 * h);
        let d2 = (at(0.0, 1.0) - at(0.0, -1.0)) / (2.0 * h);
        let a = &self.a2;
        d11 * a[0][0] + d12 * (a[0][1] + a[1][0]) + d22 * a[1][1]
            + self.a1[0] * d1
            + self.a1[1] * d2
            + self.a0 * u0
    }
}

impl ReducedForm {
    /// Real reduced constant, if the imaginary part vanishes.
    pub fn real_kappa(&self) -> Option<f64> {
        let scale = self.kappa.re.abs().max(1.0);
        (self.kappa.im.abs() <= 1e-14 * scale).then_some(self.kappa.re)
    }
}

pub(crate) fn cholesky(a: &Mat2) -> Result<Mat2> {
    let scale = a[0][0].abs().max(a[1][1].abs());
    let tol = PIVOT_TOL * scale;
    if !(scale > 0.0) || a[0][0] <= tol {
        return Err(Error::NotElliptic(format!("first pivot {} not positive", a[0][0])));
    }
    let l00 = a[0][0].sqrt();
    let l10 = a[1][0] / l00;
    let d = a[1][1] - l10 * l10;
    if d <= tol {
        return Err(Error::NotElliptic(format!("second pivot {d} not positive")));
    }
    Ok([[l00, 0.0], [l10, d.sqrt()]])
}

pub(crate) fn inverse(a: &Mat2) -> Mat2 {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        [a[1][1] / det, -a[0][1] / det],
        [-a[1][0] / det, a[0][0] / det],
    ]
}

pub(crate) fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub(crate) fn mat_cvec(m: &Mat2, v: &CVec2) -> CVec2 {
    [
        v[0] * m[0][0] + v[1] * m[0][1],
        v[0] * m[1][0] + v[1] * m[1][1],
    ]
}

pub(crate) fn dot(a: &Vec2, b: &Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn cdot(a: &CVec2, b: &Vec2) -> Complex64 {
    a[0] * b[0] + a[1] * b[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn validation_cases() {
        assert!(OperatorCoefficients::real([[1.0, 0.0], [0.0, 1.0]], [0.0; 2], 0.0).is_ok());
        assert!(OperatorCoefficients::real([[4.0, 0.0], [0.0, 1.0]], [0.0; 2], 0.0).is_ok());
        assert!(matches!(
            OperatorCoefficients::real([[1.0, 0.0], [0.0, -1.0]], [0.0; 2], 0.0),
            Err(Error::NotElliptic(_))
        ));
        assert!(matches!(
            OperatorCoefficients::real([[1.0, 0.2], [0.1, 1.0]], [0.0; 2], 0.0),
            Err(Error::NotSymmetric(..))
        ));
        // singular principal part
        assert!(OperatorCoefficients::real([[1.0, 1.0], [1.0, 1.0]], [0.0; 2], 0.0).is_err());
    }

    #[test]
    fn reduce_examples() {
        let r = OperatorCoefficients::laplace().reduce();
        assert_eq!(r.t, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(r.mu, [c(0.0), c(0.0)]);
        assert_eq!(r.kappa, c(0.0));

        let r = OperatorCoefficients::real([[1.0, 0.0], [0.0, 1.0]], [2.0, 0.0], 1.0)
            .unwrap()
            .reduce();
        assert_eq!(r.mu, [c(-1.0), c(0.0)]);
        assert_eq!(r.kappa, c(0.0));

        let r = OperatorCoefficients::real([[4.0, 0.0], [0.0, 1.0]], [0.0; 2], -1.0)
            .unwrap()
            .reduce();
        assert_eq!(r.t, [[2.0, 0.0], [0.0, 1.0]]);
        assert_eq!(r.det_factor, 0.5);
        assert_eq!(r.kappa, c(-1.0));
    }

    #[test]
    fn cholesky_reproduces_a2() {
        let a2 = [[2.5, -0.7], [-0.7, 0.9]];
        let r = OperatorCoefficients::real(a2, [0.3, -0.2], 0.5).unwrap().reduce();
        let t = r.t;
        for l in 0..2 {
            for j in 0..2 {
                let v = t[l][0] * t[j][0] + t[l][1] * t[j][1];
                assert!((v - a2[l][j]).abs() <= 1e-14 * 2.5);
            }
        }
        // T^{-1} T = I
        let p = [
            [t[0][0] * r.t_inv[0][0], 0.0],
            [t[1][0] * r.t_inv[0][0] + t[1][1] * r.t_inv[1][0], t[1][1] * r.t_inv[1][1]],
        ];
        assert!((p[1][0]).abs() < 1e-15 && (p[0][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn apply_pde_examples() {
        let lap = OperatorCoefficients::laplace();
        let v = lap.apply_pde(|x| c(x[0] * x[0]), [0.3, -0.4], 1e-4);
        assert!((v - c(2.0)).norm() < 1e-8);

        let helm = OperatorCoefficients::real([[1.0, 0.0], [0.0, 1.0]], [0.0; 2], 1.0).unwrap();
        let v = helm.apply_pde(|x| c(x[0].sin()), [0.3, 0.0], 1e-4);
        assert!(v.norm() < 1e-7);
    }

    #[test]
    fn drift_substitution_matches_fd() {
        // u = e^{mu.x} v with (Delta) v = 0 => P u = 0 when kappa = 0.
        let op = OperatorCoefficients::real([[1.0, 0.0], [0.0, 1.0]], [2.0, 0.0], 1.0).unwrap();
        let r = op.reduce();
        let field = |x: Vec2| {
            let v = x[0] * x[0] - x[1] * x[1] + 3.0 * x[0] * x[1];
            (r.mu[0] * x[0] + r.mu[1] * x[1]).exp() * v
        };
        let v = op.apply_pde(field, [0.4, 0.7], 1e-4);
        assert!(v.norm() < 1e-6, "{v}");
    }

    #[test]
    fn reduce_is_deterministic() {
        let op = OperatorCoefficients::new(
            [[1.3, 0.2], [0.2, 0.8]],
            [Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.0)],
            Complex64::new(0.4, 0.1),
        )
        .unwrap();
        assert_eq!(op.reduce(), op.reduce());
    }
}
