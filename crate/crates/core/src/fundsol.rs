//! Fundamental solution `S(x) = detF exp(mu.x) w_kappa(|T^{-1} x|)`, its
//! gradient, and the logarithmic splitting used by the Kress quadrature.


use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, CurveKind};
use crate::operator::{cdot, mat_vec, CVec2, OperatorCoefficients, ReducedForm, Vec2};
use crate::specfun::{ProfileParts, RadialProfile, RadialProfileKind};

#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    coeffs: OperatorCoefficients,
    reduced: ReducedForm,
    profile: RadialProfile,
}

/// A kernel written as `P w(rho) + Q w'(rho)/rho` with `rho = |T^{-1} z|`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelCoefs {
    pub p: Complex64,
    pub q: Complex64,
}

/// Kernel value and its Kress splitting at one node pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSplit {
    pub phi1: Complex64,
    pub phi2: Complex64,
}

impl FundamentalSolution {
    pub fn build(coeffs: &OperatorCoefficients) -> Result<Self> {
        let reduced = coeffs.reduce();
        let kappa = reduced.real_kappa().ok_or(Error::UnsupportedKappa {
            re: reduced.kappa.re,
            im: reduced.kappa.im,
        })?;
        Ok(Self {
            coeffs: coeffs.clone(),
            reduced,
            profile: RadialProfile::new(kappa),
        })
    }

    pub fn coeffs(&self) -> &OperatorCoefficients {
        &self.coeffs
    }

    pub fn reduced(&self) -> &ReducedForm {
        &self.reduced
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn profile_kind(&self) -> RadialProfileKind {
        self.profile.kind()
    }

    pub fn det_factor(&self) -> f64 {
        self.reduced.det_factor
    }

    pub fn mu(&self) -> CVec2 {
        self.reduced.mu
    }

    /// `|T^{-1} x|`.
    pub fn rho(&self, x: Vec2) -> f64 {
        let y = mat_vec(&self.reduced.t_inv, &x);
        y[0].hypot(y[1])
    }

    /// `detF exp(mu.x)`.
    pub(crate) fn drift(&self, x: Vec2) -> Complex64 {
        cdot(&self.reduced.mu, &x).exp() * self.reduced.det_factor
    }

    /// `a2^{-1} x`.
    pub(crate) fn a2_inv(&self, x: Vec2) -> Vec2 {
        mat_vec(&self.reduced.a2_inv, &x)
    }

    fn check_point(x: Vec2) -> Result<()> {
        if x[0] == 0.0 && x[1] == 0.0 {
            Err(Error::Domain("fundamental solution evaluated at the pole".into()))
        } else {
            Ok(())
        }
    }

    pub fn eval(&self, x: Vec2) -> Result<Complex64> {
        Self::check_point(x)?;
        Ok(self.eval_at(x))
    }

    pub fn grad(&self, x: Vec2) -> Result<CVec2> {
        Self::check_point(x)?;
        Ok(self.grad_at(x))
    }

    pub(crate) fn eval_at(&self, x: Vec2) -> Complex64 {
        let p = self.profile.parts(self.rho(x));
        self.drift(x) * p.w
    }

    pub(crate) fn grad_at(&self, x: Vec2) -> CVec2 {
        let p = self.profile.parts(self.rho(x));
        let e = self.drift(x);
        let ax = self.a2_inv(x);
        let mu = self.reduced.mu;
        [
            e * (mu[0] * p.w + p.dw_over_r * ax[0]),
            e * (mu[1] * p.w + p.dw_over_r * ax[1]),
        ]
    }

    /// Profile decomposition at separation `z`, `z != 0`.
    pub(crate) fn parts(&self, z: Vec2) -> ProfileParts {
        self.profile.parts(self.rho(z))
    }

    /// `c(0)`, the coefficient of `ln rho` at the pole.
    pub(crate) fn c0(&self) -> f64 {
        self.profile.log_coefficient_at_zero()
    }

    /// `d(0)`, the regular part of the profile at the pole.
    pub(crate) fn d0(&self) -> f64 {
        self.profile.regular_at_zero()
    }

    /// Off-diagonal split of `P w + Q w'/rho` given `ln(4 sin^2((t-s)/2))`.
    pub(crate) fn split_off(&self, k: KernelCoefs, parts: &ProfileParts, log_factor: f64) -> (Complex64, LogSplit) {
        let value = k.p * parts.w + k.q * parts.dw_over_r;
        let phi1 = (k.p * parts.c + k.q * parts.e) * 0.5;
        (
            value,
            LogSplit {
                phi1,
                phi2: value - phi1 * log_factor,
            },
        )
    }

    /// Diagonal limit of the split for a kernel with `P -> p_diag` and
    /// `Q ~ q2 (t - s)^2` at node `i`.
    pub(crate) fn split_diag(&self, curve: &BoundaryCurve, i: usize, p_diag: Complex64, q2: Complex64) -> LogSplit {
        let tp = mat_vec(&self.reduced.t_inv, &curve.d1()[i]);
        let lam2 = tp[0] * tp[0] + tp[1] * tp[1];
        let c0 = self.c0();
        LogSplit {
            phi1: p_diag * (0.5 * c0),
            phi2: p_diag * (0.5 * c0 * lam2.ln() + self.d0()) + q2 * (c0 / lam2),
        }
    }

    /// Split of `S(psi(t) - psi(s))` at curve parameters `t`, `s`.
    pub fn log_split(&self, curve: &BoundaryCurve, t: f64, s: f64) -> LogSplit {
        self.log_split_kind(curve.kind(), t, s)
    }

    pub(crate) fn log_split_kind(&self, kind: CurveKind, t: f64, s: f64) -> LogSplit {
        let (pt, d1, _) = kind.eval(t);
        let (ps, _, _) = kind.eval(s);
        let z = [pt[0] - ps[0], pt[1] - ps[1]];
        let sn = (0.5 * (t - s)).sin();
        let l = (4.0 * sn * sn).ln();
        if z[0] == 0.0 && z[1] == 0.0 || !l.is_finite() {
            let tp = mat_vec(&self.reduced.t_inv, &d1);
            let lam2 = tp[0] * tp[0] + tp[1] * tp[1];
            let df = Complex64::new(self.det_factor(), 0.0);
            let c0 = self.c0();
            return LogSplit {
                phi1: df * (0.5 * c0),
                phi2: df * (0.5 * c0 * lam2.ln() + self.d0()),
            };
        }
        let k = KernelCoefs {
            p: self.drift(z),
            q: Complex64::new(0.0, 0.0),
        };
        self.split_off(k, &self.parts(z), l).1
    }
}

/// `ln(4 sin^2((t_i - t_j)/2))` for nodes of a uniform grid.
pub(crate) fn log_factor(curve: &BoundaryCurve, i: usize, j: usize) -> f64 {
    let sn = (0.5 * (curve.params()[i] - curve.params()[j])).sin();
    (4.0 * sn * sn).ln()
}
