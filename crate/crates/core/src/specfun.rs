//! Cylinder functions of order 0 and 1 and the planar radial profile
//! `w_kappa` solving `(Delta + kappa) w = delta`.
//!
//! `J`, `Y` use ascending series below [`SERIES_CROSSOVER`]; above it `J_n`
//! comes from the periodic trapezoid rule applied to Bessel's integral
//! (exponentially convergent) and `Y` from the Neumann series in `J_{2k}`.
//! `I` uses the ascending series everywhere (positive terms). `K` uses the
//! ascending series below [`K_CROSSOVER`] and the trapezoid rule on
//! `int_0^inf exp(-x cosh t) cosh(nu t) dt` above it.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Argument above which the `J`/`Y` ascending series is abandoned.
pub const SERIES_CROSSOVER: f64 = 8.0;
/// The `K` series loses digits to cancellation much earlier than `J`/`Y`.
pub const K_CROSSOVER: f64 = 2.0;

const INV_2PI: f64 = 0.5 / PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cylinder {
    J0,
    Y0,
    I0,
    K0,
}

pub fn cylinder(kind: Cylinder, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("NaN argument".into()));
    }
    match kind {
        Cylinder::J0 if x >= 0.0 => Ok(j0(x)),
        Cylinder::I0 if x >= 0.0 => Ok(i0(x)),
        Cylinder::Y0 if x > 0.0 => Ok(y0(x)),
        Cylinder::K0 if x > 0.0 => Ok(k0(x)),
        _ => Err(Error::Domain(format!("{kind:?} undefined at x = {x}"))),
    }
}

fn harmonic(m: usize) -> f64 {
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

/// `sum_m (s t)^m / (m! (m+order)!)` together with the same sum weighted by
/// `H_m + H_{m+order}`; `t = x^2/4`, `s = -1` for `J`/`Y`, `+1` for `I`/`K`.
fn ascending(x: f64, sign: f64, order: usize) -> (f64, f64) {
    let t = 0.25 * x * x * sign;
    let mut term = 1.0 / (1..=order).map(|k| k as f64).product::<f64>();
    let (mut h_m, mut h_mo) = (0.0, harmonic(order));
    let (mut s, mut sh) = (term, term * (h_m + h_mo));
    for m in 1..200 {
        let mf = m as f64;
        term *= t / (mf * (mf + order as f64));
        h_m += 1.0 / mf;
        h_mo += 1.0 / (mf + order as f64);
        s += term;
        sh += term * (h_m + h_mo);
        if term.abs() < 1e-18 * s.abs().max(1e-300) && mf > t.abs().sqrt() {
            break;
        }
    }
    (s, sh)
}

/// `J_0 .. J_nmax` at `x` by the trapezoid rule on
/// `J_n(x) = (1/2pi) int_0^{2pi} cos(x sin th - n th) dth`.
fn bessel_j_table(x: f64, nmax: usize) -> Vec<f64> {
    let mut m = (nmax as f64 + x + 48.0).ceil() as usize;
    m += m % 2;
    let mut out = vec![0.0; nmax + 1];
    for k in 0..m {
        let th = 2.0 * PI * k as f64 / m as f64;
        let (s, c) = th.sin_cos();
        let (ps, pc) = (x * s).sin_cos();
        // z = exp(i(x sin th - n th)), advanced by exp(-i th)
        let (mut zr, mut zi) = (pc, ps);
        for (n, slot) in out.iter_mut().enumerate() {
            if n > 0 {
                let nr = zr * c + zi * s;
                let ni = zi * c - zr * s;
                zr = nr;
                zi = ni;
            }
            *slot += zr;
        }
    }
    for v in out.iter_mut() {
        *v /= m as f64;
    }
    out
}

fn neumann_order(x: f64) -> usize {
    let n = (x + 40.0).ceil() as usize;
    n + n % 2 + 2
}

pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_CROSSOVER {
        ascending(x, -1.0, 0).0
    } else {
        bessel_j_table(x, 0)[0]
    }
}

pub fn j1(x: f64) -> f64 {
    let (ax, sgn) = (x.abs(), x.signum());
    let v = if ax < SERIES_CROSSOVER {
        0.5 * ax * ascending(ax, -1.0, 1).0
    } else {
        bessel_j_table(ax, 1)[1]
    };
    sgn * v
}

/// `(J0, J1, Y0, Y1)` sharing one evaluation; `x > 0`.
pub fn jy01(x: f64) -> (f64, f64, f64, f64) {
    if !(x > 0.0) {
        return (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    }
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    if x < SERIES_CROSSOVER {
        let (s0, sh0) = ascending(x, -1.0, 0);
        let (s1, sh1) = ascending(x, -1.0, 1);
        let j0 = s0;
        let j1 = 0.5 * x * s1;
        // sh0 carries 2 H_m, the Y0 series needs H_m
        let y0 = (2.0 / PI) * (lg * j0 - 0.5 * sh0);
        let y1 = (2.0 / PI) * lg * j1 - 2.0 / (PI * x) - (0.5 * x / PI) * sh1;
        (j0, j1, y0, y1)
    } else {
        let nmax = neumann_order(x);
        let jt = bessel_j_table(x, nmax + 1);
        let (j0, j1) = (jt[0], jt[1]);
        let mut s0 = 0.0;
        let mut s1 = 0.0;
        let mut k = 1;
        while 2 * k < nmax {
            let sg = if k % 2 == 0 { 1.0 } else { -1.0 };
            s0 += sg * jt[2 * k] / k as f64;
            s1 += sg * (jt[2 * k - 1] - jt[2 * k + 1]) / k as f64;
            k += 1;
        }
        let y0 = (2.0 / PI) * lg * j0 - (4.0 / PI) * s0;
        let y1 = (2.0 / PI) * lg * j1 - (2.0 / PI) * j0 / x + (2.0 / PI) * s1;
        (j0, j1, y0, y1)
    }
}

pub fn y0(x: f64) -> f64 {
    jy01(x).2
}

pub fn y1(x: f64) -> f64 {
    jy01(x).3
}

pub fn i0(x: f64) -> f64 {
    ascending(x.abs(), 1.0, 0).0
}

pub fn i1(x: f64) -> f64 {
    0.5 * x * ascending(x.abs(), 1.0, 1).0
}

/// Trapezoid rule for `int_0^inf exp(-x cosh t) cosh(nu t) dt`, `x >= 2`.
fn k_integral(x: f64, nu: f64) -> f64 {
    const STEP: f64 = 0.1;
    let mut sum = 0.5 * (-x).exp();
    for m in 1..2000 {
        let t = STEP * m as f64;
        let term = (-x * t.cosh()).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    STEP * sum
}

/// `(I0, I1, K0, K1)` sharing one evaluation; `x > 0`.
pub fn ik01(x: f64) -> (f64, f64, f64, f64) {
    if !(x > 0.0) {
        return (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    }
    let (s0, sh0) = ascending(x, 1.0, 0);
    let (s1, sh1) = ascending(x, 1.0, 1);
    let i0 = s0;
    let i1 = 0.5 * x * s1;
    if x < K_CROSSOVER {
        let lg = (0.5 * x).ln() + EULER_GAMMA;
        let k0 = -lg * i0 + 0.5 * sh0;
        let k1 = 1.0 / x + lg * i1 - 0.25 * x * sh1;
        (i0, i1, k0, k1)
    } else {
        (i0, i1, k_integral(x, 0.0), k_integral(x, 1.0))
    }
}

pub fn k0(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x < K_CROSSOVER {
        ik01(x).2
    } else {
        k_integral(x, 0.0)
    }
}

pub fn k1(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x < K_CROSSOVER {
        ik01(x).3
    } else {
        k_integral(x, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialProfileKind {
    /// `kappa = 0`: `(1/2pi) ln r`.
    Log,
    /// `kappa > 0`: `(1/4) Y0(k r)`.
    Oscillatory,
    /// `kappa < 0`: `-(1/2pi) K0(k r)`.
    Decaying,
}

/// Logarithmic decomposition of the profile at radius `r`:
///
/// `w = c ln r + d` and `w'/r = e ln r + c / r^2 + f`,
///
/// with `c, d, e, f` even analytic functions of `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileParts {
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub w: f64,
    pub dw_over_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    kind: RadialProfileKind,
    kappa: f64,
    wave_number: f64,
    /// `ln(k/2) + gamma`, zero for the log profile.
    log_shift: f64,
}

impl RadialProfile {
    pub fn new(kappa: f64) -> Self {
        let kind = if kappa == 0.0 {
            RadialProfileKind::Log
        } else if kappa > 0.0 {
            RadialProfileKind::Oscillatory
        } else {
            RadialProfileKind::Decaying
        };
        let wave_number = kappa.abs().sqrt();
        let log_shift = if kind == RadialProfileKind::Log {
            0.0
        } else {
            (0.5 * wave_number).ln() + EULER_GAMMA
        };
        Self {
            kind,
            kappa,
            wave_number,
            log_shift,
        }
    }

    pub fn kind(&self) -> RadialProfileKind {
        self.kind
    }

    pub fn wave_number(&self) -> f64 {
        self.wave_number
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `c(0)`: the coefficient of `ln r` at the origin.
    pub fn log_coefficient_at_zero(&self) -> f64 {
        INV_2PI
    }

    /// `d(0)`: the regular part of `w` at the origin.
    pub fn regular_at_zero(&self) -> f64 {
        INV_2PI * self.log_shift
    }

    /// `(w(r), w'(r))`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radial profile needs r > 0, got {r}")));
        }
        let p = self.parts(r);
        Ok((p.w, p.dw_over_r * r))
    }

    /// Decomposition at `r > 0`; callers guarantee positivity.
    pub fn parts(&self, r: f64) -> ProfileParts {
        let ln_r = r.ln();
        match self.kind {
            RadialProfileKind::Log => ProfileParts {
                c: INV_2PI,
                d: 0.0,
                e: 0.0,
                f: 0.0,
                w: INV_2PI * ln_r,
                dw_over_r: INV_2PI / (r * r),
            },
            _ if self.wave_number * r <= SERIES_CROSSOVER => self.series_parts(r, ln_r),
            RadialProfileKind::Oscillatory => {
                let k = self.wave_number;
                let (j0, j1, y0, y1) = jy01(k * r);
                let w = 0.25 * y0;
                let dw_over_r = -0.25 * k * y1 / r;
                let c = INV_2PI * j0;
                let e = -INV_2PI * k * j1 / r;
                ProfileParts {
                    c,
                    d: w - c * ln_r,
                    e,
                    f: dw_over_r - e * ln_r - c / (r * r),
                    w,
                    dw_over_r,
                }
            }
            RadialProfileKind::Decaying => {
                let k = self.wave_number;
                let (i0, i1, k0, k1) = ik01(k * r);
                let w = -INV_2PI * k0;
                let dw_over_r = INV_2PI * k * k1 / r;
                let c = INV_2PI * i0;
                let e = INV_2PI * k * i1 / r;
                ProfileParts {
                    c,
                    d: w - c * ln_r,
                    e,
                    f: dw_over_r - e * ln_r - c / (r * r),
                    w,
                    dw_over_r,
                }
            }
        }
    }

    // Power series in tau = -kappa r^2 / 4 shared by both Bessel profiles.
    fn series_parts(&self, r: f64, ln_r: f64) -> ProfileParts {
        let tau = -0.25 * self.kappa * r * r;
        let mut term = 1.0;
        let mut h = 0.0;
        let (mut s0, mut sh) = (1.0, 0.0);
        let (mut s1, mut sh1) = (0.0, 0.0);
        for m in 1..80 {
            let mf = m as f64;
            // d/dtau of tau^m/(m!)^2 is term_{m-1}/m
            let dterm = term / mf;
            h += 1.0 / mf;
            s1 += dterm;
            sh1 += h * dterm;
            term *= tau / (mf * mf);
            s0 += term;
            sh += h * term;
            if term.abs() < 1e-18 * s0.abs() && dterm.abs() < 1e-18 * s1.abs().max(1e-300) && mf * mf > tau.abs() {
                break;
            }
        }
        let dtau = -0.5 * self.kappa;
        let c = INV_2PI * s0;
        let d = INV_2PI * (self.log_shift * s0 - sh);
        let e = INV_2PI * dtau * s1;
        let f = INV_2PI * dtau * (self.log_shift * s1 - sh1);
        ProfileParts {
            c,
            d,
            e,
            f,
            w: c * ln_r + d,
            dw_over_r: e * ln_r + c / (r * r) + f,
        }
    }
}

/// `(w_kappa(r), w_kappa'(r))` normalized so that `(Delta + kappa) w = delta`.
pub fn radial_profile(kappa: f64, r: f64) -> Result<(f64, f64)> {
    RadialProfile::new(kappa).eval(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn point_values() {
        assert_eq!(cylinder(Cylinder::J0, 0.0).unwrap(), 1.0);
        assert_eq!(cylinder(Cylinder::I0, 0.0).unwrap(), 1.0);
        assert!(rel(k0(1.0), 0.421_024_438_240_708_33) < 1e-12);
        assert!(rel(y0(1.0), 0.088_256_964_215_676_96) < 1e-12);
        assert!(cylinder(Cylinder::K0, 0.0).is_err());
        assert!(cylinder(Cylinder::Y0, -1.0).is_err());
    }

    #[test]
    fn wronskians() {
        let mut x = 0.5;
        while x <= 20.0 {
            let (j0, j1, y0, y1) = jy01(x);
            let w = j0 * y1 - j1 * y0;
            assert!((w + 2.0 / (PI * x)).abs() < 1e-10, "x={x} w={w}");
            let (i0, i1, k0, k1) = ik01(x);
            let wi = i0 * k1 + i1 * k0;
            assert!(rel(wi, 1.0 / x) < 1e-12, "x={x}");
            x += 0.37;
        }
    }

    #[test]
    fn crossover_is_continuous() {
        for &c in &[SERIES_CROSSOVER, K_CROSSOVER] {
            let (a, b) = (c * (1.0 - 1e-15), c * (1.0 + 1e-15));
            assert!((j0(a) - j0(b)).abs() < 1e-13);
            assert!((y1(a) - y1(b)).abs() < 1e-13);
            assert!(rel(k0(a), k0(b)) < 1e-13);
            assert!(rel(k1(a), k1(b)) < 1e-13);
        }
    }

    #[test]
    fn profile_examples() {
        let (w, dw) = radial_profile(0.0, 1.0).unwrap();
        assert_eq!(w, 0.0);
        assert!((dw - INV_2PI).abs() < 1e-16);
        let (w, _) = radial_profile(0.0, std::f64::consts::E).unwrap();
        assert!((w - 0.159_154_943_091_895_35).abs() < 1e-15);
        let (w, _) = radial_profile(1.0, 1.0).unwrap();
        assert!((w - 0.022_064_241_053_919_24).abs() < 1e-10);
        assert!(radial_profile(1.0, 0.0).is_err());
    }

    #[test]
    fn profile_parts_reassemble() {
        for &kappa in &[0.0, 1.0, -1.0, 4.0, -9.0] {
            let p = RadialProfile::new(kappa);
            for &r in &[0.05, 0.7, 2.0, 3.9, 5.0] {
                let q = p.parts(r);
                let (w, dw) = match p.kind() {
                    RadialProfileKind::Log => (INV_2PI * r.ln(), INV_2PI / r),
                    RadialProfileKind::Oscillatory => {
                        let k = p.wave_number();
                        (0.25 * y0(k * r), -0.25 * k * y1(k * r))
                    }
                    RadialProfileKind::Decaying => {
                        let k = p.wave_number();
                        (-INV_2PI * k0(k * r), INV_2PI * k * k1(k * r))
                    }
                };
                assert!((q.w - w).abs() < 1e-13 * w.abs().max(1.0), "kappa={kappa} r={r}");
                assert!((q.dw_over_r * r - dw).abs() < 1e-12 * dw.abs().max(1.0), "kappa={kappa} r={r}");
            }
        }
    }

    #[test]
    fn ode_residual() {
        for &kappa in &[0.0, 1.0, -1.0, 2.5] {
            let p = RadialProfile::new(kappa);
            let h = 1e-4;
            let mut r = 0.5;
            while r <= 5.0 {
                let w = |s: f64| p.eval(s).unwrap().0;
                let d2 = (w(r + h) - 2.0 * w(r) + w(r - h)) / (h * h);
                let d1 = (w(r + h) - w(r - h)) / (2.0 * h);
                let res = d2 + d1 / r + kappa * w(r);
                assert!(res.abs() < 1e-6, "kappa={kappa} r={r} res={res}");
                r += 0.25;
            }
        }
    }

    #[test]
    fn log_singularity_matches() {
        // w / ln r -> 1/2pi; the finite-r deviation is exactly d(0)/ln r.
        for &kappa in &[0.0, 1.0, -1.0] {
            let p = RadialProfile::new(kappa);
            for &r in &[1e-6, 1e-8] {
                let w = p.eval(r).unwrap().0;
                let ratio = (w - p.regular_at_zero()) / r.ln();
                assert!(rel(ratio, INV_2PI) < 1e-4, "kappa={kappa} r={r}");
            }
        }
    }
}
