//! Closed planar boundary curves, spectral tangential calculus and boundary
//! quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::operator::{dot, mat_vec, OperatorCoefficients, Vec2};
use crate::par;

/// Analytic test geometries, all counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveKind {
    Circle { radius: f64 },
    Ellipse { a: f64, b: f64 },
    /// `(cos t + 0.65 cos 2t - 0.65, 1.5 sin t)`.
    Kite,
}

impl CurveKind {
    /// `(psi, psi', psi'')` at parameter `t`.
    pub fn eval(&self, t: f64) -> (Vec2, Vec2, Vec2) {
        let (s, c) = t.sin_cos();
        match *self {
            CurveKind::Circle { radius } => (
                [radius * c, radius * s],
                [-radius * s, radius * c],
                [-radius * c, -radius * s],
            ),
            CurveKind::Ellipse { a, b } => ([a * c, b * s], [-a * s, b * c], [-a * c, -b * s]),
            CurveKind::Kite => {
                let (s2, c2) = (2.0 * t).sin_cos();
                (
                    [c + 0.65 * c2 - 0.65, 1.5 * s],
                    [-s - 1.3 * s2, 1.5 * c],
                    [-c - 2.6 * c2, -1.5 * s],
                )
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CurveKind::Circle { radius } => radius > 0.0 && radius.is_finite(),
            CurveKind::Ellipse { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            CurveKind::Kite => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("degenerate curve {self:?}")))
        }
    }
}

/// Uniform samples of an analytic closed curve together with the data used
/// by every quadrature in the crate.
#[derive(Clone)]
pub struct BoundaryCurve {
    kind: CurveKind,
    params: Vec<f64>,
    points: Vec<Vec2>,
    d1: Vec<Vec2>,
    d2: Vec<Vec2>,
    speeds: Vec<f64>,
    tangents: Vec<Vec2>,
    normals: Vec<Vec2>,
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    log_weights: Arc<OnceLock<Vec<f64>>>,
}

impl fmt::Debug for BoundaryCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryCurve")
            .field("kind", &self.kind)
            .field("n", &self.len())
            .finish()
    }
}

pub fn preset_curve(kind: CurveKind, n: usize) -> Result<BoundaryCurve> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::BadNodeCount(n));
    }
    kind.validate()?;
    let h = 2.0 * PI / n as f64;
    let params: Vec<f64> = (0..n).map(|i| h * i as f64).collect();
    let mut points = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for &t in &params {
        let (p, q, r) = kind.eval(t);
        points.push(p);
        d1.push(q);
        d2.push(r);
    }
    let speeds: Vec<f64> = d1.iter().map(|v| v[0].hypot(v[1])).collect();
    if speeds.iter().any(|&s| !(s > 1e-10)) {
        return Err(Error::InvalidConfig("curve speed vanishes".into()));
    }
    let tangents: Vec<Vec2> = d1.iter().zip(&speeds).map(|(v, s)| [v[0] / s, v[1] / s]).collect();
    let normals: Vec<Vec2> = tangents.iter().map(|t| [t[1], -t[0]]).collect();
    let weights = speeds.iter().map(|s| h * s).collect();
    let mut planner = FftPlanner::new();
    Ok(BoundaryCurve {
        kind,
        params,
        points,
        d1,
        d2,
        speeds,
        tangents,
        normals,
        weights,
        fft: planner.plan_fft_forward(n),
        ifft: planner.plan_fft_inverse(n),
        log_weights: Arc::new(OnceLock::new()),
    })
}

impl BoundaryCurve {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// Parameter step `2 pi / N`.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn d1(&self) -> &[Vec2] {
        &self.d1
    }

    pub fn d2(&self) -> &[Vec2] {
        &self.d2
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn tangents(&self) -> &[Vec2] {
        &self.tangents
    }

    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn length(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for p in &self.points {
            for q in &self.points {
                d = d.max(dist(p, q));
            }
        }
        d
    }

    /// Signed curvature `(psi' x psi'') / |psi'|^3`, positive for convex arcs.
    pub fn curvature(&self, i: usize) -> f64 {
        let (a, b) = (self.d1[i], self.d2[i]);
        (a[0] * b[1] - a[1] * b[0]) / self.speeds[i].powi(3)
    }

    /// Traces of a function of the point.
    pub fn trace<F: Fn(Vec2) -> Complex64>(&self, f: F) -> BoundaryFunction {
        BoundaryFunction::new(self.points.iter().map(|p| f(*p)).collect())
    }

    /// Function of the parameter `t`.
    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> BoundaryFunction {
        BoundaryFunction::new(self.params.iter().map(|&t| f(t)).collect())
    }

    /// Normal component `nu_l` as a boundary function (`l` is 0-based).
    pub fn normal_component(&self, l: usize) -> BoundaryFunction {
        BoundaryFunction::from_real(self.normals.iter().map(|n| n[l]))
    }

    /// Same curve kind sampled with `m` nodes.
    pub fn resampled(&self, m: usize) -> Result<BoundaryCurve> {
        preset_curve(self.kind, m)
    }

    /// Minimum distance from `x` to the nodes.
    pub fn node_distance(&self, x: Vec2) -> f64 {
        self.points.iter().map(|p| dist(p, &x)).fold(f64::INFINITY, f64::min)
    }

    /// Kress weights `R(k)`, `k = (i - j) mod N`, for
    /// `int_0^{2pi} ln(4 sin^2((t_i - s)/2)) f(s) ds`.
    pub fn log_weights(&self) -> &[f64] {
        self.log_weights.get_or_init(|| {
            let n = self.len();
            let half = n / 2;
            let hf = half as f64;
            par::map_range(n, |k| {
                let mut s = 0.0;
                for m in 1..half {
                    s += (PI * (m * k) as f64 / hf).cos() / m as f64;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                -2.0 * PI / hf * s - PI / (hf * hf) * sign
            })
        })
    }

    /// Spectral `d/dt` of nodal data.
    pub fn ddt(&self, f: &BoundaryFunction) -> BoundaryFunction {
        self.check(f);
        let n = self.len();
        let mut buf = f.values.clone();
        self.fft.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            let kk = if k < n / 2 {
                k as f64
            } else if k == n / 2 {
                0.0
            } else {
                k as f64 - n as f64
            };
            *c *= Complex64::new(0.0, kk / n as f64);
        }
        self.ifft.process(&mut buf);
        BoundaryFunction::new(buf)
    }

    fn check(&self, f: &BoundaryFunction) {
        assert_eq!(f.len(), self.len(), "boundary function length does not match curve");
    }
}

fn dist(a: &Vec2, b: &Vec2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Complex nodal values aligned with the nodes of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    pub values: Vec<Complex64>,
}

impl BoundaryFunction {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    pub fn from_real<I: IntoIterator<Item = f64>>(it: I) -> Self {
        Self::new(it.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        Self::new(vec![c; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, Complex64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &Self, f: F) -> Self {
        assert_eq!(self.len(), other.len());
        Self::new(self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        assert_eq!(self.len(), other.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.sub(other).sup_norm()
    }

    /// Band-limited interpolation to `m >= len` equispaced samples.
    pub fn resample(&self, m: usize) -> Self {
        let n = self.len();
        assert!(m >= n && n % 2 == 0);
        if m == n {
            return self.clone();
        }
        let mut planner = FftPlanner::new();
        let mut buf = self.values.clone();
        planner.plan_fft_forward(n).process(&mut buf);
        let mut out = vec![Complex64::new(0.0, 0.0); m];
        let half = n / 2;
        for k in 0..half {
            out[k] = buf[k];
        }
        for k in half + 1..n {
            out[m - n + k] = buf[k];
        }
        out[half] = buf[half] * 0.5;
        out[m - half] = buf[half] * 0.5;
        planner.plan_fft_inverse(m).process(&mut out);
        let s = 1.0 / n as f64;
        Self::new(out.into_iter().map(|v| v * s).collect())
    }
}

/// Arc-length derivative `df/ds`.
pub fn spectral_dds(curve: &BoundaryCurve, f: &BoundaryFunction) -> BoundaryFunction {
    let mut d = curve.ddt(f);
    for (v, s) in d.values.iter_mut().zip(curve.speeds()) {
        *v /= *s;
    }
    d
}

/// `M_lr[f] = (nu_l tau_r - nu_r tau_l) df/ds`, indices 0-based.
pub fn tangential_m(curve: &BoundaryCurve, f: &BoundaryFunction, l: usize, r: usize) -> BoundaryFunction {
    if l == r {
        return BoundaryFunction::zeros(curve.len());
    }
    let d = spectral_dds(curve, f);
    let mut out = d;
    for (i, v) in out.values.iter_mut().enumerate() {
        let (nu, tau) = (curve.normals()[i], curve.tangents()[i]);
        *v *= nu[l] * tau[r] - nu[r] * tau[l];
    }
    out
}

/// Projected gradient `D_a f`, one boundary function per component.
pub fn projected_grad_da(
    curve: &BoundaryCurve,
    f: &BoundaryFunction,
    coeffs: &OperatorCoefficients,
) -> [BoundaryFunction; 2] {
    let a2 = coeffs.a2();
    let m12 = tangential_m(curve, f, 0, 1);
    let mut d = [BoundaryFunction::zeros(curve.len()), BoundaryFunction::zeros(curve.len())];
    for i in 0..curve.len() {
        let nu = curve.normals()[i];
        let an = mat_vec(a2, &nu);
        let q = dot(&nu, &an);
        // M_21 = -M_12, M_ll = 0
        d[0].values[i] = -m12.values[i] * an[1] / q;
        d[1].values[i] = m12.values[i] * an[0] / q;
    }
    d
}

/// Periodic trapezoid rule for the boundary integral of `f`.
pub fn quad(curve: &BoundaryCurve, f: &BoundaryFunction) -> Complex64 {
    curve.check(f);
    f.values.iter().zip(curve.weights()).map(|(v, w)| v * *w).sum()
}

/// Kress quadrature at node `i` of
/// `int [phi1(t_i,s) ln(4 sin^2((t_i-s)/2)) + phi2(t_i,s)] |psi'(s)| ds`.
pub fn quad_log<P1, P2>(curve: &BoundaryCurve, phi1: P1, phi2: P2, i: usize) -> Complex64
where
    P1: Fn(usize, usize) -> Complex64,
    P2: Fn(usize, usize) -> Complex64,
{
    let n = curve.len();
    let r = curve.log_weights();
    let h = curve.step();
    (0..n)
        .map(|j| (phi1(i, j) * r[(i + n - j) % n] + phi2(i, j) * h) * curve.speeds()[j])
        .sum()
}

/// Exponents for the integral constants; see [`boundary_constants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantExponents {
    /// Exponent in `sup_x int |x-y|^{-g} dsigma_y`, below 1.
    pub prime: f64,
    /// Exponent of the near-field integral over `B(x', 3|x'-x''|)`, below 1.
    pub double_prime: f64,
    /// Exponent of the far-field integral outside `B(x', 2|x'-x''|)`, above 1.
    pub triple_prime: f64,
}

impl Default for ConstantExponents {
    fn default() -> Self {
        Self {
            prime: 0.0,
            double_prime: 0.5,
            triple_prime: 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConstants {
    /// `sup |nu(y).(x-y)| / |x-y|^{1+alpha}`.
    pub c_com: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Log-normalized far-field integral with exponent 1, pairs closer than `1/e`.
    pub c4: f64,
    pub pairs_used: usize,
}

/// Ordered node pairs `i != j`: all of them when `budget >= n^2`, otherwise
/// the first `budget` pairs of a seeded stream (prefix-stable in `budget`).
pub fn sample_pairs(n: usize, budget: usize, seed: u64) -> Vec<(usize, usize)> {
    use rand::{Rng, SeedableRng};
    if budget >= n * n {
        return (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(budget);
    while out.len() < budget {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            out.push((i, j));
        }
    }
    out
}

/// Sampled estimates of the boundary constants; lower bounds of the true
/// suprema that grow with the sample budget.
pub fn boundary_constants(
    curve: &BoundaryCurve,
    alpha: f64,
    exps: ConstantExponents,
    budget: usize,
    seed: u64,
) -> Result<BoundaryConstants> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::BadExponent(alpha));
    }
    if !(exps.prime < 1.0) {
        return Err(Error::BadExponent(exps.prime));
    }
    if !(exps.double_prime < 1.0) {
        return Err(Error::BadExponent(exps.double_prime));
    }
    if !(exps.triple_prime > 1.0) {
        return Err(Error::BadExponent(exps.triple_prime));
    }
    let n = curve.len();
    let pts = curve.points();
    let w = curve.weights();
    let nus = curve.normals();
    let pairs = sample_pairs(n, budget, seed);

    let mut c_com: f64 = 0.0;
    for &(i, j) in &pairs {
        let d = [pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]];
        let r = d[0].hypot(d[1]);
        c_com = c_com.max(dot(&nus[j], &d).abs() / r.powf(1.0 + alpha));
    }

    // |x_i - y_j|^{-g} with the diagonal kept only where it is finite
    let kernel = |i: usize, j: usize, g: f64| -> f64 {
        if i == j {
            if g == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            dist(&pts[i], &pts[j]).powf(-g)
        }
    };

    let c1 = (0..n)
        .map(|i| (0..n).map(|j| w[j] * kernel(i, j, exps.prime)).sum::<f64>())
        .fold(0.0, f64::max);

    let per_pair: Vec<(f64, f64, f64)> = par::map_range(pairs.len(), |p| {
        let (i, k) = pairs[p];
        let d = dist(&pts[i], &pts[k]);
        let (mut near, mut far, mut far1) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let r = dist(&pts[i], &pts[j]);
            if r < 3.0 * d {
                near += w[j] * kernel(i, j, exps.double_prime);
            }
            if r >= 2.0 * d {
                far += w[j] * r.powf(-exps.triple_prime);
                far1 += w[j] / r;
            }
        }
        let c2 = d.powf(exps.double_prime - 1.0) * near;
        let c3 = d.powf(exps.triple_prime - 1.0) * far;
        let c4 = if d < (-1.0f64).exp() { far1 / d.ln().abs() } else { 0.0 };
        (c2, c3, c4)
    });
    let (mut c2, mut c3, mut c4) = (0.0f64, 0.0f64, 0.0f64);
    for (a, b, c) in per_pair {
        c2 = c2.max(a);
        c3 = c3.max(b);
        c4 = c4.max(c);
    }
    Ok(BoundaryConstants {
        c_com,
        c1,
        c2,
        c3,
        c4,
        pairs_used: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> BoundaryCurve {
        preset_curve(CurveKind::Circle { radius: 1.0 }, n).unwrap()
    }

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn preset_examples() {
        let c = circle(8);
        assert_eq!(c.normals()[0], [1.0, 0.0]);
        let e = preset_curve(CurveKind::Ellipse { a: 2.0, b: 1.0 }, 8).unwrap();
        assert!((e.d1()[0][0]).abs() < 1e-16 && e.d1()[0][1] == 1.0);
        assert_eq!(e.speeds()[0], 1.0);
        assert_eq!(e.normals()[0], [1.0, 0.0]);
        let k = preset_curve(CurveKind::Kite, 8).unwrap();
        assert!((k.points()[0][0] - 1.0).abs() < 1e-15 && k.points()[0][1] == 0.0);
        assert!(matches!(preset_curve(CurveKind::Kite, 7), Err(Error::BadNodeCount(7))));
        assert!(matches!(preset_curve(CurveKind::Kite, 6), Err(Error::BadNodeCount(6))));
    }

    #[test]
    fn normals_are_unit_and_orthogonal() {
        for kind in [CurveKind::Kite, CurveKind::Ellipse { a: 2.0, b: 1.0 }] {
            let c = preset_curve(kind, 64).unwrap();
            for i in 0..64 {
                let nu = c.normals()[i];
                assert!((nu[0].hypot(nu[1]) - 1.0).abs() < 1e-15);
                assert!(dot(&nu, &c.d1()[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn dds_examples() {
        let c = circle(32);
        assert!(spectral_dds(&c, &BoundaryFunction::constant(32, re(3.0))).sup_norm() < 1e-14);
        let d = spectral_dds(&c, &c.sample(|t| re(t.sin())));
        assert!(d.max_diff(&c.sample(|t| re(t.cos()))) < 1e-13);
        let d = spectral_dds(&c, &c.trace(|x| re(x[0])));
        assert!(d.max_diff(&c.sample(|t| re(-t.sin()))) < 1e-13);
    }

    #[test]
    fn tangential_m_examples() {
        let c = circle(32);
        let x1 = c.trace(|x| re(x[0]));
        let x2 = c.trace(|x| re(x[1]));
        let m = tangential_m(&c, &x1, 0, 1);
        assert!(m.max_diff(&c.normal_component(1).scale(re(-1.0))) < 1e-13);
        assert!(tangential_m(&c, &x2, 0, 1).max_diff(&c.normal_component(0)) < 1e-13);
        assert_eq!(tangential_m(&c, &x1, 1, 1).sup_norm(), 0.0);
    }

    #[test]
    fn tangential_m_matches_extension() {
        let c = preset_curve(CurveKind::Kite, 128).unwrap();
        // f~ = x1^2 x2 + 3 x2
        let f = c.trace(|x| re(x[0] * x[0] * x[1] + 3.0 * x[1]));
        let m = tangential_m(&c, &f, 0, 1);
        for i in 0..128 {
            let (x, nu) = (c.points()[i], c.normals()[i]);
            let g = [2.0 * x[0] * x[1], x[0] * x[0] + 3.0];
            let e = nu[0] * g[1] - nu[1] * g[0];
            assert!((m.values[i] - e).norm() < 1e-12);
        }
    }

    #[test]
    fn projected_gradient_examples() {
        let c = circle(32);
        let lap = OperatorCoefficients::laplace();
        let d = projected_grad_da(&c, &c.trace(|x| re(x[0])), &lap);
        let e0 = c.sample(|t| re(t.sin() * t.sin()));
        let e1 = c.sample(|t| re(-t.sin() * t.cos()));
        assert!(d[0].max_diff(&e0) < 1e-13 && d[1].max_diff(&e1) < 1e-13);
        let op = OperatorCoefficients::real([[2.0, 0.3], [0.3, 1.0]], [0.0; 2], 0.0).unwrap();
        let k = preset_curve(CurveKind::Kite, 64).unwrap();
        let d = projected_grad_da(&k, &k.trace(|x| re(x[0] * x[1])), &op);
        for i in 0..64 {
            let an = mat_vec(op.a2(), &k.normals()[i]);
            assert!((d[0].values[i] * an[0] + d[1].values[i] * an[1]).norm() < 1e-13);
        }
    }

    #[test]
    fn quad_examples() {
        let c = circle(64);
        assert!((quad(&c, &BoundaryFunction::constant(64, re(1.0))) - 2.0 * PI).norm() < 1e-13);
        assert!((quad(&c, &c.trace(|x| re(x[0] * x[0]))) - PI).norm() < 1e-13);
        assert!(quad(&c, &c.trace(|x| re(x[0]))).norm() < 1e-14);
    }

    #[test]
    fn log_weights_integrate_log() {
        let c = circle(64);
        let one = |_: usize, _: usize| re(1.0);
        let zero = |_: usize, _: usize| re(0.0);
        for i in [0, 5, 31] {
            assert!(quad_log(&c, one, zero, i).norm() < 1e-13);
        }
        // int ln(4 sin^2(s/2)) cos(s) ds = -2 pi
        let v = quad_log(&c, |i, j| re((c.params()[i] - c.params()[j]).cos()), zero, 3);
        assert!((v + re(2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn integration_by_parts() {
        for kind in [CurveKind::Circle { radius: 1.0 }, CurveKind::Ellipse { a: 2.0, b: 1.0 }, CurveKind::Kite] {
            let c = preset_curve(kind, 64).unwrap();
            let phi = c.sample(|t| re((3.0 * t).cos() + 0.5 * (7.0 * t).sin()));
            let psi = c.sample(|t| re(t.sin() - (5.0 * t).cos()));
            let a = quad(&c, &tangential_m(&c, &phi, 0, 1).mul(&psi));
            let b = quad(&c, &phi.mul(&tangential_m(&c, &psi, 0, 1)));
            assert!((a + b).norm() < 1e-12, "{kind:?}");
        }
    }

    #[test]
    fn resample_interpolates() {
        let c = preset_curve(CurveKind::Kite, 32).unwrap();
        let f = c.sample(|t| re((3.0 * t).cos() + (16.0 * t).cos()));
        let c2 = c.resampled(96).unwrap();
        let g = f.resample(96);
        let e = c2.sample(|t| re((3.0 * t).cos() + (16.0 * t).cos()));
        assert!(g.max_diff(&e) < 1e-13);
    }

    #[test]
    fn constants_examples() {
        let c = circle(64);
        let k = boundary_constants(&c, 1.0, ConstantExponents::default(), 64 * 64, 1).unwrap();
        assert!((k.c_com - 0.5).abs() < 1e-12);
        assert!((k.c1 - 2.0 * PI).abs() < 1e-12);
        let small = boundary_constants(&c, 0.5, ConstantExponents::default(), 500, 3).unwrap();
        let big = boundary_constants(&c, 0.5, ConstantExponents::default(), 1000, 3).unwrap();
        assert!(big.c_com >= small.c_com && big.c2 >= small.c2 && big.c3 >= small.c3 && big.c4 >= small.c4);
        assert!(boundary_constants(&c, 0.0, ConstantExponents::default(), 10, 0).is_err());
    }
}
