//! Single layer `v`, double layer `w`, the conormal operator `w_*`, their
//! jump relations and the interior gradient identity for `w`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fundsol::{log_factor, FundamentalSolution, KernelCoefs, LogSplit};
use crate::geometry::{spectral_dds, tangential_m, BoundaryCurve, BoundaryFunction};
use crate::operator::{cdot, dot, mat_vec, CVec2, Mat2, Vec2};
use crate::par;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense row-major `N x N` Nyström matrix.
#[derive(Debug, Clone)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, x: &BoundaryFunction) -> BoundaryFunction {
        assert_eq!(x.len(), self.n);
        BoundaryFunction::new(par::map_range(self.n, |i| {
            let row = &self.data[i * self.n..(i + 1) * self.n];
            row.iter().zip(&x.values).map(|(a, b)| a * b).sum()
        }))
    }
}

/// Where a potential is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    OnBoundary,
    AtPoints(&'a [Vec2]),
}

/// Nyström discretizations of the boundary operators of one fundamental
/// solution on one curve.
#[derive(Debug, Clone)]
pub struct BoundaryOperators {
    fs: FundamentalSolution,
    curve: BoundaryCurve,
    single: Matrix,
    double: Matrix,
    wstar: Matrix,
    /// `d S / d x_b` with the diagonal entry left at zero.
    grad: [Matrix; 2],
    /// Diagonal limit of `(g(x) - g(y)) dS/dx_b` per unit `dg/dt`, times the node weight.
    qdiag: [Vec<Complex64>; 2],
}

impl BoundaryOperators {
    pub fn new(fs: &FundamentalSolution, curve: &BoundaryCurve) -> Self {
        let n = curve.len();
        let h = curve.step();
        let lw = curve.log_weights();
        let a2 = *fs.coeffs().a2();
        let a1 = *fs.coeffs().a1();
        let mu = fs.mu();
        let det = Complex64::new(fs.det_factor(), 0.0);
        let pts = curve.points();
        let nus = curve.normals();
        let sp = curve.speeds();
        let mu_an: Vec<Complex64> = nus.iter().map(|nu| cdot(&mu, &mat_vec(&a2, nu))).collect();
        let a1n: Vec<Complex64> = nus.iter().map(|nu| cdot(&a1, nu)).collect();

        let entry = |s: LogSplit, i: usize, j: usize| (s.phi1 * lw[(i + n - j) % n] + s.phi2 * h) * sp[j];

        // five matrices interleaved per row: V, D, W*, W_1, W_2
        let rows: Vec<[Complex64; 5]> = par::fill_rows(n, n, |i, row: &mut [[Complex64; 5]]| {
            for (j, slot) in row.iter_mut().enumerate() {
                if i == j {
                    let half_curv = 0.5 * dot(&curve.d2()[i], &nus[i]);
                    let q2 = -det * half_curv;
                    let v = fs.split_diag(curve, i, det, ZERO);
                    let d = fs.split_diag(curve, i, -det * (mu_an[i] + a1n[i]), q2);
                    let ws = fs.split_diag(curve, i, det * mu_an[i], q2);
                    *slot = [entry(v, i, i), entry(d, i, i), entry(ws, i, i), ZERO, ZERO];
                    continue;
                }
                let z = [pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]];
                let parts = fs.parts(z);
                let e = fs.drift(z);
                let l = log_factor(curve, i, j);
                let az = fs.a2_inv(z);
                let split = |p: Complex64, q: Complex64| fs.split_off(KernelCoefs { p, q }, &parts, l).1;
                let v = split(e, ZERO);
                let d = split(-e * (mu_an[j] + a1n[j]), -e * dot(&z, &nus[j]));
                let ws = split(e * mu_an[i], e * dot(&z, &nus[i]));
                let w1 = split(e * mu[0], e * az[0]);
                let w2 = split(e * mu[1], e * az[1]);
                *slot = [
                    entry(v, i, j),
                    entry(d, i, j),
                    entry(ws, i, j),
                    entry(w1, i, j),
                    entry(w2, i, j),
                ];
            }
        });
        let pick = |k: usize| Matrix {
            n,
            data: rows.iter().map(|r| r[k]).collect(),
        };

        let c0 = fs.profile().log_coefficient_at_zero();
        let t_inv = fs.reduced().t_inv;
        let mut qdiag = [vec![ZERO; n], vec![ZERO; n]];
        for i in 0..n {
            let d1 = curve.d1()[i];
            let tp = mat_vec(&t_inv, &d1);
            let lam2 = tp[0] * tp[0] + tp[1] * tp[1];
            let ad = fs.a2_inv(d1);
            for b in 0..2 {
                qdiag[b][i] = det * (h * sp[i] * c0 * ad[b] / lam2);
            }
        }

        Self {
            fs: fs.clone(),
            curve: curve.clone(),
            single: pick(0),
            double: pick(1),
            wstar: pick(2),
            grad: [pick(3), pick(4)],
            qdiag,
        }
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn fs(&self) -> &FundamentalSolution {
        &self.fs
    }

    pub fn single_matrix(&self) -> &Matrix {
        &self.single
    }

    pub fn double_matrix(&self) -> &Matrix {
        &self.double
    }

    pub fn wstar_matrix(&self) -> &Matrix {
        &self.wstar
    }

    /// `v[mu]` on the boundary.
    pub fn single(&self, mu: &BoundaryFunction) -> BoundaryFunction {
        self.single.apply(mu)
    }

    /// `w[mu]` on the boundary.
    pub fn double(&self, mu: &BoundaryFunction) -> BoundaryFunction {
        self.double.apply(mu)
    }

    /// `w_*[mu]` on the boundary.
    pub fn wstar(&self, mu: &BoundaryFunction) -> BoundaryFunction {
        self.wstar.apply(mu)
    }

    /// Principal value of `grad v[mu]` on the boundary, from the tangential
    /// derivative of `v[mu]` and the conormal component `w_*[mu]`.
    pub fn single_grad_pv(&self, mu: &BoundaryFunction) -> [BoundaryFunction; 2] {
        let dv = spectral_dds(&self.curve, &self.single(mu));
        let cn = self.wstar(mu);
        let a2 = *self.fs.coeffs().a2();
        let n = self.curve.len();
        let mut g = [BoundaryFunction::zeros(n), BoundaryFunction::zeros(n)];
        for i in 0..n {
            let tau = self.curve.tangents()[i];
            let an = mat_vec(&a2, &self.curve.normals()[i]);
            let det = tau[0] * an[1] - tau[1] * an[0];
            let (a, b) = (dv.values[i], cn.values[i]);
            g[0].values[i] = (a * an[1] - b * tau[1]) / det;
            g[1].values[i] = (b * tau[0] - a * an[0]) / det;
        }
        g
    }

    /// One-sided limits `grad v^{+-}` (`+` is the interior side) or the
    /// principal value.
    pub fn single_grad(&self, mu: &BoundaryFunction, side: Side) -> [BoundaryFunction; 2] {
        let mut g = self.single_grad_pv(mu);
        let sign = match side {
            Side::Plus => -1.0,
            Side::Minus => 1.0,
            Side::PrincipalValue => return g,
        };
        let a2 = *self.fs.coeffs().a2();
        for i in 0..self.curve.len() {
            let nu = self.curve.normals()[i];
            let q = dot(&nu, &mat_vec(&a2, &nu));
            for (l, comp) in g.iter_mut().enumerate() {
                comp.values[i] += mu.values[i] * (sign * nu[l] / (2.0 * q));
            }
        }
        g
    }

    /// `Q[dS/dx_b, g, mu]` on the boundary (`b` 0-based).
    pub fn q(&self, b: usize, g: &BoundaryFunction, mu: &BoundaryFunction) -> BoundaryFunction {
        let n = self.curve.len();
        let gt = self.curve.ddt(g);
        let m = &self.grad[b];
        let diag = &self.qdiag[b];
        BoundaryFunction::new(par::map_range(n, |i| {
            let gi = g.values[i];
            let mut s = diag[i] * gt.values[i] * mu.values[i];
            for j in 0..n {
                if j != i {
                    s += (gi - g.values[j]) * m.get(i, j) * mu.values[j];
                }
            }
            s
        }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Limit from the bounded domain.
    Plus,
    /// Limit from the exterior.
    Minus,
    PrincipalValue,
}

fn check_targets(curve: &BoundaryCurve, pts: &[Vec2]) -> Result<()> {
    for p in pts {
        if curve.node_distance(*p) < 1e-12 {
            return Err(Error::PointOnCurve(p[0], p[1]));
        }
    }
    Ok(())
}

fn check_density(curve: &BoundaryCurve, mu: &BoundaryFunction) -> Result<()> {
    if mu.len() != curve.len() {
        return Err(Error::LengthMismatch {
            expected: curve.len(),
            got: mu.len(),
        });
    }
    Ok(())
}

/// `v[mu](x)` off the curve by the trapezoid rule.
pub fn single_layer_at(fs: &FundamentalSolution, curve: &BoundaryCurve, mu: &BoundaryFunction, pts: &[Vec2]) -> Vec<Complex64> {
    let y = curve.points();
    let w = curve.weights();
    par::map_range(pts.len(), |t| {
        let x = pts[t];
        (0..curve.len())
            .map(|j| fs.eval_at([x[0] - y[j][0], x[1] - y[j][1]]) * mu.values[j] * w[j])
            .sum()
    })
}

/// `grad v[mu](x)` off the curve by the trapezoid rule.
pub fn single_layer_grad_at(fs: &FundamentalSolution, curve: &BoundaryCurve, mu: &BoundaryFunction, pts: &[Vec2]) -> Vec<CVec2> {
    let y = curve.points();
    let w = curve.weights();
    par::map_range(pts.len(), |t| {
        let x = pts[t];
        let mut acc = [ZERO, ZERO];
        for j in 0..curve.len() {
            let g = fs.grad_at([x[0] - y[j][0], x[1] - y[j][1]]);
            let c = mu.values[j] * w[j];
            acc[0] += g[0] * c;
            acc[1] += g[1] * c;
        }
        acc
    })
}

/// `w[mu](x)` off the curve by the trapezoid rule.
pub fn double_layer_at(fs: &FundamentalSolution, curve: &BoundaryCurve, mu: &BoundaryFunction, pts: &[Vec2]) -> Vec<Complex64> {
    let y = curve.points();
    let w = curve.weights();
    let a2 = *fs.coeffs().a2();
    let a1 = *fs.coeffs().a1();
    let conormal: Vec<(Vec2, Complex64)> = curve
        .normals()
        .iter()
        .map(|nu| (mat_vec(&a2, nu), cdot(&a1, nu)))
        .collect();
    par::map_range(pts.len(), |t| {
        let x = pts[t];
        (0..curve.len())
            .map(|j| {
                let z = [x[0] - y[j][0], x[1] - y[j][1]];
                let g = fs.grad_at(z);
                let (an, a1n) = conormal[j];
                let k = -(g[0] * an[0] + g[1] * an[1]) - a1n * fs.eval_at(z);
                k * mu.values[j] * w[j]
            })
            .sum()
    })
}

pub fn single_layer(fs: &FundamentalSolution, curve: &BoundaryCurve, mu: &BoundaryFunction, target: Target<'_>) -> Result<Vec<Complex64>> {
    check_density(curve, mu)?;
    match target {
        Target::OnBoundary => Ok(BoundaryOperators::new(fs, curve).single(mu).values),
        Target::AtPoints(pts) => {
            check_targets(curve, pts)?;
            Ok(single_layer_at(fs, curve, mu, pts))
        }
    }
}

pub fn single_layer_grad(fs: &FundamentalSolution, curve: &BoundaryCurve, mu: &BoundaryFunction, side: Side) -> Result<[BoundaryFunction; 2]> {
    check_density(curve, mu)?;
    Ok(BoundaryOperators::new(fs, curve).single_grad(mu, side))
}

pub fn double_layer(fs: &FundamentalSolution, curve: &BoundaryCurve, mu: &BoundaryFunction, target: Target<'_>) -> Result<Vec<Complex64>> {
    check_density(curve, mu)?;
    match target {
        Target::OnBoundary => Ok(BoundaryOperators::new(fs, curve).double(mu).values),
        Target::AtPoints(pts) => {
            check_targets(curve, pts)?;
            Ok(double_layer_at(fs, curve, mu, pts))
        }
    }
}

/// Offsets used for one-sided limits when none are supplied.
pub const DEFAULT_JUMP_OFFSETS: [f64; 6] = [0.08, 0.06, 0.045, 0.03375, 0.0253125, 0.018984375];

/// Nodes per unit of `distance / speed` required for the off-curve rule.
const RESOLUTION: f64 = 28.0;

/// Value at `h = 0` of the interpolating polynomial through `(hs, vals)`.
pub fn extrapolate_to_zero(hs: &[f64], vals: &[Complex64]) -> Complex64 {
    let mut p = vals.to_vec();
    let m = hs.len();
    for k in 1..m {
        for i in 0..m - k {
            p[i] = (p[i + 1] * hs[i] - p[i] * hs[i + k]) / (hs[i] - hs[i + k]);
        }
    }
    p[0]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpReport {
    /// Max-node residual of the interior limit.
    pub plus: f64,
    /// Max-node residual of the exterior limit.
    pub minus: f64,
}

impl JumpReport {
    pub fn max(&self) -> f64 {
        self.plus.max(self.minus)
    }
}

/// Largest first offset as a fraction of the local radius of curvature.
const CURVATURE_FRACTION: f64 = 0.05;

/// Offsets at node `i`: the requested list, shrunk where the curve, seen in
/// the coordinates `T^{-1} x` of the operator, bends faster than the largest
/// offset allows.
fn node_offsets(curve: &BoundaryCurve, t_inv: &Mat2, i: usize, offsets: &[f64]) -> Vec<f64> {
    let d1 = mat_vec(t_inv, &curve.d1()[i]);
    let d2 = mat_vec(t_inv, &curve.d2()[i]);
    let sp = d1[0].hypot(d1[1]);
    let curv = (d1[0] * d2[1] - d1[1] * d2[0]).abs() / sp.powi(3);
    let nu = mat_vec(t_inv, &curve.normals()[i]);
    let reach = offsets[0] * nu[0].hypot(nu[1]);
    let s = (CURVATURE_FRACTION / (curv.max(1e-300) * reach)).min(1.0);
    offsets.iter().map(|h| h * s).collect()
}

/// Largest speed over the nodes within a sixteenth of a turn of node `i`.
fn local_speed(curve: &BoundaryCurve, i: usize) -> f64 {
    let n = curve.len();
    let w = (n / 16).max(1);
    (0..=2 * w)
        .map(|k| curve.speeds()[(i + n + k - w) % n])
        .fold(0.0, f64::max)
}

/// Ratio of the singular values of a 2x2 matrix.
fn condition_number(m: &[[f64; 2]; 2]) -> f64 {
    let fro2 = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    ((fro2 + disc) / (fro2 - disc)).sqrt()
}

/// Evaluates `eval(fine_curve, fine_mu, targets)` at `x_i -+ h nu_i` for each
/// node-adapted offset on curves fine enough for the trapezoid rule, and
/// extrapolates each node and side to `h = 0`.
fn one_sided_limits<T, F>(
    fs: &FundamentalSolution,
    curve: &BoundaryCurve,
    mu: &BoundaryFunction,
    offsets: &[f64],
    eval: F,
) -> Result<(Vec<T>, Vec<T>)>
where
    T: Copy + Default + Send + Extrapolate,
    F: Fn(&BoundaryCurve, &BoundaryFunction, &[Vec2]) -> Vec<T>,
{
    if offsets.is_empty() || offsets.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::InvalidConfig("offsets must be positive".into()));
    }
    let n = curve.len();
    let k = offsets.len();
    let t_inv = fs.reduced().t_inv;
    let hs: Vec<Vec<f64>> = (0..n).map(|i| node_offsets(curve, &t_inv, i, offsets)).collect();
    let stretch = condition_number(&t_inv);

    // targets grouped by the resolution they need; slot = (node * k + level) * 2 + side
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<Vec2>)> = BTreeMap::new();
    for i in 0..n {
        let (x, nu) = (curve.points()[i], curve.normals()[i]);
        let v = local_speed(curve, i) * stretch;
        for (lvl, &h) in hs[i].iter().enumerate() {
            let mut m = n;
            while (m as f64) * h / v < RESOLUTION {
                m *= 2;
            }
            let g = groups.entry(m).or_default();
            for (side, sg) in [(0, -1.0), (1, 1.0)] {
                g.0.push((i * k + lvl) * 2 + side);
                g.1.push([x[0] + sg * h * nu[0], x[1] + sg * h * nu[1]]);
            }
        }
    }
    let mut vals = vec![T::default(); 2 * n * k];
    for (m, (slots, targets)) in groups {
        let fine = curve.resampled(m)?;
        let out = eval(&fine, &mu.resample(m), &targets);
        for (slot, v) in slots.into_iter().zip(out) {
            vals[slot] = v;
        }
    }
    let ext = |side: usize| -> Vec<T> {
        (0..n)
            .map(|i| T::extrapolate(&hs[i], (0..k).map(|lvl| vals[(i * k + lvl) * 2 + side])))
            .collect()
    };
    Ok((ext(0), ext(1)))
}

trait Extrapolate: Sized {
    fn extrapolate<I: Iterator<Item = Self>>(hs: &[f64], vals: I) -> Self;
}

impl Extrapolate for Complex64 {
    fn extrapolate<I: Iterator<Item = Self>>(hs: &[f64], vals: I) -> Self {
        let v: Vec<Complex64> = vals.collect();
        extrapolate_to_zero(hs, &v)
    }
}

impl Extrapolate for CVec2 {
    fn extrapolate<I: Iterator<Item = Self>>(hs: &[f64], vals: I) -> Self {
        let v: Vec<CVec2> = vals.collect();
        let a: Vec<Complex64> = v.iter().map(|g| g[0]).collect();
        let b: Vec<Complex64> = v.iter().map(|g| g[1]).collect();
        [extrapolate_to_zero(hs, &a), extrapolate_to_zero(hs, &b)]
    }
}

/// Residual of `w^{+-} = +-mu/2 + w` with one-sided limits extrapolated from
/// the given normal offsets.
pub fn double_layer_jump_residual(fs: &FundamentalSolution, curve: &BoundaryCurve, mu: &BoundaryFunction, offsets: &[f64]) -> Result<JumpReport> {
    check_density(curve, mu)?;
    let w = BoundaryOperators::new(fs, curve).double(mu);
    let (inner, outer) = one_sided_limits(fs, curve, mu, offsets, |c, m, t| double_layer_at(fs, c, m, t))?;
    let mut rep = JumpReport { plus: 0.0, minus: 0.0 };
    for i in 0..curve.len() {
        let half = mu.values[i] * 0.5;
        rep.plus = rep.plus.max((inner[i] - (w.values[i] + half)).norm());
        rep.minus = rep.minus.max((outer[i] - (w.values[i] - half)).norm());
    }
    Ok(rep)
}

/// Residual of `grad v^{+-} = -+ nu mu / (2 nu^t a2 nu) + p.v.` with
/// extrapolated one-sided limits.
pub fn single_layer_jump_residual(fs: &FundamentalSolution, curve: &BoundaryCurve, mu: &BoundaryFunction, offsets: &[f64]) -> Result<JumpReport> {
    check_density(curve, mu)?;
    let ops = BoundaryOperators::new(fs, curve);
    let plus = ops.single_grad(mu, Side::Plus);
    let minus = ops.single_grad(mu, Side::Minus);
    let (inner, outer) = one_sided_limits(fs, curve, mu, offsets, |c, m, t| single_layer_grad_at(fs, c, m, t))?;
    let mut rep = JumpReport { plus: 0.0, minus: 0.0 };
    for i in 0..curve.len() {
        for l in 0..2 {
            rep.plus = rep.plus.max((inner[i][l] - plus[l].values[i]).norm());
            rep.minus = rep.minus.max((outer[i][l] - minus[l].values[i]).norm());
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientIdentityReport {
    pub probes: Vec<Vec2>,
    pub max_abs: f64,
    /// `max_abs / max(1, sup |grad w|)` over the probes.
    pub scaled: f64,
}

/// Interior probes at distance at least `min_dist` from the nodes.
pub fn interior_probes(curve: &BoundaryCurve, count: usize, min_dist: f64) -> Vec<Vec2> {
    let n = curve.len();
    let mut out = Vec::new();
    for k in 0..count {
        let i = k * n / count;
        let (x, nu) = (curve.points()[i], curve.normals()[i]);
        for &depth in &[min_dist + 0.05, min_dist + 0.2] {
            let p = [x[0] - depth * nu[0], x[1] - depth * nu[1]];
            if curve.node_distance(p) >= min_dist && winding_inside(curve, p) {
                out.push(p);
                break;
            }
        }
    }
    out
}

/// Exterior probes at distance at least `min_dist` from the nodes.
pub fn exterior_probes(curve: &BoundaryCurve, count: usize, min_dist: f64) -> Vec<Vec2> {
    let n = curve.len();
    let mut out = Vec::new();
    for k in 0..count {
        let i = k * n / count;
        let (x, nu) = (curve.points()[i], curve.normals()[i]);
        for &depth in &[min_dist + 0.05, min_dist + 0.2, 2.0 * min_dist + 0.5] {
            let p = [x[0] + depth * nu[0], x[1] + depth * nu[1]];
            if curve.node_distance(p) >= min_dist && !winding_inside(curve, p) {
                out.push(p);
                break;
            }
        }
    }
    out
}

fn winding_inside(curve: &BoundaryCurve, p: Vec2) -> bool {
    let pts = curve.points();
    let n = pts.len();
    let mut angle = 0.0;
    for i in 0..n {
        let a = [pts[i][0] - p[0], pts[i][1] - p[1]];
        let b = [pts[(i + 1) % n][0] - p[0], pts[(i + 1) % n][1] - p[1]];
        angle += (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1]);
    }
    angle > std::f64::consts::PI
}

/// Compares finite differences of `w[mu]` at interior probes with the
/// single-layer expression for `d_r w^+`.
pub fn double_layer_gradient_identity_residual(
    fs: &FundamentalSolution,
    curve: &BoundaryCurve,
    mu: &BoundaryFunction,
    probes: &[Vec2],
) -> Result<GradientIdentityReport> {
    check_density(curve, mu)?;
    check_targets(curve, probes)?;
    let coeffs = fs.coeffs();
    let a2 = *coeffs.a2();
    let a1 = *coeffs.a1();
    let a0 = coeffs.a0();
    let fd = 1e-4;

    let mut shifted = Vec::with_capacity(4 * probes.len());
    for p in probes {
        shifted.push([p[0] + fd, p[1]]);
        shifted.push([p[0] - fd, p[1]]);
        shifted.push([p[0], p[1] + fd]);
        shifted.push([p[0], p[1] - fd]);
    }
    let w = double_layer_at(fs, curve, mu, &shifted);
    let lhs: Vec<CVec2> = (0..probes.len())
        .map(|k| [(w[4 * k] - w[4 * k + 1]) / (2.0 * fd), (w[4 * k + 2] - w[4 * k + 3]) / (2.0 * fd)])
        .collect();

    let nu_a1 = BoundaryFunction::new(curve.normals().iter().map(|nu| cdot(&a1, nu)).collect());
    let grad_nua1 = single_layer_grad_at(fs, curve, &nu_a1.mul(mu), probes);
    let mut max_abs: f64 = 0.0;
    let mut sup: f64 = 0.0;
    for r in 0..2 {
        let nu_r_mu = curve.normal_component(r).mul(mu);
        let v_nr = single_layer_at(fs, curve, &nu_r_mu, probes);
        let g_nr = single_layer_grad_at(fs, curve, &nu_r_mu, probes);
        let mut rhs: Vec<Complex64> = (0..probes.len())
            .map(|k| a1[0] * g_nr[k][0] + a1[1] * g_nr[k][1] + a0 * v_nr[k] - grad_nua1[k][r])
            .collect();
        for j in 0..2 {
            if r == j {
                continue;
            }
            let m = tangential_m(curve, mu, r, j);
            let g = single_layer_grad_at(fs, curve, &m, probes);
            for (k, v) in rhs.iter_mut().enumerate() {
                for (l, row) in a2.iter().enumerate() {
                    *v += g[k][l] * row[j];
                }
            }
        }
        for k in 0..probes.len() {
            max_abs = max_abs.max((lhs[k][r] - rhs[k]).norm());
            sup = sup.max(lhs[k][r].norm());
        }
    }
    Ok(GradientIdentityReport {
        probes: probes.to_vec(),
        max_abs,
        scaled: max_abs / sup.max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset_curve, CurveKind};
    use crate::operator::OperatorCoefficients;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn laplace() -> FundamentalSolution {
        FundamentalSolution::build(&OperatorCoefficients::laplace()).unwrap()
    }

    #[test]
    fn single_layer_closed_forms() {
        let fs = laplace();
        for &rho in &[1.0, 2.0] {
            let c = preset_curve(CurveKind::Circle { radius: rho }, 64).unwrap();
            let one = BoundaryFunction::constant(64, re(1.0));
            let v = single_layer(&fs, &c, &one, Target::OnBoundary).unwrap();
            assert!(v.iter().all(|x| (x - re(rho * rho.ln())).norm() < 1e-12));
            let centre = single_layer(&fs, &c, &one, Target::AtPoints(&[[0.0, 0.0]])).unwrap();
            assert!((centre[0] - re(rho * rho.ln())).norm() < 1e-12);
        }
        let c = preset_curve(CurveKind::Circle { radius: 1.0 }, 64).unwrap();
        let one = BoundaryFunction::constant(64, re(1.0));
        assert!(matches!(
            single_layer(&fs, &c, &one, Target::AtPoints(&[[1.0, 0.0]])),
            Err(Error::PointOnCurve(..))
        ));
    }

    #[test]
    fn gauss_identity_on_circle() {
        let fs = laplace();
        let c = preset_curve(CurveKind::Circle { radius: 1.0 }, 64).unwrap();
        let one = BoundaryFunction::constant(64, re(1.0));
        let v = double_layer(&fs, &c, &one, Target::AtPoints(&[[0.3, 0.2], [3.0, 0.0]])).unwrap();
        assert!((v[0] - re(1.0)).norm() < 1e-12 && v[1].norm() < 1e-12);
        let b = double_layer(&fs, &c, &one, Target::OnBoundary).unwrap();
        assert!(b.iter().all(|x| (x - re(0.5)).norm() < 1e-13));
    }

    #[test]
    fn single_grad_limits_on_circle() {
        let fs = laplace();
        let c = preset_curve(CurveKind::Circle { radius: 1.0 }, 64).unwrap();
        let one = BoundaryFunction::constant(64, re(1.0));
        let plus = single_layer_grad(&fs, &c, &one, Side::Plus).unwrap();
        let minus = single_layer_grad(&fs, &c, &one, Side::Minus).unwrap();
        for i in 0..64 {
            let nu = c.normals()[i];
            assert!(plus[0].values[i].norm() < 1e-12 && plus[1].values[i].norm() < 1e-12);
            let dn = minus[0].values[i] * nu[0] + minus[1].values[i] * nu[1];
            assert!((dn - re(1.0)).norm() < 1e-12);
            for l in 0..2 {
                let jump = plus[l].values[i] - minus[l].values[i];
                assert!((jump + re(nu[l])).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn wstar_constant_on_circle() {
        let fs = laplace();
        let c = preset_curve(CurveKind::Circle { radius: 1.0 }, 64).unwrap();
        let ops = BoundaryOperators::new(&fs, &c);
        let ws = ops.wstar(&BoundaryFunction::constant(64, re(1.0)));
        assert!(ws.values.iter().all(|x| (x - re(0.5)).norm() < 1e-12));
    }

    #[test]
    fn q_closed_form_on_circle() {
        let fs = laplace();
        let c = preset_curve(CurveKind::Circle { radius: 1.0 }, 64).unwrap();
        let ops = BoundaryOperators::new(&fs, &c);
        let g = c.trace(|x| re(x[0]));
        let q = ops.q(0, &g, &BoundaryFunction::constant(64, re(1.0)));
        assert!((q.values[0] - re(0.5)).norm() < 1e-12);
        let k = ops.q(1, &BoundaryFunction::constant(64, re(3.0)), &g);
        assert!(k.sup_norm() < 1e-14);
    }

    #[test]
    fn extrapolation_is_exact_for_polynomials() {
        let hs = [0.3, 0.2, 0.1, 0.05];
        let v: Vec<Complex64> = hs.iter().map(|h| re(2.0 - h + 3.0 * h * h * h)).collect();
        assert!((extrapolate_to_zero(&hs, &v) - re(2.0)).norm() < 1e-13);
    }

    #[test]
    fn probes_are_interior() {
        let c = preset_curve(CurveKind::Kite, 256).unwrap();
        let p = interior_probes(&c, 8, 0.3);
        assert!(p.len() >= 4);
        let fs = laplace();
        let one = BoundaryFunction::constant(256, re(1.0));
        let v = double_layer_at(&fs, &c, &one, &p);
        let err = v.iter().map(|x| (x - re(1.0)).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err} {p:?}");
    }
}
