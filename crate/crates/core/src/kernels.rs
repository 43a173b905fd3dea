//! Kernel classes `K_{g1,g2,g3}` on a boundary curve: sampled norms, the
//! generic integral operator `u[K, mu]`, the product kernel `H[Z, g]`, and the
//! predicted output modulus of `u[K, .]`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::geometry::{quad_log, BoundaryCurve, BoundaryFunction};
use crate::operator::Vec2;
use crate::par;
use crate::schauder::ModulusSpec;

/// A kernel known on pairs of curve nodes, `K(x_i, y_j)`.
pub trait KernelSampler: Sync {
    fn eval(&self, i: usize, j: usize) -> Complex64;
}

impl<F> KernelSampler for F
where
    F: Fn(usize, usize) -> Complex64 + Sync,
{
    fn eval(&self, i: usize, j: usize) -> Complex64 {
        self(i, j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelClassParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl KernelClassParams {
    pub fn new(gamma1: f64, gamma2: f64, gamma3: f64) -> Self {
        Self { gamma1, gamma2, gamma3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelNormEstimate {
    /// `sup |x-y|^{g1} |K(x,y)|`.
    pub sup1: f64,
    /// `sup |x'-y|^{g2} |x'-x''|^{-g3} |K(x',y) - K(x'',y)|`, `|x'-y| >= 2|x'-x''|`.
    pub sup2: f64,
    pub pairs_used: usize,
    pub triples_used: usize,
}

impl KernelNormEstimate {
    pub fn norm(&self) -> f64 {
        self.sup1 + self.sup2
    }
}

/// Ordered node pairs `(i, i+k)`, `k != 0`: every pair when the budget covers
/// them, otherwise a seeded stream with log-uniform offsets `k` (so close
/// pairs, where the suprema live, are well represented). Prefix-stable in
/// `count`.
pub fn sample_offset_pairs(n: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    if count >= n * (n - 1) {
        return (0..n)
            .flat_map(|i| (1..n).map(move |k| (i, (i + k) % n)))
            .collect();
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let lmax = ((n / 2) as f64).ln();
    (0..count)
        .map(|_| {
            let i = rng.gen_range(0..n);
            let k = (rng.gen::<f64>() * lmax).exp().floor().max(1.0) as usize;
            let k = k.min(n / 2);
            let j = if rng.gen::<bool>() { (i + k) % n } else { (i + n - k) % n };
            (i, j)
        })
        .collect()
}

fn dist(a: &Vec2, b: &Vec2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Sampled estimate of the two suprema of the class norm.
///
/// The budget counts kernel comparisons: `budget` pairs for the first
/// supremum and `budget / N` pairs `(x', x'')`, each scanned against all
/// `y`, for the second.
pub fn kernel_norm_estimate<K: KernelSampler + ?Sized>(
    kernel: &K,
    curve: &BoundaryCurve,
    params: KernelClassParams,
    budget: usize,
    seed: u64,
) -> KernelNormEstimate {
    let n = curve.len();
    let pts = curve.points();
    let table: Vec<Complex64> = par::fill_rows(n, n, |i, row| {
        for (j, v) in row.iter_mut().enumerate() {
            if j != i {
                *v = kernel.eval(i, j);
            }
        }
    });
    let k = |i: usize, j: usize| table[i * n + j];

    let pairs = sample_offset_pairs(n, budget, seed);
    let sup1 = pairs
        .iter()
        .map(|&(i, j)| dist(&pts[i], &pts[j]).powf(params.gamma1) * k(i, j).norm())
        .fold(0.0, f64::max);

    let outer = sample_offset_pairs(n, (budget / n).max(1), seed ^ 0x9e37_79b9_7f4a_7c15);
    let sup2 = par::map_range(outer.len(), |p| {
        let (a, b) = outer[p];
        let d = dist(&pts[a], &pts[b]);
        let mut m: f64 = 0.0;
        for y in 0..n {
            if y == a || y == b {
                continue;
            }
            let r = dist(&pts[a], &pts[y]);
            if r >= 2.0 * d {
                m = m.max(r.powf(params.gamma2) / d.powf(params.gamma3) * (k(a, y) - k(b, y)).norm());
            }
        }
        m
    })
    .into_iter()
    .fold(0.0, f64::max);

    KernelNormEstimate {
        sup1,
        sup2,
        pairs_used: pairs.len(),
        triples_used: outer.len() * n,
    }
}

/// Treatment of the `i = j` term in [`apply_kernel`].
pub enum DiagonalRule<'a> {
    /// Trapezoid rule with the singular node dropped.
    Exclude,
    /// Kress rule for `K = phi1 ln(4 sin^2((t-s)/2)) + phi2`.
    LogSplit {
        phi1: &'a (dyn Fn(usize, usize) -> Complex64 + Sync),
        phi2: &'a (dyn Fn(usize, usize) -> Complex64 + Sync),
    },
}

/// `u[K, mu](x_i) = int K(x_i, y) mu(y) dsigma_y` at every node.
pub fn apply_kernel<K: KernelSampler + ?Sized>(
    kernel: &K,
    curve: &BoundaryCurve,
    mu: &BoundaryFunction,
    rule: DiagonalRule<'_>,
) -> BoundaryFunction {
    let n = curve.len();
    assert_eq!(mu.len(), n);
    let w = curve.weights();
    let values = match rule {
        DiagonalRule::Exclude => par::map_range(n, |i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| kernel.eval(i, j) * mu.values[j] * w[j])
                .sum()
        }),
        DiagonalRule::LogSplit { phi1, phi2 } => par::map_range(n, |i| {
            quad_log(curve, |a, b| phi1(a, b) * mu.values[b], |a, b| phi2(a, b) * mu.values[b], i)
        }),
    };
    BoundaryFunction::new(values)
}

/// `int K(x, y) mu(y) dsigma_y` at targets off the curve, plain trapezoid.
pub fn apply_kernel_at<K>(kernel: K, curve: &BoundaryCurve, mu: &BoundaryFunction, targets: &[Vec2]) -> Vec<Complex64>
where
    K: Fn(Vec2, usize) -> Complex64 + Sync,
{
    let w = curve.weights();
    par::map_range(targets.len(), |t| {
        (0..curve.len())
            .map(|j| kernel(targets[t], j) * mu.values[j] * w[j])
            .sum()
    })
}

/// `H[Z, g](x_i, y_j) = (g_i - g_j) Z(x_i, y_j)`.
pub fn build_h<'a, Z: KernelSampler + ?Sized>(
    z: &'a Z,
    g: &'a BoundaryFunction,
) -> impl Fn(usize, usize) -> Complex64 + Sync + 'a {
    move |i, j| (g.values[i] - g.values[j]) * z.eval(i, j)
}

const CASE_TOL: f64 = 1e-12;

/// `max{r^delta, omega_theta}` up to equivalence near zero.
fn max_power_log(delta: f64, theta: f64) -> ModulusSpec {
    if delta >= theta {
        ModulusSpec::LogPower(theta)
    } else {
        ModulusSpec::Power(delta)
    }
}

/// Output modulus of `u[K, .]` for `K` in the class `params` on a curve.
///
/// With `density_exponent = None` the densities are bounded; with
/// `Some(beta)` they are `beta`-Hölder and `gamma1 = 1 - alpha` fixes the
/// size exponent `alpha`.
pub fn modulus_transfer_predict(params: KernelClassParams, density_exponent: Option<f64>) -> Result<ModulusSpec> {
    let KernelClassParams { gamma1, gamma2, gamma3 } = params;
    let out = |why: &str| Err(Error::OutOfRange(format!("{params:?}: {why}")));
    if !(gamma3 > 0.0 && gamma3 <= 1.0) {
        return out("gamma3 must lie in (0, 1]");
    }
    match density_exponent {
        None => {
            if !(0.0..1.0).contains(&gamma1) {
                return out("gamma1 must lie in [0, 1)");
            }
            let size = 1.0 - gamma1;
            if (gamma2 - 1.0).abs() <= CASE_TOL {
                Ok(max_power_log(size, gamma3))
            } else if gamma2 > 1.0 {
                let incr = 1.0 - gamma2 + gamma3;
                if incr > 0.0 && incr <= 1.0 {
                    Ok(ModulusSpec::Power(size.min(incr)))
                } else {
                    out("1 - gamma2 + gamma3 must lie in (0, 1]")
                }
            } else {
                out("gamma2 below 1")
            }
        }
        Some(beta) => {
            let alpha = 1.0 - gamma1;
            if !(alpha > 0.0 && alpha < 1.0) {
                return out("size exponent 1 - gamma1 must lie in (0, 1)");
            }
            if !(beta > 0.0 && beta < 1.0) {
                return out("density exponent must lie in (0, 1)");
            }
            let shifted = gamma2 - beta;
            if (shifted - 1.0).abs() <= CASE_TOL {
                Ok(max_power_log(alpha + beta, gamma3))
            } else if shifted < 1.0 {
                Ok(ModulusSpec::Power((alpha + beta).min(gamma3)))
            } else {
                let incr = gamma3 + 1.0 - shifted;
                if incr > 0.0 {
                    Ok(ModulusSpec::Power((alpha + beta).min(incr)))
                } else {
                    out("gamma3 + 1 - (gamma2 - beta) must be positive")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset_curve, CurveKind};
    use crate::schauder::holder_quotient;
    use std::f64::consts::PI;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn constant_kernel() {
        let c = preset_curve(CurveKind::Circle { radius: 1.0 }, 32).unwrap();
        let one = |_: usize, _: usize| re(1.0);
        let e = kernel_norm_estimate(&one, &c, KernelClassParams::new(0.5, 1.0, 1.0), 1 << 20, 0);
        assert!((e.sup1 - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(e.sup2, 0.0);
        let u = apply_kernel(&one, &c, &BoundaryFunction::constant(32, re(1.0)), DiagonalRule::Exclude);
        // the excluded node removes one weight
        assert!(u.values.iter().all(|v| (v.re - 2.0 * PI * 31.0 / 32.0).abs() < 1e-13));
    }

    #[test]
    fn linearity() {
        let c = preset_curve(CurveKind::Kite, 32).unwrap();
        let k = |i: usize, j: usize| re(((i as f64) - (j as f64)).cos());
        let mu = c.sample(|t| re(t.sin()));
        let a = apply_kernel(&k, &c, &mu.scale(re(3.0)), DiagonalRule::Exclude);
        let b = apply_kernel(&k, &c, &mu, DiagonalRule::Exclude).scale(re(3.0));
        assert!(a.max_diff(&b) < 1e-13);
    }

    #[test]
    fn offset_sampling_is_prefix_stable() {
        let a = sample_offset_pairs(64, 100, 9);
        let b = sample_offset_pairs(64, 400, 9);
        assert_eq!(&b[..100], &a[..]);
        assert!(a.iter().all(|&(i, j)| i != j));
        assert_eq!(sample_offset_pairs(8, 56, 0).len(), 56);
    }

    #[test]
    fn h_construction() {
        let c = preset_curve(CurveKind::Circle { radius: 1.0 }, 32).unwrap();
        let pts = c.points().to_vec();
        let z = move |i: usize, j: usize| {
            let d = [pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]];
            re(d[0] / (2.0 * PI * (d[0] * d[0] + d[1] * d[1])))
        };
        let g0 = BoundaryFunction::constant(32, re(2.0));
        let h0 = build_h(&z, &g0);
        assert!((0..32).all(|i| (0..32).all(|j| i == j || h0(i, j).norm() == 0.0)));

        let g = c.trace(|x| re(x[0]));
        let h = build_h(&z, &g);
        let budget = 32 * 32 * 32;
        let en = kernel_norm_estimate(&h, &c, KernelClassParams::new(0.0, 1.0, 1.0), budget, 0);
        assert!(en.norm().is_finite());
        let ez = kernel_norm_estimate(&z, &c, KernelClassParams::new(1.0, 2.0, 1.0), budget, 0);
        let lip = holder_quotient(&c, &g, ModulusSpec::Power(1.0));
        assert!(en.norm() <= 4.0 * ez.norm() * lip);
    }

    #[test]
    fn transfer_examples() {
        let alpha = 0.7;
        let p = KernelClassParams::new(1.0 - alpha, 2.0 - alpha, 1.0);
        match modulus_transfer_predict(p, None).unwrap() {
            ModulusSpec::Power(a) => assert!((a - alpha).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        let th = 0.6;
        let p = KernelClassParams::new(1.0 - th, 1.0, th);
        assert_eq!(modulus_transfer_predict(p, None).unwrap(), ModulusSpec::LogPower(th));
        let p = KernelClassParams::new(0.0, 1.0, 1.0);
        assert_eq!(modulus_transfer_predict(p, None).unwrap(), ModulusSpec::LogPower(1.0));
        let p = KernelClassParams::new(0.5, 1.2, 1.0);
        assert_eq!(modulus_transfer_predict(p, None).unwrap(), ModulusSpec::Power(0.5));
        assert!(modulus_transfer_predict(KernelClassParams::new(1.0, 2.0, 1.0), None).is_err());
        assert!(modulus_transfer_predict(KernelClassParams::new(0.0, 0.5, 1.0), None).is_err());

        // Hölder densities, three cases
        let p = KernelClassParams::new(0.6, 1.0, 1.0);
        assert_eq!(modulus_transfer_predict(p, Some(0.2)).unwrap(), ModulusSpec::Power(0.6000000000000001));
        let p = KernelClassParams::new(0.6, 1.25, 0.5);
        assert_eq!(modulus_transfer_predict(p, Some(0.25)).unwrap(), ModulusSpec::LogPower(0.5));
        let p = KernelClassParams::new(0.6, 1.5, 1.0);
        match modulus_transfer_predict(p, Some(0.25)).unwrap() {
            ModulusSpec::Power(a) => assert!((a - 0.65).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }
}
