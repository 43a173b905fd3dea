//! The commutator operator `Q`, the trilinear operator `R`, and residual
//! checks for the tangential-derivative formulas of `Q` and of the double
//! layer.

use num_complex::Complex64;

use crate::error::Result;
use crate::fundsol::FundamentalSolution;
use crate::geometry::{projected_grad_da, tangential_m, BoundaryCurve, BoundaryFunction};
use crate::layers::BoundaryOperators;
use crate::operator::{cdot, dot, mat_vec};

/// `Q[dS/dx_r, g, mu](x) = int (g(x) - g(y)) dS/dx_r(x - y) mu(y) dsigma_y`,
/// `r` 0-based.
pub fn q_op(fs: &FundamentalSolution, curve: &BoundaryCurve, g: &BoundaryFunction, mu: &BoundaryFunction, r: usize) -> BoundaryFunction {
    BoundaryOperators::new(fs, curve).q(r, g, mu)
}

/// `R[g, h, mu](x) = int {a1 . grad S + a S}(x - y) (g(x) h(y) - g(y) h(x)) mu(y) dsigma_y`.
pub fn r_op(ops: &BoundaryOperators, g: &BoundaryFunction, h: &BoundaryFunction, mu: &BoundaryFunction) -> BoundaryFunction {
    let coeffs = ops.fs().coeffs();
    let a1 = *coeffs.a1();
    let a0 = coeffs.a0();
    let n = g.len();
    let mut out = BoundaryFunction::zeros(n);
    for (r, &ar) in a1.iter().enumerate() {
        if ar == Complex64::new(0.0, 0.0) {
            continue;
        }
        let t = ops
            .q(r, &g.mul(h), mu)
            .sub(&g.mul(&ops.q(r, h, mu)))
            .sub(&ops.q(r, h, &g.mul(mu)));
        out.axpy(ar, &t);
    }
    if a0 != Complex64::new(0.0, 0.0) {
        let t = g.mul(&ops.single(&h.mul(mu))).sub(&h.mul(&ops.single(&g.mul(mu))));
        out.axpy(a0, &t);
    }
    out
}

/// Boundary data shared by the two formulas.
struct Frame {
    nu: [BoundaryFunction; 2],
    /// `nu^t a2 nu`
    q: BoundaryFunction,
    /// `(a2 nu)_s / nu^t a2 nu`
    conormal: [BoundaryFunction; 2],
    /// `nu . a1`
    nu_a1: BoundaryFunction,
}

impl Frame {
    fn new(ops: &BoundaryOperators) -> Self {
        let curve = ops.curve();
        let coeffs = ops.fs().coeffs();
        let a2 = *coeffs.a2();
        let a1 = *coeffs.a1();
        let nus = curve.normals();
        let q: Vec<f64> = nus.iter().map(|nu| dot(nu, &mat_vec(&a2, nu))).collect();
        let conormal = [0, 1].map(|s| BoundaryFunction::from_real(nus.iter().zip(&q).map(|(nu, q)| mat_vec(&a2, nu)[s] / q)));
        Self {
            nu: [curve.normal_component(0), curve.normal_component(1)],
            q: BoundaryFunction::from_real(q),
            conormal,
            nu_a1: BoundaryFunction::new(nus.iter().map(|nu| cdot(&a1, nu)).collect()),
        }
    }

    fn over_q(&self, f: &BoundaryFunction) -> BoundaryFunction {
        f.zip(&self.q, |a, b| a / b)
    }
}

/// Right side of the tangential-derivative formula for
/// `M_lj[Q[dS/dx_r, g, mu]]` (indices 0-based).
pub fn formula1_rhs(ops: &BoundaryOperators, g: &BoundaryFunction, mu: &BoundaryFunction, l: usize, j: usize, r: usize) -> BoundaryFunction {
    let curve = ops.curve();
    let coeffs = ops.fs().coeffs();
    let a2 = *coeffs.a2();
    let a1 = *coeffs.a1();
    let a0 = coeffs.a0();
    let fr = Frame::new(ops);
    let (nl, nj) = (&fr.nu[l], &fr.nu[j]);
    let m = |f: &BoundaryFunction, a: usize, b: usize| tangential_m(curve, f, a, b);

    let dg = projected_grad_da(curve, g, coeffs);
    let mut out = nl.mul(&ops.q(r, &dg[j], mu)).sub(&nj.mul(&ops.q(r, &dg[l], mu)));

    let mut dens_j = BoundaryFunction::zeros(g.len());
    let mut dens_l = BoundaryFunction::zeros(g.len());
    for s in 0..2 {
        let am = fr.conormal[s].mul(mu);
        dens_j = dens_j.add(&m(&am, s, j));
        dens_l = dens_l.add(&m(&am, s, l));
    }
    out = out.add(&nl.mul(&ops.q(r, g, &dens_j))).sub(&nj.mul(&ops.q(r, g, &dens_l)));

    for (s, row) in a2.iter().enumerate() {
        for (h, &ash) in row.iter().enumerate() {
            if ash == 0.0 {
                continue;
            }
            let mg = fr.over_q(&m(g, h, r).mul(mu));
            let bj = ops.q(s, nj, &mg).add(&ops.q(s, g, &m(&fr.over_q(&nj.mul(mu)), h, r)));
            let bl = ops.q(s, nl, &mg).add(&ops.q(s, g, &m(&fr.over_q(&nl.mul(mu)), h, r)));
            let t = nl.mul(&bj).sub(&nj.mul(&bl));
            out.axpy(Complex64::new(ash, 0.0), &t);
        }
    }

    let nr = &fr.nu[r];
    let wj = fr.over_q(&nj.mul(nr).mul(mu));
    let wl = fr.over_q(&nl.mul(nr).mul(mu));
    for (s, &as_) in a1.iter().enumerate() {
        if as_ == Complex64::new(0.0, 0.0) {
            continue;
        }
        let t = nl.mul(&ops.q(s, g, &wj)).sub(&nj.mul(&ops.q(s, g, &wl)));
        out.axpy(-as_, &t);
    }

    if a0 != Complex64::new(0.0, 0.0) {
        let first = g.mul(&nl.mul(&ops.single(&wj)).sub(&nj.mul(&ops.single(&wl))));
        let second = nl.mul(&ops.single(&g.mul(&wj))).sub(&nj.mul(&ops.single(&g.mul(&wl))));
        out.axpy(-a0, &first.sub(&second));
    }
    out
}

/// Max-node `|M_lj[Q[dS/dx_r, g, mu]] - formula1_rhs|`, the left side taken
/// spectrally.
pub fn formula1_residual(ops: &BoundaryOperators, g: &BoundaryFunction, mu: &BoundaryFunction, l: usize, j: usize, r: usize) -> f64 {
    let lhs = tangential_m(ops.curve(), &ops.q(r, g, mu), l, j);
    lhs.max_diff(&formula1_rhs(ops, g, mu, l, j, r))
}

/// Right side of the tangential-derivative formula for `M_lj[w[mu]]`.
pub fn wtg_rhs(ops: &BoundaryOperators, mu: &BoundaryFunction, l: usize, j: usize) -> BoundaryFunction {
    let curve = ops.curve();
    let a2 = *ops.fs().coeffs().a2();
    let fr = Frame::new(ops);
    let (nl, nj) = (&fr.nu[l], &fr.nu[j]);
    let m = |f: &BoundaryFunction, a: usize, b: usize| tangential_m(curve, f, a, b);
    let mlj = m(mu, l, j);

    let mut out = ops.double(&mlj);
    for (b, row) in a2.iter().enumerate() {
        for (r, &abr) in row.iter().enumerate() {
            if abr == 0.0 {
                continue;
            }
            let t = ops.q(b, nl, &m(mu, j, r)).sub(&ops.q(b, nj, &m(mu, l, r)));
            out.axpy(Complex64::new(abr, 0.0), &t);
        }
    }
    let na = &fr.nu_a1;
    out = out
        .add(&nl.mul(&ops.q(j, na, mu)))
        .sub(&nj.mul(&ops.q(l, na, mu)))
        .add(&na.mul(&ops.q(l, nj, mu).sub(&ops.q(j, nl, mu))))
        .sub(&na.mul(&ops.single(&mlj)))
        .add(&ops.single(&na.mul(&mlj)))
        .add(&r_op(ops, nl, nj, mu));
    out
}

/// Max-node `|M_lj[w[mu]] - wtg_rhs|`, the left side taken spectrally.
pub fn wtg_residual(ops: &BoundaryOperators, mu: &BoundaryFunction, l: usize, j: usize) -> f64 {
    let lhs = tangential_m(ops.curve(), &ops.double(mu), l, j);
    lhs.max_diff(&wtg_rhs(ops, mu, l, j))
}

/// `sum a_br Q[dS/dx_b, nu_r, mu] - w[mu] - v[(a1 . nu) mu]`, which equals
/// `w_*[mu]`.
pub fn wstar_via_q(ops: &BoundaryOperators, mu: &BoundaryFunction) -> BoundaryFunction {
    let a2 = *ops.fs().coeffs().a2();
    let fr = Frame::new(ops);
    let mut out = ops.double(mu).scale(Complex64::new(-1.0, 0.0));
    for (b, row) in a2.iter().enumerate() {
        for (r, &abr) in row.iter().enumerate() {
            if abr != 0.0 {
                out.axpy(Complex64::new(abr, 0.0), &ops.q(b, &fr.nu[r], mu));
            }
        }
    }
    out.sub(&ops.single(&fr.nu_a1.mul(mu)))
}

/// Max-node residual of the identity `w_* = wstar_via_q`.
pub fn wstar_identity_residual(ops: &BoundaryOperators, mu: &BoundaryFunction) -> f64 {
    ops.wstar(mu).max_diff(&wstar_via_q(ops, mu))
}

/// Max-node `|Q[g, mu] - (g pv[mu] - pv[g mu])|` for the `r`-th gradient
/// component of the single layer.
pub fn q_pv_residual(ops: &BoundaryOperators, g: &BoundaryFunction, mu: &BoundaryFunction, r: usize) -> f64 {
    let pv = ops.single_grad_pv(mu);
    let pvg = ops.single_grad_pv(&g.mul(mu));
    let oracle = g.mul(&pv[r]).sub(&pvg[r]);
    ops.q(r, g, mu).max_diff(&oracle)
}

/// Residuals at each `N`, for refinement studies of `formula1_residual`.
pub fn formula1_study(
    fs: &FundamentalSolution,
    curves: &[BoundaryCurve],
    g: impl Fn(&BoundaryCurve) -> BoundaryFunction,
    mu: impl Fn(&BoundaryCurve) -> BoundaryFunction,
    (l, j, r): (usize, usize, usize),
) -> Result<Vec<f64>> {
    Ok(curves
        .iter()
        .map(|c| {
            let ops = BoundaryOperators::new(fs, c);
            formula1_residual(&ops, &g(c), &mu(c), l, j, r)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset_curve, CurveKind};
    use crate::operator::OperatorCoefficients;

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn setup(op: OperatorCoefficients, kind: CurveKind, n: usize) -> BoundaryOperators {
        let fs = FundamentalSolution::build(&op).unwrap();
        BoundaryOperators::new(&fs, &preset_curve(kind, n).unwrap())
    }

    #[test]
    fn q_vanishes_for_constant_g() {
        let ops = setup(OperatorCoefficients::laplace(), CurveKind::Kite, 64);
        let mu = ops.curve().sample(|t| re(t.sin()));
        let q = ops.q(1, &BoundaryFunction::constant(64, re(2.5)), &mu);
        assert!(q.sup_norm() < 1e-13);
    }

    #[test]
    fn q_is_bilinear() {
        let i2 = [[1.0, 0.0], [0.0, 1.0]];
        let ops = setup(OperatorCoefficients::real(i2, [2.0, 0.0], 1.0).unwrap(), CurveKind::Ellipse { a: 2.0, b: 1.0 }, 64);
        let c = ops.curve();
        let g1 = c.sample(|t| re(t.cos()));
        let g2 = c.sample(|t| re((2.0 * t).sin()));
        let mu = c.sample(|t| re(1.0 + 0.5 * t.cos()));
        let lhs = ops.q(0, &g1.scale(re(3.0)).add(&g2), &mu);
        let rhs = ops.q(0, &g1, &mu).scale(re(3.0)).add(&ops.q(0, &g2, &mu));
        let d = lhs.max_diff(&rhs);
        assert!(d < 1e-13 * lhs.sup_norm().max(1.0), "{d}");
    }

    #[test]
    fn r_antisymmetry_and_vanishing() {
        let i2 = [[1.0, 0.0], [0.0, 1.0]];
        let ops = setup(OperatorCoefficients::real(i2, [2.0, 0.0], 1.0).unwrap(), CurveKind::Kite, 64);
        let c = ops.curve();
        let g = c.sample(|t| re(t.cos()));
        let h = c.sample(|t| re((3.0 * t).sin()));
        let mu = c.sample(|t| re(t.sin()));
        assert!(r_op(&ops, &g, &g, &mu).sup_norm() < 1e-12);
        assert!(r_op(&ops, &g, &h, &mu).add(&r_op(&ops, &h, &g, &mu)).sup_norm() < 1e-12);
        let lap = setup(OperatorCoefficients::laplace(), CurveKind::Kite, 64);
        assert_eq!(r_op(&lap, &g, &h, &mu).sup_norm(), 0.0);
    }

    #[test]
    fn formulas_vanish_for_equal_indices() {
        let ops = setup(OperatorCoefficients::laplace(), CurveKind::Kite, 64);
        let c = ops.curve();
        let g = c.trace(|x| re(x[0]));
        let mu = c.sample(|t| re(t.cos()));
        assert!(formula1_rhs(&ops, &g, &mu, 1, 1, 0).sup_norm() < 1e-12);
        assert!(wtg_rhs(&ops, &mu, 0, 0).sup_norm() < 1e-12);
    }

    #[test]
    fn wtg_constant_density_on_circle() {
        let ops = setup(OperatorCoefficients::laplace(), CurveKind::Circle { radius: 1.0 }, 64);
        let rhs = wtg_rhs(&ops, &BoundaryFunction::constant(64, re(1.0)), 0, 1);
        assert!(rhs.sup_norm() < 1e-10);
    }
}
