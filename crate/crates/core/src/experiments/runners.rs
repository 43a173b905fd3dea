use num_complex::Complex64;

use super::config::{DensitySpec, ExperimentConfig, ExperimentKind, KernelChoice, LayerChoice, QuotientTarget};
use super::oracle;
use super::report::{Check, Report, Row};
use crate::commutator::{formula1_residual, wstar_identity_residual, wtg_residual};
use crate::error::{Error, Result};
use crate::fundsol::FundamentalSolution;
use crate::geometry::{
    boundary_constants, quad, tangential_m, BoundaryCurve, BoundaryFunction, ConstantExponents, CurveKind,
};
use crate::kernels::{build_h, kernel_norm_estimate, KernelClassParams};
use crate::layers::{
    double_layer_at, double_layer_gradient_identity_residual, double_layer_jump_residual, exterior_probes,
    interior_probes, single_layer_at, single_layer_jump_residual, BoundaryOperators, DEFAULT_JUMP_OFFSETS,
};
use crate::schauder::{holder_quotient, ModulusSpec};
use crate::specfun::{i0, j0, k0, y0, RadialProfile};

const PROBES: usize = 16;
const PROBE_DISTANCE: f64 = 0.45;

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    fs: FundamentalSolution,
}

impl Ctx<'_> {
    fn curves(&self) -> Result<Vec<BoundaryCurve>> {
        self.cfg.n.iter().map(|&n| self.cfg.curve.build(n)).collect()
    }

    fn tol(&self, default: f64) -> f64 {
        self.cfg.tolerance.unwrap_or(default)
    }

    /// Laplacian threshold or the one for every other operator.
    fn operator_tol(&self, laplace: f64, other: f64) -> f64 {
        self.tol(if self.cfg.operator.is_laplace() { laplace } else { other })
    }
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let kind = cfg.validate()?;
    let fs = FundamentalSolution::build(&cfg.operator.coefficients()?)?;
    let ctx = Ctx { cfg, fs };
    let mut rep = Report::new(kind);
    match kind {
        ExperimentKind::GaussIdentity => gauss(&ctx, &mut rep)?,
        ExperimentKind::JumpDouble | ExperimentKind::JumpSingle => jumps(&ctx, kind, &mut rep)?,
        ExperimentKind::GradientIdentity => gradient_identity(&ctx, &mut rep)?,
        ExperimentKind::Formula1 | ExperimentKind::Wtg => commutator(&ctx, kind, &mut rep)?,
        ExperimentKind::WstarIdentity => wstar(&ctx, &mut rep)?,
        ExperimentKind::KernelNorm => kernel_norm(&ctx, &mut rep)?,
        ExperimentKind::Regularity => regularity(&ctx, &mut rep)?,
        ExperimentKind::Constants => constants(&ctx, &mut rep)?,
        ExperimentKind::SpecfunCheck => specfun(&ctx, &mut rep)?,
    }
    rep.fill_orders();
    Ok(rep)
}

fn worst(values: &[Complex64], expected: f64) -> (f64, f64) {
    values
        .iter()
        .map(|v| (v.re, (v - re(expected)).norm()))
        .fold((expected, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
}

fn gauss(ctx: &Ctx<'_>, rep: &mut Report) -> Result<()> {
    let cfg = ctx.cfg;
    match cfg.layer {
        LayerChoice::Double => {
            if cfg.operator.has_lower_order() {
                return Err(Error::InvalidConfig(
                    "operator: the double-layer closed form needs a1 = 0 and a0 = 0".into(),
                ));
            }
            let mut max: f64 = 0.0;
            for c in ctx.curves()? {
                let one = BoundaryFunction::constant(c.len(), re(1.0));
                let ops = BoundaryOperators::new(&ctx.fs, &c);
                let inner = double_layer_at(&ctx.fs, &c, &one, &interior_probes(&c, PROBES, PROBE_DISTANCE));
                let outer = double_layer_at(&ctx.fs, &c, &one, &exterior_probes(&c, PROBES, PROBE_DISTANCE));
                let on = ops.double(&one).values;
                for (q, vals, exp) in [("interior", inner, 1.0), ("boundary", on, 0.5), ("exterior", outer, 0.0)] {
                    let (v, r) = worst(&vals, exp);
                    max = max.max(r);
                    rep.push(Row::new(c.len(), q, v, r));
                }
            }
            rep.check(Check::below("max error of w[1] against 1, 1/2, 0", max, ctx.tol(1e-10)));
        }
        LayerChoice::Single => {
            let rho = match cfg.curve {
                crate::experiments::CurveSpec::Circle { radius } if cfg.operator.is_laplace() => radius,
                _ => {
                    return Err(Error::InvalidConfig(
                        "layer: the single-layer closed form needs the Laplacian on a circle".into(),
                    ))
                }
            };
            let exact = rho * rho.ln();
            let mut max: f64 = 0.0;
            for c in ctx.curves()? {
                let one = BoundaryFunction::constant(c.len(), re(1.0));
                let on = BoundaryOperators::new(&ctx.fs, &c).single(&one).values;
                let centre = single_layer_at(&ctx.fs, &c, &one, &[[0.0, 0.0]]);
                for (q, vals) in [("boundary", on), ("centre", centre)] {
                    let (v, r) = worst(&vals, exact);
                    max = max.max(r);
                    rep.push(Row::new(c.len(), q, v, r));
                }
            }
            rep.check(Check::below("max error of v[1] against rho ln rho", max, ctx.tol(1e-12)));
        }
    }
    Ok(())
}

fn jumps(ctx: &Ctx<'_>, kind: ExperimentKind, rep: &mut Report) -> Result<()> {
    let offsets = ctx.cfg.offsets.clone().unwrap_or_else(|| DEFAULT_JUMP_OFFSETS.to_vec());
    let mut max: f64 = 0.0;
    for c in ctx.curves()? {
        let mu = ctx.cfg.density.sample(&c);
        let r = if kind == ExperimentKind::JumpDouble {
            double_layer_jump_residual(&ctx.fs, &c, &mu, &offsets)?
        } else {
            single_layer_jump_residual(&ctx.fs, &c, &mu, &offsets)?
        };
        rep.push(Row::new(c.len(), "interior_limit", r.plus, r.plus));
        rep.push(Row::new(c.len(), "exterior_limit", r.minus, r.minus));
        max = max.max(r.max());
    }
    let what = if kind == ExperimentKind::JumpDouble {
        "extrapolated |w^+- - (+-mu/2 + w)|"
    } else {
        "extrapolated |grad v^+- - (pv -+ nu mu / 2q)|"
    };
    rep.check(Check::below(what, max, ctx.tol(1e-6)));
    Ok(())
}

fn gradient_identity(ctx: &Ctx<'_>, rep: &mut Report) -> Result<()> {
    let mut max: f64 = 0.0;
    for c in ctx.curves()? {
        let mu = ctx.cfg.density.sample(&c);
        let probes = interior_probes(&c, PROBES, PROBE_DISTANCE);
        let r = double_layer_gradient_identity_residual(&ctx.fs, &c, &mu, &probes)?;
        rep.push(Row::new(c.len(), "scaled_residual", r.max_abs, r.scaled));
        max = max.max(r.scaled);
    }
    rep.check(Check::below("scaled interior residual", max, ctx.operator_tol(1e-5, 1e-4)));
    Ok(())
}

fn commutator(ctx: &Ctx<'_>, kind: ExperimentKind, rep: &mut Report) -> Result<()> {
    let l = ctx.cfg.index(0, 1)?;
    let j = ctx.cfg.index(1, 2)?;
    let mut last = None;
    for c in ctx.curves()? {
        let ops = BoundaryOperators::new(&ctx.fs, &c);
        let mu = ctx.cfg.density.sample(&c);
        let (lhs, res) = if kind == ExperimentKind::Formula1 {
            let r = ctx.cfg.index(2, 1)?;
            let g = c.trace(|x| re(x[0]));
            let lhs = tangential_m(&c, &ops.q(r, &g, &mu), l, j).sup_norm();
            (lhs, formula1_residual(&ops, &g, &mu, l, j, r))
        } else {
            let lhs = tangential_m(&c, &ops.double(&mu), l, j).sup_norm();
            (lhs, wtg_residual(&ops, &mu, l, j))
        };
        rep.push(Row::new(c.len(), "residual", lhs, res));
        last = Some(res);
    }
    let tol = ctx.operator_tol(1e-6, 1e-4);
    rep.check(Check::below("max-node |LHS - RHS| at the finest N", last.unwrap_or(f64::NAN), tol));
    if ctx.cfg.n.len() >= 2 {
        let rows: Vec<&Row> = rep.rows.iter().filter(|r| r.quantity == "residual").collect();
        let (a, b) = (rows[rows.len() - 2], rows[rows.len() - 1]);
        let order = (a.residual / b.residual).ln() / (b.n as f64 / a.n as f64).ln();
        rep.check(Check::at_least("observed order between the two finest N", order, 3.0));
    }
    Ok(())
}

fn wstar(ctx: &Ctx<'_>, rep: &mut Report) -> Result<()> {
    let mut max: f64 = 0.0;
    let closed = ctx.cfg.operator.is_laplace()
        && ctx.cfg.density == DensitySpec::Constant
        && ctx.cfg.curve == crate::experiments::CurveSpec::Circle { radius: 1.0 };
    let mut closed_err: f64 = 0.0;
    for c in ctx.curves()? {
        let ops = BoundaryOperators::new(&ctx.fs, &c);
        let mu = ctx.cfg.density.sample(&c);
        let r = wstar_identity_residual(&ops, &mu);
        let ws = ops.wstar(&mu);
        rep.push(Row::new(c.len(), "identity", ws.sup_norm(), r));
        max = max.max(r);
        if closed {
            let (v, e) = worst(&ws.values, 0.5);
            rep.push(Row::new(c.len(), "wstar_of_one", v, e));
            closed_err = closed_err.max(e);
        }
    }
    rep.check(Check::below("max-node identity residual", max, ctx.tol(1e-8)));
    if closed {
        rep.check(Check::below("|w_*[1] - 1/2| on the unit circle", closed_err, 1e-10));
    }
    Ok(())
}

/// Class exponents `(g1, g2, g3)` of the designated classes.
fn designated(kernel: KernelChoice) -> KernelClassParams {
    match kernel {
        KernelChoice::Single => KernelClassParams::new(0.5, 1.0, 1.0),
        KernelChoice::Gradient => KernelClassParams::new(1.0, 2.0, 1.0),
        KernelChoice::Double => KernelClassParams::new(0.5, 1.5, 1.0),
    }
}

fn kernel_norm(ctx: &Ctx<'_>, rep: &mut Report) -> Result<()> {
    let choice = ctx.cfg.kernel.unwrap_or(KernelChoice::Double);
    let budgets = ctx.cfg.budgets.clone().unwrap_or_else(|| vec![1 << 14, 1 << 16]);
    let params = designated(choice);
    let fs = &ctx.fs;
    let a2 = *fs.coeffs().a2();
    let a1 = *fs.coeffs().a1();
    let mut max_change: f64 = 0.0;
    let mut transfer: f64 = 0.0;
    for c in ctx.curves()? {
        let pts = c.points();
        let z = |i: usize, j: usize| [pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]];
        let single = |i: usize, j: usize| fs.eval_at(z(i, j));
        let grad0 = |i: usize, j: usize| fs.grad_at(z(i, j))[0];
        let grad1 = |i: usize, j: usize| fs.grad_at(z(i, j))[1];
        let double = |i: usize, j: usize| {
            let zz = z(i, j);
            let nu = c.normals()[j];
            let an = crate::operator::mat_vec(&a2, &nu);
            let g = fs.grad_at(zz);
            -(g[0] * an[0] + g[1] * an[1]) - crate::operator::cdot(&a1, &nu) * fs.eval_at(zz)
        };
        let kernels: Vec<(&str, &(dyn Fn(usize, usize) -> Complex64 + Sync))> = match choice {
            KernelChoice::Single => vec![("single", &single)],
            KernelChoice::Gradient => vec![("grad_1", &grad0), ("grad_2", &grad1)],
            KernelChoice::Double => vec![("double", &double)],
        };
        for (name, k) in &kernels {
            let mut prev: Option<f64> = None;
            for &b in &budgets {
                let est = kernel_norm_estimate(k, &c, params, b, ctx.cfg.seed);
                let norm = est.norm();
                let change = prev.map_or(0.0, |p| (norm - p).abs() / p.abs().max(f64::MIN_POSITIVE));
                max_change = max_change.max(change);
                rep.push(Row::new(c.len(), &format!("{name}_norm_budget_{b}"), norm, change));
                prev = Some(norm);
            }
        }
        if choice == KernelChoice::Gradient {
            let b = *budgets.last().expect("validated non-empty");
            let g = c.trace(|x| re(x[0]));
            let lip = holder_quotient(&c, &g, ModulusSpec::Power(1.0));
            for (name, k) in &kernels {
                let zn = kernel_norm_estimate(k, &c, params, b, ctx.cfg.seed).norm();
                let h = build_h(k, &g);
                let hn = kernel_norm_estimate(&h, &c, KernelClassParams::new(0.0, 1.0, 1.0), b, ctx.cfg.seed).norm();
                let ratio = hn / (4.0 * zn * lip);
                transfer = transfer.max(ratio);
                rep.push(Row::new(c.len(), &format!("{name}_h_over_bound"), hn, ratio));
            }
        }
    }
    if budgets.len() >= 2 {
        rep.check(Check::below("relative norm change between budgets", max_change, ctx.tol(0.1)));
    }
    if choice == KernelChoice::Gradient {
        rep.check(Check::at_most("sampled |H| / (4 |Z| lip g)", transfer, 1.0));
    }
    Ok(())
}

fn regularity(ctx: &Ctx<'_>, rep: &mut Report) -> Result<()> {
    let spec = ctx.cfg.modulus.unwrap_or(match ctx.cfg.target {
        QuotientTarget::Trace => ModulusSpec::Power(0.9),
        QuotientTarget::Tangential => ModulusSpec::LogPower(0.9),
    });
    let mut prev: Option<f64> = None;
    let mut worst_ratio: f64 = 0.0;
    for c in ctx.curves()? {
        let mu = ctx.cfg.density.sample(&c);
        let ops = BoundaryOperators::new(&ctx.fs, &c);
        let w = ops.double(&mu);
        let f = match ctx.cfg.target {
            QuotientTarget::Trace => w,
            QuotientTarget::Tangential => tangential_m(&c, &w, 0, 1),
        };
        let q = holder_quotient(&c, &f, spec);
        let ratio = prev.map_or(1.0, |p| q / p);
        worst_ratio = worst_ratio.max(ratio);
        rep.push(Row::new(c.len(), "quotient", q, ratio));
        prev = Some(q);
    }
    rep.check(Check::below("largest quotient growth per refinement", worst_ratio, ctx.tol(2.0)));
    Ok(())
}

/// Trigonometric polynomial with seeded coefficients decaying like `1/(1+k)^2`.
fn trig_poly(c: &BoundaryCurve, degree: usize, rng: &mut impl rand::Rng) -> BoundaryFunction {
    let coef: Vec<(f64, f64)> = (0..=degree)
        .map(|k| {
            let s = 1.0 / ((1 + k) * (1 + k)) as f64;
            (rng.gen_range(-1.0..1.0) * s, rng.gen_range(-1.0..1.0) * s)
        })
        .collect();
    c.sample(|t| {
        re(coef
            .iter()
            .enumerate()
            .map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin())
            .sum())
    })
}

fn constants(ctx: &Ctx<'_>, rep: &mut Report) -> Result<()> {
    use rand::SeedableRng;
    let alpha = ctx.cfg.modulus.map_or(1.0, |m| m.exponent());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut ibp: f64 = 0.0;
    let unit_circle = matches!(ctx.cfg.curve.kind(), CurveKind::Circle { radius } if radius == 1.0);
    let mut ccom_err: f64 = 0.0;
    for c in ctx.curves()? {
        let mut pairs = vec![(c.trace(|x| re(x[0])), c.trace(|x| re(x[1])))];
        for _ in 0..4 {
            pairs.push((trig_poly(&c, c.len() / 4, &mut rng), trig_poly(&c, c.len() / 4, &mut rng)));
        }
        let mut r: f64 = 0.0;
        for (phi, psi) in &pairs {
            let s = quad(&c, &tangential_m(&c, phi, 0, 1).mul(psi)) + quad(&c, &phi.mul(&tangential_m(&c, psi, 0, 1)));
            r = r.max(s.norm());
        }
        ibp = ibp.max(r);
        rep.push(Row::new(c.len(), "integration_by_parts", r, r));
        let n2 = c.len() * c.len();
        let k = boundary_constants(&c, alpha, ConstantExponents::default(), n2, ctx.cfg.seed)?;
        let e = if unit_circle && alpha == 1.0 { (k.c_com - 0.5).abs() } else { f64::NAN };
        if unit_circle && alpha == 1.0 {
            ccom_err = ccom_err.max(e);
        }
        rep.push(Row::new(c.len(), "c_com", k.c_com, e));
        for (q, v) in [("c1", k.c1), ("c2", k.c2), ("c3", k.c3), ("c4", k.c4)] {
            rep.push(Row::new(c.len(), q, v, f64::NAN));
        }
    }
    rep.check(Check::below("|int M_12[phi] psi + int phi M_12[psi]|", ibp, ctx.tol(1e-12)));
    if unit_circle && alpha == 1.0 {
        rep.check(Check::below("|c_com - 1/2| on the unit circle", ccom_err, 1e-12));
    }
    Ok(())
}

fn specfun(ctx: &Ctx<'_>, rep: &mut Report) -> Result<()> {
    let grid: Vec<f64> = (0..=396).map(|k| 0.1 + 9.9 * k as f64 / 396.0).collect();
    let mut worst: f64 = 0.0;
    type Pair = (&'static str, fn(f64) -> f64, fn(f64) -> f64, bool);
    let funcs: [Pair; 4] = [
        ("j0", j0, oracle::j0_ref, true),
        ("y0", y0, oracle::y0_ref, true),
        ("i0", i0, oracle::i0_ref, false),
        ("k0", k0, oracle::k0_ref, false),
    ];
    for (name, f, oracle_f, oscillatory) in funcs {
        let (mut at, mut err): (f64, f64) = (0.0, 0.0);
        for &x in &grid {
            let o = oracle_f(x);
            let scale = if oscillatory { o.abs().max(oracle::oscillation_envelope(x)) } else { o.abs() };
            let e = (f(x) - o).abs() / scale;
            if e > err {
                err = e;
                at = x;
            }
        }
        worst = worst.max(err);
        rep.push(Row::new(0, &format!("{name}_rel_error_at_x"), at, err));
    }
    rep.check(Check::below("normalized Bessel error on [0.1, 10]", worst, ctx.tol(1e-10)));

    let mut kappas = vec![0.0, 1.0, -1.0];
    let own = ctx.fs.reduced().real_kappa();
    if let Some(k) = own {
        if !kappas.contains(&k) {
            kappas.push(k);
        }
    }
    let mut ode: f64 = 0.0;
    for &kappa in &kappas {
        let p = RadialProfile::new(kappa);
        let h = 1e-4;
        let mut r_max: f64 = 0.0;
        for k in 0..=90 {
            let r = 0.5 + 4.5 * k as f64 / 90.0;
            let (w, dw) = p.eval(r)?;
            let d2 = (p.eval(r + h)?.1 - p.eval(r - h)?.1) / (2.0 * h);
            r_max = r_max.max((d2 + dw / r + kappa * w).abs());
        }
        ode = ode.max(r_max);
        rep.push(Row::new(0, &format!("ode_residual_kappa_{kappa}"), kappa, r_max));
    }
    rep.check(Check::below("radial profile ODE residual on [0.5, 5]", ode, 1e-6));
    Ok(())
}
