//! Moduli of continuity, sampled Hölder quotients and discrete Schauder norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{tangential_m, BoundaryCurve, BoundaryFunction};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusSpec {
    /// `r^alpha`.
    Power(f64),
    /// `r^theta |ln r|`, frozen at its value at `r_theta = exp(-1/theta)` beyond it.
    LogPower(f64),
}

impl ModulusSpec {
    pub fn exponent(&self) -> f64 {
        match *self {
            ModulusSpec::Power(a) | ModulusSpec::LogPower(a) => a,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let a = self.exponent();
        if a > 0.0 && a <= 1.0 {
            Ok(())
        } else {
            Err(Error::BadExponent(a))
        }
    }

    /// Value at `r > 0`; callers guarantee the domain.
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            ModulusSpec::Power(a) => r.powf(a),
            ModulusSpec::LogPower(th) => {
                let rt = (-1.0 / th).exp();
                let s = r.min(rt);
                s.powf(th) * s.ln().abs()
            }
        }
    }
}

pub fn omega(spec: ModulusSpec, r: f64) -> Result<f64> {
    spec.validate()?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("modulus needs r > 0, got {r}")));
    }
    Ok(spec.eval(r))
}

/// `max |f_i - f_j| / omega(|x_i - x_j|)` over all distinct node pairs.
pub fn holder_quotient(curve: &BoundaryCurve, f: &BoundaryFunction, spec: ModulusSpec) -> f64 {
    let pts = curve.points();
    let n = curve.len();
    par::map_range(n, |i| {
        let mut m: f64 = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let r = (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]);
            if r > 0.0 {
                m = m.max((f.values[i] - f.values[j]).norm() / spec.eval(r));
            }
        }
        m
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// `sup|f| + sum_{l,r} |M_lr f|_{m-1}`, bottoming out at
/// `sup|f| + holder_quotient` for `m = 0`.
pub fn schauder_norm(curve: &BoundaryCurve, f: &BoundaryFunction, m: usize, spec: ModulusSpec) -> f64 {
    let sup = f.sup_norm();
    if m == 0 {
        return sup + holder_quotient(curve, f, spec);
    }
    let mut total = sup;
    for l in 0..2 {
        for r in 0..2 {
            if l != r {
                total += schauder_norm(curve, &tangential_m(curve, f, l, r), m - 1, spec);
            }
        }
    }
    total
}
