//! Double-double power series for `J0`, `Y0`, `I0`, `K0`, used as an
//! independent reference for the production Bessel routines.

use std::f64::consts::FRAC_2_PI;

use twofloat::TwoFloat;

const EULER_GAMMA: TwoFloat = TwoFloat::from_f64(0.577_215_664_901_532_9);
const EULER_GAMMA_LO: f64 = -4.942_915_152_430_645e-18;

fn gamma() -> TwoFloat {
    EULER_GAMMA + EULER_GAMMA_LO
}

/// Quotient with one Newton correction; `TwoFloat / TwoFloat` alone keeps
/// only about double precision.
fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q = a / b.hi();
    let r = a - q * b;
    q + r / b.hi()
}

fn frac_2_pi() -> TwoFloat {
    div(TwoFloat::from(2.0), twofloat::consts::PI)
}

/// Natural logarithm by `ln m = 2 atanh((m-1)/(m+1))` after scaling `m`
/// into `[1/sqrt 2, sqrt 2]`.
pub fn ln_dd(y: f64) -> TwoFloat {
    assert!(y > 0.0);
    let mut k = 0i32;
    let mut m = y;
    while m > std::f64::consts::SQRT_2 {
        m *= 0.5;
        k += 1;
    }
    while m < std::f64::consts::FRAC_1_SQRT_2 {
        m *= 2.0;
        k -= 1;
    }
    let mm = TwoFloat::from(m);
    let z = div(mm - 1.0, mm + 1.0);
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut j = 1.0;
    loop {
        term *= z2;
        j += 2.0;
        let add = term / j;
        sum += add;
        if add.hi().abs() < 1e-34 {
            break;
        }
    }
    sum * 2.0 + twofloat::consts::LN_2 * f64::from(k)
}

/// `(sum_k s^k t_k, sum_k s^k H_k t_k)` with `t_k = (x^2/4)^k / (k!)^2` and
/// `s = -1` for the oscillatory family, `+1` for the modified one.
fn series(x: f64, alternating: bool) -> (TwoFloat, TwoFloat) {
    let q = TwoFloat::from(x) * x * 0.25;
    let mut t = TwoFloat::from(1.0);
    let mut plain = TwoFloat::from(1.0);
    let mut harmonic = TwoFloat::from(0.0);
    let mut h = TwoFloat::from(0.0);
    for k in 1..200 {
        let kf = f64::from(k);
        t = t * q / (kf * kf);
        h += TwoFloat::from(1.0) / kf;
        let signed = if alternating && k % 2 == 1 { -t } else { t };
        plain += signed;
        harmonic += signed * h;
        if t.hi() < 1e-40 * plain.hi().abs().max(1e-300) && k > 5 {
            break;
        }
    }
    (plain, harmonic)
}

pub fn j0_ref(x: f64) -> f64 {
    series(x, true).0.hi()
}

pub fn i0_ref(x: f64) -> f64 {
    series(x, false).0.hi()
}

pub fn y0_ref(x: f64) -> f64 {
    let (j, hj) = series(x, true);
    let l = ln_dd(0.5 * x) + gamma();
    // sum_{k>=1} (-1)^{k+1} H_k t_k = -hj
    (frac_2_pi() * (l * j - hj)).hi()
}

pub fn k0_ref(x: f64) -> f64 {
    let (i, hi) = series(x, false);
    let l = ln_dd(0.5 * x) + gamma();
    (hi - l * i).hi()
}

/// Envelope used to normalize errors of the oscillatory functions, which have
/// zeros where a pure relative error is meaningless.
pub fn oscillation_envelope(x: f64) -> f64 {
    (FRAC_2_PI / x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_matches_f64() {
        for &y in &[0.05, 0.5, 1.0, 2.0, 5.0, 1e6] {
            assert!((ln_dd(y).hi() - y.ln()).abs() <= 1e-15 * y.ln().abs().max(1.0));
        }
        let l5 = ln_dd(5.0);
        assert_eq!(l5.hi(), 1.609_437_912_434_100_3);
        assert!((l5.lo() - 9.280_081_691_085_902e-17).abs() < 1e-30);
    }

    #[test]
    fn reference_values() {
        assert!((j0_ref(1.0) - 0.765_197_686_557_966_6).abs() < 1e-16);
        assert!((y0_ref(1.0) - 0.088_256_964_215_676_96).abs() < 1e-16);
        assert!((i0_ref(1.0) - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((k0_ref(1.0) - 0.421_024_438_240_708_3).abs() < 1e-16);
        assert!((k0_ref(10.0) / 1.778_006_231_616_917e-5 - 1.0).abs() < 1e-13);
    }
}
