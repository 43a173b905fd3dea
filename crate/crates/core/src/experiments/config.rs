use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{preset_curve, BoundaryCurve, BoundaryFunction, CurveKind};
use crate::operator::{Mat2, OperatorCoefficients, Vec2};
use crate::schauder::ModulusSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    JumpSingle,
    JumpDouble,
    GaussIdentity,
    GradientIdentity,
    Formula1,
    Wtg,
    WstarIdentity,
    KernelNorm,
    Regularity,
    Constants,
    SpecfunCheck,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 11] = [
        ExperimentKind::JumpSingle,
        ExperimentKind::JumpDouble,
        ExperimentKind::GaussIdentity,
        ExperimentKind::GradientIdentity,
        ExperimentKind::Formula1,
        ExperimentKind::Wtg,
        ExperimentKind::WstarIdentity,
        ExperimentKind::KernelNorm,
        ExperimentKind::Regularity,
        ExperimentKind::Constants,
        ExperimentKind::SpecfunCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::JumpSingle => "jump_single",
            ExperimentKind::JumpDouble => "jump_double",
            ExperimentKind::GaussIdentity => "gauss_identity",
            ExperimentKind::GradientIdentity => "gradient_identity",
            ExperimentKind::Formula1 => "formula1",
            ExperimentKind::Wtg => "wtg",
            ExperimentKind::WstarIdentity => "wstar_identity",
            ExperimentKind::KernelNorm => "kernel_norm",
            ExperimentKind::Regularity => "regularity",
            ExperimentKind::Constants => "constants",
            ExperimentKind::SpecfunCheck => "specfun_check",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::JumpSingle => "one-sided limits of the single-layer gradient against the jump formula",
            ExperimentKind::JumpDouble => "one-sided limits of the double layer against +-mu/2 + w",
            ExperimentKind::GaussIdentity => "potentials of the constant density with closed forms",
            ExperimentKind::GradientIdentity => "gradient of the double layer through single layers, at interior probes",
            ExperimentKind::Formula1 => "tangential derivative of Q against its commutator expansion",
            ExperimentKind::Wtg => "tangential derivative of the double layer against its commutator expansion",
            ExperimentKind::WstarIdentity => "w_* against its expression through Q, w and v",
            ExperimentKind::KernelNorm => "sampled kernel-class norms under growing sample budgets",
            ExperimentKind::Regularity => "Hoelder quotients of layer outputs under refinement",
            ExperimentKind::Constants => "integration by parts and sampled boundary constants",
            ExperimentKind::SpecfunCheck => "Bessel functions against double-double series; radial ODE residual",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Real coefficient triple; every field defaults to the Laplacian's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default = "identity")]
    pub a2: Mat2,
    #[serde(default)]
    pub a1: Vec2,
    #[serde(default)]
    pub a0: f64,
}

fn identity() -> Mat2 {
    [[1.0, 0.0], [0.0, 1.0]]
}

impl Default for OperatorSpec {
    fn default() -> Self {
        Self {
            a2: identity(),
            a1: [0.0; 2],
            a0: 0.0,
        }
    }
}

impl OperatorSpec {
    pub fn new(a2: Mat2, a1: Vec2, a0: f64) -> Self {
        Self { a2, a1, a0 }
    }

    pub fn coefficients(&self) -> Result<OperatorCoefficients> {
        OperatorCoefficients::real(self.a2, self.a1, self.a0)
    }

    pub fn is_laplace(&self) -> bool {
        *self == Self::default()
    }

    pub fn has_lower_order(&self) -> bool {
        self.a1 != [0.0; 2] || self.a0 != 0.0
    }

    /// The five operators exercised by the acceptance suite.
    pub fn test_operators() -> Vec<OperatorSpec> {
        let i2 = identity();
        vec![
            OperatorSpec::default(),
            OperatorSpec::new(i2, [0.0; 2], 1.0),
            OperatorSpec::new(i2, [0.0; 2], -1.0),
            OperatorSpec::new([[4.0, 0.0], [0.0, 1.0]], [0.0; 2], 0.0),
            OperatorSpec::new(i2, [2.0, 0.0], 1.0),
        ]
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a2=[[{},{}],[{},{}]] a1=[{},{}] a0={}",
            self.a2[0][0], self.a2[0][1], self.a2[1][0], self.a2[1][1], self.a1[0], self.a1[1], self.a0
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    Kite {},
}

fn one() -> f64 {
    1.0
}

impl CurveSpec {
    pub fn kind(&self) -> CurveKind {
        match *self {
            CurveSpec::Circle { radius } => CurveKind::Circle { radius },
            CurveSpec::Ellipse { a, b } => CurveKind::Ellipse { a, b },
            CurveSpec::Kite {} => CurveKind::Kite,
        }
    }

    pub fn build(&self, n: usize) -> Result<BoundaryCurve> {
        preset_curve(self.kind(), n)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            CurveSpec::Circle { radius } => radius > 0.0 && radius.is_finite(),
            CurveSpec::Ellipse { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            CurveSpec::Kite {} => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("curve: dimensions must be positive".into()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Constant,
    #[default]
    Cos,
    Sin,
    /// `sin t |sin t|`, once continuously differentiable.
    SinAbsSin,
    /// Square root of a continuous triangle wave with `k` teeth.
    RoughSawtooth(u32),
}

impl DensitySpec {
    pub fn sample(&self, curve: &BoundaryCurve) -> BoundaryFunction {
        let f = |t: f64| -> f64 {
            match *self {
                DensitySpec::Constant => 1.0,
                DensitySpec::Cos => t.cos(),
                DensitySpec::Sin => t.sin(),
                DensitySpec::SinAbsSin => t.sin() * t.sin().abs(),
                DensitySpec::RoughSawtooth(k) => {
                    let u = (f64::from(k) * t / std::f64::consts::TAU).fract();
                    (1.0 - (2.0 * u - 1.0).abs()).sqrt()
                }
            }
        };
        curve.sample(|t| Complex64::new(f(t), 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelChoice {
    Single,
    Gradient,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerChoice {
    Single,
    #[default]
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientTarget {
    /// The boundary trace of the double layer.
    #[default]
    Trace,
    /// `M_12` of the boundary trace.
    Tangential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub operator: OperatorSpec,
    #[serde(default = "default_curve")]
    pub curve: CurveSpec,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub density: DensitySpec,
    /// 1-based `(l, j, r)`; experiments use the leading entries they need.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelChoice>,
    #[serde(default)]
    pub layer: LayerChoice,
    #[serde(default)]
    pub target: QuotientTarget,
}

fn default_curve() -> CurveSpec {
    CurveSpec::Kite {}
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, operator: OperatorSpec, curve: CurveSpec, n: &[usize]) -> Self {
        Self {
            experiment: kind.name().to_string(),
            operator,
            curve,
            n: n.to_vec(),
            density: DensitySpec::default(),
            indices: None,
            modulus: None,
            seed: 0,
            output: None,
            tolerance: None,
            offsets: None,
            budgets: None,
            kernel: None,
            layer: LayerChoice::default(),
            target: QuotientTarget::default(),
        }
    }

    pub fn with_density(mut self, d: DensitySpec) -> Self {
        self.density = d;
        self
    }

    pub fn with_indices(mut self, idx: &[usize]) -> Self {
        self.indices = Some(idx.to_vec());
        self
    }

    pub fn with_modulus(mut self, m: ModulusSpec) -> Self {
        self.modulus = Some(m);
        self
    }

    pub fn with_kernel(mut self, k: KernelChoice) -> Self {
        self.kernel = Some(k);
        self
    }

    pub fn with_budgets(mut self, b: &[usize]) -> Self {
        self.budgets = Some(b.to_vec());
        self
    }

    pub fn with_layer(mut self, l: LayerChoice) -> Self {
        self.layer = l;
        self
    }

    pub fn with_target(mut self, t: QuotientTarget) -> Self {
        self.target = t;
        self
    }

    pub fn kind(&self) -> Result<ExperimentKind> {
        self.experiment.parse()
    }

    /// Checks the field-level invariants that the schema cannot express.
    pub fn validate(&self) -> Result<ExperimentKind> {
        let kind = self.kind()?;
        let bad = |field: &str, msg: &str| Err(Error::InvalidConfig(format!("{field}: {msg}")));
        if kind != ExperimentKind::SpecfunCheck && self.n.is_empty() {
            return bad("n", "at least one node count is required");
        }
        if self.n.iter().any(|n| n % 2 == 1 || *n < 8) {
            return bad("n", "node counts must be even and at least 8");
        }
        if self.n.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n", "node counts must be strictly increasing");
        }
        self.curve.validate()?;
        self.operator
            .coefficients()
            .map_err(|e| Error::InvalidConfig(format!("operator: {e}")))?;
        if let Some(idx) = &self.indices {
            if idx.iter().any(|&i| !(1..=2).contains(&i)) {
                return bad("indices", "entries must be 1 or 2");
            }
        }
        if let Some(m) = &self.modulus {
            m.validate().map_err(|e| Error::InvalidConfig(format!("modulus: {e}")))?;
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return bad("tolerance", "must be positive");
            }
        }
        if let Some(h) = &self.offsets {
            if h.is_empty() || h.iter().any(|v| !(*v > 0.0)) || h.windows(2).any(|w| w[0] <= w[1]) {
                return bad("offsets", "must be positive and strictly decreasing");
            }
        }
        if let Some(b) = &self.budgets {
            if b.is_empty() || b.contains(&0) || b.windows(2).any(|w| w[0] >= w[1]) {
                return bad("budgets", "must be positive and strictly increasing");
            }
        }
        if let DensitySpec::RoughSawtooth(0) = self.density {
            return bad("density", "rough_sawtooth needs at least one tooth");
        }
        Ok(kind)
    }

    /// 0-based index `k` of the configured list, or `default` (1-based).
    pub(crate) fn index(&self, k: usize, default: usize) -> Result<usize> {
        let v = match &self.indices {
            None => default,
            Some(idx) => *idx
                .get(k)
                .ok_or_else(|| Error::InvalidConfig(format!("indices: entry {} is required", k + 1)))?,
        };
        Ok(v - 1)
    }
}

/// Parses a JSON config, reporting the path of the offending field.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig =
        serde_path_to_error::deserialize(de).map_err(|e| Error::InvalidConfig(format!("{}: {}", e.path(), e.inner())))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_defaults_to_laplace() {
        let c = parse_config(r#"{"experiment": "gauss_identity", "curve": {"kind": "circle"}, "n": [64, 128]}"#).unwrap();
        assert!(c.operator.is_laplace());
        assert_eq!(c.curve, CurveSpec::Circle { radius: 1.0 });
        assert_eq!(c.kind().unwrap(), ExperimentKind::GaussIdentity);
    }

    #[test]
    fn unknown_experiment() {
        let e = parse_config(r#"{"experiment": "unknown_name", "n": [64]}"#).unwrap_err();
        assert_eq!(e, Error::UnknownExperiment("unknown_name".into()));
    }

    #[test]
    fn unknown_keys_are_errors_with_paths() {
        let e = parse_config(r#"{"experiment": "wtg", "n": [64], "operator": {"a3": 1}}"#).unwrap_err();
        match e {
            Error::InvalidConfig(msg) => assert!(msg.starts_with("operator"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(parse_config(r#"{"experiment": "wtg", "n": [64], "bogus": 1}"#).is_err());
        assert!(parse_config(r#"{"experiment": "wtg", "n": [64], "curve": {"kind": "kite", "r": 1}}"#).is_err());
    }

    #[test]
    fn node_lists_are_validated() {
        for n in ["[64, 32]", "[63]", "[64, 64]", "[]"] {
            let text = format!(r#"{{"experiment": "wtg", "n": {n}}}"#);
            assert!(matches!(parse_config(&text), Err(Error::InvalidConfig(_))), "{n}");
        }
    }

    #[test]
    fn densities_parse() {
        let c = parse_config(r#"{"experiment": "regularity", "n": [64], "density": {"rough_sawtooth": 6}, "modulus": {"power": 0.9}}"#).unwrap();
        assert_eq!(c.density, DensitySpec::RoughSawtooth(6));
        assert_eq!(c.modulus, Some(ModulusSpec::Power(0.9)));
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_config(&json).unwrap(), c);
    }

    #[test]
    fn sawtooth_is_continuous_and_bounded() {
        let curve = preset_curve(CurveKind::Circle { radius: 1.0 }, 256).unwrap();
        let f = DensitySpec::RoughSawtooth(4).sample(&curve);
        assert!(f.values.iter().all(|v| v.re >= 0.0 && v.re <= 1.0));
        assert!(f.values[0].re < 1e-12);
        assert!((f.values[32].re - 1.0).abs() < 1e-12);
    }
}
