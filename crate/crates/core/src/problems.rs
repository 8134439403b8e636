//! The six scalable robust-optimization benchmarks and their registry of
//! known robust and original optima.
//!
//! F2..F6 share the structure `c - (H(x1) + H(x2)) * G(x)` with
//! `G(x) = 1 + sum_{i>=3} 50 x_i^2`; only `H` and the constant `c` differ.
//! F1 is a Gaussian mixture whose parameters come from configuration, with
//! a built-in default instance.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::rng::RngStream;
use crate::types::{Bounds, DecisionVector, Fitness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemId {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
}

impl ProblemId {
    pub const ALL: [ProblemId; 6] =
        [ProblemId::F1, ProblemId::F2, ProblemId::F3, ProblemId::F4, ProblemId::F5, ProblemId::F6];

    fn min_dim(self) -> usize {
        match self {
            ProblemId::F1 => 2,
            _ => 3,
        }
    }

    fn domain(self) -> (f64, f64) {
        match self {
            ProblemId::F1 => (0.0, 10.0),
            _ => (0.0, 1.0),
        }
    }

    fn default_halfwidth(self) -> f64 {
        match self {
            ProblemId::F1 => 0.1,
            _ => 0.01,
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProblemId::F1 => "f1",
            ProblemId::F2 => "f2",
            ProblemId::F3 => "f3",
            ProblemId::F4 => "f4",
            ProblemId::F5 => "f5",
            ProblemId::F6 => "f6",
        };
        f.write_str(s)
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(ProblemId::F1),
            "f2" => Ok(ProblemId::F2),
            "f3" => Ok(ProblemId::F3),
            "f4" => Ok(ProblemId::F4),
            "f5" => Ok(ProblemId::F5),
            "f6" => Ok(ProblemId::F6),
            other => Err(Error::Parse(format!("unknown problem id {other:?}"))),
        }
    }
}

/// `f(x) = sum_j beta_j * prod_i exp(-(x_i - mu_ji)^2 / (2 sigma_j^2))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub betas: Vec<f64>,
    pub centers: Vec<Vec<f64>>,
    pub widths: Vec<f64>,
}

impl GaussianMixture {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let m = self.betas.len();
        if m == 0 {
            return Err(Error::config("gaussian mixture needs at least one component"));
        }
        if self.centers.len() != m || self.widths.len() != m {
            return Err(Error::config(format!(
                "gaussian mixture has {m} betas but {} centers and {} widths",
                self.centers.len(),
                self.widths.len()
            )));
        }
        if let Some(j) = self.betas.iter().position(|b| !b.is_finite()) {
            return Err(Error::config(format!("beta[{j}] is not finite")));
        }
        if let Some(j) = self.widths.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::config(format!("width[{j}] must be finite and positive")));
        }
        for (j, c) in self.centers.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::config(format!("center[{j}] has {} coordinates, expected {dim}", c.len())));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(format!("center[{j}] has a non-finite coordinate")));
            }
        }
        Ok(())
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for ((beta, center), sigma) in self.betas.iter().zip(&self.centers).zip(&self.widths) {
            let sq: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            total += beta * (-sq / (2.0 * sigma * sigma)).exp();
        }
        total
    }

    /// The shipped F1 instance: one dominant component (`beta = 1.2`,
    /// `sigma = 0.8`) at the registered optimum plus four lower distractors
    /// at least 5 units away from it.
    pub fn default_instance(dim: usize) -> GaussianMixture {
        const DOMINANT_BETA: f64 = 1.2;
        const DOMINANT_SIGMA: f64 = 0.8;
        const DISTRACTORS: usize = 4;
        const MIN_SEPARATION: f64 = 5.0;

        let dominant = f1_dominant_center(dim);
        let mut betas = vec![DOMINANT_BETA];
        let mut widths = vec![DOMINANT_SIGMA];
        let mut centers = vec![dominant.clone()];

        let mut rng = RngStream::new(0xF1F1_F1F1, dim as u64);
        while centers.len() < DISTRACTORS + 1 {
            let c: Vec<f64> = (0..dim).map(|_| 0.5 + 9.0 * rng.unit()).collect();
            let d2: f64 = c.iter().zip(&dominant).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2.sqrt() < MIN_SEPARATION {
                continue;
            }
            betas.push(0.3 + 0.5 * rng.unit());
            widths.push(0.5 + 0.5 * rng.unit());
            centers.push(c);
        }
        GaussianMixture { betas, centers, widths }
    }
}

const F1_CENTER_10: [f64; 10] = [6.0, 4.0, 1.3, 5.0, 5.0, 3.0, 4.0, 8.0, 4.0, 2.0];
const F1_CENTER_15: [f64; 15] = [6.0, 4.0, 1.3, 5.0, 5.0, 3.0, 4.0, 8.0, 4.0, 2.0, 1.0, 3.0, 5.0, 7.0, 9.0];
const F1_CENTER_20: [f64; 20] = [
    6.0, 4.0, 1.3, 5.0, 5.0, 3.0, 4.0, 8.0, 4.0, 2.0, 1.0, 3.0, 5.0, 7.0, 2.0, 1.0, 3.0, 5.0, 7.0, 1.0,
];

/// Center of the dominant F1 component. Uses the registered optimum where
/// one exists and cycles the 20-D pattern otherwise.
pub fn f1_dominant_center(dim: usize) -> Vec<f64> {
    match dim {
        10 => F1_CENTER_10.to_vec(),
        15 => F1_CENTER_15.to_vec(),
        20 => F1_CENTER_20.to_vec(),
        _ => (0..dim).map(|i| F1_CENTER_20[i % 20]).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    id: ProblemId,
    dim: usize,
    bounds: Bounds,
    halfwidth: Vec<f64>,
    mixture: Option<GaussianMixture>,
}

impl ProblemSpec {
    /// The benchmark with its standard bounds and perturbation law. F1 gets
    /// the default mixture instance.
    pub fn new(id: ProblemId, dim: usize) -> Result<Self> {
        let mixture = (id == ProblemId::F1).then(|| GaussianMixture::default_instance(dim));
        ProblemSpec::build(id, dim, mixture)
    }

    /// F1 with an explicit mixture.
    pub fn f1(dim: usize, mixture: GaussianMixture) -> Result<Self> {
        ProblemSpec::build(ProblemId::F1, dim, Some(mixture))
    }

    fn build(id: ProblemId, dim: usize, mixture: Option<GaussianMixture>) -> Result<Self> {
        if dim < id.min_dim() {
            return Err(Error::config(format!("{id} needs dim >= {}, got {dim}", id.min_dim())));
        }
        match (&mixture, id) {
            (None, ProblemId::F1) => return Err(Error::config("f1 requires gaussian mixture parameters")),
            (Some(m), ProblemId::F1) => m.validate(dim)?,
            (Some(_), _) => return Err(Error::config(format!("{id} takes no gaussian mixture"))),
            (None, _) => {}
        }
        let (lo, hi) = id.domain();
        Ok(ProblemSpec {
            id,
            dim,
            bounds: Bounds::uniform(dim, lo, hi)?,
            halfwidth: vec![id.default_halfwidth(); dim],
            mixture,
        })
    }

    /// Replaces the perturbation half-width on every coordinate. Zero turns
    /// the robust problem into plain optimization.
    pub fn with_perturbation_halfwidth(mut self, h: f64) -> Result<Self> {
        if !(h.is_finite() && h >= 0.0) {
            return Err(Error::config(format!("perturbation half-width must be >= 0, got {h}")));
        }
        self.halfwidth = vec![h; self.dim];
        Ok(self)
    }

    pub fn id(&self) -> ProblemId {
        self.id
    }

    pub fn mixture(&self) -> Option<&GaussianMixture> {
        self.mixture.as_ref()
    }

    /// Checked evaluation of the unperturbed objective.
    pub fn evaluate(&self, x: &DecisionVector) -> Result<Fitness> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: x.dim() });
        }
        Fitness::new(self.value(x))
    }

    /// Draws one perturbation vector, each coordinate `U(-h, h)`.
    pub fn sample_perturbation(&self, rng: &mut RngStream) -> DecisionVector {
        let delta = self.halfwidth.iter().map(|&h| h * (2.0 * rng.unit() - 1.0)).collect();
        DecisionVector::from_finite(delta)
    }

    pub fn from_config(cfg: &ProblemConfig) -> Result<Self> {
        let id: ProblemId = cfg.problem.parse()?;
        let spec = match (id, &cfg.f1) {
            (ProblemId::F1, Some(m)) => ProblemSpec::f1(cfg.dim, m.clone())?,
            (_, Some(_)) => return Err(Error::config(format!("{id} takes no [f1] table"))),
            _ => ProblemSpec::new(id, cfg.dim)?,
        };
        match cfg.perturbation_halfwidth {
            Some(h) => spec.with_perturbation_halfwidth(h),
            None => Ok(spec),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ProblemConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        ProblemSpec::from_config(&cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ProblemSpec::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_config(&self) -> ProblemConfig {
        let default_h = self.id.default_halfwidth();
        ProblemConfig {
            problem: self.id.to_string(),
            dim: self.dim,
            perturbation_halfwidth: self.halfwidth.iter().any(|&h| h != default_h).then(|| self.halfwidth[0]),
            f1: self.mixture.clone(),
        }
    }
}

/// On-disk problem definition.
///
/// ```toml
/// problem = "f1"
/// dim = 2
/// [f1]
/// betas = [1.0]
/// centers = [[5.0, 5.0]]
/// widths = [0.8]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub problem: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation_halfwidth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<GaussianMixture>,
}

impl Objective for ProblemSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn perturbation_halfwidth(&self) -> &[f64] {
        &self.halfwidth
    }

    #[inline]
    fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match self.id {
            ProblemId::F1 => self.mixture.as_ref().map_or(0.0, |m| m.value(x)),
            ProblemId::F2 => 1.0 - (h_f2(x[0]) + h_f2(x[1])) * g(x),
            ProblemId::F3 => 1.0 - (h_f3(x[0]) + h_f3(x[1])) * g(x),
            ProblemId::F4 => 1.399 - (h_f4(x[0]) + h_f4(x[1])) * g(x),
            ProblemId::F5 => 1.399 - (h_f5(x[0]) + h_f5(x[1])) * g(x),
            ProblemId::F6 => 2.0 - (h_f6(x[0]) + h_f6(x[1])) * g(x),
        }
    }
}

/// `exp(-((x - center) / width)^2)`, skipping the call once it must underflow.
#[inline(always)]
fn spike(x: f64, center: f64, width: f64) -> f64 {
    let t = (x - center) / width;
    let a = t * t;
    if a > 746.0 {
        0.0
    } else {
        (-a).exp()
    }
}

#[inline]
fn g(x: &[f64]) -> f64 {
    x[2..].iter().map(|v| 50.0 * v * v).sum::<f64>() + 1.0
}

fn h_f2(x: f64) -> f64 {
    0.5 - 0.3 * spike(x, 0.4, 0.004) - 0.5 * spike(x, 0.5, 0.05) - 0.3 * spike(x, 0.6, 0.004) + (PI * x).sin()
}

fn h_f3(x: f64) -> f64 {
    let mut comb = 0.0;
    for i in 1..=11 {
        let c = 0.04 * i as f64;
        comb += 0.3 * spike(x, c, 0.004) + 0.3 * spike(x, 1.0 - c, 0.004);
    }
    0.5 - 0.5 * spike(x, 0.5, 0.05) - comb + (PI * x).sin()
}

#[inline]
fn edge_comb(x: f64, amplitude: f64) -> f64 {
    // Every term is an exact zero unless x is within ~0.11 of the teeth.
    if x > 0.22 && x < 0.78 {
        return 0.0;
    }
    let mut comb = 0.0;
    for i in 0..=16 {
        let c = 0.0063 * i as f64;
        comb += amplitude * spike(x, c, 0.004) + amplitude * spike(x, 1.0 - c, 0.004);
    }
    comb
}

fn h_f4(x: f64) -> f64 {
    1.5 - 0.5 * spike(x, 0.5, 0.04) - edge_comb(x, 0.8)
}

fn h_f5(x: f64) -> f64 {
    1.5 - 0.8 * spike(x, 0.5, 0.04) - edge_comb(x, 0.5)
}

fn h_f6(x: f64) -> f64 {
    0.5 - (0.2 * spike(x, 0.95, 0.03) + 0.2 * spike(x, 0.05, 0.01))
}

fn padded(head: &[f64], dim: usize) -> DecisionVector {
    let mut v = head.to_vec();
    v.resize(dim, 0.0);
    DecisionVector::from_finite(v)
}

fn registered_dim(id: ProblemId, dim: usize) -> Result<()> {
    if matches!(dim, 10 | 15 | 20) {
        Ok(())
    } else {
        Err(Error::UnknownOptimum { problem: id.to_string(), dim })
    }
}

/// The tabulated robust optimum for the 10-, 15- and 20-D instances.
pub fn known_robust_optimum(id: ProblemId, dim: usize) -> Result<DecisionVector> {
    registered_dim(id, dim)?;
    Ok(match id {
        ProblemId::F1 => DecisionVector::from_finite(f1_dominant_center(dim)),
        ProblemId::F2 => padded(&[1.0, 1.0], dim),
        ProblemId::F3 | ProblemId::F4 | ProblemId::F5 => padded(&[0.5, 0.5], dim),
        ProblemId::F6 => padded(&[0.95, 0.95], dim),
    })
}

/// The tabulated original (unperturbed) optima, in table order. F5's 1156
/// optima are not enumerated, so its list is empty.
pub fn known_original_optima(id: ProblemId, dim: usize) -> Result<Vec<DecisionVector>> {
    registered_dim(id, dim)?;
    let heads: Vec<[f64; 2]> = match (id, dim) {
        (ProblemId::F1, _) => return Ok(vec![DecisionVector::from_finite(f1_dominant_center(dim))]),
        (ProblemId::F2, _) => vec![[0.0, 0.0]],
        (ProblemId::F3 | ProblemId::F4, 10) => vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
        (ProblemId::F3 | ProblemId::F4, _) => vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]],
        (ProblemId::F5, _) => vec![],
        (ProblemId::F6, _) => vec![[0.05, 0.05], [0.05, 0.95], [0.95, 0.05], [0.95, 0.95]],
    };
    Ok(heads.iter().map(|h| padded(h, dim)).collect())
}
