//! Independent single-qubit Pauli channels and decoder priors.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

const RANGE_TOL: f64 = 1e-12;

/// Per-qubit Pauli probabilities. The total error rate is `p_x + p_y + p_z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    p_x: f64,
    p_y: f64,
    p_z: f64,
}

impl NoiseModel {
    pub fn new(p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        for (name, v) in [("p_x", p_x), ("p_y", p_y), ("p_z", p_z)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if p_x + p_y + p_z > 1.0 + RANGE_TOL {
            return Err(Error::InvalidParameter(format!(
                "p_x + p_y + p_z = {} exceeds 1",
                p_x + p_y + p_z
            )));
        }
        Ok(Self { p_x, p_y, p_z })
    }

    /// `p/3` on each of X, Y, Z.
    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p / 3.0, p / 3.0, p / 3.0)
    }

    pub fn pure_x(p: f64) -> Result<Self> {
        Self::new(p, 0.0, 0.0)
    }

    pub fn pure_y(p: f64) -> Result<Self> {
        Self::new(0.0, p, 0.0)
    }

    pub fn pure_z(p: f64) -> Result<Self> {
        Self::new(0.0, 0.0, p)
    }

    pub fn p_x(&self) -> f64 {
        self.p_x
    }

    pub fn p_y(&self) -> f64 {
        self.p_y
    }

    pub fn p_z(&self) -> f64 {
        self.p_z
    }

    pub fn total(&self) -> f64 {
        self.p_x + self.p_y + self.p_z
    }

    /// Probability of `op` on one qubit.
    pub fn prob(&self, op: Pauli) -> f64 {
        match op {
            Pauli::I => 1.0 - self.total(),
            Pauli::X => self.p_x,
            Pauli::Y => self.p_y,
            Pauli::Z => self.p_z,
        }
    }

    /// Draws one single-qubit Pauli.
    pub fn sample_op<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        let u: f64 = rng.gen();
        if u < self.p_x {
            Pauli::X
        } else if u < self.p_x + self.p_y {
            Pauli::Y
        } else if u < self.p_x + self.p_y + self.p_z {
            Pauli::Z
        } else {
            Pauli::I
        }
    }
}

/// Per-bit flip probabilities for one decoder input.
#[derive(Clone, Debug, PartialEq)]
pub struct PriorVector(Vec<f64>);

impl PriorVector {
    /// Every entry must lie in `[0, 1)`.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if let Some((column, &p)) = p.iter().enumerate().find(|(_, &v)| !(0.0..1.0).contains(&v)) {
            return Err(Error::NonFinitePrior { column, p });
        }
        Ok(Self(p))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `(p_X ... | p_Z ... | p_Y ...)`, length `3n`.
pub fn decoupled_priors(model: &NoiseModel, n: usize) -> PriorVector {
    let mut v = Vec::with_capacity(3 * n);
    v.extend(std::iter::repeat_n(model.p_x, n));
    v.extend(std::iter::repeat_n(model.p_z, n));
    v.extend(std::iter::repeat_n(model.p_y, n));
    PriorVector(v)
}

/// `(p_X + p_Y ... | p_Z + p_Y ...)`, length `2n`: the marginal flip
/// probability of each symplectic bit.
pub fn symplectic_priors(model: &NoiseModel, n: usize) -> PriorVector {
    let mut v = Vec::with_capacity(2 * n);
    v.extend(std::iter::repeat_n(model.p_x + model.p_y, n));
    v.extend(std::iter::repeat_n(model.p_z + model.p_y, n));
    PriorVector(v)
}

pub fn sample_error<R: Rng + ?Sized>(model: &NoiseModel, n: usize, rng: &mut R) -> PauliString {
    PauliString::new((0..n).map(|_| model.sample_op(rng)).collect())
}

/// Independent stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    X,
    Y,
    Z,
    Depol,
    Custom,
}

impl ChannelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::X => "x",
            ChannelKind::Y => "y",
            ChannelKind::Z => "z",
            ChannelKind::Depol => "depol",
            ChannelKind::Custom => "custom",
        }
    }
}

/// A parsed channel description: `x:p`, `y:p`, `z:p`, `depol:p` or
/// `custom:pX,pZ,pY`. The single-parameter kinds also accept a list
/// `a,b,c` or an inclusive range `a..b:step`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    kind: ChannelKind,
    models: Vec<NoiseModel>,
}

impl ChannelSpec {
    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn models(&self) -> &[NoiseModel] {
        &self.models
    }

    /// Builds the model for one total error rate `p`.
    pub fn model_for(kind: ChannelKind, p: f64) -> Result<NoiseModel> {
        match kind {
            ChannelKind::X => NoiseModel::pure_x(p),
            ChannelKind::Y => NoiseModel::pure_y(p),
            ChannelKind::Z => NoiseModel::pure_z(p),
            ChannelKind::Depol => NoiseModel::depolarizing(p),
            ChannelKind::Custom => Err(Error::InvalidParameter("custom channels take explicit pX,pZ,pY".into())),
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(format!("channel `{s}`: {msg}"));
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected `kind:probability`".into()))?;
        let kind = match kind.trim().to_ascii_lowercase().as_str() {
            "x" => ChannelKind::X,
            "y" => ChannelKind::Y,
            "z" => ChannelKind::Z,
            "depol" | "depolarizing" => ChannelKind::Depol,
            "custom" => ChannelKind::Custom,
            other => return Err(bad(format!("unknown channel kind `{other}`"))),
        };
        if kind == ChannelKind::Custom {
            let v = parse_list(rest).map_err(bad)?;
            let [p_x, p_z, p_y] = v[..] else {
                return Err(bad("custom channels need exactly pX,pZ,pY".into()));
            };
            let model = NoiseModel::new(p_x, p_y, p_z)?;
            return Ok(Self {
                kind,
                models: vec![model],
            });
        }
        let ps = if rest.contains("..") {
            parse_range(rest).map_err(bad)?
        } else {
            parse_list(rest).map_err(bad)?
        };
        let models = ps
            .into_iter()
            .map(|p| Self::model_for(kind, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, models })
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let v: f64 = t.parse().map_err(|_| format!("`{t}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{t}` is not finite"));
    }
    Ok(v)
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(parse_f64)
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if v.is_empty() {
        return Err("empty probability list".into());
    }
    Ok(v)
}

/// `a..b:step`, inclusive of `b` within a small tolerance.
pub fn parse_range(s: &str) -> std::result::Result<Vec<f64>, String> {
    let (span, step) = s
        .split_once(':')
        .ok_or_else(|| format!("range `{s}` needs a step (`a..b:step`)"))?;
    let (a, b) = span
        .split_once("..")
        .ok_or_else(|| format!("range `{s}` is missing `..`"))?;
    let (a, b, step) = (parse_f64(a)?, parse_f64(b)?, parse_f64(step)?);
    if step <= 0.0 {
        return Err(format!("range step {step} must be positive"));
    }
    if b < a {
        return Err(format!("range end {b} is below its start {a}"));
    }
    let count = ((b - a) / step + RANGE_TOL).floor() as usize;
    // snap to a 1e-12 grid so `0.1 + 3 * 0.01` prints as 0.13
    Ok((0..=count)
        .map(|k| ((a + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}
