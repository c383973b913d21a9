//! TOML model files.

use gerber_shiu::{Penalty, PenaltyKind, PhaseType, Poly, RationalClaim, RiskModel};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub process: Process,
    pub interclaims: Interclaims,
    pub claims: Claims,
    pub penalty: PenaltySection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Process {
    pub c: f64,
    pub sigma: f64,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Interclaims {
    Exponential {
        rate: f64,
    },
    GeneralizedErlang {
        rates: Vec<f64>,
    },
    Coxian {
        rates: Vec<f64>,
        continue_probs: Vec<f64>,
    },
    Raw {
        alpha: Vec<f64>,
        #[serde(rename = "B")]
        b: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Claims {
    Exponential {
        rate: f64,
    },
    Erlang {
        shape: u32,
        rate: f64,
    },
    Hyperexponential {
        weights: Vec<f64>,
        rates: Vec<f64>,
    },
    /// Transform `numerator(s) / denominator(s)`, ascending coefficients.
    Polys {
        numerator: Vec<f64>,
        denominator: Vec<f64>,
    },
}

/// `w0` defaults to `w(0, 0)`.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PenaltySection {
    Unit { w0: Option<f64> },
    BivariateExponential { s1: f64, s2: f64, w0: Option<f64> },
    DeficitPower { j: u32, w0: Option<f64> },
}

impl PenaltySection {
    fn w0(&self) -> Option<f64> {
        match *self {
            PenaltySection::Unit { w0 }
            | PenaltySection::BivariateExponential { w0, .. }
            | PenaltySection::DeficitPower { w0, .. } => w0,
        }
    }

    fn kind(&self) -> PenaltyKind<f64> {
        match *self {
            PenaltySection::Unit { .. } => PenaltyKind::Unit,
            PenaltySection::BivariateExponential { s1, s2, .. } => PenaltyKind::BivariateExponential { s1, s2 },
            PenaltySection::DeficitPower { j, .. } => PenaltyKind::DeficitPower { j },
        }
    }
}

/// Failure to turn a file into a model: either the text itself is bad or
/// it describes an inadmissible model.
#[derive(Debug)]
pub enum LoadError {
    Parse(String),
    Invalid(gerber_shiu::Error),
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, LoadError> {
        let file: ModelFile = toml::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))?;
        if let Some(bad) = file.numbers().into_iter().find(|x| !x.is_finite()) {
            return Err(LoadError::Parse(format!("non-finite number {bad} in model file")));
        }
        Ok(file)
    }

    fn numbers(&self) -> Vec<f64> {
        let mut v = vec![self.process.c, self.process.sigma, self.process.delta];
        match &self.interclaims {
            Interclaims::Exponential { rate } => v.push(*rate),
            Interclaims::GeneralizedErlang { rates } => v.extend(rates),
            Interclaims::Coxian { rates, continue_probs } => v.extend(rates.iter().chain(continue_probs)),
            Interclaims::Raw { alpha, b } => v.extend(alpha.iter().chain(b.iter().flatten())),
        }
        match &self.claims {
            Claims::Exponential { rate } | Claims::Erlang { rate, .. } => v.push(*rate),
            Claims::Hyperexponential { weights, rates } => v.extend(weights.iter().chain(rates)),
            Claims::Polys { numerator, denominator } => v.extend(numerator.iter().chain(denominator)),
        }
        if let PenaltyKind::BivariateExponential { s1, s2 } = self.penalty.kind() {
            v.extend([s1, s2]);
        }
        v.extend(self.penalty.w0());
        v
    }

    pub fn to_model(&self) -> Result<RiskModel<f64>, gerber_shiu::Error> {
        let interclaims = match &self.interclaims {
            Interclaims::Exponential { rate } => PhaseType::exponential(*rate)?,
            Interclaims::GeneralizedErlang { rates } => PhaseType::generalized_erlang(rates)?,
            Interclaims::Coxian { rates, continue_probs } => PhaseType::coxian(rates, continue_probs)?,
            Interclaims::Raw { alpha, b } => PhaseType::new(alpha.clone(), b.clone())?,
        };
        let claims = match &self.claims {
            Claims::Exponential { rate } => RationalClaim::exponential(*rate)?,
            Claims::Erlang { shape, rate } => RationalClaim::erlang(*shape, *rate)?,
            Claims::Hyperexponential { weights, rates } => RationalClaim::hyperexponential(weights, rates)?,
            Claims::Polys { numerator, denominator } => {
                RationalClaim::from_polys(Poly::from_real(numerator), Poly::from_real(denominator))?
            }
        };
        let kind = self.penalty.kind();
        let natural = Penalty { kind, w0: 0.0 }.w(0.0, 0.0);
        let penalty = Penalty::new(kind, self.penalty.w0().unwrap_or(natural))?;
        let p = &self.process;
        RiskModel::new(p.c, p.sigma, p.delta, interclaims, claims, penalty)
    }
}

pub fn load(text: &str) -> Result<RiskModel<f64>, LoadError> {
    ModelFile::parse(text)?.to_model().map_err(LoadError::Invalid)
}
