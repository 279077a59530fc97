//! File formats, reports, corpora and batch sweeps on top of `ellsurf-core`.

pub mod corpus;
pub mod report;
pub mod selftest;
pub mod spec;
pub mod sweep;

use ellsurf_core::funcfield::Place;
use ellsurf_core::lfun::{self, LfunError, SurfaceData};
use ellsurf_core::mw::{MwError, TorsionConfig};
use ellsurf_core::predict::{self, Analysis, OrderReport, PredictError};
use ellsurf_core::tate::TateError;
use ellsurf_core::wmodel::{ModelError, WeierstrassCurve};

use spec::SpecError;

/// Default for `ELLSURF_MAX_Q`: the largest residue field the L-function
/// pipelines may touch.
pub const DEFAULT_MAX_Q: u64 = 1 << 32;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("needs residue fields of size {needed}, above ELLSURF_MAX_Q = {cap}")]
    TooLarge { needed: u128, cap: u64 },
    #[error("j must be at least 3")]
    WeightTooSmall,
    #[error(transparent)]
    Predict(#[from] PredictError),
}

impl From<LfunError> for RunError {
    fn from(e: LfunError) -> Self {
        RunError::Predict(e.into())
    }
}

impl RunError {
    /// 2 for usage and parse errors, 3 for unsupported input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Spec(SpecError::UnsupportedCharacteristic(_)) => 3,
            RunError::Spec(_) | RunError::WeightTooSmall => 2,
            RunError::TooLarge { .. } => 3,
            RunError::Predict(e) => match e {
                PredictError::InapplicableHypothesis | PredictError::UnsupportedU | PredictError::UIsAllOfC => 3,
                PredictError::WeightTooSmall => 2,
                PredictError::Lfun(LfunError::Tate(TateError::UnsupportedCharacteristic(_))) | PredictError::Mw(MwError::UnsupportedU) => 3,
                _ => 1,
            },
        }
    }

    /// Short error name for sweep records.
    pub fn name(&self) -> String {
        let text = match self {
            RunError::Spec(e) => format!("{:?}", e),
            RunError::TooLarge { .. } => "TooLarge".into(),
            RunError::WeightTooSmall => "WeightTooSmall".into(),
            RunError::Predict(PredictError::Lfun(e)) => format!("{:?}", e),
            RunError::Predict(PredictError::Mw(e)) => format!("{:?}", e),
            RunError::Predict(e) => format!("{:?}", e),
        };
        text.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
    }
}

pub fn max_q() -> u64 {
    std::env::var("ELLSURF_MAX_Q").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_Q)
}

/// Local data at the bad places, after checking the size cap.
pub fn surface(e: &WeierstrassCurve) -> Result<SurfaceData, RunError> {
    if !e.is_nonisotrivial() {
        return Err(PredictError::InapplicableHypothesis.into());
    }
    let sd = SurfaceData::new(e).map_err(|err| match err {
        LfunError::Tate(TateError::Model(ModelError::IsotrivialOrSmooth)) => RunError::Predict(PredictError::InapplicableHypothesis),
        err => err.into(),
    })?;
    let top = sd.expected_degree()? + lfun::GUARD;
    let needed = (sd.q() as u128).saturating_pow(top as u32);
    let cap = max_q();
    if needed > cap as u128 {
        return Err(RunError::TooLarge { needed, cap });
    }
    Ok(sd)
}

/// Both L-function pipelines, torsion, and the full order report. With
/// `extra` empty the report covers the good locus and the good locus minus
/// one more rational place; otherwise `U` is the good locus minus `extra`.
pub fn run(e: &WeierstrassCurve, extra: &[Place], weights: &[u32]) -> Result<(Analysis, OrderReport), RunError> {
    if weights.iter().any(|&j| j < 3) {
        return Err(RunError::WeightTooSmall);
    }
    surface(e)?;
    let a = Analysis::new(e, &TorsionConfig::default())?;
    let r = if extra.is_empty() {
        predict::predict(&a, None, weights)?
    } else {
        let removed = removed_places(&a, extra)?;
        predict::predict(&a, Some(&removed), weights)?
    };
    Ok((a, r))
}

/// Bad places are always removed; `extra` are good places removed on top.
pub fn removed_places(a: &Analysis, extra: &[Place]) -> Result<Vec<Place>, RunError> {
    let mut out: Vec<Place> = a.bad().iter().map(|d| d.place.clone()).collect();
    for v in extra {
        if out.contains(v) {
            return Err(PredictError::UnsupportedU.into());
        }
        out.push(v.clone());
    }
    Ok(out)
}
