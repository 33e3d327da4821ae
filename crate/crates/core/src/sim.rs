//! Monte-Carlo study of how measurement noise on `R_ℰ` propagates through inversion.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faithfulness::{r_check_with_tol, Conditioning};
use crate::linalg::{hermitian_basis, ComplexMatrix, DEFAULT_REL_TOL};
use crate::objects::{BipartiteState, Channel};
use crate::reconstruction::{channel_output, reconstruct_with};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    #[default]
    GaussianCoefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    #[serde(default)]
    pub kind: NoiseKind,
    /// Standard deviation per Hermitian-basis coefficient.
    pub strength: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn gaussian(strength: f64, seed: u64) -> Result<Self> {
        if !(strength >= 0.0 && strength.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise strength {strength} must be finite and ≥ 0")));
        }
        Ok(NoiseModel { kind: NoiseKind::GaussianCoefficient, strength, seed })
    }

    /// Generator for one work unit; independent of scheduling.
    pub fn rng(&self, probe: usize, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((probe as u64) << 32) | trial as u64);
        rng
    }
}

/// Adds `N(0, strength²)` to every non-trace coefficient of `x` in the
/// generalized Gell-Mann basis. Hermiticity and trace are kept, positivity is not.
pub fn perturb_with_rng(x: &ComplexMatrix, strength: f64, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    if strength == 0.0 {
        return x.clone();
    }
    let normal = Normal::new(0.0, strength).expect("strength validated by caller");
    let basis = hermitian_basis(x.rows());
    let mut out = x.clone();
    for b in &basis.elements()[1..] {
        out = &out + &b.scale_real(normal.sample(rng));
    }
    out.hermitian_part()
}

pub fn perturb(x: &ComplexMatrix, noise: &NoiseModel) -> Result<ComplexMatrix> {
    NoiseModel::gaussian(noise.strength, noise.seed)?;
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!("cannot perturb a {}x{} operator", x.rows(), x.cols())));
    }
    Ok(perturb_with_rng(x, noise.strength, &mut noise.rng(0, 0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub probe_id: String,
    pub sigma_min: f64,
    pub condition_number: Conditioning,
    pub frobenius_sq: f64,
    pub noise_strength: f64,
    /// Frobenius distance to the true Choi operator, one per trial.
    pub errors: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation; zero for a single trial.
    pub std: f64,
    pub trials: usize,
}

/// Perturb, reconstruct and score `trials` times for each probe.
pub fn run_study(
    channel: &Channel,
    probes: &[BipartiteState],
    noise: &NoiseModel,
    trials: usize,
) -> Result<Vec<SimulationReport>> {
    NoiseModel::gaussian(noise.strength, noise.seed)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let truth = channel.choi();
    let checks = probes
        .iter()
        .map(|p| {
            let rc = r_check_with_tol(p, DEFAULT_REL_TOL)?;
            if !rc.is_faithful() {
                return Err(Error::Unfaithful { phi: rc.rank(), required: p.d_h() * p.d_h() });
            }
            Ok(rc)
        })
        .collect::<Result<Vec<_>>>()?;

    probes
        .iter()
        .zip(&checks)
        .enumerate()
        .map(|(n, (probe, rc))| {
            let output = channel_output(channel, probe)?.into_matrix();
            let errors = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let noisy = perturb_with_rng(&output, noise.strength, &mut noise.rng(n, t));
                    Ok(reconstruct_with(rc, &noisy)?.distance(&truth))
                })
                .collect::<Result<Vec<f64>>>()?;
            let m = rc.measures();
            let (mean, std) = mean_std(&errors);
            Ok(SimulationReport {
                probe_id: n.to_string(),
                sigma_min: m.min_singular_value,
                condition_number: m.condition_number,
                frobenius_sq: m.frobenius_sq,
                noise_strength: noise.strength,
                errors,
                mean,
                std,
                trials,
            })
        })
        .collect()
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    probe_id: &'a str,
    sigma_min: f64,
    condition_number: f64,
    frobenius_sq: f64,
    noise_strength: f64,
    trial: usize,
    error: f64,
}

/// One row per trial. An infinite condition number is written as `inf`.
pub fn write_csv<W: Write>(reports: &[SimulationReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in reports {
        for (trial, &error) in r.errors.iter().enumerate() {
            w.serialize(CsvRow {
                probe_id: &r.probe_id,
                sigma_min: r.sigma_min,
                condition_number: r.condition_number.as_f64(),
                frobenius_sq: r.frobenius_sq,
                noise_strength: r.noise_strength,
                trial,
                error,
            })
            .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
        }
    }
    w.flush().map_err(|e| Error::InvalidParameter(format!("csv: {e}")))
}

/// Per-probe summary without the per-trial errors.
pub fn summary_json(reports: &[SimulationReport]) -> serde_json::Value {
    serde_json::Value::Array(
        reports
            .iter()
            .map(|r| {
                serde_json::json!({
                    "probe_id": r.probe_id,
                    "sigma_min": r.sigma_min,
                    "condition_number": r.condition_number,
                    "frobenius_sq": r.frobenius_sq,
                    "noise_strength": r.noise_strength,
                    "trials": r.trials,
                    "mean": r.mean,
                    "std": r.std,
                })
            })
            .collect(),
    )
}
