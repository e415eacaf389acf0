//! Entropy functionals over output distributions and the circuit-parameter
//! sweep that traces how randomness quality varies with individual
//! phase-shifter angles.
//!
//! All entropies are in bits (base-2 logarithms) and operate on the exact
//! output-state distribution, not on extracted bitstreams.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fock::{full_distribution, FockState, OutputDistribution};
use crate::interferometer::{build_unitary, with_angle, MeshParameters};

/// Tolerance on Σp before an entropy is computed.
const ENTROPY_NORMALIZATION_TOL: f64 = 1e-9;

fn check_normalized(dist: &OutputDistribution) -> Result<()> {
    let total: f64 = dist.probabilities().sum();
    if (total - 1.0).abs() > ENTROPY_NORMALIZATION_TOL {
        return Err(Error::NumericalIntegrity(format!(
            "entropy requires a normalized distribution; Σp = {total}"
        )));
    }
    Ok(())
}

/// Shannon entropy −Σ p·log₂p (zero-probability terms contribute 0).
pub fn shannon_entropy(dist: &OutputDistribution) -> Result<f64> {
    check_normalized(dist)?;
    Ok(dist
        .probabilities()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum())
}

/// Rényi entropy of order β: (1/(1−β))·log₂ Σ pᵝ.
///
/// β must be positive and ≠ 1 (the β → 1 limit is the Shannon entropy;
/// call `shannon_entropy` for it).
pub fn renyi_entropy(dist: &OutputDistribution, beta: f64) -> Result<f64> {
    // `!(beta > 0.0)` rather than `beta <= 0.0`: NaN must fail the guard.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(beta > 0.0) {
        return Err(Error::Domain(format!(
            "Rényi order must be positive, got {beta}"
        )));
    }
    if beta == 1.0 {
        return Err(Error::Domain(
            "Rényi order β = 1 is the Shannon limit; use shannon_entropy".into(),
        ));
    }
    check_normalized(dist)?;
    let power_sum: f64 = dist
        .probabilities()
        .filter(|&p| p > 0.0)
        .map(|p| p.powf(beta))
        .sum();
    Ok(power_sum.log2() / (1.0 - beta))
}

/// Min-entropy −log₂ max p: the worst-case guessing measure.
pub fn min_entropy(dist: &OutputDistribution) -> Result<f64> {
    check_normalized(dist)?;
    let max = dist.probabilities().fold(0.0, f64::max);
    Ok(-max.log2())
}

/// Entropy-vs-angle curve for one swept mesh parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyCurve {
    pub parameter_label: String,
    pub angles: Vec<f64>,
    pub shannon: Vec<f64>,
    pub min_entropy: Vec<f64>,
}

impl EntropyCurve {
    /// Renders the curve as CSV: `angle_rad,shannon_bits,min_entropy_bits`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("angle_rad,shannon_bits,min_entropy_bits\n");
        for i in 0..self.angles.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.angles[i], self.shannon[i], self.min_entropy[i]
            ));
        }
        out
    }

    /// Writes the CSV rendering to a file.
    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// Largest minus smallest Shannon value — a quick non-constancy measure
    /// for ranking which parameters move the output distribution most.
    pub fn shannon_range(&self) -> f64 {
        let max = self.shannon.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.shannon.iter().cloned().fold(f64::MAX, f64::min);
        max - min
    }
}

/// Sweeps each labeled angle over `grid_points` uniform values in [0, 2π)
/// (endpoint excluded), holding all other parameters at their base values,
/// and records both entropies of the exact output distribution at each
/// grid point.
pub fn parameter_sweep(
    base: &MeshParameters,
    labels: &[String],
    input: &FockState,
    grid_points: usize,
) -> Result<Vec<EntropyCurve>> {
    if grid_points == 0 {
        return Err(Error::Domain("grid_points must be positive".into()));
    }
    let mut curves = Vec::with_capacity(labels.len());
    for label in labels {
        let mut angles = Vec::with_capacity(grid_points);
        let mut shannon = Vec::with_capacity(grid_points);
        let mut min_e = Vec::with_capacity(grid_points);
        for g in 0..grid_points {
            let angle = 2.0 * PI * g as f64 / grid_points as f64;
            let mesh = with_angle(base, label, angle)?;
            let u = build_unitary(&mesh)?;
            let dist = full_distribution(&u, input)?;
            angles.push(angle);
            shannon.push(shannon_entropy(&dist)?);
            min_e.push(min_entropy(&dist)?);
        }
        curves.push(EntropyCurve {
            parameter_label: label.clone(),
            angles,
            shannon,
            min_entropy: min_e,
        });
    }
    Ok(curves)
}
