//! Distribution comparisons used by tests, benchmarks and reports.

use crate::backend::DenseState;
use crate::circuit::Circuit;
use crate::error::Result;

/// Total variation distance `½ Σ |p - q|`.
pub fn tvd(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions differ in length");
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Overlap `Σ min(p, q)`, equal to `1 - tvd` for normalized inputs.
pub fn overlap(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "distributions differ in length");
    p.iter().zip(q).map(|(a, b)| a.min(*b)).sum()
}

/// Exact output distribution of a unitary circuit via dense simulation.
pub fn exact_distribution(circuit: &Circuit) -> Result<Vec<f64>> {
    Ok(DenseState::simulate(circuit)?.probabilities())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}
