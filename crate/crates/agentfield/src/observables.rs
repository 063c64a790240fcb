//! Measurement layer shared by both models: empirical densities, first
//! passage of the adopter fraction, ensemble statistics, comparison errors
//! and the analytic equilibrium reference.

use crate::abm::AgentState;
use crate::error::{Error, Result};
use crate::model::{Domain1D, SuitabilityLandscape};
use crate::spde::mesh::{CellQuadrature, FemMesh};
use crate::spde::DensityState;

/// Project an agent snapshot onto per-type nodal densities (one unit of
/// mass per agent). Per-type integrals equal the type counts.
pub fn empirical_density(
    state: &AgentState,
    n_types: usize,
    mesh: &FemMesh,
) -> Result<DensityState> {
    let mut by_type: Vec<Vec<f64>> = vec![Vec::new(); n_types];
    for (&x, &t) in state.positions.iter().zip(&state.types) {
        if t >= n_types {
            return Err(Error::Input(format!("agent type {t} out of range")));
        }
        by_type[t].push(x);
    }
    let mut fields = Vec::with_capacity(n_types);
    for positions in &by_type {
        fields.push(crate::spde::project_density(
            mesh,
            crate::spde::DensitySource::Positions(positions),
        )?);
    }
    Ok(DensityState { fields })
}

/// Earliest recorded time with `fractions[i] >= threshold`, or `None` if the
/// threshold is never attained. Series must be time-ordered.
pub fn first_passage_fraction(
    times: &[f64],
    fractions: &[f64],
    threshold: f64,
) -> Result<Option<f64>> {
    if times.is_empty() || times.len() != fractions.len() {
        return Err(Error::Input(format!(
            "first-passage series needs matching nonempty columns, got {} and {}",
            times.len(),
            fractions.len()
        )));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Input(format!("threshold must lie in (0, 1], got {threshold}")));
    }
    Ok(times
        .iter()
        .zip(fractions)
        .find(|(_, &f)| f >= threshold)
        .map(|(&t, _)| t))
}

/// Elementwise sample mean and unbiased standard deviation over an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub n: usize,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl EnsembleStats {
    /// Spatially averaged standard deviation.
    pub fn mean_std(&self) -> f64 {
        self.std.iter().sum::<f64>() / self.std.len() as f64
    }
}

/// Streaming accumulator (Welford) so ensembles never need to be held in
/// memory at once.
#[derive(Debug, Clone)]
pub struct StatsAccumulator {
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl StatsAccumulator {
    pub fn new(len: usize) -> Self {
        Self { n: 0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    pub fn push(&mut self, sample: &[f64]) {
        assert_eq!(sample.len(), self.mean.len(), "sample length changed mid-ensemble");
        self.n += 1;
        let inv = 1.0 / self.n as f64;
        for ((m, m2), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(sample) {
            let d = x - *m;
            *m += d * inv;
            *m2 += d * (x - *m);
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn finish(&self) -> Result<EnsembleStats> {
        if self.n < 2 {
            return Err(Error::Input(format!(
                "ensemble statistics need at least 2 samples, got {}",
                self.n
            )));
        }
        let denom = (self.n - 1) as f64;
        Ok(EnsembleStats {
            n: self.n,
            mean: self.mean.clone(),
            std: self.m2.iter().map(|v| (v / denom).sqrt()).collect(),
        })
    }
}

/// Convenience wrapper over [`StatsAccumulator`].
pub fn ensemble_mean_std(samples: &[Vec<f64>]) -> Result<EnsembleStats> {
    if samples.len() < 2 {
        return Err(Error::Input(format!(
            "ensemble statistics need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let mut acc = StatsAccumulator::new(samples[0].len());
    for s in samples {
        acc.push(s);
    }
    acc.finish()
}

/// `‖a − reference‖₂ / ‖reference‖₂`.
pub fn relative_l2_error(a: &[f64], reference: &[f64]) -> Result<f64> {
    if a.len() != reference.len() {
        return Err(Error::Input(format!(
            "relative error needs equal lengths, got {} and {}",
            a.len(),
            reference.len()
        )));
    }
    let den: f64 = reference.iter().map(|y| y * y).sum();
    if !(den > 0.0) {
        return Err(Error::Input("relative error against a zero reference".into()));
    }
    let num: f64 = a.iter().zip(reference).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((num / den).sqrt())
}

/// Sum of absolute componentwise differences.
pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Nodal equilibrium density `p(x) ∝ exp(-2 V(x) / σ²)`, normalized with the
/// trapezoid rule so the interpolant integrates to one.
pub fn boltzmann_density(
    landscape: &SuitabilityLandscape,
    sigma: f64,
    mesh: &FemMesh,
) -> Vec<f64> {
    let factor = -2.0 / (sigma * sigma);
    let mut p: Vec<f64> = mesh
        .nodes()
        .iter()
        .map(|&x| (factor * landscape.potential(x)).exp())
        .collect();
    let z = mesh.integral(&p);
    for v in &mut p {
        *v /= z;
    }
    p
}

/// Per-bin probability masses of a (not necessarily normalized) density
/// shape, integrated with Gauss quadrature bin by bin.
pub fn bin_probabilities(
    f: impl Fn(f64) -> f64,
    domain: Domain1D,
    n_bins: usize,
) -> Vec<f64> {
    assert!(n_bins > 0);
    let quad = CellQuadrature::new();
    let w = domain.length() / n_bins as f64;
    let mut masses: Vec<f64> = (0..n_bins)
        .map(|b| {
            let x0 = domain.lower + b as f64 * w;
            (0..3).map(|q| quad.w[q] * f(x0 + quad.t[q] * w)).sum::<f64>() * w
        })
        .collect();
    let total: f64 = masses.iter().sum();
    if total > 0.0 {
        for m in &mut masses {
            *m /= total;
        }
    }
    masses
}

/// Position histogram accumulated over snapshots; `probabilities` normalizes
/// to per-bin mass fractions.
#[derive(Debug, Clone)]
pub struct PositionHistogram {
    pub domain: Domain1D,
    counts: Vec<u64>,
    total: u64,
}

impl PositionHistogram {
    pub fn new(domain: Domain1D, n_bins: usize) -> Self {
        assert!(n_bins > 0);
        Self { domain, counts: vec![0; n_bins], total: 0 }
    }

    pub fn record(&mut self, positions: &[f64]) {
        let n = self.counts.len();
        let scale = n as f64 / self.domain.length();
        for &x in positions {
            let b = (((x - self.domain.lower) * scale) as usize).min(n - 1);
            self.counts[b] += 1;
            self.total += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let t = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }
}

/// First-passage summary over an ensemble; realizations that never reach the
/// threshold are excluded and counted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauStats {
    pub mean: f64,
    pub std: f64,
    pub n_reached: usize,
    pub n_total: usize,
}

pub fn tau_statistics(taus: &[Option<f64>]) -> TauStats {
    let reached: Vec<f64> = taus.iter().filter_map(|t| *t).collect();
    let n = reached.len();
    if n == 0 {
        return TauStats { mean: f64::NAN, std: f64::NAN, n_reached: 0, n_total: taus.len() };
    }
    let mean = reached.iter().sum::<f64>() / n as f64;
    let std = if n >= 2 {
        (reached.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        f64::NAN
    };
    TauStats { mean, std, n_reached: n, n_total: taus.len() }
}
