//! Scalar Euler–Maruyama reference problems for verifying the strong
//! convergence order of the time stepping.
//!
//! With multiplicative noise (geometric Brownian motion) the scheme
//! converges with strong order 1/2. With additive noise (Ornstein–Uhlenbeck)
//! Euler–Maruyama coincides with Milstein and converges with order 1; the
//! companion runner below exists to document that distinction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Least-squares slope of `ln(error)` against `ln(dt)`.
fn fit_slope(dts: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Root-mean-square endpoint errors per step size, and the fitted slope.
#[derive(Debug, Clone)]
pub struct StrongOrder {
    pub dts: Vec<f64>,
    pub rms_errors: Vec<f64>,
    pub slope: f64,
}

fn steps_for(t_end: f64, dt: f64) -> Result<usize> {
    let raw = t_end / dt;
    let steps = raw.round();
    if steps < 1.0 || (raw - steps).abs() > 1e-9 * raw.max(1.0) {
        return Err(Error::Input(format!("dt {dt} does not divide the horizon {t_end}")));
    }
    Ok(steps as usize)
}

fn check_study(dts: &[f64], paths: usize) -> Result<()> {
    if dts.len() < 2 {
        return Err(Error::Input("strong-order study needs at least two step sizes".into()));
    }
    if dts.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::Input("step sizes must be positive".into()));
    }
    if paths < 2 {
        return Err(Error::Input("strong-order study needs at least two paths".into()));
    }
    Ok(())
}

/// Strong order of Euler–Maruyama on `dX = mu X dt + sigma X dW` against the
/// closed-form solution, coupling every step size to the same Brownian path
/// through increments aggregated from the finest grid.
pub fn gbm_strong_order(
    mu: f64,
    sigma: f64,
    x0: f64,
    t_end: f64,
    dts: &[f64],
    paths: usize,
    seed: u64,
) -> Result<StrongOrder> {
    check_study(dts, paths)?;
    let mut dts = dts.to_vec();
    dts.sort_by(|a, b| b.total_cmp(a));
    let step_counts: Vec<usize> = dts.iter().map(|&dt| steps_for(t_end, dt)).collect::<Result<_>>()?;
    let n_fine = *step_counts.last().unwrap();
    for &n in &step_counts {
        if n_fine % n != 0 {
            return Err(Error::Input(format!(
                "step counts must nest for path coupling; {n_fine} not divisible by {n}"
            )));
        }
    }
    let dt_fine = t_end / n_fine as f64;
    let root = dt_fine.sqrt();

    let mut sq_err = vec![0.0; dts.len()];
    let mut increments = vec![0.0; n_fine];
    for path in 0..paths {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path as u64);
        let mut w_end = 0.0;
        for dw in &mut increments {
            *dw = root * rng.sample::<f64, _>(StandardNormal);
            w_end += *dw;
        }
        let exact = x0 * ((mu - 0.5 * sigma * sigma) * t_end + sigma * w_end).exp();
        for (lvl, &n_steps) in step_counts.iter().enumerate() {
            let chunk = n_fine / n_steps;
            let dt = t_end / n_steps as f64;
            let mut x = x0;
            for k in 0..n_steps {
                let dw: f64 = increments[k * chunk..(k + 1) * chunk].iter().sum();
                x += mu * x * dt + sigma * x * dw;
            }
            sq_err[lvl] += (x - exact) * (x - exact);
        }
    }
    let rms_errors: Vec<f64> = sq_err.iter().map(|s| (s / paths as f64).sqrt()).collect();
    let slope = fit_slope(&dts, &rms_errors);
    Ok(StrongOrder { dts, rms_errors, slope })
}

/// Strong order of Euler–Maruyama on the additive-noise problem
/// `dX = -theta X dt + sigma dW`, coupled per step to the exact
/// Gaussian transition driven by the same normals. Euler–Maruyama reduces
/// to Milstein here, so the measured slope sits near 1 rather than 1/2.
pub fn ou_strong_order(
    theta: f64,
    sigma: f64,
    x0: f64,
    t_end: f64,
    dts: &[f64],
    paths: usize,
    seed: u64,
) -> Result<StrongOrder> {
    check_study(dts, paths)?;
    let mut dts = dts.to_vec();
    dts.sort_by(|a, b| b.total_cmp(a));
    let mut rms_errors = Vec::with_capacity(dts.len());
    for (lvl, &dt) in dts.iter().enumerate() {
        let n_steps = steps_for(t_end, dt)?;
        let decay = (-theta * dt).exp();
        let exact_noise = sigma * ((1.0 - (-2.0 * theta * dt).exp()) / (2.0 * theta)).sqrt();
        let em_noise = sigma * dt.sqrt();
        let mut sq = 0.0;
        for path in 0..paths {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1 + lvl as u64));
            rng.set_stream(path as u64);
            let mut x_em = x0;
            let mut x_exact = x0;
            for _ in 0..n_steps {
                let xi: f64 = rng.sample(StandardNormal);
                x_em += -theta * x_em * dt + em_noise * xi;
                x_exact = x_exact * decay + exact_noise * xi;
            }
            sq += (x_em - x_exact) * (x_em - x_exact);
        }
        rms_errors.push((sq / paths as f64).sqrt());
    }
    let slope = fit_slope(&dts, &rms_errors);
    Ok(StrongOrder { dts, rms_errors, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplicative_noise_shows_half_order() {
        let study = gbm_strong_order(
            1.0,
            1.0,
            1.0,
            1.0,
            &[1e-2, 2.5e-3, 6.25e-4],
            400,
            2024,
        )
        .unwrap();
        assert!(study.rms_errors.windows(2).all(|w| w[0] > w[1]), "{:?}", study.rms_errors);
        assert!(
            (0.3..=0.7).contains(&study.slope),
            "slope {} errors {:?}",
            study.slope,
            study.rms_errors
        );
    }

    #[test]
    fn additive_noise_shows_first_order() {
        let study = ou_strong_order(
            1.5,
            0.8,
            1.0,
            1.0,
            &[1e-2, 5e-3, 2.5e-3],
            1500,
            7,
        )
        .unwrap();
        assert!(
            (0.8..=1.2).contains(&study.slope),
            "slope {} errors {:?}",
            study.slope,
            study.rms_errors
        );
    }

    #[test]
    fn slope_fit_recovers_exact_power_law() {
        let dts = [0.1, 0.05, 0.025];
        let errors: Vec<f64> = dts.iter().map(|d: &f64| 3.0 * d.powf(0.5)).collect();
        assert!((fit_slope(&dts, &errors) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_studies_are_rejected() {
        assert!(gbm_strong_order(1.0, 1.0, 1.0, 1.0, &[1e-2], 100, 0).is_err());
        assert!(gbm_strong_order(1.0, 1.0, 1.0, 1.0, &[1e-2, 3e-3], 100, 0).is_err());
        assert!(gbm_strong_order(1.0, 1.0, 1.0, 1.0, &[1e-2, 5e-3], 1, 0).is_err());
        assert!(ou_strong_order(1.0, 1.0, 1.0, 1.0, &[1e-2, -5e-3], 10, 0).is_err());
    }

    #[test]
    fn study_is_reproducible_for_a_seed() {
        let a = gbm_strong_order(1.0, 0.5, 1.0, 0.5, &[5e-3, 2.5e-3], 50, 9).unwrap();
        let b = gbm_strong_order(1.0, 0.5, 1.0, 0.5, &[5e-3, 2.5e-3], 50, 9).unwrap();
        assert_eq!(a.rms_errors, b.rms_errors);
    }
}
