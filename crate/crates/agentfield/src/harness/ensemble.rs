//! Seeded parallel execution of independent realizations.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Worker count resolution: explicit request, then the `AGENTFIELD_WORKERS`
/// environment variable, then the machine's parallelism.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    requested
        .or_else(|| {
            std::env::var("AGENTFIELD_WORKERS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
        })
        .filter(|w| *w > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Run `job` for realization indices `0..realizations` on a private pool
/// and return the results in realization order. Each realization derives
/// its randomness from its index alone, so the outcome does not depend on
/// `workers` or scheduling. The first failing realization aborts the run.
pub fn run_ensemble<T, F>(realizations: usize, workers: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    if realizations == 0 {
        return Err(Error::Input("ensemble needs at least one realization".into()));
    }
    let run = || {
        (0..realizations as u64)
            .into_par_iter()
            .map(|i| {
                job(i).map_err(|e| Error::Numerical(format!("realization {i}: {e}")))
            })
            .collect::<Result<Vec<T>>>()
    };
    if workers <= 1 {
        // sequential fallback without touching the global pool
        return (0..realizations as u64)
            .map(|i| job(i).map_err(|e| Error::Numerical(format!("realization {i}: {e}"))))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Input(format!("worker pool: {e}")))?;
    pool.install(run)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_arrive_in_realization_order() {
        let out = run_ensemble(17, 4, |i| Ok(i * i)).unwrap();
        assert_eq!(out, (0..17u64).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let job = |i: u64| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(i);
            Ok((0..100).map(|_| rng.random::<f64>()).sum::<f64>())
        };
        let serial = run_ensemble(20, 1, job).unwrap();
        let parallel = run_ensemble(20, 3, job).unwrap();
        assert_eq!(serial, parallel, "bitwise identical aggregation expected");
    }

    #[test]
    fn failures_carry_the_realization_index() {
        let err = run_ensemble(10, 2, |i| {
            if i == 7 {
                Err(crate::error::Error::Input("boom".into()))
            } else {
                Ok(i)
            }
        })
        .unwrap_err();
        assert!(err.to_string().contains("realization 7"), "{err}");
    }

    #[test]
    fn zero_realizations_rejected() {
        assert!(run_ensemble(0, 1, |i| Ok(i)).is_err());
    }
}
