//! Thread-pool backed evaluation for cascade scans and term searches.

use lucaspf_core::pipeline::BatchEval;
use lucaspf_core::search::{assemble_report, examine_index, SearchReport};
use lucaspf_core::{Result, SearchConfig};
use rayon::prelude::*;
use rayon::ThreadPool;

/// Runs batches on a fixed-size rayon pool. Results keep input order, so
/// everything built on top is independent of the worker count.
pub struct Parallel {
    pool: ThreadPool,
}

impl Parallel {
    pub fn new(workers: usize) -> std::result::Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
        Ok(Parallel { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn search(&self, cfg: &SearchConfig) -> Result<SearchReport> {
        let p = cfg.validate()?;
        let outcomes = self.pool.install(|| {
            (cfg.n_min..=cfg.n_max)
                .into_par_iter()
                .map(|n| examine_index(&p, cfg.kind, n).map(|e| (n, e)))
                .collect::<Result<Vec<_>>>()
        })?;
        Ok(assemble_report(&p, cfg, outcomes))
    }
}

impl BatchEval for Parallel {
    fn eval(&self, ns: &[u64], f: &(dyn Fn(u64) -> Result<bool> + Sync)) -> Vec<Result<bool>> {
        self.pool.install(|| ns.par_iter().map(|&n| f(n)).collect())
    }
}
