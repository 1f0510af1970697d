//! Run configuration shared by the higher-level modules.

use std::sync::Arc;

use serde::Serialize;

use crate::carlitz::{CarlitzCache, Engine};
use crate::error::Result;
use crate::fq::Fq;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Config {
    /// Absolute precision target `P`.
    pub prec: i64,
    /// Guard `g` subtracted from `P` in every certified comparison.
    pub guard: i64,
    /// Truncation order `T` for `t`-series.
    pub t_order: usize,
    /// Maximum number of monic polynomials an enumeration may visit.
    pub budget: u64,
    pub seed: u64,
    pub engine: Engine,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            prec: 100,
            guard: 10,
            t_order: 30,
            budget: 1_000_000,
            seed: 0,
            engine: Engine::Auto,
        }
    }
}

impl Config {
    pub fn threshold(&self) -> i64 {
        self.prec - self.guard
    }
}

/// A field, a configuration and the Carlitz cache for that field.
#[derive(Clone, Debug)]
pub struct Context {
    pub fq: Fq,
    pub cfg: Config,
    pub cache: Arc<CarlitzCache>,
}

impl Context {
    pub fn new(fq: Fq, cfg: Config) -> Self {
        let cache = Arc::new(CarlitzCache::new(&fq));
        Context { fq, cfg, cache }
    }

    pub fn with_order(q: u64, cfg: Config) -> Result<Self> {
        Ok(Self::new(Fq::with_order(q)?, cfg))
    }

    /// Same field and cache with a different precision target.
    pub fn at_prec(&self, prec: i64) -> Self {
        Context {
            fq: self.fq.clone(),
            cfg: Config {
                prec,
                ..self.cfg.clone()
            },
            cache: self.cache.clone(),
        }
    }
}
