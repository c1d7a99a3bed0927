//! Innovation diffusion over social networks under an epistemically weighted
//! linear threshold model.
//!
//! * [`network`]: graphs, agent ids and agent sets.
//! * [`epistemics`]: reliability, discrimination factors, relational credibility.
//! * [`cascade`]: open-loop dynamics, cohesive sets, fixed points.
//! * [`control`]: receding-horizon LQR nudging of resistivity thresholds.
//! * [`scenario`]: scenario files, generators, metrics and exports.
//! * [`verify`]: randomized property suites with independent oracles.

pub mod cascade;
pub mod control;
pub mod epistemics;
pub mod error;
pub mod network;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};

/// Absolute tolerance for threshold and fairness comparisons.
pub const TOLERANCE: f64 = 1e-12;

/// Networks at least this large evaluate per-agent updates on the rayon pool.
pub const PAR_MIN_AGENTS: usize = 128;

/// Environment variable bounding the number of worker threads.
pub const WORKERS_ENV: &str = "EPICASCADE_WORKERS";

/// Runs `f` on a rayon pool sized by `EPICASCADE_WORKERS` (or the rayon
/// default when unset or invalid).
pub fn with_workers<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let workers = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0);
    with_worker_count(workers, f)
}

/// Runs `f` on a dedicated pool with `workers` threads.
pub fn with_worker_count<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    match builder.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
