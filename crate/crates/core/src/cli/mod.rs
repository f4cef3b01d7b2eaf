//! Configuration, command dispatch and run manifests behind the binary.

pub mod config;
pub mod run;

pub use config::RunConfig;
pub use run::{run, Command, Outcome};

/// Caps the global worker pool at `LAPLAB_THREADS` when it is set to a
/// positive integer.
pub fn init_threads() {
    if let Some(n) = std::env::var("LAPLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // a pool built earlier wins; nothing to do then
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}
