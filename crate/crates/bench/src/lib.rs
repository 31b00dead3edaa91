//! Fixtures shared by the criterion benchmarks.

use linkdens_core::validation::SyntheticConfig;

/// Planted-thread workload with roughly `threads * 11` links.
pub fn workload(threads: usize, seed: u64) -> SyntheticConfig {
    SyntheticConfig {
        authors: (threads / 2).max(50),
        threads,
        background_threads: threads / 10,
        span: 5 * 365 * 86_400,
        seed,
        ..SyntheticConfig::default()
    }
}
