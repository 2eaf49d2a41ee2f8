//! Shared fixtures for the benchmark targets.

use signet_core::synth::{GeneratorConfig, SynthData, generate};

/// Mid-size planted dataset reused across benchmark groups.
pub fn bench_dataset(num_users: usize, seed: u64) -> SynthData {
    let cfg = GeneratorConfig {
        theta_emo: 0.3,
        theta_diff: 0.3,
        ..GeneratorConfig::new(num_users, seed)
    };
    generate(&cfg).expect("valid benchmark config")
}
