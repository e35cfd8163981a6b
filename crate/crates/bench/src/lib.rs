//! Shared fixtures for the benchmarks.

use entropyforge_core::walker::{sample_word, substream};
use entropyforge_core::{build_group, AlternateWord, GroupConfig, GroupSpec};

/// Named specs covering the custom, diagonal and mother portraits.
pub fn specs() -> Vec<(&'static str, GroupSpec)> {
    [
        ("dinfty", GroupConfig::dinfty(2)),
        ("pattern23", GroupConfig::pattern(&[2, 3], 3)),
        ("mother3", GroupConfig::mother(3, 2)),
    ]
    .into_iter()
    .map(|(name, cfg)| (name, build_group(&cfg).expect("fixture config")))
    .collect()
}

/// `count` walk words of length `n`, reproducible from `seed`.
pub fn walk_words(spec: &GroupSpec, n: usize, count: usize, seed: u64) -> Vec<AlternateWord> {
    let mut rng = substream(seed, n, 0);
    (0..count).map(|_| sample_word(spec, n, &mut rng)).collect()
}
