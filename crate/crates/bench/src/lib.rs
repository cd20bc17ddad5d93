//! Shared fixtures for the benchmarks.

use std::path::PathBuf;

/// A deterministic token sequence of `len` words over a `vocab`-word alphabet.
pub fn sentence(len: usize, vocab: usize, seed: u64) -> Vec<String> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..len)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            format!("w{}", (state >> 33) % vocab as u64)
        })
        .collect()
}

/// `base` with one token replaced, the typical shape of a mutant translation.
pub fn one_edit(base: &[String], at: usize) -> Vec<String> {
    let mut out = base.to_vec();
    let i = at % out.len();
    out[i] = format!("{}x", out[i]);
    out
}

/// The bundled demo directory.
pub fn demo_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}
