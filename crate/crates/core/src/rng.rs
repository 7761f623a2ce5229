//! Counter-based random numbers.
//!
//! The uniform for agent `i` in sample `s` is a pure function of
//! `(seed, s, i)`, so Monte Carlo workers can draw in any order (or in
//! parallel) and still produce bit-identical streams.

#[inline]
fn mix64(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Uniform in `[0, 1)` for the given (seed, sample, agent) counter triple.
#[inline]
pub fn uniform(seed: u64, sample: u64, agent: u64) -> f64 {
    let a = mix64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let b = mix64(a ^ sample.wrapping_mul(0xD1B5_4A32_D192_ED03));
    let c = mix64(b ^ agent.wrapping_mul(0x8CB9_2BA7_2F3D_8DD7));
    ((c >> 11) as f64) * (1.0 / (1u64 << 53) as f64)
}

/// One uniform per agent for a whole sample.
pub fn sample_uniforms(seed: u64, sample: u64, n: usize) -> Vec<f64> {
    (0..n).map(|i| uniform(seed, sample, i as u64)).collect()
}
