//! Deterministic splittable random streams.
//!
//! Every simulation trajectory owns a private [`RandomStream`] derived from
//! the master seed and the node's position in the simulation tree, so results
//! are reproducible and independent of traversal or thread order. Streams are
//! SplitMix64 generators; child seeds are derived with the same 64-bit
//! finalizer, hashing `(parent_seed, depth, child_index)`.

/// SplitMix64 finalizer. Used both for stream stepping and seed derivation.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the root of a simulation tree.
pub fn root_seed(master_seed: u64) -> u64 {
    mix64(master_seed ^ 0x9E37_79B9_7F4A_7C15)
}

/// Seed for the `child_index`-th child of a node at `depth` whose own path
/// seed is `parent_seed`. Chaining this through every ancestor encodes the
/// full child-index sequence from the root.
pub fn child_seed(parent_seed: u64, depth: usize, child_index: u64) -> u64 {
    let h = mix64(parent_seed ^ 0xD1B5_4A32_D192_ED03 ^ depth as u64);
    mix64(h ^ child_index)
}

/// Counter-based pseudo-random stream (SplitMix64).
#[derive(Debug, Clone)]
pub struct RandomStream {
    state: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }

    /// Uniform sample in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Bernoulli draw with success probability `p`.
    #[inline]
    pub fn next_bool(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
