//! Deterministic PRNG shared by corpus splitting and bootstrap resampling.
//!
//! Reproducibility across runs *and across implementations* is a contract of
//! this toolkit, so the generator is pinned here instead of delegated to a
//! platform default. The algorithm is splitmix64 (Vigna, 2015):
//!
//! ```text
//! state ← state + 0x9E3779B97F4A7C15                (wrapping, mod 2^64)
//! z ← state
//! z ← (z XOR (z >> 30)) · 0xBF58476D1CE4E5B9        (wrapping)
//! z ← (z XOR (z >> 27)) · 0x94D049BB133111EB        (wrapping)
//! output ← z XOR (z >> 31)
//! ```
//!
//! Derived operations, also pinned:
//!
//! * `next_below(n)` = `next_u64() mod n`.
//! * [`shuffle`] is a Fisher–Yates pass with descending index:
//!   for `i` from `len-1` down to `1`, swap `v[i]` with `v[next_below(i+1)]`.
//!
//! A port in any language that follows the four lines above reproduces every
//! split and every bootstrap resample bit for bit.

/// splitmix64 generator with a 64-bit state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-enough draw in `[0, n)` by modulo reduction.
    ///
    /// The tiny modulo bias is irrelevant at corpus scale; the reduction is
    /// part of the pinned specification precisely because it is trivial to
    /// port.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }
}

/// In-place Fisher–Yates shuffle driven by [`SplitMix64`].
pub fn shuffle<T>(v: &mut [T], rng: &mut SplitMix64) {
    for i in (1..v.len()).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        v.swap(i, j);
    }
}
