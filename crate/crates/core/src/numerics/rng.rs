//! Deterministic splittable PRNG.
//!
//! The generator is SplitMix64: a 64-bit Weyl counter advanced by the
//! golden-gamma constant, pushed through a two-round multiply-xorshift
//! finalizer. Streams are keyed by `(master_seed, stream_id)`; derived
//! child streams re-key through the same finalizer so that parallel work
//! (bootstrap replicates, per-company pipelines) never shares a state.

/// Weyl increment: 2^64 / φ rounded to odd.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// Lineage salt used when deriving child streams.
const DERIVE_SALT: u64 = 0xA076_1D64_78BD_642F;

/// SplitMix64 finalizer (Stafford mix 13 constants).
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A reproducible random stream identified by `(master_seed, stream_id)`.
///
/// Identical identifiers always replay the identical sequence, across runs
/// and platforms.
#[derive(Debug, Clone)]
pub struct SeededRng {
    master_seed: u64,
    stream_id: u64,
    state: u64,
}

impl SeededRng {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let state = mix64(master_seed ^ mix64(stream_id ^ GOLDEN_GAMMA));
        SeededRng {
            master_seed,
            stream_id,
            state,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derive an independent child stream. The child is keyed by the parent
    /// identity and `child_id` only, not by how much the parent has been
    /// consumed, so derivation order is irrelevant.
    pub fn derive(&self, child_id: u64) -> SeededRng {
        let lineage = mix64(self.master_seed ^ mix64(self.stream_id ^ DERIVE_SALT));
        SeededRng::new(lineage, child_id)
    }

    /// Derive a child stream keyed by a text label (FNV-1a hashed), so
    /// per-label streams do not depend on enumeration order.
    pub fn derive_label(&self, label: &str) -> SeededRng {
        let mut h = 0xCBF2_9CE4_8422_2325u64;
        for b in label.bytes() {
            h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3);
        }
        self.derive(h)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw on the open interval (0, 1): (i + 1/2) / 2^53 over the
    /// top 53 bits, so inverse-transform sampling never sees 0 or 1.
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Unbiased uniform integer in [0, bound) by rejection.
    pub fn next_u64_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        loop {
            let x = self.next_u64();
            let r = x % bound;
            // Reject draws from the final partial block of size 2^64 mod bound.
            if x.wrapping_sub(r) <= u64::MAX - (bound - 1) {
                return r;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_u64_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
