//! Pinned deterministic random generator.
//!
//! Fold assignment and synthetic corpora must reproduce bit-identically from a
//! seed, across platforms and releases, so the generator is part of the crate
//! contract rather than an implementation detail:
//!
//! * **Seeding** — the user seed is passed once through the SplitMix64
//!   finalizer so that small seeds (0, 1, 2, ...) still produce well-mixed
//!   initial states.
//! * **Stream** — a 64-bit linear congruential step,
//!   `state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`,
//!   returning the post-step state.
//! * **Floats** — `next_f64` uses the top 53 bits: `(u >> 11) * 2^-53`,
//!   uniform on `[0, 1)`.
//! * **Bounded integers** — `next_below(n)` maps one draw into `[0, n)` with
//!   the 128-bit multiply-shift `(u * n) >> 64`. The mapping is not exactly
//!   unbiased (bias is at most `n / 2^64`), but it is branch-free and part of
//!   the pinned contract.
//! * **Shuffle** — Fisher-Yates from the back, one `next_below(i + 1)` per
//!   position.
//!
//! Changing any of these constants or draw orders is a breaking change: it
//! silently invalidates every recorded seed.

const LCG_MUL: u64 = 6364136223846793005;
const LCG_ADD: u64 = 1442695040888963407;

/// Deterministic 64-bit generator; see the module docs for the exact contract.
#[derive(Debug, Clone)]
pub struct DetRng {
    state: u64,
}

impl DetRng {
    /// Creates a generator whose stream is fully determined by `seed`.
    pub fn new(seed: u64) -> Self {
        DetRng {
            state: splitmix64(seed),
        }
    }

    /// Next raw 64-bit value.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(LCG_MUL).wrapping_add(LCG_ADD);
        self.state
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `[0, n)`. `n` must be nonzero.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below requires n > 0");
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Bernoulli draw: `true` with probability `p`.
    pub fn next_bool(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// SplitMix64 finalizer used to expand the user seed into the initial state.
fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}
