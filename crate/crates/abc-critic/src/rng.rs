//! Deterministic counter-based random streams.
//!
//! Every sampler in this crate draws its randomness from an [`RngStream`].
//! A stream is a splitmix-style counter generator: the output at step `i`
//! is a pure function of `(key, i)`, and child streams are derived by
//! mixing a `(task, index)` pair into the parent key. Because a proposal's
//! substream depends only on the master seed and the proposal index, runs
//! are bit-identical no matter how proposals are distributed over worker
//! threads.

/// Splitmix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const TASK_SALT: u64 = 0xD134_2543_DE82_EF95;
const INDEX_SALT: u64 = 0xA076_1D64_78BD_642F;

/// A splittable counter-based random stream.
///
/// Cheap to copy and to derive: `substream(task, index)` produces an
/// independent child stream without touching the parent's state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    key: u64,
    counter: u64,
    root_seed: u64,
}

impl RngStream {
    /// Root stream for a master seed.
    pub fn from_seed(seed: u64) -> Self {
        RngStream {
            key: mix64(seed ^ GOLDEN_GAMMA),
            counter: 0,
            root_seed: seed,
        }
    }

    /// Derive an independent child stream indexed by `(task, index)`.
    ///
    /// The derivation reads only the parent key, so any number of children
    /// may be derived, in any order, from shared references.
    pub fn substream(&self, task: u64, index: u64) -> Self {
        let k = mix64(self.key ^ mix64(task ^ TASK_SALT));
        RngStream {
            key: mix64(k ^ mix64(index ^ INDEX_SALT)),
            counter: 0,
            root_seed: self.root_seed,
        }
    }

    /// The master seed this stream (or its ancestors) was created from.
    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    /// Next raw 64-bit output.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(GOLDEN_GAMMA);
        mix64(self.key.wrapping_add(self.counter))
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Unit-rate exponential draw via inversion; always finite.
    #[inline]
    pub fn next_exp(&mut self) -> f64 {
        // 1 - u lies in (0, 1], so the log is finite.
        -(1.0 - self.next_f64()).ln()
    }

    /// Standard normal draw (Box-Muller, cosine branch).
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Poisson draw by Knuth's product method.
    ///
    /// Only suitable for moderate rates; every rate produced by the
    /// built-in priors stays far below the `exp(-lambda)` underflow point.
    pub fn next_poisson(&mut self, lambda: f64) -> u64 {
        debug_assert!((0.0..700.0).contains(&lambda));
        let limit = (-lambda).exp();
        let mut k = 0u64;
        let mut prod = 1.0;
        loop {
            prod *= self.next_f64();
            if prod <= limit {
                return k;
            }
            k += 1;
        }
    }

    /// Binomial draw as a sum of Bernoulli trials.
    pub fn next_binomial(&mut self, n: u64, p: f64) -> u64 {
        (0..n).filter(|_| self.next_f64() < p).count() as u64
    }
}
