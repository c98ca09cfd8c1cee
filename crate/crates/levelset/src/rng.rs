//! Counter-based random numbers for reproducible parallel sampling.
//!
//! Each Monte Carlo sample gets its own stream keyed by
//! `(seed, stratum, sample index)`, so results do not depend on worker count
//! or evaluation order. Mixing is SplitMix64: the key words are absorbed
//! through the finalizer, then draws advance a private SplitMix64 stream.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derived sub-seed for the `index`-th member of a family of runs
/// (documented mixing: `seed XOR mix(index + 1)`).
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    seed ^ mix(index.wrapping_add(1).wrapping_mul(GOLDEN))
}

/// Per-sample random stream.
#[derive(Clone, Debug)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    /// Stream for one `(seed, stratum, sample)` key.
    pub fn for_sample(seed: u64, stratum: u64, sample: u64) -> Self {
        let mut s = mix(seed ^ GOLDEN);
        s = mix(s ^ stratum.wrapping_mul(0xD129_0B2E_EF10_27C5) ^ GOLDEN);
        s = mix(s ^ sample.wrapping_mul(0xA076_1D64_78BD_642F));
        CounterRng { state: s }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A pair of independent standard normals (Box-Muller).
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        // avoid log(0)
        let u1 = (self.next_u64() >> 11).wrapping_add(1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Uniform point in the closed ball of the given radius in `R^dim`,
    /// written into `out[..dim]`. Uses a normal direction and a radial
    /// inverse-CDF draw, so the number of draws per sample is fixed.
    pub fn next_ball_point(&mut self, radius: f64, dim: usize, out: &mut [f64]) {
        debug_assert!(dim >= 1 && dim <= out.len());
        let mut i = 0;
        while i < dim {
            let (a, b) = self.next_normal_pair();
            out[i] = a;
            if i + 1 < dim {
                out[i + 1] = b;
            }
            i += 2;
        }
        let norm = out[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = radius * self.next_f64().powf(1.0 / dim as f64);
        if norm < 1e-300 {
            out[..dim].iter_mut().for_each(|v| *v = 0.0);
            out[0] = r;
            return;
        }
        for v in out[..dim].iter_mut() {
            *v *= r / norm;
        }
    }
}
