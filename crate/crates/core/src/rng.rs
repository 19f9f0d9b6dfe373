//! Deterministic sharded random streams and the variate generators built
//! on them.
//!
//! Each shard owns a counter-based ChaCha8 stream selected by
//! `(seed, stream id)`, so sampling is a pure function of the seed and the
//! shard layout and is bit-identical whether shards run serially or in
//! parallel. The variate algorithms are part of the reproducibility
//! contract and are pinned here rather than delegated to a distributions
//! crate, so a dependency upgrade can never silently reshuffle streams:
//!
//! - uniforms: 53-bit mantissa draws in `(0, 1]`;
//! - standard normals: Marsaglia polar method with the spare value cached;
//! - gamma (shape `a >= 1`): Marsaglia-Tsang squeeze/rejection;
//! - gamma (shape `a < 1`): the shape-boost transform
//!   `Gamma(a) = Gamma(a+1) * U^(1/a)`, which covers chi-squared with one
//!   degree of freedom (shape 1/2).

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// One shard's private stream.
pub struct ShardStream {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl ShardStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        ShardStream {
            rng,
            spare_normal: None,
        }
    }

    /// Uniform on `(0, 1]`: never zero, so logarithms stay finite.
    pub fn uniform_open01(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Standard normal by the Marsaglia polar method.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform_open01() - 1.0;
            let v = 2.0 * self.uniform_open01() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * factor);
                return u * factor;
            }
        }
    }

    /// Gamma variate with the given shape and scale.
    pub fn gamma(&mut self, shape: f64, scale: f64) -> f64 {
        debug_assert!(shape > 0.0 && scale > 0.0);
        if shape < 1.0 {
            let boost = self.uniform_open01().powf(1.0 / shape);
            return self.gamma_shape_ge_one(shape + 1.0) * boost * scale;
        }
        self.gamma_shape_ge_one(shape) * scale
    }

    fn gamma_shape_ge_one(&mut self, shape: f64) -> f64 {
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.standard_normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = self.uniform_open01();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v;
            }
            if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    /// Chi-squared variate: gamma with shape `dof / 2` and scale 2.
    pub fn chisq(&mut self, dof: f64) -> f64 {
        self.gamma(dof / 2.0, 2.0)
    }

    /// One draw of the weighted sum `sum_i weights[i] * chisq(dofs[i])`,
    /// coordinates consumed in index order.
    pub fn weighted_chisq_sum(&mut self, weights: &[f64], dofs: &[f64]) -> f64 {
        weights
            .iter()
            .zip(dofs)
            .map(|(w, m)| w * self.chisq(*m))
            .sum()
    }
}
