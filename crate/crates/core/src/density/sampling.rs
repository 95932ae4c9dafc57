use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{AnchorSet, DensityMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("cannot draw {k} distinct anchors from {pixels} pixels")]
    TooManyAnchors { k: usize, pixels: usize },
    #[error("at least one anchor must be requested")]
    ZeroAnchors,
    #[error("rejection sampling stalled after {proposals} proposals with {accepted}/{k} anchors")]
    SamplingStall {
        proposals: u64,
        accepted: usize,
        k: usize,
    },
}

/// What to do when the proposal budget runs out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StallPolicy {
    /// Take the most probable unsampled pixels, row-major on ties.
    #[default]
    FillHighest,
    Error,
}

#[derive(Debug, Clone)]
pub struct RejectionSampler {
    /// Proposals allowed per requested anchor.
    pub budget_per_anchor: u64,
    pub on_stall: StallPolicy,
}

impl Default for RejectionSampler {
    fn default() -> Self {
        Self {
            budget_per_anchor: 1000,
            on_stall: StallPolicy::FillHighest,
        }
    }
}

/// Result of a sampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    pub anchors: AnchorSet,
    pub proposals: u64,
    /// Anchors supplied by the stall fallback rather than by acceptance.
    pub stall_filled: usize,
}

impl RejectionSampler {
    /// Draws `k` distinct pixels. Each proposal picks a pixel uniformly and a
    /// fresh `u ~ U(0, 1)`; the pixel is kept iff `u <= I_p` and it was not
    /// already taken.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        dm: &DensityMap,
        k: usize,
        rng: &mut R,
    ) -> Result<Sampling, SampleError> {
        let (w, h) = (dm.width(), dm.height());
        let n = w * h;
        if k == 0 {
            return Err(SampleError::ZeroAnchors);
        }
        if k > n {
            return Err(SampleError::TooManyAnchors { k, pixels: n });
        }
        let probs = dm.probs().as_slice();
        let budget = self.budget_per_anchor.saturating_mul(k as u64);
        let mut taken = vec![false; n];
        let mut picked: Vec<usize> = Vec::with_capacity(k);
        let mut proposals = 0u64;

        while picked.len() < k && proposals < budget {
            proposals += 1;
            let idx = rng.random_range(0..n);
            let u: f64 = rng.random();
            if u <= probs[idx] && !taken[idx] {
                taken[idx] = true;
                picked.push(idx);
            }
        }

        let mut stall_filled = 0;
        if picked.len() < k {
            if self.on_stall == StallPolicy::Error {
                return Err(SampleError::SamplingStall {
                    proposals,
                    accepted: picked.len(),
                    k,
                });
            }
            let mut rest: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            // stable: row-major order survives among equal probabilities
            rest.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
            stall_filled = k - picked.len();
            picked.extend(rest.into_iter().take(stall_filled));
        }

        let positions = picked
            .into_iter()
            .map(|i| ((i % w) as f64, (i / w) as f64))
            .collect();
        Ok(Sampling {
            anchors: AnchorSet::from_positions(positions, dm),
            proposals,
            stall_filled,
        })
    }
}

/// Rejection sampling with the default budget, seeded with ChaCha8.
pub fn rejection_sample(dm: &DensityMap, k: usize, seed: u64) -> Result<AnchorSet, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RejectionSampler::default()
        .sample(dm, k, &mut rng)
        .map(|s| s.anchors)
}
