use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hermite::{HermiteExpansion, MultiIndex};

/// Independent generator for `stream` under `seed`.
///
/// ChaCha is counter based, so member `i` of a family is the same no matter
/// how many members are drawn or in which order they are evaluated.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Largest support drawn for a family member.
const MAX_SUPPORT: usize = 12;

/// `m` random expansions in dimension `d` with `|ν| <= n` and unit `L²(γ_d)` norm.
///
/// Each member picks a support size uniformly in `1..=min(#indices, 12)`,
/// a uniformly random support of that size, and i.i.d. uniform `[-1, 1]`
/// coefficients, then normalizes.
pub fn gen_family(seed: u64, d: usize, m: usize, n: u32) -> Result<Vec<HermiteExpansion>> {
    if d == 0 {
        return Err(Error::param("d", 0.0, "dimension must be positive"));
    }
    let indices = MultiIndex::all_up_to(d, n);
    (0..m)
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let cap = indices.len().min(MAX_SUPPORT) as u32;
            let size = rng.random_range(1..=cap) as usize;
            let mut chosen = index::sample(&mut rng, indices.len(), size).into_vec();
            chosen.sort_unstable();
            loop {
                let terms: Vec<(MultiIndex, f64)> = chosen
                    .iter()
                    .map(|&j| (indices[j].clone(), rng.random_range(-1.0..=1.0)))
                    .collect();
                let f = HermiteExpansion::from_terms(d, terms)?;
                let norm = f.l2_norm();
                if norm > 0.0 {
                    return Ok(f.scale(1.0 / norm));
                }
            }
        })
        .collect()
}
