//! Deterministic generator for banded synthetic matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::coo::{CooMatrix, Entry};

/// Generate a random banded matrix with a guaranteed nonzero diagonal.
///
/// Row `r` gets its diagonal drawn from `[1, 2)` plus up to `r_nz` distinct
/// off-diagonal entries with columns inside `[r - bandwidth, r + bandwidth]`
/// (clipped to the matrix, never the diagonal itself) and values from
/// `[-1, 1)` excluding zero. The same `(n, r_nz, bandwidth, seed)` always
/// produces the identical matrix; the stream cipher behind the generator is
/// stable across platforms and releases.
pub fn generate_synthetic(n: usize, r_nz: usize, bandwidth: usize, seed: u64) -> Result<CooMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "matrix dimension must be at least 1".into(),
        ));
    }
    if r_nz >= n {
        return Err(Error::InvalidArgument(format!(
            "r_nz = {r_nz} must be smaller than the dimension {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::with_capacity(n * (1 + r_nz));
    for r in 0..n {
        entries.push(Entry {
            row: r,
            col: r,
            value: rng.gen_range(1.0..2.0),
        });
        let lo = r.saturating_sub(bandwidth);
        let hi = (r + bandwidth).min(n - 1);
        let window = hi - lo + 1 - 1; // candidate columns, diagonal excluded
        let wanted = rng.gen_range(0..=r_nz).min(window);
        let mut cols = pick_distinct(&mut rng, lo, hi, r, wanted);
        cols.sort_unstable();
        for col in cols {
            entries.push(Entry {
                row: r,
                col,
                value: nonzero_unit(&mut rng),
            });
        }
    }
    CooMatrix::new(n, entries)
}

/// `wanted` distinct columns from `[lo, hi]` excluding `skip`.
fn pick_distinct(
    rng: &mut ChaCha8Rng,
    lo: usize,
    hi: usize,
    skip: usize,
    wanted: usize,
) -> Vec<usize> {
    let window = hi - lo + 1 - 1;
    if wanted == 0 {
        return Vec::new();
    }
    if window <= 4 * wanted {
        // Small window: partial Fisher-Yates over the explicit candidates.
        let mut candidates: Vec<usize> = (lo..=hi).filter(|&c| c != skip).collect();
        for i in 0..wanted {
            let j = rng.gen_range(i..candidates.len());
            candidates.swap(i, j);
        }
        candidates.truncate(wanted);
        candidates
    } else {
        // Sparse pick: rejection-sample, deterministic for a fixed rng state.
        let mut cols = Vec::with_capacity(wanted);
        while cols.len() < wanted {
            let c = rng.gen_range(lo..=hi);
            if c != skip && !cols.contains(&c) {
                cols.push(c);
            }
        }
        cols
    }
}

fn nonzero_unit(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v = rng.gen_range(-1.0..1.0);
        if v != 0.0 {
            return v;
        }
    }
}
