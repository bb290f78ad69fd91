//! Shared helpers for integration tests: small matrix builders and an
//! independent brute-force communication oracle computed straight from the
//! COO entry list (never from the ELLPACK slices or the plan code under test).

#![allow(dead_code)] // not every integration test uses every helper

use std::collections::BTreeSet;

use minipgas::pgas::{PairCounters, RankId};
use minipgas::sparse::{spmv_serial, CooMatrix, EllpackMatrix};
use minipgas::spmv::BlockCyclicLayout;

/// Tridiagonal stencil matrix: 2 on the diagonal, -1 beside it.
pub fn tridiagonal(n: usize) -> CooMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 2.0));
        if i > 0 {
            t.push((i, i - 1, -1.0));
        }
        if i + 1 < n {
            t.push((i, i + 1, -1.0));
        }
    }
    CooMatrix::from_triplets(n, &t).unwrap()
}

/// Banded matrix with half-bandwidth `h`: diagonal `2h`, `-1` within the band.
pub fn banded(n: usize, h: usize) -> CooMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 2.0 * h as f64));
        for d in 1..=h {
            if i >= d {
                t.push((i, i - d, -1.0));
            }
            if i + d < n {
                t.push((i, i + d, -1.0));
            }
        }
    }
    CooMatrix::from_triplets(n, &t).unwrap()
}

/// Serial reference for the iterated kernel: `iters` times `x := M x`.
pub fn iterate_serial(m: &EllpackMatrix, x0: &[f64], iters: usize) -> Vec<f64> {
    let mut x = x0.to_vec();
    for _ in 0..iters {
        x = spmv_serial(m, &x).unwrap();
    }
    x
}

/// Brute-force requirement set of `rank`: walk every COO entry (row, col) and
/// collect columns of foreign rows referenced by owned rows.
pub fn brute_requirements(m: &CooMatrix, layout: &BlockCyclicLayout, rank: RankId) -> Vec<usize> {
    let mut needed = BTreeSet::new();
    for e in m.entries() {
        if e.row != e.col
            && layout.owner_of_row(e.row) == rank
            && layout.owner_of_row(e.col) != rank
        {
            needed.insert(e.col);
        }
    }
    needed.into_iter().collect()
}

/// Brute-force per-pair volume of one block-wise (v1) exchange.
pub fn brute_v1_pairs(m: &CooMatrix, layout: &BlockCyclicLayout) -> Vec<Vec<PairCounters>> {
    let p = layout.ranks();
    let mut pairs = vec![vec![PairCounters::default(); p]; p];
    for d in 0..p {
        let blocks: BTreeSet<usize> = brute_requirements(m, layout, RankId(d))
            .into_iter()
            .map(|g| layout.block_of(g))
            .collect();
        for b in blocks {
            let s = layout.owner_of_block(b);
            pairs[s.0][d].messages += 1;
            pairs[s.0][d].bytes += layout.block() as u64 * 8;
        }
    }
    pairs
}

/// Serial full-domain heat reference: one flat `(m + 2) * (n + 2)` buffer,
/// no tiles, no exchange. Uses the same pinned neighbor-sum grouping as the
/// solver, `(up + down) + (left + right)`, which is part of the arithmetic
/// contract; everything else is an independent straight-line loop.
pub fn serial_heat(m: usize, n: usize, steps: usize, r: f64, boundary: f64, interior: f64) -> Vec<f64> {
    let w = n + 2;
    let mut cur = vec![boundary; (m + 2) * w];
    for i in 1..=m {
        for j in 1..=n {
            cur[i * w + j] = interior;
        }
    }
    let mut next = cur.clone();
    for _ in 0..steps {
        for i in 1..=m {
            for j in 1..=n {
                let c = i * w + j;
                next[c] = cur[c] + r * ((cur[c - w] + cur[c + w]) + (cur[c - 1] + cur[c + 1]) - 4.0 * cur[c]);
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut out = Vec::with_capacity(m * n);
    for i in 1..=m {
        for j in 1..=n {
            out.push(cur[i * w + j]);
        }
    }
    out
}

/// Bitwise equality for float vectors, with a readable panic message.
pub fn assert_bits_eq(a: &[f64], b: &[f64], what: &str) {
    assert_eq!(a.len(), b.len(), "{what}: length mismatch");
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert_eq!(x.to_bits(), y.to_bits(), "{what}: index {i}: {x} vs {y}");
    }
}

/// Brute-force per-pair volume of one condensed (v2) exchange.
pub fn brute_v2_pairs(m: &CooMatrix, layout: &BlockCyclicLayout) -> Vec<Vec<PairCounters>> {
    let p = layout.ranks();
    let mut pairs = vec![vec![PairCounters::default(); p]; p];
    for d in 0..p {
        let mut per_source = vec![0u64; p];
        for g in brute_requirements(m, layout, RankId(d)) {
            per_source[layout.owner_of_row(g).0] += 1;
        }
        for (s, &count) in per_source.iter().enumerate() {
            if count > 0 {
                pairs[s][d].messages += 1;
                pairs[s][d].bytes += count * 8;
            }
        }
    }
    pairs
}
