//! Property tests for the pure layers: storage round trips, oracle equality,
//! layout arithmetic, and communication-plan laws.

mod common;

use proptest::prelude::*;

use minipgas::pgas::RankId;
use minipgas::sparse::{spmv_dense_oracle, spmv_serial, CooMatrix, EllpackMatrix, Entry};
use minipgas::spmv::{
    plan_v1, plan_v2, predict_v1, predict_v2, slice_requirements, slice_rows, BlockCyclicLayout,
};

use common::brute_requirements;

/// Random square matrices with a full nonzero diagonal and arbitrary sparse
/// off-diagonal structure (no duplicates, no stored zeros).
fn coo_matrices(max_n: usize) -> impl Strategy<Value = CooMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        let diag = proptest::collection::vec(0.5..2.0f64, n);
        let positions = proptest::collection::btree_set((0..n, 0..n), 0..=3 * n);
        let values = proptest::collection::vec(0.25..4.0f64, 3 * n + 1);
        let signs = proptest::collection::vec(any::<bool>(), 3 * n + 1);
        (Just(n), diag, positions, values, signs).prop_map(|(n, diag, positions, values, signs)| {
            let mut entries: Vec<Entry> = diag
                .into_iter()
                .enumerate()
                .map(|(i, value)| Entry { row: i, col: i, value })
                .collect();
            for (k, (row, col)) in positions.into_iter().filter(|&(r, c)| r != c).enumerate() {
                let magnitude = values[k % values.len()];
                let value = if signs[k % signs.len()] { magnitude } else { -magnitude };
                entries.push(Entry { row, col, value });
            }
            CooMatrix::new(n, entries).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serial_multiply_agrees_with_dense_oracle(
        m in coo_matrices(32),
        raw_x in proptest::collection::vec(-3.0..3.0f64, 32),
    ) {
        let e = EllpackMatrix::from_coo(&m).unwrap();
        let x = &raw_x[..m.n()];
        let fast = spmv_serial(&e, x).unwrap();
        let slow = spmv_dense_oracle(&m, x).unwrap();
        // Identical accumulation order makes this exact, not approximate.
        prop_assert_eq!(
            fast.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            slow.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn ellpack_round_trip_preserves_nonzeros(m in coo_matrices(24)) {
        let e = EllpackMatrix::from_coo(&m).unwrap();
        let back = e.to_coo().unwrap();
        let key = |m: &CooMatrix| {
            let mut v: Vec<_> = m
                .entries()
                .iter()
                .map(|e| (e.row, e.col, e.value.to_bits()))
                .collect();
            v.sort_unstable();
            v
        };
        prop_assert_eq!(key(&m), key(&back));
        prop_assert_eq!(e.nnz_offdiag(), m.entries().len() - m.n());
    }

    #[test]
    fn layout_locate_is_a_bijection(
        n in 1..200usize,
        block in 1..12usize,
        ranks in 1..6usize,
    ) {
        let l = BlockCyclicLayout::new(n, block, ranks).unwrap();
        prop_assert!(l.n_padded() >= n);
        prop_assert!(l.n_padded() % (block * ranks) == 0);
        prop_assert!(l.n_padded() - n < block * ranks);
        for g in 0..l.n_padded() {
            let (owner, local) = l.locate(g);
            prop_assert!(owner.0 < ranks);
            prop_assert!(local < l.local_len());
            prop_assert_eq!(l.global_index(owner, local), g);
        }
    }

    #[test]
    fn requirements_match_brute_force(
        m in coo_matrices(48),
        block in 1..6usize,
        ranks in 1..5usize,
    ) {
        let layout = BlockCyclicLayout::new(m.n(), block, ranks).unwrap();
        let e = EllpackMatrix::from_coo(&m).unwrap();
        let padded = e.with_identity_padding(layout.n_padded()).unwrap();
        for r in 0..ranks {
            let slice = slice_rows(&padded, &layout, RankId(r));
            prop_assert_eq!(
                slice_requirements(&slice, &layout, RankId(r)),
                brute_requirements(&m, &layout, RankId(r))
            );
        }
    }

    #[test]
    fn plan_laws_hold(
        m in coo_matrices(48),
        block in 1..6usize,
        ranks in 2..5usize,
    ) {
        let layout = BlockCyclicLayout::new(m.n(), block, ranks).unwrap();
        let e = EllpackMatrix::from_coo(&m).unwrap();
        let padded = e.with_identity_padding(layout.n_padded()).unwrap();
        let reqs: Vec<Vec<usize>> = (0..ranks)
            .map(|r| {
                let s = slice_rows(&padded, &layout, RankId(r));
                slice_requirements(&s, &layout, RankId(r))
            })
            .collect();
        let p1 = plan_v1(&reqs, &layout);
        let p2 = plan_v2(&reqs, &layout);
        let v1 = predict_v1(&p1, &layout);
        let v2 = predict_v2(&p2);

        for d in 0..ranks {
            // Every pulled block belongs to a foreign rank and is justified by
            // at least one requirement; every requirement is covered.
            for &b in &p1.blocks[d] {
                prop_assert_ne!(layout.owner_of_block(b), RankId(d));
                prop_assert!(reqs[d].iter().any(|&g| layout.block_of(g) == b));
            }
            for &g in &reqs[d] {
                prop_assert!(p1.blocks[d].contains(&layout.block_of(g)));
            }
            // v2 index lists partition the requirement set by owner.
            let mut rebuilt: Vec<usize> = p2.indices[d].iter().flatten().copied().collect();
            rebuilt.sort_unstable();
            prop_assert_eq!(&rebuilt, &reqs[d]);
            for (s, list) in p2.indices[d].iter().enumerate() {
                for &g in list {
                    prop_assert_eq!(layout.owner_of_row(g), RankId(s));
                }
                let mut sorted = list.clone();
                sorted.sort_unstable();
                sorted.dedup();
                prop_assert_eq!(&sorted, list);
            }
        }

        // Condensing never loses to whole-block transfer, pair by pair.
        for s in 0..ranks {
            for d in 0..ranks {
                let (s, d) = (RankId(s), RankId(d));
                prop_assert!(v2.pair(s, d).bytes <= v1.pair(s, d).bytes);
                prop_assert!(v2.pair(s, d).messages <= v1.pair(s, d).messages);
                if s == d {
                    prop_assert_eq!(v1.pair(s, d).bytes, 0);
                    prop_assert_eq!(v2.pair(s, d).bytes, 0);
                }
            }
        }
        prop_assert!(v2.total().bytes <= v1.total().bytes);
    }

    #[test]
    fn padding_never_changes_the_multiply(
        m in coo_matrices(20),
        extra in 0..16usize,
        raw_x in proptest::collection::vec(-2.0..2.0f64, 20),
    ) {
        let e = EllpackMatrix::from_coo(&m).unwrap();
        let x = &raw_x[..m.n()];
        let padded = e.with_identity_padding(m.n() + extra).unwrap();
        let mut x_padded = x.to_vec();
        x_padded.resize(m.n() + extra, 0.0);
        let y = spmv_serial(&e, x).unwrap();
        let y_padded = spmv_serial(&padded, &x_padded).unwrap();
        prop_assert_eq!(
            y.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            y_padded[..m.n()].iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
        prop_assert!(y_padded[m.n()..].iter().all(|&v| v == 0.0));
    }

    /// Stencil max principle: for stable r, each updated cell is a convex
    /// combination of its old value and the four neighbors, so one sweep
    /// never leaves the range of the previous buffer (ring included).
    #[test]
    fn heat_step_obeys_the_max_principle(
        (m, n, cur) in (1usize..=6, 1usize..=6).prop_flat_map(|(m, n)| {
            let cells = (m + 2) * (n + 2);
            (Just(m), Just(n), proptest::collection::vec(-1.0..1.0f64, cells))
        }),
        r in prop_oneof![Just(0.1f64), Just(0.25f64)],
    ) {
        let lo = cur.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = cur.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut next = cur.clone();
        minipgas::heat::step_interior(&cur, &mut next, m, n, r);
        for i in 1..=m {
            for j in 1..=n {
                let v = next[i * (n + 2) + j];
                prop_assert!(lo <= v && v <= hi, "cell ({}, {}): {} outside [{}, {}]", i, j, v, lo, hi);
            }
        }
    }
}
