//! End-to-end tests of the distributed heat solver: agreement with a serial
//! full-domain reference, bitwise decomposition independence, and exact halo
//! traffic accounting.

mod common;

use common::{assert_bits_eq, serial_heat};
use minipgas::heat::{run_heat, HeatOptions, InitSpec, ProcessGrid};
use minipgas::pgas::{PairCounters, RankId, SchedulePolicy};

fn opts(m: usize, n: usize, steps: usize, grid: &str) -> HeatOptions {
    HeatOptions::new(m, n, steps, grid.parse().unwrap())
}

#[test]
fn single_rank_matches_the_serial_reference_bitwise() {
    let report = run_heat(&opts(6, 10, 7, "1x1")).unwrap();
    let reference = serial_heat(6, 10, 7, 0.25, 1.0, 0.0);
    assert_bits_eq(&report.field, &reference, "1x1 vs serial");
    assert_eq!(report.measured.total(), PairCounters::default());
    assert_eq!(report.measured.local_copies(), PairCounters::default());
    assert!(report.volume_match);
}

#[test]
fn decomposition_does_not_change_a_single_bit() {
    let serial = run_heat(&opts(16, 16, 25, "1x1")).unwrap();
    for grid in ["2x1", "1x2", "2x2", "4x1", "1x4"] {
        let split = run_heat(&opts(16, 16, 25, grid)).unwrap();
        assert_bits_eq(&split.field, &serial.field, grid);
        assert_eq!(split.checksum.to_bits(), serial.checksum.to_bits(), "{grid} checksum");
        assert!(split.volume_match, "{grid} volume mismatch");
    }
}

#[test]
fn distributed_runs_match_the_serial_reference() {
    // Non-square domain, non-default r and init, uneven tiles per direction.
    let mut o = opts(12, 8, 9, "2x2");
    o.r = 0.125;
    o.init = InitSpec { boundary: -3.0, interior: 0.5 };
    let report = run_heat(&o).unwrap();
    let reference = serial_heat(12, 8, 9, 0.125, -3.0, 0.5);
    assert_bits_eq(&report.field, &reference, "2x2 vs serial");
}

#[test]
fn halo_values_reach_the_neighbor_tile() {
    // Two 1x1 tiles side by side, one step, worked by hand. Each cell sees
    // boundary above, below and outside, and the *other rank's* cell across
    // the internal edge: next = 0.5 + 0.25*((1 + 1) + (1 + 0.5) - 2) = 0.875.
    // A stale zero halo would give 0.75 instead.
    let mut o = opts(1, 2, 1, "1x2");
    o.init = InitSpec { boundary: 1.0, interior: 0.5 };
    let report = run_heat(&o).unwrap();
    assert_eq!(report.field, vec![0.875, 0.875]);

    // Same geometry rotated: tiles stacked vertically.
    let mut o = opts(2, 1, 1, "2x1");
    o.init = InitSpec { boundary: 1.0, interior: 0.5 };
    let report = run_heat(&o).unwrap();
    assert_eq!(report.field, vec![0.875, 0.875]);
}

#[test]
fn uniform_field_stays_fixed_for_any_step_count() {
    let mut one = opts(8, 8, 1, "2x2");
    one.init = InitSpec { boundary: 0.3, interior: 0.3 };
    let mut many = opts(8, 8, 12, "2x2");
    many.init = InitSpec { boundary: 0.3, interior: 0.3 };
    let first = run_heat(&one).unwrap();
    let later = run_heat(&many).unwrap();
    assert_bits_eq(&first.field, &later.field, "uniform field drifted");
    assert!(later.field.iter().all(|&v| v == 0.3));
    assert_eq!(first.checksum.to_bits(), later.checksum.to_bits());
}

#[test]
fn hot_boundary_warms_every_interior_cell() {
    let report = run_heat(&opts(8, 8, 50, "2x2")).unwrap();
    // Heat flows inward: strictly positive everywhere once information from
    // the boundary has crossed the domain, and never above the boundary value.
    assert!(report.field.iter().all(|&v| v > 0.0 && v <= 1.0));
    // Symmetry of the setup survives the decomposition: the field is
    // invariant under horizontal reflection.
    for i in 0..8 {
        for j in 0..8 {
            let a = report.field[i * 8 + j];
            let b = report.field[i * 8 + (7 - j)];
            assert_eq!(a.to_bits(), b.to_bits(), "asymmetry at ({i},{j})");
        }
    }
}

#[test]
fn measured_traffic_equals_the_edge_model_exactly() {
    // 2x2 grid of 4x4 tiles: four internal edges of length 4, each crossed
    // once per direction per step = 8 messages, 8 * 32 bytes per step.
    let steps = 3;
    let report = run_heat(&opts(8, 8, steps, "2x2")).unwrap();
    assert!(report.volume_match);
    assert_eq!(report.measured.total().messages, 8 * steps as u64);
    assert_eq!(report.measured.total().bytes, 8 * 32 * steps as u64);
    // Diagonal ranks never talk: rank 0 and rank 3 share no edge.
    assert_eq!(report.measured.pair(RankId(0), RankId(3)), PairCounters::default());
    assert_eq!(report.measured.pair(RankId(3), RankId(0)), PairCounters::default());
    // Each adjacent ordered pair carries exactly one 32-byte message per step.
    let per_pair = PairCounters { messages: steps as u64, bytes: 32 * steps as u64 };
    for (s, d) in [(0, 1), (1, 0), (0, 2), (2, 0), (1, 3), (3, 1), (2, 3), (3, 2)] {
        assert_eq!(report.measured.pair(RankId(s), RankId(d)), per_pair, "pair {s}->{d}");
    }
    assert_eq!(report.measured.local_copies(), PairCounters::default());
}

#[test]
fn tall_grid_moves_rows_and_wide_grid_moves_columns() {
    // 4x12 interior on 2x1: one internal edge of length 12 = 96 bytes per
    // direction per step.
    let tall = run_heat(&opts(4, 12, 2, "2x1")).unwrap();
    assert!(tall.volume_match);
    assert_eq!(tall.measured.total(), PairCounters { messages: 4, bytes: 2 * 2 * 96 });
    // Same interior on 1x2: the edge is vertical, length 4 = 32 bytes.
    let wide = run_heat(&opts(4, 12, 2, "1x2")).unwrap();
    assert!(wide.volume_match);
    assert_eq!(wide.measured.total(), PairCounters { messages: 4, bytes: 2 * 2 * 32 });
    // Same physics either way.
    assert_bits_eq(&tall.field, &wide.field, "tall vs wide");
}

#[test]
fn indivisible_dimensions_are_rejected_by_name() {
    let err = run_heat(&opts(10, 4, 1, "3x2")).unwrap_err().to_string();
    assert!(err.contains("10") && err.contains("row"), "message: {err}");
    let err = run_heat(&opts(9, 5, 1, "3x2")).unwrap_err().to_string();
    assert!(err.contains("5") && err.contains("column"), "message: {err}");
}

#[test]
fn repeated_runs_are_identical() {
    let a = run_heat(&opts(8, 12, 6, "2x2")).unwrap();
    let b = run_heat(&opts(8, 12, 6, "2x2")).unwrap();
    assert_bits_eq(&a.field, &b.field, "repeat");
    assert_eq!(a.measured, b.measured);
    assert_eq!(a.checksum.to_bits(), b.checksum.to_bits());
}

#[test]
fn randomized_transfer_scheduling_changes_nothing() {
    let fifo = run_heat(&opts(8, 8, 5, "2x2")).unwrap();
    for seed in [7, 1234] {
        let mut o = opts(8, 8, 5, "2x2");
        o.schedule = SchedulePolicy::Random { seed };
        let random = run_heat(&o).unwrap();
        assert_bits_eq(&random.field, &fifo.field, "random schedule");
        assert_eq!(random.measured, fifo.measured);
    }
}

#[test]
fn report_carries_consistent_timing_and_shape() {
    let steps = 4;
    let report = run_heat(&opts(4, 6, steps, "2x2")).unwrap();
    assert_eq!(report.field.len(), 4 * 6);
    assert_eq!(report.steps, steps);
    assert!(report.wall_s > 0.0);
    assert!((report.avg_step_s - report.wall_s / steps as f64).abs() < 1e-15);
    let grid: ProcessGrid = "2x2".parse().unwrap();
    assert_eq!(report.grid, grid);
    assert_eq!(report.checksum, report.field.iter().sum::<f64>());
}
