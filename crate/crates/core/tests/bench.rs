//! The experiment harness: reproducible output and gap bookkeeping.

use liftcut::bench::{run_experiment, to_csv, Cell, ExperimentConfig, ProblemKind, Setting, CSV_HEADER};

fn small(kind: ProblemKind, settings: Vec<Setting>) -> ExperimentConfig {
    let cells = match kind {
        ProblemKind::Wta => vec![Cell { n: 4, m: 4, param: 0.4 }, Cell { n: 5, m: 3, param: 0.5 }],
        ProblemKind::Eum => vec![Cell { n: 8, m: 3, param: 0.6 }],
    };
    ExperimentConfig {
        kind,
        cells,
        instances_per_cell: 2,
        base_seed: 17,
        settings,
        prefer_exact: false,
        time_limit: None,
        node_limit: None,
        wall_clock: false,
    }
}

#[test]
fn csv_is_byte_identical_across_runs() {
    for kind in [ProblemKind::Wta, ProblemKind::Eum] {
        let config = small(kind, vec![Setting::Oa, Setting::Single, Setting::Two, Setting::Both]);
        let first = to_csv(&run_experiment(&config).1);
        let second = to_csv(&run_experiment(&config).1);
        assert_eq!(first, second);
        assert!(first.starts_with(CSV_HEADER));
        assert_eq!(first.lines().count(), 1 + config.cells.len() * config.settings.len());
    }
}

#[test]
fn identical_settings_give_identical_rows() {
    let (_, sums) = run_experiment(&small(ProblemKind::Wta, vec![Setting::Two, Setting::Two]));
    for pair in sums.chunks(2) {
        assert_eq!(pair[0], pair[1]);
    }
}

#[test]
fn solved_rows_have_no_end_gap() {
    let (records, sums) = run_experiment(&small(ProblemKind::Wta, vec![Setting::Both]));
    assert!(records.iter().all(|r| r.stats.is_ok()));
    for s in &sums {
        assert_eq!(s.unsolved, 0);
        assert_eq!(s.egap, None);
        assert!(s.rgap >= -1e-9);
    }
}
