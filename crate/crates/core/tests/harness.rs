//! End-to-end runs through the experiment harness.

use nave_core::harness::{
    default_methods_specs, read_csv, run_methods_table, run_ridge_table, write_csv, ExperimentSpec, Method,
    RidgeCell, RunParams,
};
use nave_core::SolveStatus;

#[test]
fn every_cell_is_traceable_to_a_report() {
    let specs: Vec<ExperimentSpec> = default_methods_specs()
        .into_iter()
        .filter(|s| !s.problem_id.contains("d=200"))
        .collect();
    let rows = run_methods_table(&specs).unwrap();
    assert_eq!(rows.len(), specs.len());
    for row in &rows {
        for (cell, reports) in row.cells.iter().zip(&row.reports) {
            assert_eq!(reports.len(), 1);
            assert_eq!(cell.error.to_bits(), reports[0].error.to_bits(), "{}", row.label);
            assert_eq!(cell.iterations, reports[0].iterations);
            if cell.status != SolveStatus::Converged {
                continue;
            }
            assert!(cell.error <= 1e-10, "{} {}", row.label, cell.method);
        }
    }
}

#[test]
fn table_survives_a_csv_round_trip() {
    let specs = vec![
        ExperimentSpec::new("r3:b2", Method::ALL.to_vec()),
        ExperimentSpec::new("tridiag:d=10:mode=xstar:seed=9", vec![Method::Theta1]),
    ];
    let rows = run_methods_table(&specs).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    write_csv(&rows, &path).unwrap();
    assert_eq!(read_csv(&path).unwrap(), rows);
}

#[test]
fn ridge_table_cells() {
    let grid = [
        RidgeCell {
            lam: 0.0,
            mu: 100.0,
            m: 5,
            d: 10,
        },
        RidgeCell {
            lam: 200.0,
            mu: 1000.0,
            m: 20,
            d: 10,
        },
    ];
    let rows = run_ridge_table(&grid, 42, RunParams::default()).unwrap();
    assert_eq!(rows[1].label, "(200, 1000) (20, 10)");
    for row in &rows {
        for m in [Method::Theta1, Method::Theta2] {
            let c = row.cell(m).unwrap();
            assert_eq!(c.status, SolveStatus::Converged);
            assert!(c.iterations <= 50);
        }
        assert!(row.cell(Method::Ip).is_none());
    }
}
