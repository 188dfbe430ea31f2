use beg_dobrushin::region::{curve_x, in_dobrushin_region};
use beg_dobrushin::verify::{
    evaluate_witness, find_failure_beta, log_grid, run_sweep, CheckKind, SweepReport, SweepSpec,
};
use beg_dobrushin::{exact_max_tv, Error, ModelParams};

fn small_grid() -> Vec<f64> {
    log_grid(1e-2, 20.0, 12).unwrap()
}

#[test]
fn sweep_output_is_independent_of_worker_count() {
    let base = SweepSpec::certification(2, 4, 7).unwrap();
    let one = run_sweep(&base.clone().with_workers(Some(1)))
        .unwrap()
        .to_json();
    for workers in [2, 3, 8] {
        let many = run_sweep(&base.clone().with_workers(Some(workers)))
            .unwrap()
            .to_json();
        assert_eq!(one, many, "workers={workers}");
    }
}

#[test]
fn certification_passes_in_low_dimension() {
    for d in 1..=2 {
        let report = run_sweep(&SweepSpec::certification(d, 5, 3).unwrap()).unwrap();
        assert!(report.all_pass(), "d={d}: {}", report.to_json());
        for c in &report.checks {
            assert!(c.cells_checked > 0);
            assert!(c.skipped_points.is_empty());
        }
    }
}

#[test]
fn failing_witnesses_reproduce() {
    let spec = SweepSpec::new(
        2,
        vec![(0.0, -2.0), (-6.0, 0.0)],
        small_grid(),
        [CheckKind::DobrushinSatisfied, CheckKind::TvVsLemma1],
    )
    .unwrap();
    let report = run_sweep(&spec).unwrap();
    let dob = report.check(CheckKind::DobrushinSatisfied).unwrap();
    assert!(!dob.pass);
    assert!(dob.cells_failed > 0);
    assert!(!dob.witnesses.is_empty());
    for w in &dob.witnesses {
        // only the point outside the uniqueness region can fail
        assert_eq!((w.x, w.y), (0.0, -2.0));
        let again = evaluate_witness(CheckKind::DobrushinSatisfied, 2, w).unwrap();
        assert!((again - w.slack).abs() <= 1e-14);
        assert!(
            !exact_max_tv(&ModelParams::new(w.x, w.y, w.beta, 2).unwrap())
                .unwrap()
                .satisfied
        );
    }
    // the single-pair bound holds everywhere, so nothing is skipped
    let tv = report.check(CheckKind::TvVsLemma1).unwrap();
    assert!(tv.pass);
    assert!(tv.skipped_points.is_empty());
    let gated = run_sweep(
        &SweepSpec::new(
            2,
            vec![(0.0, -2.0)],
            small_grid(),
            [CheckKind::AllVsTheorem1],
        )
        .unwrap(),
    )
    .unwrap();
    let c = gated.check(CheckKind::AllVsTheorem1).unwrap();
    assert!(c.pass);
    assert_eq!(c.cells_checked, 0);
    assert_eq!(c.skipped_points, vec![(0.0, -2.0)]);
}

#[test]
fn worst_cells_reproduce() {
    let report = run_sweep(&SweepSpec::certification(2, 3, 5).unwrap()).unwrap();
    for c in &report.checks {
        let w = c.worst.as_ref().unwrap();
        assert_eq!(Some(w.slack), c.worst_slack);
        let again = evaluate_witness(c.name, 2, w).unwrap();
        assert!(
            (again - w.slack).abs() <= 1e-14,
            "{}: {again} vs {}",
            c.name.name(),
            w.slack
        );
        if matches!(
            c.name,
            CheckKind::TvVsLemma1 | CheckKind::Lemma1VsLemma2 | CheckKind::Lemma1VsLemma3
        ) {
            assert!(w.boundary_pair().unwrap().is_some());
        }
    }
}

#[test]
fn region_membership_implies_dobrushin() {
    for d in [1usize, 2] {
        let pts: Vec<(f64, f64)> = [-3.0, -1.0, -0.4, 0.0, 0.6, 1.0, 2.5]
            .iter()
            .flat_map(|&y| {
                let edge = curve_x(d, y).unwrap();
                [0.01, 0.5, 3.0].map(|off| (edge - off, y))
            })
            .collect();
        for &(x, y) in &pts {
            assert!(in_dobrushin_region(d, x, y).unwrap());
        }
        let spec = SweepSpec::new(
            d,
            pts,
            log_grid(1e-3, 50.0, 30).unwrap(),
            [CheckKind::DobrushinSatisfied],
        )
        .unwrap();
        let report = run_sweep(&spec).unwrap();
        assert!(report.all_pass(), "d={d}");
    }
}

#[test]
fn report_json_round_trips() {
    let report = run_sweep(&SweepSpec::certification(1, 2, 9).unwrap()).unwrap();
    let json = report.to_json();
    let back: SweepReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.to_json(), json);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["d", "grid", "git_rev", "points"] {
        assert!(v["meta"].get(key).is_some(), "{key}");
    }
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "TVvsLemma1",
            "Lemma1vsLemma2",
            "Lemma1vsLemma3",
            "IntermediateBounds",
            "AllvsTheorem1",
            "Theorem1vsRate"
        ]
    );
}

#[test]
fn empty_sweeps_pass_vacuously() {
    for (points, grid) in [(vec![], small_grid()), (vec![(-6.0, 0.0)], vec![])] {
        let report =
            run_sweep(&SweepSpec::new(2, points, grid, [CheckKind::TvVsLemma1]).unwrap()).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.checks[0].cells_checked, 0);
        assert_eq!(report.checks[0].worst_slack, None);
    }
}

#[test]
fn invalid_sweeps_are_rejected() {
    assert!(matches!(
        SweepSpec::new(2, vec![(-6.0, 0.0)], vec![-1.0], [CheckKind::TvVsLemma1]),
        Err(Error::InvalidSweep(_))
    ));
    assert!(SweepSpec::new(
        2,
        vec![(-6.0, 0.0)],
        vec![2.0, 1.0],
        [CheckKind::TvVsLemma1]
    )
    .is_err());
    assert!(SweepSpec::new(2, vec![(f64::NAN, 0.0)], vec![1.0], [CheckKind::TvVsLemma1]).is_err());
    let too_big = SweepSpec::certification(9, 1, 0).unwrap();
    assert!(matches!(run_sweep(&too_big), Err(Error::Capacity { .. })));
}

#[test]
fn failure_beta_regression() {
    let b = find_failure_beta(2, 0.0, -2.0).unwrap().unwrap();
    assert!((b - 0.5359089).abs() < 2e-6, "{b}");
    // just above the threshold the Dobrushin sum exceeds one, just below it does not
    let above = exact_max_tv(&ModelParams::new(0.0, -2.0, b + 1e-4, 2).unwrap()).unwrap();
    let below = exact_max_tv(&ModelParams::new(0.0, -2.0, b - 1e-4, 2).unwrap()).unwrap();
    assert!(!above.satisfied && below.satisfied);
    // deep inside the region there is no failure up to the scan limit
    assert_eq!(find_failure_beta(2, -8.0, 0.0).unwrap(), None);
}
