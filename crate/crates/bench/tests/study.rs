use fastcaputo::{Error as CoreError, Scheme};
use fastcaputo_bench::{
    compute_error, rates, run_convergence_study, run_single, save_reference, BenchError, Reference,
    ReferenceSpec, StudyConfig,
};
use proptest::prelude::*;

fn small_ode(scheme: Scheme) -> StudyConfig {
    StudyConfig {
        resolutions: vec![64, 128, 256],
        reference: ReferenceSpec::Compute(2048),
        ..StudyConfig::ode_temporal(scheme, 0.2, 0.6)
    }
}

#[test]
fn error_of_identical_fields_is_zero() {
    let cfg = small_ode(Scheme::Rfl1);
    let out = run_single(&cfg, 64).unwrap();
    let reference = Reference {
        steps: 64,
        cells: None,
        final_values: out.field.final_values().to_vec(),
        trace: Vec::new(),
    };
    assert_eq!(compute_error(&out.field, &reference).unwrap(), 0.0);
}

#[test]
fn error_picks_single_deviation_on_shared_nodes() {
    let cfg = StudyConfig {
        resolutions: vec![8],
        fixed: Some(64),
        ..StudyConfig::pde_spatial(Scheme::Rfl1, 0.05, 0.5)
    };
    let out = run_single(&cfg, 8).unwrap();
    let coarse = out.field.final_values();
    // Reference on a grid twice as fine, equal at shared nodes except one.
    let mut fine = Vec::new();
    for (j, &v) in coarse.iter().enumerate() {
        fine.push(if j == 3 { v + 1e-3 } else { v });
        if j + 1 < coarse.len() {
            fine.push(123.0);
        }
    }
    let reference = Reference {
        steps: 128,
        cells: Some(16),
        final_values: fine,
        trace: Vec::new(),
    };
    let e = compute_error(&out.field, &reference).unwrap();
    assert!((e - 1e-3).abs() < 1e-15);
}

#[test]
fn incompatible_grids_are_reported() {
    let cfg = small_ode(Scheme::Rfl1);
    let out = run_single(&cfg, 64).unwrap();
    let reference = Reference {
        steps: 96,
        cells: None,
        final_values: vec![0.0],
        trace: Vec::new(),
    };
    assert!(matches!(
        compute_error(&out.field, &reference),
        Err(BenchError::Grid(_))
    ));
    let pde = Reference {
        steps: 128,
        cells: Some(8),
        final_values: vec![0.0; 9],
        trace: Vec::new(),
    };
    assert!(matches!(
        compute_error(&out.field, &pde),
        Err(BenchError::Grid(_))
    ));
}

#[test]
fn single_resolution_study_has_one_row_without_rate() {
    let cfg = StudyConfig {
        resolutions: vec![128],
        ..small_ode(Scheme::L1)
    };
    let report = run_convergence_study(&cfg).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].rate, None);
    assert_eq!(report.rows[0].mem_values, 129);
    assert_eq!(report.rows[0].quad_count, None);
}

#[test]
fn validation_rules() {
    let bad = |cfg: StudyConfig| {
        let e = run_convergence_study(&cfg).unwrap_err();
        assert!(e.is_validation(), "{e}");
        assert_eq!(e.exit_code(), 2);
        e
    };
    bad(StudyConfig {
        resolutions: vec![64, 96],
        ..small_ode(Scheme::Rfl1)
    });
    bad(StudyConfig {
        resolutions: vec![128, 64],
        ..small_ode(Scheme::Rfl1)
    });
    bad(StudyConfig {
        resolutions: vec![],
        ..small_ode(Scheme::Rfl1)
    });
    bad(StudyConfig {
        reference: ReferenceSpec::Compute(256),
        ..small_ode(Scheme::Rfl1)
    });
    bad(StudyConfig {
        fixed: None,
        ..StudyConfig::pde_temporal(Scheme::Rfl1, 0.05, 0.5)
    });
    bad(StudyConfig {
        alpha_t: 1.2,
        ..small_ode(Scheme::Rfl1)
    });
    let e = bad(StudyConfig {
        alpha0: 0.0,
        alpha_t: 0.2,
        ..small_ode(Scheme::Fl1)
    });
    assert!(matches!(
        e,
        BenchError::Solver(CoreError::EsaLowerIndexDiverges { .. })
    ));
    assert!(e.to_string().contains("ESA lower index diverges"));
    // The vanishing bound can also sit at t = T.
    bad(StudyConfig {
        alpha0: 0.3,
        alpha_t: 0.0,
        ..small_ode(Scheme::Fl1)
    });
}

#[test]
fn fl1_rejection_leaves_no_partial_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let cfg = StudyConfig {
        alpha0: 0.0,
        alpha_t: 0.2,
        output: Some(out.clone()),
        cache_dir: Some(dir.path().join("cache")),
        ..small_ode(Scheme::Fl1)
    };
    assert!(run_convergence_study(&cfg).is_err());
    assert!(!out.exists());
    assert!(!dir.path().join("cache").exists());
}

#[test]
fn reports_are_deterministic_and_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested").join("ode.csv");
    let cfg = StudyConfig {
        output: Some(out.clone()),
        cache_dir: Some(dir.path().join("cache")),
        ..small_ode(Scheme::Rfl1)
    };
    let a = run_convergence_study(&cfg).unwrap();
    let b = run_convergence_study(&cfg).unwrap();
    assert!(b.reference.contains("cache"));
    let errs = |r: &fastcaputo_bench::ConvergenceReport| {
        r.rows.iter().map(|x| x.error.to_bits()).collect::<Vec<_>>()
    };
    assert_eq!(errs(&a), errs(&b));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("resolution,error,rate,cpu_s,mem_values,quad_count\n"));
    assert_eq!(csv.lines().count(), 4);
    assert!(out.with_extension("md").exists());
    for row in &a.rows {
        assert!(row.quad_count.unwrap() > 0);
    }
}

#[test]
fn file_reference_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let base = small_ode(Scheme::Rfl1);
    let key = base.reference_key().unwrap();
    let reference = fastcaputo_bench::compute_reference(&key).unwrap();
    let path = dir.path().join("ref.bin");
    save_reference(&path, &key, &reference).unwrap();
    let from_file = run_convergence_study(&StudyConfig {
        reference: ReferenceSpec::File(path.clone()),
        ..base.clone()
    })
    .unwrap();
    let computed = run_convergence_study(&base).unwrap();
    for (x, y) in from_file.rows.iter().zip(&computed.rows) {
        assert_eq!(x.error.to_bits(), y.error.to_bits());
    }
    // Same file, different order profile: stale.
    let stale = run_convergence_study(&StudyConfig {
        reference: ReferenceSpec::File(path),
        alpha0: 0.25,
        ..base
    });
    assert!(matches!(stale, Err(BenchError::Cache { .. })));
}

#[test]
fn memory_proxy_of_fast_scheme_tracks_quadrature() {
    let report = run_convergence_study(&small_ode(Scheme::Rfl1)).unwrap();
    for row in &report.rows {
        let q = row.quad_count.unwrap();
        assert_eq!(row.mem_values, (q + 3) + 4 * q);
    }
    let counts: Vec<usize> = report.rows.iter().map(|r| r.quad_count.unwrap()).collect();
    assert!(counts.windows(2).all(|w| w[1] > w[0]));
}

proptest! {
    #[test]
    fn rate_arithmetic_is_consistent(errors in prop::collection::vec(1e-12f64..1.0, 1..10)) {
        let r = rates(&errors);
        prop_assert_eq!(r.len(), errors.len());
        prop_assert!(r[0].is_none());
        for i in 1..errors.len() {
            let rate = r[i].unwrap();
            let coarse = rate.exp2() * errors[i];
            prop_assert!((coarse - errors[i - 1]).abs() <= 1e-12 * errors[i - 1]);
        }
    }
}
