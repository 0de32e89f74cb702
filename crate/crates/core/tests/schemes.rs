use fastcaputo::{
    build_operator, solve_ode, solve_pde, thomas_solve, CaputoOperator, EpsilonPolicy, OdeProblem,
    PdeStepper, ProblemSpec, Scheme, SolveOptions, SpatialOperator, StepSystem, TimeGrid,
    VoOrderProfile,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const SCHEMES: [Scheme; 3] = [Scheme::L1, Scheme::Fl1, Scheme::Rfl1];

/// Gaussian elimination with partial pivoting on the dense matrix.
#[allow(clippy::needless_range_loop)]
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

#[allow(clippy::needless_range_loop)]
fn dense(sys: &StepSystem) -> Vec<Vec<f64>> {
    let n = sys.diag.len();
    let mut a = vec![vec![0.0; n]; n];
    for j in 0..n {
        a[j][j] = sys.diag[j];
        if j > 0 {
            a[j][j - 1] = sys.sub[j];
        }
        if j + 1 < n {
            a[j][j + 1] = sys.sup[j];
        }
    }
    a
}

fn random_dominant(n: usize, seed: u64) -> StepSystem {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let sub: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let sup: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let diag = (0..n)
        .map(|j| {
            let m = sub[j].abs() + sup[j].abs() + rng.gen_range(0.01..2.0);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        })
        .collect();
    let rhs = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    StepSystem {
        sub,
        diag,
        sup,
        rhs,
    }
}

#[test]
fn thomas_matches_dense_elimination_on_random_50() {
    for seed in 0..20 {
        let sys = random_dominant(50, seed);
        let x = thomas_solve(&sys).unwrap();
        let want = dense_solve(dense(&sys), sys.rhs.clone());
        for (a, b) in x.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "seed {seed}");
        }
    }
}

proptest! {
    #[test]
    fn thomas_residual_small(seed in any::<u64>(), n in 1usize..200) {
        let sys = random_dominant(n, seed);
        let x = thomas_solve(&sys).unwrap();
        let a = dense(&sys);
        let rhs_norm = sys.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (row, b) in a.iter().zip(&sys.rhs) {
            let r: f64 = row.iter().zip(&x).map(|(m, v)| m * v).sum::<f64>() - b;
            prop_assert!(r.abs() <= 1e-10 * rhs_norm.max(1e-300));
        }
    }
}

fn zero_problem() -> ProblemSpec {
    ProblemSpec::new(1.0, |_| 1.0, |_, _| 0.0, |_| 0.0, (0.0, 1.0), 1.0).unwrap()
}

#[test]
fn zero_data_gives_zero_field() {
    let profile = VoOrderProfile::sine(0.2, 0.6, 1.0, 1000).unwrap();
    let time = TimeGrid::new(1.0, 32).unwrap();
    let ode = OdeProblem::new(1.0, |_| 0.0, 0.0, 1.0).unwrap();
    for scheme in SCHEMES {
        let opts = SolveOptions { keep_trace: true };
        let pde = solve_pde(
            scheme,
            &zero_problem(),
            &profile,
            time,
            16,
            EpsilonPolicy::DtSquared,
            opts,
        )
        .unwrap();
        for &k in pde.field.levels() {
            assert!(pde.field.level(k).unwrap().iter().all(|&v| v == 0.0));
        }
        let o = solve_ode(scheme, &ode, &profile, time, EpsilonPolicy::DtSquared, opts).unwrap();
        assert!(o.field.scalar_trace().iter().all(|&v| v == 0.0));
    }
}

#[test]
fn first_level_bit_identical_across_schemes() {
    let profile = VoOrderProfile::sine(0.2, 0.6, 1.0, 1000).unwrap();
    let time = TimeGrid::new(1.0, 64).unwrap();
    let problem = ProblemSpec::sine_decay();
    let mut first = Vec::new();
    for scheme in SCHEMES {
        let out = solve_pde(
            scheme,
            &problem,
            &profile,
            time,
            32,
            EpsilonPolicy::DtSquared,
            SolveOptions { keep_trace: true },
        )
        .unwrap();
        first.push(out.field.level(1).unwrap().to_vec());
    }
    assert_eq!(first[0], first[1]);
    assert_eq!(first[0], first[2]);
}

#[test]
fn every_step_system_is_dominant() {
    let profile = VoOrderProfile::sine(0.05, 0.5, 1.0, 1000).unwrap();
    let time = TimeGrid::new(1.0, 32).unwrap();
    let problem = ProblemSpec::new(
        2.0,
        |x| 1.0 + x * x,
        |x, t| x * t,
        |x| (std::f64::consts::PI * x).sin(),
        (0.0, 1.0),
        1.0,
    )
    .unwrap();
    let space = problem.spatial_grid(20).unwrap();
    let mut stepper = PdeStepper::new(Scheme::Rfl1, &problem, &profile, time, space, 1e-6).unwrap();
    for k in 1..=32 {
        let alpha = profile.eval(time.node(k));
        let s = time.dt().powf(-alpha) / fastcaputo::gamma(2.0 - alpha).unwrap();
        stepper.assemble();
        let want = 1.0 / time.dt() + 2.0 * s;
        assert!(
            stepper.system().dominance_margin() >= want * (1.0 - 1e-12),
            "k = {k}"
        );
        stepper.step().unwrap();
    }
}

/// One implicit step from the same history with both operators.
#[test]
fn l1_and_rfl1_single_steps_agree() {
    let profile = VoOrderProfile::sine(0.05, 0.5, 1.0, 1000).unwrap();
    let time = TimeGrid::new(1.0, 1 << 8).unwrap();
    let problem = ProblemSpec::sine_decay();
    let space = problem.spatial_grid(1 << 6).unwrap();
    let lap = SpatialOperator::new(&space, |x| problem.diffusivity(x));
    let mut u: Vec<f64> = (1..space.cells())
        .map(|j| problem.initial(space.node(j)))
        .collect();
    let eps = EpsilonPolicy::DtSquared.resolve(&time);
    let mut l1 = build_operator(Scheme::L1, time, profile.clone(), eps, &u).unwrap();
    let mut rf = build_operator(Scheme::Rfl1, time, profile.clone(), eps, &u).unwrap();
    let dt = time.dt();
    let step = |op: &mut Box<dyn CaputoOperator>, u: &[f64]| {
        op.advance();
        let mut h = vec![0.0; u.len()];
        op.history(&mut h);
        let shift = 1.0 / dt + op.implicit_coefficient();
        let sys = StepSystem {
            sub: lap.sub.iter().map(|v| -v).collect(),
            diag: lap.main.iter().map(|m| shift - m).collect(),
            sup: lap.sup.iter().map(|v| -v).collect(),
            rhs: u.iter().zip(&h).map(|(v, h)| v / dt - h).collect(),
        };
        thomas_solve(&sys).unwrap()
    };
    for k in 1..=time.steps() {
        let a = step(&mut l1, &u);
        let b = step(&mut rf, &u);
        let diff = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-8, "k = {k}: {diff:e}");
        l1.commit(&a);
        rf.commit(&a);
        u = a;
    }
}

#[test]
fn l1_and_rfl1_pde_final_levels_agree() {
    let profile = VoOrderProfile::sine(0.05, 0.5, 1.0, 1000).unwrap();
    let time = TimeGrid::new(1.0, 1 << 8).unwrap();
    let problem = ProblemSpec::sine_decay();
    let run = |s| {
        solve_pde(
            s,
            &problem,
            &profile,
            time,
            1 << 6,
            EpsilonPolicy::DtSquared,
            SolveOptions::default(),
        )
        .unwrap()
        .field
        .final_values()
        .to_vec()
    };
    let (a, b) = (run(Scheme::L1), run(Scheme::Rfl1));
    let diff = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(diff <= 1e-8, "{diff:e}");
}

#[test]
fn l1_and_rfl1_ode_agree_to_four_digits() {
    let time = TimeGrid::new(1.0, 1 << 10).unwrap();
    let problem = OdeProblem::unit_source();
    for (a0, at) in [(0.0, 0.2), (0.05, 0.5), (0.2, 0.6)] {
        let profile = VoOrderProfile::sine(a0, at, 1.0, 1000).unwrap();
        let run = |s| {
            solve_ode(
                s,
                &problem,
                &profile,
                time,
                EpsilonPolicy::DtSquared,
                SolveOptions::default(),
            )
            .unwrap()
            .field
            .final_scalar()
        };
        let (a, b) = (run(Scheme::L1), run(Scheme::Rfl1));
        assert!((a - b).abs() <= 5e-5 * a.abs(), "({a0}, {at}): {a} vs {b}");
    }
}

#[test]
fn memory_proxy_shapes() {
    let profile = VoOrderProfile::sine(0.05, 0.5, 1.0, 1000).unwrap();
    let problem = OdeProblem::unit_source();
    for n in [64usize, 128, 256] {
        let time = TimeGrid::new(1.0, n).unwrap();
        let l1 = solve_ode(
            Scheme::L1,
            &problem,
            &profile,
            time,
            EpsilonPolicy::DtSquared,
            SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(l1.retained_values, n + 1);
        assert_eq!(l1.quadrature_len, None);
        let rf = solve_ode(
            Scheme::Rfl1,
            &problem,
            &profile,
            time,
            EpsilonPolicy::DtSquared,
            SolveOptions::default(),
        )
        .unwrap();
        let q = rf.quadrature_len.unwrap();
        assert_eq!(rf.retained_values, (q + 3) + 4 * q);
    }
}

#[test]
fn fl1_failure_surfaces_before_stepping() {
    let profile = VoOrderProfile::sine(0.0, 0.2, 1.0, 1000).unwrap();
    let time = TimeGrid::new(1.0, 16).unwrap();
    let err = solve_ode(
        Scheme::Fl1,
        &OdeProblem::unit_source(),
        &profile,
        time,
        EpsilonPolicy::DtSquared,
        SolveOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(
        err,
        fastcaputo::Error::EsaLowerIndexDiverges { .. }
    ));
}

#[test]
fn epsilon_policy_resolution() {
    let time = TimeGrid::new(2.0, 16).unwrap();
    assert_eq!(EpsilonPolicy::DtSquared.resolve(&time), 1.0 / 256.0);
    assert_eq!(EpsilonPolicy::Fixed(1e-5).resolve(&time), 1e-5);
}
