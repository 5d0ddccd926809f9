//! Property tests for the algebraic invariants of the path layer and the
//! simulator.

use proptest::prelude::*;

use grough::gbm::{
    derive_seed, sample_control, sample_gbm, ControlKind, GbmSample, UncertaintyInterval,
};
use grough::lift::{ito_lift, pw_linear, pw_linear_lift, strat_lift};
use grough::path::{GridPath, TimeGrid};
use grough::rough::{
    algebraic_tol, chen_defect, holder_norm, random_probe_triples, rough_distance,
    rough_seminorm, RoughPath,
};

fn kind_strategy() -> impl Strategy<Value = ControlKind> {
    prop_oneof![
        Just(ControlKind::ConstantLo),
        Just(ControlKind::ConstantHi),
        Just(ControlKind::IidUniform),
        Just(ControlKind::BangBangRandom),
    ]
}

fn sample_strategy() -> impl Strategy<Value = GbmSample> {
    (kind_strategy(), 1usize..=6, 0u64..1_000_000).prop_map(|(kind, log_n, seed)| {
        let grid = TimeGrid::unit(1 << log_n).unwrap();
        let interval = UncertaintyInterval::new(0.5, 1.0).unwrap();
        let control = sample_control(kind, interval, grid, derive_seed(seed, &[1]));
        sample_gbm(&control, derive_seed(seed, &[2]))
    })
}

fn path_strategy(max_steps: usize) -> impl Strategy<Value = GridPath> {
    prop::collection::vec(-10.0f64..10.0, 2..=max_steps + 1).prop_map(|values| {
        let grid = TimeGrid::unit(values.len() - 1).unwrap();
        GridPath::new(grid, values).unwrap()
    })
}

fn square_lift(p: &GridPath, alpha: f64) -> RoughPath {
    let blocks = p
        .values()
        .windows(2)
        .map(|w| (w[1] - w[0]).powi(2) / 2.0)
        .collect();
    RoughPath::from_blocks(p.clone(), blocks, alpha).unwrap()
}

proptest! {
    /// Every lift built by the library satisfies Chen's identity to 1e-12
    /// on random probe triples.
    #[test]
    fn constructed_lifts_have_zero_chen_defect(sample in sample_strategy(), probe_seed in 0u64..1000) {
        let n = sample.n_steps();
        let triples = random_probe_triples(n, 2 * n, probe_seed);
        for lift in [
            strat_lift(&sample, 0.4).unwrap(),
            ito_lift(&sample, 0.4).unwrap(),
            pw_linear_lift(&pw_linear(&sample, 1).unwrap(), 0.4).unwrap(),
        ] {
            prop_assert!(chen_defect(&lift, &triples).unwrap() <= algebraic_tol(n));
        }
    }

    /// Chen composition agrees with the brute-force double sum
    /// `Σ blocks + Σ_{i<j} ΔX_i ΔX_j` on instances up to 64 steps.
    #[test]
    fn level2_eval_matches_brute_force(
        path in path_strategy(64),
        raw_blocks in prop::collection::vec(-5.0f64..5.0, 64),
    ) {
        let n = path.n_steps();
        let blocks: Vec<f64> = raw_blocks.iter().take(n).copied().collect();
        let rough = RoughPath::from_blocks(path.clone(), blocks.clone(), 0.4).unwrap();
        let v = path.values();
        for s in 0..=n {
            for t in s..=n {
                let mut oracle: f64 = blocks[s..t].iter().sum();
                for i in s..t {
                    for j in (i + 1)..t {
                        oracle += (v[i + 1] - v[i]) * (v[j + 1] - v[j]);
                    }
                }
                let got = rough.second_eval(s, t).unwrap();
                prop_assert!((got - oracle).abs() <= 1e-10,
                    "eval({s},{t}) = {got}, oracle {oracle}");
            }
        }
    }

    /// Restricting a path to a sub-grid can only shrink the Hölder norm.
    #[test]
    fn holder_norm_monotone_under_restriction(path in path_strategy(64), alpha in 0.1f64..1.0) {
        if path.n_steps() % 2 == 0 && path.n_steps() >= 2 {
            let full = holder_norm(&path, alpha).unwrap();
            let sub = holder_norm(&path.restrict(2).unwrap(), alpha).unwrap();
            prop_assert!(sub <= full + 1e-12, "sub {sub} > full {full}");
        }
    }

    /// One-dimensional square-block lifts satisfy eval(s,t) = X_{s,t}²/2.
    #[test]
    fn square_lift_closed_form(sample in sample_strategy()) {
        let lift = strat_lift(&sample, 0.45).unwrap();
        let n = sample.n_steps();
        let tol = algebraic_tol(n);
        for s in 0..=n {
            for t in s..=n {
                let inc = sample.b().increment(s, t);
                prop_assert!((lift.second_eval(s, t).unwrap() - inc * inc / 2.0).abs() <= tol);
            }
        }
    }

    /// The Itô lift differs from the Stratonovich lift by ⟨B⟩_{s,t}/2.
    #[test]
    fn strat_minus_ito_is_half_qv(sample in sample_strategy()) {
        let strat = strat_lift(&sample, 0.4).unwrap();
        let ito = ito_lift(&sample, 0.4).unwrap();
        let n = sample.n_steps();
        let tol = algebraic_tol(n);
        for s in 0..=n {
            for t in s..=n {
                let diff = strat.second_eval(s, t).unwrap() - ito.second_eval(s, t).unwrap();
                prop_assert!((diff - sample.qv().increment(s, t) / 2.0).abs() <= tol);
            }
        }
    }

    /// Scaling X by λ and 𝕏 by λ² scales the seminorm by λ.
    #[test]
    fn seminorm_scale_covariance(path in path_strategy(32), lambda in 0.01f64..8.0) {
        let lift = square_lift(&path, 0.4);
        let scaled_first = GridPath::new(
            *path.grid(),
            path.values().iter().map(|v| lambda * v).collect(),
        ).unwrap();
        let scaled_blocks = lift.second().step_blocks().iter().map(|b| lambda * lambda * b).collect();
        let scaled = RoughPath::from_blocks(scaled_first, scaled_blocks, 0.4).unwrap();
        let lhs = rough_seminorm(&scaled);
        let rhs = lambda * rough_seminorm(&lift);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    /// ϱ_α is symmetric and satisfies the triangle inequality over the
    /// shared pair set.
    #[test]
    fn rough_distance_is_a_metric(
        a in path_strategy(32),
        b_values in prop::collection::vec(-10.0f64..10.0, 33),
        c_values in prop::collection::vec(-10.0f64..10.0, 33),
    ) {
        let n = a.n_steps();
        if n == 32 {
            let grid = *a.grid();
            let b = GridPath::new(grid, b_values).unwrap();
            let c = GridPath::new(grid, c_values).unwrap();
            let (la, lb, lc) = (square_lift(&a, 0.4), square_lift(&b, 0.4), square_lift(&c, 0.4));
            let dab = rough_distance(&la, &lb).unwrap();
            let dba = rough_distance(&lb, &la).unwrap();
            prop_assert!((dab - dba).abs() <= 1e-12);
            let dac = rough_distance(&la, &lc).unwrap();
            let dcb = rough_distance(&lc, &lb).unwrap();
            prop_assert!(dab <= dac + dcb + 1e-9, "triangle: {dab} > {dac} + {dcb}");
        }
    }

    /// Identical inputs reproduce bit-identical samples.
    #[test]
    fn sampling_is_deterministic(kind in kind_strategy(), seed in 0u64..1_000_000) {
        let grid = TimeGrid::unit(64).unwrap();
        let interval = UncertaintyInterval::new(0.5, 1.0).unwrap();
        let c1 = sample_control(kind, interval, grid, seed);
        let c2 = sample_control(kind, interval, grid, seed);
        prop_assert_eq!(&c1, &c2);
        let s1 = sample_gbm(&c1, seed ^ 0xABCD);
        let s2 = sample_gbm(&c2, seed ^ 0xABCD);
        prop_assert_eq!(s1.b().values(), s2.b().values());
        prop_assert_eq!(s1.qv().values(), s2.qv().values());
    }

    /// Control values always live in the interval and qv increments equal
    /// a²Δt.
    #[test]
    fn controls_and_qv_are_consistent(sample in sample_strategy()) {
        let interval = sample.control().interval();
        let dt = sample.grid().dt();
        for (i, a) in sample.control().a_values().iter().enumerate() {
            prop_assert!(*a >= interval.sigma_lo() && *a <= interval.sigma_hi());
            prop_assert!((sample.qv_increment(i) - a * a * dt).abs() <= 1e-13);
        }
        // squared density bounds
        let n = sample.n_steps();
        for k in 0..=n {
            let t = sample.grid().node(k);
            let qv = sample.qv().value(k);
            prop_assert!(qv >= interval.sigma_lo().powi(2) * t - 1e-12);
            prop_assert!(qv <= interval.sigma_hi().powi(2) * t + 1e-12);
        }
    }
}
