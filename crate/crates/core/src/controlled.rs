//! Controlled paths and the rough integral via compensated Riemann sums.
//!
//! A pair `(Y, Y')` is controlled by `X` when the remainder
//! `R_{s,t} = Y_{s,t} - Y'_s X_{s,t}` has finite 2α-Hölder norm. The rough
//! integral is the compensated sum `Σ (Y_s X_{s,t} + Y'_s 𝕏_{s,t})` over
//! the finest grid; no further limit is taken, and the local error bound
//! with exponent 3α is checked empirically on a ladder of window widths.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::fit::{fit_rate, FitOutcome, EXACT_ERROR_FLOOR};
use crate::path::GridPath;
use crate::rough::{holder_norm, sup_quotient_over_pairs, RoughPath};

/// A path, its Gubinelli derivative, and the rough path controlling them.
#[derive(Debug, Clone)]
pub struct ControlledPath {
    y: GridPath,
    y_prime: GridPath,
    reference: RoughPath,
}

/// Bundle `(y, y')` with the rough path controlling them.
pub fn make_controlled(
    y_values: Vec<f64>,
    y_prime_values: Vec<f64>,
    reference: &RoughPath,
) -> Result<ControlledPath> {
    let grid = *reference.first().grid();
    let y = GridPath::new(grid, y_values)?;
    let y_prime = GridPath::new(grid, y_prime_values)?;
    Ok(ControlledPath {
        y,
        y_prime,
        reference: reference.clone(),
    })
}

impl ControlledPath {
    pub fn y(&self) -> &GridPath {
        &self.y
    }

    pub fn y_prime(&self) -> &GridPath {
        &self.y_prime
    }

    pub fn reference(&self) -> &RoughPath {
        &self.reference
    }

    /// Remainder `R_{s,t} = Y_{s,t} - Y'_s X_{s,t}`.
    pub fn remainder(&self, s_idx: usize, t_idx: usize) -> f64 {
        self.y.increment(s_idx, t_idx)
            - self.y_prime.value(s_idx) * self.reference.first().increment(s_idx, t_idx)
    }

    /// Controlled-path semi-norm `‖Y'‖_α + ‖R^Y‖_{2α}` over the grid-pair set.
    pub fn gubinelli_norm(&self) -> f64 {
        let alpha = self.reference.alpha();
        let dprime = holder_norm(&self.y_prime, alpha).expect("alpha validated");
        let n = self.y.n_steps();
        let dt = self.y.grid().dt();
        let yv = self.y.values();
        let pv = self.y_prime.values();
        let xv = self.reference.first().values();
        let remainder_norm = sup_quotient_over_pairs(n, dt, 2.0 * alpha, |s, t| {
            yv[t] - yv[s] - pv[s] * (xv[t] - xv[s])
        });
        dprime + remainder_norm
    }
}

/// Push a controlled path through a field: `(f(Y), f'(Y)·Y')`.
pub fn compose_field(field: &ScalarField, cp: &ControlledPath) -> ControlledPath {
    let y_values = cp.y.values().iter().map(|&y| field.eval(y)).collect();
    let y_prime_values = cp
        .y
        .values()
        .iter()
        .zip(cp.y_prime.values().iter())
        .map(|(&y, &yp)| field.d1(y) * yp)
        .collect();
    make_controlled(y_values, y_prime_values, &cp.reference)
        .expect("lengths preserved by construction")
}

/// The controlled pair `(X, 1)` over its own lift.
pub fn controlled_identity(reference: &RoughPath) -> ControlledPath {
    let n_nodes = reference.first().values().len();
    make_controlled(
        reference.first().values().to_vec(),
        vec![1.0; n_nodes],
        reference,
    )
    .expect("lengths match")
}

/// Compensated Riemann sum `Σ_i (Y_i ΔX_i + Y'_i 𝕏_i)` over the fine cells
/// between the two node indices.
pub fn gubinelli_integral(
    cp: &ControlledPath,
    rough: &RoughPath,
    s_idx: usize,
    t_idx: usize,
) -> Result<f64> {
    if cp.reference.first().grid() != rough.first().grid() {
        return Err(Error::GridMismatch(
            "controlled path and rough path must share a grid".into(),
        ));
    }
    if s_idx > t_idx || t_idx > rough.n_steps() {
        return Err(Error::IndexRange(format!(
            "need s_idx <= t_idx <= {}, got ({s_idx}, {t_idx})",
            rough.n_steps()
        )));
    }
    let y = cp.y.values();
    let yp = cp.y_prime.values();
    let x = rough.first().values();
    let blocks = rough.second().step_blocks();
    let mut acc = 0.0;
    for i in s_idx..t_idx {
        acc += y[i] * (x[i + 1] - x[i]) + yp[i] * blocks[i];
    }
    Ok(acc)
}

/// Per-gap worst compensated-sum defect and the fitted log-log slope.
#[derive(Debug, Clone)]
pub struct LocalErrorReport {
    /// `(window width, max |defect|)` rows, widest first.
    pub rows: Vec<(f64, f64)>,
    /// Fitted slope of `log max defect` against `log width`;
    /// [`FitOutcome::Exact`] when every window defect is zero.
    pub fit: FitOutcome,
}

/// Measure `|∫_s^t Y dX - Y_s X_{s,t} - Y'_s 𝕏_{s,t}|` over sliding
/// windows of each gap (stride gap/8, approximating the sup over s) and
/// fit the growth exponent.
pub fn local_error_exponent(
    cp: &ControlledPath,
    rough: &RoughPath,
    gaps: &[usize],
) -> Result<LocalErrorReport> {
    let n = rough.n_steps();
    if gaps.is_empty() {
        return Err(Error::Parameter("gap ladder must not be empty".into()));
    }
    let dt = rough.first().grid().dt();
    let y = cp.y.values();
    let yp = cp.y_prime.values();
    let x = rough.first().values();
    let blocks = rough.second().step_blocks();

    // prefix sums: compensated integral and the Chen-composed second level
    let mut integral_prefix = Vec::with_capacity(n + 1);
    let mut second_prefix = Vec::with_capacity(n + 1);
    integral_prefix.push(0.0);
    second_prefix.push(0.0);
    let mut acc_i = 0.0;
    let mut acc_s = 0.0;
    for k in 0..n {
        let dx = x[k + 1] - x[k];
        acc_i += y[k] * dx + yp[k] * blocks[k];
        acc_s += blocks[k] + x[k] * dx;
        integral_prefix.push(acc_i);
        second_prefix.push(acc_s);
    }

    let mut rows = Vec::with_capacity(gaps.len());
    for &gap in gaps {
        if gap == 0 || gap > n {
            return Err(Error::Parameter(format!(
                "window gap {gap} must lie in 1..={n}"
            )));
        }
        let stride = (gap / 8).max(1);
        let mut worst = 0.0f64;
        let mut s = 0;
        while s + gap <= n {
            let t = s + gap;
            let integral = integral_prefix[t] - integral_prefix[s];
            let second = second_prefix[t] - second_prefix[s] - x[s] * (x[t] - x[s]);
            let head = y[s] * (x[t] - x[s]) + yp[s] * second;
            worst = worst.max((integral - head).abs());
            s += stride;
        }
        rows.push((gap as f64 * dt, worst));
    }
    let widths: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let defects: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let fit = if defects.iter().all(|d| *d < EXACT_ERROR_FLOOR) {
        FitOutcome::Exact
    } else {
        fit_rate(&widths, &defects)?
    };
    Ok(LocalErrorReport { rows, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::TimeGrid;
    use approx::assert_abs_diff_eq;

    fn square_lift(p: &GridPath, alpha: f64) -> RoughPath {
        let blocks = p
            .values()
            .windows(2)
            .map(|w| (w[1] - w[0]).powi(2) / 2.0)
            .collect();
        RoughPath::from_blocks(p.clone(), blocks, alpha).unwrap()
    }

    fn smooth_lift(n: usize) -> RoughPath {
        let grid = TimeGrid::unit(n).unwrap();
        square_lift(&GridPath::from_fn(grid, |t| t), 0.4)
    }

    #[test]
    fn identity_pair_has_zero_remainder() {
        let rough = smooth_lift(16);
        let cp = controlled_identity(&rough);
        for s in 0..16 {
            assert_eq!(cp.remainder(s, s + 1), 0.0);
            assert_eq!(cp.remainder(0, s + 1), 0.0);
        }
    }

    #[test]
    fn constant_pair_has_zero_remainder() {
        let rough = smooth_lift(8);
        let cp = make_controlled(vec![2.0; 9], vec![0.0; 9], &rough).unwrap();
        for s in 0..8 {
            assert_eq!(cp.remainder(s, 8), 0.0);
        }
    }

    #[test]
    fn squared_pair_remainder_is_squared_increment() {
        // (X², 2X): R_{s,t} = X_t² - X_s² - 2 X_s (X_t - X_s) = X_{s,t}².
        let grid = TimeGrid::unit(12).unwrap();
        let x = GridPath::from_fn(grid, |t| (2.3 * t).sin());
        let rough = square_lift(&x, 0.4);
        let cp = make_controlled(
            x.values().iter().map(|v| v * v).collect(),
            x.values().iter().map(|v| 2.0 * v).collect(),
            &rough,
        )
        .unwrap();
        for s in 0..12 {
            for t in s..=12 {
                let expected = x.increment(s, t).powi(2);
                assert_abs_diff_eq!(cp.remainder(s, t), expected, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn make_controlled_rejects_length_mismatch() {
        let rough = smooth_lift(4);
        assert!(make_controlled(vec![0.0; 4], vec![0.0; 5], &rough).is_err());
    }

    #[test]
    fn compose_identity_and_constant_fields() {
        let rough = smooth_lift(8);
        let cp = controlled_identity(&rough);
        let same = compose_field(&ScalarField::identity(), &cp);
        assert_eq!(same.y().values(), cp.y().values());
        assert_eq!(same.y_prime().values(), cp.y_prime().values());

        let constant = compose_field(&ScalarField::constant(4.0), &cp);
        assert!(constant.y().values().iter().all(|&v| v == 4.0));
        assert!(constant.y_prime().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn compose_sin_remainder_obeys_taylor_bound() {
        // |R_{s,t}| = |sin X_t - sin X_s - cos X_s · X_{s,t}| <= ½ X_{s,t}².
        let grid = TimeGrid::unit(32).unwrap();
        let x = GridPath::from_fn(grid, |t| (3.0 * t).cos());
        let rough = square_lift(&x, 0.4);
        let cp = compose_field(&ScalarField::sin(), &controlled_identity(&rough));
        for s in 0..32 {
            for t in s..=32 {
                let bound = 0.5 * x.increment(s, t).powi(2) + 1e-15;
                assert!(cp.remainder(s, t).abs() <= bound);
            }
        }
        assert!(cp.gubinelli_norm().is_finite());
    }

    #[test]
    fn integral_of_identity_pair_telescopes() {
        // (B, 1) against the square-block lift: Σ (B ΔB + ΔB²/2) = B_{0,T}²/2
        // at any partition.
        let grid = TimeGrid::unit(64).unwrap();
        let x = GridPath::from_fn(grid, |t| (5.0 * t).sin() + t);
        let rough = square_lift(&x, 0.4);
        let cp = controlled_identity(&rough);
        let value = gubinelli_integral(&cp, &rough, 0, 64).unwrap();
        assert_abs_diff_eq!(value, x.increment(0, 64).powi(2) / 2.0, epsilon = 1e-13);
        // and over sub-intervals too
        let value = gubinelli_integral(&cp, &rough, 16, 48).unwrap();
        let head = x.value(16) * x.increment(16, 48);
        assert_abs_diff_eq!(
            value,
            head + x.increment(16, 48).powi(2) / 2.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn integral_of_constant_pair_is_linear() {
        let rough = smooth_lift(32);
        let cp = make_controlled(vec![3.0; 33], vec![0.0; 33], &rough).unwrap();
        let value = gubinelli_integral(&cp, &rough, 4, 20).unwrap();
        assert_abs_diff_eq!(
            value,
            3.0 * rough.first().increment(4, 20),
            epsilon = 1e-14
        );
    }

    #[test]
    fn integral_of_squared_pair_approaches_chain_rule_value() {
        // ∫ X² dX over the lift of t on [0,1] tends to 1/3; left Riemann
        // sums converge at rate O(Δt).
        let n = 1 << 12;
        let rough = smooth_lift(n);
        let x = rough.first().clone();
        let cp = make_controlled(
            x.values().iter().map(|v| v * v).collect(),
            x.values().iter().map(|v| 2.0 * v).collect(),
            &rough,
        )
        .unwrap();
        let value = gubinelli_integral(&cp, &rough, 0, n).unwrap();
        assert!(
            (value - 1.0 / 3.0).abs() < 2.0 / n as f64,
            "integral {value}"
        );
    }

    #[test]
    fn integral_is_additive_and_linear() {
        let grid = TimeGrid::unit(64).unwrap();
        let x = GridPath::from_fn(grid, |t| (7.0 * t).sin());
        let rough = square_lift(&x, 0.4);
        let cp1 = compose_field(&ScalarField::sin(), &controlled_identity(&rough));
        let cp2 = compose_field(&ScalarField::cos(), &controlled_identity(&rough));

        let whole = gubinelli_integral(&cp1, &rough, 0, 64).unwrap();
        let split = gubinelli_integral(&cp1, &rough, 0, 17).unwrap()
            + gubinelli_integral(&cp1, &rough, 17, 64).unwrap();
        assert_abs_diff_eq!(whole, split, epsilon = 1e-12);

        let (a, b) = (2.0, -3.0);
        let combo = make_controlled(
            cp1.y()
                .values()
                .iter()
                .zip(cp2.y().values())
                .map(|(u, v)| a * u + b * v)
                .collect(),
            cp1.y_prime()
                .values()
                .iter()
                .zip(cp2.y_prime().values())
                .map(|(u, v)| a * u + b * v)
                .collect(),
            &rough,
        )
        .unwrap();
        let lhs = gubinelli_integral(&combo, &rough, 0, 64).unwrap();
        let rhs = a * gubinelli_integral(&cp1, &rough, 0, 64).unwrap()
            + b * gubinelli_integral(&cp2, &rough, 0, 64).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
    }

    #[test]
    fn identity_pair_defect_is_exact() {
        // (B, 1) against its square-block lift telescopes in every window.
        let grid = TimeGrid::unit(256).unwrap();
        let x = GridPath::from_fn(grid, |t| (11.0 * t).sin());
        let rough = square_lift(&x, 0.4);
        let cp = controlled_identity(&rough);
        let report = local_error_exponent(&cp, &rough, &[4, 8, 16, 32]).unwrap();
        assert_eq!(report.fit, FitOutcome::Exact);
    }

    #[test]
    fn smooth_squared_pair_defect_scales_like_cube() {
        // On the lift of t, the defect of (X², 2X) over a width-h window
        // behaves like h³; the fitted slope clears 2.5 on a dyadic ladder.
        let n = 1 << 12;
        let rough = smooth_lift(n);
        let x = rough.first().clone();
        let cp = make_controlled(
            x.values().iter().map(|v| v * v).collect(),
            x.values().iter().map(|v| 2.0 * v).collect(),
            &rough,
        )
        .unwrap();
        let gaps: Vec<usize> = (4..=9).map(|k| n >> k).collect(); // h = 2^-4 .. 2^-9
        let report = local_error_exponent(&cp, &rough, &gaps).unwrap();
        match report.fit {
            FitOutcome::Fit(fit) => assert!(fit.slope >= 2.5, "slope {}", fit.slope),
            FitOutcome::Exact => panic!("defect should not vanish"),
        }
    }

    #[test]
    fn invalid_windows_are_rejected() {
        let rough = smooth_lift(8);
        let cp = controlled_identity(&rough);
        assert!(local_error_exponent(&cp, &rough, &[]).is_err());
        assert!(local_error_exponent(&cp, &rough, &[0]).is_err());
        assert!(local_error_exponent(&cp, &rough, &[9]).is_err());
        assert!(gubinelli_integral(&cp, &rough, 5, 2).is_err());
    }
}
