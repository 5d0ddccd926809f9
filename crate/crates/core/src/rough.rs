//! Second-level increments, Hölder norms and the rough-path distance.
//!
//! A rough path here is a grid path `X` together with per-cell blocks
//! `𝕏_{t_i, t_{i+1}}`; values on wider intervals are produced by Chen's
//! identity
//!
//! ```text
//! 𝕏_{s,t} = 𝕏_{s,u} + 𝕏_{u,t} + X_{s,u} · X_{u,t},
//! ```
//!
//! so the identity holds by construction and the second level costs O(N)
//! memory instead of an N×N table.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::path::GridPath;

/// Largest step count for which Hölder suprema enumerate every node pair.
/// Beyond it the supremum is restricted to dyadic gaps plus the full span.
pub const EXACT_PAIR_LIMIT: usize = 4096;

/// Tolerance for algebraic identities checked in double precision.
pub fn algebraic_tol(n_steps: usize) -> f64 {
    if n_steps > 10_000 {
        1e-9
    } else {
        1e-12
    }
}

/// Which node pairs a Hölder supremum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSet {
    /// All pairs `s < t`. Used up to [`EXACT_PAIR_LIMIT`] steps.
    Exact,
    /// Pairs whose gap is a power of two of cells, plus the full span.
    DyadicGaps,
}

impl PairSet {
    pub fn for_steps(n_steps: usize) -> Self {
        if n_steps <= EXACT_PAIR_LIMIT {
            PairSet::Exact
        } else {
            PairSet::DyadicGaps
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PairSet::Exact => "exact",
            PairSet::DyadicGaps => "dyadic_gaps",
        }
    }

    /// The gaps (in cells) scanned on a grid with `n_steps` cells.
    pub fn gaps(&self, n_steps: usize) -> Vec<usize> {
        match self {
            PairSet::Exact => (1..=n_steps).collect(),
            PairSet::DyadicGaps => {
                let mut gaps = Vec::new();
                let mut k = 1;
                while k < n_steps {
                    gaps.push(k);
                    k *= 2;
                }
                gaps.push(n_steps);
                gaps
            }
        }
    }
}

/// Supremum of `|diff(s, s+gap)| / (gap * dt)^exponent` over the pair set
/// selected by the step count.
pub fn sup_quotient_over_pairs(
    n_steps: usize,
    dt: f64,
    exponent: f64,
    diff: impl Fn(usize, usize) -> f64,
) -> f64 {
    let pair_set = PairSet::for_steps(n_steps);
    let mut sup = 0.0f64;
    for gap in pair_set.gaps(n_steps) {
        let inv = (gap as f64 * dt).powf(-exponent);
        let mut m = 0.0f64;
        for s in 0..=(n_steps - gap) {
            m = m.max(diff(s, s + gap).abs());
        }
        sup = sup.max(m * inv);
    }
    sup
}

fn check_exponent(name: &str, value: f64, hi: f64) -> Result<()> {
    if !(value > 0.0 && value <= hi && value.is_finite()) {
        return Err(Error::Parameter(format!(
            "{name} must lie in (0, {hi}], got {value}"
        )));
    }
    Ok(())
}

/// α-Hölder norm of a grid path: `sup |X_{s,t}| / |t-s|^α`.
pub fn holder_norm(path: &GridPath, alpha: f64) -> Result<f64> {
    check_exponent("alpha", alpha, 1.0)?;
    if path.n_steps() < 1 {
        return Err(Error::Parameter("path needs at least 2 nodes".into()));
    }
    let values = path.values();
    let n = path.n_steps();
    let dt = path.grid().dt();
    Ok(sup_quotient_over_pairs(n, dt, alpha, |s, t| values[t] - values[s]))
}

/// Per-cell second-level blocks bound to a first-level path.
#[derive(Debug, Clone, PartialEq)]
pub struct Level2 {
    first: GridPath,
    step_blocks: Vec<f64>,
}

impl Level2 {
    pub fn new(first: GridPath, step_blocks: Vec<f64>) -> Result<Self> {
        if step_blocks.len() != first.n_steps() {
            return Err(Error::Parameter(format!(
                "need one block per grid cell: {} cells, {} blocks",
                first.n_steps(),
                step_blocks.len()
            )));
        }
        Ok(Self { first, step_blocks })
    }

    pub fn first(&self) -> &GridPath {
        &self.first
    }

    pub fn step_blocks(&self) -> &[f64] {
        &self.step_blocks
    }

    /// `𝕏_{s,t}` by Chen composition: one left-to-right pass carrying the
    /// running first-level increment, `O(t_idx - s_idx)`.
    pub fn eval(&self, s_idx: usize, t_idx: usize) -> Result<f64> {
        if t_idx > self.first.n_steps() || s_idx > t_idx {
            return Err(Error::IndexRange(format!(
                "need s_idx <= t_idx <= {}, got ({s_idx}, {t_idx})",
                self.first.n_steps()
            )));
        }
        let values = self.first.values();
        let mut acc = 0.0;
        let mut running = 0.0; // X_{s, t_i}
        for i in s_idx..t_idx {
            let dx = values[i + 1] - values[i];
            acc += self.step_blocks[i] + running * dx;
            running += dx;
        }
        Ok(acc)
    }

    /// Prefix arrays enabling O(1) pair evaluation:
    /// `eval(s,t) = r[t] - r[s] - v[s] * (v[t] - v[s])`
    /// with `r[k] = Σ_{i<k} (block_i + v[i] * Δv_i)`.
    fn prefix(&self) -> Vec<f64> {
        let values = self.first.values();
        let mut r = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        r.push(0.0);
        for (i, block) in self.step_blocks.iter().enumerate() {
            acc += block + values[i] * (values[i + 1] - values[i]);
            r.push(acc);
        }
        r
    }
}

/// 2α-Hölder norm of a second level: `sup |𝕏_{s,t}| / |t-s|^{2α}`.
pub fn holder_norm2(level2: &Level2, two_alpha: f64) -> Result<f64> {
    check_exponent("two_alpha", two_alpha, 2.0)?;
    let n = level2.first.n_steps();
    let dt = level2.first.grid().dt();
    let r = level2.prefix();
    let v = level2.first.values();
    Ok(sup_quotient_over_pairs(n, dt, two_alpha, |s, t| {
        r[t] - r[s] - v[s] * (v[t] - v[s])
    }))
}

/// A first level, its second level and the Hölder exponent they live at.
#[derive(Debug, Clone, PartialEq)]
pub struct RoughPath {
    first: GridPath,
    second: Level2,
    alpha: f64,
}

impl RoughPath {
    /// Assemble a rough path from per-cell blocks; `alpha` must lie in
    /// (1/3, 1/2), the range the rough integral needs.
    pub fn from_blocks(first: GridPath, step_blocks: Vec<f64>, alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 / 3.0 && alpha < 0.5) {
            return Err(Error::Parameter(format!(
                "alpha must lie in (1/3, 1/2), got {alpha}"
            )));
        }
        let second = Level2::new(first.clone(), step_blocks)?;
        Ok(Self {
            first,
            second,
            alpha,
        })
    }

    pub fn first(&self) -> &GridPath {
        &self.first
    }

    pub fn second(&self) -> &Level2 {
        &self.second
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn second_eval(&self, s_idx: usize, t_idx: usize) -> Result<f64> {
        self.second.eval(s_idx, t_idx)
    }

    pub fn n_steps(&self) -> usize {
        self.first.n_steps()
    }
}

/// Max Chen defect `|𝕏_{s,t} - 𝕏_{s,u} - 𝕏_{u,t} - X_{s,u} X_{u,t}|` over
/// probe triples, for an arbitrary second-level evaluator. Lets tests feed
/// inconsistent tables that a composed [`Level2`] cannot represent.
pub fn chen_defect_of(
    eval: impl Fn(usize, usize) -> f64,
    first: &GridPath,
    probe_triples: &[(usize, usize, usize)],
) -> Result<f64> {
    let n = first.n_steps();
    let mut worst = 0.0f64;
    for &(s, u, t) in probe_triples {
        if !(s <= u && u <= t && t <= n) {
            return Err(Error::IndexRange(format!(
                "probe triple must satisfy s <= u <= t <= {n}, got ({s}, {u}, {t})"
            )));
        }
        let defect = eval(s, t) - eval(s, u) - eval(u, t) - first.increment(s, u) * first.increment(u, t);
        worst = worst.max(defect.abs());
    }
    Ok(worst)
}

/// Max Chen defect of a rough path over the probe triples. Zero up to
/// arithmetic tolerance by construction; kept as a regression guard.
pub fn chen_defect(rough: &RoughPath, probe_triples: &[(usize, usize, usize)]) -> Result<f64> {
    chen_defect_of(
        |s, t| rough.second.eval(s, t).expect("validated triple"),
        &rough.first,
        probe_triples,
    )
}

/// Deterministic monotone probe triples for defect checks.
pub fn random_probe_triples(n_steps: usize, count: usize, seed: u64) -> Vec<(usize, usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut idx = [
                rng.random_range(0..=n_steps),
                rng.random_range(0..=n_steps),
                rng.random_range(0..=n_steps),
            ];
            idx.sort_unstable();
            (idx[0], idx[1], idx[2])
        })
        .collect()
}

/// Homogeneous rough-path semi-norm `‖X‖_α + ‖𝕏‖_{2α}^{1/2}`.
pub fn rough_seminorm(rough: &RoughPath) -> f64 {
    let a = holder_norm(&rough.first, rough.alpha).expect("alpha validated at construction");
    let b = holder_norm2(&rough.second, 2.0 * rough.alpha).expect("alpha validated");
    a + b.sqrt()
}

/// First- and second-level parts of the rough distance ϱ_α.
///
/// The second-level difference is evaluated pairwise as
/// `eval_a(s,t) - eval_b(s,t)`; Chen's identity does not hold for the
/// difference, so it is never recomposed from differenced blocks.
pub fn rough_distance_components(a: &RoughPath, b: &RoughPath) -> Result<(f64, f64)> {
    if a.first.grid() != b.first.grid() {
        return Err(Error::GridMismatch(
            "rough distance needs both paths on the same grid".into(),
        ));
    }
    if a.alpha != b.alpha {
        return Err(Error::Parameter(format!(
            "rough distance needs matching alpha, got {} and {}",
            a.alpha, b.alpha
        )));
    }
    let n = a.n_steps();
    let dt = a.first.grid().dt();
    let alpha = a.alpha;

    let va = a.first.values();
    let vb = b.first.values();
    let ra = a.second.prefix();
    let rb = b.second.prefix();
    let dr: Vec<f64> = ra.iter().zip(rb.iter()).map(|(x, y)| x - y).collect();
    let dv: Vec<f64> = va.iter().zip(vb.iter()).map(|(x, y)| x - y).collect();

    let pair_set = PairSet::for_steps(n);
    let mut sup1 = 0.0f64;
    let mut sup2 = 0.0f64;
    for gap in pair_set.gaps(n) {
        let inv1 = (gap as f64 * dt).powf(-alpha);
        let inv2 = (gap as f64 * dt).powf(-2.0 * alpha);
        let mut m1 = 0.0f64;
        let mut m2 = 0.0f64;
        for s in 0..=(n - gap) {
            let t = s + gap;
            m1 = m1.max((dv[t] - dv[s]).abs());
            let second =
                dr[t] - dr[s] - va[s] * (va[t] - va[s]) + vb[s] * (vb[t] - vb[s]);
            m2 = m2.max(second.abs());
        }
        sup1 = sup1.max(m1 * inv1);
        sup2 = sup2.max(m2 * inv2);
    }
    Ok((sup1, sup2))
}

/// Rough distance `ϱ_α = ‖X - X̃‖_α + ‖𝕏 - 𝕏̃‖_{2α}`.
pub fn rough_distance(a: &RoughPath, b: &RoughPath) -> Result<f64> {
    let (l1, l2) = rough_distance_components(a, b)?;
    Ok(l1 + l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::TimeGrid;
    use approx::assert_abs_diff_eq;

    fn path(values: Vec<f64>) -> GridPath {
        let grid = TimeGrid::unit(values.len() - 1).unwrap();
        GridPath::new(grid, values).unwrap()
    }

    /// Canonical lift of a path: blocks (ΔX)²/2, so eval(s,t) = X_{s,t}²/2.
    fn square_lift(p: &GridPath, alpha: f64) -> RoughPath {
        let blocks = p
            .values()
            .windows(2)
            .map(|w| (w[1] - w[0]).powi(2) / 2.0)
            .collect();
        RoughPath::from_blocks(p.clone(), blocks, alpha).unwrap()
    }

    #[test]
    fn holder_norm_of_linear_path_is_slope() {
        for n in [1usize, 2, 7, 32] {
            let grid = TimeGrid::unit(n).unwrap();
            let p = GridPath::from_fn(grid, |t| 2.0 * t);
            assert_abs_diff_eq!(holder_norm(&p, 0.5).unwrap(), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn holder_norm_of_constant_path_is_zero() {
        let grid = TimeGrid::unit(8).unwrap();
        let p = GridPath::constant(grid, 3.5);
        assert_eq!(holder_norm(&p, 0.25).unwrap(), 0.0);
    }

    #[test]
    fn holder_norm_tent_path_matches_hand_enumeration() {
        let p = path(vec![0.0, 1.0, 0.0]);
        // Oracle: enumerate the three pairs directly.
        let alpha = 1.0 / 3.0;
        let mut expected = 0.0f64;
        for s in 0..3 {
            for t in (s + 1)..3 {
                let q = (p.value(t) - p.value(s)).abs() / ((t - s) as f64 * 0.5).powf(alpha);
                expected = expected.max(q);
            }
        }
        assert_abs_diff_eq!(expected, 2f64.powf(alpha), epsilon = 1e-12);
        assert_abs_diff_eq!(holder_norm(&p, alpha).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn holder_norm_rejects_bad_alpha() {
        let p = path(vec![0.0, 1.0]);
        assert!(holder_norm(&p, 0.0).is_err());
        assert!(holder_norm(&p, 1.5).is_err());
        assert!(holder_norm(&p, f64::NAN).is_err());
    }

    #[test]
    fn level2_eval_composes_blocks() {
        // Blocks (ΔX)²/2 with ΔX = [1, 2]: eval(0,2) = 0.5 + 2 + 1·2 = 4.5.
        let p = path(vec![0.0, 1.0, 3.0]);
        let l2 = Level2::new(p, vec![0.5, 2.0]).unwrap();
        assert_eq!(l2.eval(0, 0).unwrap(), 0.0);
        assert_eq!(l2.eval(1, 1).unwrap(), 0.0);
        assert_abs_diff_eq!(l2.eval(0, 2).unwrap(), 4.5, epsilon = 1e-15);
        assert_abs_diff_eq!(l2.eval(0, 2).unwrap(), 3.0f64.powi(2) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn level2_eval_zero_blocks_keeps_cross_terms() {
        let p = path(vec![0.0, 1.0, 2.0]);
        let l2 = Level2::new(p, vec![0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(l2.eval(0, 2).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn level2_eval_rejects_bad_indices() {
        let p = path(vec![0.0, 1.0, 2.0]);
        let l2 = Level2::new(p, vec![0.0, 0.0]).unwrap();
        assert!(l2.eval(2, 1).is_err());
        assert!(l2.eval(0, 3).is_err());
    }

    #[test]
    fn holder_norm2_zero_level_is_zero() {
        let p = path(vec![0.0, 1.0, 2.0]);
        let l2 = Level2::new(p, vec![0.0, 0.0]).unwrap();
        // Cross terms still contribute on composed intervals; zero only for
        // a path without increments.
        let flat = path(vec![0.0, 0.0, 0.0]);
        let l2_flat = Level2::new(flat, vec![0.0, 0.0]).unwrap();
        assert_eq!(holder_norm2(&l2_flat, 1.0).unwrap(), 0.0);
        assert!(holder_norm2(&l2, 1.0).unwrap() > 0.0);
    }

    #[test]
    fn holder_norm2_matches_hand_enumeration() {
        // Chen-composed blocks from ΔX = [1, 2] on nodes {0, 1/2, 1}:
        // pairs give max(0.5/0.5, 2/0.5, 4.5/1) = 4.5 at 2α = 1.
        let p = path(vec![0.0, 1.0, 3.0]);
        let l2 = Level2::new(p, vec![0.5, 2.0]).unwrap();
        assert_abs_diff_eq!(holder_norm2(&l2, 1.0).unwrap(), 4.5, epsilon = 1e-12);
    }

    #[test]
    fn holder_norm2_linear_lift_closed_form() {
        // Lift of c·t has 𝕏_{s,t} = c²(t-s)²/2, so the 2α = 1 norm is c²/2.
        let c = 3.0;
        let grid = TimeGrid::unit(16).unwrap();
        let p = GridPath::from_fn(grid, |t| c * t);
        let lift = square_lift(&p, 0.4);
        assert_abs_diff_eq!(
            holder_norm2(lift.second(), 1.0).unwrap(),
            c * c / 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn chen_defect_vanishes_for_composed_lifts() {
        let p = path(vec![0.0, 0.3, -0.5, 1.1, 0.9, 2.0]);
        let lift = square_lift(&p, 0.4);
        let triples = random_probe_triples(5, 64, 7);
        assert!(chen_defect(&lift, &triples).unwrap() <= 1e-12);
    }

    #[test]
    fn chen_defect_detects_inconsistent_table() {
        // 𝕏 ≡ 0 with X = [0, 1, 2]: defect on (0, 1, 2) is |0 - 0 - 0 - 1·1| = 1.
        let p = path(vec![0.0, 1.0, 2.0]);
        let defect = chen_defect_of(|_, _| 0.0, &p, &[(0, 1, 2)]).unwrap();
        assert_abs_diff_eq!(defect, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn chen_defect_single_interval_is_zero() {
        let p = path(vec![0.0, 1.0]);
        let lift = square_lift(&p, 0.4);
        assert_eq!(chen_defect(&lift, &[(0, 0, 1)]).unwrap(), 0.0);
        assert_eq!(chen_defect(&lift, &[(0, 1, 1)]).unwrap(), 0.0);
    }

    #[test]
    fn chen_defect_rejects_non_monotone_triples() {
        let p = path(vec![0.0, 1.0, 2.0]);
        let lift = square_lift(&p, 0.4);
        assert!(chen_defect(&lift, &[(1, 0, 2)]).is_err());
        assert!(chen_defect(&lift, &[(0, 1, 5)]).is_err());
    }

    #[test]
    fn seminorm_zero_path_is_zero() {
        let grid = TimeGrid::unit(8).unwrap();
        let p = GridPath::constant(grid, 0.0);
        let lift = square_lift(&p, 0.4);
        assert_eq!(rough_seminorm(&lift), 0.0);
    }

    #[test]
    fn seminorm_linear_lift_closed_form() {
        // c·t with canonical blocks at α = 1/2 - ε ≈ 0.5 gives c + c/√2;
        // we check the exact value at α = 0.45 instead:
        // ‖X‖_α = c (span 1), ‖𝕏‖_{2α} = c²/2, so the seminorm is c + c/√2.
        let c = 2.0;
        let grid = TimeGrid::unit(32).unwrap();
        let p = GridPath::from_fn(grid, |t| c * t);
        let lift = square_lift(&p, 0.45);
        // sup of c (t-s)^{1-α} and c²(t-s)^{2-2α}/2 both hit t-s = 1.
        let expected = c + (c * c / 2.0f64).sqrt();
        assert_abs_diff_eq!(rough_seminorm(&lift), expected, epsilon = 1e-12);
    }

    #[test]
    fn seminorm_is_scale_covariant() {
        let p = path(vec![0.0, 0.4, -0.2, 0.9, 0.5]);
        let lift = square_lift(&p, 0.4);
        let lambda = 3.0;
        let scaled_first = GridPath::new(
            *p.grid(),
            p.values().iter().map(|v| lambda * v).collect(),
        )
        .unwrap();
        let scaled_blocks = lift
            .second()
            .step_blocks()
            .iter()
            .map(|b| lambda * lambda * b)
            .collect();
        let scaled = RoughPath::from_blocks(scaled_first, scaled_blocks, 0.4).unwrap();
        assert_abs_diff_eq!(
            rough_seminorm(&scaled),
            lambda * rough_seminorm(&lift),
            epsilon = 1e-12
        );
    }

    #[test]
    fn distance_to_self_is_zero() {
        let p = path(vec![0.0, 0.3, -0.5, 1.1]);
        let lift = square_lift(&p, 0.4);
        assert_eq!(rough_distance(&lift, &lift).unwrap(), 0.0);
    }

    #[test]
    fn distance_ignores_constant_first_level_shift() {
        let p = path(vec![0.0, 0.3, -0.5, 1.1]);
        let a = square_lift(&p, 0.4);
        let shifted = GridPath::new(
            *p.grid(),
            p.values().iter().map(|v| v + 5.0).collect(),
        )
        .unwrap();
        let b = RoughPath::from_blocks(
            shifted,
            a.second().step_blocks().to_vec(),
            0.4,
        )
        .unwrap();
        let (l1, _) = rough_distance_components(&a, &b).unwrap();
        assert_abs_diff_eq!(l1, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn distance_between_linear_lifts_matches_closed_form() {
        // a = lift of t, b = lift of 2t on [0,1], α = 0.45:
        // level 1: sup (t-s)^{1-α} = 1; level 2: sup 1.5 (t-s)^{2-2α} = 1.5.
        let grid = TimeGrid::unit(64).unwrap();
        let a = square_lift(&GridPath::from_fn(grid, |t| t), 0.45);
        let b = square_lift(&GridPath::from_fn(grid, |t| 2.0 * t), 0.45);
        assert_abs_diff_eq!(rough_distance(&a, &b).unwrap(), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn distance_rejects_mismatched_inputs() {
        let a = square_lift(&path(vec![0.0, 1.0, 2.0]), 0.4);
        let other_grid = TimeGrid::new(0.0, 2.0, 2).unwrap();
        let b = square_lift(
            &GridPath::new(other_grid, vec![0.0, 1.0, 2.0]).unwrap(),
            0.4,
        );
        assert!(rough_distance(&a, &b).is_err());
        let c = square_lift(&path(vec![0.0, 1.0, 2.0]), 0.42);
        assert!(rough_distance(&a, &c).is_err());
    }

    #[test]
    fn rough_path_rejects_alpha_outside_range() {
        let p = path(vec![0.0, 1.0]);
        assert!(RoughPath::from_blocks(p.clone(), vec![0.0], 0.3).is_err());
        assert!(RoughPath::from_blocks(p, vec![0.0], 0.5).is_err());
    }

    #[test]
    fn dyadic_gaps_cover_powers_of_two_and_span() {
        assert_eq!(PairSet::DyadicGaps.gaps(6), vec![1, 2, 4, 6]);
        assert_eq!(PairSet::for_steps(EXACT_PAIR_LIMIT), PairSet::Exact);
        assert_eq!(PairSet::for_steps(EXACT_PAIR_LIMIT + 1), PairSet::DyadicGaps);
    }
}
