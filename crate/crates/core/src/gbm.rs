//! Simulation of one-dimensional G-Brownian motion.
//!
//! Volatility uncertainty is realized scenario-wise: a control `a` takes
//! values in `[σ_lo, σ_hi]`, a standard Wiener increment stream is drawn,
//! and the sample carries `B = ∫ a dW` together with its quadratic
//! variation `⟨B⟩ = ∫ a² ds`. The upper expectation over the scenario
//! family is estimated in [`crate::expectation`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::path::{GridPath, TimeGrid};

/// Volatility bounds `0 <= σ_lo <= σ_hi`, `σ_hi > 0`. Equal bounds recover
/// the classical Wiener case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertaintyInterval {
    sigma_lo: f64,
    sigma_hi: f64,
}

impl UncertaintyInterval {
    pub fn new(sigma_lo: f64, sigma_hi: f64) -> Result<Self> {
        if !(sigma_lo.is_finite() && sigma_hi.is_finite())
            || sigma_lo < 0.0
            || sigma_hi <= 0.0
            || sigma_lo > sigma_hi
        {
            return Err(Error::Parameter(format!(
                "volatility interval needs 0 <= sigma_lo <= sigma_hi with sigma_hi > 0, got [{sigma_lo}, {sigma_hi}]"
            )));
        }
        Ok(Self { sigma_lo, sigma_hi })
    }

    /// The classical case `σ_lo = σ_hi = σ`.
    pub fn classical(sigma: f64) -> Result<Self> {
        Self::new(sigma, sigma)
    }

    pub fn sigma_lo(&self) -> f64 {
        self.sigma_lo
    }

    pub fn sigma_hi(&self) -> f64 {
        self.sigma_hi
    }

    pub fn is_classical(&self) -> bool {
        self.sigma_lo == self.sigma_hi
    }
}

/// The scenario family the harness sweeps. Constant extremes attain the
/// supremum for convex and concave terminal payoffs, which is what the
/// acceptance checks exercise; the family is deliberately small and
/// extensible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlKind {
    ConstantLo,
    ConstantHi,
    IidUniform,
    BangBangRandom,
}

impl ControlKind {
    pub const ALL: [ControlKind; 4] = [
        ControlKind::ConstantLo,
        ControlKind::ConstantHi,
        ControlKind::IidUniform,
        ControlKind::BangBangRandom,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ControlKind::ConstantLo => "constant_lo",
            ControlKind::ConstantHi => "constant_hi",
            ControlKind::IidUniform => "iid_uniform",
            ControlKind::BangBangRandom => "bang_bang_random",
        }
    }
}

impl fmt::Display for ControlKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ControlKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant_lo" => Ok(ControlKind::ConstantLo),
            "constant_hi" => Ok(ControlKind::ConstantHi),
            "iid_uniform" => Ok(ControlKind::IidUniform),
            "bang_bang_random" => Ok(ControlKind::BangBangRandom),
            other => Err(Error::Parameter(format!(
                "unknown scenario kind '{other}'; expected one of constant_lo, constant_hi, iid_uniform, bang_bang_random"
            ))),
        }
    }
}

/// A piecewise-constant volatility scenario on the grid cells.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityControl {
    grid: TimeGrid,
    interval: UncertaintyInterval,
    kind: ControlKind,
    a_values: Vec<f64>,
}

impl VolatilityControl {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn interval(&self) -> &UncertaintyInterval {
        &self.interval
    }

    pub fn kind(&self) -> ControlKind {
        self.kind
    }

    /// One volatility value per grid cell.
    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    /// Build a control from explicit per-cell values (values must respect
    /// the interval).
    pub fn from_values(
        grid: TimeGrid,
        interval: UncertaintyInterval,
        kind: ControlKind,
        a_values: Vec<f64>,
    ) -> Result<Self> {
        if a_values.len() != grid.n_steps() {
            return Err(Error::Parameter(format!(
                "control needs one value per cell: {} cells, {} values",
                grid.n_steps(),
                a_values.len()
            )));
        }
        if a_values
            .iter()
            .any(|a| !(*a >= interval.sigma_lo && *a <= interval.sigma_hi))
        {
            return Err(Error::Parameter(
                "control values must lie in the volatility interval".into(),
            ));
        }
        Ok(Self {
            grid,
            interval,
            kind,
            a_values,
        })
    }
}

/// Splitmix64 finalizer; mixes tag words into a base seed so scenario
/// sweeps can derive independent, reproducible streams.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut h = base ^ 0x9E37_79B9_7F4A_7C15;
    for &tag in tags {
        h = h.wrapping_add(tag).wrapping_add(0x9E37_79B9_7F4A_7C15);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

/// Draw a volatility scenario. Deterministic given the seed.
pub fn sample_control(
    kind: ControlKind,
    interval: UncertaintyInterval,
    grid: TimeGrid,
    rng_seed: u64,
) -> VolatilityControl {
    let n = grid.n_steps();
    let lo = interval.sigma_lo;
    let hi = interval.sigma_hi;
    let a_values = match kind {
        ControlKind::ConstantLo => vec![lo; n],
        ControlKind::ConstantHi => vec![hi; n],
        ControlKind::IidUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            (0..n).map(|_| rng.random_range(lo..=hi)).collect()
        }
        ControlKind::BangBangRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            (0..n)
                .map(|_| if rng.random::<bool>() { hi } else { lo })
                .collect()
        }
    };
    VolatilityControl {
        grid,
        interval,
        kind,
        a_values,
    }
}

/// One simulated `(B, ⟨B⟩)` pair under a volatility scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct GbmSample {
    control: VolatilityControl,
    w_increments: Vec<f64>,
    b: GridPath,
    qv: GridPath,
    seed: u64,
}

impl GbmSample {
    pub fn control(&self) -> &VolatilityControl {
        &self.control
    }

    /// Wiener increments `N(0, Δt)` that drove the sample.
    pub fn w_increments(&self) -> &[f64] {
        &self.w_increments
    }

    /// The G-Brownian path `B`.
    pub fn b(&self) -> &GridPath {
        &self.b
    }

    /// The quadratic variation `⟨B⟩`.
    pub fn qv(&self) -> &GridPath {
        &self.qv
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn grid(&self) -> &TimeGrid {
        self.b.grid()
    }

    pub fn n_steps(&self) -> usize {
        self.b.n_steps()
    }

    /// `B` increment over fine cell `i`.
    pub fn b_increment(&self, i: usize) -> f64 {
        self.b.increment(i, i + 1)
    }

    /// `⟨B⟩` increment over fine cell `i`.
    pub fn qv_increment(&self, i: usize) -> f64 {
        self.qv.increment(i, i + 1)
    }

    /// Assemble a sample from explicit parts. Exists for deterministic
    /// fixtures (e.g. `B_t = t` with `⟨B⟩ ≡ 0`) and oracle tests; only
    /// lengths and grids are validated, consistency of `b`, `qv` and the
    /// control is the caller's business.
    pub fn from_parts(
        control: VolatilityControl,
        w_increments: Vec<f64>,
        b: GridPath,
        qv: GridPath,
        seed: u64,
    ) -> Result<GbmSample> {
        if b.grid() != control.grid() || qv.grid() != control.grid() {
            return Err(Error::GridMismatch(
                "sample parts must share the control grid".into(),
            ));
        }
        if w_increments.len() != control.grid().n_steps() {
            return Err(Error::Parameter(format!(
                "need one Wiener increment per cell: {} cells, {} increments",
                control.grid().n_steps(),
                w_increments.len()
            )));
        }
        Ok(GbmSample {
            control,
            w_increments,
            b,
            qv,
            seed,
        })
    }

    /// Deterministic fixture with prescribed `b` and `qv` paths.
    pub fn deterministic(b: GridPath, qv: GridPath) -> Result<GbmSample> {
        let grid = *b.grid();
        let dt = grid.dt();
        let mut hi = 0.0f64;
        let mut a_values = Vec::with_capacity(grid.n_steps());
        for i in 0..grid.n_steps() {
            let a = (qv.increment(i, i + 1) / dt).max(0.0).sqrt();
            hi = hi.max(a);
            a_values.push(a);
        }
        let interval = UncertaintyInterval::new(0.0, hi.max(1.0))?;
        let w_increments = vec![0.0; grid.n_steps()];
        let control =
            VolatilityControl::from_values(grid, interval, ControlKind::ConstantLo, a_values)?;
        GbmSample::from_parts(control, w_increments, b, qv, 0)
    }

    /// The same sample read on every `factor`-th node. The effective
    /// control on a coarse cell is `sqrt(Δ⟨B⟩ / Δt)`, which keeps
    /// `⟨B⟩` increments equal to `a² Δt` by construction.
    pub fn restrict(&self, factor: usize) -> Result<GbmSample> {
        let b = self.b.restrict(factor)?;
        let qv = self.qv.restrict(factor)?;
        let grid = *b.grid();
        let dt = grid.dt();
        let mut a_values = Vec::with_capacity(grid.n_steps());
        let mut w_increments = Vec::with_capacity(grid.n_steps());
        for i in 0..grid.n_steps() {
            let a = (qv.increment(i, i + 1) / dt).max(0.0).sqrt();
            a_values.push(a);
            let db = b.increment(i, i + 1);
            w_increments.push(if a > 0.0 { db / a } else { 0.0 });
        }
        let control = VolatilityControl {
            grid,
            interval: self.control.interval,
            kind: self.control.kind,
            a_values,
        };
        Ok(GbmSample {
            control,
            w_increments,
            b,
            qv,
            seed: self.seed,
        })
    }
}

/// Simulate one G-Brownian sample under the given control.
///
/// `b[k] = Σ_{i<k} a_i w_i` and `qv[k] = Σ_{i<k} a_i² Δt` with `w_i`
/// i.i.d. `N(0, Δt)` from the seeded generator. Bit-identical on rerun.
pub fn sample_gbm(control: &VolatilityControl, rng_seed: u64) -> GbmSample {
    let grid = *control.grid();
    let n = grid.n_steps();
    let dt = grid.dt();
    let sqrt_dt = dt.sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut w_increments = Vec::with_capacity(n);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        w_increments.push(z * sqrt_dt);
    }

    let mut b_values = Vec::with_capacity(n + 1);
    let mut qv_values = Vec::with_capacity(n + 1);
    b_values.push(0.0);
    qv_values.push(0.0);
    let mut b_acc = 0.0;
    let mut qv_acc = 0.0;
    for (a, w) in control.a_values.iter().zip(w_increments.iter()) {
        b_acc += a * w;
        qv_acc += a * a * dt;
        b_values.push(b_acc);
        qv_values.push(qv_acc);
    }

    GbmSample {
        control: control.clone(),
        w_increments,
        b: GridPath::new(grid, b_values).expect("lengths match by construction"),
        qv: GridPath::new(grid, qv_values).expect("lengths match by construction"),
        seed: rng_seed,
    }
}

/// Convenience: draw the control and the sample from one seed pair.
pub fn sample_scenario(
    kind: ControlKind,
    interval: UncertaintyInterval,
    grid: TimeGrid,
    seed: u64,
) -> GbmSample {
    let control = sample_control(kind, interval, grid, derive_seed(seed, &[1]));
    sample_gbm(&control, derive_seed(seed, &[2]))
}

/// Itô integral of a left-endpoint step integrand:
/// `Σ_i η_{t_i} (B_{t_{i+1}} - B_{t_i})`.
pub fn ito_integral(integrand: &GridPath, sample: &GbmSample) -> Result<f64> {
    ito_integral_partial(integrand, sample, sample.n_steps())
}

/// Itô integral summed over the first `t_idx` cells.
pub fn ito_integral_partial(integrand: &GridPath, sample: &GbmSample, t_idx: usize) -> Result<f64> {
    if integrand.grid() != sample.grid() {
        return Err(Error::GridMismatch(
            "integrand and sample must share a grid".into(),
        ));
    }
    if t_idx > sample.n_steps() {
        return Err(Error::IndexRange(format!(
            "t_idx {t_idx} exceeds {} steps",
            sample.n_steps()
        )));
    }
    let eta = integrand.values();
    let b = sample.b.values();
    let mut acc = 0.0;
    for i in 0..t_idx {
        acc += eta[i] * (b[i + 1] - b[i]);
    }
    Ok(acc)
}

/// Finest-grid discrete bracket `⟨Y, B⟩ = Σ ΔY_i ΔB_i`.
pub fn qv_bracket(y: &GridPath, b: &GridPath) -> Result<f64> {
    if y.grid() != b.grid() {
        return Err(Error::GridMismatch(
            "bracket arguments must share a grid".into(),
        ));
    }
    let yv = y.values();
    let bv = b.values();
    let mut acc = 0.0;
    for i in 0..y.n_steps() {
        acc += (yv[i + 1] - yv[i]) * (bv[i + 1] - bv[i]);
    }
    Ok(acc)
}
