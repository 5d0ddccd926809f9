//! Scalar coefficient fields with hand-coded derivatives.

use std::fmt;
use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function together with its first three derivatives.
///
/// The solver needs `f` and `f'`; second and third derivatives back the
/// Taylor-remainder oracles in tests. Fields are cheap to clone and safe
/// to share across threads.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    eval: RealFn,
    d1: RealFn,
    d2: RealFn,
    d3: RealFn,
    /// Sup-norm of `eval` when the field is bounded; metadata only.
    sup_bound: Option<f64>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl ScalarField {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d3: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            d3: Arc::new(d3),
            sup_bound: None,
        }
    }

    pub fn with_sup_bound(mut self, bound: f64) -> Self {
        self.sup_bound = Some(bound);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        (self.d1)(x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        (self.d2)(x)
    }

    pub fn d3(&self, x: f64) -> f64 {
        (self.d3)(x)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const({c})"), move |_| c, |_| 0.0, |_| 0.0, |_| 0.0)
            .with_sup_bound(c.abs())
    }

    /// `x ↦ x`. Unbounded; kept for closed-form oracles at desk scale.
    pub fn identity() -> Self {
        Self::new("identity", |x| x, |_| 1.0, |_| 0.0, |_| 0.0)
    }

    pub fn sin() -> Self {
        Self::new("sin", f64::sin, f64::cos, |x| -x.sin(), |x| -x.cos()).with_sup_bound(1.0)
    }

    pub fn cos() -> Self {
        Self::new("cos", f64::cos, |x| -x.sin(), |x| -x.cos(), f64::sin).with_sup_bound(1.0)
    }

    pub fn tanh() -> Self {
        fn sech2(x: f64) -> f64 {
            1.0 - x.tanh() * x.tanh()
        }
        Self::new(
            "tanh",
            f64::tanh,
            sech2,
            |x| -2.0 * x.tanh() * sech2(x),
            |x| -2.0 * sech2(x) * (1.0 - 3.0 * x.tanh() * x.tanh()),
        )
        .with_sup_bound(1.0)
    }

    /// The field `c · f`.
    pub fn scaled(self, c: f64) -> Self {
        let name = format!("{c}*{}", self.name);
        let (e, g1, g2, g3) = (self.eval, self.d1, self.d2, self.d3);
        Self {
            name,
            eval: Arc::new(move |x| c * e(x)),
            d1: Arc::new(move |x| c * g1(x)),
            d2: Arc::new(move |x| c * g2(x)),
            d3: Arc::new(move |x| c * g3(x)),
            sup_bound: self.sup_bound.map(|b| b * c.abs()),
        }
    }
}
