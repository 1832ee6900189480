//! Two-group mixture families: densities, CDFs, the local false discovery
//! rate, and labeled sampling.

use rand::distr::Open01;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{std_normal_cdf, std_normal_pdf, std_normal_sf, Real};

/// Which density of the mixture to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Null,
    Alt,
    Marginal,
}

/// Decreasing alternative density on `[0, 1]`, linear between table knots.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    cum: Vec<T>,
}

impl<T: Real> DensityTable<T> {
    /// `xs` must run from 0 to 1 strictly increasing; `ys` must be nonnegative,
    /// nonincreasing and integrate to 1 within 1e-6.
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                left: xs.len(),
                right: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::param("table", "need at least two knots"));
        }
        if xs[0] != T::zero() || xs[xs.len() - 1] != T::one() {
            return Err(Error::param("table", "knots must start at 0 and end at 1"));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("table", "knots must be strictly increasing"));
        }
        if ys.iter().any(|y| !(*y >= T::zero()) || !y.is_finite()) {
            return Err(Error::param("table", "density values must be finite and nonnegative"));
        }
        if ys.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::param("table", "density must be nonincreasing"));
        }
        let mut cum = Vec::with_capacity(xs.len());
        cum.push(T::zero());
        for k in 0..xs.len() - 1 {
            let area = (ys[k] + ys[k + 1]) / T::lit(2.0) * (xs[k + 1] - xs[k]);
            cum.push(cum[k] + area);
        }
        let total = cum[cum.len() - 1];
        if (total - T::one()).abs() > T::lit(1e-6) {
            return Err(Error::param(
                "table",
                format!("density integrates to {total}, expected 1"),
            ));
        }
        Ok(Self { xs, ys, cum })
    }

    pub fn knots(&self) -> (&[T], &[T]) {
        (&self.xs, &self.ys)
    }

    fn segment(&self, x: T) -> usize {
        let idx = self.xs.partition_point(|k| *k <= x);
        idx.saturating_sub(1).min(self.xs.len() - 2)
    }

    fn density(&self, x: T) -> T {
        let k = self.segment(x);
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        self.ys[k] + (self.ys[k + 1] - self.ys[k]) * (x - x0) / (x1 - x0)
    }

    fn cdf(&self, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        if x >= T::one() {
            return T::one();
        }
        let k = self.segment(x);
        let d = x - self.xs[k];
        let slope = (self.ys[k + 1] - self.ys[k]) / (self.xs[k + 1] - self.xs[k]);
        let total = self.cum[self.cum.len() - 1];
        ((self.cum[k] + self.ys[k] * d + slope * d * d / T::lit(2.0)) / total).min(T::one())
    }

    fn quantile(&self, v: T) -> T {
        let total = self.cum[self.cum.len() - 1];
        let target = v * total;
        let k = self
            .cum
            .partition_point(|c| *c < target)
            .saturating_sub(1)
            .min(self.xs.len() - 2);
        let rem = (target - self.cum[k]).max(T::zero());
        let b = self.ys[k];
        let slope = (self.ys[k + 1] - self.ys[k]) / (self.xs[k + 1] - self.xs[k]);
        // solve slope/2 d^2 + b d = rem in the cancellation-free form
        let disc = (b * b + T::lit(2.0) * slope * rem).max(T::zero());
        let denom = b + disc.sqrt();
        let d = if denom > T::zero() {
            T::lit(2.0) * rem / denom
        } else {
            T::zero()
        };
        (self.xs[k] + d).min(self.xs[k + 1])
    }
}

/// Alternative family. All uniform families share the null `Unif(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    /// `N(0,1)` null against `N(mu,1)` alternative.
    GaussianLocation { mu: T },
    /// `f1(x) = 1/sqrt(x) - 1` on `(0,1)`.
    UniformSqrt,
    /// `f1 = (1/cut) 1{0 < x < cut}`.
    UniformStep { cut: T },
    /// Tabulated decreasing alternative.
    UniformCustom(DensityTable<T>),
}

/// The two-group model: `theta ~ Bern(pi1)`, `X | theta ~ f_theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel<T> {
    pi0: T,
    family: Family<T>,
}

/// Labels and observations drawn from a [`MixtureModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample<T> {
    /// `true` marks a non-null hypothesis.
    pub theta: Vec<bool>,
    pub x: Vec<T>,
}

impl<T> LabeledSample<T> {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

impl<T: Real> MixtureModel<T> {
    pub fn new(pi0: T, family: Family<T>) -> Result<Self> {
        if !(pi0 > T::zero() && pi0 < T::one()) {
            return Err(Error::param("pi0", format!("{pi0} is not in (0,1)")));
        }
        match &family {
            Family::GaussianLocation { mu } if !mu.is_finite() => {
                return Err(Error::param("mu", "must be finite"));
            }
            Family::UniformStep { cut } if !(*cut > T::zero() && *cut <= T::one()) => {
                return Err(Error::param("cut", format!("{cut} is not in (0,1]")));
            }
            _ => {}
        }
        Ok(Self { pi0, family })
    }

    pub fn gaussian(pi0: T, mu: T) -> Result<Self> {
        Self::new(pi0, Family::GaussianLocation { mu })
    }

    pub fn uniform_sqrt(pi0: T) -> Result<Self> {
        Self::new(pi0, Family::UniformSqrt)
    }

    pub fn uniform_step(pi0: T, cut: T) -> Result<Self> {
        Self::new(pi0, Family::UniformStep { cut })
    }

    pub fn pi0(&self) -> T {
        self.pi0
    }

    pub fn pi1(&self) -> T {
        T::one() - self.pi0
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    /// Null is `Unif(0,1)`; observations are p-values.
    pub fn has_uniform_null(&self) -> bool {
        !matches!(self.family, Family::GaussianLocation { .. })
    }

    pub fn in_support(&self, x: T) -> bool {
        if self.has_uniform_null() {
            x > T::zero() && x < T::one()
        } else {
            x.is_finite()
        }
    }

    fn check(&self, x: T) -> Result<()> {
        if self.in_support(x) {
            Ok(())
        } else {
            Err(Error::OutsideSupport(x.as_f64()))
        }
    }

    fn null_density(&self, x: T) -> T {
        match self.family {
            Family::GaussianLocation { .. } => std_normal_pdf(x),
            _ => T::one(),
        }
    }

    fn alt_density(&self, x: T) -> T {
        match &self.family {
            Family::GaussianLocation { mu } => std_normal_pdf(x - *mu),
            Family::UniformSqrt => T::one() / x.sqrt() - T::one(),
            Family::UniformStep { cut } => {
                if x < *cut {
                    T::one() / *cut
                } else {
                    T::zero()
                }
            }
            Family::UniformCustom(table) => table.density(x),
        }
    }

    /// `f0`, `f1` or the marginal `pi0 f0 + pi1 f1` at `x`.
    pub fn density(&self, which: Component, x: T) -> Result<T> {
        self.check(x)?;
        Ok(match which {
            Component::Null => self.null_density(x),
            Component::Alt => self.alt_density(x),
            Component::Marginal => self.pi0 * self.null_density(x) + self.pi1() * self.alt_density(x),
        })
    }

    /// Local false discovery rate `pi0 f0(x) / f(x)`.
    pub fn lfdr(&self, x: T) -> Result<T> {
        self.check(x)?;
        Ok(self.lfdr_unchecked(x))
    }

    pub(crate) fn lfdr_unchecked(&self, x: T) -> T {
        match self.family {
            Family::GaussianLocation { mu } => {
                let lr = (mu * x - mu * mu / T::lit(2.0)).exp();
                self.pi0 / (self.pi0 + self.pi1() * lr)
            }
            _ => {
                let num = self.pi0;
                let den = self.pi0 + self.pi1() * self.alt_density(x);
                (num / den).min(T::one())
            }
        }
    }

    /// CDF of one component (or the marginal). Uniform families clamp to `[0,1]`.
    pub fn cdf(&self, which: Component, x: T) -> T {
        match which {
            Component::Null => self.null_cdf(x),
            Component::Alt => self.alt_cdf(x),
            Component::Marginal => self.pi0 * self.null_cdf(x) + self.pi1() * self.alt_cdf(x),
        }
    }

    /// Survival function `1 - cdf`, evaluated without cancellation for Gaussians.
    pub fn sf(&self, which: Component, x: T) -> T {
        match (&self.family, which) {
            (Family::GaussianLocation { .. }, Component::Null) => std_normal_sf(x),
            (Family::GaussianLocation { mu }, Component::Alt) => std_normal_sf(x - *mu),
            (Family::GaussianLocation { mu }, Component::Marginal) => {
                self.pi0 * std_normal_sf(x) + self.pi1() * std_normal_sf(x - *mu)
            }
            _ => T::one() - self.cdf(which, x),
        }
    }

    fn null_cdf(&self, x: T) -> T {
        match self.family {
            Family::GaussianLocation { .. } => std_normal_cdf(x),
            _ => x.max(T::zero()).min(T::one()),
        }
    }

    fn alt_cdf(&self, x: T) -> T {
        let clamp = |x: T| x.max(T::zero()).min(T::one());
        match &self.family {
            Family::GaussianLocation { mu } => std_normal_cdf(x - *mu),
            Family::UniformSqrt => {
                let x = clamp(x);
                (T::lit(2.0) * x.sqrt() - x).min(T::one())
            }
            Family::UniformStep { cut } => (clamp(x) / *cut).min(T::one()),
            Family::UniformCustom(table) => table.cdf(x),
        }
    }

    /// Draws an observation from `f1` using the inverse CDF (normal shift for Gaussians).
    fn draw_alt<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match &self.family {
            Family::GaussianLocation { mu } => {
                let z: f64 = rng.sample(StandardNormal);
                T::lit(z) + *mu
            }
            Family::UniformSqrt => {
                // F1(x) = 2r - r^2 with r = sqrt(x)  =>  r = 1 - sqrt(1 - v)
                let v: f64 = rng.sample(Open01);
                let r = v / (1.0 + (1.0 - v).sqrt());
                T::lit(r * r)
            }
            Family::UniformStep { cut } => {
                let v: f64 = rng.sample(Open01);
                T::lit(v) * *cut
            }
            Family::UniformCustom(table) => {
                let v: f64 = rng.sample(Open01);
                let x = table.quantile(T::lit(v));
                // keep draws inside the open support
                x.max(T::lit(f64::MIN_POSITIVE)).min(T::one() - T::epsilon())
            }
        }
    }

    fn draw_null<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self.family {
            Family::GaussianLocation { .. } => T::lit(rng.sample::<f64, _>(StandardNormal)),
            _ => T::lit(rng.sample::<f64, _>(Open01)),
        }
    }

    /// Draws `n` labeled observations. Deterministic given the generator state.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> LabeledSample<T> {
        let pi1 = self.pi1().as_f64();
        let mut theta = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        for _ in 0..n {
            let nonnull = rng.random::<f64>() < pi1;
            theta.push(nonnull);
            x.push(if nonnull {
                self.draw_alt(rng)
            } else {
                self.draw_null(rng)
            });
        }
        LabeledSample { theta, x }
    }
}
