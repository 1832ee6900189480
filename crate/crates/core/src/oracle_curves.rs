//! Population-level tradeoff quantities computed from the model CDFs.
//!
//! Every expectation of the form `E[W 1{X in R}]` is evaluated as
//! `pi0 * P0(R)`, so the curves reduce to CDF evaluations and one-dimensional
//! root finds. Laws with finitely many Lfdr atoms use exact partial-atom
//! arithmetic instead of bisection.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gcm::{gcm_of_points, KnotCurve};
use crate::model::{Component, Family, MixtureModel};
use crate::scalar::{bisect_last_true, std_normal_cdf, std_normal_sf, Real};

/// Which tail of the observation scale forms the rejection region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// `{x <= t}`: Lfdr nondecreasing in `x`.
    Lower,
    /// `{x >= t}`: Lfdr nonincreasing in `x`.
    Upper,
}

/// Law of `W = Lfdr(X)` when `W` is a monotone function of `X`.
///
/// Regions are indexed by a position `p` such that the rejection region
/// `{position <= p}` grows with `p` (`p = t` for the lower tail, `p = -t` for the
/// upper tail). Flat stretches of the Lfdr (atoms of `W`) are handled through
/// the same region arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneLaw<T> {
    model: MixtureModel<T>,
    tail: Tail,
    p_lo: T,
    p_hi: T,
}

/// Law of `W` supported on finitely many values.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomLaw<T> {
    model: MixtureModel<T>,
    values: Vec<T>,
    masses: Vec<T>,
    /// `M_j`: total mass of atoms `0..=j`
    cum_mass: Vec<T>,
    /// `sum_{i<=j} w_i m_i`
    cum_wmass: Vec<T>,
    /// `sum_{i>j} (1 - w_i) m_i`
    tail_umass: Vec<T>,
}

/// Distribution of the oracle Lfdr statistic.
#[derive(Debug, Clone, PartialEq)]
pub enum LfdrLaw<T> {
    ContinuousMonotone(MonotoneLaw<T>),
    FiniteAtoms(AtomLaw<T>),
}

/// Oracle threshold on `W` for the Neyman-Pearson rule at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NpThreshold<T> {
    RejectNone,
    RejectAll,
    /// Reject `W < value`, accept `W > value`, and reject ties independently
    /// with probability `tie_prob`.
    Cutoff { value: T, tie_prob: T },
}

/// Neyman-Pearson rule `delta_NP(alpha)` for a given law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpRule<T> {
    pub alpha: T,
    /// Rejection mass `u*(alpha)`.
    pub u_star: T,
    pub threshold: NpThreshold<T>,
}

impl<T: Real> NpRule<T> {
    /// Decision for one hypothesis with Lfdr `w`. `tie_draws` counts coin flips.
    pub fn decide<R: Rng + ?Sized>(&self, w: T, rng: &mut R, tie_draws: &mut usize) -> bool {
        match self.threshold {
            NpThreshold::RejectNone => false,
            NpThreshold::RejectAll => true,
            NpThreshold::Cutoff { value, tie_prob } => {
                let tol = T::tie_tolerance() * value.max(T::one());
                if w < value - tol {
                    true
                } else if w > value + tol {
                    false
                } else if tie_prob >= T::one() {
                    true
                } else {
                    *tie_draws += 1;
                    rng.random::<f64>() < tie_prob.as_f64()
                }
            }
        }
    }
}

impl<T: Real> MonotoneLaw<T> {
    fn new(model: MixtureModel<T>, tail: Tail) -> Self {
        let (t_lo, t_hi) = match model.family() {
            Family::GaussianLocation { mu } => {
                let span = T::lit(30.0);
                (mu.min(T::zero()) - span, mu.max(T::zero()) + span)
            }
            _ => (T::zero(), T::one()),
        };
        let (p_lo, p_hi) = match tail {
            Tail::Lower => (t_lo, t_hi),
            Tail::Upper => (-t_hi, -t_lo),
        };
        Self {
            model,
            tail,
            p_lo,
            p_hi,
        }
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Observation-scale threshold of position `p`.
    pub fn threshold_x(&self, p: T) -> T {
        match self.tail {
            Tail::Lower => p,
            Tail::Upper => -p,
        }
    }

    /// `P(X in R_p)`.
    fn mass(&self, p: T) -> T {
        match self.tail {
            Tail::Lower => self.model.cdf(Component::Marginal, p),
            Tail::Upper => self.model.sf(Component::Marginal, -p),
        }
    }

    /// `P(X not in R_p)`.
    fn accept_mass(&self, p: T) -> T {
        match self.tail {
            Tail::Lower => self.model.sf(Component::Marginal, p),
            Tail::Upper => self.model.cdf(Component::Marginal, -p),
        }
    }

    /// `P0(R_p)`.
    fn null_mass(&self, p: T) -> T {
        match self.tail {
            Tail::Lower => self.model.cdf(Component::Null, p),
            Tail::Upper => self.model.sf(Component::Null, -p),
        }
    }

    /// `P1(R_p^c)`.
    fn alt_accept(&self, p: T) -> T {
        match self.tail {
            Tail::Lower => self.model.sf(Component::Alt, p),
            Tail::Upper => self.model.cdf(Component::Alt, -p),
        }
    }

    fn lfdr_at(&self, p: T) -> T {
        let x = self.threshold_x(p);
        if self.model.in_support(x) {
            self.model.lfdr_unchecked(x)
        } else if p <= self.p_lo {
            T::zero()
        } else {
            T::one()
        }
    }

    fn a_at(&self, p: T) -> T {
        let mass = self.mass(p);
        if mass > T::zero() {
            (self.model.pi0() * self.null_mass(p) / mass).min(T::one())
        } else {
            T::zero()
        }
    }

    fn b_at(&self, p: T) -> T {
        let acc = self.accept_mass(p);
        if acc > T::zero() {
            (self.model.pi1() * self.alt_accept(p) / acc).min(T::one())
        } else {
            T::zero()
        }
    }

    /// Position whose region has marginal mass `u`.
    fn position_for_mass(&self, u: T) -> T {
        bisect_last_true(self.p_lo, self.p_hi, T::root_tolerance(), |p| self.mass(p) <= u)
    }

    /// Largest position whose Lfdr does not exceed `y`.
    fn position_for_lfdr(&self, y: T) -> T {
        bisect_last_true(self.p_lo, self.p_hi, T::root_tolerance(), |p| self.lfdr_at(p) <= y)
    }

    fn a_of_u(&self, u: T) -> T {
        let p = self.position_for_mass(u);
        (self.model.pi0() * self.null_mass(p) / u).min(T::one())
    }

    fn b_of_u(&self, u: T) -> T {
        let p = self.position_for_mass(u);
        (self.model.pi1() * self.alt_accept(p) / (T::one() - u)).min(T::one())
    }

    /// Largest position with `a <= alpha`, for `alpha` in `(0, pi0)`.
    fn position_star(&self, alpha: T) -> T {
        bisect_last_true(self.p_lo, self.p_hi, T::root_tolerance(), |p| self.a_at(p) <= alpha)
    }

    fn g_cdf(&self, t: T, strict: bool) -> T {
        let p = if strict {
            // sup{p : W(p) < t}
            bisect_last_true(self.p_lo, self.p_hi, T::root_tolerance(), |p| {
                self.lfdr_at(p) < t - T::tie_tolerance()
            })
        } else {
            self.position_for_lfdr(t + T::tie_tolerance())
        };
        self.mass(p)
    }
}

impl<T: Real> AtomLaw<T> {
    /// Atoms as `(value, mass)` with strictly increasing values in `[0,1]` and
    /// masses summing to one.
    pub fn new(model: MixtureModel<T>, atoms: Vec<(T, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Empty("atoms"));
        }
        if atoms.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::param("atoms", "values must be strictly increasing"));
        }
        if atoms
            .iter()
            .any(|(w, m)| !(*w >= T::zero() && *w <= T::one()) || !(*m > T::zero()))
        {
            return Err(Error::param("atoms", "values must lie in [0,1] with positive mass"));
        }
        let total = atoms.iter().fold(T::zero(), |acc, a| acc + a.1);
        if (total - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(8.0)) {
            return Err(Error::param("atoms", format!("masses sum to {total}")));
        }
        let (values, masses): (Vec<T>, Vec<T>) = atoms.into_iter().unzip();
        let mut cum_mass = Vec::with_capacity(values.len());
        let mut cum_wmass = Vec::with_capacity(values.len());
        let (mut m, mut wm) = (T::zero(), T::zero());
        for (w, mass) in values.iter().zip(&masses) {
            m = m + *mass;
            wm = wm + *w * *mass;
            cum_mass.push(m);
            cum_wmass.push(wm);
        }
        let mut tail_umass = vec![T::zero(); values.len()];
        for j in (0..values.len().saturating_sub(1)).rev() {
            tail_umass[j] = tail_umass[j + 1] + (T::one() - values[j + 1]) * masses[j + 1];
        }
        Ok(Self {
            model,
            values,
            masses,
            cum_mass,
            cum_wmass,
            tail_umass,
        })
    }

    pub fn atoms(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.values.iter().copied().zip(self.masses.iter().copied())
    }

    fn mass_before(&self, j: usize) -> T {
        if j == 0 {
            T::zero()
        } else {
            self.cum_mass[j - 1]
        }
    }

    fn wmass_before(&self, j: usize) -> T {
        if j == 0 {
            T::zero()
        } else {
            self.cum_wmass[j - 1]
        }
    }

    /// Atom `G^{-1}(u)` for `u > 0`.
    fn locate(&self, u: T) -> usize {
        let tol = T::tie_tolerance();
        self.cum_mass
            .iter()
            .position(|m| *m >= u - tol)
            .unwrap_or(self.values.len() - 1)
    }

    fn a_of_u(&self, u: T) -> T {
        let j = self.locate(u);
        let partial = (u - self.mass_before(j)).max(T::zero());
        ((self.wmass_before(j) + partial * self.values[j]) / u).min(T::one())
    }

    fn b_of_u(&self, u: T) -> T {
        let j = self.locate(u);
        let left = (self.cum_mass[j] - u).max(T::zero());
        ((left * (T::one() - self.values[j]) + self.tail_umass[j]) / (T::one() - u)).max(T::zero())
    }

    /// `(u*, atom index, p(u*))`; atom `None` means nothing is rejected.
    fn solve(&self, alpha: T) -> (T, Option<usize>, T) {
        let tol = T::tie_tolerance();
        let last = self.values.len() - 1;
        for j in 0..=last {
            let a_end = self.cum_wmass[j] / self.cum_mass[j];
            if a_end <= alpha + tol {
                continue;
            }
            // within atom j: a(u) = (C + (u - M) w) / u = alpha
            let before = self.mass_before(j);
            let numer = self.values[j] * before - self.wmass_before(j);
            let denom = self.values[j] - alpha;
            let u = if denom > T::zero() {
                (numer / denom).max(T::zero())
            } else {
                before
            };
            if j == 0 && u <= tol {
                return (T::zero(), None, T::zero());
            }
            if u <= before + tol {
                return (before, Some(j - 1), T::one());
            }
            let p = ((u - before) / self.masses[j]).min(T::one());
            return (u, Some(j), p);
        }
        (T::one(), Some(last), T::one())
    }

    /// `alpha` values where `b*` jumps: `a` at the end of each atom but the last.
    pub fn jump_points(&self) -> Vec<T> {
        (0..self.values.len().saturating_sub(1))
            .map(|j| self.cum_wmass[j] / self.cum_mass[j])
            .collect()
    }
}

impl<T: Real> LfdrLaw<T> {
    /// Picks the exact representation for each built-in family.
    pub fn from_model(model: &MixtureModel<T>) -> Result<Self> {
        let pi0 = model.pi0();
        match model.family() {
            Family::GaussianLocation { mu } => {
                if *mu == T::zero() {
                    let atom = vec![(pi0, T::one())];
                    Ok(LfdrLaw::FiniteAtoms(AtomLaw::new(model.clone(), atom)?))
                } else {
                    let tail = if *mu > T::zero() { Tail::Upper } else { Tail::Lower };
                    Ok(LfdrLaw::ContinuousMonotone(MonotoneLaw::new(model.clone(), tail)))
                }
            }
            Family::UniformStep { cut } => {
                let cut = *cut;
                let low = model.lfdr_unchecked(cut / T::lit(2.0));
                let low_mass = pi0 * cut + model.pi1();
                let atoms = if cut < T::one() {
                    vec![(low, low_mass), (T::one(), pi0 * (T::one() - cut))]
                } else {
                    vec![(low, T::one())]
                };
                Ok(LfdrLaw::FiniteAtoms(AtomLaw::new(model.clone(), atoms)?))
            }
            Family::UniformSqrt | Family::UniformCustom(_) => Ok(LfdrLaw::ContinuousMonotone(
                MonotoneLaw::new(model.clone(), Tail::Lower),
            )),
        }
    }

    pub fn model(&self) -> &MixtureModel<T> {
        match self {
            LfdrLaw::ContinuousMonotone(l) => &l.model,
            LfdrLaw::FiniteAtoms(l) => &l.model,
        }
    }

    /// `a(u) = E[W | S_u = 1]`, with `a(0) = 0`.
    pub fn a_of_u(&self, u: T) -> T {
        if u <= T::zero() {
            return T::zero();
        }
        if u >= T::one() {
            return self.model().pi0();
        }
        match self {
            LfdrLaw::ContinuousMonotone(l) => l.a_of_u(u),
            LfdrLaw::FiniteAtoms(l) => l.a_of_u(u),
        }
    }

    /// `b(u) = E[1 - W | S_u = 0]`, with `b(1) = 0`.
    pub fn b_of_u(&self, u: T) -> T {
        if u >= T::one() {
            return T::zero();
        }
        if u <= T::zero() {
            return self.model().pi1();
        }
        match self {
            LfdrLaw::ContinuousMonotone(l) => l.b_of_u(u),
            LfdrLaw::FiniteAtoms(l) => l.b_of_u(u),
        }
    }

    /// `u*(alpha) = sup{u : a(u) <= alpha}`.
    pub fn u_star(&self, alpha: T) -> T {
        self.np_rule(alpha).u_star
    }

    /// `b*(alpha) = mFNR*(alpha)`.
    pub fn mfnr_star(&self, alpha: T) -> T {
        let pi0 = self.model().pi0();
        if alpha >= pi0 {
            return T::zero();
        }
        if alpha <= T::zero() {
            return self.model().pi1();
        }
        match self {
            LfdrLaw::ContinuousMonotone(l) => l.b_at(l.position_star(alpha)),
            LfdrLaw::FiniteAtoms(l) => {
                let (u, _, _) = l.solve(alpha);
                self.b_of_u(u)
            }
        }
    }

    /// The Neyman-Pearson rule at level `alpha`.
    pub fn np_rule(&self, alpha: T) -> NpRule<T> {
        let pi0 = self.model().pi0();
        if alpha >= pi0 {
            return NpRule {
                alpha,
                u_star: T::one(),
                threshold: NpThreshold::RejectAll,
            };
        }
        if alpha <= T::zero() {
            return NpRule {
                alpha,
                u_star: T::zero(),
                threshold: NpThreshold::RejectNone,
            };
        }
        match self {
            LfdrLaw::ContinuousMonotone(l) => {
                let p = l.position_star(alpha);
                let u = l.mass(p);
                if u <= T::zero() {
                    return NpRule {
                        alpha,
                        u_star: T::zero(),
                        threshold: NpThreshold::RejectNone,
                    };
                }
                let cutoff = l.lfdr_at(p);
                let g = l.g_cdf(cutoff, false);
                let g_strict = l.g_cdf(cutoff, true);
                let atom = g - g_strict;
                let tie_prob = if atom > T::lit(1e-8) {
                    ((u - g_strict) / atom).max(T::zero()).min(T::one())
                } else {
                    T::one()
                };
                NpRule {
                    alpha,
                    u_star: u,
                    threshold: NpThreshold::Cutoff {
                        value: cutoff,
                        tie_prob,
                    },
                }
            }
            LfdrLaw::FiniteAtoms(l) => {
                let (u, atom, p) = l.solve(alpha);
                let threshold = match atom {
                    None => NpThreshold::RejectNone,
                    Some(j) if j == l.values.len() - 1 && p >= T::one() => NpThreshold::RejectAll,
                    Some(j) => NpThreshold::Cutoff {
                        value: l.values[j],
                        tie_prob: p,
                    },
                };
                NpRule {
                    alpha,
                    u_star: u,
                    threshold,
                }
            }
        }
    }

    /// `G(t) = P(W <= t)`.
    pub fn g_cdf(&self, t: T) -> T {
        match self {
            LfdrLaw::ContinuousMonotone(l) => l.g_cdf(t, false),
            LfdrLaw::FiniteAtoms(l) => l.atoms().filter(|(w, _)| *w <= t).fold(T::zero(), |acc, a| acc + a.1),
        }
    }

    /// Population `A(y) = E[W | W <= y]` and `B(y) = E[1 - W | W > y]`.
    ///
    /// Parametrized by the Lfdr cutoff rather than the rejection mass; used as an
    /// independent route to `b*`.
    pub fn conditional_means(&self, y: T) -> (T, T) {
        match self {
            LfdrLaw::ContinuousMonotone(l) => {
                let p = l.position_for_lfdr(y);
                (l.a_at(p), l.b_at(p))
            }
            LfdrLaw::FiniteAtoms(l) => {
                let (mut lm, mut lw, mut hm, mut hu) = (T::zero(), T::zero(), T::zero(), T::zero());
                for (w, m) in l.atoms() {
                    if w <= y {
                        lm = lm + m;
                        lw = lw + w * m;
                    } else {
                        hm = hm + m;
                        hu = hu + (T::one() - w) * m;
                    }
                }
                let a = if lm > T::zero() { lw / lm } else { T::zero() };
                let b = if hm > T::zero() { hu / hm } else { T::zero() };
                (a, b)
            }
        }
    }

    /// Extra `alpha` values that must appear on a curve grid.
    pub fn critical_alphas(&self) -> Vec<T> {
        let mut out = vec![T::zero(), self.model().pi0(), T::one()];
        if let LfdrLaw::FiniteAtoms(l) = self {
            out.extend(l.jump_points());
        }
        out
    }
}

/// `b*` sampled on a grid together with its greatest convex minorant.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve<T> {
    pub alphas: Vec<T>,
    pub mfnr: Vec<T>,
    pub fnr: Vec<T>,
    pub gcm_knots: KnotCurve<T>,
}

/// Randomization between two NP levels: use `alpha1` with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub p: T,
}

impl<T: Real> Split<T> {
    pub fn is_degenerate(&self) -> bool {
        self.alpha1 == self.alpha2
    }
}

/// `n` equally spaced points on `[0, 1]`.
pub fn uniform_grid<T: Real>(n: usize) -> Vec<T> {
    let n = n.max(2);
    (0..n)
        .map(|i| T::from_count(i) / T::from_count(n - 1))
        .collect()
}

/// Default evaluation grid: 601 points on `[0, 1]`.
pub fn default_grid<T: Real>() -> Vec<T> {
    uniform_grid(601)
}

/// `mFNR*` on `grid` (augmented with `0`, `pi0`, `1` and any jump points) and
/// its greatest convex minorant `FNR*`.
pub fn fnr_star_curve<T: Real>(law: &LfdrLaw<T>, grid: &[T]) -> Result<TradeoffCurve<T>> {
    if grid.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: grid.len(),
        });
    }
    if grid.iter().any(|a| !(*a >= T::zero() && *a <= T::one())) {
        return Err(Error::param("grid", "alphas must lie in [0,1]"));
    }
    let mut alphas: Vec<T> = grid.to_vec();
    alphas.extend(law.critical_alphas());
    alphas.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    alphas.dedup();
    let mfnr: Vec<T> = alphas.iter().map(|a| law.mfnr_star(*a)).collect();
    let points: Vec<(T, T)> = alphas.iter().copied().zip(mfnr.iter().copied()).collect();
    let gcm_knots = gcm_of_points(&points)?;
    let fnr = alphas
        .iter()
        .map(|a| gcm_knots.eval(*a))
        .collect::<Result<Vec<T>>>()?;
    Ok(TradeoffCurve {
        alphas,
        mfnr,
        fnr,
        gcm_knots,
    })
}

impl<T: Real> TradeoffCurve<T> {
    /// `FNR*(alpha)` by interpolating the minorant.
    pub fn fnr_at(&self, alpha: T) -> Result<T> {
        self.gcm_knots.eval(alpha)
    }

    /// Contact levels `(alpha1, alpha2)` and mixing weight for the oracle at `alpha`.
    pub fn split(&self, law: &LfdrLaw<T>, alpha: T) -> Result<Split<T>> {
        if !(alpha > T::zero() && alpha < T::one()) {
            return Err(Error::param("alpha", format!("{alpha} is not in (0,1)")));
        }
        let star = law.mfnr_star(alpha);
        let hull = self.fnr_at(alpha)?;
        if star - hull <= T::lit(1e-9) {
            return Ok(Split {
                alpha1: alpha,
                alpha2: alpha,
                p: T::one(),
            });
        }
        let b = self.gcm_knots.bracket(alpha)?;
        let knots = self.gcm_knots.knots();
        Ok(Split {
            alpha1: knots[b.lo].0,
            alpha2: knots[b.hi].0,
            p: b.weight,
        })
    }
}

/// Randomization split for the oracle at `alpha`, computing the curve on `grid`.
pub fn randomization_split<T: Real>(law: &LfdrLaw<T>, alpha: T, grid: &[T]) -> Result<Split<T>> {
    fnr_star_curve(law, grid)?.split(law, alpha)
}

/// Closed-form `(mFDR, mFNR)` pairs of the Gaussian location model traced by
/// the rejection threshold `z`.
pub fn gaussian_parametric<T: Real>(mu: T, pi0: T, z_grid: &[T]) -> Vec<(T, T)> {
    let mu = mu.abs();
    let pi1 = T::one() - pi0;
    z_grid
        .iter()
        .map(|&z| {
            let accept = pi0 * std_normal_cdf(z) + pi1 * std_normal_cdf(z - mu);
            let reject = pi0 * std_normal_sf(z) + pi1 * std_normal_sf(z - mu);
            let x = if reject > T::zero() {
                pi0 * std_normal_sf(z) / reject
            } else {
                T::zero()
            };
            let y = if accept > T::zero() {
                pi1 * std_normal_cdf(z - mu) / accept
            } else {
                T::zero()
            };
            (x, y)
        })
        .collect()
}

/// Linear interpolation of a parametric curve at abscissa `x`; `None` outside
/// the traced range.
pub fn interpolate_curve<T: Real>(points: &[(T, T)], x: T) -> Option<T> {
    let mut pts: Vec<(T, T)> = points.iter().copied().filter(|p| p.0.is_finite()).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite abscissa"));
    let idx = pts.partition_point(|p| p.0 < x);
    if idx == 0 {
        return pts.first().filter(|p| p.0 == x).map(|p| p.1);
    }
    if idx == pts.len() {
        return None;
    }
    let (x0, y0) = pts[idx - 1];
    let (x1, y1) = pts[idx];
    if x1 == x0 {
        return Some(y1);
    }
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

/// Limiting rejection threshold of the oracle BH rule on uniform-null models:
/// `t* = sup{t : pi0 t / F(t) <= alpha}`.
pub fn bh_limit_threshold<T: Real>(model: &MixtureModel<T>, alpha: T) -> Result<T> {
    if !model.has_uniform_null() {
        return Err(Error::param("model", "oracle BH limit needs a uniform null"));
    }
    let pi0 = model.pi0();
    if alpha >= pi0 {
        return Ok(T::one());
    }
    let ratio_ok = |t: T| {
        let f = model.cdf(Component::Marginal, t);
        f > T::zero() && pi0 * t / f <= alpha
    };
    Ok(bisect_last_true(T::zero(), T::one(), T::root_tolerance(), ratio_ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step_law() -> LfdrLaw<f64> {
        LfdrLaw::from_model(&MixtureModel::uniform_step(0.75, 0.5).unwrap()).unwrap()
    }

    fn sqrt_law() -> LfdrLaw<f64> {
        LfdrLaw::from_model(&MixtureModel::uniform_sqrt(0.75).unwrap()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn step_law_is_two_atoms() {
        let LfdrLaw::FiniteAtoms(l) = step_law() else {
            panic!("expected atoms")
        };
        let atoms: Vec<_> = l.atoms().collect();
        assert!(close(atoms[0].0, 0.6, 1e-15) && close(atoms[0].1, 0.625, 1e-15));
        assert!(close(atoms[1].0, 1.0, 1e-15) && close(atoms[1].1, 0.375, 1e-15));
    }

    #[test]
    fn a_and_b_on_two_atoms() {
        let law = step_law();
        for u in [1e-6, 0.1, 0.4, 0.625] {
            assert!(close(law.a_of_u(u), 0.6, 1e-12), "u={u}");
        }
        assert!(close(law.a_of_u(1.0), 0.75, 1e-15));
        assert_eq!(law.a_of_u(0.0), 0.0);
        for u in [0.0, 0.2, 0.5] {
            let expected = 0.4 * (0.625 - u) / (1.0 - u);
            assert!(close(law.b_of_u(u), expected, 1e-12), "u={u}");
        }
        assert!(close(law.b_of_u(0.625), 0.0, 1e-12));
        assert_eq!(law.b_of_u(1.0), 0.0);
        assert!(close(law.b_of_u(0.0), 0.25, 1e-15));
    }

    #[test]
    fn a_on_sqrt_closed_form() {
        let law = sqrt_law();
        // u = F(4/9) = 5/9 and a = 1.5 sqrt(t) / (sqrt(t) + 1) = 0.6
        assert!(close(law.a_of_u(5.0 / 9.0), 0.6, 1e-9));
        assert!(close(law.a_of_u(1.0), 0.75, 1e-15));
        assert_eq!(law.b_of_u(0.0), 0.25);
    }

    #[test]
    fn mfnr_star_examples() {
        let step = step_law();
        assert!(close(step.mfnr_star(0.3), 0.25, 1e-12));
        assert!(close(step.mfnr_star(0.6), 0.0, 1e-12));
        assert_eq!(step.mfnr_star(0.8), 0.0);
        assert_eq!(step.mfnr_star(0.0), 0.25);
        let sqrt = sqrt_law();
        assert!(close(sqrt.mfnr_star(0.6), 0.0625, 1e-9));
        assert_eq!(sqrt.mfnr_star(0.75), 0.0);
    }

    #[test]
    fn a_monotone_and_b_antitone_on_grid() {
        for law in [
            step_law(),
            sqrt_law(),
            LfdrLaw::from_model(&MixtureModel::gaussian(0.75, 1.6).unwrap()).unwrap(),
        ] {
            let grid: Vec<f64> = uniform_grid(201);
            let a: Vec<f64> = grid.iter().map(|u| law.a_of_u(*u)).collect();
            let b: Vec<f64> = grid.iter().map(|u| law.b_of_u(*u)).collect();
            assert!(a.windows(2).all(|w| w[0] <= w[1] + 1e-12));
            assert!(b.windows(2).all(|w| w[0] + 1e-12 >= w[1]));
        }
    }

    #[test]
    fn step_curve_and_split() {
        let law = step_law();
        let curve = fnr_star_curve(&law, &default_grid()).unwrap();
        assert_eq!(curve.gcm_knots.knots().len(), 3);
        assert!(close(curve.fnr_at(0.3).unwrap(), 0.125, 1e-12));
        let split = curve.split(&law, 0.3).unwrap();
        assert!(close(split.alpha1, 0.0, 1e-12));
        assert!(close(split.alpha2, 0.6, 1e-12));
        assert!(close(split.p, 0.5, 1e-12));
        for (m, f) in curve.mfnr.iter().zip(&curve.fnr) {
            assert!(*f <= *m + 1e-12);
        }
        assert!(curve.split(&law, 1.0).is_err());
        assert!(curve.split(&law, 0.0).is_err());
    }

    #[test]
    fn sqrt_curve_is_baseline() {
        let law = sqrt_law();
        let curve = fnr_star_curve(&law, &default_grid()).unwrap();
        let knots = curve.gcm_knots.knots();
        assert_eq!(knots, &[(0.0, 0.25), (0.75, 0.0), (1.0, 0.0)]);
        assert!(close(curve.fnr_at(0.3).unwrap(), 0.15, 1e-12));
        for alpha in [0.1, 0.375, 0.7] {
            let s = curve.split(&law, alpha).unwrap();
            assert_eq!((s.alpha1, s.alpha2), (0.0, 0.75));
            assert!(close(s.p, 1.0 - alpha / 0.75, 1e-12));
        }
    }

    #[test]
    fn split_degenerate_where_curve_is_convex() {
        // alpha beyond pi0: both curves vanish
        let law = sqrt_law();
        let s = randomization_split(&law, 0.9, &default_grid()).unwrap();
        assert_eq!(s, Split { alpha1: 0.9, alpha2: 0.9, p: 1.0 });
        assert!(s.is_degenerate());
        let g = LfdrLaw::from_model(&MixtureModel::gaussian(0.75, 3.0).unwrap()).unwrap();
        let s = randomization_split(&g, 0.5, &default_grid()).unwrap();
        assert!(s.is_degenerate());
    }

    #[test]
    fn curve_rejects_short_grid() {
        assert!(fnr_star_curve(&step_law(), &[0.5]).is_err());
    }

    #[test]
    fn parametric_point_and_limits() {
        let pts = gaussian_parametric(1.0, 0.75, &[0.5, -40.0, 40.0]);
        assert!(close(pts[0].0, 0.572_4, 5e-4) && close(pts[0].1, 0.129_5, 5e-4));
        assert!(close(pts[1].0, 0.75, 1e-12) && close(pts[1].1, 0.0, 1e-12));
        assert!(close(pts[2].0, 0.0, 1e-12) && close(pts[2].1, 0.25, 1e-12));
    }

    #[test]
    fn bh_limit_examples() {
        let sqrt = MixtureModel::uniform_sqrt(0.75).unwrap();
        assert!(close(bh_limit_threshold(&sqrt, 0.6).unwrap(), 4.0 / 9.0, 1e-9));
        let step = MixtureModel::uniform_step(0.75, 0.5).unwrap();
        assert!(close(bh_limit_threshold(&step, 0.7).unwrap(), 7.0 / 9.0, 1e-9));
        assert_eq!(bh_limit_threshold(&step, 0.5).unwrap(), 0.0);
        assert_eq!(bh_limit_threshold(&step, 0.8).unwrap(), 1.0);
        let g = MixtureModel::gaussian(0.75, 1.0).unwrap();
        assert!(bh_limit_threshold(&g, 0.3).is_err());
    }

    #[test]
    fn bh_limit_reproduces_mfnr_star() {
        let m = MixtureModel::uniform_sqrt(0.75).unwrap();
        let law = LfdrLaw::from_model(&m).unwrap();
        for alpha in [0.05, 0.2, 0.45, 0.7] {
            let t = bh_limit_threshold(&m, alpha).unwrap();
            let mfnr = 0.25 * (1.0 - m.cdf(Component::Alt, t)) / (1.0 - m.cdf(Component::Marginal, t));
            assert!(close(mfnr, law.mfnr_star(alpha), 1e-8), "alpha={alpha}");
        }
    }

    #[test]
    fn conditional_means_route_matches_mfnr_star() {
        for m in [
            MixtureModel::uniform_sqrt(0.75).unwrap(),
            MixtureModel::gaussian(0.75, 1.0).unwrap(),
            MixtureModel::gaussian(0.6, -2.0).unwrap(),
        ] {
            let law = LfdrLaw::from_model(&m).unwrap();
            for alpha in [0.1, 0.3, 0.5] {
                let y = bisect_last_true(0.0, 1.0, 1e-13, |y| law.conditional_means(y).0 <= alpha);
                let (_, b) = law.conditional_means(y);
                assert!(close(b, law.mfnr_star(alpha), 1e-8), "alpha={alpha}: {b}");
            }
        }
    }

    #[test]
    fn np_rule_on_atoms() {
        let law = step_law();
        let r = law.np_rule(0.6);
        assert!(close(r.u_star, 0.625, 1e-12));
        assert_eq!(
            r.threshold,
            NpThreshold::Cutoff { value: law_atom0(&law), tie_prob: 1.0 }
        );
        assert_eq!(law.np_rule(0.3).threshold, NpThreshold::RejectNone);
        assert_eq!(law.np_rule(0.75).threshold, NpThreshold::RejectAll);
        // between the two jump points the second atom is partially included
        let r = law.np_rule(0.7);
        match r.threshold {
            NpThreshold::Cutoff { value, tie_prob } => {
                assert_eq!(value, 1.0);
                // a(u) = (0.375 + (u - 0.625)) / u = 0.7  =>  u = 0.25/0.3
                let u = 0.25 / 0.3;
                assert!(close(tie_prob, (u - 0.625) / 0.375, 1e-12));
            }
            other => panic!("{other:?}"),
        }
    }

    fn law_atom0(law: &LfdrLaw<f64>) -> f64 {
        match law {
            LfdrLaw::FiniteAtoms(l) => l.atoms().next().unwrap().0,
            _ => unreachable!(),
        }
    }

    #[test]
    fn gaussian_zero_shift_is_single_atom() {
        let law = LfdrLaw::from_model(&MixtureModel::gaussian(0.75, 0.0).unwrap()).unwrap();
        assert!(matches!(law, LfdrLaw::FiniteAtoms(_)));
        assert_eq!(law.mfnr_star(0.5), 0.25);
        let curve = fnr_star_curve(&law, &default_grid()).unwrap();
        assert!(close(curve.fnr_at(0.375).unwrap(), 0.125, 1e-12));
    }

    #[test]
    fn custom_table_with_flat_segment_has_randomized_tie() {
        use crate::model::DensityTable;
        // constant alternative on (0.5, 1) gives an Lfdr atom there
        let t = DensityTable::new(vec![0.0, 0.5, 0.5 + 1e-9, 1.0], vec![1.5, 1.5, 0.5, 0.5]).unwrap();
        let m = MixtureModel::new(0.75, Family::UniformCustom(t)).unwrap();
        let law = LfdrLaw::from_model(&m).unwrap();
        let rule = law.np_rule(0.7);
        match rule.threshold {
            NpThreshold::Cutoff { tie_prob, .. } => assert!(tie_prob > 0.0 && tie_prob < 1.0),
            other => panic!("{other:?}"),
        }
        assert!(close(law.a_of_u(rule.u_star), 0.7, 1e-8));
    }

    #[test]
    fn single_precision_curve() {
        let law = LfdrLaw::from_model(&MixtureModel::<f32>::uniform_step(0.75, 0.5).unwrap()).unwrap();
        let curve = fnr_star_curve(&law, &uniform_grid::<f32>(101)).unwrap();
        assert!((curve.fnr_at(0.3).unwrap() - 0.125).abs() < 1e-5);
    }
}
