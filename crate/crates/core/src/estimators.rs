//! Data-driven ingredients: monotone (Grenander) and kernel density
//! estimates, estimated Lfdr values, and the empirical `A`, `B`, `y*` and the
//! knot points of the estimated `b*`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gcm::{gcm_of_points, KnotCurve};
use crate::model::{Component, MixtureModel};
use crate::scalar::{std_normal_pdf, HullScalar, Real};

/// Anything that yields a density value at a point.
pub trait DensityEstimate<T> {
    fn density(&self, x: T) -> T;
}

fn sort_values<T: HullScalar>(x: &[T]) -> Vec<T> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Least concave majorant of the empirical CDF and its slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct GrenanderFit<T> {
    pub sorted_x: Vec<T>,
    pub lcm_knots: KnotCurve<T>,
    /// One value per LCM segment, strictly decreasing.
    pub slopes: Vec<T>,
}

/// Grenander estimator of a decreasing density on `(0, 1)`.
pub fn grenander<T: HullScalar>(x: &[T]) -> Result<GrenanderFit<T>> {
    if x.is_empty() {
        return Err(Error::Empty("sample"));
    }
    if let Some(bad) = x.iter().find(|v| !(**v > T::zero() && **v < T::one())) {
        return Err(Error::OutsideSupport(bad.approx_f64()));
    }
    let sorted_x = sort_values(x);
    let n = T::from_count(sorted_x.len());
    // concave majorant = -(convex minorant of the negated ECDF points)
    let mut pts = Vec::with_capacity(sorted_x.len() + 1);
    pts.push((T::zero(), T::zero()));
    for (i, xi) in sorted_x.iter().enumerate() {
        pts.push((*xi, T::zero() - T::from_count(i + 1) / n));
    }
    let minorant = gcm_of_points(&pts)?;
    let knots: Vec<(T, T)> = minorant.knots().iter().map(|(s, t)| (*s, T::zero() - *t)).collect();
    let lcm_knots = KnotCurve::from_knots(knots)?;
    let slopes = lcm_knots.slopes();
    Ok(GrenanderFit {
        sorted_x,
        lcm_knots,
        slopes,
    })
}

impl<T: HullScalar> GrenanderFit<T> {
    /// Density at `t`: slope of the segment `(s_k, s_{k+1}]` containing `t`;
    /// zero outside `(0, max x]`.
    pub fn eval(&self, t: T) -> T {
        let knots = self.lcm_knots.knots();
        if !(t > T::zero()) || t > self.lcm_knots.last_s() {
            return T::zero();
        }
        let j = knots.partition_point(|k| k.0 < t);
        self.slopes[j.max(1) - 1]
    }

    /// Density at each order statistic.
    pub fn at_order_statistics(&self) -> Vec<T> {
        self.sorted_x.iter().map(|x| self.eval(*x)).collect()
    }

    /// Integral of the step density over `(0, max x]`.
    pub fn total_mass(&self) -> T {
        self.lcm_knots
            .knots()
            .windows(2)
            .zip(&self.slopes)
            .fold(T::zero(), |acc, (w, s)| acc + *s * (w[1].0 - w[0].0))
    }
}

impl<T: HullScalar> DensityEstimate<T> for GrenanderFit<T> {
    fn density(&self, x: T) -> T {
        self.eval(x)
    }
}

/// Quartic (biweight) kernel `15/16 (1 - u^2)^2` on `|u| <= 1`.
pub fn quartic_kernel<T: Real>(u: T) -> T {
    if u.abs() > T::one() {
        return T::zero();
    }
    let v = T::one() - u * u;
    T::lit(15.0 / 16.0) * v * v
}

#[derive(Debug, Clone, PartialEq)]
pub struct KdeFit<T> {
    sorted: Vec<T>,
    pub bandwidth: T,
}

/// Quantile with linear interpolation between order statistics.
fn quantile_sorted<T: Real>(sorted: &[T], q: T) -> T {
    let pos = q * T::from_count(sorted.len() - 1);
    let lo = pos.floor();
    let i = lo.to_usize().unwrap_or(0).min(sorted.len() - 1);
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (sorted[j] - sorted[i]) * (pos - lo)
}

/// Rule-of-thumb bandwidth for the quartic kernel:
/// `2.778 * min(sd, IQR/1.349) * n^(-1/5)`.
pub fn silverman_bandwidth<T: Real>(x: &[T]) -> Result<T> {
    if x.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: x.len(),
        });
    }
    let n = T::from_count(x.len());
    let mean = x.iter().fold(T::zero(), |a, v| a + *v) / n;
    let var = x.iter().fold(T::zero(), |a, v| a + (*v - mean) * (*v - mean)) / (n - T::one());
    let sd = var.sqrt();
    let sorted = sort_values(x);
    let iqr = quantile_sorted(&sorted, T::lit(0.75)) - quantile_sorted(&sorted, T::lit(0.25));
    let spread = if iqr > T::zero() {
        sd.min(iqr / T::lit(1.349))
    } else {
        sd
    };
    if !(spread > T::zero()) {
        return Err(Error::param("bandwidth", "sample has zero spread"));
    }
    Ok(T::lit(2.778) * spread * n.powf(T::lit(-0.2)))
}

/// Quartic-kernel density estimate; the bandwidth defaults to
/// [`silverman_bandwidth`].
pub fn kde<T: Real>(x: &[T], bandwidth: Option<T>) -> Result<KdeFit<T>> {
    let bandwidth = match bandwidth {
        Some(h) if h > T::zero() && h.is_finite() => h,
        Some(h) => return Err(Error::param("bandwidth", format!("{h} is not positive"))),
        None => silverman_bandwidth(x)?,
    };
    if x.is_empty() {
        return Err(Error::Empty("sample"));
    }
    Ok(KdeFit {
        sorted: sort_values(x),
        bandwidth,
    })
}

impl<T: Real> KdeFit<T> {
    pub fn eval(&self, t: T) -> T {
        let h = self.bandwidth;
        let lo = self.sorted.partition_point(|v| *v < t - h);
        let hi = self.sorted.partition_point(|v| *v <= t + h);
        let sum = self.sorted[lo..hi]
            .iter()
            .fold(T::zero(), |acc, xi| acc + quartic_kernel((t - *xi) / h));
        sum / (T::from_count(self.sorted.len()) * h)
    }
}

impl<T: Real> DensityEstimate<T> for KdeFit<T> {
    fn density(&self, x: T) -> T {
        self.eval(x)
    }
}

/// True marginal density of a model, for oracle-density runs.
#[derive(Debug, Clone)]
pub struct OracleDensity<'a, T>(pub &'a MixtureModel<T>);

impl<T: Real> DensityEstimate<T> for OracleDensity<'_, T> {
    fn density(&self, x: T) -> T {
        self.0.density(Component::Marginal, x).unwrap_or(T::zero())
    }
}

/// Known null density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullDensity {
    /// `Unif(0,1)`
    Uniform,
    /// `N(0,1)`
    StandardNormal,
}

impl NullDensity {
    pub fn eval<T: Real>(self, x: T) -> T {
        match self {
            NullDensity::Uniform => {
                if x > T::zero() && x < T::one() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            NullDensity::StandardNormal => std_normal_pdf(x),
        }
    }

    pub fn of_model<T: Real>(model: &MixtureModel<T>) -> Self {
        if model.has_uniform_null() {
            NullDensity::Uniform
        } else {
            NullDensity::StandardNormal
        }
    }
}

/// Estimated Lfdr values aligned with the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LfdrHatVector<T> {
    pub w_hat: Vec<T>,
}

/// `min(pi0 f0(x_i) / fhat(x_i), 1)`, and 1 where `fhat` vanishes.
pub fn lfdr_hat<T: Real>(
    pi0: T,
    null: NullDensity,
    fhat: &impl DensityEstimate<T>,
    x: &[T],
) -> LfdrHatVector<T> {
    let w_hat = x
        .iter()
        .map(|xi| {
            let f = fhat.density(*xi);
            if f > T::zero() {
                (pi0 * null.eval(*xi) / f).min(T::one())
            } else {
                T::one()
            }
        })
        .collect();
    LfdrHatVector { w_hat }
}

/// Knot points of the estimated `b*` and their convex minorant.
pub type KnotsAndHull<T> = (Vec<(T, T)>, KnotCurve<T>);

/// Sorted estimated Lfdr values with prefix sums for `A_hat`, `B_hat` and `y*_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLfdr<T> {
    sorted: Vec<T>,
    /// `prefix_w[k]`: sum of the `k` smallest values
    prefix_w: Vec<T>,
    /// `suffix_u[k]`: sum of `1 - w` over sorted positions `k..n`
    suffix_u: Vec<T>,
    /// `(y, A_hat(y), B_hat(y))` for `y` in `{0} ∪ {distinct values}`
    candidates: Vec<(T, T, T)>,
}

impl<T: Real> EmpiricalLfdr<T> {
    pub fn new(w_hat: &LfdrHatVector<T>) -> Self {
        let sorted = sort_values(&w_hat.w_hat);
        let n = sorted.len();
        let mut prefix_w = Vec::with_capacity(n + 1);
        prefix_w.push(T::zero());
        for w in &sorted {
            let last = prefix_w[prefix_w.len() - 1];
            prefix_w.push(last + *w);
        }
        let mut suffix_u = vec![T::zero(); n + 1];
        for k in (0..n).rev() {
            suffix_u[k] = suffix_u[k + 1] + (T::one() - sorted[k]);
        }
        let mut out = Self {
            sorted,
            prefix_w,
            suffix_u,
            candidates: Vec::new(),
        };
        let mut ys = vec![T::zero()];
        for w in &out.sorted {
            if *w > ys[ys.len() - 1] {
                ys.push(*w);
            }
        }
        out.candidates = ys
            .into_iter()
            .map(|y| {
                let c = out.count_at_most(y);
                (y, out.a_from_count(c), out.b_from_count(c))
            })
            .collect();
        out
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    fn count_at_most(&self, y: T) -> usize {
        self.sorted.partition_point(|w| *w <= y)
    }

    fn a_from_count(&self, c: usize) -> T {
        self.prefix_w[c] / T::from_count(c.max(1))
    }

    fn b_from_count(&self, c: usize) -> T {
        self.suffix_u[c] / T::from_count((self.sorted.len() - c).max(1))
    }

    /// `A_hat(y)`: mean of values `<= y` (0 when none).
    pub fn a_hat(&self, y: T) -> T {
        self.a_from_count(self.count_at_most(y))
    }

    /// `B_hat(y)`: mean of `1 - w` over values `> y` (0 when none).
    pub fn b_hat(&self, y: T) -> T {
        self.b_from_count(self.count_at_most(y))
    }

    /// Largest candidate `y` in `{0, w_1, ..., w_n}` with `A_hat(y) <= alpha`.
    pub fn y_star(&self, alpha: T) -> T {
        self.candidates
            .iter()
            .rev()
            .find(|c| c.1 <= alpha)
            .map_or(T::zero(), |c| c.0)
    }

    /// Knot points `(A_hat(y), B_hat(y))` over the candidates, then `(1, 0)`.
    pub fn knot_points(&self) -> Vec<(T, T)> {
        let mut pts: Vec<(T, T)> = self.candidates.iter().map(|c| (c.1, c.2)).collect();
        pts.push((T::one(), T::zero()));
        pts
    }

    /// Knot points and the greatest convex minorant of the estimated `b*`.
    pub fn b_star_knots(&self) -> Result<KnotsAndHull<T>> {
        let pts = self.knot_points();
        let gcm = gcm_of_points(&pts)?;
        Ok((pts, gcm))
    }

    /// Estimated `b*(alpha) = B_hat(y*_hat(alpha))`.
    pub fn b_star(&self, alpha: T) -> T {
        self.candidates
            .iter()
            .rev()
            .find(|c| c.1 <= alpha)
            .map_or(T::zero(), |c| c.2)
    }
}

/// `A_hat(y)` for a vector of estimated Lfdr values.
pub fn a_hat<T: Real>(w: &LfdrHatVector<T>, y: T) -> T {
    EmpiricalLfdr::new(w).a_hat(y)
}

/// `B_hat(y)` for a vector of estimated Lfdr values.
pub fn b_hat<T: Real>(w: &LfdrHatVector<T>, y: T) -> T {
    EmpiricalLfdr::new(w).b_hat(y)
}

/// `y*_hat(alpha)`.
pub fn y_star_hat<T: Real>(w: &LfdrHatVector<T>, alpha: T) -> T {
    EmpiricalLfdr::new(w).y_star(alpha)
}

/// Knot points of the estimated `b*` and their convex minorant.
pub fn b_star_hat_knots<T: Real>(w: &LfdrHatVector<T>) -> Result<KnotsAndHull<T>> {
    EmpiricalLfdr::new(w).b_star_knots()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle_curves::{fnr_star_curve, uniform_grid, LfdrLaw};
    use num_rational::Rational64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(v: &[f64]) -> LfdrHatVector<f64> {
        LfdrHatVector { w_hat: v.to_vec() }
    }

    /// Weighted antitonic regression by pool-adjacent-violators.
    fn pava_decreasing(values: &[Rational64], weights: &[Rational64]) -> Vec<Rational64> {
        let mut blocks: Vec<(Rational64, Rational64, usize)> = Vec::new();
        for (v, wt) in values.iter().zip(weights) {
            blocks.push((*v * *wt, *wt, 1));
            while blocks.len() >= 2 {
                let (s2, w2, c2) = blocks[blocks.len() - 1];
                let (s1, w1, c1) = blocks[blocks.len() - 2];
                if s1 / w1 >= s2 / w2 {
                    break;
                }
                blocks.truncate(blocks.len() - 2);
                blocks.push((s1 + s2, w1 + w2, c1 + c2));
            }
        }
        blocks
            .into_iter()
            .flat_map(|(s, wt, c)| std::iter::repeat_n(s / wt, c))
            .collect()
    }

    #[test]
    fn grenander_three_points() {
        let fit = grenander(&[0.9f64, 0.2, 0.4]).unwrap();
        let d = fit.at_order_statistics();
        assert!((d[0] - 5.0 / 3.0).abs() < 1e-12);
        assert!((d[1] - 5.0 / 3.0).abs() < 1e-12);
        assert!((d[2] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(fit.slopes.len(), 2);
        assert!((fit.total_mass() - 1.0).abs() < 1e-15);
        assert_eq!(fit.eval(0.95), 0.0);
        assert!((fit.eval(0.1) - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn grenander_single_point_and_errors() {
        let fit = grenander(&[0.5f64]).unwrap();
        assert_eq!(fit.slopes, vec![2.0]);
        assert_eq!(fit.eval(0.5), 2.0);
        assert!(grenander::<f64>(&[]).is_err());
        assert_eq!(grenander(&[0.5, 1.0]).unwrap_err(), Error::OutsideSupport(1.0));
        assert!(grenander(&[0.0, 0.3]).is_err());
    }

    #[test]
    fn grenander_handles_ties_exactly() {
        let r = |n, d| Rational64::new(n, d);
        let fit = grenander(&[r(1, 4), r(1, 4), r(1, 2), r(3, 4)]).unwrap();
        assert_eq!(fit.total_mass(), r(1, 1));
        assert_eq!(fit.eval(r(1, 4)), r(2, 1));
        assert_eq!(fit.eval(r(1, 2)), r(1, 1));
        assert_eq!(fit.slopes, vec![r(2, 1), r(1, 1)]);
    }

    proptest! {
        #[test]
        fn grenander_matches_pava(raw in prop::collection::vec(1i64..1000, 1..30)) {
            let x: Vec<Rational64> = raw.iter().map(|k| Rational64::new(*k, 1000)).collect();
            let fit = grenander(&x).unwrap();
            let mut distinct = x.clone();
            distinct.sort();
            let n = Rational64::from_integer(x.len() as i64);
            let mut values = Vec::new();
            let mut widths = Vec::new();
            let mut prev = Rational64::from_integer(0);
            let mut groups = Vec::new();
            for v in &distinct {
                if groups.last().map(|(g, _): &(Rational64, i64)| g == v).unwrap_or(false) {
                    groups.last_mut().unwrap().1 += 1;
                } else {
                    groups.push((*v, 1));
                }
            }
            for (v, c) in &groups {
                let width = *v - prev;
                values.push(Rational64::from_integer(*c) / n / width);
                widths.push(width);
                prev = *v;
            }
            let pooled = pava_decreasing(&values, &widths);
            for ((v, _), p) in groups.iter().zip(pooled) {
                prop_assert_eq!(fit.eval(*v), p);
            }
            prop_assert_eq!(fit.total_mass(), Rational64::from_integer(1));
            prop_assert!(fit.slopes.windows(2).all(|s| s[0] > s[1]));
        }
    }

    #[test]
    fn kde_examples() {
        let fit = kde(&[0.3f64], Some(1.0)).unwrap();
        assert!((fit.eval(0.3) - 15.0 / 16.0).abs() < 1e-15);
        assert_eq!(fit.eval(1.31), 0.0);
        let fit = kde(&[-1.0f64, 1.0], Some(0.8)).unwrap();
        for t in [0.1, 0.35, 0.7] {
            assert!((fit.eval(t) - fit.eval(-t)).abs() < 1e-15);
        }
        assert!(kde(&[0.1, 0.2], Some(0.0)).is_err());
        assert!(kde(&[0.1, 0.2], Some(-1.0)).is_err());
        assert!(kde(&[0.1], None).is_err());
        assert!(kde(&[0.5, 0.5, 0.5], None).is_err());
    }

    #[test]
    fn kde_integrates_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = MixtureModel::gaussian(0.75, 1.0).unwrap();
        let s = m.sample(300, &mut rng);
        let fit = kde(&s.x, None).unwrap();
        assert!(fit.bandwidth > 0.0);
        let (lo, hi) = (-8.0, 9.0);
        let steps = 40_000;
        let h = (hi - lo) / steps as f64;
        let total: f64 = (0..steps).map(|i| fit.eval(lo + (i as f64 + 0.5) * h) * h).sum();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn silverman_constant() {
        let x: Vec<f64> = (0..100).map(|i| i as f64 / 10.0).collect();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let iqr = 7.425 - 2.475;
        let expected = 2.778 * sd.min(iqr / 1.349) * n.powf(-0.2);
        assert!((silverman_bandwidth(&x).unwrap() - expected).abs() < 1e-12);
    }

    struct Const(f64);
    impl DensityEstimate<f64> for Const {
        fn density(&self, _: f64) -> f64 {
            self.0
        }
    }

    #[test]
    fn lfdr_hat_ratio_and_clip() {
        let v = lfdr_hat(0.75, NullDensity::Uniform, &Const(1.5), &[0.2]);
        assert!((v.w_hat[0] - 0.5).abs() < 1e-15);
        let v = lfdr_hat(0.75, NullDensity::Uniform, &Const(0.5), &[0.2]);
        assert_eq!(v.w_hat[0], 1.0);
        let v = lfdr_hat(0.75, NullDensity::Uniform, &Const(0.0), &[0.2]);
        assert_eq!(v.w_hat[0], 1.0);
    }

    #[test]
    fn lfdr_hat_with_true_density_is_exact() {
        let m = MixtureModel::gaussian(0.75, 1.0).unwrap();
        let xs = [-1.0f64, 0.0, 0.5, 2.5];
        let v = lfdr_hat(0.75, NullDensity::of_model(&m), &OracleDensity(&m), &xs);
        for (x, w) in xs.iter().zip(&v.w_hat) {
            assert!((m.lfdr(*x).unwrap() - w).abs() < 1e-14);
        }
    }

    #[test]
    fn a_b_hat_examples() {
        let v = w(&[0.1, 0.3, 0.8]);
        assert!((a_hat(&v, 0.3) - 0.2).abs() < 1e-15);
        assert!((b_hat(&v, 0.1) - 0.45).abs() < 1e-15);
        assert_eq!(a_hat(&v, 0.0), 0.0);
        assert_eq!(b_hat(&v, 1.0), 0.0);
    }

    #[test]
    fn y_star_examples() {
        let v = w(&[0.1, 0.3, 0.8]);
        assert_eq!(y_star_hat(&v, 0.25), 0.3);
        assert_eq!(y_star_hat(&v, 1.0), 0.8);
        assert_eq!(y_star_hat(&v, 0.0), 0.0);
    }

    #[test]
    fn knots_example() {
        let (pts, gcm) = b_star_hat_knots(&w(&[0.1, 0.3, 0.8])).unwrap();
        let expect = [(0.0, 0.6), (0.1, 0.45), (0.2, 0.2), (0.4, 0.0), (1.0, 0.0)];
        assert_eq!(pts.len(), expect.len());
        for (p, e) in pts.iter().zip(expect) {
            assert!((p.0 - e.0).abs() < 1e-15 && (p.1 - e.1).abs() < 1e-15);
        }
        let knots = gcm.knots();
        assert_eq!(knots.len(), 4);
        assert!((knots[1].0 - 0.2).abs() < 1e-15 && (knots[2].0 - 0.4).abs() < 1e-15);
    }

    #[test]
    fn equal_values_give_chord() {
        let (pts, gcm) = b_star_hat_knots(&w(&[0.5, 0.5, 0.5])).unwrap();
        assert_eq!(pts, vec![(0.0, 0.5), (0.5, 0.0), (1.0, 0.0)]);
        assert_eq!(gcm.knots(), &[(0.0, 0.5), (0.5, 0.0), (1.0, 0.0)]);
    }

    #[test]
    fn a_b_hat_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = MixtureModel::uniform_sqrt(0.75).unwrap();
        let s = m.sample(500, &mut rng);
        let fit = grenander(&s.x).unwrap();
        let v = lfdr_hat(0.75, NullDensity::Uniform, &fit, &s.x);
        let e = EmpiricalLfdr::new(&v);
        let mut ys = v.w_hat.clone();
        ys.push(0.0);
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let a: Vec<f64> = ys.iter().map(|y| e.a_hat(*y)).collect();
        let b: Vec<f64> = ys.iter().map(|y| e.b_hat(*y)).collect();
        assert!(a.windows(2).all(|p| p[0] <= p[1] + 1e-15));
        assert!(b.windows(2).all(|p| p[0] + 1e-15 >= p[1]));
    }

    fn sup_gaps(n: usize, seed: u64) -> (f64, f64, f64) {
        let m = MixtureModel::uniform_sqrt(0.75).unwrap();
        let law = LfdrLaw::from_model(&m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = m.sample(n, &mut rng);
        let fit = grenander(&s.x).unwrap();
        let e = EmpiricalLfdr::new(&lfdr_hat(0.75, NullDensity::Uniform, &fit, &s.x));
        let grid: Vec<f64> = uniform_grid(201);
        let (mut ga, mut gb, mut gs) = (0.0f64, 0.0f64, 0.0f64);
        for y in &grid[1..grid.len() - 1] {
            let (a, b) = law.conditional_means(*y);
            ga = ga.max((e.a_hat(*y) - a).abs());
            gb = gb.max((e.b_hat(*y) - b).abs());
        }
        for alpha in &grid {
            gs = gs.max((e.b_star(*alpha) - law.mfnr_star(*alpha)).abs());
        }
        (ga, gb, gs)
    }

    #[test]
    fn estimated_curves_improve_with_n() {
        let reps = 5;
        let mean = |n: usize| {
            let mut acc = (0.0, 0.0, 0.0);
            for r in 0..reps {
                let g = sup_gaps(n, 100 + r);
                acc = (acc.0 + g.0, acc.1 + g.1, acc.2 + g.2);
            }
            acc
        };
        let small = mean(1_000);
        let large = mean(10_000);
        assert!(large.0 < small.0, "{small:?} {large:?}");
        assert!(large.1 < small.1, "{small:?} {large:?}");
        assert!(large.2 < small.2, "{small:?} {large:?}");
    }

    #[test]
    fn oracle_density_minorant_approaches_fnr_star() {
        let m = MixtureModel::uniform_step(0.75, 0.5).unwrap();
        let law = LfdrLaw::from_model(&m).unwrap();
        let curve = fnr_star_curve(&law, &uniform_grid(601)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = m.sample(100_000, &mut rng);
        let v = lfdr_hat(0.75, NullDensity::Uniform, &OracleDensity(&m), &s.x);
        let e = EmpiricalLfdr::new(&v);
        let (_, gcm) = e.b_star_knots().unwrap();
        let grid: Vec<f64> = uniform_grid(201);
        let mut gap = 0.0f64;
        let mut star_gap = 0.0f64;
        for a in &grid {
            gap = gap.max((gcm.eval(*a).unwrap() - curve.fnr_at(*a).unwrap()).abs());
            star_gap = star_gap.max((e.b_star(*a) - law.mfnr_star(*a)).abs());
        }
        assert!(gap < 0.02, "{gap}");
        // the minorant is a contraction in sup norm
        let m2 = MixtureModel::uniform_sqrt(0.75).unwrap();
        let law2 = LfdrLaw::from_model(&m2).unwrap();
        let curve2 = fnr_star_curve(&law2, &uniform_grid(601)).unwrap();
        let s2 = m2.sample(20_000, &mut rng);
        let e2 = EmpiricalLfdr::new(&lfdr_hat(0.75, NullDensity::Uniform, &grenander(&s2.x).unwrap(), &s2.x));
        let (_, gcm2) = e2.b_star_knots().unwrap();
        let (mut hull_gap, mut raw_gap) = (0.0f64, 0.0f64);
        for a in e2.knot_points().iter().map(|p| p.0).chain(grid.iter().copied()) {
            hull_gap = hull_gap.max((gcm2.eval(a).unwrap() - curve2.fnr_at(a).unwrap()).abs());
            raw_gap = raw_gap.max((e2.b_star(a) - law2.mfnr_star(a)).abs());
        }
        assert!(hull_gap <= raw_gap + 1e-9, "{hull_gap} > {raw_gap}");
        let _ = star_gap;
    }
}
