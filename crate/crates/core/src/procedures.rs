//! The six decision rules: Neyman-Pearson oracle, randomized oracle, trivial
//! randomization, oracle BH, the adaptive Lfdr procedure and the data-driven
//! randomized procedure.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::{grenander, kde, lfdr_hat, EmpiricalLfdr, LfdrHatVector, NullDensity, OracleDensity};
use crate::model::MixtureModel;
use crate::oracle_curves::{default_grid, fnr_star_curve, LfdrLaw, NpRule, NpThreshold, Split};
use crate::scalar::{std_normal_sf, Real};

/// Which side of a dataset-level coin was taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The smaller level (`alpha1`, or `s_k` for the data-driven rule).
    Lower,
    /// The larger level.
    Upper,
}

/// Record of the randomness a rule used on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomizationTrace<T> {
    /// Branch of the dataset-level coin, if the rule has one.
    pub branch: Option<Branch>,
    /// Probability of the lower branch.
    pub branch_prob: T,
    /// The two levels being mixed.
    pub levels: Option<(T, T)>,
    /// Lfdr thresholds of the two branches (data-driven rule).
    pub thresholds: Option<(T, T)>,
    /// Knots of the estimated `b*` minorant (data-driven rule).
    pub knots: Vec<(T, T)>,
    /// Number of per-hypothesis tie-break coins.
    pub tie_draws: usize,
}

impl<T: Real> RandomizationTrace<T> {
    fn coin(branch: Option<Branch>, branch_prob: T) -> Self {
        Self {
            branch,
            branch_prob,
            levels: None,
            thresholds: None,
            knots: Vec::new(),
            tie_draws: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector<T> {
    pub reject: Vec<bool>,
    /// Present iff the rule randomizes.
    pub trace: Option<RandomizationTrace<T>>,
}

impl<T> DecisionVector<T> {
    pub fn len(&self) -> usize {
        self.reject.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reject.is_empty()
    }

    pub fn rejections(&self) -> usize {
        self.reject.iter().filter(|r| **r).count()
    }
}

/// Density estimate plugged into the estimated Lfdr.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityEstimator<T> {
    /// Grenander estimator; needs a uniform null on `(0,1)`.
    Grenander,
    /// Quartic kernel, rule-of-thumb bandwidth unless given.
    Kde { bandwidth: Option<T> },
    /// The generating marginal density.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProcedureKind<T> {
    NpOracle,
    OracleRandomized,
    Trivial,
    BhOracle,
    SunCai { estimator: DensityEstimator<T> },
    DataDriven { estimator: DensityEstimator<T> },
}

impl<T> ProcedureKind<T> {
    /// True for rules that need the generating model.
    pub fn needs_model(&self) -> bool {
        matches!(
            self,
            ProcedureKind::NpOracle
                | ProcedureKind::OracleRandomized
                | ProcedureKind::SunCai {
                    estimator: DensityEstimator::Oracle
                }
                | ProcedureKind::DataDriven {
                    estimator: DensityEstimator::Oracle
                }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcedureSpec<T> {
    pub kind: ProcedureKind<T>,
    pub alpha: T,
}

/// What a rule may know about the data-generating process.
#[derive(Debug, Clone)]
pub struct Setting<T> {
    pub pi0: T,
    pub null: NullDensity,
    pub model: Option<MixtureModel<T>>,
}

impl<T: Real> Setting<T> {
    pub fn from_model(model: &MixtureModel<T>) -> Self {
        Self {
            pi0: model.pi0(),
            null: NullDensity::of_model(model),
            model: Some(model.clone()),
        }
    }
}

#[derive(Debug, Clone)]
enum Rule<T> {
    Np {
        model: MixtureModel<T>,
        rule: NpRule<T>,
    },
    Oracle {
        model: MixtureModel<T>,
        split: Split<T>,
        lower: NpRule<T>,
        upper: NpRule<T>,
    },
    Trivial,
    Bh,
    SunCai(DensityEstimator<T>),
    DataDriven(DensityEstimator<T>),
}

/// A rule with its level-dependent oracle quantities computed once, ready to
/// be applied to many datasets.
#[derive(Debug, Clone)]
pub struct PreparedProcedure<T> {
    alpha: T,
    setting: Setting<T>,
    rule: Rule<T>,
}

impl<T: Real> ProcedureSpec<T> {
    pub fn prepare(&self, setting: &Setting<T>) -> Result<PreparedProcedure<T>> {
        let alpha = self.alpha;
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return Err(Error::param("alpha", format!("{alpha} is not in [0,1]")));
        }
        let model = || {
            setting
                .model
                .clone()
                .ok_or_else(|| Error::param("model", "this procedure needs the generating model"))
        };
        let rule = match self.kind {
            ProcedureKind::NpOracle => {
                let model = model()?;
                let law = LfdrLaw::from_model(&model)?;
                Rule::Np {
                    rule: law.np_rule(alpha),
                    model,
                }
            }
            ProcedureKind::OracleRandomized => {
                let model = model()?;
                let law = LfdrLaw::from_model(&model)?;
                let split = fnr_star_curve(&law, &default_grid())?.split(&law, alpha)?;
                Rule::Oracle {
                    lower: law.np_rule(split.alpha1),
                    upper: law.np_rule(split.alpha2),
                    split,
                    model,
                }
            }
            ProcedureKind::Trivial => {
                if alpha > setting.pi0 {
                    return Err(Error::param("alpha", format!("{alpha} exceeds pi0 = {}", setting.pi0)));
                }
                Rule::Trivial
            }
            ProcedureKind::BhOracle => Rule::Bh,
            ProcedureKind::SunCai { estimator } => {
                if estimator == DensityEstimator::Oracle {
                    model()?;
                }
                Rule::SunCai(estimator)
            }
            ProcedureKind::DataDriven { estimator } => {
                if !(alpha > T::zero() && alpha < T::one()) {
                    return Err(Error::param("alpha", format!("{alpha} is not in (0,1)")));
                }
                if estimator == DensityEstimator::Oracle {
                    model()?;
                }
                Rule::DataDriven(estimator)
            }
        };
        Ok(PreparedProcedure {
            alpha,
            setting: setting.clone(),
            rule,
        })
    }
}

impl<T: Real> PreparedProcedure<T> {
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Oracle randomization split, for the randomized oracle.
    pub fn split(&self) -> Option<Split<T>> {
        match &self.rule {
            Rule::Oracle { split, .. } => Some(*split),
            _ => None,
        }
    }

    /// Estimated Lfdr values used by the rule, if it uses any.
    pub fn w_hat(&self, x: &[T]) -> Result<Option<LfdrHatVector<T>>> {
        match &self.rule {
            Rule::SunCai(est) | Rule::DataDriven(est) => {
                estimate_lfdr(x, self.setting.pi0, self.setting.null, *est, self.setting.model.as_ref())
                    .map(Some)
            }
            _ => Ok(None),
        }
    }

    pub fn apply<R: Rng + ?Sized>(&self, x: &[T], rng: &mut R) -> Result<DecisionVector<T>> {
        let s = &self.setting;
        match &self.rule {
            Rule::Np { model, rule } => apply_np(model, rule, x, rng),
            Rule::Oracle {
                model,
                split,
                lower,
                upper,
            } => apply_oracle(model, split, lower, upper, x, rng),
            Rule::Trivial => trivial_randomized(self.alpha, s.pi0, x.len(), rng),
            Rule::Bh => Ok(bh_oracle(&p_values(s.null, x), self.alpha, s.pi0)),
            Rule::SunCai(est) => {
                let w = estimate_lfdr(x, s.pi0, s.null, *est, s.model.as_ref())?;
                Ok(sun_cai(&w, self.alpha))
            }
            Rule::DataDriven(est) => {
                let w = estimate_lfdr(x, s.pi0, s.null, *est, s.model.as_ref())?;
                data_driven_from_w(&w, self.alpha, rng)
            }
        }
    }
}

fn true_lfdr<T: Real>(model: &MixtureModel<T>, x: &[T]) -> Result<Vec<T>> {
    x.iter().map(|xi| model.lfdr(*xi)).collect()
}

fn np_decisions<T: Real, R: Rng + ?Sized>(rule: &NpRule<T>, w: &[T], rng: &mut R, tie_draws: &mut usize) -> Vec<bool> {
    w.iter().map(|wi| rule.decide(*wi, rng, tie_draws)).collect()
}

fn randomizes_ties<T: Real>(rule: &NpRule<T>) -> bool {
    matches!(rule.threshold, NpThreshold::Cutoff { tie_prob, .. } if tie_prob > T::zero() && tie_prob < T::one())
}

fn apply_np<T: Real, R: Rng + ?Sized>(
    model: &MixtureModel<T>,
    rule: &NpRule<T>,
    x: &[T],
    rng: &mut R,
) -> Result<DecisionVector<T>> {
    let w = true_lfdr(model, x)?;
    let mut tie_draws = 0;
    let reject = np_decisions(rule, &w, rng, &mut tie_draws);
    let trace = randomizes_ties(rule).then(|| RandomizationTrace {
        tie_draws,
        ..RandomizationTrace::coin(None, T::one())
    });
    Ok(DecisionVector { reject, trace })
}

/// Draws the dataset-level coin: lower branch with probability `p`.
fn draw_branch<T: Real, R: Rng + ?Sized>(p: T, rng: &mut R) -> Branch {
    if p >= T::one() {
        Branch::Lower
    } else if p <= T::zero() {
        Branch::Upper
    } else if rng.random::<f64>() < p.as_f64() {
        Branch::Lower
    } else {
        Branch::Upper
    }
}

fn apply_oracle<T: Real, R: Rng + ?Sized>(
    model: &MixtureModel<T>,
    split: &Split<T>,
    lower: &NpRule<T>,
    upper: &NpRule<T>,
    x: &[T],
    rng: &mut R,
) -> Result<DecisionVector<T>> {
    let w = true_lfdr(model, x)?;
    let branch = draw_branch(split.p, rng);
    let rule = match branch {
        Branch::Lower => lower,
        Branch::Upper => upper,
    };
    let mut tie_draws = 0;
    let reject = np_decisions(rule, &w, rng, &mut tie_draws);
    let trace = RandomizationTrace {
        levels: Some((split.alpha1, split.alpha2)),
        tie_draws,
        ..RandomizationTrace::coin(Some(branch), split.p)
    };
    Ok(DecisionVector {
        reject,
        trace: Some(trace),
    })
}

/// Neyman-Pearson oracle: threshold the true Lfdr at `G^{-1}(u*(alpha))`,
/// breaking ties on atoms independently per hypothesis.
pub fn np_oracle<T: Real, R: Rng + ?Sized>(
    law: &LfdrLaw<T>,
    alpha: T,
    x: &[T],
    rng: &mut R,
) -> Result<DecisionVector<T>> {
    apply_np(law.model(), &law.np_rule(alpha), x, rng)
}

/// Randomized oracle with a precomputed split: one dataset-level coin picks
/// `np_oracle(alpha1)` with probability `p`, else `np_oracle(alpha2)`.
pub fn oracle_randomized_with_split<T: Real, R: Rng + ?Sized>(
    law: &LfdrLaw<T>,
    split: &Split<T>,
    x: &[T],
    rng: &mut R,
) -> Result<DecisionVector<T>> {
    let lower = law.np_rule(split.alpha1);
    let upper = law.np_rule(split.alpha2);
    apply_oracle(law.model(), split, &lower, &upper, x, rng)
}

/// Randomized oracle at `alpha`, computing the split on the default grid.
pub fn oracle_randomized<T: Real, R: Rng + ?Sized>(
    law: &LfdrLaw<T>,
    alpha: T,
    x: &[T],
    rng: &mut R,
) -> Result<DecisionVector<T>> {
    let split = fnr_star_curve(law, &default_grid())?.split(law, alpha)?;
    oracle_randomized_with_split(law, &split, x, rng)
}

/// Rejects everything with probability `alpha / pi0`, otherwise nothing.
pub fn trivial_randomized<T: Real, R: Rng + ?Sized>(
    alpha: T,
    pi0: T,
    n: usize,
    rng: &mut R,
) -> Result<DecisionVector<T>> {
    if !(alpha >= T::zero()) || alpha > pi0 {
        return Err(Error::param("alpha", format!("{alpha} is not in [0, pi0 = {pi0}]")));
    }
    let p = alpha / pi0;
    // Upper branch = reject all, taken with probability alpha / pi0.
    let branch = draw_branch(T::one() - p, rng);
    let all = branch == Branch::Upper;
    Ok(DecisionVector {
        reject: vec![all; n],
        trace: Some(RandomizationTrace {
            levels: Some((T::zero(), pi0)),
            ..RandomizationTrace::coin(Some(branch), T::one() - p)
        }),
    })
}

/// p-values for the null: the observations themselves for a uniform null,
/// upper-tail normal probabilities otherwise.
pub fn p_values<T: Real>(null: NullDensity, x: &[T]) -> Vec<T> {
    match null {
        NullDensity::Uniform => x.to_vec(),
        NullDensity::StandardNormal => x.iter().map(|v| std_normal_sf(*v)).collect(),
    }
}

/// Sorted order, ties broken by index.
fn stable_order<T: Real>(v: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|a, b| v[*a].partial_cmp(&v[*b]).unwrap_or(Ordering::Equal));
    idx
}

/// Benjamini-Hochberg step-up with known `pi0`:
/// `i* = max{i : p_(i) <= i alpha / (n pi0)}`, reject all `p <= p_(i*)`.
pub fn bh_oracle<T: Real>(p: &[T], alpha: T, pi0: T) -> DecisionVector<T> {
    let n = p.len();
    let order = stable_order(p);
    let scale = alpha / (T::from_count(n) * pi0);
    let i_star = (1..=n)
        .rev()
        .find(|i| p[order[i - 1]] <= T::from_count(*i) * scale)
        .unwrap_or(0);
    let mut reject = vec![false; n];
    if i_star > 0 {
        let cut = p[order[i_star - 1]];
        for (r, pi) in reject.iter_mut().zip(p) {
            *r = *pi <= cut;
        }
    }
    DecisionVector { reject, trace: None }
}

/// Adaptive Lfdr procedure: reject `W_hat_i <= y*_hat(alpha)`.
pub fn sun_cai<T: Real>(w_hat: &LfdrHatVector<T>, alpha: T) -> DecisionVector<T> {
    let y = EmpiricalLfdr::new(w_hat).y_star(alpha);
    DecisionVector {
        reject: w_hat.w_hat.iter().map(|w| *w <= y).collect(),
        trace: None,
    }
}

/// Estimated Lfdr values for `x` under the chosen density estimator.
pub fn estimate_lfdr<T: Real>(
    x: &[T],
    pi0: T,
    null: NullDensity,
    estimator: DensityEstimator<T>,
    model: Option<&MixtureModel<T>>,
) -> Result<LfdrHatVector<T>> {
    if x.is_empty() {
        return Ok(LfdrHatVector { w_hat: Vec::new() });
    }
    Ok(match estimator {
        DensityEstimator::Grenander => lfdr_hat(pi0, null, &grenander(x)?, x),
        DensityEstimator::Kde { bandwidth } => lfdr_hat(pi0, null, &kde(x, bandwidth)?, x),
        DensityEstimator::Oracle => {
            let model = model.ok_or_else(|| Error::param("model", "oracle density needs the model"))?;
            lfdr_hat(pi0, null, &OracleDensity(model), x)
        }
    })
}

/// Data-driven randomized procedure on precomputed estimated Lfdr values.
///
/// Brackets `alpha` between adjacent knots `s_k <= alpha < s_{k+1}` of the
/// minorant of the estimated `b*`, then with probability
/// `(s_{k+1} - alpha) / (s_{k+1} - s_k)` thresholds at `y*_hat(s_k)` and
/// otherwise at `y*_hat(s_{k+1})`, using one coin for the whole dataset.
pub fn data_driven_from_w<T: Real, R: Rng + ?Sized>(
    w_hat: &LfdrHatVector<T>,
    alpha: T,
    rng: &mut R,
) -> Result<DecisionVector<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0,1)")));
    }
    if w_hat.w_hat.is_empty() {
        return Ok(DecisionVector {
            reject: Vec::new(),
            trace: Some(RandomizationTrace::coin(None, T::one())),
        });
    }
    let e = EmpiricalLfdr::new(w_hat);
    let (_, gcm) = e.b_star_knots()?;
    let bracket = gcm.bracket(alpha)?;
    let knots = gcm.knots();
    let (s_lo, s_hi) = (knots[bracket.lo].0, knots[bracket.hi].0);
    let (y_lo, y_hi) = (e.y_star(s_lo), e.y_star(s_hi));
    let branch = draw_branch(bracket.weight, rng);
    let y = match branch {
        Branch::Lower => y_lo,
        Branch::Upper => y_hi,
    };
    Ok(DecisionVector {
        reject: w_hat.w_hat.iter().map(|w| *w <= y).collect(),
        trace: Some(RandomizationTrace {
            branch: Some(branch),
            branch_prob: bracket.weight,
            levels: Some((s_lo, s_hi)),
            thresholds: Some((y_lo, y_hi)),
            knots: knots.to_vec(),
            tie_draws: 0,
        }),
    })
}

/// Data-driven randomized procedure on raw observations.
pub fn data_driven<T: Real, R: Rng + ?Sized>(
    x: &[T],
    alpha: T,
    pi0: T,
    null: NullDensity,
    estimator: DensityEstimator<T>,
    model: Option<&MixtureModel<T>>,
    rng: &mut R,
) -> Result<DecisionVector<T>> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::param("alpha", format!("{alpha} is not in (0,1)")));
    }
    let w = estimate_lfdr(x, pi0, null, estimator, model)?;
    data_driven_from_w(&w, alpha, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn ustep() -> (MixtureModel<f64>, LfdrLaw<f64>) {
        let m = MixtureModel::uniform_step(0.75, 0.5).unwrap();
        let l = LfdrLaw::from_model(&m).unwrap();
        (m, l)
    }

    #[test]
    fn np_oracle_step_examples() {
        let (_, law) = ustep();
        let x = [0.1, 0.49, 0.51, 0.9, 0.3];
        let d = np_oracle(&law, 0.6, &x, &mut rng(1)).unwrap();
        assert_eq!(d.reject, vec![true, true, false, false, true]);
        assert!(d.trace.is_none());
        let d = np_oracle(&law, 0.3, &x, &mut rng(1)).unwrap();
        assert_eq!(d.rejections(), 0);
    }

    #[test]
    fn np_oracle_gaussian_is_upper_threshold() {
        let m = MixtureModel::gaussian(0.75, 2.0).unwrap();
        let law = LfdrLaw::from_model(&m).unwrap();
        let s = m.sample(2000, &mut rng(2));
        let d = np_oracle(&law, 0.2, &s.x, &mut rng(3)).unwrap();
        let max_acc = s.x.iter().zip(&d.reject).filter(|p| !p.1).map(|p| *p.0).fold(f64::MIN, f64::max);
        let min_rej = s.x.iter().zip(&d.reject).filter(|p| *p.1).map(|p| *p.0).fold(f64::MAX, f64::min);
        assert!(min_rej > max_acc);
    }

    #[test]
    fn oracle_randomized_step_branches() {
        let (_, law) = ustep();
        let x = [0.1, 0.6, 0.2, 0.7];
        let mut lower = 0;
        let mut r = rng(5);
        for _ in 0..2000 {
            let d = oracle_randomized(&law, 0.3, &x, &mut r).unwrap();
            let t = d.trace.unwrap();
            assert_eq!(t.levels, Some((0.0, 0.6)));
            assert!((t.branch_prob - 0.5).abs() < 1e-9);
            match t.branch.unwrap() {
                Branch::Lower => {
                    lower += 1;
                    assert_eq!(d.reject, vec![false; 4]);
                }
                Branch::Upper => assert_eq!(d.reject, vec![true, false, true, false]),
            }
        }
        assert!((lower as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn oracle_randomized_sqrt_all_or_nothing() {
        let m = MixtureModel::uniform_sqrt(0.75).unwrap();
        let law = LfdrLaw::from_model(&m).unwrap();
        let x = [0.01, 0.5, 0.99];
        let mut r = rng(6);
        for _ in 0..200 {
            let d = oracle_randomized(&law, 0.375, &x, &mut r).unwrap();
            let k = d.rejections();
            assert!(k == 0 || k == 3, "{k}");
            assert_eq!(k == 3, d.trace.unwrap().branch == Some(Branch::Upper));
        }
    }

    #[test]
    fn oracle_equals_np_on_the_curve() {
        let m = MixtureModel::gaussian(0.75, 2.0).unwrap();
        let law = LfdrLaw::from_model(&m).unwrap();
        let s = m.sample(500, &mut rng(7));
        let a = oracle_randomized(&law, 0.3, &s.x, &mut rng(8)).unwrap();
        let b = np_oracle(&law, 0.3, &s.x, &mut rng(8)).unwrap();
        assert_eq!(a.reject, b.reject);
        assert_eq!(a.trace.unwrap().branch, Some(Branch::Lower));
    }

    #[test]
    fn trivial_rule() {
        let mut r = rng(9);
        for _ in 0..50 {
            assert_eq!(trivial_randomized(0.0, 0.75, 5, &mut r).unwrap().rejections(), 0);
            assert_eq!(trivial_randomized(0.75, 0.75, 5, &mut r).unwrap().rejections(), 5);
        }
        assert!(trivial_randomized(0.8, 0.75, 5, &mut r).is_err());
        let all = (0..4000)
            .filter(|_| trivial_randomized(0.3, 0.75, 3, &mut r).unwrap().rejections() == 3)
            .count();
        assert!((all as f64 / 4000.0 - 0.4).abs() < 0.03);
    }

    #[test]
    fn bh_examples() {
        let d = bh_oracle(&[0.01, 0.2, 0.3, 0.9], 0.2, 0.75);
        assert_eq!(d.reject, vec![true, false, false, false]);
        let d = bh_oracle(&[0.9, 0.95], 0.2, 0.75);
        assert_eq!(d.rejections(), 0);
        let (n, alpha, pi0) = (5usize, 0.3, 0.75);
        let p: Vec<f64> = (1..=n).map(|i| i as f64 * alpha / (n as f64 * pi0)).collect();
        assert_eq!(bh_oracle(&p, alpha, pi0).rejections(), n);
        assert!(bh_oracle::<f64>(&[], 0.2, 0.75).is_empty());
    }

    #[test]
    fn bh_step_up_passes_over_gaps() {
        // p_(1) fails its own threshold but p_(2) passes, so both are rejected
        let d = bh_oracle(&[0.15, 0.2, 0.9], 0.3, 0.75);
        assert_eq!(d.reject, vec![true, true, false]);
    }

    fn w(v: &[f64]) -> LfdrHatVector<f64> {
        LfdrHatVector { w_hat: v.to_vec() }
    }

    #[test]
    fn sun_cai_examples() {
        assert_eq!(sun_cai(&w(&[0.1, 0.3, 0.8]), 0.25).reject, vec![true, true, false]);
        assert_eq!(sun_cai(&w(&[0.1, 0.3, 0.8]), 1.0).rejections(), 3);
        assert_eq!(sun_cai(&w(&[0.1, 0.3, 0.8]), 0.0).rejections(), 0);
    }

    #[test]
    fn data_driven_hand_trace() {
        let v = w(&[0.1, 0.3, 0.8]);
        let mut lower = 0;
        let mut r = rng(10);
        for _ in 0..2000 {
            let d = data_driven_from_w(&v, 0.3, &mut r).unwrap();
            let t = d.trace.unwrap();
            assert_eq!(t.knots.len(), 4);
            assert!((t.levels.unwrap().0 - 0.2).abs() < 1e-12);
            assert!((t.levels.unwrap().1 - 0.4).abs() < 1e-12);
            assert!((t.branch_prob - 0.5).abs() < 1e-12);
            assert_eq!(t.thresholds, Some((0.3, 0.8)));
            if t.branch == Some(Branch::Lower) {
                lower += 1;
                assert_eq!(d.reject, vec![true, true, false]);
            } else {
                assert_eq!(d.reject, vec![true, true, true]);
            }
        }
        assert!((lower as f64 / 2000.0 - 0.5).abs() < 0.05);
    }

    #[test]
    fn data_driven_at_knot_is_deterministic() {
        let v = w(&[0.1, 0.3, 0.8]);
        let knots = data_driven_from_w(&v, 0.3, &mut rng(0)).unwrap().trace.unwrap().knots;
        let s = knots[1].0;
        for seed in 0..20 {
            let d = data_driven_from_w(&v, s, &mut rng(seed)).unwrap();
            let t = d.trace.unwrap();
            assert_eq!(t.branch_prob, 1.0);
            assert_eq!(t.branch, Some(Branch::Lower));
            assert_eq!(d.reject, vec![true, true, false]);
        }
    }

    #[test]
    fn data_driven_errors_and_empty() {
        let v = w(&[0.1]);
        assert!(data_driven_from_w(&v, 0.0, &mut rng(0)).is_err());
        assert!(data_driven_from_w(&v, 1.0, &mut rng(0)).is_err());
        let d = data_driven(&[], 0.3, 0.75, NullDensity::Uniform, DensityEstimator::Grenander, None, &mut rng(0))
            .unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn prepared_matches_free_functions() {
        let (m, law) = ustep();
        let setting = Setting::from_model(&m);
        let s = m.sample(300, &mut rng(11));
        let spec = ProcedureSpec {
            kind: ProcedureKind::NpOracle,
            alpha: 0.6,
        };
        let p = spec.prepare(&setting).unwrap();
        assert_eq!(
            p.apply(&s.x, &mut rng(1)).unwrap(),
            np_oracle(&law, 0.6, &s.x, &mut rng(1)).unwrap()
        );
        let spec = ProcedureSpec {
            kind: ProcedureKind::DataDriven {
                estimator: DensityEstimator::Grenander,
            },
            alpha: 0.3,
        };
        let p = spec.prepare(&setting).unwrap();
        assert_eq!(
            p.apply(&s.x, &mut rng(2)).unwrap(),
            data_driven(&s.x, 0.3, 0.75, NullDensity::Uniform, DensityEstimator::Grenander, None, &mut rng(2)).unwrap()
        );
        let no_model = Setting {
            pi0: 0.75,
            null: NullDensity::Uniform,
            model: None,
        };
        let spec = ProcedureSpec {
            kind: ProcedureKind::OracleRandomized,
            alpha: 0.3,
        };
        assert!(spec.prepare(&no_model).is_err());
        assert!(spec.prepare(&setting).unwrap().split().is_some());
        let spec = ProcedureSpec {
            kind: ProcedureKind::Trivial,
            alpha: 0.9,
        };
        assert!(spec.prepare(&setting).is_err());
    }

    #[test]
    fn bh_on_gaussian_uses_upper_tail() {
        let p = p_values(NullDensity::StandardNormal, &[3.0f64, -3.0]);
        assert!(p[0] < 0.01 && p[1] > 0.99);
    }
}
