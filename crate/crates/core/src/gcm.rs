//! Greatest convex minorant of a point set, represented by its knots.
//!
//! Concave majorants are obtained by negating the ordinates and reusing
//! [`gcm_of_points`]; see the Grenander estimator.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::HullScalar;

/// Piecewise-linear curve with strictly increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotCurve<T> {
    knots: Vec<(T, T)>,
}

/// Adjacent knots enclosing an abscissa, with the mixing weight on the left knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub lo: usize,
    pub hi: usize,
    /// `(s_hi - s) / (s_hi - s_lo)`; so `w * s_lo + (1 - w) * s_hi == s`.
    pub weight: T,
}

impl<T: HullScalar> KnotCurve<T> {
    /// Builds a curve from knots that must already have strictly increasing `s`.
    pub fn from_knots(knots: Vec<(T, T)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                got: knots.len(),
            });
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::param("knots", "abscissae must be strictly increasing"));
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(T, T)] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn first_s(&self) -> T {
        self.knots[0].0
    }

    pub fn last_s(&self) -> T {
        self.knots[self.knots.len() - 1].0
    }

    /// Slopes of the consecutive segments.
    pub fn slopes(&self) -> Vec<T> {
        self.knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// True when consecutive slopes never decrease (checked by cross products).
    pub fn is_convex(&self) -> bool {
        self.knots.windows(3).all(|w| {
            let (a, b, c) = (w[0], w[1], w[2]);
            // slope(a,b) <= slope(b,c)
            (b.1 - a.1) * (c.0 - b.0) <= (c.1 - b.1) * (b.0 - a.0)
        })
    }

    /// Index `k` with `s` in `[s_k, s_{k+1})`, or the last segment when `s == s_m`.
    fn segment(&self, s: T) -> Result<usize> {
        if !(s >= self.first_s() && s <= self.last_s()) {
            return Err(Error::OutOfRange(s.approx_f64()));
        }
        // number of knots with s_k <= s
        let idx = self.knots.partition_point(|k| k.0 <= s);
        Ok(idx.saturating_sub(1).min(self.knots.len() - 2))
    }

    /// Linear interpolation between the bracketing knots.
    pub fn eval(&self, s: T) -> Result<T> {
        let k = self.segment(s)?;
        let (s0, t0) = self.knots[k];
        let (s1, t1) = self.knots[k + 1];
        if s == s0 {
            return Ok(t0);
        }
        if s == s1 {
            return Ok(t1);
        }
        Ok(t0 + (t1 - t0) * (s - s0) / (s1 - s0))
    }

    /// Half-open bracket `s in [s_lo, s_hi)` between adjacent knots.
    pub fn bracket(&self, s: T) -> Result<Bracket<T>> {
        if !(s >= self.first_s() && s < self.last_s()) {
            return Err(Error::OutOfRange(s.approx_f64()));
        }
        let k = self.segment(s)?;
        let (lo, hi) = (self.knots[k].0, self.knots[k + 1].0);
        Ok(Bracket {
            lo: k,
            hi: k + 1,
            weight: (hi - s) / (hi - lo),
        })
    }
}

/// Sorts by abscissa and keeps the lowest ordinate for tied abscissae.
pub(crate) fn collapse_ties<T: HullScalar>(points: &[(T, T)]) -> Result<Vec<(T, T)>> {
    let mut sorted = points.to_vec();
    if sorted
        .iter()
        .any(|p| p.0.partial_cmp(&p.0).is_none() || p.1.partial_cmp(&p.1).is_none())
    {
        return Err(Error::param("points", "coordinates must be comparable (no NaN)"));
    }
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut out: Vec<(T, T)> = Vec::with_capacity(sorted.len());
    for p in sorted {
        match out.last_mut() {
            Some(last) if last.0 == p.0 => last.1 = last.1.hull_min(p.1),
            _ => out.push(p),
        }
    }
    Ok(out)
}

/// `b` lies strictly below the chord from `a` to `c` by more than the hull tolerance.
#[inline]
pub(crate) fn strictly_below_chord<T: HullScalar>(a: (T, T), b: (T, T), c: (T, T)) -> bool {
    let cross = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    cross > T::hull_tolerance() * (c.0 - a.0)
}

/// Lower convex hull of `points` over their abscissa range.
///
/// Tied abscissae keep only their lowest ordinate. Points within the hull
/// tolerance of a chord are not retained as knots.
pub fn gcm_of_points<T: HullScalar>(points: &[(T, T)]) -> Result<KnotCurve<T>> {
    let pts = collapse_ties(points)?;
    if pts.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: pts.len(),
        });
    }
    let mut hull: Vec<(T, T)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 && !strictly_below_chord(hull[hull.len() - 2], hull[hull.len() - 1], p) {
            hull.pop();
        }
        hull.push(p);
    }
    Ok(KnotCurve { knots: hull })
}
