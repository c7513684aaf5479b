//! Empirical distributions: sorted samples, a Freedman–Diaconis histogram,
//! the empirical CDF, equal-tail intervals and the two-sample KS distance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Upper bound on histogram bins, for heavy-tailed or nearly constant data.
const MAX_BINS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram<T> {
    /// Bin edges, one more than the number of bins.
    pub edges: Vec<T>,
    /// Probability density per bin (integrates to 1).
    pub density: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalDistribution<T> {
    sorted: Vec<T>,
    histogram: Histogram<T>,
}

impl<T: Real> EmpiricalDistribution<T> {
    /// Builds from raw samples (any order). Non-finite samples are rejected.
    pub fn new(mut samples: Vec<T>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("empirical distribution needs at least one sample".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("empirical distribution got a non-finite sample".into()));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let histogram = freedman_diaconis(&samples);
        Ok(Self { sorted: samples, histogram })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_samples(&self) -> &[T] {
        &self.sorted
    }

    pub fn histogram(&self) -> &Histogram<T> {
        &self.histogram
    }

    pub fn min(&self) -> T {
        self.sorted[0]
    }

    pub fn max(&self) -> T {
        self.sorted[self.sorted.len() - 1]
    }

    /// Mean by sorted-order summation (so it does not depend on input order).
    pub fn mean(&self) -> T {
        self.sorted.iter().copied().sum::<T>() / T::from_usize_lossy(self.len())
    }

    /// Unbiased sample variance (0 for a single sample).
    pub fn variance(&self) -> T {
        let n = self.len();
        if n < 2 {
            return T::zero();
        }
        let m = self.mean();
        self.sorted.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / T::from_usize_lossy(n - 1)
    }

    /// `P(X ≤ x)`.
    pub fn cdf(&self, x: T) -> T {
        let count = self.sorted.partition_point(|&v| v <= x);
        T::from_usize_lossy(count) / T::from_usize_lossy(self.len())
    }

    /// Linear interpolation of order statistics (Hyndman–Fan type 7).
    pub fn quantile(&self, p: T) -> T {
        let n = self.len();
        let p = p.max(T::zero()).min(T::one());
        let h = p * T::from_usize_lossy(n - 1);
        let lo = h.floor().to_usize().unwrap_or(0).min(n - 1);
        let hi = (lo + 1).min(n - 1);
        let frac = h - T::from_usize_lossy(lo);
        self.sorted[lo] + frac * (self.sorted[hi] - self.sorted[lo])
    }

    /// Equal-tail interval with coverage `level`.
    pub fn confidence_interval(&self, level: T) -> Result<(T, T)> {
        if !(level > T::zero() && level < T::one()) {
            return Err(Error::Domain(format!("confidence level must lie in (0, 1), got {level}")));
        }
        let tail = (T::one() - level) * T::half();
        Ok((self.quantile(tail), self.quantile(T::one() - tail)))
    }

    /// Kolmogorov–Smirnov distance: `sup_x |F_a(x) - F_b(x)|`.
    pub fn ks_distance(&self, other: &Self) -> T {
        ks_distance_sorted(&self.sorted, &other.sorted)
    }
}

/// `P(X ≤ threshold)` under the empirical distribution.
pub fn chance_probability<T: Real>(dist: &EmpiricalDistribution<T>, threshold: T) -> T {
    dist.cdf(threshold)
}

pub fn confidence_interval<T: Real>(dist: &EmpiricalDistribution<T>, level: T) -> Result<(T, T)> {
    dist.confidence_interval(level)
}

pub fn compare_distributions<T: Real>(a: &EmpiricalDistribution<T>, b: &EmpiricalDistribution<T>) -> T {
    a.ks_distance(b)
}

fn ks_distance_sorted<T: Real>(a: &[T], b: &[T]) -> T {
    let (na, nb) = (a.len(), b.len());
    let (fa, fb) = (T::from_usize_lossy(na), T::from_usize_lossy(nb));
    let (mut i, mut j) = (0usize, 0usize);
    let mut best = T::zero();
    while i < na && j < nb {
        // Step past every sample equal to the smaller current value in both.
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        let d = (T::from_usize_lossy(i) / fa - T::from_usize_lossy(j) / fb).abs();
        if d > best {
            best = d;
        }
    }
    best
}

fn freedman_diaconis<T: Real>(sorted: &[T]) -> Histogram<T> {
    let n = sorted.len();
    let (lo, hi) = (sorted[0], sorted[n - 1]);
    if hi == lo {
        return Histogram { edges: vec![lo, hi], density: vec![T::infinity()] };
    }
    let q = |p: f64| {
        let h = p * (n - 1) as f64;
        let k = h.floor() as usize;
        let k1 = (k + 1).min(n - 1);
        sorted[k] + T::lit(h - k as f64) * (sorted[k1] - sorted[k])
    };
    let iqr = q(0.75) - q(0.25);
    let width = T::two() * iqr / T::from_usize_lossy(n).cbrt();
    let bins = if width > T::zero() {
        ((hi - lo) / width).ceil().to_usize().unwrap_or(1).clamp(1, MAX_BINS)
    } else {
        1
    };
    let step = (hi - lo) / T::from_usize_lossy(bins);
    let mut edges: Vec<T> = (0..=bins).map(|k| lo + step * T::from_usize_lossy(k)).collect();
    edges[bins] = hi;
    let mut counts = vec![0usize; bins];
    for &v in sorted {
        let k = ((v - lo) / step).floor().to_usize().unwrap_or(0).min(bins - 1);
        counts[k] += 1;
    }
    let scale = T::one() / (T::from_usize_lossy(n) * step);
    Histogram { edges, density: counts.into_iter().map(|c| T::from_usize_lossy(c) * scale).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> EmpiricalDistribution<f64> {
        EmpiricalDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn cdf_edges() {
        let d = dist(&[3.0, 1.0, 2.0, 4.0]);
        assert_eq!(d.cdf(0.5), 0.0);
        assert_eq!(d.cdf(4.0), 1.0);
        assert_eq!(d.cdf(2.0), 0.5);
        assert_eq!(chance_probability(&d, 100.0), 1.0);
    }

    #[test]
    fn quantiles_type7() {
        let d = dist(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(d.quantile(0.5), 2.0);
        assert_eq!(d.quantile(0.1), 0.4);
        assert_eq!(d.quantile(0.0), 0.0);
        assert_eq!(d.quantile(1.0), 4.0);
        let (lo, hi) = d.confidence_interval(0.999999).unwrap();
        assert!((lo - 0.0).abs() < 1e-5 && (hi - 4.0).abs() < 1e-5);
        assert!(d.confidence_interval(1.0).is_err());
    }

    #[test]
    fn ks_identical_and_disjoint() {
        let a = dist(&[1.0, 2.0, 3.0]);
        assert_eq!(a.ks_distance(&a), 0.0);
        let b = dist(&[10.0, 11.0]);
        assert_eq!(a.ks_distance(&b), 1.0);
        let c = dist(&[1.0, 1.0, 2.0, 2.0]);
        let e = dist(&[1.0, 2.0]);
        assert_eq!(c.ks_distance(&e), 0.0);
    }

    #[test]
    fn histogram_integrates_to_one() {
        let v: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 / 1000.0).collect();
        let d = dist(&v);
        let h = d.histogram();
        let total: f64 = h.density.iter().zip(h.edges.windows(2)).map(|(p, e)| p * (e[1] - e[0])).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_sample_mean() {
        let d = dist(&[0.0, 1.0]);
        assert_eq!(d.mean(), 0.5);
        assert_eq!(dist(&[2.0; 5]).variance(), 0.0);
    }
}
