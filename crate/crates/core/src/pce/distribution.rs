use rand::Rng;
use rand_distr::{Beta, Distribution as _, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Input distribution. Each kind selects its orthogonal polynomial family
/// and the affine map to that family's standard variable.
///
/// A zero-width `Uniform` (`a == b`) or `Gaussian` (`sigma == 0`) is accepted
/// as a point mass; studies pin such inputs instead of expanding in them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Distribution<T> {
    Uniform { a: T, b: T },
    Gaussian { mu: T, sigma: T },
    /// Beta(alpha, beta) stretched onto `[a, b]`.
    Beta { alpha: T, beta: T, a: T, b: T },
    /// Gamma with `shape` and `rate` (density ∝ x^(shape-1) e^(-rate x)).
    Gamma { shape: T, rate: T },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Legendre,
    Hermite,
    Jacobi,
    Laguerre,
}

impl<T: Real> Distribution<T> {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: T| v.is_finite();
        let ok = match *self {
            Distribution::Uniform { a, b } => finite(a) && finite(b) && a <= b,
            Distribution::Gaussian { mu, sigma } => finite(mu) && finite(sigma) && sigma >= T::zero(),
            Distribution::Beta { alpha, beta, a, b } => {
                finite(a) && finite(b) && a < b && alpha > T::zero() && beta > T::zero() && finite(alpha) && finite(beta)
            }
            Distribution::Gamma { shape, rate } => {
                shape > T::zero() && rate > T::zero() && finite(shape) && finite(rate)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid distribution parameters: {self:?}")))
        }
    }

    /// True for point masses.
    pub fn is_degenerate(&self) -> bool {
        match *self {
            Distribution::Uniform { a, b } => a == b,
            Distribution::Gaussian { sigma, .. } => sigma == T::zero(),
            _ => false,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Distribution::Uniform { .. } => Family::Legendre,
            Distribution::Gaussian { .. } => Family::Hermite,
            Distribution::Beta { .. } => Family::Jacobi,
            Distribution::Gamma { .. } => Family::Laguerre,
        }
    }

    /// Nominal value used when the input is pinned: the mean (which is the
    /// midpoint for a uniform).
    pub fn mean(&self) -> T {
        match *self {
            Distribution::Uniform { a, b } => T::half() * (a + b),
            Distribution::Gaussian { mu, .. } => mu,
            Distribution::Beta { alpha, beta, a, b } => a + (b - a) * alpha / (alpha + beta),
            Distribution::Gamma { shape, rate } => shape / rate,
        }
    }

    pub fn variance(&self) -> T {
        match *self {
            Distribution::Uniform { a, b } => (b - a).powi(2) / T::lit(12.0),
            Distribution::Gaussian { sigma, .. } => sigma * sigma,
            Distribution::Beta { alpha, beta, a, b } => {
                let s = alpha + beta;
                (b - a).powi(2) * alpha * beta / (s * s * (s + T::one()))
            }
            Distribution::Gamma { shape, rate } => shape / (rate * rate),
        }
    }

    /// Maps a raw value to the family's standard variable.
    pub fn standardize(&self, x: T) -> Result<T> {
        let out_of_support = || Error::Domain(format!("value {x} outside the support of {self:?}"));
        if !x.is_finite() {
            return Err(out_of_support());
        }
        match *self {
            Distribution::Uniform { a, b } => {
                if x < a || x > b {
                    return Err(out_of_support());
                }
                Ok(if a == b { T::zero() } else { (T::two() * x - a - b) / (b - a) })
            }
            Distribution::Gaussian { mu, sigma } => Ok(if sigma == T::zero() { T::zero() } else { (x - mu) / sigma }),
            Distribution::Beta { a, b, .. } => {
                if x < a || x > b {
                    return Err(out_of_support());
                }
                Ok((T::two() * x - a - b) / (b - a))
            }
            Distribution::Gamma { rate, .. } => {
                if x < T::zero() {
                    return Err(out_of_support());
                }
                Ok(rate * x)
            }
        }
    }

    /// Inverse of [`standardize`](Self::standardize).
    pub fn from_standard(&self, xi: T) -> T {
        match *self {
            Distribution::Uniform { a, b } | Distribution::Beta { a, b, .. } => {
                T::half() * (a + b) + T::half() * (b - a) * xi
            }
            Distribution::Gaussian { mu, sigma } => mu + sigma * xi,
            Distribution::Gamma { rate, .. } => xi / rate,
        }
    }

    /// One draw. Always consumes randomness, even for point masses, so that
    /// the stream layout does not depend on which inputs are degenerate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let to_t = T::lit;
        match *self {
            Distribution::Uniform { a, b } => {
                let u: f64 = rng.random();
                a + (b - a) * to_t(u)
            }
            Distribution::Gaussian { mu, sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mu + sigma * to_t(z)
            }
            Distribution::Beta { alpha, beta, a, b } => {
                let d = Beta::new(alpha.to_f64_lossy(), beta.to_f64_lossy()).expect("validated beta");
                a + (b - a) * to_t(d.sample(rng))
            }
            Distribution::Gamma { shape, rate } => {
                let d = Gamma::new(shape.to_f64_lossy(), 1.0).expect("validated gamma");
                to_t(d.sample(rng)) / rate
            }
        }
    }

    pub fn cast<U: Real>(&self) -> Distribution<U> {
        let c = |v: T| U::lit(v.to_f64_lossy());
        match *self {
            Distribution::Uniform { a, b } => Distribution::Uniform { a: c(a), b: c(b) },
            Distribution::Gaussian { mu, sigma } => Distribution::Gaussian { mu: c(mu), sigma: c(sigma) },
            Distribution::Beta { alpha, beta, a, b } => {
                Distribution::Beta { alpha: c(alpha), beta: c(beta), a: c(a), b: c(b) }
            }
            Distribution::Gamma { shape, rate } => Distribution::Gamma { shape: c(shape), rate: c(rate) },
        }
    }
}

/// A named parameter with its distribution. The name addresses a field of
/// the parameter set or the process conditions (`"h"`, `"conditions.cw_0"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertainInput<T> {
    pub name: String,
    pub distribution: Distribution<T>,
}

impl<T: Real> UncertainInput<T> {
    pub fn new(name: impl Into<String>, distribution: Distribution<T>) -> Result<Self> {
        let name = name.into();
        if !crate::physics::is_known_field(&name) {
            return Err(Error::Config(format!("unknown parameter name `{name}`")));
        }
        distribution.validate()?;
        Ok(Self { name, distribution })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardize_round_trips() {
        let dists = [
            Distribution::Uniform { a: 1.0, b: 3.0 },
            Distribution::Gaussian { mu: 15.0, sigma: 3.0 },
            Distribution::Beta { alpha: 2.0, beta: 5.0, a: -1.0, b: 4.0 },
            Distribution::Gamma { shape: 3.0, rate: 2.0 },
        ];
        for d in dists {
            for x in [1.0f64, 1.7, 2.9] {
                let xi = d.standardize(x).unwrap();
                assert!((d.from_standard(xi) - x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_end_maps_to_one() {
        let d = Distribution::Uniform { a: 1e4, b: 2e4 };
        assert_eq!(d.standardize(2e4).unwrap(), 1.0);
        assert_eq!(d.standardize(1e4).unwrap(), -1.0);
        assert!(d.standardize(2.1e4).is_err());
    }

    #[test]
    fn validation() {
        assert!(Distribution::Uniform { a: 2.0, b: 1.0 }.validate().is_err());
        assert!(Distribution::Gaussian { mu: 0.0, sigma: -1.0 }.validate().is_err());
        assert!(Distribution::Gamma { shape: 0.0, rate: 1.0 }.validate().is_err());
        assert!(Distribution::Uniform { a: 1.0, b: 1.0 }.is_degenerate());
        assert!(UncertainInput::new("not_a_field", Distribution::Uniform { a: 0.0, b: 1.0 }).is_err());
        assert!(UncertainInput::new("conditions.cw_0", Distribution::Gaussian { mu: 0.088, sigma: 0.018 }).is_ok());
    }

    #[test]
    fn toml_form() {
        let d: Distribution<f64> = toml::from_str("kind = \"Uniform\"\na = 0.3\nb = 0.5").unwrap();
        assert_eq!(d, Distribution::Uniform { a: 0.3, b: 0.5 });
    }
}
