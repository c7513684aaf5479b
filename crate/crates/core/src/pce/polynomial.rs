//! Univariate orthogonal families, evaluated by three-term recurrence in the
//! standard variable of each distribution.
//!
//! Squared norms are taken under the *probability* measure of the standard
//! variable, so `⟨φ_0²⟩ = 1` for every family. For Legendre this is
//! `1/(2n+1)`, i.e. the textbook `2/(2n+1)` for `dx` on `[-1, 1]` divided by
//! the interval length 2.

use crate::error::{Error, Result};
use crate::pce::distribution::{Distribution, Family};
use crate::scalar::Real;

/// Family with its shape parameters resolved from a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis<T> {
    Legendre,
    /// Probabilists' Hermite, weight `e^{-x²/2}`.
    Hermite,
    /// Jacobi `P^(a, b)` with weight `(1-x)^a (1+x)^b` on `[-1, 1]`.
    Jacobi { a: T, b: T },
    /// Generalized Laguerre `L^(alpha)` with weight `x^alpha e^{-x}`.
    Laguerre { alpha: T },
}

impl<T: Real> Basis<T> {
    pub fn for_distribution(dist: &Distribution<T>) -> Result<Self> {
        dist.validate()?;
        Ok(match (*dist, dist.family()) {
            (Distribution::Uniform { .. }, Family::Legendre) => Basis::Legendre,
            (Distribution::Gaussian { .. }, Family::Hermite) => Basis::Hermite,
            // Beta(α, β) on [-1, 1] has density ∝ (1+x)^(α-1) (1-x)^(β-1).
            (Distribution::Beta { alpha, beta, .. }, Family::Jacobi) => {
                Basis::Jacobi { a: beta - T::one(), b: alpha - T::one() }
            }
            (Distribution::Gamma { shape, .. }, Family::Laguerre) => Basis::Laguerre { alpha: shape - T::one() },
            (d, f) => return Err(Error::Domain(format!("no polynomial family {f:?} for {d:?}"))),
        })
    }

    /// Writes `φ_0(x), …, φ_p(x)` into `out` (length `p + 1`).
    pub fn evaluate_all(&self, x: T, out: &mut [T]) {
        let Some(first) = out.first_mut() else { return };
        *first = T::one();
        if out.len() == 1 {
            return;
        }
        let one = T::one();
        let two = T::two();
        match *self {
            Basis::Legendre => {
                out[1] = x;
                for n in 1..out.len() - 1 {
                    let nf = T::from_usize_lossy(n);
                    out[n + 1] = ((two * nf + one) * x * out[n] - nf * out[n - 1]) / (nf + one);
                }
            }
            Basis::Hermite => {
                out[1] = x;
                for n in 1..out.len() - 1 {
                    out[n + 1] = x * out[n] - T::from_usize_lossy(n) * out[n - 1];
                }
            }
            Basis::Jacobi { a, b } => {
                out[1] = (a + one) + (a + b + two) * (x - one) * T::half();
                for n in 2..out.len() {
                    let nf = T::from_usize_lossy(n);
                    let s = two * nf + a + b;
                    let c0 = two * nf * (nf + a + b) * (s - two);
                    let c1 = (s - one) * (s * (s - two) * x + a * a - b * b);
                    let c2 = two * (nf + a - one) * (nf + b - one) * s;
                    out[n] = (c1 * out[n - 1] - c2 * out[n - 2]) / c0;
                }
            }
            Basis::Laguerre { alpha } => {
                out[1] = one + alpha - x;
                for n in 1..out.len() - 1 {
                    let nf = T::from_usize_lossy(n);
                    out[n + 1] = ((two * nf + one + alpha - x) * out[n] - (nf + alpha) * out[n - 1]) / (nf + one);
                }
            }
        }
    }

    pub fn value(&self, order: usize, x: T) -> T {
        let mut buf = vec![T::zero(); order + 1];
        self.evaluate_all(x, &mut buf);
        buf[order]
    }

    /// `E[φ_n²]` under the standardized distribution.
    pub fn squared_norm(&self, order: usize) -> T {
        let one = T::one();
        let two = T::two();
        let nf = T::from_usize_lossy(order);
        match *self {
            Basis::Legendre => one / (two * nf + one),
            Basis::Hermite => (1..=order).map(T::from_usize_lossy).fold(one, |acc, k| acc * k),
            Basis::Jacobi { a, b } => {
                if order == 0 {
                    return one;
                }
                // h_n / h_0 written so that a + b + 1 = 0 is harmless.
                let mut r = (one + a) * (one + b) / (two * nf + a + b + one);
                for k in 2..=order {
                    let kf = T::from_usize_lossy(k);
                    r = r * (kf + a) * (kf + b) / ((kf + a + b) * kf);
                }
                r
            }
            Basis::Laguerre { alpha } => (1..=order).fold(one, |acc, k| {
                let kf = T::from_usize_lossy(k);
                acc * (kf + alpha) / kf
            }),
        }
    }
}

/// Order-`n` member of the family matched to `dist`, with its squared norm.
pub fn univariate_polynomial<T: Real>(dist: &Distribution<T>, order: usize) -> Result<(impl Fn(T) -> T, T)> {
    let basis = Basis::for_distribution(dist)?;
    Ok((move |x: T| basis.value(order, x), basis.squared_norm(order)))
}
