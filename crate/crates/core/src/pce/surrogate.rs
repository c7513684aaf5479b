use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, singular_values, Matrix};
use crate::pce::distribution::UncertainInput;
use crate::pce::empirical::EmpiricalDistribution;
use crate::pce::multi_index::MultiIndexSet;
use crate::pce::polynomial::Basis;
use crate::pce::sampling::draw_samples;
use crate::scalar::Real;

/// Scaled design matrices worse than this are treated as rank deficient.
pub const MAX_CONDITION: f64 = 1e10;

/// Minimum ratio of fitting samples to basis size.
pub const SAMPLE_FACTOR: usize = 2;

/// Smallest resample size accepted for distribution estimates.
pub const MIN_RESAMPLE: usize = 1000;

const FORMAT_VERSION: u32 = 1;

/// Non-intrusive polynomial chaos surrogate: `Y_k = Σ_i y_ik ψ_i(θ)` for each
/// output column `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PceSurrogate<T> {
    inputs: Vec<UncertainInput<T>>,
    bases: Vec<Basis<T>>,
    index_set: MultiIndexSet,
    norms: Vec<T>,
    /// `L × m`.
    coefficients: Matrix<T>,
}

impl<T: Real> PceSurrogate<T> {
    /// Builds a surrogate from known coefficients (`L × m`).
    pub fn from_coefficients(inputs: Vec<UncertainInput<T>>, order: usize, coefficients: Matrix<T>) -> Result<Self> {
        let bases = inputs
            .iter()
            .map(|inp| Basis::for_distribution(&inp.distribution))
            .collect::<Result<Vec<_>>>()?;
        let index_set = MultiIndexSet::new(inputs.len(), order);
        if coefficients.rows() != index_set.len() {
            return Err(Error::Fit(format!(
                "coefficient matrix has {} rows, basis has {}",
                coefficients.rows(),
                index_set.len()
            )));
        }
        let norms = index_set
            .indices()
            .iter()
            .map(|nu| nu.iter().zip(&bases).fold(T::one(), |acc, (&k, b)| acc * b.squared_norm(k)))
            .collect();
        Ok(Self { inputs, bases, index_set, norms, coefficients })
    }

    pub fn inputs(&self) -> &[UncertainInput<T>] {
        &self.inputs
    }

    pub fn index_set(&self) -> &MultiIndexSet {
        &self.index_set
    }

    pub fn order(&self) -> usize {
        self.index_set.order()
    }

    pub fn basis_len(&self) -> usize {
        self.index_set.len()
    }

    pub fn outputs(&self) -> usize {
        self.coefficients.cols()
    }

    pub fn coefficients(&self) -> &Matrix<T> {
        &self.coefficients
    }

    /// `⟨ψ_i²⟩` for each basis function.
    pub fn squared_norms(&self) -> &[T] {
        &self.norms
    }

    /// `ψ(θ)` for a raw parameter vector.
    pub fn evaluate_basis(&self, theta: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.basis_len()];
        let mut scratch = vec![T::zero(); self.inputs.len() * (self.order() + 1)];
        self.basis_into(theta, &mut scratch, &mut out)?;
        Ok(out)
    }

    fn basis_into(&self, theta: &[T], scratch: &mut [T], out: &mut [T]) -> Result<()> {
        if theta.len() != self.inputs.len() {
            return Err(Error::Domain(format!(
                "parameter vector has {} entries, surrogate has {} inputs",
                theta.len(),
                self.inputs.len()
            )));
        }
        let stride = self.order() + 1;
        for (j, (input, basis)) in self.inputs.iter().zip(&self.bases).enumerate() {
            let xi = input.distribution.standardize(theta[j])?;
            basis.evaluate_all(xi, &mut scratch[j * stride..(j + 1) * stride]);
        }
        for (slot, nu) in out.iter_mut().zip(self.index_set.indices()) {
            *slot = nu.iter().enumerate().fold(T::one(), |acc, (j, &k)| acc * scratch[j * stride + k]);
        }
        Ok(())
    }

    /// Surrogate outputs at `theta`.
    pub fn evaluate(&self, theta: &[T]) -> Result<Vec<T>> {
        let psi = self.evaluate_basis(theta)?;
        Ok(self.combine(&psi))
    }

    fn combine(&self, psi: &[T]) -> Vec<T> {
        let m = self.outputs();
        let mut out = vec![T::zero(); m];
        for (i, &p) in psi.iter().enumerate() {
            for (o, &c) in out.iter_mut().zip(self.coefficients.row(i)) {
                *o = *o + c * p;
            }
        }
        out
    }

    /// Outputs at every row of `samples` (`n × m`).
    pub fn evaluate_many(&self, samples: &Matrix<T>) -> Result<Matrix<T>> {
        let m = self.outputs();
        let n = samples.rows();
        let mut data = vec![T::zero(); n * m];
        if m == 0 {
            return Ok(Matrix::from_rows(n, m, data));
        }
        data.par_chunks_mut(m).enumerate().try_for_each_init(
            || (vec![T::zero(); self.inputs.len() * (self.order() + 1)], vec![T::zero(); self.basis_len()]),
            |(scratch, psi), (k, row)| -> Result<()> {
                self.basis_into(samples.row(k), scratch, psi)?;
                row.iter_mut().for_each(|v| *v = T::zero());
                for (i, &p) in psi.iter().enumerate() {
                    for (o, &c) in row.iter_mut().zip(self.coefficients.row(i)) {
                        *o = *o + c * p;
                    }
                }
                Ok(())
            },
        )?;
        Ok(Matrix::from_rows(n, m, data))
    }

    /// Per-output `(mean, variance)` from the coefficients.
    pub fn moments(&self) -> Vec<(T, T)> {
        (0..self.outputs())
            .map(|k| {
                let mean = self.coefficients[(0, k)];
                let var = (1..self.basis_len())
                    .map(|i| self.coefficients[(i, k)].powi(2) * self.norms[i])
                    .sum::<T>();
                (mean, var)
            })
            .collect()
    }

    /// Outputs at `n` fresh input draws from `seed` (`n × m`).
    pub fn resample(&self, n: usize, seed: u64) -> Result<Matrix<T>> {
        let samples = draw_samples(&self.inputs, n, seed);
        self.evaluate_many(&samples)
    }

    pub fn cast<U: Real>(&self) -> PceSurrogate<U> {
        let c = &self.coefficients;
        PceSurrogate::from_coefficients(
            self.inputs
                .iter()
                .map(|i| UncertainInput { name: i.name.clone(), distribution: i.distribution.cast() })
                .collect(),
            self.order(),
            Matrix::from_rows(c.rows(), c.cols(), c.as_slice().iter().map(|v| U::lit(v.to_f64_lossy())).collect()),
        )
        .expect("casting preserves a valid surrogate")
    }
}

/// Least-squares fit of `responses` (`n × m`) on the order-`order` basis.
///
/// Columns of the design matrix are scaled to unit length before the QR
/// solve and the coefficients are unscaled afterwards.
pub fn fit_surrogate<T: Real>(
    inputs: &[UncertainInput<T>],
    samples: &Matrix<T>,
    responses: &Matrix<T>,
    order: usize,
) -> Result<PceSurrogate<T>> {
    if inputs.is_empty() {
        return Err(Error::Fit("no uncertain inputs to expand in".into()));
    }
    if let Some(d) = inputs.iter().find(|i| i.distribution.is_degenerate()) {
        return Err(Error::Fit(format!("input `{}` has a zero-width distribution; pin it instead", d.name)));
    }
    let n = samples.rows();
    if samples.cols() != inputs.len() || responses.rows() != n {
        return Err(Error::Fit(format!(
            "shape mismatch: {} inputs, samples {}x{}, responses {}x{}",
            inputs.len(),
            samples.rows(),
            samples.cols(),
            responses.rows(),
            responses.cols()
        )));
    }
    if responses.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("responses contain non-finite values".into()));
    }
    let placeholder = Matrix::zeros(crate::pce::multi_index::cardinality(inputs.len(), order), 0);
    let mut surrogate = PceSurrogate::from_coefficients(inputs.to_vec(), order, placeholder)?;
    let l = surrogate.basis_len();
    if n < SAMPLE_FACTOR * l {
        return Err(Error::Fit(format!(
            "{n} samples for {l} basis functions; need at least {} (use more samples or a lower order)",
            SAMPLE_FACTOR * l
        )));
    }

    let mut design = Matrix::zeros(n, l);
    let mut scratch = vec![T::zero(); inputs.len() * (order + 1)];
    for k in 0..n {
        surrogate.basis_into(samples.row(k), &mut scratch, design.row_mut(k))?;
    }
    let scales: Vec<T> = (0..l)
        .map(|j| (0..n).map(|k| design[(k, j)].powi(2)).sum::<T>().sqrt())
        .collect();
    if let Some(j) = scales.iter().position(|&s| !(s > T::zero())) {
        return Err(Error::Fit(format!("basis function {j} vanishes on every sample")));
    }
    for k in 0..n {
        for (v, &s) in design.row_mut(k).iter_mut().zip(&scales) {
            *v = *v / s;
        }
    }
    let sv = singular_values(&design);
    let smallest = sv.last().copied().unwrap_or(T::zero());
    let condition = if smallest > T::zero() { sv[0] / smallest } else { T::infinity() };
    if !(condition <= T::lit(MAX_CONDITION)) {
        return Err(Error::Fit(format!(
            "design matrix is rank deficient (condition number {condition}); use more samples or a lower order"
        )));
    }
    let (mut coeffs, _) = least_squares(&design, responses);
    for (j, &s) in scales.iter().enumerate() {
        for v in coeffs.row_mut(j) {
            *v = *v / s;
        }
    }
    surrogate.coefficients = coeffs;
    Ok(surrogate)
}

pub fn evaluate_surrogate<T: Real>(surrogate: &PceSurrogate<T>, theta: &[T]) -> Result<Vec<T>> {
    surrogate.evaluate(theta)
}

pub fn surrogate_moments<T: Real>(surrogate: &PceSurrogate<T>) -> Vec<(T, T)> {
    surrogate.moments()
}

/// Per-output empirical distribution of the surrogate under `n_resample`
/// fresh input draws.
pub fn surrogate_distribution<T: Real>(
    surrogate: &PceSurrogate<T>,
    n_resample: usize,
    seed: u64,
) -> Result<Vec<EmpiricalDistribution<T>>> {
    if n_resample < MIN_RESAMPLE {
        return Err(Error::Domain(format!("need at least {MIN_RESAMPLE} resamples, got {n_resample}")));
    }
    let values = surrogate.resample(n_resample, seed)?;
    (0..values.cols()).map(|k| EmpiricalDistribution::new(values.column(k))).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurrogateDocument<T> {
    version: u32,
    order: usize,
    inputs: Vec<UncertainInput<T>>,
    indices: Vec<Vec<usize>>,
    squared_norms: Vec<T>,
    coefficients: Vec<Vec<T>>,
}

impl<T: Real + Serialize + DeserializeOwned> PceSurrogate<T> {
    pub fn to_json(&self) -> String {
        let doc = SurrogateDocument {
            version: FORMAT_VERSION,
            order: self.order(),
            inputs: self.inputs.clone(),
            indices: self.index_set.indices().to_vec(),
            squared_norms: self.norms.clone(),
            coefficients: (0..self.basis_len()).map(|i| self.coefficients.row(i).to_vec()).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("surrogate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SurrogateDocument<T> =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("surrogate document: {e}")))?;
        if doc.version != FORMAT_VERSION {
            return Err(Error::Config(format!("unsupported surrogate version {}", doc.version)));
        }
        let m = doc.coefficients.first().map_or(0, Vec::len);
        if doc.coefficients.iter().any(|r| r.len() != m) {
            return Err(Error::Config("ragged coefficient matrix".into()));
        }
        let rows = doc.coefficients.len();
        let coeffs = Matrix::from_rows(rows, m, doc.coefficients.into_iter().flatten().collect());
        let s = Self::from_coefficients(doc.inputs, doc.order, coeffs)?;
        if s.index_set.indices() != doc.indices.as_slice() {
            return Err(Error::Config("multi-index list does not match the declared order".into()));
        }
        Ok(s)
    }
}
