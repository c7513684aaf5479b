//! Grid helpers shared by the drying models and studies.

use serde::Serialize;

use crate::scalar::Real;

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace<T: Real>(start: T, end: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / T::from_usize_lossy(n - 1);
            let mut v: Vec<T> = (0..n).map(|i| start + step * T::from_usize_lossy(i)).collect();
            v[n - 1] = end;
            v
        }
    }
}

/// Trapezoidal average of nodal values on a uniform grid.
pub fn trapezoid_mean<T: Real>(values: &[T]) -> T {
    match values.len() {
        0 => T::nan(),
        1 => values[0],
        n => {
            // Offsetting by the first value keeps uniform fields exact.
            let base = values[0];
            let interior: T = values[1..n - 1].iter().map(|&v| v - base).sum();
            let ends = T::half() * (values[n - 1] - base);
            base + (interior + ends) / T::from_usize_lossy(n - 1)
        }
    }
}

/// Outcome of a "when does X happen" query on a finite trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Completion<T> {
    Reached(T),
    NotReached,
}

impl<T: Copy> Completion<T> {
    pub fn time(&self) -> Option<T> {
        match self {
            Completion::Reached(t) => Some(*t),
            Completion::NotReached => None,
        }
    }
}
