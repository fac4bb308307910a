//! Jacobi polynomials P_n^{(α,β)} in the classical normalization
//! P_n^{(α,β)}(1) = binom(n+α, n).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    degree: usize,
    alpha: f64,
    beta: f64,
}

impl JacobiParams {
    pub fn new(degree: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::invalid(format!(
                "Jacobi indices must exceed -1, got α={alpha}, β={beta}"
            )));
        }
        Ok(Self { degree, alpha, beta })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Value at t = 1, binom(n+α, n) = ∏_{k=1}^{n} (α+k)/k.
    pub fn value_at_one(&self) -> f64 {
        (1..=self.degree).fold(1.0, |acc, k| acc * (self.alpha + k as f64) / k as f64)
    }

    /// Three-term recurrence without the range check on `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        let mut prev = 1.0;
        if self.degree == 0 {
            return prev;
        }
        let mut cur = (a + 1.0) + 0.5 * (a + b + 2.0) * (t - 1.0);
        for n in 2..=self.degree {
            let n = n as f64;
            let s = 2.0 * n + a + b;
            let lead = 2.0 * n * (n + a + b) * (s - 2.0);
            let c1 = (s - 1.0) * (s * (s - 2.0) * t + a * a - b * b);
            let c2 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s;
            let next = (c1 * cur - c2 * prev) / lead;
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// P_n^{(α,β)}(t) for t ∈ [−1, 1].
pub fn jacobi_eval(params: &JacobiParams, t: f64) -> Result<f64> {
    if !(t.abs() <= 1.0) {
        return Err(Error::invalid(format!("Jacobi argument {t} outside [-1, 1]")));
    }
    Ok(params.eval(t))
}
