//! Smooth p-power norms over a finite boundary.
//!
//! `N_p(x) = (sum_b b(x)^p)^(1/p)` with `p` even is a norm, C^∞ away from the
//! origin, and `max_b |b(x)| <= N_p(x) <= k^(1/p) max_b |b(x)|` for `k`
//! representatives. Choosing `p >= ln k / ln(1+ε)` makes it ε-equivalent to
//! the polyhedral norm.

use crate::error::{Error, Result};
use crate::normspec::NormSpec;
use crate::vector::{check_dim, Vector};

/// Smallest even `p >= 2` with `k^(1/p) <= 1 + ε`.
pub fn choose_p(k: usize, epsilon: f64) -> Result<u32> {
    if k == 0 {
        return Err(Error::InvalidParameter("need at least one functional".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let k = k as f64;
    let fits = |p: u32| k.powf(1.0 / p as f64) <= 1.0 + epsilon;
    let target = (k.ln() / epsilon.ln_1p()).ceil().max(2.0) as u32;
    let mut p = target + target % 2;
    while !fits(p) {
        p += 2;
    }
    // the log ratio can round up past an exact even integer
    while p > 2 && fits(p - 2) {
        p -= 2;
    }
    Ok(p)
}

#[derive(Debug, Clone)]
pub struct SmoothNorm {
    base: NormSpec,
    p: u32,
    /// Multiplier applied to the p-power aggregate; `1` by default, or
    /// `k^(-1/p)` to place the smooth norm below the base norm instead.
    scale: f64,
}

impl SmoothNorm {
    pub fn new(base: NormSpec, p: u32) -> Result<Self> {
        if p < 2 || !p.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "p must be even and at least 2, got {p}"
            )));
        }
        Ok(Self { base, p, scale: 1.0 })
    }

    /// Uses [`choose_p`] for the base boundary size.
    pub fn for_epsilon(base: NormSpec, epsilon: f64) -> Result<Self> {
        let p = choose_p(base.boundary().len(), epsilon)?;
        Self::new(base, p)
    }

    /// Divides by `k^(1/p)`, so that `N_p(x) <= max_b |b(x)|`.
    pub fn normalized(mut self) -> Self {
        self.scale = (self.k() as f64).powf(-1.0 / self.p as f64);
        self
    }

    pub fn base(&self) -> &NormSpec {
        &self.base
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn k(&self) -> usize {
        self.base.boundary().len()
    }

    pub fn value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.base.dim(), x.dim())?;
        let values = self.functional_values(x);
        let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if top == 0.0 {
            return Ok(0.0);
        }
        Ok(self.scale * top * power_sum(&values, top, self.p).powf(1.0 / self.p as f64))
    }

    /// Value and gradient `sum_b (b(x)/N(x))^(p-1) b`, scaled.
    pub fn value_and_gradient(&self, x: &Vector) -> Result<(f64, Vector)> {
        check_dim(self.base.dim(), x.dim())?;
        let values = self.functional_values(x);
        let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if top == 0.0 {
            return Err(Error::ZeroVector);
        }
        let p = self.p;
        let unscaled = top * power_sum(&values, top, p).powf(1.0 / p as f64);
        let mut grad = vec![0.0; x.dim()];
        for (b, &v) in self.base.boundary().iter().zip(&values) {
            let weight = (v / unscaled).powi(p as i32 - 1);
            for &(i, c) in b.entries() {
                grad[i] += weight * c;
            }
        }
        let grad = Vector::new(grad.into_iter().map(|g| self.scale * g).collect())?;
        Ok((self.scale * unscaled, grad))
    }

    fn functional_values(&self, x: &Vector) -> Vec<f64> {
        self.base.boundary().iter().map(|b| b.apply(x.coords())).collect()
    }
}

/// `sum (v / top)^p`, with `top = max |v|` so every term is at most 1.
fn power_sum(values: &[f64], top: f64, p: u32) -> f64 {
    values.iter().map(|v| (v / top).powi(p as i32)).sum()
}

pub fn smooth_value_and_gradient(norm: &SmoothNorm, x: &Vector) -> Result<(f64, Vector)> {
    norm.value_and_gradient(x)
}
