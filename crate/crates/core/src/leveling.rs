//! Leveling decomposition of a finite-support functional.
//!
//! For `f` with coefficients `f(e_i)`, the levels are the distinct values of
//! `|f(e_i)|` in decreasing order, `p_1 > p_2 > ... > p_M > 0`, and
//! `G_n = { i : |f(e_i)| >= p_n }`. With the convention `p_{M+1} = 0`:
//!
//! ```text
//! w(f,n)   = sum_{i in G_n} sgn(f(e_i)) e*_i
//! h(f,n)   = sum_{i<=n} (p_i - p_{i+1}) w(f,i)
//! g(f,n,m) = (||f - h(f,n)||_1 / |G_m|) w(f,m)          for m > n
//! j(f,n,m) = h(f,n) + g(f,n,m)
//! ```
//!
//! `h(f,n)` flattens every coefficient above `p_{n+1}` down by `p_{n+1}`, and
//! `j(f,n,m)` re-spreads the lost ℓ1 mass evenly over `G_m`. The weights
//! `λ_m = (p_m - p_{m+1}) |G_m| / ||f - h(f,n)||_1` recover `f` as the convex
//! combination `sum_{m>n} λ_m j(f,n,m)`.
//!
//! Levels are exact value classes: ties are grouped by `f64` equality.

use crate::error::{Error, Result};
use crate::vector::{linear_combine, Functional};

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub value: f64,
    /// `G_n`, sorted ascending.
    pub set: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelingDecomposition {
    f: Functional,
    levels: Vec<Level>,
}

impl LevelingDecomposition {
    pub fn new(f: &Functional) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroFunctional);
        }
        let mut values: Vec<f64> = f.entries().iter().map(|&(_, c)| c.abs()).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        values.dedup();
        let levels = values
            .into_iter()
            .map(|value| Level {
                value,
                set: f
                    .entries()
                    .iter()
                    .filter(|&&(_, c)| c.abs() >= value)
                    .map(|&(i, _)| i)
                    .collect(),
            })
            .collect();
        Ok(Self { f: f.clone(), levels })
    }

    pub fn functional(&self) -> &Functional {
        &self.f
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Termination index `M`: the number of positive levels.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `p(f,n)` for `n >= 1`; zero beyond the last level.
    pub fn p(&self, n: usize) -> f64 {
        assert!(n >= 1, "levels are indexed from 1");
        self.levels.get(n - 1).map_or(0.0, |l| l.value)
    }

    /// `G(f,n)` for `1 <= n <= M`.
    pub fn g_set(&self, n: usize) -> Result<&[usize]> {
        self.check_level(n)?;
        Ok(&self.levels[n - 1].set)
    }

    /// `w(f,n)`, the signed indicator of `G(f,n)`.
    pub fn w(&self, n: usize) -> Result<Functional> {
        let set = self.g_set(n)?;
        let entries = set.iter().map(|&i| (i, self.f.coeff(i).signum())).collect();
        Functional::new(self.f.dim(), entries)
    }

    /// `h(f,n)`, computed pointwise as `f(e_i) - p(f,n+1) sgn(f(e_i))` on `G_n`.
    ///
    /// `h(f,M) == f` bit for bit since `p(f,M+1) = 0`.
    pub fn h(&self, n: usize) -> Result<Functional> {
        self.check_level(n)?;
        let floor = self.p(n + 1);
        let cut = self.p(n);
        let entries = self
            .f
            .entries()
            .iter()
            .filter(|&&(_, c)| c.abs() >= cut)
            .map(|&(i, c)| (i, c.signum() * (c.abs() - floor)))
            .collect();
        Functional::new(self.f.dim(), entries)
    }

    /// `||f - h(f,n)||_1`.
    pub fn residual_l1(&self, n: usize) -> Result<f64> {
        Ok(self.f.sub(&self.h(n)?)?.l1_norm())
    }

    pub fn g(&self, n: usize, m: usize) -> Result<Functional> {
        self.check_pair(n, m)?;
        let residual = self.residual_l1(n)?;
        let size = self.levels[m - 1].set.len() as f64;
        Ok(self.w(m)?.scaled(residual / size))
    }

    /// `j(f,n,m) = h(f,n) + g(f,n,m)`, for `1 <= n < m <= M`.
    pub fn j(&self, n: usize, m: usize) -> Result<Functional> {
        self.check_pair(n, m)?;
        let h = self.h(n)?;
        let g = self.g(n, m)?;
        linear_combine(&[(1.0, &h), (1.0, &g)])
    }

    /// `(m, λ_m)` for `m = n+1..=M`.
    pub fn lambda_weights(&self, n: usize) -> Result<Vec<(usize, f64)>> {
        if n == 0 || n >= self.depth() {
            return Err(Error::OutOfRange(format!(
                "lambda weights need 1 <= n < M = {} (got n = {n}); the residual vanishes at n = M",
                self.depth()
            )));
        }
        let residual = self.residual_l1(n)?;
        Ok((n + 1..=self.depth())
            .map(|m| {
                let size = self.levels[m - 1].set.len() as f64;
                (m, (self.p(m) - self.p(m + 1)) * size / residual)
            })
            .collect())
    }

    /// `sum_{m>n} λ_m j(f,n,m)`, which reproduces `f`.
    pub fn convex_reconstruct(&self, n: usize) -> Result<Functional> {
        let weights = self.lambda_weights(n)?;
        let js = weights.iter().map(|&(m, _)| self.j(n, m)).collect::<Result<Vec<_>>>()?;
        let terms: Vec<(f64, &Functional)> = weights.iter().zip(&js).map(|(&(_, l), j)| (l, j)).collect();
        linear_combine(&terms)
    }

    fn check_level(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.depth() {
            return Err(Error::OutOfRange(format!("level {n} not in 1..={}", self.depth())));
        }
        Ok(())
    }

    fn check_pair(&self, n: usize, m: usize) -> Result<()> {
        if n == 0 || n >= m || m > self.depth() {
            return Err(Error::OutOfRange(format!(
                "need 1 <= n < m <= M = {} (got n = {n}, m = {m})",
                self.depth()
            )));
        }
        Ok(())
    }
}

pub fn level_sequence(f: &Functional) -> Result<LevelingDecomposition> {
    LevelingDecomposition::new(f)
}

pub fn h_approx(levels: &LevelingDecomposition, n: usize) -> Result<Functional> {
    levels.h(n)
}

pub fn j_approx(levels: &LevelingDecomposition, n: usize, m: usize) -> Result<Functional> {
    levels.j(n, m)
}

pub fn lambda_weights(levels: &LevelingDecomposition, n: usize) -> Result<Vec<(usize, f64)>> {
    levels.lambda_weights(n)
}

pub fn convex_reconstruct(levels: &LevelingDecomposition, n: usize) -> Result<Functional> {
    levels.convex_reconstruct(n)
}
