//! Dense vectors and sparse linear functionals over a finite index set.
//!
//! Vectors are evaluated everywhere and stored densely. Functionals are
//! driven by their support, so they keep a sorted list of nonzero
//! coefficients against the standard coordinate functionals `e*_i`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A point of the primal space, with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(index) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { coords })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    /// The standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::OutOfRange(format!("basis index {index} in dimension {dim}")));
        }
        let mut coords = vec![0.0; dim];
        coords[index] = 1.0;
        Self::new(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn scaled(&self, a: f64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|c| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn euclidean_norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Number of nonzero coordinates.
    pub fn support_size(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0.0).count()
    }
}

/// A linear functional with finitely many nonzero coefficients.
///
/// Entries are kept sorted by index with no stored zeros, so `support()`
/// is exactly the list of stored indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    dim: usize,
    entries: Vec<(usize, f64)>,
}

impl Functional {
    /// Builds a functional from sorted `(index, coeff)` pairs.
    pub fn new(dim: usize, entries: Vec<(usize, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut prev: Option<usize> = None;
        for &(index, coeff) in &entries {
            if index >= dim {
                return Err(Error::InvalidFunctional(format!(
                    "index {index} out of range for dimension {dim}"
                )));
            }
            if prev.is_some_and(|p| p >= index) {
                return Err(Error::InvalidFunctional(format!(
                    "indices must be strictly increasing (saw {index} after {})",
                    prev.unwrap_or_default()
                )));
            }
            if !coeff.is_finite() {
                return Err(Error::InvalidFunctional(format!(
                    "non-finite coefficient at index {index}"
                )));
            }
            if coeff == 0.0 {
                return Err(Error::InvalidFunctional(format!(
                    "stored zero coefficient at index {index}"
                )));
            }
            prev = Some(index);
        }
        Ok(Self { dim, entries })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    /// The coordinate functional `e*_index`.
    pub fn coordinate(dim: usize, index: usize) -> Result<Self> {
        Self::new(dim, vec![(index, 1.0)])
    }

    /// Builds a functional from dense coefficients, dropping exact zeros.
    pub fn from_dense(coeffs: &[f64]) -> Result<Self> {
        let entries = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, &c)| (i, c))
            .collect();
        Self::new(coeffs.len(), entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|&(i, _)| i).collect()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Coefficient `f(e_index)`; zero off the support.
    pub fn coeff(&self, index: usize) -> f64 {
        match self.entries.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, c) in &self.entries {
            out[i] = c;
        }
        out
    }

    pub fn evaluate(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok(self.apply(x.coords()))
    }

    /// Sparse dot product against a raw coordinate slice of matching length.
    pub(crate) fn apply(&self, coords: &[f64]) -> f64 {
        debug_assert_eq!(coords.len(), self.dim);
        self.entries.iter().map(|&(i, c)| c * coords[i]).sum()
    }

    /// `sum |f(e_i)|`.
    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, c)| c.abs()).sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &(_, c)| m.max(c.abs()))
    }

    pub fn scaled(&self, a: f64) -> Functional {
        let entries = self
            .entries
            .iter()
            .map(|&(i, c)| (i, a * c))
            .filter(|&(_, c)| c != 0.0)
            .collect();
        Functional { dim: self.dim, entries }
    }

    pub fn neg(&self) -> Functional {
        Functional {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, c)| (i, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Functional) -> Result<Functional> {
        linear_combine(&[(1.0, self), (-1.0, other)])
    }

    /// Lexicographic order on the dense coefficient vectors.
    pub fn lex_cmp(&self, other: &Functional) -> Ordering {
        let n = self.dim.max(other.dim);
        for i in 0..n {
            let ord = self.coeff(i).total_cmp(&other.coeff(i));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (i, c)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}: {c}")?;
        }
        write!(f, "}}")
    }
}

pub fn evaluate(f: &Functional, x: &Vector) -> Result<f64> {
    f.evaluate(x)
}

pub fn l1_norm(f: &Functional) -> f64 {
    f.l1_norm()
}

/// Coefficient-wise `sum a_k f_k`, accumulated in term order.
///
/// Entries that sum to exactly `0.0` are dropped; there is no tolerance.
pub fn linear_combine(terms: &[(f64, &Functional)]) -> Result<Functional> {
    let Some(&(_, first)) = terms.first() else {
        return Err(Error::InvalidParameter("linear_combine needs at least one term".into()));
    };
    let dim = first.dim;
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for &(a, f) in terms {
        check_dim(dim, f.dim)?;
        for &(i, c) in &f.entries {
            *acc.entry(i).or_insert(0.0) += a * c;
        }
    }
    let entries = acc.into_iter().filter(|&(_, c)| c != 0.0).collect();
    Ok(Functional { dim, entries })
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
