//! Small dense linear algebra: Gaussian elimination with partial pivoting.

#![allow(clippy::needless_range_loop)]

/// Relative pivot threshold below which a system is treated as singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// Solves the square system `a * x = b` in place of a copy of `a`.
///
/// Returns `None` when a pivot falls below `PIVOT_TOL` times the largest
/// entry of `a`.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    debug_assert_eq!(b.len(), n);
    let lu = Lu::factor(a)?;
    debug_assert_eq!(lu.n, n);
    Some(lu.solve(b))
}

/// LU factorization with row pivoting, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    m: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &[Vec<f64>]) -> Option<Lu> {
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
        if scale == 0.0 {
            return None;
        }
        let tol = PIVOT_TOL * scale;
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (pivot_row, pivot_abs) =
                (col..n)
                    .map(|r| (r, m[r][col].abs()))
                    .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= tol {
                return None;
            }
            m.swap(col, pivot_row);
            perm.swap(col, pivot_row);
            let pivot = m[col][col];
            for r in col + 1..n {
                let factor = m[r][col] / pivot;
                m[r][col] = factor;
                if factor != 0.0 {
                    for c in col + 1..n {
                        m[r][c] -= factor * m[col][c];
                    }
                }
            }
        }
        Some(Lu { n, m, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut s = y[r];
            for c in 0..r {
                s -= self.m[r][c] * y[c];
            }
            y[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = y[r];
            for c in r + 1..n {
                s -= self.m[r][c] * y[c];
            }
            y[r] = s / self.m[r][r];
        }
        y
    }
}

/// Numerical rank of a row set, by elimination with a relative tolerance.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let thresh = tol * scale;
    let mut rank = 0;
    for col in 0..cols {
        if rank == m.len() {
            break;
        }
        let (pivot_row, pivot_abs) = (rank..m.len())
            .map(|r| (r, m[r][col].abs()))
            .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= thresh {
            continue;
        }
        m.swap(rank, pivot_row);
        for r in rank + 1..m.len() {
            let factor = m[r][col] / m[rank][col];
            if factor != 0.0 {
                for c in col..cols {
                    m[r][c] -= factor * m[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank
}
