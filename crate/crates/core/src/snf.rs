//! Smith normal form over ℤ with the unimodular transforms kept.
//!
//! Arithmetic is checked `i128`: the transforms grow much faster than the
//! input, and overflow is reported rather than wrapped.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `u * a * v == s`, with `u`, `v` unimodular and `s` diagonal, its
/// non-negative entries forming a divisibility chain with zeros last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: DMatrix<i128>,
    pub s: DMatrix<i128>,
    pub v: DMatrix<i128>,
}

impl SmithForm {
    /// Diagonal of `s`, of length `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<i128> {
        (0..self.s.nrows().min(self.s.ncols()))
            .map(|i| self.s[(i, i)])
            .collect()
    }
}

fn mul_sub(a: i128, q: i128, b: i128) -> Result<i128> {
    q.checked_mul(b)
        .and_then(|x| a.checked_sub(x))
        .ok_or(Error::IntegerOverflow)
}

/// row_i -= q * row_j
fn row_sub(m: &mut DMatrix<i128>, i: usize, j: usize, q: i128) -> Result<()> {
    for c in 0..m.ncols() {
        m[(i, c)] = mul_sub(m[(i, c)], q, m[(j, c)])?;
    }
    Ok(())
}

/// col_i -= q * col_j
fn col_sub(m: &mut DMatrix<i128>, i: usize, j: usize, q: i128) -> Result<()> {
    for r in 0..m.nrows() {
        m[(r, i)] = mul_sub(m[(r, i)], q, m[(r, j)])?;
    }
    Ok(())
}

pub fn smith_normal_form(a: &DMatrix<i64>) -> Result<SmithForm> {
    let (rows, cols) = a.shape();
    let mut s = a.map(i128::from);
    let mut u = DMatrix::<i128>::identity(rows, rows);
    let mut v = DMatrix::<i128>::identity(cols, cols);

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = s[(i, j)].abs();
                    if x != 0 && pivot.is_none_or(|(pi, pj)| x < s[(pi, pj)].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return Ok(SmithForm { u, s, v });
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_columns(t, pj);
            v.swap_columns(t, pj);

            let p = s[(t, t)];
            let mut dirty = false;
            for i in (t + 1)..rows {
                let q = s[(i, t)].div_euclid(p);
                if q != 0 {
                    row_sub(&mut s, i, t, q)?;
                    row_sub(&mut u, i, t, q)?;
                }
                dirty |= s[(i, t)] != 0;
            }
            for j in (t + 1)..cols {
                let q = s[(t, j)].div_euclid(p);
                if q != 0 {
                    col_sub(&mut s, j, t, q)?;
                    col_sub(&mut v, j, t, q)?;
                }
                dirty |= s[(t, j)] != 0;
            }
            if dirty {
                continue;
            }
            // pivot must divide the whole trailing block
            let offender = ((t + 1)..rows)
                .flat_map(|i| ((t + 1)..cols).map(move |j| (i, j)))
                .find(|&(i, j)| s[(i, j)] % p != 0);
            if let Some((i, _)) = offender {
                // row_t += row_i, then the loop reduces the new remainders
                row_sub(&mut s, t, i, -1)?;
                row_sub(&mut u, t, i, -1)?;
                continue;
            }
            if p < 0 {
                s.row_mut(t).neg_mut();
                u.row_mut(t).neg_mut();
            }
            break;
        }
    }
    Ok(SmithForm { u, s, v })
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &DMatrix<i64>) -> Result<i128> {
    assert!(a.is_square(), "determinant of a non-square matrix");
    let n = a.nrows();
    if n == 0 {
        return Ok(1);
    }
    let mut m: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)] as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(swap) = ((k + 1)..n).find(|&i| m[i][k] != 0) else {
                return Ok(0);
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let x = m[i][j]
                    .checked_mul(m[k][k])
                    .zip(m[i][k].checked_mul(m[k][j]))
                    .and_then(|(x, y)| x.checked_sub(y))
                    .ok_or(Error::IntegerOverflow)?;
                // exact by Sylvester's identity
                m[i][j] = x / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}
