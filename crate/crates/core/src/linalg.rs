//! Gaussian elimination over `F_q` with a fixed pivot order.

use crate::fq::{Fe, Fq};
use crate::par;

const PAR_THRESHOLD: usize = 1 << 16;

/// Row-reduced echelon form of a dense matrix.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<Fe>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

/// Reduces `rows` (each of length `ncols`) to RREF. Pivot for column `c` is the
/// first remaining row with a nonzero entry, so the result is independent of
/// how the row updates are scheduled.
pub fn rref(fq: &Fq, mut rows: Vec<Vec<Fe>>, ncols: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut r = 0;
    let rows_len = rows.len();
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = fq.inv(rows[r][c]).expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = fq.mul(*x, inv);
        }
        let pivot_row = rows[r].clone();
        let (before, rest) = rows.split_at_mut(r);
        let after = &mut rest[1..];
        let eliminate = |row: &mut Vec<Fe>| {
            let f = row[c];
            if f.is_zero() {
                return;
            }
            for (x, &pv) in row.iter_mut().zip(&pivot_row).skip(c) {
                *x = fq.sub(*x, fq.mul(f, pv));
            }
        };
        if rows_len * ncols >= PAR_THRESHOLD {
            par::for_each_mut(before, eliminate);
            par::for_each_mut(after, eliminate);
        } else {
            before.iter_mut().for_each(eliminate);
            after.iter_mut().for_each(eliminate);
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Rref {
        rows,
        pivots,
        ncols,
    }
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of the right nullspace, one vector per free column in increasing order.
    /// Each vector has a `1` in its free column.
    pub fn nullspace(&self, fq: &Fq) -> Vec<Vec<Fe>> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Fe::ZERO; self.ncols];
                v[free] = Fe::ONE;
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = fq.neg(row[free]);
                }
                v
            })
            .collect()
    }
}

pub fn nullspace(fq: &Fq, rows: Vec<Vec<Fe>>, ncols: usize) -> Vec<Vec<Fe>> {
    rref(fq, rows, ncols).nullspace(fq)
}

pub fn mat_vec(fq: &Fq, rows: &[Vec<Fe>], v: &[Fe]) -> Vec<Fe> {
    rows.iter()
        .map(|r| {
            r.iter()
                .zip(v)
                .fold(Fe::ZERO, |acc, (&a, &b)| fq.add(acc, fq.mul(a, b)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_small() {
        let f = Fq::new(3, 1).unwrap();
        let rows = vec![vec![Fe(1), Fe(1), Fe(0)], vec![Fe(2), Fe(2), Fe(0)]];
        let ns = nullspace(&f, rows.clone(), 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&f, &rows, v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(ns[0], vec![Fe(2), Fe(1), Fe(0)]);
    }

    #[test]
    fn full_rank_has_trivial_nullspace() {
        let f = Fq::new(5, 1).unwrap();
        let rows = vec![vec![Fe(1), Fe(2)], vec![Fe(3), Fe(4)]];
        assert!(nullspace(&f, rows, 2).is_empty());
    }
}
