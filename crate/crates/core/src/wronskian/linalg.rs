//! Linear algebra over a differential field.

use num_rational::BigRational;
use num_traits::Zero;

use super::field::{DiffField, RankVerdict, ZeroTest};
use super::ratfunc::{Poly, RationalFunction};
use crate::error::{Error, Result};

/// Index of the best decided pivot in column `c` among rows `from..`, and
/// whether some entry could not be decided.
fn find_pivot<F: DiffField + ?Sized>(f: &F, m: &[Vec<F::Elem>], c: usize, from: usize) -> (Option<usize>, bool) {
    let mut best: Option<(usize, i64)> = None;
    let mut unknown = false;
    for (r, row) in m.iter().enumerate().skip(from) {
        match f.zero_test(&row[c]) {
            ZeroTest::NonZero => {
                let w = f.pivot_weight(&row[c]);
                if best.is_none_or(|(_, bw)| w < bw) {
                    best = Some((r, w));
                }
            }
            ZeroTest::Unknown => unknown = true,
            ZeroTest::Zero => {}
        }
    }
    (best.map(|(r, _)| r), unknown)
}

/// Subtracts multiples of row `k` from rows `from..` to clear column `c`.
fn eliminate<F: DiffField + ?Sized>(f: &F, m: &mut [Vec<F::Elem>], k: usize, c: usize, from: usize) -> Result<()> {
    let pivot = m[k][c].clone();
    for r in from..m.len() {
        if r == k || f.zero_test(&m[r][c]) == ZeroTest::Zero {
            continue;
        }
        let factor = f.div(&m[r][c], &pivot)?;
        for j in 0..m[r].len() {
            let t = f.mul(&factor, &m[k][j]);
            m[r][j] = f.sub(&m[r][j], &t);
        }
        m[r][c] = f.zero();
    }
    Ok(())
}

/// Rank by Gaussian elimination with the field's pivot preference. Columns
/// whose remaining entries are all undecided widen the reported bounds.
pub fn gauss_rank<F: DiffField + ?Sized>(f: &F, rows: &[Vec<F::Elem>]) -> RankVerdict {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut undecided = 0;
    for c in 0..cols {
        if rank == m.len() {
            break;
        }
        match find_pivot(f, &m, c, rank) {
            (Some(r), _) => {
                m.swap(rank, r);
                if eliminate(f, &mut m, rank, c, rank + 1).is_err() {
                    undecided += 1;
                    continue;
                }
                rank += 1;
            }
            (None, true) => undecided += 1,
            (None, false) => {}
        }
    }
    if undecided == 0 {
        RankVerdict::Exact(rank)
    } else {
        RankVerdict::Bounds { lower: rank, upper: (rank + undecided).min(m.len()).min(cols) }
    }
}

/// Clears the denominators of each row, giving a matrix over Q[X].
fn polynomial_rows(rows: &[Vec<RationalFunction>]) -> Vec<Vec<Poly>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(Poly::one(), |acc, x| {
                let d = x.denominator();
                let g = Poly::gcd(&acc, d);
                acc.mul(&d.divrem(&g).0)
            });
            row.iter().map(|x| x.numerator().mul(&l.divrem(x.denominator()).0)).collect()
        })
        .collect()
}

/// Rank over Q(X) by fraction-free (Bareiss) elimination on the matrix with
/// row denominators cleared. Every division in the update is exact in Q[X].
pub fn bareiss_rank(rows: &[Vec<RationalFunction>]) -> usize {
    let mut m = polynomial_rows(rows);
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = Poly::one();
    let mut k = 0;
    while k < nrows.min(ncols) {
        // any nonzero entry in the trailing block; the smallest degree keeps
        // the intermediate polynomials small
        let mut best: Option<(usize, usize, usize)> = None;
        for (r, row) in m.iter().enumerate().skip(k) {
            for (c, x) in row.iter().enumerate().skip(k) {
                if let Some(d) = x.degree() {
                    if best.is_none_or(|(_, _, bd)| d < bd) {
                        best = Some((r, c, d));
                    }
                }
            }
        }
        let Some((r, c, _)) = best else { break };
        m.swap(k, r);
        for row in m.iter_mut() {
            row.swap(k, c);
        }
        for i in k + 1..nrows {
            for j in k + 1..ncols {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                let (q, rem) = num.divrem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division is exact");
                m[i][j] = q;
            }
            m[i][k] = Poly::zero();
        }
        prev = m[k][k].clone();
        k += 1;
    }
    k
}

/// Solves Σ c_i columns[i] = target over the field. Free unknowns are set
/// to zero; an inconsistent system is an error.
pub fn solve_in_h<F: DiffField + ?Sized>(f: &F, columns: &[Vec<F::Elem>], target: &[F::Elem]) -> Result<Vec<F::Elem>> {
    let n = columns.len();
    if columns.iter().any(|c| c.len() != target.len()) {
        return Err(Error::domain("column lengths differ from the target length"));
    }
    // augmented rows [A | b]
    let mut m: Vec<Vec<F::Elem>> = (0..target.len())
        .map(|i| {
            let mut row: Vec<F::Elem> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..n {
        if rank == m.len() {
            break;
        }
        match find_pivot(f, &m, c, rank) {
            (Some(r), _) => {
                m.swap(rank, r);
                eliminate(f, &mut m, rank, c, 0)?;
                pivots.push(c);
                rank += 1;
            }
            (None, true) => return Err(Error::Indeterminate(format!("pivot in column {c} is undecided"))),
            (None, false) => {}
        }
    }
    for row in &m[rank..] {
        match f.zero_test(&row[n]) {
            ZeroTest::Zero => {}
            ZeroTest::NonZero => return Err(Error::domain("inconsistent system")),
            ZeroTest::Unknown => return Err(Error::Indeterminate("consistency of the system is undecided".into())),
        }
    }
    let mut x = vec![f.zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = f.div(&m[r][n], &m[r][c])?;
    }
    Ok(x)
}

/// Rank over Q of the coefficient vectors of rational-function vectors,
/// i.e. the dimension of their span over the constants.
pub fn constant_rank(vectors: &[Vec<RationalFunction>]) -> usize {
    let mut den = Poly::one();
    for x in vectors.iter().flatten() {
        let g = Poly::gcd(&den, x.denominator());
        den = den.mul(&x.denominator().divrem(&g).0);
    }
    let polys: Vec<Vec<Poly>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| x.numerator().mul(&den.divrem(x.denominator()).0)).collect())
        .collect();
    let deg = polys.iter().flatten().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let mut m: Vec<Vec<BigRational>> = polys
        .iter()
        .map(|v| {
            v.iter()
                .flat_map(|p| (0..deg).map(move |i| p.coeffs().get(i).cloned().unwrap_or_else(BigRational::zero)))
                .collect()
        })
        .collect();
    let width = m.iter().map(Vec::len).max().unwrap_or(0);
    for r in &mut m {
        r.resize(width, BigRational::zero());
    }
    let mut rank = 0;
    for c in 0..width {
        let Some(r) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, r);
        for i in rank + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] / &m[rank][c];
            for j in c..width {
                let t = &factor * &m[rank][j];
                m[i][j] -= t;
            }
        }
        rank += 1;
    }
    rank
}
