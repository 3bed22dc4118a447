use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense least-squares solution with a conditioning diagnostic.
#[derive(Debug, Clone)]
pub(crate) struct LeastSquares {
    pub x: DVector<f64>,
    /// Ratio of extreme pivots (QR) or singular values (SVD) after column
    /// scaling.
    pub condition: f64,
    pub rank: usize,
}

/// Minimizes `‖A x − b‖₂` by Householder QR on the column-scaled matrix,
/// falling back to a truncated SVD when the pivots drop below
/// `cutoff · max pivot`.
pub(crate) fn solve_least_squares(
    mut a: DMatrix<f64>,
    b: &DVector<f64>,
    cutoff: f64,
    max_rank_deficiency: usize,
) -> Result<LeastSquares> {
    let n = a.ncols();
    if a.nrows() < n {
        return Err(Error::Config("underdetermined collocation system"));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned { rank: 0, columns: n });
    }
    let scales: Vec<f64> = a
        .column_iter()
        .map(|c| {
            let norm = c.norm();
            if norm > 0.0 { 1.0 / norm } else { 1.0 }
        })
        .collect();
    for (j, s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(*s);
    }

    let qr = a.clone().qr();
    let r = qr.r();
    let pivots: Vec<f64> = (0..n).map(|i| r[(i, i)].abs()).collect();
    let max_pivot = pivots.iter().cloned().fold(0.0, f64::max);
    let min_pivot = pivots.iter().cloned().fold(f64::INFINITY, f64::min);

    let (mut x, condition, rank) = if min_pivot > cutoff * max_pivot {
        let qtb = qr.q().transpose() * b;
        let x = r
            .solve_upper_triangular(&qtb)
            .ok_or(Error::IllConditioned { rank: 0, columns: n })?;
        (x, max_pivot / min_pivot, n)
    } else {
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let threshold = cutoff * smax;
        let rank = svd.singular_values.iter().filter(|&&s| s > threshold).count();
        if rank + max_rank_deficiency < n {
            return Err(Error::IllConditioned { rank, columns: n });
        }
        let smin = svd
            .singular_values
            .iter()
            .cloned()
            .filter(|&s| s > threshold)
            .fold(f64::INFINITY, f64::min);
        let x = svd
            .solve(b, threshold)
            .map_err(|_| Error::IllConditioned { rank, columns: n })?;
        (x, smax / smin, rank)
    };
    for (j, s) in scales.iter().enumerate() {
        x[j] *= s;
    }
    Ok(LeastSquares { x, condition, rank })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_solution_of_consistent_system() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1e6, 1.0, 1e6, 2.0, -1e6]);
        let x = DVector::from_vec(alloc::vec![0.5, -3e-6]);
        let b = &a * &x;
        let sol = solve_least_squares(a, &b, 1e-13, 0).unwrap();
        assert!((sol.x - x).norm() < 1e-15);
        assert_eq!(sol.rank, 2);
    }

    #[test]
    fn rank_deficient_system_falls_back_to_svd() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let b = DVector::from_vec(alloc::vec![2.0, 4.0, 6.0]);
        assert!(matches!(
            solve_least_squares(a.clone(), &b, 1e-13, 0),
            Err(Error::IllConditioned { rank: 1, columns: 2 })
        ));
        let sol = solve_least_squares(a, &b, 1e-13, 1).unwrap();
        assert_eq!(sol.rank, 1);
        assert!((sol.x[0] - 1.0).abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
    }
}
