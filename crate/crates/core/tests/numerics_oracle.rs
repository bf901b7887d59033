//! Dense linear algebra checked against nalgebra.

use ddopt::numerics::{min_eig_gram, solve_linear, spectral_norm, symmetric_eigenvalues, Matrix};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn to_na(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn matrix(max: usize) -> impl Strategy<Value = Matrix<f64>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3.0..3.0f64, r * c)
            .prop_map(move |d| Matrix::from_row_major(r, c, d).unwrap())
    })
}

fn square(max: usize) -> impl Strategy<Value = Matrix<f64>> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(-3.0..3.0f64, n * n)
            .prop_map(move |d| Matrix::from_row_major(n, n, d).unwrap())
    })
}

fn symmetric(max: usize) -> impl Strategy<Value = Matrix<f64>> {
    square(max).prop_map(|m| {
        let n = m.rows();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)] + m[(j, i)]).collect())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    })
}

proptest! {
    #[test]
    fn spectral_norm_matches_svd(m in matrix(5)) {
        let svd = to_na(&m).svd(false, false);
        let top = svd.singular_values.max();
        prop_assert!((spectral_norm(&m).unwrap() - top).abs() <= 1e-9 * (1.0 + top));
    }

    #[test]
    fn eigenvalues_match(m in symmetric(5)) {
        let mut want: Vec<f64> = to_na(&m).symmetric_eigen().eigenvalues.iter().cloned().collect();
        want.sort_by(f64::total_cmp);
        let got = symmetric_eigenvalues(&m).unwrap();
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn min_eig_gram_matches_singular_values(m in matrix(4)) {
        let na = to_na(&m);
        let sv = na.clone().svd(false, false).singular_values;
        // full row rank with comfortable conditioning
        if m.rows() <= m.cols() && sv.min() > 0.05 * sv.max() {
            let want = sv.min() * sv.min();
            prop_assert!((min_eig_gram(&m).unwrap() - want).abs() <= 1e-9 * (1.0 + want));
        }
    }

    #[test]
    fn solve_linear_matches_lu(m in square(5), rhs in prop::collection::vec(-3.0..3.0f64, 5)) {
        let n = m.rows();
        let na = to_na(&m);
        let sv = na.clone().svd(false, false).singular_values;
        prop_assume!(sv.min() > 1e-3 * sv.max());
        let b = &rhs[..n];
        let want = na.lu().solve(&nalgebra::DVector::from_column_slice(b)).unwrap();
        let got = solve_linear(&m, b).unwrap();
        for i in 0..n {
            prop_assert!((got[i] - want[i]).abs() <= 1e-8 * (1.0 + want[i].abs()));
        }
    }
}
