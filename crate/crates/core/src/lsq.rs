//! Small dense linear least squares through the normal equations.
//!
//! Every model fitted in this crate is linear in at most three parameters, so
//! an `N × N` Gram matrix with column equilibration and partially pivoted
//! elimination is all that is needed.

use crate::error::{Error, Result};

/// Pivots below this (on the unit-diagonal Gram matrix) mean rank deficiency.
const RANK_TOL: f64 = 1e-10;

/// Solves `min ‖X c − y‖²` for the design rows `X` and targets `y`.
pub fn least_squares<const N: usize>(design: &[[f64; N]], targets: &[f64]) -> Result<[f64; N]> {
    if design.len() != targets.len() {
        return Err(Error::Domain(format!(
            "design has {} rows but {} targets",
            design.len(),
            targets.len()
        )));
    }
    if design.len() < N {
        return Err(Error::Underdetermined(format!(
            "{} samples for {N} parameters",
            design.len()
        )));
    }

    let mut norms = [0.0; N];
    for row in design {
        for j in 0..N {
            norms[j] += row[j] * row[j];
        }
    }
    for (j, n) in norms.iter_mut().enumerate() {
        *n = n.sqrt();
        if *n == 0.0 || !n.is_finite() {
            return Err(Error::Underdetermined(format!("design column {j} is zero")));
        }
    }
    let largest = norms.iter().cloned().fold(0.0, f64::max);
    if let Some(j) = norms.iter().position(|&n| n < RANK_TOL * largest) {
        return Err(Error::Underdetermined(format!(
            "design column {j} vanishes relative to the others"
        )));
    }

    let mut gram = [[0.0; N]; N];
    let mut rhs = [0.0; N];
    for (row, &y) in design.iter().zip(targets) {
        let scaled: [f64; N] = std::array::from_fn(|j| row[j] / norms[j]);
        for i in 0..N {
            rhs[i] += scaled[i] * y;
            for j in i..N {
                gram[i][j] += scaled[i] * scaled[j];
            }
        }
    }
    for i in 0..N {
        for j in 0..i {
            gram[i][j] = gram[j][i];
        }
    }

    let solved = solve(gram, rhs)?;
    Ok(std::array::from_fn(|j| solved[j] / norms[j]))
}

fn solve<const N: usize>(mut a: [[f64; N]; N], mut b: [f64; N]) -> Result<[f64; N]> {
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[pivot][col].abs() < RANK_TOL {
            return Err(Error::Underdetermined(
                "design matrix is rank deficient".into(),
            ));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let factor = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let tail: f64 = (row + 1..N).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quadratic() {
        let xs: Vec<f64> = (0..7).map(|i| i as f64 - 3.0).collect();
        let design: Vec<[f64; 3]> = xs.iter().map(|&x| [x * x, x, 1.0]).collect();
        let y: Vec<f64> = xs.iter().map(|&x| 2.0 * x * x - 0.5 * x + 7.0).collect();
        let c = least_squares(&design, &y).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-13);
        assert!((c[1] + 0.5).abs() < 1e-13);
        assert!((c[2] - 7.0).abs() < 1e-13);
    }

    #[test]
    fn overdetermined_line_with_residual() {
        let design = [[0.0, 1.0], [1.0, 1.0], [2.0, 1.0]];
        let y = [0.0, 2.0, 1.0];
        let c = least_squares(&design, &y).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-14);
        assert!((c[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rank_deficiency_detected() {
        let design = [[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]];
        assert!(matches!(
            least_squares(&design, &[1.0, 2.0, 3.0]),
            Err(Error::Underdetermined(_))
        ));
        assert!(matches!(
            least_squares(&[[1.0, 0.0]], &[1.0]),
            Err(Error::Underdetermined(_))
        ));
        assert!(least_squares(&[[0.0], [0.0]], &[1.0, 2.0]).is_err());
    }
}
