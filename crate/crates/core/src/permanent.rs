//! Exact matrix permanents.
//!
//! Two evaluators: `permanent_ryser` (inclusion–exclusion over column
//! subsets, Gray-code ordered so each subset step costs O(n)) for real use,
//! and `permanent_naive` (direct expansion over all n! permutations) as an
//! independent cross-validation oracle. Both guard their exponential cost
//! with hard size limits rather than silently grinding.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Largest size accepted by the Ryser evaluator (2^30 subsets ≈ 1e9).
pub const RYSER_MAX_SIZE: usize = 30;
/// Largest size accepted by the permutation-sum oracle (9! ≈ 3.6e5).
pub const NAIVE_MAX_SIZE: usize = 9;

fn require_square(a: &ComplexMatrix, what: &str) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "{what} requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.rows())
}

/// Permanent via Ryser's formula,
///
///   Per(A) = (−1)^n · Σ_{∅ ≠ S ⊆ {1..n}} (−1)^{|S|} · ∏_i Σ_{j∈S} a_ij,
///
/// visiting subsets in Gray-code order so that each step toggles a single
/// column in the running row sums (O(2^n·n) arithmetic overall).
pub fn permanent_ryser(a: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(a, "permanent")?;
    if n > RYSER_MAX_SIZE {
        return Err(Error::SizeLimit(format!(
            "permanent size {n} exceeds the Ryser guard of {RYSER_MAX_SIZE}"
        )));
    }

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut popcount: u32 = 0;

    // Subset k is represented by the Gray code of k; consecutive codes
    // differ in exactly bit (k.trailing_zeros()), which we toggle in the
    // row sums.
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        let gray = k ^ (k >> 1);
        let added = gray >> bit & 1 == 1;
        if added {
            popcount += 1;
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum += a.get(i, bit);
            }
        } else {
            popcount -= 1;
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum -= a.get(i, bit);
            }
        }
        let product: Complex64 = row_sums.iter().product();
        if popcount.is_multiple_of(2) {
            total += product;
        } else {
            total -= product;
        }
    }

    if n % 2 == 0 {
        Ok(total)
    } else {
        Ok(-total)
    }
}

/// Permanent as the literal sum over all n! permutations, expanded
/// recursively row by row with a bitmask of used columns. Exists purely to
/// cross-check `permanent_ryser`.
pub fn permanent_naive(a: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(a, "permanent")?;
    if n > NAIVE_MAX_SIZE {
        return Err(Error::SizeLimit(format!(
            "permanent size {n} exceeds the permutation-sum guard of {NAIVE_MAX_SIZE}"
        )));
    }

    fn expand(a: &ComplexMatrix, row: usize, used_cols: u32) -> Complex64 {
        let n = a.rows();
        if row == n {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..n {
            if used_cols >> col & 1 == 0 {
                acc += a.get(row, col) * expand(a, row + 1, used_cols | 1 << col);
            }
        }
        acc
    }

    Ok(expand(a, 0, 0))
}
