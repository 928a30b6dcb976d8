use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = Mat<Complex64>;

/// Singular values of `matrix`, non-negative and sorted descending.
pub fn svd_spectrum(matrix: &ComplexMatrix) -> Result<Vec<f64>> {
    let (rows, cols) = (matrix.nrows(), matrix.ncols());
    if rows == 0 || cols == 0 {
        return Err(Error::domain("cannot decompose an empty matrix"));
    }
    for j in 0..cols {
        for i in 0..rows {
            let v = matrix[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::domain(format!("matrix entry ({i}, {j}) is not finite")));
            }
        }
    }
    let mut values = matrix
        .singular_values()
        .map_err(|e| Error::domain(format!("singular value decomposition failed: {e:?}")))?;
    values.iter_mut().for_each(|v| *v = v.max(0.0));
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}
