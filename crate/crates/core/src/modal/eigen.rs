use nalgebra::{Complex, DMatrix, DVector, Schur};

use crate::error::{Error, Result};

type C64 = Complex<f64>;

const MAX_SCHUR_ITERATIONS: usize = 10_000;

fn check_square(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".to_string()));
    }
    Ok(())
}

/// All eigenvalues of a dense real matrix, with multiplicity.
///
/// Ordered by descending real part, then descending imaginary part, so the
/// output is independent of the Schur deflation order.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<C64>> {
    check_square(a)?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, MAX_SCHUR_ITERATIONS).ok_or_else(|| {
        Error::Numerical("Schur iteration did not converge".to_string())
    })?;
    let mut values: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    values.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    Ok(values)
}

fn complexify(a: &DMatrix<f64>) -> DMatrix<C64> {
    a.map(|v| C64::new(v, 0.0))
}

/// Eigenvector of `a` for the (approximate) eigenvalue `lambda`, by inverse
/// iteration on `a - (lambda + ε) I`. Returned with unit 2-norm.
pub fn eigenvector(a: &DMatrix<f64>, lambda: C64) -> Result<DVector<C64>> {
    check_square(a)?;
    let n = a.nrows();
    let ac = complexify(a);
    let scale = 1.0 + lambda.norm();
    let mut shift_eps = 1e-10 * scale;
    for _ in 0..6 {
        let mut shifted = ac.clone();
        let mu = lambda + C64::new(shift_eps, shift_eps);
        for i in 0..n {
            shifted[(i, i)] -= mu;
        }
        let lu = shifted.lu();
        let mut v = DVector::from_element(n, C64::new(1.0, 0.0));
        // deterministic but not aligned with any special direction
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = C64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64);
        }
        let mut ok = true;
        for _ in 0..3 {
            match lu.solve(&v) {
                Some(w) if w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
                    let norm = w.norm();
                    if norm == 0.0 {
                        ok = false;
                        break;
                    }
                    v = w.unscale(norm);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(v);
        }
        shift_eps *= 100.0;
    }
    Err(Error::Numerical(format!("inverse iteration failed for eigenvalue {lambda}")))
}

/// Left eigenvector `w` with `wᵀ a = λ wᵀ`.
pub fn left_eigenvector(a: &DMatrix<f64>, lambda: C64) -> Result<DVector<C64>> {
    eigenvector(&a.transpose(), lambda)
}

/// Normalized participation factors `|v_k w_k| / Σ_j |v_j w_j|` of each state
/// in the mode `lambda`. `None` if the left and right eigenvectors are
/// (numerically) orthogonal, which signals a defective eigenvalue.
pub fn participation_factors(a: &DMatrix<f64>, lambda: C64) -> Result<Option<Vec<f64>>> {
    let v = eigenvector(a, lambda)?;
    let w = left_eigenvector(a, lambda)?;
    let overlap: C64 = v.iter().zip(w.iter()).map(|(x, y)| x * y).sum();
    if overlap.norm() < 1e-8 {
        return Ok(None);
    }
    let raw: Vec<f64> = v.iter().zip(w.iter()).map(|(x, y)| (x * y).norm()).collect();
    let total: f64 = raw.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Ok(None);
    }
    Ok(Some(raw.into_iter().map(|p| p / total).collect()))
}
