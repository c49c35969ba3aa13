use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;

use crate::error::{Error, Result};

/// Centered linear projection onto the leading principal axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaTransform {
    /// `[p, m]`, orthonormal columns.
    pub components: Array2<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub means: Vec<f64>,
}

impl PcaTransform {
    pub fn n_components(&self) -> usize {
        self.components.ncols()
    }

    pub fn apply(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        pca_apply(x, self)
    }
}

/// Top-`m` eigenvectors of the sample covariance. Uses the `n × n` Gram
/// matrix when there are more columns than rows. Each component's sign is
/// fixed so its largest-magnitude entry is positive.
pub fn pca_fit(x: &Array2<f64>, m: usize) -> Result<PcaTransform> {
    let (n, p) = x.dim();
    if n < 2 {
        return Err(Error::invalid_arg("PCA needs at least two rows"));
    }
    if m == 0 || m > (n - 1).min(p) {
        return Err(Error::invalid_arg(format!(
            "PCA components must lie in 1..={}, got {m}",
            (n - 1).min(p)
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid_arg("PCA input contains non-finite values"));
    }
    let means: Vec<f64> = (0..p).map(|j| x.column(j).sum() / n as f64).collect();
    let xc = DMatrix::from_fn(n, p, |i, j| x[[i, j]] - means[j]);
    let denom = (n - 1) as f64;
    let total_var: f64 = xc.iter().map(|v| v * v).sum::<f64>() / denom;

    let (values, vectors) = if p <= n {
        let cov = xc.transpose() * &xc / denom;
        let eig = SymmetricEigen::new(cov);
        (eig.eigenvalues, eig.eigenvectors)
    } else {
        let gram = &xc * xc.transpose() / denom;
        let eig = SymmetricEigen::new(gram);
        // u = Xcᵀ v / sqrt(λ (n − 1))
        let mut u = xc.transpose() * &eig.eigenvectors;
        for (k, mut col) in u.column_iter_mut().enumerate() {
            let lam = eig.eigenvalues[k];
            let norm = (lam.max(0.0) * denom).sqrt();
            if norm > 0.0 {
                col /= norm;
            } else {
                col.fill(0.0);
            }
        }
        (eig.eigenvalues, u)
    };

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut components = Array2::zeros((p, m));
    let mut ratios = Vec::with_capacity(m);
    for (c, &k) in order.iter().take(m).enumerate() {
        let col = vectors.column(k);
        let pivot = col.iter().copied().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for j in 0..p {
            components[[j, c]] = sign * col[j];
        }
        let lam = values[k].max(0.0);
        ratios.push(if total_var > 0.0 { lam / total_var } else { 0.0 });
    }
    if components.iter().any(|v: &f64| !v.is_finite()) {
        return Err(Error::numerical("PCA eigendecomposition produced non-finite values"));
    }
    Ok(PcaTransform {
        components,
        explained_variance_ratio: ratios,
        means,
    })
}

pub fn pca_apply(x: &Array2<f64>, t: &PcaTransform) -> Result<Array2<f64>> {
    if x.ncols() != t.means.len() {
        return Err(Error::invalid_arg(format!(
            "PCA fitted on {} columns, got {}",
            t.means.len(),
            x.ncols()
        )));
    }
    let mut xc = x.clone();
    for mut row in xc.rows_mut() {
        for (v, m) in row.iter_mut().zip(&t.means) {
            *v -= m;
        }
    }
    Ok(xc.dot(&t.components))
}
