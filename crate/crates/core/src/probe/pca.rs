use super::ProbeError;
use serde::{Deserialize, Serialize};

/// Principal components of a set of vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    /// k orthonormal directions, each of the input dimension.
    pub components: Vec<Vec<f64>>,
    /// Projected coordinates per input vector (n x k).
    pub coordinates: Vec<Vec<f64>>,
    /// Variance captured by each component, non-increasing.
    pub explained_variance: Vec<f64>,
}

/// Mean-centered PCA by eigendecomposition of the covariance.
///
/// When the dimension exceeds the sample count the decomposition runs on the
/// (smaller) Gram matrix of the centered data instead; the results are
/// identical. The sign of each component is fixed so its largest-magnitude
/// coordinate is positive, making the output deterministic.
pub fn pca_project(vectors: &[Vec<f64>], k: usize) -> Result<ProjectionResult, ProbeError> {
    let n = vectors.len();
    if n < 2 {
        return Err(ProbeError::Argument(format!(
            "pca needs at least 2 vectors, got {n}"
        )));
    }
    let dim = vectors[0].len();
    for v in vectors {
        if v.len() != dim {
            return Err(ProbeError::Shape(format!(
                "vector of length {} in a set of dimension {dim}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(ProbeError::Data("non-finite vector entry".into()));
        }
    }
    if k == 0 || k > n - 1 || k > dim {
        return Err(ProbeError::Argument(format!(
            "k = {k} out of range (1 ..= min(n-1, dim) = {})",
            (n - 1).min(dim)
        )));
    }

    // Center.
    let mut mean = vec![0.0f64; dim];
    for v in vectors {
        for (m, &x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centered: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(&mean).map(|(&x, &m)| x - m).collect())
        .collect();

    let denom = (n - 1) as f64;
    let mut components: Vec<Vec<f64>>;
    let mut eigenvalues: Vec<f64>;

    if dim <= n {
        // Covariance route: C = X^T X / (n-1), dim x dim.
        let mut cov = vec![0.0f64; dim * dim];
        for row in &centered {
            for i in 0..dim {
                for j in i..dim {
                    cov[i * dim + j] += row[i] * row[j];
                }
            }
        }
        for i in 0..dim {
            for j in i..dim {
                let v = cov[i * dim + j] / denom;
                cov[i * dim + j] = v;
                cov[j * dim + i] = v;
            }
        }
        let (vals, vecs) = jacobi_eigen(&cov, dim);
        eigenvalues = vals;
        components = vecs;
    } else {
        // Gram route: G = X X^T, n x n shares nonzero eigenvalues with X^T X.
        let mut gram = vec![0.0f64; n * n];
        for a in 0..n {
            for b in a..n {
                let dot: f64 = centered[a].iter().zip(&centered[b]).map(|(x, y)| x * y).sum();
                gram[a * n + b] = dot;
                gram[b * n + a] = dot;
            }
        }
        let (vals, vecs) = jacobi_eigen(&gram, n);
        let scale = vals.first().copied().unwrap_or(0.0).abs().max(1.0);
        eigenvalues = Vec::with_capacity(k);
        components = Vec::with_capacity(k);
        for (idx, &mu) in vals.iter().enumerate().take(k) {
            eigenvalues.push(mu / denom);
            if mu > scale * 1e-12 {
                // Map the Gram eigenvector back: v = X^T u / sqrt(mu).
                let u = &vecs[idx];
                let mut v = vec![0.0f64; dim];
                for (a, row) in centered.iter().enumerate() {
                    for (vj, &xj) in v.iter_mut().zip(row) {
                        *vj += u[a] * xj;
                    }
                }
                let norm = mu.sqrt();
                v.iter_mut().for_each(|x| *x /= norm);
                components.push(v);
            } else {
                // Zero-variance direction: deterministic orthonormal filler.
                eigenvalues[idx] = 0.0;
                let v = orthonormal_filler(&components, dim)?;
                components.push(v);
            }
        }
    }

    components.truncate(k);
    eigenvalues.truncate(k);
    // Numerical floor: covariance eigenvalues are non-negative in theory.
    for e in eigenvalues.iter_mut() {
        if *e < 0.0 && *e > -1e-12 {
            *e = 0.0;
        }
    }

    // Deterministic sign: the largest-magnitude coordinate is positive.
    for c in components.iter_mut() {
        let lead = c
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| {
                a.abs()
                    .partial_cmp(&b.abs())
                    .unwrap()
                    .then(j.cmp(i)) // first occurrence wins ties
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        if c[lead] < 0.0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
    }

    let coordinates = centered
        .iter()
        .map(|row| {
            components
                .iter()
                .map(|c| row.iter().zip(c).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect();

    Ok(ProjectionResult {
        components,
        coordinates,
        explained_variance: eigenvalues,
    })
}

/// First canonical basis vector orthogonalized against the accepted
/// components with a usable residual.
fn orthonormal_filler(components: &[Vec<f64>], dim: usize) -> Result<Vec<f64>, ProbeError> {
    for axis in 0..dim {
        let mut v = vec![0.0f64; dim];
        v[axis] = 1.0;
        for c in components {
            let proj: f64 = v.iter().zip(c).map(|(x, y)| x * y).sum();
            for (vj, &cj) in v.iter_mut().zip(c) {
                *vj -= proj * cj;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            return Ok(v);
        }
    }
    Err(ProbeError::Data(
        "could not complete an orthonormal basis".into(),
    ))
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns (eigenvalues, eigenvectors) sorted by descending eigenvalue;
/// eigenvectors are rows.
fn jacobi_eigen(matrix: &[f64], m: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut a = matrix.to_vec();
    let mut v = vec![0.0f64; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            for j in (i + 1)..m {
                s += a[i * m + j] * a[i * m + j];
            }
        }
        s
    };
    let scale: f64 = (0..m).map(|i| a[i * m + i].abs()).fold(1e-300, f64::max);
    let tol = (scale * 1e-15) * (scale * 1e-15) * m as f64 * m as f64;

    for _sweep in 0..64 {
        if off(&a) <= tol {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..m {
                    let aip = a[i * m + p];
                    let aiq = a[i * m + q];
                    a[i * m + p] = c * aip - s * aiq;
                    a[i * m + q] = s * aip + c * aiq;
                }
                for j in 0..m {
                    let apj = a[p * m + j];
                    let aqj = a[q * m + j];
                    a[p * m + j] = c * apj - s * aqj;
                    a[q * m + j] = s * apj + c * aqj;
                }
                for i in 0..m {
                    let vip = v[i * m + p];
                    let viq = v[i * m + q];
                    v[i * m + p] = c * vip - s * viq;
                    v[i * m + q] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        a[j * m + j]
            .partial_cmp(&a[i * m + i])
            .unwrap()
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * m + i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..m).map(|row| v[row * m + col]).collect())
        .collect();
    (eigenvalues, eigenvectors)
}
