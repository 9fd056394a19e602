use nalgebra::{DMatrix, SymmetricEigen};

use super::{AlgebraError, Result};

/// Morse index of `±e_i` for `f = Σ_j j x_j²` restricted to `S^{2n−1}`, from the
/// eigenvalue signs of the Lagrangian Hessian on the tangent space `e_i^⊥`.
/// The Hessian of `f` is taken by central differences, the multiplier is `f(e_i)`.
pub fn morse_index_oracle(n: usize, i: usize) -> Result<usize> {
    let d = 2 * n;
    if n == 0 || i == 0 || i > d {
        return Err(AlgebraError::InvalidParameter(format!("need 1 ≤ i ≤ {d}, got {i}")));
    }
    let f = |x: &[f64]| x.iter().enumerate().map(|(j, v)| (j + 1) as f64 * v * v).sum::<f64>();
    let mut p = vec![0.0; d];
    p[i - 1] = 1.0;
    let mu = f(&p);
    let h = 1e-4;
    let mut basis = Vec::with_capacity(d - 1);
    for j in (0..d).filter(|&j| j != i - 1) {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        basis.push(e);
    }
    let second = |u: &[f64], w: &[f64]| {
        let at = |a: f64, b: f64| {
            let x: Vec<f64> = (0..d).map(|c| p[c] + a * u[c] + b * w[c]).collect();
            f(&x)
        };
        (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h)
    };
    let m = d - 1;
    let mut tangent = DMatrix::<f64>::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            let dot: f64 = basis[a].iter().zip(&basis[b]).map(|(x, y)| x * y).sum();
            tangent[(a, b)] = second(&basis[a], &basis[b]) - 2.0 * mu * dot;
        }
    }
    let eig = SymmetricEigen::new(tangent);
    if eig.eigenvalues.iter().any(|v| v.abs() < 1e-6) {
        return Err(AlgebraError::InvalidParameter("degenerate critical point".into()));
    }
    Ok(eig.eigenvalues.iter().filter(|&&v| v < 0.0).count())
}
