use std::collections::HashMap;

use super::{AlgebraError, Branch, Generator, GradedComplexGF2, Result, PAPER_QUANTUM};

/// `δ y_l = y_{l−1} + z_{l−1} = δ z_l`, where `y_l, z_l` are the critical points `±e_{l+1}`.
pub fn sphere_morse_complex(n: usize) -> Result<GradedComplexGF2> {
    if n == 0 {
        return Err(AlgebraError::InvalidParameter("n must be positive".into()));
    }
    let mut gens = Vec::with_capacity(4 * n);
    let mut boundary = Vec::with_capacity(4 * n);
    push_sphere(n, 0, PAPER_QUANTUM, &mut gens, &mut boundary);
    GradedComplexGF2::new(n, gens, boundary)
}

/// Appends `y_l^k, z_l^k` in the order `y_0, z_0, y_1, z_1, …` with the interior differential.
fn push_sphere(n: usize, k: i64, quantum: f64, gens: &mut Vec<Generator>, boundary: &mut Vec<Vec<usize>>) {
    let offset = gens.len();
    for l in 0..2 * n {
        for branch in [Branch::Y, Branch::Z] {
            gens.push(Generator::new(n, k, l, branch, quantum));
            boundary.push(if l == 0 { Vec::new() } else { vec![offset + 2 * (l - 1), offset + 2 * (l - 1) + 1] });
        }
    }
}

/// Rung coefficients of the ladder and the action quantum of its labels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderOptions {
    /// Coefficient of `y_{2n−1}^k` in `∂ y_0^{k+1}` and `∂ z_0^{k+1}`.
    pub a: bool,
    /// Coefficient of `z_{2n−1}^k`.
    pub b: bool,
    pub quantum: f64,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self { a: true, b: true, quantum: PAPER_QUANTUM }
    }
}

pub fn rabinowitz_ladder(n: usize, window: i64) -> Result<GradedComplexGF2> {
    rabinowitz_ladder_with(n, window, LadderOptions::default())
}

/// Generators `y_l^k, z_l^k` for `|k| ≤ K`, `0 ≤ l < 2n`, in degree `l + 2nk`. Within each
/// `C_k` the differential is the Morse differential; across rungs
/// `∂ y_0^{k+1} = ∂ z_0^{k+1} = a y_{2n−1}^k + b z_{2n−1}^k`.
pub fn rabinowitz_ladder_with(n: usize, window: i64, opts: LadderOptions) -> Result<GradedComplexGF2> {
    if n == 0 || window < 1 {
        return Err(AlgebraError::InvalidParameter(format!("need n ≥ 1 and K ≥ 1, got n = {n}, K = {window}")));
    }
    let block = 4 * n;
    let mut gens = Vec::new();
    let mut boundary = Vec::new();
    for k in -window..=window {
        let offset = gens.len();
        push_sphere(n, k, opts.quantum, &mut gens, &mut boundary);
        if k > -window {
            let top = offset - block + 2 * (2 * n - 1);
            let mut rung = Vec::new();
            if opts.a {
                rung.push(top);
            }
            if opts.b {
                rung.push(top + 1);
            }
            boundary[offset] = rung.clone();
            boundary[offset + 1] = rung;
        }
    }
    let d = 2 * n as i64;
    let boundary_degrees = vec![-d * window, d * window + d - 1];
    Ok(GradedComplexGF2::new(n, gens, boundary)?.with_window(window, boundary_degrees))
}

/// Quotient by the involution `y_l^k ↔ z_l^k`: one `ξ_l^k` per orbit with `∂[x] = [∂x]`.
pub fn quotient_by_involution(complex: &GradedComplexGF2) -> Result<GradedComplexGF2> {
    let gens = complex.generators();
    let index: HashMap<(i64, usize, Branch), usize> = gens.iter().enumerate().map(|(i, g)| ((g.k, g.l, g.branch), i)).collect();
    let mut partner = vec![0; gens.len()];
    for (i, g) in gens.iter().enumerate() {
        let other = match g.branch {
            Branch::Y => Branch::Z,
            Branch::Z => Branch::Y,
            Branch::Xi => return Err(AlgebraError::NotFree(g.to_string())),
        };
        partner[i] = *index.get(&(g.k, g.l, other)).ok_or_else(|| AlgebraError::NotFree(g.to_string()))?;
    }
    for (i, &p) in partner.iter().enumerate() {
        let mut image: Vec<usize> = complex.boundary(i).iter().map(|&j| partner[j]).collect();
        image.sort_unstable();
        if image != complex.boundary(p) {
            return Err(AlgebraError::NotChainMap(gens[i].to_string()));
        }
    }
    let mut orbit = vec![usize::MAX; gens.len()];
    let mut quotient = Vec::new();
    let mut reps = Vec::new();
    for i in 0..gens.len() {
        if orbit[i] == usize::MAX {
            orbit[i] = quotient.len();
            orbit[partner[i]] = quotient.len();
            let g = &gens[i];
            quotient.push(Generator { branch: Branch::Xi, ..g.clone() });
            reps.push(i);
        }
    }
    let boundary = reps.iter().map(|&i| complex.boundary(i).iter().map(|&j| orbit[j]).collect()).collect();
    let q = GradedComplexGF2::new(complex.n(), quotient, boundary)?;
    Ok(match complex.window() {
        Some(k) => q.with_window(k, complex.boundary_degrees().to_vec()),
        None => q,
    })
}
