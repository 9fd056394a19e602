use super::{Result, SymplecticError};

/// `coeff · Π x_i^{exponents_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// A polynomial whose monomials all have even total degree, so `p(−x) = p(x)`
/// holds exactly in floating point.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenPolynomial {
    dim: usize,
    terms: Vec<Monomial>,
}

impl EvenPolynomial {
    pub fn new(dim: usize, terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if t.exponents.len() != dim {
                return Err(SymplecticError::DimensionMismatch {
                    expected: dim,
                    got: t.exponents.len(),
                });
            }
            if t.degree() % 2 != 0 {
                return Err(SymplecticError::OddMonomial(t.degree()));
            }
            if !t.coeff.is_finite() {
                return Err(SymplecticError::InvalidParameter("non-finite coefficient".into()));
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 0.0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.exponents.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>())
            .sum()
    }

    /// Adds `∇p(x)` into `grad`.
    pub fn add_gradient(&self, x: &[f64], scale: f64, grad: &mut [f64]) {
        for t in &self.terms {
            for i in 0..self.dim {
                let e = t.exponents[i];
                if e == 0 {
                    continue;
                }
                let mut partial = t.coeff * e as f64;
                for (j, (&ej, &xj)) in t.exponents.iter().zip(x).enumerate() {
                    let p = if j == i { ej - 1 } else { ej };
                    partial *= xj.powi(p as i32);
                }
                grad[i] += scale * partial;
            }
        }
    }

    /// `Σ |coeff|`, which bounds `|p|` on the unit ball.
    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }
}
