//! Numerical leaf-wise intersections on centrally symmetric star-shaped hypersurfaces,
//! and the GF(2) chain complexes of equivariant Rabinowitz Floer homology of the sphere.

pub mod algebra;
pub mod solver;
pub mod symplectic;
