//! Ideal triangulations of cusped hyperbolic 3-manifolds, drilled ananas
//! trees, lattice horoball packings, iterated coning and congruence tools.

pub mod ananas;
pub mod canonical;
pub mod coning;
pub mod congruence;
pub mod farey;
pub mod hypgeom;
pub mod triangulation;
pub mod svg;
