//! Quadratic forms, exact form-preserving matrix groups, HNN word reduction
//! and ping-pong certification in the hyperboloid model.

pub mod grouppres;
pub mod hypgeom;
pub mod io;
pub mod lattice;
pub mod pipeline;
pub mod qforms;
