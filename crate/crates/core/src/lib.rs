//! Isotropic matroids of looped simple graphs.
//!
//! A graph `G` on `n` vertices determines the binary matroid represented by
//! `(I | A(G) | A(G)+I)` over GF(2). This crate computes its connectivity
//! parameters (ordinary, cyclic, vertical and the isotropic-system variant),
//! transverse circuits, splits and local-equivalence classes, and ships
//! exhaustive verification campaigns over small labeled graphs.

pub mod cli;
pub mod connectivity;
pub mod gf2;
pub mod graph;
pub mod harness;
pub mod isotropic;
pub mod localeq;

pub use connectivity::{analyze, kappa, kappa_b, tau_and_kappa_star, ConnectivityReport, Extended};
pub use gf2::Gf2Matrix;
pub use graph::{Graph, GraphError, VertexSet};
pub use isotropic::{ElementSet, GroundElement, IsotropicMatroid, Kind};
pub use localeq::{orbit, Family, Orbit};
