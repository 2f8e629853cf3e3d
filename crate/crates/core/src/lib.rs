//! Certified enclosures of lattice spectral series, a machine check of the
//! Euler–Maclaurin case analysis behind `I_p(m) < 1`, a real spherical
//! harmonic basis on the 2-sphere, and numerical experiments on Lieb–Thirring
//! and Gagliardo–Nirenberg type inequalities for H¹-orthonormal families.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod em_certifier;
pub mod em_tail;
pub mod error;
pub mod inequality_lab;
pub mod par;
pub mod quadrature;
pub mod spectral_series;
pub mod sphere_basis;
pub mod summation;

pub use error::{Error, Result};
