//! Paramodular forms of degree 2: Fourier expansions, the Gritsenko lift,
//! the Maass relations and Hecke operators.

pub mod cli;
pub mod eisenstein;
pub mod hecke;
pub mod io;
pub mod jacobi;
pub mod maass;
pub mod matrix;
pub mod ntheory;
pub mod paramod;
