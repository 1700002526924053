pub mod coxeter;
pub mod hecke;
pub mod homotopy;
pub mod mixclass;
pub mod ring;
