//! Differential spectra of power functions over finite fields of odd
//! characteristic.

pub mod gf;
pub mod numth;
pub mod spectra;
pub mod chain;
pub mod cli;
pub mod equiv;
