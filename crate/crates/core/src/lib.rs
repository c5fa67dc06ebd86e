pub mod bitset;
pub mod error;
pub mod ideal;
pub mod semiring;
pub mod spectrum;
pub mod localization;
pub mod sheaf;
pub mod triadic;
pub mod spectral;
pub mod fuzzy;
pub mod io;
pub mod verify;
pub mod cli;
