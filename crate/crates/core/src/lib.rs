pub mod claims;
pub mod cli;
pub mod exactalg;
pub mod factorize;
pub mod guard;
pub mod kneser;
pub mod oracles;
pub mod polyrep;
pub mod subspaces;
