//! Case files, belief tables, what-if sessions and the HTTP service built on
//! [`lexarg_core`].

pub mod bundled;
pub mod case_file;
pub mod check;
pub mod http;
pub mod payload;
pub mod repl;
pub mod service;
pub mod session;
pub mod table;
