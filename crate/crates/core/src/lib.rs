#![no_std]
extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod blaf;
pub mod certify;
pub mod constraint;
pub mod dsl;
pub mod epistemic;
pub mod explain;
pub mod graph;
pub mod lp;
pub mod oracle;
pub mod rational;
