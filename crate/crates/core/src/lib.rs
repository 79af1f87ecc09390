//! SONC lower bounds for polynomial optimization.

pub mod bnb;
pub mod certificates;
pub mod generate;
pub mod gp;
pub mod interval;
pub mod io;
pub mod oracle;
pub mod pbc;
pub mod poly;
pub mod relax;
pub mod report;
