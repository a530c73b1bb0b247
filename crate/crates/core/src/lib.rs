pub mod dataio;
pub mod error;
pub mod linreg;
pub mod simgen;
pub mod tables;
pub mod unitroot;
pub mod ardl;
pub mod diagnostics;
pub mod pipeline;
