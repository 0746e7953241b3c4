pub mod bigreal;
pub mod chebyshev;
pub mod modfield;
pub mod protocols;
pub mod qc_cost;
pub mod sampling;
pub mod wire;
