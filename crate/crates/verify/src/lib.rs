//! Brute-force oracles, seeded generators and the acceptance suite.

pub mod acceptance;
pub mod gen;
pub mod oracle;
