//! Command line front end and HTTP service for the `gifpo` library.

pub mod cli;
pub mod server;
