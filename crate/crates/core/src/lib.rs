pub mod dd;
pub mod error;
pub mod functions;
pub mod oracle;
pub mod ppoly;
pub mod pipelines;
pub mod quadrature;
pub mod scan;
pub mod verify;
