//! Irradiation data manager: sample and experiment records kept as JSON
//! documents, an HTTP service over them, and Turtle export through the
//! ontology core.

pub mod clock;
pub mod demo;
pub mod export;
pub mod http;
pub mod model;
pub mod service;
pub mod store;

pub use clock::{Clock, ManualClock, SystemClock};
pub use service::{Service, ServiceError};
