//! Pipeline driver and HTTP query service for lsim indexes.

pub mod commands;
pub mod http;
pub mod service;

pub use service::{QueryRequest, QueryResponse, Service, ServiceError};
