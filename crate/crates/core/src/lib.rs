pub mod answering;
pub mod config;
pub mod error;
pub mod eval;
pub mod forge;
pub mod http;
pub mod retrieval;
pub mod store;
pub mod strategy;
pub mod temporal;
pub mod tempex;
pub mod text;
pub mod understanding;
pub mod verify;

pub use error::{Error, Result};
