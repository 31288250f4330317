//! Command line and HTTP front ends for lawmap.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod server;
pub mod session;

pub use catalog::{Catalog, MapEntry};
pub use cli::run_cli;
pub use server::{router, AppState};
pub use session::{Session, SessionStore};
