//! File formats, rule editing, the consultation service and the command line
//! around [`mkbs_core`].

pub mod answers;
pub mod cli;
pub mod editor;
pub mod kbfile;
pub mod service;

pub use editor::{Edit, EditError, KbStore, Snapshot};
pub use service::{ApiError, Service, ServiceConfig};
