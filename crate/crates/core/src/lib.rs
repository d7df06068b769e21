#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod credence;
pub mod error;
pub mod problem;
pub mod regression;
pub mod modes;
pub mod norms;
pub mod update;

pub use error::{Error, Result};
