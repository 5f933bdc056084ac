//! The ZeroToHero game: levels, sessions, attempt checking and the
//! exhaustive solvability search used to audit level files.

mod levels;
mod oracle;
mod session;

pub use levels::*;
pub use oracle::*;
pub use session::*;
