//! GeckoGraph: a graphical notation for polymorphic type signatures, and the
//! ZeroToHero type-composition game built on top of it.
//!
//! The crate is organised bottom-up:
//!
//! - [`syntax`] parses and prints signatures; [`kind`] infers variable kinds.
//! - [`layout`] turns a [`Scheme`](syntax::Scheme) into a geometric
//!   [`LayoutNode`](layout::LayoutNode) tree; [`palette`] assigns colors.
//! - [`render`] emits SVG or ANSI terminal output.
//! - [`diff`] aligns two signatures and classifies where they differ.
//! - [`infer`] is a Hindley–Milner engine for the game's expression language.
//! - [`game`] holds levels, sessions, the event log and the solvability search.

pub mod diff;
pub mod game;
pub mod infer;
pub mod kind;
pub mod layout;
pub mod palette;
pub mod path;
pub mod render;
pub mod syntax;

pub use path::SourcePath;
pub use syntax::{parse_scheme, print_scheme, Scheme, TypeExpr};
