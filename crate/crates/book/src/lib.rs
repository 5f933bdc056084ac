//! The guide under `book/`, compiled so its snippets run as doc-tests.

#[doc = include_str!("../../../book/src/index.md")]
pub mod index {}
#[doc = include_str!("../../../book/src/syntax.md")]
pub mod syntax {}
#[doc = include_str!("../../../book/src/notation.md")]
pub mod notation {}
#[doc = include_str!("../../../book/src/render.md")]
pub mod render {}
#[doc = include_str!("../../../book/src/diff.md")]
pub mod diff {}
#[doc = include_str!("../../../book/src/infer.md")]
pub mod infer {}
#[doc = include_str!("../../../book/src/game.md")]
pub mod game {}
#[doc = include_str!("../../../book/src/levels.md")]
pub mod levels {}
#[doc = include_str!("../../../book/src/service.md")]
pub mod service {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
