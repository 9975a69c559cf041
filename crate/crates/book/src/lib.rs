//! mdbook cannot run listings that depend on workspace crates, so each
//! chapter is included here as a module doc and `cargo test --doc` runs it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/hamiltonians.md")]
pub mod hamiltonians {}
#[doc = include_str!("../../../book/src/evaluator.md")]
pub mod evaluator {}
#[doc = include_str!("../../../book/src/opt1d.md")]
pub mod opt1d {}
#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}
#[doc = include_str!("../../../book/src/ladder.md")]
pub mod ladder {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
