//! Unitizing and inter-rater analysis for group-cohesion annotation studies.
//!
//! Interaction timelines annotated with situational changes and utterances
//! are segmented into coding units by three families of techniques
//! ([`unitize`]), rated by human observers, and compared with the statistics
//! in [`stats`] and the report pipeline in [`analysis`].

pub mod analysis;
pub mod bundle;
pub mod model;
pub mod simulate;
pub mod stats;
pub mod time;
pub mod unitize;

pub use time::Seconds;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/timelines.md")]
    mod timelines {}
    #[doc = include_str!("../../../book/src/unitizing.md")]
    mod unitizing {}
    #[doc = include_str!("../../../book/src/reliability.md")]
    mod reliability {}
    #[doc = include_str!("../../../book/src/variance.md")]
    mod variance {}
    #[doc = include_str!("../../../book/src/ranking.md")]
    mod ranking {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/service.md")]
    mod service {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
