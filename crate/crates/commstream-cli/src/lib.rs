//! Plumbing behind the `commstream` binary: event-stream file parsing and
//! the run pipeline that turns a stream into result artifacts.

pub mod pipeline;
pub mod stream;
