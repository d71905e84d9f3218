//! Library half of the `wbk` command-line tool: instance formats, seeded
//! instance generators, verification campaigns, and figure rendering.

pub mod campaign;
pub mod gen;
pub mod instance;
pub mod render;
