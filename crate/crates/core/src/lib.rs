pub mod active;
pub mod analysis;
pub mod corpus;
pub mod defaults;
pub mod disambiguate;
pub mod discovery;
pub mod envdata;
pub mod exec;
pub mod parsers;
pub mod pipeline;
pub mod synth;
