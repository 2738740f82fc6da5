pub mod charmod;
pub mod cli;
pub mod exactfield;
pub mod ingest;
pub mod interval;
pub mod linsys;
pub mod operators;
pub mod pipeline;
pub mod quadform;
pub mod restrict;
