#![allow(dead_code)]

pub mod flatten_oracle;
pub mod gen;
pub mod timed_oracle;
pub mod untimed_oracle;
