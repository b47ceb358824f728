pub mod commands;
pub mod corpus;
pub mod document;
pub mod print;
pub mod report;
pub mod syntax;
