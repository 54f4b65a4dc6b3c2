//! Linking of bioinformatics tool mentions between the article that
//! describes a workflow and the workflow's executable code.

pub mod kb;
pub mod corpus;
pub mod ner;
pub mod linker;
pub mod eval;
pub mod pipeline;
