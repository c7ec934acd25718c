pub mod corpus;
pub mod psl;
pub mod scalar;
pub mod segmenter;
