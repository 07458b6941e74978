pub mod covering;
pub mod factorization;
pub mod format;
pub mod graph;
pub mod linalg;
pub mod product;
pub mod rng;
pub mod semicolor;
pub mod spectral;
pub mod words;
