pub mod arcset;
pub mod error;
pub mod linalg;
pub mod loss;
pub mod space;
pub mod weak;
pub mod weights;
pub mod baselines;
pub mod disambig;
pub mod infer;
pub mod data;
pub mod model;
pub mod bench;
