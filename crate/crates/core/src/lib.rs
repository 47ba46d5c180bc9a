pub mod asymptotic;
pub mod certify;
pub mod model;
pub mod pattern;
pub mod pipeline;
pub mod recovery;
pub mod reduction;
pub mod reproduce;
pub mod scalar;
pub mod search;
pub mod weights;
