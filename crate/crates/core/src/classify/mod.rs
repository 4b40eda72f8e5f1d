//! Nearest-neighbour classification over C2 features, ROC accuracy and the
//! model file.

mod eval;
pub mod format;
mod nn;
mod roc;

pub use eval::{ClassRoc, Evaluation};
pub use format::{
    decode_model, encode_model, load_model, save_model, FormatError, FORMAT_VERSION, MAGIC,
};
pub use nn::{nn_predict, ModelConfig, NNModel, Prediction, Standardizer};
pub use roc::roc_accuracy;
