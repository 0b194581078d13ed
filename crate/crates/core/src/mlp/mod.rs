//! The multilayer perceptron and its training loop.

mod codec;
mod network;
mod train;

pub use codec::{TargetCodec, OUT_HI, OUT_LO};
pub use network::{em, ffm, mse, Activation, ForwardPass, MlpNetwork, INIT_SPREAD};
pub use train::{
    evaluate, irpm, irpm_with, train, train_step, Dataset, Mode, TrainConfig, TrainReport, DIVERGENCE_LIMIT,
};
