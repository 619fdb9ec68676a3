//! Two-headed MLP surrogate: a field head mapping (y, ln Re, beta_p) to
//! velocity and a scalar head mapping (ln Re, beta_p) to wall shear stress.
//! Training, optimization, and the model file format live here; everything
//! runs in f64 on seeded streams.

mod net;
mod optim;
mod train;

pub use net::{Activation, Mlp, NetworkConfig};
pub use optim::{clip_grad_norm, learning_rate, AdamW, TrainConfig};
pub use train::{
    deserialize_model, load_model, predict, save_model, serialize_model, train, Normalization,
    Prediction, TrainedModel, FIELD_INPUT_DIM, SCALAR_INPUT_DIM,
};
