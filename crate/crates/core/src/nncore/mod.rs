//! Dense-network engine: shared trunk, named heads, exact backpropagation.
//!
//! The engine is intentionally small — fully-connected layers with relu or
//! identity activations, trained with SGD — but the gradients are exact and
//! verified against central finite differences (see [`finite_diff_check`]).
//! Heads attach either to the trunk output (the penultimate features) or to
//! another head's logits, which is how an adversary sits on top of the final
//! classification layer.

mod checkpoint;
mod gradcheck;
mod losses;
mod net;
mod optim;

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointError, CHECKPOINT_MAGIC};
pub use gradcheck::finite_diff_check;
pub use losses::{sigmoid_bce, softmax, softmax_xent};
pub use net::{
    backward, forward, Activation, Attach, BlockId, ForwardTrace, Gradients, HeadRole, HeadSpec,
    Network, NetworkSpec, NnError, ParamBlock, TrunkLayerSpec,
};
pub use optim::{sgd_step, OptimConfig, OptimState};
