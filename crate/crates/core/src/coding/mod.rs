//! Block codes with ML decoders, plus the constructions that turn one-way
//! codes into two-way coding schemes.

mod block;
mod cancellation;
mod dbc;
mod mac;
mod schemes;

pub use block::{random_coset_code, BlockCode, Codebook, CodebookSeed, Decoder};
pub use cancellation::{cancellation_scheme, CancellingSender, IdentityReceiver};
pub use dbc::{superposition_code, DbcCode};
pub use mac::{mac_joint_ml_code, MacCodePair, DEFAULT_PAIR_CAP};
pub use schemes::{
    compose_2twc, compose_madbc, lift_nonadaptive, lift_sequence, Corruption, HubUser, MacUser,
    NonAdaptiveScheme,
};

/// Log-likelihoods closer than this are ties, resolved toward the smallest
/// index. Paths that are equally likely in exact arithmetic often differ by a
/// few ulps once their factors are logged and summed in different orders.
pub const TIE_TOLERANCE: f64 = 1e-9;

fn beats(score: f64, best: f64) -> bool {
    score > best + TIE_TOLERANCE
}
