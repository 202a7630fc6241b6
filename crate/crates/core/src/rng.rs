//! Reproducible random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream keyed by the user seed
//! and a purpose tag, with the replicate (or restart) index selecting the
//! stream. Draws for replicate `r` therefore do not depend on how many other
//! replicates exist or on the order in which they are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tags separating independent uses of one user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Innovations = 1,
    MixtureState = 2,
    ReplicateParams = 3,
    KMeans = 4,
    Validation = 5,
}

/// Returns the generator for `(seed, purpose, index)`.
pub fn substream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(b"loevecyc");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
