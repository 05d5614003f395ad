//! Counter-based seed derivation.
//!
//! Every random stream in a simulation is keyed by a path of integers
//! (`master → landscape index → run index → manager → period`). A stream's
//! seed depends only on its path, never on how many draws other streams
//! consumed, so runs can execute in any order or on any number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for every stream in the crate.
pub type SimRng = ChaCha8Rng;

/// Stream tags. Distinct tags keep sibling streams apart.
pub(crate) const TAG_LANDSCAPE: u64 = 0x4c41_4e44;
pub(crate) const TAG_RUN: u64 = 0x5255_4e00;
pub(crate) const TAG_INIT: u64 = 0x494e_4954;
pub(crate) const TAG_MANAGER: u64 = 0x4d47_5200;
pub(crate) const TAG_VIEW: u64 = 0x5649_4557;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` and a path of counters.
pub fn derive(parent: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(parent), |acc, &x| {
        splitmix64(acc ^ splitmix64(x))
    })
}

/// Seed of landscape `index` under `master`.
pub fn landscape_seed(master: u64, index: u64) -> u64 {
    derive(master, &[TAG_LANDSCAPE, index])
}

/// Seed of run `run` on the landscape seeded with `landscape_seed`.
pub fn run_seed(landscape_seed: u64, run: u64) -> u64 {
    derive(landscape_seed, &[TAG_RUN, run])
}

/// Stream for the initial configuration of a run.
pub fn init_rng(run_seed: u64) -> SimRng {
    SimRng::seed_from_u64(derive(run_seed, &[TAG_INIT]))
}

/// Stream owned by one manager in one period.
pub fn manager_rng(run_seed: u64, manager: usize, period: u64) -> SimRng {
    SimRng::seed_from_u64(derive(run_seed, &[TAG_MANAGER, manager as u64, period]))
}

/// Key of manager `manager`'s private view of the landscape in one run.
pub fn view_key(run_seed: u64, manager: usize) -> u64 {
    derive(run_seed, &[TAG_VIEW, manager as u64])
}

/// Stream used to build a landscape from its seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}
