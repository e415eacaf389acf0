//! Deterministic seed derivation.
//!
//! Every stochastic component takes an explicit 64-bit seed. When one
//! user-facing seed has to drive several independent streams (per-input
//! sweeps, the two generators of a rate comparison), sub-seeds are derived
//! by hashing, never by clock or by ad-hoc arithmetic that could collide:
//!
//! ```text
//! sub_seed = first 8 bytes (little-endian) of
//!            SHA-256( master_le(8) || domain_utf8 || counter_le(8) )
//! ```
//!
//! The domain string keeps streams for different purposes disjoint even at
//! equal counters; the counter splits streams within one purpose.

use sha2::{Digest, Sha256};

/// Derives the `counter`-th sub-seed for `domain` from a master seed.
pub fn derive_seed(master: u64, domain: &str, counter: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(domain.as_bytes());
    hasher.update(counter.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}
