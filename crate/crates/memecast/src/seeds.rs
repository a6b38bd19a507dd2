//! Deterministic seed fan-out.
//!
//! Every random choice in the pipeline flows from one root seed. Subsystems
//! (simulation, fold shuffling, per-tree training, reference models) derive
//! their own seeds by hashing a stable label, so adding or reordering one
//! consumer never perturbs another.

/// FNV-1a over arbitrary bytes; stable across platforms and releases.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Derives an independent seed from a root seed and a purpose label.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    let mut bytes = Vec::with_capacity(8 + label.len());
    bytes.extend_from_slice(&root.to_le_bytes());
    bytes.extend_from_slice(label.as_bytes());
    fnv1a(&bytes)
}

/// Fingerprint of a fold assignment, so runs can log that every model saw
/// the same split.
pub fn fold_hash(folds: &[Vec<usize>]) -> u64 {
    let mut bytes = Vec::new();
    for fold in folds {
        bytes.extend_from_slice(&(fold.len() as u64).to_le_bytes());
        for &i in fold {
            bytes.extend_from_slice(&(i as u64).to_le_bytes());
        }
    }
    fnv1a(&bytes)
}
