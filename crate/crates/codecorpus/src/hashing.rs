//! Stable 64/128-bit hashing.
//!
//! `std::hash::DefaultHasher` is not guaranteed to be stable across compiler
//! releases, so everything that persists hashes (MinHash signatures, feature
//! buckets, n-gram indexes) goes through this fixed FNV-1a + splitmix64
//! construction instead. Output is identical on every platform.

pub const HASH_ALGORITHM: &str = "fnv1a64-splitmix64";

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;
const GOLDEN: u64 = 0x9e3779b97f4a7c15;

#[inline]
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seeded 64-bit hash of a byte slice.
#[inline]
pub fn hash64(bytes: &[u8], seed: u64) -> u64 {
    let mut h = FNV_OFFSET ^ splitmix64(seed);
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    splitmix64(h)
}

/// Seeded 128-bit hash as two independent 64-bit lanes.
#[inline]
pub fn hash128(bytes: &[u8], seed: u64) -> (u64, u64) {
    (hash64(bytes, seed), hash64(bytes, seed ^ GOLDEN))
}

/// Derives a child seed from a parent seed and a textual scope, so that
/// independent pipeline stages and per-document RNG streams never share one.
#[inline]
pub fn derive_seed(seed: u64, scope: &str) -> u64 {
    hash64(scope.as_bytes(), seed)
}
