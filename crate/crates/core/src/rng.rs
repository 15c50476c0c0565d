//! Reproducible random streams.
//!
//! Every draw is a pure function of `(seed, stream_id, position)`: stream
//! `i` is the ChaCha8 stream `i` of the key derived from `seed`, and values
//! are consumed in a fixed order. Work split across threads by stream index
//! therefore produces the same numbers under any schedule.

use std::f64::consts::TAU;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed domain for prime angles of the random model.
pub const DOMAIN_EULER_PRODUCT: u64 = 0;
/// Seed domain for stratified `t` draws.
pub const DOMAIN_ORDINATES: u64 = 0x7431_5f73_616d_706c;
/// Seed domain for permutation splits of pooled samples.
pub const DOMAIN_PERMUTATION: u64 = 0x7065_726d_7574_6531;
/// Seed domain for synthetic test data.
pub const DOMAIN_SYNTHETIC: u64 = 0x7379_6e74_6865_7469;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for an independent purpose, so e.g. ordinate draws never share
/// bits with prime angles under the same user seed.
pub fn domain_seed(seed: u64, domain: u64) -> u64 {
    if domain == DOMAIN_EULER_PRODUCT {
        seed
    } else {
        mix(seed ^ mix(domain))
    }
}

/// Generator for `(seed, stream_id)`.
pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Uniform in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_interval(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform angle in `[0, 2 pi)`.
#[inline]
pub fn angle(u: u64) -> f64 {
    TAU * unit_interval(u)
}

/// Next uniform in `[0, 1)` from a stream.
#[inline]
pub fn next_unit(rng: &mut ChaCha8Rng) -> f64 {
    unit_interval(rng.next_u64())
}

/// Standard normal by Box–Muller, consuming two values.
pub fn next_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = 1.0 - next_unit(rng);
    let u2 = next_unit(rng);
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}
