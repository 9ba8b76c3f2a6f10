//! Seeded randomness.
//!
//! Every random draw in the crate comes from [`ChaCha8Rng`] seeded through
//! [`seeded`], so a seed reproduces the same stream on every platform.
//! Seeds for independent jobs are derived with [`derive_seed`]: the parts are
//! folded into a 64-bit state with the SplitMix64 finalizer, and string parts
//! are first reduced with 64-bit FNV-1a.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One component of a derived seed.
#[derive(Debug, Clone, Copy)]
pub enum SeedPart<'a> {
    Int(u64),
    Str(&'a str),
}

impl From<u64> for SeedPart<'_> {
    fn from(v: u64) -> Self {
        SeedPart::Int(v)
    }
}

impl From<usize> for SeedPart<'_> {
    fn from(v: usize) -> Self {
        SeedPart::Int(v as u64)
    }
}

impl<'a> From<&'a str> for SeedPart<'a> {
    fn from(v: &'a str) -> Self {
        SeedPart::Str(v)
    }
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// `h_0 = splitmix64(master)`, `h_{k+1} = splitmix64(h_k ^ part_k)`.
pub fn derive_seed(master: u64, parts: &[SeedPart<'_>]) -> u64 {
    parts.iter().fold(splitmix64(master), |h, part| {
        let v = match *part {
            SeedPart::Int(v) => v,
            SeedPart::Str(s) => fnv1a64(s),
        };
        splitmix64(h ^ v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64("a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn splitmix_reference_value() {
        // first output of the reference SplitMix64 generator seeded with 0
        assert_eq!(splitmix64(0), 0xe220_a839_7b1d_cdaf);
    }

    #[test]
    fn derived_seeds_depend_on_every_part() {
        let a = derive_seed(1, &["cox".into(), 0usize.into(), 3usize.into()]);
        let b = derive_seed(1, &["drl_cox".into(), 0usize.into(), 3usize.into()]);
        let c = derive_seed(1, &["cox".into(), 0usize.into(), 4usize.into()]);
        let d = derive_seed(2, &["cox".into(), 0usize.into(), 3usize.into()]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_eq!(
            a,
            derive_seed(1, &["cox".into(), 0usize.into(), 3usize.into()])
        );
    }

    #[test]
    fn seeded_streams_repeat() {
        let x: Vec<u64> = (0..4)
            .map(|_| 0)
            .scan(seeded(9), |r, _| Some(r.random()))
            .collect();
        let y: Vec<u64> = (0..4)
            .map(|_| 0)
            .scan(seeded(9), |r, _| Some(r.random()))
            .collect();
        assert_eq!(x, y);
    }
}
