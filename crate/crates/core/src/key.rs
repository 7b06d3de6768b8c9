//! Key derivation and the keyed bit source consumed by the cipher.
//!
//! Each colour component gets its own 256-bit key, `SHA-256(master ∥ tag)`
//! with tags `"Y"`, `"U"`, `"V"`. A component key is expanded in counter
//! mode: block `i` of the stream is `SHA-256(key ∥ i as u64 big-endian)`, and
//! bits are handed out most-significant first.

use alloc::vec::Vec;
use core::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A 256-bit master secret.
#[derive(Clone)]
pub struct MasterKey([u8; 32]);

impl MasterKey {
    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        MasterKey(bytes)
    }

    /// Parses exactly 64 hexadecimal characters.
    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != 64 {
            return Err(Error::invalid("key must be exactly 64 hexadecimal characters"));
        }
        let mut out = [0u8; 32];
        for (dst, pair) in out.iter_mut().zip(s.as_bytes().chunks_exact(2)) {
            let hi = hex_digit(pair[0])?;
            let lo = hex_digit(pair[1])?;
            *dst = hi << 4 | lo;
        }
        Ok(MasterKey(out))
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn component_keys(&self) -> [ComponentKey; 3] {
        derive_component_keys(self)
    }
}

fn hex_digit(c: u8) -> Result<u8> {
    match c {
        b'0'..=b'9' => Ok(c - b'0'),
        b'a'..=b'f' => Ok(c - b'a' + 10),
        b'A'..=b'F' => Ok(c - b'A' + 10),
        _ => Err(Error::invalid("key contains a non-hexadecimal character")),
    }
}

// Constant time in the key contents.
impl PartialEq for MasterKey {
    fn eq(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).fold(0u8, |acc, (a, b)| acc | (a ^ b)) == 0
    }
}

impl Eq for MasterKey {}

impl fmt::Debug for MasterKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MasterKey(<redacted>)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Y,
    U,
    V,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Y, Component::U, Component::V];

    pub fn tag(self) -> &'static [u8] {
        match self {
            Component::Y => b"Y",
            Component::U => b"U",
            Component::V => b"V",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Key material for one colour component.
#[derive(Clone, PartialEq, Eq)]
pub struct ComponentKey {
    pub component: Component,
    bytes: [u8; 32],
}

impl ComponentKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.bytes
    }

    pub fn stream(&self) -> KeyStream {
        KeyStream::new(self.bytes)
    }
}

impl fmt::Debug for ComponentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComponentKey").field("component", &self.component).finish_non_exhaustive()
    }
}

/// `key_c = SHA-256(master ∥ tag_c)` for c in Y, U, V.
pub fn derive_component_keys(mk: &MasterKey) -> [ComponentKey; 3] {
    Component::ALL.map(|component| {
        let mut h = Sha256::new();
        h.update(mk.0);
        h.update(component.tag());
        ComponentKey { component, bytes: h.finalize().into() }
    })
}

/// A source of key bits. The cipher only ever pulls bits through this
/// trait, so tests can substitute contrived streams.
pub trait BitSource {
    /// Next `n` bits (1 ≤ n ≤ 64), first bit in the most significant position.
    fn next_bits(&mut self, n: u32) -> u64;

    /// Total bits handed out so far.
    fn bits_consumed(&self) -> u64;

    /// Unbiased draw from `[0, m)` by rejection sampling on
    /// `ceil(log2 m)`-bit values. `m == 1` consumes nothing.
    fn next_uniform(&mut self, m: u64) -> u64 {
        assert!(m >= 1, "modulus must be positive");
        if m == 1 {
            return 0;
        }
        let width = 64 - (m - 1).leading_zeros();
        loop {
            let v = self.next_bits(width);
            if v < m {
                return v;
            }
        }
    }

    /// Keyed Fisher–Yates shuffle of `0..n`.
    fn derive_permutation(&mut self, n: usize) -> Permutation {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.next_uniform(i as u64 + 1) as usize;
            map.swap(i, j);
        }
        Permutation { map }
    }
}

/// Counter-mode SHA-256 expansion of a 256-bit key.
#[derive(Clone)]
pub struct KeyStream {
    key: [u8; 32],
    counter: u64,
    block: [u8; 32],
    /// Bit offset into `block`; 256 means the block is used up.
    cursor: u32,
    consumed: u64,
}

impl KeyStream {
    pub fn new(key: [u8; 32]) -> Self {
        KeyStream { key, counter: 0, block: [0; 32], cursor: 256, consumed: 0 }
    }

    fn refill(&mut self) {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update(self.counter.to_be_bytes());
        self.block = h.finalize().into();
        self.counter = self.counter.checked_add(1).expect("key stream counter exhausted");
        self.cursor = 0;
    }

    fn next_bit(&mut self) -> u64 {
        if self.cursor == 256 {
            self.refill();
        }
        let byte = self.block[(self.cursor / 8) as usize];
        let bit = (byte >> (7 - self.cursor % 8)) & 1;
        self.cursor += 1;
        u64::from(bit)
    }

    /// Index of the next SHA-256 block to be generated.
    pub fn counter(&self) -> u64 {
        self.counter
    }
}

impl BitSource for KeyStream {
    fn next_bits(&mut self, n: u32) -> u64 {
        assert!((1..=64).contains(&n), "bit count must be in 1..=64");
        let mut v = 0u64;
        for _ in 0..n {
            v = v << 1 | self.next_bit();
        }
        self.consumed += u64::from(n);
        v
    }

    fn bits_consumed(&self) -> u64 {
        self.consumed
    }
}

impl fmt::Debug for KeyStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KeyStream")
            .field("counter", &self.counter)
            .field("consumed", &self.consumed)
            .finish_non_exhaustive()
    }
}

/// A bijection on `0..n`. Applying it to a sequence `s` yields
/// `out[i] = s[map[i]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    pub fn from_vec(map: Vec<usize>) -> Result<Self> {
        let mut seen = alloc::vec![false; map.len()];
        for &i in &map {
            if i >= map.len() || core::mem::replace(&mut seen[i], true) {
                return Err(Error::invalid("not a permutation"));
            }
        }
        Ok(Permutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { map: inv }
    }

    pub fn apply<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(items.len(), self.map.len(), "sequence length differs from permutation size");
        self.map.iter().map(|&i| items[i].clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hex(bytes: &[u8]) -> std::string::String {
        bytes.iter().map(|b| std::format!("{b:02x}")).collect()
    }

    // Reference digests computed with Python's hashlib.
    const SHA_ZERO32_Y: &str = "6af06865d18a4ef29d23a9a6c1b352996c5baa124d4e5d722e4533b8bb73ffb1";

    #[test]
    fn component_keys_of_zero_master_key() {
        let keys = MasterKey::from_bytes([0; 32]).component_keys();
        assert_eq!(hex(keys[0].as_bytes()), SHA_ZERO32_Y);
        assert_ne!(keys[0], keys[1]);
        assert_ne!(keys[1], keys[2]);
        assert_eq!(keys, MasterKey::from_bytes([0; 32]).component_keys());
    }

    #[test]
    fn component_keys_never_collide() {
        let mut ks = KeyStream::new([7; 32]);
        for _ in 0..1000 {
            let mut mk = [0u8; 32];
            for chunk in mk.chunks_exact_mut(8) {
                chunk.copy_from_slice(&ks.next_bits(64).to_be_bytes());
            }
            let [y, u, v] = MasterKey::from_bytes(mk).component_keys();
            assert!(y != u && u != v && y != v);
        }
    }

    #[test]
    fn hex_parsing() {
        let good = "00112233445566778899aabbccddeeff00112233445566778899AABBCCDDEEFF";
        assert_eq!(MasterKey::from_hex(good).unwrap().as_bytes()[1], 0x11);
        assert!(MasterKey::from_hex(&good[1..]).is_err());
        assert!(MasterKey::from_hex(&good.replace('0', "g")).is_err());
        assert_eq!(std::format!("{:?}", MasterKey::from_hex(good).unwrap()), "MasterKey(<redacted>)");
    }

    #[test]
    fn bits_come_msb_first_from_block_zero() {
        let key = [3u8; 32];
        let mut h = Sha256::new();
        h.update(key);
        h.update(0u64.to_be_bytes());
        let block0: [u8; 32] = h.finalize().into();
        let mut ks = KeyStream::new(key);
        assert_eq!(ks.next_bits(1), u64::from(block0[0] >> 7));
        assert_eq!(ks.next_bits(1), u64::from((block0[0] >> 6) & 1));
        assert_eq!(ks.next_bits(6), u64::from(block0[0] & 0x3F));
        assert_eq!(ks.next_bits(16), u64::from(u16::from_be_bytes([block0[1], block0[2]])));
        assert_eq!(ks.bits_consumed(), 24);
    }

    #[test]
    fn stream_crosses_block_boundaries() {
        let key = [9u8; 32];
        let mut h = Sha256::new();
        h.update(key);
        h.update(1u64.to_be_bytes());
        let block1: [u8; 32] = h.finalize().into();
        let mut ks = KeyStream::new(key);
        for _ in 0..3 {
            ks.next_bits(64);
        }
        ks.next_bits(60);
        let straddle = ks.next_bits(8);
        assert_eq!(straddle & 0x0F, u64::from(block1[0] >> 4));
        assert_eq!(ks.counter(), 2);
    }

    #[test]
    fn uniform_edge_cases() {
        let mut ks = KeyStream::new([1; 32]);
        assert_eq!(ks.next_uniform(1), 0);
        assert_eq!(ks.bits_consumed(), 0);
        let mut a = KeyStream::new([1; 32]);
        let mut b = KeyStream::new([1; 32]);
        for _ in 0..100 {
            assert_eq!(a.next_uniform(4), b.next_bits(2));
        }
    }

    #[test]
    fn uniform_nine_is_flat() {
        // 10^6 draws; each bucket's expected count is 111_111 with σ ≈ 314.
        let mut ks = KeyStream::new([42; 32]);
        let mut counts = [0u32; 9];
        for _ in 0..1_000_000 {
            counts[ks.next_uniform(9) as usize] += 1;
        }
        let expected = 1_000_000.0 / 9.0;
        let sigma = (1_000_000.0 * (1.0 / 9.0) * (8.0 / 9.0f64)).sqrt();
        for c in counts {
            let dev = (f64::from(c) - expected).abs();
            assert!(dev < 5.0 * sigma, "bucket {c} deviates by {dev}");
            assert!(dev / expected < 0.01);
        }
    }

    #[test]
    fn permutation_of_one_is_identity() {
        let mut ks = KeyStream::new([0; 32]);
        assert_eq!(ks.derive_permutation(1), Permutation::identity(1));
        assert_eq!(ks.bits_consumed(), 0);
    }

    #[test]
    fn from_vec_rejects_non_bijections() {
        assert!(Permutation::from_vec(std::vec![0, 0]).is_err());
        assert!(Permutation::from_vec(std::vec![2, 0]).is_err());
        assert!(Permutation::from_vec(std::vec![1, 0]).is_ok());
    }

    proptest! {
        #[test]
        fn permutations_are_bijective(n in 1usize..=1024, seed in any::<[u8; 32]>()) {
            let p = KeyStream::new(seed).derive_permutation(n);
            let mut sorted = p.as_slice().to_vec();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
            let items: Vec<u32> = (0..n as u32).map(|i| i.wrapping_mul(2654435761)).collect();
            prop_assert_eq!(p.inverse().apply(&p.apply(&items)), items);
        }

        #[test]
        fn replay_is_deterministic(seed in any::<[u8; 32]>(), widths in proptest::collection::vec(1u32..=64, 1..40)) {
            let mut a = KeyStream::new(seed);
            let mut b = KeyStream::new(seed);
            for &w in &widths {
                prop_assert_eq!(a.next_bits(w), b.next_bits(w));
            }
            prop_assert_eq!(a.bits_consumed(), widths.iter().map(|&w| u64::from(w)).sum::<u64>());
        }
    }
}
