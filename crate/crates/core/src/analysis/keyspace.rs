use alloc::format;
use alloc::string::String;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::bank::{BANK_SIZE, SELECTION_LEN};
use crate::cipher::block_counts;
use crate::error::{Error, Result};

/// Key-space size `4^N · C(128, 9)^N · n_Y! · n_U! · n_V!` with
/// `N = n_Y + n_U + n_V` blocks: rotations, transform selections and
/// per-component block permutations.
#[derive(Debug, Clone, PartialEq)]
pub struct KeySpaceReport {
    pub n_y: usize,
    pub n_u: usize,
    pub n_v: usize,
    pub exact_value: BigUint,
    pub log2_bits: f64,
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // exact at every step: the running value is C(n, i + 1)
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// log2 of a positive integer from its top 64 bits.
fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return libm::log2(v.to_u64().expect("fits in 64 bits") as f64);
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().expect("fits in 64 bits");
    shift as f64 + libm::log2(top as f64)
}

impl KeySpaceReport {
    /// Report for explicit per-component block counts.
    pub fn for_blocks(n_y: usize, n_u: usize, n_v: usize) -> Self {
        let total = (n_y + n_u + n_v) as u32;
        let rotations = BigUint::one() << (2 * u64::from(total));
        let selections = binomial(BANK_SIZE as u64, SELECTION_LEN as u64).pow(total);
        let permutations = factorial(n_y) * factorial(n_u) * factorial(n_v);
        let exact_value = rotations * selections * permutations;
        let log2_bits = log2_big(&exact_value);
        KeySpaceReport { n_y, n_u, n_v, exact_value, log2_bits }
    }

    pub fn decimal(&self) -> String {
        format!("{}", self.exact_value)
    }
}

/// Key space of a `width`×`height` image (4:2:0, padded to multiples of 16).
pub fn keyspace(width: usize, height: usize) -> Result<KeySpaceReport> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("image has a zero dimension"));
    }
    let [n_y, n_u, n_v] = block_counts(width, height);
    Ok(KeySpaceReport::for_blocks(n_y, n_u, n_v))
}

impl fmt::Display for KeySpaceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n_y + self.n_u + self.n_v;
        writeln!(f, "blocks: Y={} U={} V={}", self.n_y, self.n_u, self.n_v)?;
        writeln!(f, "formula: 4^{n} * C(128,9)^{n} * {}! * {}! * {}!", self.n_y, self.n_u, self.n_v)?;
        writeln!(f, "log2: {}", self.log2_bits)?;
        write!(f, "exact: {}", self.exact_value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_128_9() {
        // Python: math.comb(128, 9)
        assert_eq!(binomial(128, 9), BigUint::from(19_062_702_032_000u64));
        assert_eq!(binomial(5, 7), BigUint::default());
        assert_eq!(binomial(10, 0), BigUint::one());
    }

    #[test]
    fn single_block_degenerate_case() {
        let r = KeySpaceReport::for_blocks(1, 0, 0);
        assert_eq!(r.exact_value, BigUint::from(4u32) * binomial(128, 9));
    }

    #[test]
    fn block_counts_for_192_by_128() {
        let r = keyspace(192, 128).unwrap();
        assert_eq!((r.n_y, r.n_u, r.n_v), (384, 96, 96));
        assert!(keyspace(0, 5).is_err());
        // padding: 200×130 behaves like 208×144
        let p = keyspace(200, 130).unwrap();
        assert_eq!((p.n_y, p.n_u), (13 * 9 * 4, 13 * 9));
    }
}
