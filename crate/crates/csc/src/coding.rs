//! Numeric coding conventions shared by every module.
//!
//! Pairs use the Cantor pairing `(x+y)(x+y+1)/2 + y`; finite sets use bitmask
//! codes `Σ 2^i`; finite sequences use nested pairs offset by one.

use num_bigint::BigUint;

pub fn pair(x: u64, y: u64) -> u64 {
    let s = x + y;
    s * (s + 1) / 2 + y
}

pub fn unpair(z: u64) -> (u64, u64) {
    // Largest w with w(w+1)/2 <= z.
    let mut w = (((8.0 * z as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while w * (w + 1) / 2 > z {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}

pub fn triple(x: u64, y: u64, s: u64) -> u64 {
    pair(x, pair(y, s))
}

pub fn untriple(z: u64) -> (u64, u64, u64) {
    let (x, r) = unpair(z);
    let (y, s) = unpair(r);
    (x, y, s)
}

/// Cantor pairing on arbitrary-size naturals.
pub fn pair_big(x: &BigUint, y: &BigUint) -> BigUint {
    let s = x + y;
    (&s * (&s + 1u32)) / 2u32 + y
}

pub fn encode_finset<I: IntoIterator<Item = u64>>(items: I) -> BigUint {
    let mut n = BigUint::default();
    for i in items {
        n.set_bit(i, true);
    }
    n
}

pub fn decode_finset(n: &BigUint) -> Vec<u64> {
    (0..n.bits()).filter(|&i| n.bit(i)).collect()
}

/// Code of the sequence `⟨n_0, …, n_r⟩`: the empty sequence is 0 and
/// `n :: rest` is `pair(n, code(rest)) + 1`. Every entry is below the code.
pub fn encode_seq(items: &[u64]) -> u64 {
    items.iter().rev().fold(0, |acc, &n| pair(n, acc) + 1)
}

pub fn decode_seq(mut code: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while code > 0 {
        let (n, rest) = unpair(code - 1);
        out.push(n);
        code = rest;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_closed_form() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(2, 1), 7);
        assert_eq!(pair(0, 1), 2);
        assert_eq!(pair(1, 0), 1);
    }

    #[test]
    fn pair_round_trip_small() {
        for x in 0..50 {
            for y in 0..50 {
                assert_eq!(unpair(pair(x, y)), (x, y));
            }
        }
    }

    #[test]
    fn pair_is_a_bijection_on_an_initial_segment() {
        // Every code below 2^12 is hit exactly once by a pair with small coordinates.
        let mut seen = vec![false; 1 << 12];
        for x in 0..100u64 {
            for y in 0..100u64 {
                let z = pair(x, y);
                if z < (1 << 12) {
                    assert!(!seen[z as usize]);
                    seen[z as usize] = true;
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
        for z in 0..(1u64 << 12) {
            let (x, y) = unpair(z);
            assert_eq!(pair(x, y), z);
        }
    }

    #[test]
    fn pair_monotone() {
        for x in 0..40 {
            for y in 0..40 {
                assert!(pair(x, y) < pair(x + 1, y));
                assert!(pair(x, y) < pair(x, y + 1));
            }
        }
    }

    #[test]
    fn unpair_large() {
        for &(x, y) in &[(1u64 << 20, 3u64), (123_456, 654_321), (0, 1 << 30)] {
            assert_eq!(unpair(pair(x, y)), (x, y));
        }
    }

    #[test]
    fn finset_codes() {
        assert_eq!(encode_finset([]), BigUint::from(0u32));
        assert_eq!(encode_finset([0, 2]), BigUint::from(5u32));
        assert!(decode_finset(&BigUint::from(0u32)).is_empty());
        for n in 0u32..(1 << 12) {
            let code = BigUint::from(n);
            let set = decode_finset(&code);
            assert!(set.iter().all(|&i| i < code.bits()));
            assert_eq!(encode_finset(set), code);
        }
        for mask in 0u32..(1 << 10) {
            let set: Vec<u64> = (0..10).filter(|i| mask >> i & 1 == 1).collect();
            assert_eq!(decode_finset(&encode_finset(set.clone())), set);
        }
    }

    #[test]
    fn seq_codes() {
        assert_eq!(encode_seq(&[]), 0);
        for items in [vec![0], vec![3], vec![13], vec![2, 5], vec![1, 0, 4]] {
            let c = encode_seq(&items);
            assert!(items.iter().all(|&n| n < c));
            assert_eq!(decode_seq(c), items);
        }
        assert_eq!(encode_seq(&[13]), 92);
        for c in 0..2000 {
            assert_eq!(encode_seq(&decode_seq(c)), c);
        }
    }

    #[test]
    fn triples() {
        for x in 0..8 {
            for y in 0..8 {
                for s in 0..8 {
                    assert_eq!(untriple(triple(x, y, s)), (x, y, s));
                }
            }
        }
    }
}
