//! Cyclic redundancy checks used as outer detection codes.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A CRC generator polynomial.
///
/// `taps` holds the `degree + 1` coefficients, highest degree first, so the
/// CRC-7 `x^7 + x^6 + x^5 + x^2 + 1` is `[1, 1, 1, 0, 0, 1, 0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrcSpec {
    taps: Vec<u8>,
}

impl CrcSpec {
    pub fn new(taps: Vec<u8>) -> Result<Self> {
        if taps.len() < 2 {
            return invalid("CRC polynomial must have degree >= 1");
        }
        if taps.iter().any(|&t| t > 1) {
            return invalid("CRC taps must be 0 or 1");
        }
        if taps[0] != 1 || taps[taps.len() - 1] != 1 {
            return invalid("CRC polynomial must have leading and trailing coefficient 1");
        }
        Ok(Self { taps })
    }

    /// Parses a bit string such as `"11100101"`.
    pub fn from_bit_string(s: &str) -> Result<Self> {
        let taps = parse_bit_string(s)?;
        Self::new(taps)
    }

    /// The CRC-7 `x^7 + x^6 + x^5 + x^2 + 1`.
    pub fn crc7() -> Self {
        Self {
            taps: vec![1, 1, 1, 0, 0, 1, 0, 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.taps.len() - 1
    }

    pub fn taps(&self) -> &[u8] {
        &self.taps
    }

    pub fn to_bit_string(&self) -> String {
        self.taps
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect()
    }

    /// Remainder of `x^deg * m(x)` modulo the generator, MSB first.
    ///
    /// The first payload bit is the highest-degree coefficient of `m(x)`.
    pub fn remainder(&self, payload: &[u8]) -> Vec<u8> {
        let deg = self.degree();
        let mut reg = vec![0u8; deg];
        for &bit in payload {
            let feedback = reg[0] ^ (bit & 1);
            reg.rotate_left(1);
            reg[deg - 1] = 0;
            if feedback == 1 {
                for (r, &t) in reg.iter_mut().zip(&self.taps[1..]) {
                    *r ^= t;
                }
            }
        }
        reg
    }

    /// Payload followed by its CRC bits.
    pub fn append(&self, payload: &[u8]) -> Vec<u8> {
        let mut out = payload.to_vec();
        out.extend(self.remainder(payload));
        out
    }

    /// Checks a word laid out as payload followed by `degree` CRC bits.
    pub fn check(&self, word: &[u8]) -> bool {
        let deg = self.degree();
        if word.len() < deg {
            return false;
        }
        let (payload, parity) = word.split_at(word.len() - deg);
        self.remainder(payload) == parity
    }
}

pub(crate) fn parse_bit_string(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => invalid(format!("unexpected character {other:?} in bit string")),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Polynomial long division on u128, independent of the shift register.
    fn long_division(payload: &[u8], taps: &[u8]) -> Vec<u8> {
        let deg = taps.len() - 1;
        let mut poly: u128 = 0;
        for &b in payload {
            poly = (poly << 1) | b as u128;
        }
        poly <<= deg;
        let gen = taps.iter().fold(0u128, |acc, &t| (acc << 1) | t as u128);
        let total = payload.len() + deg;
        for shift in (deg..total).rev() {
            if poly >> shift & 1 == 1 {
                poly ^= gen << (shift - deg);
            }
        }
        (0..deg).rev().map(|k| (poly >> k & 1) as u8).collect()
    }

    #[test]
    fn zero_payload_has_zero_remainder() {
        let crc = CrcSpec::crc7();
        assert_eq!(crc.remainder(&[0; 64]), vec![0; 7]);
    }

    #[test]
    fn single_one_matches_long_division() {
        let crc = CrcSpec::crc7();
        let mut payload = vec![0u8; 64];
        payload[0] = 1;
        let expected = long_division(&payload, crc.taps());
        assert_eq!(crc.remainder(&payload), expected);
        // x^70 mod g(x), frozen from the long-division oracle.
        assert_eq!(expected, vec![0, 1, 1, 0, 0, 1, 1]);
    }

    #[test]
    fn check_detects_every_single_bit_flip() {
        let crc = CrcSpec::crc7();
        let payload: Vec<u8> = (0..20).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        let word = crc.append(&payload);
        assert!(crc.check(&word));
        for i in 0..word.len() {
            let mut w = word.clone();
            w[i] ^= 1;
            assert!(!crc.check(&w), "flip at {i} not detected");
        }
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert!(CrcSpec::new(vec![1]).is_err());
        assert!(CrcSpec::new(vec![0, 1, 1]).is_err());
        assert!(CrcSpec::new(vec![1, 1, 0]).is_err());
        assert_eq!(
            CrcSpec::from_bit_string("11100101").unwrap(),
            CrcSpec::crc7()
        );
    }

    proptest::proptest! {
        #[test]
        fn remainder_matches_long_division(payload in proptest::collection::vec(0u8..2, 0..100)) {
            let crc = CrcSpec::crc7();
            proptest::prop_assert_eq!(crc.remainder(&payload), long_division(&payload, crc.taps()));
        }
    }
}
