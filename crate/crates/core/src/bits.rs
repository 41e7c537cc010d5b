//! Bit strings and fixed-size configurations.
//!
//! Bits are ordered left to right. Position 0 of a [`BitString`] (component 1
//! of a [`Configuration`]) is the leftmost, most significant bit: it is stored
//! in the top bit of the first packed `u64` word. Every textual rendering
//! (binary, hexadecimal) reads the string in that order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn top_mask(width: usize) -> u64 {
    match width {
        0 => 0,
        w if w >= WORD => u64::MAX,
        w => !(u64::MAX >> w),
    }
}

/// An ordered sequence of bits of arbitrary length, packed MSB-first into
/// `u64` words. Bits past `len` in the last word are always zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString {
            words: Vec::with_capacity(bits.div_ceil(WORD)),
            len: 0,
        }
    }

    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        assert!(width <= WORD, "width {width} exceeds 64 bits");
        let mut out = BitString::new();
        out.push_value(value, width);
        out
    }

    /// Interprets the string (at most 64 bits) as an unsigned integer whose
    /// most significant bit is position 0.
    pub fn to_u64(&self) -> u64 {
        assert!(
            self.len <= WORD,
            "bit string of {} bits does not fit in u64",
            self.len
        );
        match self.words.first() {
            Some(&w) if self.len > 0 => w >> (WORD - self.len),
            _ => 0,
        }
    }

    /// Builds a string from big-endian bytes, eight bits per byte.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut out = BitString::with_capacity(bytes.len() * 8);
        for chunk in bytes.chunks(8) {
            let mut word = 0u64;
            for (k, &b) in chunk.iter().enumerate() {
                word |= (b as u64) << (56 - 8 * k);
            }
            out.push_word(word, chunk.len() * 8);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed storage, MSB-first. Trailing bits of the last word are zero.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range for length {}",
            self.len
        );
        (self.words[index / WORD] >> (WORD - 1 - index % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (WORD - 1 - index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(
            index < self.len,
            "bit index {index} out of range for length {}",
            self.len
        );
        self.words[index / WORD] ^= 1u64 << (WORD - 1 - index % WORD);
    }

    pub fn push(&mut self, bit: bool) {
        self.push_word(if bit { 1u64 << (WORD - 1) } else { 0 }, 1);
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_value(&mut self, value: u64, width: usize) {
        assert!(width <= WORD);
        if width == 0 {
            return;
        }
        self.push_word(value << (WORD - width), width);
    }

    /// Appends the top `width` bits of `word`.
    fn push_word(&mut self, word: u64, width: usize) {
        debug_assert!(width <= WORD);
        if width == 0 {
            return;
        }
        let word = word & top_mask(width);
        let used = self.len % WORD;
        if used == 0 {
            self.words.push(word);
        } else {
            let last = self.words.len() - 1;
            self.words[last] |= word >> used;
            if width > WORD - used {
                self.words.push(word << (WORD - used));
            }
        }
        self.len += width;
    }

    /// Reads up to 64 bits starting at `start`, MSB-aligned in the result.
    #[inline]
    pub(crate) fn word_at(&self, start: usize) -> u64 {
        let q = start / WORD;
        let r = start % WORD;
        let hi = self.words.get(q).copied().unwrap_or(0);
        if r == 0 {
            hi
        } else {
            let lo = self.words.get(q + 1).copied().unwrap_or(0);
            (hi << r) | (lo >> (WORD - r))
        }
    }

    /// 64 bits of the infinite repetition of `self`, starting at `start`.
    #[inline]
    pub(crate) fn cyclic_word(&self, start: usize) -> u64 {
        debug_assert!(start < self.len);
        if start + WORD <= self.len {
            return self.word_at(start);
        }
        let mut out = 0u64;
        let mut filled = 0;
        let mut pos = start;
        while filled < WORD {
            let take = (self.len - pos).min(WORD - filled);
            out |= (self.word_at(pos) & top_mask(take)) >> filled;
            filled += take;
            pos = (pos + take) % self.len;
        }
        out
    }

    pub fn append(&mut self, other: &BitString) {
        let used = self.len % WORD;
        if used == 0 {
            self.words.extend_from_slice(&other.words);
            self.len += other.len;
            return;
        }
        self.words.reserve(other.words.len());
        for &w in &other.words {
            *self.words.last_mut().expect("used > 0") |= w >> used;
            self.words.push(w << (WORD - used));
        }
        self.len += other.len;
        self.words.truncate(self.len.div_ceil(WORD));
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = BitString::with_capacity(self.len + other.len);
        out.append(self);
        out.append(other);
        out
    }

    /// The `len` bits beginning at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitString {
        assert!(
            start + len <= self.len,
            "slice {start}..{} out of range for length {}",
            start + len,
            self.len
        );
        let mut out = BitString::with_capacity(len);
        let mut pos = start;
        let end = start + len;
        while pos < end {
            let width = (end - pos).min(WORD);
            out.push_word(self.word_at(pos), width);
            pos += width;
        }
        out
    }

    /// Bit `i` of the result is bit `len - 1 - i` of `self`.
    pub fn reversed(&self) -> BitString {
        let mut words: Vec<u64> = self.words.iter().rev().map(|w| w.reverse_bits()).collect();
        let tail = self.len % WORD;
        if tail != 0 {
            // the reversed bits start `WORD - tail` positions into the first word
            let shift = WORD - tail;
            for i in 0..words.len() {
                let next = words.get(i + 1).copied().unwrap_or(0);
                words[i] = (words[i] << shift) | (next >> tail);
            }
            words.truncate(self.len.div_ceil(WORD));
        }
        BitString {
            words,
            len: self.len,
        }
    }

    /// The first `len` bits of `self` repeated as often as needed.
    pub fn repeat_to(&self, len: usize) -> BitString {
        assert!(
            !self.is_empty() || len == 0,
            "cannot repeat an empty bit string"
        );
        let mut out = BitString::with_capacity(len);
        while out.len < len {
            let take = (len - out.len).min(self.len);
            if take == self.len {
                out.append(self);
            } else {
                out.append(&self.slice(0, take));
            }
        }
        out
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(BitString {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
            len: self.len,
        })
    }

    pub fn xor_assign(&mut self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn hamming_distance(&self, other: &BitString) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Positions (0-based) of the set bits, in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let lz = w.leading_zeros() as usize;
                w &= !(1u64 << (WORD - 1 - lz));
                Some(k * WORD + lz)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Uppercase hexadecimal, one digit per 4 bits, left to right.
    pub fn to_hex(&self) -> Result<String> {
        if !self.len.is_multiple_of(4) {
            return Err(Error::NotNibbleAligned(self.len));
        }
        const DIGITS: &[u8; 16] = b"0123456789ABCDEF";
        let mut out = String::with_capacity(self.len / 4);
        for k in 0..self.len / 4 {
            let nibble = (self.words[k / 16] >> (60 - 4 * (k % 16))) & 0xF;
            out.push(DIGITS[nibble as usize] as char);
        }
        Ok(out)
    }

    /// Inverse of [`BitString::to_hex`]. Only uppercase digits are accepted.
    pub fn from_hex(hex: &str) -> Result<BitString> {
        let mut out = BitString::with_capacity(hex.len() * 4);
        for (position, digit) in hex.chars().enumerate() {
            let value = match digit {
                '0'..='9' => digit as u64 - '0' as u64,
                'A'..='F' => digit as u64 - 'A' as u64 + 10,
                _ => return Err(Error::InvalidHex { position, digit }),
            };
            out.push_value(value, 4);
        }
        Ok(out)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = BitString::new();
        for bit in iter {
            out.push(bit);
        }
        out
    }
}

/// Parses a string of `0`/`1` characters. Whitespace is skipped so that
/// grouped listings such as `"10101001 10100011"` can be pasted directly.
impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = BitString::new();
        for (position, digit) in s.chars().enumerate() {
            match digit {
                '0' => out.push(false),
                '1' => out.push(true),
                c if c.is_whitespace() => {}
                _ => return Err(Error::InvalidBit { position, digit }),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({}; \"{}\")", self.len, self)
    }
}

/// Encodes every byte as its 7-bit ASCII code, most significant bit first.
pub fn encode_ascii7(text: &[u8]) -> Result<BitString> {
    let mut out = BitString::with_capacity(text.len() * 7);
    for (position, &value) in text.iter().enumerate() {
        if value > 0x7F {
            return Err(Error::NonAscii { position, value });
        }
        out.push_value(value as u64, 7);
    }
    Ok(out)
}

/// The state `x = (x_1, ..., x_n)` of an n-component Boolean system.
///
/// Components are numbered from 1, matching the index range of strategies.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    bits: BitString,
}

impl Configuration {
    pub fn new(bits: BitString) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter(
                "a configuration needs at least one component".into(),
            ));
        }
        Ok(Configuration { bits })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "a configuration needs at least one component");
        Configuration {
            bits: BitString::zeros(n),
        }
    }

    /// The configuration whose components, read as a binary number with
    /// `x_1` most significant, equal `value`. Used by exhaustive oracles.
    pub fn from_index(value: u64, n: usize) -> Self {
        assert!((1..=64).contains(&n));
        Configuration {
            bits: BitString::from_u64(value, n),
        }
    }

    pub fn to_index(&self) -> u64 {
        self.bits.to_u64()
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn into_bits(self) -> BitString {
        self.bits
    }

    /// Component `i`, 1-based.
    #[inline]
    pub fn component(&self, i: usize) -> bool {
        self.bits.get(i - 1)
    }

    #[inline]
    pub fn set_component(&mut self, i: usize, value: bool) {
        self.bits.set(i - 1, value)
    }

    #[inline]
    pub fn flip_component(&mut self, i: usize) {
        self.bits.flip(i - 1)
    }

    pub fn complement(&self) -> Configuration {
        let mut out = self.clone();
        for i in 1..=self.n() {
            out.flip_component(i);
        }
        out
    }

    pub fn hamming_distance(&self, other: &Configuration) -> Result<usize> {
        self.bits.hamming_distance(&other.bits)
    }

    pub fn to_hex(&self) -> Result<String> {
        self.bits.to_hex()
    }

    pub fn from_hex(hex: &str) -> Result<Self> {
        Configuration::new(BitString::from_hex(hex)?)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.bits, f)
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({}; \"{}\")", self.n(), self.bits)
    }
}
