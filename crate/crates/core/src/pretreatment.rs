//! Normalization of a message into the expanded string `D` and the initial
//! configuration `x0`.
//!
//! The pipeline is: 7-bit encoding, append `1`, append the bit length,
//! append a conditional `1` when the length is even, mirror, duplicate up
//! to the next block boundary, then XOR-fold into `n` bits.

use crate::bits::{encode_ascii7, BitString, Configuration};
use crate::error::{Error, Result};

/// Block size that `D` is expanded to for the default 256-bit digest.
pub const BLOCK_BITS: usize = 512;

/// The pair `(D, x0)` derived from a message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedMessage {
    d: BitString,
    x0: Configuration,
}

impl NormalizedMessage {
    /// The expanded string; its length is a positive multiple of 512.
    pub fn d(&self) -> &BitString {
        &self.d
    }

    pub fn x0(&self) -> &Configuration {
        &self.x0
    }

    pub fn into_parts(self) -> (BitString, Configuration) {
        (self.d, self.x0)
    }
}

/// Appends `1`, then the minimal-width binary length of the result, then a
/// further `1` if the total length is even.
pub fn pad_and_mark(msg_bits: &BitString) -> Result<BitString> {
    if msg_bits.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let mut out = BitString::with_capacity(msg_bits.len() + 72);
    out.append(msg_bits);
    out.append(&mark_tail(msg_bits.len()));
    Ok(out)
}

/// The bits appended by [`pad_and_mark`] to a message of `msg_len` bits.
fn mark_tail(msg_len: usize) -> BitString {
    let mut tail = BitString::with_capacity(72);
    tail.push(true);
    let counted = msg_len as u64 + 1;
    let width = 64 - counted.leading_zeros() as usize;
    tail.push_value(counted, width);
    if (msg_len + tail.len()).is_multiple_of(2) {
        tail.push(true);
    }
    tail
}

/// Read-only view of `D` for a message, built without copying the message:
/// `D` is the periodic extension of `marked ++ reverse(marked)`.
pub(crate) struct ExpandedView<'a> {
    msg: &'a BitString,
    tail: BitString,
    /// Length of the marked string.
    marked: usize,
    /// Length of `D`.
    len: usize,
}

impl<'a> ExpandedView<'a> {
    pub(crate) fn new(msg_bits: &'a BitString, n: usize) -> Result<Self> {
        check_digest_size(n)?;
        if msg_bits.is_empty() {
            return Err(Error::EmptyMessage);
        }
        let tail = mark_tail(msg_bits.len());
        let marked = msg_bits.len() + tail.len();
        let block = expansion_block(n);
        Ok(ExpandedView {
            msg: msg_bits,
            tail,
            marked,
            len: (2 * marked).div_ceil(block) * block,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    fn marked_bit(&self, i: usize) -> bool {
        if i < self.msg.len() {
            self.msg.get(i)
        } else {
            self.tail.get(i - self.msg.len())
        }
    }

    fn mirrored_bit(&self, i: usize) -> bool {
        if i < self.marked {
            self.marked_bit(i)
        } else {
            self.marked_bit(2 * self.marked - 1 - i)
        }
    }

    /// Bits `64 * j .. 64 * j + 64` of `D`.
    pub(crate) fn word(&self, j: usize) -> u64 {
        let period = 2 * self.marked;
        let pos = (64 * j) % period;
        let in_msg = |start: usize| start + 64 <= self.msg.len();
        if pos + 64 <= self.marked && in_msg(pos) {
            return self.msg.word_at(pos);
        }
        if pos >= self.marked && pos + 64 <= period {
            // mirrored half: bits marked[end - 64 .. end] read backwards
            let end = period - pos;
            if end >= 64 && in_msg(end - 64) {
                return self.msg.word_at(end - 64).reverse_bits();
            }
        }
        (0..64).fold(0u64, |acc, k| {
            (acc << 1) | self.mirrored_bit((pos + k) % period) as u64
        })
    }
}

/// `b` followed by its reversal.
pub fn mirror(b: &BitString) -> BitString {
    b.concat(&b.reversed())
}

/// Repeats `b` and truncates at the smallest multiple of `block` that is at
/// least `len(b)`.
pub fn expand_to_multiple(b: &BitString, block: usize) -> Result<BitString> {
    if b.is_empty() {
        return Err(Error::EmptyMessage);
    }
    if block == 0 {
        return Err(Error::InvalidParameter(
            "block size must be positive".into(),
        ));
    }
    let target = b.len().div_ceil(block) * block;
    Ok(b.repeat_to(target))
}

pub fn expand_to_512(b: &BitString) -> Result<BitString> {
    expand_to_multiple(b, BLOCK_BITS)
}

/// XOR of the consecutive `n`-bit blocks of `d`, left to right.
pub fn fold_xor(d: &BitString, n: usize) -> Result<Configuration> {
    if n == 0 || d.is_empty() || !d.len().is_multiple_of(n) {
        return Err(Error::NotMultiple {
            len: d.len(),
            block: n,
        });
    }
    let mut acc = d.slice(0, n);
    if n.is_multiple_of(64) {
        let per_block = n / 64;
        let mut folded = acc.words().to_vec();
        for block in d.words().chunks(per_block).skip(1) {
            for (a, w) in folded.iter_mut().zip(block) {
                *a ^= w;
            }
        }
        acc = BitString::zeros(0);
        for w in folded {
            acc.push_value(w, 64);
        }
    } else {
        for start in (n..d.len()).step_by(n) {
            acc.xor_assign(&d.slice(start, n))?;
        }
    }
    Configuration::new(acc)
}

/// Block size used when expanding `D` for an `n`-bit digest: the least common
/// multiple of 512 and `2n`, so that `D` always splits into whole `n`-bit
/// blocks. For `n = 256` this is 512.
pub fn expansion_block(n: usize) -> usize {
    let two_n = 2 * n;
    BLOCK_BITS / gcd(BLOCK_BITS, two_n) * two_n
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn check_digest_size(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!(
            "digest size must be a positive multiple of 4, got {n}"
        )));
    }
    Ok(())
}

/// Normalizes an already-encoded message.
pub fn normalize_bits(msg_bits: &BitString, n: usize) -> Result<NormalizedMessage> {
    check_digest_size(n)?;
    let marked = pad_and_mark(msg_bits)?;
    let d = expand_to_multiple(&mirror(&marked), expansion_block(n))?;
    let x0 = fold_xor(&d, n)?;
    Ok(NormalizedMessage { d, x0 })
}

/// Normalizes a text message. Bytes above 0x7F are rejected.
pub fn normalize(message: &[u8], n: usize) -> Result<NormalizedMessage> {
    if message.is_empty() {
        return Err(Error::EmptyMessage);
    }
    normalize_bits(&encode_ascii7(message)?, n)
}
