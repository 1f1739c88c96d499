//! Streaming generation of the candidate space with deterministic sharding.
//!
//! The space for `n` links is the contiguous index range `0..5^(n(n−1)/2)`.
//! A shard is a residue class of that range: shard `s` of `c` yields exactly
//! the indices `k ≡ s (mod c)` in ascending order, so shards partition the
//! space and every shard sees the same joint-type mix (the low base-5 digits
//! cycle uniformly within any residue class).

use crate::model::{
    cell_count, index_space, AdjacencyMatrix, JointKind, MatrixIndex, ModelError, MAX_LINKS,
    MIN_LINKS,
};

/// A residue class of the enumeration space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shard {
    shard_index: u64,
    shard_count: u64,
}

impl Shard {
    /// A shard must sit below its count; a count of 1 is the whole space.
    pub fn new(shard_index: u64, shard_count: u64) -> Result<Shard, ModelError> {
        if shard_count == 0 || shard_index >= shard_count {
            return Err(ModelError::ShardSpec {
                index: shard_index,
                count: shard_count,
            });
        }
        Ok(Shard {
            shard_index,
            shard_count,
        })
    }

    /// The single shard covering everything.
    pub fn full() -> Shard {
        Shard {
            shard_index: 0,
            shard_count: 1,
        }
    }

    pub fn index(&self) -> u64 {
        self.shard_index
    }

    pub fn count(&self) -> u64 {
        self.shard_count
    }
}

/// Size of the enumeration space for `n` links: 5^(n(n−1)/2).
pub fn total_count(n: usize) -> Result<u64, ModelError> {
    if !(MIN_LINKS..=MAX_LINKS).contains(&n) {
        return Err(ModelError::LinkCount(n));
    }
    Ok(index_space(n))
}

/// Stream the shard's matrices in ascending index order.
///
/// The base-5 digit vector is carried incrementally (add the stride, then
/// propagate carries), so each step costs a handful of digit operations and
/// peak memory is independent of the space size.
pub fn enumerate_stream(n: usize, shard: Shard) -> Result<ShardStream, ModelError> {
    let total = total_count(n)?;
    let mut digits = vec![0u8; cell_count(n)];
    let mut rest = shard.shard_index;
    for d in digits.iter_mut() {
        *d = (rest % 5) as u8;
        rest /= 5;
    }
    Ok(ShardStream {
        n,
        next_index: shard.shard_index,
        step: shard.shard_count,
        total,
        digits,
    })
}

/// Iterator over one shard; see [`enumerate_stream`].
pub struct ShardStream {
    n: usize,
    next_index: u64,
    step: u64,
    total: u64,
    digits: Vec<u8>,
}

impl ShardStream {
    fn advance(&mut self) {
        self.next_index = self.next_index.saturating_add(self.step);
        let mut carry = self.step;
        for d in self.digits.iter_mut() {
            if carry == 0 {
                break;
            }
            let v = *d as u64 + carry;
            *d = (v % 5) as u8;
            carry = v / 5;
        }
        // Any carry left over means the index ran off the top of the space;
        // `next_index >= total` already terminates the stream.
    }
}

impl Iterator for ShardStream {
    type Item = (MatrixIndex, AdjacencyMatrix);

    fn next(&mut self) -> Option<(MatrixIndex, AdjacencyMatrix)> {
        if self.next_index >= self.total {
            return None;
        }
        let cells: Vec<JointKind> = self
            .digits
            .iter()
            .map(|&d| JointKind::from_digit(d).expect("digits stay below 5"))
            .collect();
        let matrix = AdjacencyMatrix::from_cells(self.n, cells).expect("digit width matches n");
        let index = self.next_index;
        self.advance();
        Some((index, matrix))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let remaining = if self.next_index >= self.total {
            0
        } else {
            ((self.total - self.next_index - 1) / self.step + 1) as usize
        };
        (remaining, Some(remaining))
    }
}

impl ExactSizeIterator for ShardStream {}
