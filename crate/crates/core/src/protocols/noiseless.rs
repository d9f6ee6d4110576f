use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symbol::Role;

type BitFn = Arc<dyn Fn(u64, &[u8]) -> u8 + Send + Sync>;
type LeafFn = Arc<dyn Fn(&[u8]) -> u64 + Send + Sync>;

/// A noiseless protocol as a binary tree of even depth `T`.
///
/// The edge leaving a node at depth `d` is chosen by Alice when `d` is even
/// and by Bob when `d` is odd, as a function of the node's path and the
/// chooser's input. Leaves carry the output.
#[derive(Clone)]
pub struct NoiselessTree {
    depth: usize,
    alice: BitFn,
    bob: BitFn,
    leaf: LeafFn,
}

impl std::fmt::Debug for NoiselessTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NoiselessTree").field("depth", &self.depth).finish_non_exhaustive()
    }
}

impl NoiselessTree {
    pub fn new(
        depth: usize,
        alice: impl Fn(u64, &[u8]) -> u8 + Send + Sync + 'static,
        bob: impl Fn(u64, &[u8]) -> u8 + Send + Sync + 'static,
        leaf: impl Fn(&[u8]) -> u64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if depth == 0 || depth % 2 == 1 {
            return Err(Error::config(format!("protocol tree depth {depth} must be even and positive")));
        }
        Ok(NoiselessTree { depth, alice: Arc::new(alice), bob: Arc::new(bob), leaf: Arc::new(leaf) })
    }

    /// Alice and Bob alternately reveal their `depth/2`-bit inputs, LSB
    /// first; the leaf value is `x·2^(depth/2) + y`.
    pub fn identity_exchange(depth: usize) -> Result<Self> {
        let half = depth / 2;
        Self::new(
            depth,
            |x, path| ((x >> (path.len() / 2)) & 1) as u8,
            |y, path| ((y >> (path.len() / 2)) & 1) as u8,
            move |path| {
                let (mut x, mut y) = (0u64, 0u64);
                for (i, &b) in path.iter().enumerate() {
                    if i % 2 == 0 {
                        x |= u64::from(b) << (i / 2);
                    } else {
                        y |= u64::from(b) << (i / 2);
                    }
                }
                (x << half) | y
            },
        )
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Bits of input per party for [`identity_exchange`](Self::identity_exchange).
    pub fn input_bits(&self) -> u32 {
        (self.depth / 2) as u32
    }

    pub fn owner(depth: usize) -> Role {
        if depth.is_multiple_of(2) {
            Role::Alice
        } else {
            Role::Bob
        }
    }

    /// The bit `role` chooses at the node reached by `path`.
    pub fn bit(&self, role: Role, input: u64, path: &[u8]) -> u8 {
        match role {
            Role::Alice => (self.alice)(input, path),
            Role::Bob => (self.bob)(input, path),
        }
    }

    /// The root-to-leaf path on `(x, y)`.
    pub fn walk(&self, x: u64, y: u64) -> Vec<u8> {
        let mut path = Vec::with_capacity(self.depth);
        while path.len() < self.depth {
            let b = match Self::owner(path.len()) {
                Role::Alice => self.bit(Role::Alice, x, &path),
                Role::Bob => self.bit(Role::Bob, y, &path),
            };
            path.push(b);
        }
        path
    }

    pub fn leaf_value(&self, path: &[u8]) -> Option<u64> {
        (path.len() == self.depth).then(|| (self.leaf)(path))
    }

    pub fn evaluate(&self, x: u64, y: u64) -> u64 {
        (self.leaf)(&self.walk(x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_exchange_reveals_inputs() {
        let t = NoiselessTree::identity_exchange(6).unwrap();
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(t.evaluate(x, y), x * 8 + y);
            }
        }
        assert_eq!(t.walk(0b101, 0b011), vec![1, 1, 0, 1, 1, 0]);
        assert!(NoiselessTree::identity_exchange(3).is_err());
    }
}
