//! Tree codes.
//!
//! A `d`-ary tree code labels every edge of a rooted `d`-regular tree; the
//! encoding of a path is the sequence of labels along it. Distance `α` means
//! that two same-length paths diverging `m` levels above their ends have
//! encodings differing in at least `α·m` positions.
//!
//! Two labelings exist. `Explicit` stores every edge label of a finite tree
//! and is verified exhaustively. `Hashed` derives labels from a keyed hash of
//! the path, so the tree has unbounded depth; sibling edges always carry
//! distinct labels and the distance property is verified exhaustively down to
//! a fixed depth. `Windowed` hashes only the depth and the last `memory`
//! branches, so paths that agree on their last `memory` branches have the
//! same future and the decoder can merge them (Viterbi decoding).

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAX_ATTEMPTS: u32 = 1000;
const MAX_ARITY: u8 = 16;
const MAX_EXPLICIT_EDGES: u64 = 1 << 22;
/// Node expansions before decoding falls back to beam search.
const SEARCH_BUDGET: usize = 200_000;
const BEAM_WIDTH: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeCodeSpec {
    pub arity: u8,
    /// `None` for a hashed tree of unbounded depth.
    pub depth: Option<usize>,
    pub label_size: u32,
    pub alpha: f64,
    pub seed: u64,
    /// Depth down to which the hashed tree is verified.
    pub verified_depth: usize,
    /// Window length of a windowed labeling.
    #[serde(default)]
    pub memory: Option<usize>,
}

#[derive(Clone, Debug)]
enum Labeling {
    /// Label of the edge into heap node `i` (root is 0, child `c` of `v` is
    /// `v·d + c + 1`) stored at `i - 1`.
    Explicit(Vec<u32>),
    Hashed { key: u64 },
    /// Node is `depth << 32 | window`, the window holding the last
    /// `memory` branches in base `arity`.
    Windowed { key: u64, states: u64 },
}

#[derive(Clone, Debug)]
pub struct TreeCode {
    arity: u8,
    depth: Option<usize>,
    label_size: u32,
    alpha: f64,
    seed: u64,
    labeling: Labeling,
    verified: bool,
    verified_depth: usize,
    attempts: u32,
    memory: Option<usize>,
}

/// Opaque handle to a tree node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Node(u64);

impl TreeCode {
    /// Random explicit labeling with no verification.
    pub fn random_unverified(arity: u8, depth: usize, label_size: u32, seed: u64) -> Result<Self> {
        check_shape(arity, label_size)?;
        let edges = explicit_edge_count(arity, depth)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let labels = (0..edges).map(|_| rng.gen_range(0..label_size)).collect();
        Ok(TreeCode {
            arity,
            depth: Some(depth),
            label_size,
            alpha: 0.0,
            seed,
            labeling: Labeling::Explicit(labels),
            verified: false,
            verified_depth: 0,
            attempts: 1,
            memory: None,
        })
    }

    /// Hashed labeling, verified down to `verified_depth` by rejection over
    /// keys derived from `seed`.
    pub fn hashed_verified(
        arity: u8,
        label_size: u32,
        alpha: f64,
        verified_depth: usize,
        seed: u64,
    ) -> Result<Self> {
        Self::keyed_verified(arity, label_size, alpha, verified_depth, seed, None)
    }

    /// Windowed labeling with the given memory, verified like
    /// [`hashed_verified`](Self::hashed_verified).
    pub fn windowed_verified(
        arity: u8,
        label_size: u32,
        alpha: f64,
        memory: usize,
        verified_depth: usize,
        seed: u64,
    ) -> Result<Self> {
        Self::keyed_verified(arity, label_size, alpha, verified_depth, seed, Some(memory))
    }

    fn keyed_verified(
        arity: u8,
        label_size: u32,
        alpha: f64,
        verified_depth: usize,
        seed: u64,
        memory: Option<usize>,
    ) -> Result<Self> {
        check_shape(arity, label_size)?;
        if label_size < u32::from(arity) {
            return Err(Error::config("hashed tree codes need at least as many labels as children"));
        }
        let states = match memory {
            Some(w) => {
                let states = u64::from(arity).checked_pow(w as u32).filter(|&n| (1..=1 << 24).contains(&n));
                Some(states.ok_or_else(|| Error::config(format!("window of {w} branches is too large")))?)
            }
            None => None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for attempt in 1..=MAX_ATTEMPTS {
            let key = rng.gen();
            let labeling = match states {
                Some(states) => Labeling::Windowed { key, states },
                None => Labeling::Hashed { key },
            };
            let mut tc = TreeCode {
                arity,
                depth: None,
                label_size,
                alpha,
                seed,
                labeling,
                verified: false,
                verified_depth: 0,
                attempts: attempt,
                memory,
            };
            if tc.check_distance(alpha, verified_depth) {
                tc.verified = true;
                tc.verified_depth = verified_depth;
                return Ok(tc);
            }
        }
        Err(Error::Generation(format!(
            "no hashed tree code with distance {alpha} to depth {verified_depth} after {MAX_ATTEMPTS} keys"
        )))
    }

    pub fn from_spec(spec: &TreeCodeSpec) -> Result<Self> {
        match spec.depth {
            Some(depth) => tc_gen_verified(spec.arity, depth, spec.alpha, spec.label_size, spec.seed),
            None => Self::keyed_verified(spec.arity, spec.label_size, spec.alpha, spec.verified_depth, spec.seed, spec.memory),
        }
    }

    pub fn spec(&self) -> TreeCodeSpec {
        TreeCodeSpec {
            arity: self.arity,
            depth: self.depth,
            label_size: self.label_size,
            alpha: self.alpha,
            seed: self.seed,
            verified_depth: self.verified_depth,
            memory: self.memory,
        }
    }

    pub fn arity(&self) -> u8 {
        self.arity
    }

    pub fn depth(&self) -> Option<usize> {
        self.depth
    }

    pub fn label_size(&self) -> u32 {
        self.label_size
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn verified_depth(&self) -> usize {
        self.verified_depth
    }

    /// Labelings sampled before one verified.
    pub fn attempts(&self) -> u32 {
        self.attempts
    }

    fn root(&self) -> Node {
        match self.labeling {
            Labeling::Explicit(_) => Node(0),
            Labeling::Hashed { key } => Node(key),
            Labeling::Windowed { .. } => Node(0),
        }
    }

    fn child(&self, node: Node, branch: u8) -> Node {
        match self.labeling {
            Labeling::Explicit(_) => Node(node.0 * u64::from(self.arity) + u64::from(branch) + 1),
            Labeling::Hashed { .. } => Node(splitmix64(node.0 ^ (u64::from(branch) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))),
            Labeling::Windowed { states, .. } => {
                let depth = node.0 >> 32;
                let window = (node.0 & 0xFFFF_FFFF) * u64::from(self.arity) + u64::from(branch);
                Node(((depth + 1) << 32) | (window % states))
            }
        }
    }

    /// Labels of the edges to every child of `node`, in branch order.
    fn child_labels(&self, node: Node, out: &mut Vec<u32>) {
        out.clear();
        match &self.labeling {
            Labeling::Explicit(labels) => {
                let first = (node.0 * u64::from(self.arity)) as usize;
                out.extend_from_slice(&labels[first..first + self.arity as usize]);
            }
            Labeling::Hashed { .. } | Labeling::Windowed { .. } => {
                // distinct labels drawn without replacement from the node hash
                let mut state = match self.labeling {
                    Labeling::Windowed { key, .. } => splitmix64(node.0 ^ key),
                    _ => node.0,
                };
                let mut taken = [0u32; MAX_ARITY as usize];
                for j in 0..usize::from(self.arity) {
                    state = splitmix64(state);
                    let mut v = (state % u64::from(self.label_size - j as u32)) as u32;
                    let mut pos = 0;
                    while pos < j && v >= taken[pos] {
                        v += 1;
                        pos += 1;
                    }
                    taken.copy_within(pos..j, pos + 1);
                    taken[pos] = v;
                    out.push(v);
                }
            }
        }
    }

    fn check_path(&self, path: &[u8]) -> Result<()> {
        if let Some(depth) = self.depth {
            if path.len() > depth {
                return Err(Error::config(format!("path of length {} exceeds tree depth {depth}", path.len())));
            }
        }
        if let Some(&b) = path.iter().find(|&&b| b >= self.arity) {
            return Err(Error::config(format!("branch {b} outside arity {}", self.arity)));
        }
        Ok(())
    }

    /// Label of the edge taken from the end of `path_so_far` along `next`.
    pub fn encode_step(&self, path_so_far: &[u8], next: u8) -> Result<u32> {
        let mut full = path_so_far.to_vec();
        full.push(next);
        self.check_path(&full)?;
        let mut node = self.root();
        for &b in path_so_far {
            node = self.child(node, b);
        }
        let mut labels = Vec::with_capacity(self.arity as usize);
        self.child_labels(node, &mut labels);
        Ok(labels[next as usize])
    }

    /// Labels along `path`.
    pub fn encode(&self, path: &[u8]) -> Result<Vec<u32>> {
        self.check_path(path)?;
        let mut node = self.root();
        let mut labels = Vec::with_capacity(self.arity as usize);
        let mut out = Vec::with_capacity(path.len());
        for &b in path {
            self.child_labels(node, &mut labels);
            out.push(labels[b as usize]);
            node = self.child(node, b);
        }
        Ok(out)
    }

    /// Distance from the encoding of `path` to `received`; an erased position
    /// (`None`) counts 1 against every label.
    pub fn distance(&self, path: &[u8], received: &[Option<u32>]) -> Result<usize> {
        if path.len() != received.len() {
            return Err(Error::LengthMismatch { expected: received.len(), got: path.len() });
        }
        let enc = self.encode(path)?;
        Ok(enc.iter().zip(received).filter(|(l, r)| r.is_none_or(|r| r != **l)).count())
    }

    /// Minimum-distance decoding over all paths of length `received.len()`,
    /// ties broken by the lexicographically smallest path.
    ///
    /// Runs a uniform-cost search keyed on (distance, path); erased positions
    /// add the same cost to every path and are charged 0. If the search
    /// exceeds its expansion budget the result of a beam search is returned.
    pub fn decode(&self, received: &[Option<u32>]) -> Result<Vec<u8>> {
        self.decode_bounded(received, SEARCH_BUDGET, BEAM_WIDTH)
    }

    /// [`decode`](Self::decode) with an explicit expansion budget and beam
    /// width for the fallback.
    pub fn decode_bounded(&self, received: &[Option<u32>], budget: usize, beam_width: usize) -> Result<Vec<u8>> {
        let len = received.len();
        if let Some(depth) = self.depth {
            if len > depth {
                return Err(Error::LengthMismatch { expected: depth, got: len });
            }
        }
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0usize, Vec::<u8>::new(), self.root())));
        let mut labels = Vec::with_capacity(self.arity as usize);
        let mut expansions = 0usize;
        while let Some(Reverse((cost, path, node))) = heap.pop() {
            if path.len() == len {
                return Ok(path);
            }
            expansions += 1;
            if expansions > budget {
                return Ok(self.beam_decode(received, beam_width.max(1)));
            }
            self.child_labels(node, &mut labels);
            let want = received[path.len()];
            for b in 0..self.arity {
                let step = usize::from(want.is_some_and(|w| w != labels[b as usize]));
                let mut next = path.clone();
                next.push(b);
                heap.push(Reverse((cost + step, next, self.child(node, b))));
            }
        }
        unreachable!("search space is never empty")
    }

    fn beam_decode(&self, received: &[Option<u32>], width: usize) -> Vec<u8> {
        let mut beam: Vec<(usize, Vec<u8>, Node)> = vec![(0, Vec::new(), self.root())];
        let mut labels = Vec::with_capacity(self.arity as usize);
        for &want in received {
            let mut next = Vec::with_capacity(beam.len() * self.arity as usize);
            for (cost, path, node) in &beam {
                self.child_labels(*node, &mut labels);
                for b in 0..self.arity {
                    let step = usize::from(want.is_some_and(|w| w != labels[b as usize]));
                    let mut p = path.clone();
                    p.push(b);
                    next.push((cost + step, p, self.child(*node, b)));
                }
            }
            next.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            next.truncate(width);
            beam = next;
        }
        beam.swap_remove(0).1
    }

    /// Exhaustively checks the distance property for all levels `<= depth`.
    fn check_distance(&self, alpha: f64, depth: usize) -> bool {
        let mut labels = Vec::new();
        let mut frontier = vec![self.root()];
        for level in 0..depth {
            for &u in &frontier {
                self.child_labels(u, &mut labels);
                for c1 in 0..self.arity {
                    for c2 in (c1 + 1)..self.arity {
                        let d = usize::from(labels[c1 as usize] != labels[c2 as usize]);
                        let (a, b) = (self.child(u, c1), self.child(u, c2));
                        if !self.check_pair(a, b, 1, d, depth - level, alpha) {
                            return false;
                        }
                    }
                }
            }
            frontier = frontier
                .iter()
                .flat_map(|&u| (0..self.arity).map(move |c| (u, c)))
                .map(|(u, c)| self.child(u, c))
                .collect();
        }
        true
    }

    fn check_pair(&self, a: Node, b: Node, m: usize, dist: usize, remaining: usize, alpha: f64) -> bool {
        if (dist as f64) + 1e-9 < alpha * m as f64 {
            return false;
        }
        if m == remaining {
            return true;
        }
        let (mut la, mut lb) = (Vec::new(), Vec::new());
        self.child_labels(a, &mut la);
        self.child_labels(b, &mut lb);
        for x in 0..self.arity {
            for y in 0..self.arity {
                let d = dist + usize::from(la[x as usize] != lb[y as usize]);
                if !self.check_pair(self.child(a, x), self.child(b, y), m + 1, d, remaining, alpha) {
                    return false;
                }
            }
        }
        true
    }
}

/// Incremental list decoder. After every label it keeps the candidates
/// whose distance is within `slack` of the best one, at most `cap` of them
/// (smallest distance first, then lexicographically smallest path). Feeding
/// labels one at a time therefore gives the same list as running the search
/// over the whole prefix at once.
#[derive(Clone, Debug)]
pub struct BeamDecoder {
    slack: usize,
    cap: usize,
    beam: Vec<(usize, Vec<u8>, Node)>,
    labels: Vec<u32>,
}

impl BeamDecoder {
    pub fn new(code: &TreeCode, slack: usize, cap: usize) -> Self {
        BeamDecoder { slack, cap: cap.max(1), beam: vec![(0, Vec::new(), code.root())], labels: Vec::new() }
    }

    /// Extends every candidate by one level; `None` marks an erased label.
    pub fn push(&mut self, code: &TreeCode, received: Option<u32>) {
        let mut next = Vec::with_capacity(self.beam.len() * code.arity as usize);
        for (cost, path, node) in &self.beam {
            code.child_labels(*node, &mut self.labels);
            for b in 0..code.arity {
                let step = usize::from(received.is_none_or(|w| w != self.labels[b as usize]));
                let mut p = Vec::with_capacity(path.len() + 1);
                p.extend_from_slice(path);
                p.push(b);
                next.push((cost + step, p, code.child(*node, b)));
            }
        }
        // candidates reaching the same node share their future: keep the
        // cheapest, ties broken lexicographically
        let mut at: HashMap<Node, usize> = HashMap::with_capacity(next.len());
        let mut merged: Vec<(usize, Vec<u8>, Node)> = Vec::with_capacity(next.len());
        for cand in next {
            match at.entry(cand.2) {
                Entry::Occupied(e) => {
                    let kept = &mut merged[*e.get()];
                    if (cand.0, &cand.1) < (kept.0, &kept.1) {
                        *kept = cand;
                    }
                }
                Entry::Vacant(e) => {
                    e.insert(merged.len());
                    merged.push(cand);
                }
            }
        }
        let mut next = merged;
        let best = next.iter().map(|c| c.0).min().unwrap_or(0);
        next.retain(|c| c.0 <= best + self.slack);
        if next.len() > self.cap {
            next.select_nth_unstable_by(self.cap, |a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
            next.truncate(self.cap);
        }
        self.beam = next;
    }

    /// Best candidate so far and its distance to the received labels.
    pub fn best(&self) -> (&[u8], usize) {
        let (cost, path, _) = self.beam.iter().min_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1))).expect("never empty");
        (path, *cost)
    }

    /// Number of candidates currently kept.
    pub fn len(&self) -> usize {
        self.beam.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beam.is_empty()
    }
}

/// Rejection-samples explicit labelings of a `d`-ary tree of depth `depth`
/// until one has distance `alpha` at every level.
pub fn tc_gen_verified(arity: u8, depth: usize, alpha: f64, label_size: u32, seed: u64) -> Result<TreeCode> {
    check_shape(arity, label_size)?;
    let edges = explicit_edge_count(arity, depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let labels = (0..edges).map(|_| rng.gen_range(0..label_size)).collect();
        let mut tc = TreeCode {
            arity,
            depth: Some(depth),
            label_size,
            alpha,
            seed,
            labeling: Labeling::Explicit(labels),
            verified: false,
            verified_depth: 0,
            attempts: attempt,
            memory: None,
        };
        if tc.check_distance(alpha, depth) {
            tc.verified = true;
            tc.verified_depth = depth;
            return Ok(tc);
        }
    }
    Err(Error::Generation(format!(
        "no {arity}-ary tree code of depth {depth} with distance {alpha} over {label_size} labels after {MAX_ATTEMPTS} attempts"
    )))
}

fn check_shape(arity: u8, label_size: u32) -> Result<()> {
    if !(2..=MAX_ARITY).contains(&arity) || label_size < 2 {
        return Err(Error::config("tree codes need 2 <= arity <= 16 and at least two labels"));
    }
    Ok(())
}

fn explicit_edge_count(arity: u8, depth: usize) -> Result<usize> {
    let d = u64::from(arity);
    let mut level = 1u64;
    let mut total = 0u64;
    for _ in 0..depth {
        level = level.saturating_mul(d);
        total = total.saturating_add(level);
        if total > MAX_EXPLICIT_EDGES {
            return Err(Error::config(format!("explicit tree of arity {arity} and depth {depth} is too large")));
        }
    }
    Ok(total as usize)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
