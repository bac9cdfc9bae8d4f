//! Undirected path lengths over a sentence's dependency tree.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::Sentence;
use crate::error::{Error, Result};

/// Parent links and depths of a validated dependency tree. Token `id`
/// lives at index `id - 1`.
#[derive(Debug, Clone)]
pub struct DepTree {
    parent: Vec<Option<u32>>,
    depth: Vec<u32>,
}

impl DepTree {
    /// Fails unless every head is present, in range, and the heads form
    /// one tree rooted at 0.
    pub fn new(sentence: &Sentence) -> Result<Self> {
        let n = sentence.tokens.len();
        let structural = |message| Error::Structure {
            sent_id: sentence.sent_id.clone(),
            message,
        };
        let mut parent = Vec::with_capacity(n);
        let mut roots = 0;
        for t in &sentence.tokens {
            let head = t
                .head
                .ok_or_else(|| structural(format!("token {} lacks a head", t.id)))?;
            if head as usize > n {
                return Err(structural(format!("token {} has head {head} out of range", t.id)));
            }
            if head == t.id {
                return Err(structural(format!("token {} heads itself", t.id)));
            }
            if head == 0 {
                roots += 1;
                parent.push(None);
            } else {
                parent.push(Some(head));
            }
        }
        if n > 0 && roots != 1 {
            return Err(structural(format!("{roots} root tokens, expected 1")));
        }

        const UNSET: u32 = u32::MAX;
        let mut depth = vec![UNSET; n];
        let mut chain = Vec::new();
        for start in 0..n {
            chain.clear();
            let mut cur = start;
            let base = loop {
                if depth[cur] != UNSET {
                    break depth[cur];
                }
                if chain.len() > n {
                    return Err(structural(format!("cycle through token {}", start + 1)));
                }
                match parent[cur] {
                    None => {
                        depth[cur] = 0;
                        break 0;
                    }
                    Some(p) => {
                        chain.push(cur);
                        cur = p as usize - 1;
                    }
                }
            };
            for (d, &node) in (base + 1..).zip(chain.iter().rev()) {
                depth[node] = d;
            }
        }
        Ok(Self { parent, depth })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn head(&self, id: u32) -> Option<u32> {
        self.parent[id as usize - 1]
    }

    /// Number of edges on the path between two tokens.
    pub fn distance(&self, a: u32, b: u32) -> u32 {
        let (mut a, mut b) = (a, b);
        let mut steps = 0;
        while a != b {
            let da = self.depth[a as usize - 1];
            let db = self.depth[b as usize - 1];
            if da >= db {
                a = self.parent[a as usize - 1].expect("non-root has a parent");
            } else {
                b = self.parent[b as usize - 1].expect("non-root has a parent");
            }
            steps += 1;
        }
        steps
    }

    /// Smallest pairwise distance among the given tokens.
    pub fn min_pairwise(&self, ids: &[u32]) -> Option<u32> {
        let mut best = None;
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                let d = self.distance(a, b);
                best = Some(best.map_or(d, |x: u32| x.min(d)));
            }
        }
        best
    }
}
