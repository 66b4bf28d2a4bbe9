use std::collections::HashSet;

use serde::{Deserialize, Serialize, Serializer};

/// Partition of points into clusters, numbered in first-visit order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub cluster_count: usize,
}

impl ClusterAssignment {
    pub fn singletons(n: usize) -> Self {
        ClusterAssignment {
            labels: (0..n).collect(),
            cluster_count: n,
        }
    }

    /// Members of each cluster, in label order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }
}

/// Model complexity recorded at each path point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ActiveSet {
    /// Sorted indices of nonzero coefficients.
    Support(Vec<usize>),
    Rank(usize),
    Partition(ClusterAssignment),
}

impl Serialize for ActiveSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ActiveSet::Support(idx) => idx.serialize(s),
            ActiveSet::Rank(r) => r.serialize(s),
            ActiveSet::Partition(a) => a.labels.serialize(s),
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(state: &mut u64, bytes: &[u8]) {
    for &b in bytes {
        *state ^= b as u64;
        *state = state.wrapping_mul(FNV_PRIME);
    }
}

impl ActiveSet {
    /// Stable 64-bit FNV-1a hash, identical across platforms and runs.
    pub fn hash64(&self) -> u64 {
        let mut h = FNV_OFFSET;
        let (tag, values): (u8, &[usize]) = match self {
            ActiveSet::Support(v) => (0, v),
            ActiveSet::Rank(r) => (1, std::slice::from_ref(r)),
            ActiveSet::Partition(a) => (2, &a.labels),
        };
        fnv1a(&mut h, &[tag]);
        fnv1a(&mut h, &(values.len() as u64).to_le_bytes());
        for &v in values {
            fnv1a(&mut h, &(v as u64).to_le_bytes());
        }
        h
    }

    /// Support size, rank, or number of clusters.
    pub fn size(&self) -> usize {
        match self {
            ActiveSet::Support(v) => v.len(),
            ActiveSet::Rank(r) => *r,
            ActiveSet::Partition(a) => a.cluster_count,
        }
    }

    /// Jaccard similarity of two supports; two empty supports score 1.
    /// `None` unless both are supports.
    pub fn jaccard(&self, other: &ActiveSet) -> Option<f64> {
        match (self, other) {
            (ActiveSet::Support(a), ActiveSet::Support(b)) => {
                if a.is_empty() && b.is_empty() {
                    return Some(1.0);
                }
                let sa: HashSet<usize> = a.iter().copied().collect();
                let inter = b.iter().filter(|j| sa.contains(j)).count();
                let union = a.len() + b.len() - inter;
                Some(inter as f64 / union as f64)
            }
            _ => None,
        }
    }
}

/// Number of distinct active sets, by stable hash.
pub fn distinct_count<'a, I: IntoIterator<Item = &'a ActiveSet>>(sets: I) -> usize {
    sets.into_iter()
        .map(ActiveSet::hash64)
        .collect::<HashSet<_>>()
        .len()
}
