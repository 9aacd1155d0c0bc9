use std::collections::HashMap;

/// Community label per node in global index order. Labels are always
/// contiguous from 0 and numbered by first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    labels: Vec<u32>,
    k: usize,
}

impl Assignment {
    /// Relabels arbitrary ids to contiguous first-occurrence order.
    pub fn from_labels<I, T>(labels: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<u64>,
    {
        let mut map: HashMap<u64, u32> = HashMap::new();
        let labels: Vec<u32> = labels
            .into_iter()
            .map(|l| {
                let next = map.len() as u32;
                *map.entry(l.into()).or_insert(next)
            })
            .collect();
        Self { k: map.len(), labels }
    }

    pub fn from_usize(labels: &[usize]) -> Self {
        Self::from_labels(labels.iter().map(|&l| l as u64))
    }

    /// Every node in its own community.
    pub fn singletons(n: usize) -> Self {
        Self { labels: (0..n as u32).collect(), k: n }
    }

    /// Every node in one community.
    pub fn single(n: usize) -> Self {
        Self { labels: vec![0; n], k: usize::from(n > 0) }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node] as usize
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of distinct communities.
    pub fn num_communities(&self) -> usize {
        self.k
    }

    /// Labels of the nodes `range`, relabeled.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Assignment {
        Self::from_labels(self.labels[range].iter().copied())
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }
}
