//! The Pareto archive: the running set of mutually non-dominated designs.

use serde::{Deserialize, Serialize};

use crate::decoder::Genotype;
use crate::model::{ObjectiveVector, Solution};

/// One archived design with its decoded solution and objective pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub genotype: Genotype,
    pub solution: Solution,
    pub objectives: ObjectiveVector,
}

/// Mutually non-dominated set, kept sorted by rising first objective.
///
/// An entry leaves the archive only when a strictly dominating vector
/// enters. Exact duplicates of an archived objective vector are rejected,
/// so the first witness of each vector is the one kept; because equal
/// first objectives with unequal second objectives would imply dominance,
/// archived `obj1` values are pairwise distinct and the sort order is
/// unambiguous.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry> {
        self.entries
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.entries.iter().map(|e| e.objectives).collect()
    }

    /// Inserts a candidate. Returns `true` when the candidate enters the
    /// archive (evicting whatever it dominates), `false` when it is
    /// dominated by or equal to an archived vector.
    pub fn insert(&mut self, entry: ArchiveEntry) -> bool {
        let v = entry.objectives;
        if self.entries.iter().any(|e| e.objectives.dominates(&v) || e.objectives == v) {
            return false;
        }
        self.entries.retain(|e| !v.dominates(&e.objectives));
        let at = self
            .entries
            .partition_point(|e| e.objectives.obj1 < v.obj1);
        self.entries.insert(at, entry);
        true
    }

    /// Inserts every entry; returns how many entered.
    pub fn insert_all<I: IntoIterator<Item = ArchiveEntry>>(&mut self, entries: I) -> usize {
        entries.into_iter().filter(|e| self.insert(e.clone())).count()
    }

    /// Internal consistency: mutual non-dominance and sortedness.
    pub fn is_mutually_non_dominated(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, a)| {
            self.entries
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !a.objectives.dominates(&b.objectives))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(obj1: f64, obj2: f64) -> ArchiveEntry {
        ArchiveEntry {
            genotype: Genotype { site_bits: vec![true], priority: vec![0] },
            solution: Solution {
                open: vec![true],
                assignments: vec![vec![0]],
                lost_level: vec![None],
            },
            objectives: ObjectiveVector::new(obj1, obj2),
        }
    }

    #[test]
    fn dominated_candidates_are_rejected() {
        let mut archive = ParetoArchive::new();
        assert!(archive.insert(entry(1.0, 1.0)));
        assert!(!archive.insert(entry(2.0, 2.0)));
        assert_eq!(archive.len(), 1);
    }

    #[test]
    fn dominating_candidates_evict() {
        let mut archive = ParetoArchive::new();
        archive.insert(entry(2.0, 2.0));
        archive.insert(entry(3.0, 1.0));
        assert!(archive.insert(entry(1.0, 1.5)));
        // (2,2) evicted, (3,1) survives
        assert_eq!(archive.len(), 2);
        assert!(archive.is_mutually_non_dominated());
    }

    #[test]
    fn equal_vectors_keep_first_witness() {
        let mut archive = ParetoArchive::new();
        assert!(archive.insert(entry(1.0, 1.0)));
        assert!(!archive.insert(entry(1.0, 1.0)));
        assert_eq!(archive.len(), 1);
    }

    #[test]
    fn entries_sorted_by_obj1() {
        let mut archive = ParetoArchive::new();
        for (a, b) in [(3.0, 1.0), (1.0, 3.0), (2.0, 2.0)] {
            archive.insert(entry(a, b));
        }
        let objs = archive.objectives();
        assert!(objs.windows(2).all(|w| w[0].obj1 < w[1].obj1));
        assert_eq!(archive.len(), 3);
    }

    #[test]
    fn fuzz_archive_stays_consistent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut archive = ParetoArchive::new();
        for _ in 0..1000 {
            let a: f64 = rng.random_range(0.0..10.0);
            let b: f64 = rng.random_range(0.0..10.0);
            archive.insert(entry(a.round(), b.round()));
            assert!(archive.is_mutually_non_dominated());
        }
        assert!(!archive.is_empty());
    }
}
