//! Genotype encoding and the greedy capacity-aware decoder.
//!
//! A [`Genotype`] is an open-site bitstring plus a customer priority
//! permutation. [`decode`] walks customers in priority order and fills each
//! customer's levels `0..R-1` with the nearest distinct open sites that
//! still have residual capacity for the customer's full demand; the first
//! level with no such site becomes the customer's lost level. Distance ties
//! break on ascending site id, so decoding is deterministic.
//!
//! When a facility-count target is enforced, bitstrings with the wrong
//! cardinality are repaired by opening or closing uniformly random sites
//! ([`repair`]); solvers keep their populations conformant so the decoder
//! itself never draws randomness on their behalf.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ProblemInstance, Solution};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("facility-count target {target} exceeds the {sites} candidate sites")]
    FacilityCountTooLarge { target: usize, sites: usize },
    #[error("genotype does not fit the instance: {0}")]
    GenotypeShape(String),
    #[error("site bits carry {actual} open sites but the target is {target}")]
    NonconformantBits { target: usize, actual: usize },
}

/// Search-space point: which sites to open and in which order customers
/// get to claim capacity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Genotype {
    pub site_bits: Vec<bool>,
    pub priority: Vec<usize>,
}

impl Genotype {
    /// Uniformly random genotype; bits are repaired to `facility_count`
    /// when a target is given.
    pub fn random<R: Rng>(
        n_sites: usize,
        n_customers: usize,
        facility_count: Option<usize>,
        rng: &mut R,
    ) -> Result<Self, DecodeError> {
        let mut site_bits: Vec<bool> = (0..n_sites).map(|_| rng.random_bool(0.5)).collect();
        if let Some(p) = facility_count {
            repair(&mut site_bits, p, rng)?;
        }
        let mut priority: Vec<usize> = (0..n_customers).collect();
        // Fisher-Yates, explicit so draw order is pinned down
        for i in (1..priority.len()).rev() {
            let k = rng.random_range(0..=i);
            priority.swap(i, k);
        }
        Ok(Genotype { site_bits, priority })
    }

    pub fn open_count(&self) -> usize {
        self.site_bits.iter().filter(|&&b| b).count()
    }

    /// Hamming distance between the site bitstrings (priority is ignored).
    pub fn site_hamming(&self, other: &Genotype) -> usize {
        self.site_bits
            .iter()
            .zip(&other.site_bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn validate(&self, instance: &ProblemInstance) -> Result<(), DecodeError> {
        if self.site_bits.len() != instance.n_sites() {
            return Err(DecodeError::GenotypeShape(format!(
                "{} site bits for {} sites",
                self.site_bits.len(),
                instance.n_sites()
            )));
        }
        if self.priority.len() != instance.n_customers() {
            return Err(DecodeError::GenotypeShape(format!(
                "priority over {} customers, instance has {}",
                self.priority.len(),
                instance.n_customers()
            )));
        }
        let mut seen = vec![false; self.priority.len()];
        for &i in &self.priority {
            if i >= seen.len() || seen[i] {
                return Err(DecodeError::GenotypeShape(format!(
                    "priority is not a permutation (offending entry {i})"
                )));
            }
            seen[i] = true;
        }
        Ok(())
    }
}

/// Decoder knobs: the optional p-median facility count. Assignment depth
/// always comes from the instance's `R`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub facility_count: Option<usize>,
}

impl DecodeConfig {
    pub fn with_facility_count(facility_count: Option<usize>) -> Self {
        DecodeConfig { facility_count }
    }
}

/// Forces the bitstring to exactly `target` open sites by closing (or
/// opening) uniformly random sites. No-op when the count already matches.
pub fn repair<R: Rng>(site_bits: &mut [bool], target: usize, rng: &mut R) -> Result<(), DecodeError> {
    if target > site_bits.len() {
        return Err(DecodeError::FacilityCountTooLarge { target, sites: site_bits.len() });
    }
    let open: Vec<usize> = (0..site_bits.len()).filter(|&j| site_bits[j]).collect();
    if open.len() > target {
        let surplus = open.len() - target;
        for k in index::sample(rng, open.len(), surplus) {
            site_bits[open[k]] = false;
        }
    } else if open.len() < target {
        let closed: Vec<usize> = (0..site_bits.len()).filter(|&j| !site_bits[j]).collect();
        let deficit = target - open.len();
        for k in index::sample(rng, closed.len(), deficit) {
            site_bits[closed[k]] = true;
        }
    }
    Ok(())
}

/// Decodes a genotype into a feasible [`Solution`], repairing the site
/// bits first when a facility count is enforced and violated.
pub fn decode<R: Rng>(
    instance: &ProblemInstance,
    genotype: &Genotype,
    config: &DecodeConfig,
    rng: &mut R,
) -> Result<Solution, DecodeError> {
    genotype.validate(instance)?;
    let mut bits = genotype.site_bits.clone();
    if let Some(p) = config.facility_count {
        if genotype.open_count() != p {
            repair(&mut bits, p, rng)?;
        } else if p > bits.len() {
            return Err(DecodeError::FacilityCountTooLarge { target: p, sites: bits.len() });
        }
    }
    Ok(greedy_assign(instance, bits, &genotype.priority))
}

/// Like [`decode`] but refuses genotypes whose site bits violate the
/// facility-count target instead of repairing them. Needs no RNG, which
/// makes it the right entry point for parallel population evaluation.
pub fn decode_strict(
    instance: &ProblemInstance,
    genotype: &Genotype,
    config: &DecodeConfig,
) -> Result<Solution, DecodeError> {
    genotype.validate(instance)?;
    if let Some(p) = config.facility_count {
        if p > instance.n_sites() {
            return Err(DecodeError::FacilityCountTooLarge { target: p, sites: instance.n_sites() });
        }
        let actual = genotype.open_count();
        if actual != p {
            return Err(DecodeError::NonconformantBits { target: p, actual });
        }
    }
    Ok(greedy_assign(instance, genotype.site_bits.clone(), &genotype.priority))
}

fn greedy_assign(instance: &ProblemInstance, open: Vec<bool>, priority: &[usize]) -> Solution {
    let r_levels = instance.r_levels();
    let open_sites: Vec<usize> = (0..instance.n_sites()).filter(|&j| open[j]).collect();
    let mut used = vec![0.0f64; instance.n_sites()];
    let mut assignments = vec![Vec::new(); instance.n_customers()];
    let mut lost_level = vec![None; instance.n_customers()];

    for &i in priority {
        let demand = instance.customers()[i].demand;
        let mut order = open_sites.clone();
        order.sort_by(|&a, &b| {
            instance
                .distance(i, a)
                .total_cmp(&instance.distance(i, b))
                .then(instance.sites()[a].id.cmp(&instance.sites()[b].id))
        });
        let levels: &mut Vec<usize> = &mut assignments[i];
        for r in 0..r_levels {
            let next = order.iter().copied().find(|&j| {
                !levels.contains(&j) && used[j] + demand <= instance.sites()[j].capacity
            });
            match next {
                Some(j) => {
                    levels.push(j);
                    used[j] += demand;
                }
                None => {
                    lost_level[i] = Some(r);
                    break;
                }
            }
        }
    }
    Solution { open, assignments, lost_level }
}
