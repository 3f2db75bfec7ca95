use serde::{Deserialize, Serialize};

use super::{multilinear_exact, DensityVector, SetFunctionSpec};
use crate::{one_minus_inv_e, Budget, Error, Result, EXACT_TOL};

const SUM_TOL: f64 = 1e-12;

/// A ratio of expectations. A zero denominator makes the ratio vacuous
/// instead of NaN or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ratio {
    Value(f64),
    Vacuous,
}

impl Ratio {
    pub fn of(numerator: f64, denominator: f64) -> Self {
        if denominator == 0.0 {
            Ratio::Vacuous
        } else {
            Ratio::Value(numerator / denominator)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(v) => Some(v),
            Ratio::Vacuous => None,
        }
    }

    /// `ratio ≥ bound − tol`; vacuous ratios satisfy every bound.
    pub fn at_least(self, bound: f64, tol: f64) -> bool {
        self.value().is_none_or(|v| v >= bound - tol)
    }

    /// `ratio ≤ bound + tol`; vacuous ratios satisfy every bound.
    pub fn at_most(self, bound: f64, tol: f64) -> bool {
        self.value().is_none_or(|v| v <= bound + tol)
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ratio::Value(v) => write!(f, "{v:.6}"),
            Ratio::Vacuous => f.write_str("vacuous"),
        }
    }
}

/// Finite distribution over subsets of a ground set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetDistribution {
    ground_len: usize,
    support: Vec<(Vec<usize>, f64)>,
}

impl SubsetDistribution {
    pub fn new(ground_len: usize, support: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let mut total = 0.0;
        let mut cleaned = Vec::with_capacity(support.len());
        for (mut set, p) in support {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("probability {p} outside [0,1]")));
            }
            if let Some(e) = set.iter().find(|&&e| e >= ground_len) {
                return Err(Error::Domain(format!("element index {e} outside the ground set")));
            }
            set.sort_unstable();
            set.dedup();
            total += p;
            cleaned.push((set, p));
        }
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(SubsetDistribution {
            ground_len,
            support: cleaned,
        })
    }

    pub fn point_mass(ground_len: usize, set: Vec<usize>) -> Result<Self> {
        SubsetDistribution::new(ground_len, vec![(set, 1.0)])
    }

    pub fn ground_len(&self) -> usize {
        self.ground_len
    }

    pub fn support(&self) -> &[(Vec<usize>, f64)] {
        &self.support
    }

    pub fn expectation(&self, f: &SetFunctionSpec) -> Result<f64> {
        if f.len() != self.ground_len {
            return Err(Error::Domain("distribution and function use different ground sets".into()));
        }
        Ok(self.support.iter().map(|(s, p)| p * f.value(s)).sum())
    }
}

/// Inclusion marginals `p_u = Pr(u ∈ X)`.
pub fn independent_counterpart(d: &SubsetDistribution) -> DensityVector {
    let mut x = vec![0.0; d.ground_len];
    for (set, p) in &d.support {
        for &u in set {
            x[u] += p;
        }
    }
    for v in &mut x {
        *v = v.clamp(0.0, 1.0);
    }
    DensityVector::new(x).expect("marginals are clamped to [0,1]")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationGapReport {
    pub e_corr: f64,
    pub e_indep: f64,
    pub ratio: Ratio,
    /// `ratio ≥ 1 − 1/e` within the exact tolerance.
    pub holds: bool,
}

/// Compares `E_{X∼d}[f(X)]` with the multilinear extension at the
/// independent counterpart of `d`.
pub fn correlation_gap_check(f: &SetFunctionSpec, d: &SubsetDistribution) -> Result<CorrelationGapReport> {
    let e_corr = d.expectation(f)?;
    let e_indep = multilinear_exact(f, &independent_counterpart(d))?;
    let ratio = Ratio::of(e_indep, e_corr);
    Ok(CorrelationGapReport {
        e_corr,
        e_indep,
        ratio,
        holds: e_indep >= one_minus_inv_e() * e_corr - EXACT_TOL,
    })
}

/// Picks exactly one element from each block independently, element `u`
/// of a block with probability `p_u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionProductDistribution {
    ground_len: usize,
    blocks: Vec<Vec<(usize, f64)>>,
}

impl PartitionProductDistribution {
    pub fn new(ground_len: usize, blocks: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let mut seen = vec![false; ground_len];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::Domain("partition blocks must be non-empty".into()));
            }
            let mut total = 0.0;
            for &(u, p) in block {
                if u >= ground_len {
                    return Err(Error::Domain(format!("element index {u} outside the ground set")));
                }
                if std::mem::replace(&mut seen[u], true) {
                    return Err(Error::Domain(format!("element index {u} appears in two blocks")));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Domain(format!("probability {p} outside [0,1]")));
                }
                total += p;
            }
            if (total - 1.0).abs() > SUM_TOL {
                return Err(Error::Domain(format!("block probabilities sum to {total}, not 1")));
            }
        }
        Ok(PartitionProductDistribution { ground_len, blocks })
    }

    pub fn blocks(&self) -> &[Vec<(usize, f64)>] {
        &self.blocks
    }

    /// Number of joint outcomes (product of block sizes).
    pub fn outcomes(&self) -> u128 {
        self.blocks
            .iter()
            .try_fold(1u128, |acc, b| acc.checked_mul(b.len() as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn marginals(&self) -> DensityVector {
        let mut x = vec![0.0; self.ground_len];
        for block in &self.blocks {
            for &(u, p) in block {
                x[u] = p;
            }
        }
        DensityVector::new(x).expect("probabilities validated")
    }

    /// Explicit product support, outcomes in lexicographic block order.
    pub fn to_subset_distribution(&self, budget: &Budget) -> Result<SubsetDistribution> {
        budget.require("partition-product support", self.outcomes())?;
        let mut support = vec![(Vec::new(), 1.0)];
        for block in &self.blocks {
            support = support
                .into_iter()
                .flat_map(|(set, p): (Vec<usize>, f64)| {
                    block.iter().map(move |&(u, q)| {
                        let mut s = set.clone();
                        s.push(u);
                        (s, p * q)
                    })
                })
                .collect();
        }
        // the product is exact up to rounding; renormalise tiny drift
        let total: f64 = support.iter().map(|(_, p)| p).sum();
        for (_, p) in &mut support {
            *p /= total;
        }
        SubsetDistribution::new(self.ground_len, support)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionProductReport {
    pub e_partition: f64,
    pub e_indep: f64,
    /// `e_partition ≥ e_indep` within the exact tolerance.
    pub holds: bool,
}

/// One element per block beats independent inclusion with the same marginals.
pub fn partition_product_check(
    f: &SetFunctionSpec,
    d: &PartitionProductDistribution,
    budget: &Budget,
) -> Result<PartitionProductReport> {
    if f.len() != d.ground_len {
        return Err(Error::Domain("distribution and function use different ground sets".into()));
    }
    let e_partition = d.to_subset_distribution(budget)?.expectation(f)?;
    let e_indep = multilinear_exact(f, &d.marginals())?;
    Ok(PartitionProductReport {
        e_partition,
        e_indep,
        holds: e_partition >= e_indep - EXACT_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `min(|X|, 1)` on {a, b}.
    fn at_least_one() -> SetFunctionSpec {
        SetFunctionSpec::coverage(&["a", "b"], &["x"], &[1.0], &[("a", vec!["x"]), ("b", vec!["x"])]).unwrap()
    }

    #[test]
    fn counterpart_examples() {
        let d = SubsetDistribution::point_mass(3, vec![2, 0]).unwrap();
        assert_eq!(independent_counterpart(&d).values(), &[1.0, 0.0, 1.0]);
        let d = SubsetDistribution::new(2, vec![(vec![0], 0.5), (vec![1], 0.5)]).unwrap();
        assert_eq!(independent_counterpart(&d).values(), &[0.5, 0.5]);
    }

    #[test]
    fn correlation_gap_two_singletons() {
        let d = SubsetDistribution::new(2, vec![(vec![0], 0.5), (vec![1], 0.5)]).unwrap();
        let r = correlation_gap_check(&at_least_one(), &d).unwrap();
        assert_eq!(r.e_corr, 1.0);
        assert!((r.e_indep - 0.75).abs() < 1e-12);
        assert!(r.holds);
        assert!((r.ratio.value().unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn point_mass_ratio_is_one_and_zero_is_vacuous() {
        let f = at_least_one();
        let r = correlation_gap_check(&f, &SubsetDistribution::point_mass(2, vec![1]).unwrap()).unwrap();
        assert_eq!(r.ratio, Ratio::Value(1.0));
        let r = correlation_gap_check(&f, &SubsetDistribution::point_mass(2, vec![]).unwrap()).unwrap();
        assert_eq!(r.ratio, Ratio::Vacuous);
        assert_eq!(r.ratio.to_string(), "vacuous");
    }

    #[test]
    fn single_block_partition() {
        let d = PartitionProductDistribution::new(2, vec![vec![(0, 0.5), (1, 0.5)]]).unwrap();
        let r = partition_product_check(&at_least_one(), &d, &Budget::default()).unwrap();
        assert_eq!(r.e_partition, 1.0);
        assert!((r.e_indep - 0.75).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn singleton_blocks_match_exactly() {
        let d = PartitionProductDistribution::new(2, vec![vec![(0, 1.0)], vec![(1, 1.0)]]).unwrap();
        let r = partition_product_check(&at_least_one(), &d, &Budget::default()).unwrap();
        assert_eq!(r.e_partition, r.e_indep);
    }

    #[test]
    fn partition_marginals_expand_correctly() {
        let d = PartitionProductDistribution::new(4, vec![vec![(0, 0.25), (1, 0.75)], vec![(2, 0.4), (3, 0.6)]]).unwrap();
        let sd = d.to_subset_distribution(&Budget::default()).unwrap();
        assert_eq!(sd.support().len(), 4);
        let x = independent_counterpart(&sd);
        for (a, b) in x.values().iter().zip([0.25, 0.75, 0.4, 0.6]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn malformed_distributions_are_rejected() {
        assert!(SubsetDistribution::new(2, vec![(vec![0], 0.5)]).is_err());
        assert!(PartitionProductDistribution::new(2, vec![vec![(0, 1.0)], vec![(0, 1.0)]]).is_err());
        assert!(PartitionProductDistribution::new(2, vec![vec![(0, 0.5), (1, 0.4)]]).is_err());
    }
}
