use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::GroundSet;
use crate::{Error, Result};

/// Largest ground set an [`SetFunctionKind::ExplicitTable`] may be defined on.
pub const MAX_TABLE_GROUND: usize = 20;

/// Weighted coverage: each ground element covers a subset of a weighted
/// universe and `f(X)` is the total weight covered by `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coverage {
    universe: Vec<String>,
    weights: Vec<f64>,
    covers: Vec<Vec<usize>>,
    masks: Option<Vec<u128>>,
}

impl Coverage {
    pub fn new(universe: Vec<String>, weights: Vec<f64>, covers: Vec<Vec<usize>>) -> Result<Self> {
        if universe.len() != weights.len() {
            return Err(Error::Invalid(format!(
                "coverage universe has {} elements but {} weights",
                universe.len(),
                weights.len()
            )));
        }
        if let Some((u, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::Invalid(format!(
                "universe element `{}` has invalid weight {w}",
                universe[u]
            )));
        }
        for cover in &covers {
            if let Some(&u) = cover.iter().find(|&&u| u >= universe.len()) {
                return Err(Error::Invalid(format!("cover references universe index {u}")));
            }
        }
        let masks = (universe.len() <= 128).then(|| {
            covers
                .iter()
                .map(|c| c.iter().fold(0u128, |m, &u| m | (1u128 << u)))
                .collect()
        });
        Ok(Coverage {
            universe,
            weights,
            covers,
            masks,
        })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Universe indices covered by ground element `element`.
    pub fn covers(&self, element: usize) -> &[usize] {
        &self.covers[element]
    }

    fn ground_len(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, set: &[usize]) -> f64 {
        match &self.masks {
            Some(masks) => {
                let mut m = set.iter().fold(0u128, |m, &e| m | masks[e]);
                let mut total = 0.0;
                while m != 0 {
                    total += self.weights[m.trailing_zeros() as usize];
                    m &= m - 1;
                }
                total
            }
            None => {
                let mut hit = vec![false; self.universe.len()];
                for &e in set {
                    for &u in &self.covers[e] {
                        hit[u] = true;
                    }
                }
                hit.iter()
                    .zip(&self.weights)
                    .filter(|(h, _)| **h)
                    .map(|(_, w)| w)
                    .sum()
            }
        }
    }
}

/// `f(X) = Σ_r u_r(load_r(X))` where each element adds an integer load to
/// some resources and every `u_r` is non-decreasing and concave.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcaveLoad {
    resources: Vec<String>,
    payoffs: Vec<Vec<f64>>,
    usage: Vec<Vec<(usize, u32)>>,
}

impl ConcaveLoad {
    /// `payoffs[r][x]` tabulates `u_r` at integer load `x`; past the end of
    /// the table `u_r` continues linearly with its last increment.
    pub fn new(resources: Vec<String>, payoffs: Vec<Vec<f64>>, usage: Vec<Vec<(usize, u32)>>) -> Result<Self> {
        if resources.len() != payoffs.len() {
            return Err(Error::Invalid("one payoff table per resource is required".into()));
        }
        for (name, table) in resources.iter().zip(&payoffs) {
            check_concave_table(name, table)?;
        }
        for uses in &usage {
            if let Some(&(r, _)) = uses.iter().find(|(r, _)| *r >= resources.len()) {
                return Err(Error::Invalid(format!("usage references resource index {r}")));
            }
        }
        Ok(ConcaveLoad {
            resources,
            payoffs,
            usage,
        })
    }

    pub fn resources(&self) -> &[String] {
        &self.resources
    }

    pub fn payoffs(&self) -> &[Vec<f64>] {
        &self.payoffs
    }

    /// `(resource, weight)` pairs loaded by ground element `element`.
    pub fn usage(&self, element: usize) -> &[(usize, u32)] {
        &self.usage[element]
    }

    pub fn payoff(&self, resource: usize, load: u64) -> f64 {
        let t = &self.payoffs[resource];
        let last = t.len() - 1;
        if (load as usize) <= last {
            t[load as usize]
        } else if last == 0 {
            t[0]
        } else {
            t[last] + (load - last as u64) as f64 * (t[last] - t[last - 1])
        }
    }

    /// Per-resource loads of a set (duplicates counted once).
    pub fn loads(&self, set: &[usize]) -> Vec<u64> {
        let mut elems = set.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let mut loads = vec![0u64; self.resources.len()];
        for e in elems {
            for &(r, w) in &self.usage[e] {
                loads[r] += w as u64;
            }
        }
        loads
    }

    fn value(&self, set: &[usize]) -> f64 {
        self.loads(set)
            .iter()
            .enumerate()
            .map(|(r, &l)| self.payoff(r, l))
            .sum()
    }
}

fn check_concave_table(name: &str, table: &[f64]) -> Result<()> {
    if table.is_empty() {
        return Err(Error::Invalid(format!("payoff table of `{name}` is empty")));
    }
    if table.iter().any(|v| !v.is_finite()) || table[0] < 0.0 {
        return Err(Error::Invalid(format!("payoff table of `{name}` must be finite with u(0) >= 0")));
    }
    for x in 1..table.len() {
        if table[x] < table[x - 1] - 1e-12 {
            return Err(Error::Invalid(format!(
                "payoff table of `{name}` decreases at load {x}"
            )));
        }
        if x >= 2 && table[x] - table[x - 1] > table[x - 1] - table[x - 2] + 1e-12 {
            return Err(Error::Invalid(format!(
                "payoff table of `{name}` is not concave at load {x}"
            )));
        }
    }
    Ok(())
}

/// One scenario of a [`PushforwardMixture`]: every element is relabelled to a
/// base element, the base function is evaluated on the image, and the result
/// is weighted.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub map: Vec<usize>,
}

/// `f(X) = Σ_k weight_k · base(map_k(X))`. Monotone submodular whenever the
/// base is and all weights are non-negative.
#[derive(Clone, Debug, PartialEq)]
pub struct PushforwardMixture {
    pub base: Box<SetFunctionSpec>,
    pub components: Vec<MixtureComponent>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SetFunctionKind {
    WeightedCoverage(Coverage),
    /// Values indexed by bitmask over the ground order.
    ExplicitTable(Vec<f64>),
    /// Coverage welfare paired with a per-player priority class
    /// (`true` = high priority) used by the priority sharing utility rule.
    PrioritySharingCoverage {
        coverage: Coverage,
        high_priority: Vec<bool>,
    },
    ConcaveLoad(ConcaveLoad),
    PushforwardMixture(PushforwardMixture),
}

/// A set function together with its ground set.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFunctionSpec {
    ground: GroundSet,
    kind: SetFunctionKind,
}

impl SetFunctionSpec {
    pub fn new(ground: GroundSet, kind: SetFunctionKind) -> Result<Self> {
        let g = ground.len();
        match &kind {
            SetFunctionKind::WeightedCoverage(c) | SetFunctionKind::PrioritySharingCoverage { coverage: c, .. } => {
                if c.ground_len() != g {
                    return Err(Error::Invalid(format!(
                        "coverage defines {} cover sets for a ground of size {g}",
                        c.ground_len()
                    )));
                }
            }
            SetFunctionKind::ExplicitTable(values) => {
                if g > MAX_TABLE_GROUND {
                    return Err(Error::Invalid(format!(
                        "explicit tables are limited to {MAX_TABLE_GROUND} ground elements, got {g}"
                    )));
                }
                if values.len() != 1usize << g {
                    return Err(Error::Invalid(format!(
                        "explicit table over {g} elements needs {} values, got {}",
                        1usize << g,
                        values.len()
                    )));
                }
                if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
                    return Err(Error::Invalid(format!("explicit table contains invalid value {v}")));
                }
            }
            SetFunctionKind::ConcaveLoad(c) => {
                if c.usage.len() != g {
                    return Err(Error::Invalid("one usage list per ground element is required".into()));
                }
            }
            SetFunctionKind::PushforwardMixture(m) => {
                let base_len = m.base.len();
                for comp in &m.components {
                    if !comp.weight.is_finite() || comp.weight < 0.0 {
                        return Err(Error::Invalid(format!("mixture weight {} is invalid", comp.weight)));
                    }
                    if comp.map.len() != g || comp.map.iter().any(|&b| b >= base_len) {
                        return Err(Error::Invalid("mixture map does not match the ground sets".into()));
                    }
                }
            }
        }
        Ok(SetFunctionSpec { ground, kind })
    }

    /// Weighted coverage from ids. Ground elements missing from `covers`
    /// cover nothing.
    pub fn coverage<S: AsRef<str>>(
        ground: &[S],
        universe: &[S],
        weights: &[f64],
        covers: &[(S, Vec<S>)],
    ) -> Result<Self> {
        let ground = GroundSet::new(ground.iter().map(|s| s.as_ref().to_string()))?;
        let universe_ids: Vec<String> = universe.iter().map(|s| s.as_ref().to_string()).collect();
        let uni = GroundSet::new(universe_ids.clone())?;
        let mut sets = vec![Vec::new(); ground.len()];
        for (e, cov) in covers {
            let idx = ground
                .index_of(e.as_ref())
                .ok_or_else(|| Error::Invalid(format!("cover given for unknown element `{}`", e.as_ref())))?;
            sets[idx] = uni.resolve(cov)?;
        }
        let coverage = Coverage::new(universe_ids, weights.to_vec(), sets)?;
        SetFunctionSpec::new(ground, SetFunctionKind::WeightedCoverage(coverage))
    }

    /// Explicit table from `(subset, value)` pairs; all `2^|ground|` subsets
    /// must be listed exactly once.
    pub fn table<S: AsRef<str>>(ground: &[S], entries: &[(Vec<S>, f64)]) -> Result<Self> {
        let ground = GroundSet::new(ground.iter().map(|s| s.as_ref().to_string()))?;
        if ground.len() > MAX_TABLE_GROUND {
            return Err(Error::Invalid(format!(
                "explicit tables are limited to {MAX_TABLE_GROUND} ground elements"
            )));
        }
        let mut values = vec![f64::NAN; 1usize << ground.len()];
        for (set, v) in entries {
            let mask = ground.resolve(set)?.iter().fold(0usize, |m, &e| m | (1 << e));
            if !values[mask].is_nan() {
                return Err(Error::Invalid(format!("subset {:?} listed twice", ground.names(&mask_elements(mask))))) ;
            }
            values[mask] = *v;
        }
        if let Some(mask) = values.iter().position(|v| v.is_nan()) {
            return Err(Error::Invalid(format!(
                "explicit table is missing subset {:?}",
                ground.names(&mask_elements(mask))
            )));
        }
        SetFunctionSpec::new(ground, SetFunctionKind::ExplicitTable(values))
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn kind(&self) -> &SetFunctionKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    /// Coverage structure of the welfare, if it is a coverage variant.
    pub fn as_coverage(&self) -> Option<&Coverage> {
        match &self.kind {
            SetFunctionKind::WeightedCoverage(c) => Some(c),
            SetFunctionKind::PrioritySharingCoverage { coverage, .. } => Some(coverage),
            _ => None,
        }
    }

    /// `f(X)`. Duplicated elements are treated as one.
    pub fn evaluate(&self, set: &[usize]) -> Result<f64> {
        self.ground.check(set)?;
        Ok(self.value(set))
    }

    /// `f(X)` without bounds checks on the element indices.
    pub fn value(&self, set: &[usize]) -> f64 {
        match &self.kind {
            SetFunctionKind::WeightedCoverage(c)
            | SetFunctionKind::PrioritySharingCoverage { coverage: c, .. } => c.value(set),
            SetFunctionKind::ExplicitTable(values) => {
                values[set.iter().fold(0usize, |m, &e| m | (1 << e))]
            }
            SetFunctionKind::ConcaveLoad(c) => c.value(set),
            SetFunctionKind::PushforwardMixture(m) => {
                let mut image = Vec::with_capacity(set.len());
                m.components
                    .iter()
                    .map(|comp| {
                        image.clear();
                        image.extend(set.iter().map(|&e| comp.map[e]));
                        comp.weight * m.base.value(&image)
                    })
                    .sum()
            }
        }
    }

    /// `f(u | X) = f(X + u) - f(X)`.
    pub fn marginal(&self, element: usize, set: &[usize]) -> Result<f64> {
        self.ground.check(&[element])?;
        self.ground.check(set)?;
        if set.contains(&element) {
            return Ok(0.0);
        }
        let mut with = set.to_vec();
        with.push(element);
        Ok(self.value(&with) - self.value(set))
    }

    /// True when monotonicity and submodularity follow from the
    /// representation alone (coverage, concave loads, and non-negative
    /// mixtures of those).
    pub fn structurally_submodular(&self) -> bool {
        match &self.kind {
            SetFunctionKind::WeightedCoverage(_)
            | SetFunctionKind::PrioritySharingCoverage { .. }
            | SetFunctionKind::ConcaveLoad(_) => true,
            SetFunctionKind::ExplicitTable(_) => false,
            SetFunctionKind::PushforwardMixture(m) => m.base.structurally_submodular(),
        }
    }

    /// True when `element` provably never changes the value
    /// (covers nothing / loads nothing / maps only to such elements).
    pub fn structurally_null(&self, element: usize) -> Option<bool> {
        match &self.kind {
            SetFunctionKind::WeightedCoverage(c)
            | SetFunctionKind::PrioritySharingCoverage { coverage: c, .. } => {
                Some(c.covers(element).iter().all(|&u| c.weights[u] == 0.0))
            }
            SetFunctionKind::ConcaveLoad(c) => Some(c.usage(element).iter().all(|&(_, w)| w == 0)),
            SetFunctionKind::ExplicitTable(_) => None,
            SetFunctionKind::PushforwardMixture(m) => {
                let mut all = true;
                for comp in &m.components {
                    match m.base.structurally_null(comp.map[element]) {
                        Some(true) => {}
                        Some(false) => all = false,
                        None => return None,
                    }
                }
                Some(all)
            }
        }
    }

    pub fn to_json(&self) -> SetFunctionJson {
        let ground = self.ground.ids().to_vec();
        let covers_json = |c: &Coverage| -> BTreeMap<String, Vec<String>> {
            (0..self.ground.len())
                .map(|e| {
                    (
                        self.ground.id(e).to_string(),
                        c.covers(e).iter().map(|&u| c.universe[u].clone()).collect(),
                    )
                })
                .collect()
        };
        match &self.kind {
            SetFunctionKind::WeightedCoverage(c) => SetFunctionJson::WeightedCoverage {
                ground,
                universe: c.universe.clone(),
                weights: c.weights.clone(),
                covers: covers_json(c),
            },
            SetFunctionKind::PrioritySharingCoverage {
                coverage,
                high_priority,
            } => SetFunctionJson::PrioritySharingCoverage {
                ground,
                universe: coverage.universe.clone(),
                weights: coverage.weights.clone(),
                covers: covers_json(coverage),
                high_priority: high_priority.clone(),
            },
            SetFunctionKind::ExplicitTable(values) => SetFunctionJson::ExplicitTable {
                table: values
                    .iter()
                    .enumerate()
                    .map(|(mask, &value)| TableEntry {
                        set: self.ground.names(&mask_elements(mask)),
                        value,
                    })
                    .collect(),
                ground,
            },
            SetFunctionKind::ConcaveLoad(c) => SetFunctionJson::ConcaveLoad {
                resources: c.resources.clone(),
                payoffs: c.payoffs.clone(),
                usage: (0..self.ground.len())
                    .map(|e| {
                        (
                            self.ground.id(e).to_string(),
                            c.usage[e].iter().map(|&(r, w)| (c.resources[r].clone(), w)).collect(),
                        )
                    })
                    .collect(),
                ground,
            },
            SetFunctionKind::PushforwardMixture(m) => SetFunctionJson::PushforwardMixture {
                base: Box::new(m.base.to_json()),
                components: m
                    .components
                    .iter()
                    .map(|comp| MixtureComponentJson {
                        weight: comp.weight,
                        map: (0..self.ground.len())
                            .map(|e| (self.ground.id(e).to_string(), m.base.ground.id(comp.map[e]).to_string()))
                            .collect(),
                    })
                    .collect(),
                ground,
            },
        }
    }

    pub fn from_json(json: &SetFunctionJson) -> Result<Self> {
        match json {
            SetFunctionJson::WeightedCoverage {
                ground,
                universe,
                weights,
                covers,
            } => {
                let (g, c) = coverage_from_json(ground, universe, weights, covers)?;
                SetFunctionSpec::new(g, SetFunctionKind::WeightedCoverage(c))
            }
            SetFunctionJson::PrioritySharingCoverage {
                ground,
                universe,
                weights,
                covers,
                high_priority,
            } => {
                let (g, c) = coverage_from_json(ground, universe, weights, covers)?;
                SetFunctionSpec::new(
                    g,
                    SetFunctionKind::PrioritySharingCoverage {
                        coverage: c,
                        high_priority: high_priority.clone(),
                    },
                )
            }
            SetFunctionJson::ExplicitTable { ground, table } => {
                let entries: Vec<(Vec<&str>, f64)> = table
                    .iter()
                    .map(|t| (t.set.iter().map(String::as_str).collect(), t.value))
                    .collect();
                let ground: Vec<&str> = ground.iter().map(String::as_str).collect();
                SetFunctionSpec::table(&ground, &entries)
            }
            SetFunctionJson::ConcaveLoad {
                ground,
                resources,
                payoffs,
                usage,
            } => {
                let g = GroundSet::new(ground.clone())?;
                let res = GroundSet::new(resources.clone())?;
                let mut uses = vec![Vec::new(); g.len()];
                for (e, list) in usage {
                    let idx = g
                        .index_of(e)
                        .ok_or_else(|| Error::Invalid(format!("usage given for unknown element `{e}`")))?;
                    uses[idx] = list
                        .iter()
                        .map(|(r, w)| {
                            res.index_of(r)
                                .map(|ri| (ri, *w))
                                .ok_or_else(|| Error::Invalid(format!("unknown resource `{r}`")))
                        })
                        .collect::<Result<_>>()?;
                }
                let c = ConcaveLoad::new(resources.clone(), payoffs.clone(), uses)?;
                SetFunctionSpec::new(g, SetFunctionKind::ConcaveLoad(c))
            }
            SetFunctionJson::PushforwardMixture {
                ground,
                base,
                components,
            } => {
                let g = GroundSet::new(ground.clone())?;
                let base = SetFunctionSpec::from_json(base)?;
                let comps = components
                    .iter()
                    .map(|c| {
                        let mut map = vec![usize::MAX; g.len()];
                        for (from, to) in &c.map {
                            let f = g
                                .index_of(from)
                                .ok_or_else(|| Error::Invalid(format!("mixture maps unknown element `{from}`")))?;
                            map[f] = base.ground.resolve(&[to])?[0];
                        }
                        if map.contains(&usize::MAX) {
                            return Err(Error::Invalid("mixture map must be total".into()));
                        }
                        Ok(MixtureComponent { weight: c.weight, map })
                    })
                    .collect::<Result<_>>()?;
                SetFunctionSpec::new(
                    g,
                    SetFunctionKind::PushforwardMixture(PushforwardMixture {
                        base: Box::new(base),
                        components: comps,
                    }),
                )
            }
        }
    }
}

fn coverage_from_json(
    ground: &[String],
    universe: &[String],
    weights: &[f64],
    covers: &BTreeMap<String, Vec<String>>,
) -> Result<(GroundSet, Coverage)> {
    let g = GroundSet::new(ground.to_vec())?;
    let uni = GroundSet::new(universe.to_vec())?;
    let mut sets = vec![Vec::new(); g.len()];
    for (e, cov) in covers {
        let idx = g
            .index_of(e)
            .ok_or_else(|| Error::Invalid(format!("cover given for unknown element `{e}`")))?;
        sets[idx] = uni.resolve(cov)?;
    }
    Ok((g, Coverage::new(universe.to_vec(), weights.to_vec(), sets)?))
}

pub(crate) fn mask_elements(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|b| mask >> b & 1 == 1).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub set: Vec<String>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponentJson {
    pub weight: f64,
    pub map: BTreeMap<String, String>,
}

/// Serialized form of a [`SetFunctionSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SetFunctionJson {
    WeightedCoverage {
        ground: Vec<String>,
        universe: Vec<String>,
        weights: Vec<f64>,
        covers: BTreeMap<String, Vec<String>>,
    },
    ExplicitTable {
        ground: Vec<String>,
        table: Vec<TableEntry>,
    },
    PrioritySharingCoverage {
        ground: Vec<String>,
        universe: Vec<String>,
        weights: Vec<f64>,
        covers: BTreeMap<String, Vec<String>>,
        high_priority: Vec<bool>,
    },
    ConcaveLoad {
        ground: Vec<String>,
        resources: Vec<String>,
        payoffs: Vec<Vec<f64>>,
        usage: BTreeMap<String, Vec<(String, u32)>>,
    },
    PushforwardMixture {
        ground: Vec<String>,
        base: Box<SetFunctionJson>,
        components: Vec<MixtureComponentJson>,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 0.01;

    fn figure2_coverage() -> SetFunctionSpec {
        SetFunctionSpec::coverage(
            &["a1", "a1p", "a2", "a2p"],
            &["u1", "u2", "u3"],
            &[2.0, 1.0, EPS],
            &[
                ("a1", vec!["u3"]),
                ("a1p", vec!["u1"]),
                ("a2", vec!["u1", "u3"]),
                ("a2p", vec!["u2"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn figure2_values() {
        let f = figure2_coverage();
        assert!((f.evaluate(&[2]).unwrap() - 2.01).abs() < 1e-12);
        assert_eq!(f.evaluate(&[]).unwrap(), 0.0);
        // a2 on top of the u1-coverer only adds u3
        assert!((f.marginal(2, &[1]).unwrap() - 0.01).abs() < 1e-12);
        assert_eq!(f.marginal(2, &[2, 0]).unwrap(), 0.0);
    }

    #[test]
    fn unknown_element_is_a_domain_error() {
        let f = figure2_coverage();
        assert!(matches!(f.evaluate(&[7]), Err(Error::Domain(_))));
        assert!(matches!(f.marginal(9, &[]), Err(Error::Domain(_))));
    }

    #[test]
    fn random_coverage_matches_hand_union() {
        // 4 elements over a 5-element universe
        let covers = [vec![0, 1], vec![1, 2], vec![4], vec![0, 4]];
        let weights = [0.3, 1.2, 0.5, 2.0, 0.7];
        let f = SetFunctionSpec::new(
            GroundSet::new(["e0", "e1", "e2", "e3"]).unwrap(),
            SetFunctionKind::WeightedCoverage(
                Coverage::new(
                    (0..5).map(|u| format!("u{u}")).collect(),
                    weights.to_vec(),
                    covers.to_vec(),
                )
                .unwrap(),
            ),
        )
        .unwrap();
        // union {0,1,2,4}: universe element 3 is never covered
        assert!((f.evaluate(&[0, 1, 2, 3]).unwrap() - (0.3 + 1.2 + 0.5 + 0.7)).abs() < 1e-12);
    }

    #[test]
    fn disjoint_covers_give_modular_marginals() {
        let f = SetFunctionSpec::coverage(
            &["a", "b", "c"],
            &["x", "y", "z"],
            &[1.0, 2.0, 4.0],
            &[("a", vec!["x"]), ("b", vec!["y"]), ("c", vec!["z"])],
        )
        .unwrap();
        for set in [vec![], vec![0], vec![2], vec![0, 2]] {
            assert_eq!(f.marginal(1, &set).unwrap(), 2.0);
        }
    }

    #[test]
    fn table_requires_every_subset() {
        let err = SetFunctionSpec::table(&["a", "b"], &[(vec![], 0.0), (vec!["a"], 1.0), (vec!["b"], 1.0)]);
        assert!(matches!(err, Err(Error::Invalid(_))));
        let f = SetFunctionSpec::table(
            &["a", "b"],
            &[(vec![], 0.0), (vec!["a"], 1.0), (vec!["b"], 1.0), (vec!["a", "b"], 3.0)],
        )
        .unwrap();
        assert_eq!(f.evaluate(&[1, 0]).unwrap(), 3.0);
    }

    #[test]
    fn concave_load_extrapolates_and_refuses_convex_tables() {
        let f = ConcaveLoad::new(vec!["r".into()], vec![vec![0.0, 1.0, 2.0, 2.0]], vec![vec![(0, 2)], vec![(0, 3)]]).unwrap();
        assert_eq!(f.value(&[0, 1]), 2.0);
        assert!(ConcaveLoad::new(vec!["r".into()], vec![vec![0.0, 1.0, 3.0]], vec![]).is_err());
        let lin = ConcaveLoad::new(vec!["r".into()], vec![vec![0.0, 1.0]], vec![]).unwrap();
        assert_eq!(lin.payoff(0, 5), 5.0);
    }

    #[test]
    fn json_round_trip_preserves_values() {
        let f = figure2_coverage();
        let back = SetFunctionSpec::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let text = serde_json::to_string(&f.to_json()).unwrap();
        assert!(text.starts_with("{\"variant\":\"weighted_coverage\""));
    }
}
