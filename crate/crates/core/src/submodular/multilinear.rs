use rand::Rng;
use serde::{Deserialize, Serialize};

use super::SetFunctionSpec;
use crate::{rng, Error, Result};

/// Largest number of strictly fractional coordinates the exact multilinear
/// extension will enumerate (`2^k` outcomes).
pub const MAX_EXACT_FRACTIONAL: usize = 20;

/// A point of `[0,1]^E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityVector(Vec<f64>);

impl DensityVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some((u, v)) = x.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("density entry {u} is {v}, outside [0,1]")));
        }
        Ok(DensityVector(x))
    }

    pub fn zeros(len: usize) -> Self {
        DensityVector(vec![0.0; len])
    }

    pub fn indicator(len: usize, set: &[usize]) -> Self {
        let mut x = vec![0.0; len];
        for &e in set {
            x[e] = 1.0;
        }
        DensityVector(x)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `t · x` for `t ∈ [0,1]`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        DensityVector::new(self.0.iter().map(|v| v * t).collect())
    }

    /// Copy with coordinate `u` replaced.
    pub fn with(&self, u: usize, value: f64) -> Result<Self> {
        let mut x = self.0.clone();
        x[u] = value;
        DensityVector::new(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledEstimate {
    pub estimate: f64,
    /// Sample standard deviation over `√samples`; infinite for one sample.
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub prng: String,
}

fn check_dims(f: &SetFunctionSpec, x: &DensityVector) -> Result<()> {
    if x.len() != f.len() {
        return Err(Error::Domain(format!(
            "density has {} entries but the ground set has {}",
            x.len(),
            f.len()
        )));
    }
    Ok(())
}

/// Exact `E_{X∼x}[g(X)]`, enumerating only the fractional coordinates
/// (those with `0 < x_u < 1`) other than `skip`.
pub(crate) fn exact_expectation(x: &DensityVector, skip: Option<usize>, mut g: impl FnMut(&mut Vec<usize>) -> f64) -> Result<f64> {
    let mut fixed = Vec::new();
    let mut frac = Vec::new();
    for (u, &v) in x.values().iter().enumerate() {
        if Some(u) == skip {
            continue;
        }
        if v >= 1.0 {
            fixed.push(u);
        } else if v > 0.0 {
            frac.push(u);
        }
    }
    if frac.len() > MAX_EXACT_FRACTIONAL {
        return Err(Error::budget(
            "exact multilinear extension (fractional coordinates)",
            frac.len() as u128,
            MAX_EXACT_FRACTIONAL as u128,
        )
        .with_hint("use multilinear_sampled"));
    }
    let mut set = Vec::with_capacity(fixed.len() + frac.len() + 1);
    let mut total = 0.0;
    for mask in 0..1usize << frac.len() {
        let mut p = 1.0;
        set.clear();
        set.extend_from_slice(&fixed);
        for (b, &u) in frac.iter().enumerate() {
            if mask >> b & 1 == 1 {
                p *= x.values()[u];
                set.push(u);
            } else {
                p *= 1.0 - x.values()[u];
            }
        }
        total += p * g(&mut set);
    }
    Ok(total)
}

/// `F(x) = E_{X∼x}[f(X)]` with each element included independently.
pub fn multilinear_exact(f: &SetFunctionSpec, x: &DensityVector) -> Result<f64> {
    check_dims(f, x)?;
    exact_expectation(x, None, |set| f.value(set))
}

/// `∂F/∂x_u = E_{X∼x}[f(X + u) − f(X − u)]`, exact.
pub fn multilinear_gradient(f: &SetFunctionSpec, x: &DensityVector, u: usize) -> Result<f64> {
    check_dims(f, x)?;
    f.ground().check(&[u])?;
    exact_expectation(x, Some(u), |set| {
        let without = f.value(set);
        set.push(u);
        let with = f.value(set);
        set.pop();
        with - without
    })
}

/// Monte Carlo estimate of `F(x)`, reproducible per seed.
pub fn multilinear_sampled(f: &SetFunctionSpec, x: &DensityVector, samples: u64, seed: u64) -> Result<SampledEstimate> {
    check_dims(f, x)?;
    if samples == 0 {
        return Err(Error::Invalid("at least one sample is required".into()));
    }
    let mut rng = rng::seeded(seed);
    let mut stats = Welford::default();
    let mut set = Vec::with_capacity(f.len());
    for _ in 0..samples {
        set.clear();
        for (u, &p) in x.values().iter().enumerate() {
            let take = if p >= 1.0 {
                true
            } else if p <= 0.0 {
                false
            } else {
                rng.random::<f64>() < p
            };
            if take {
                set.push(u);
            }
        }
        stats.push(f.value(&set));
    }
    Ok(SampledEstimate {
        estimate: stats.mean,
        stderr: stats.stderr(),
        samples,
        seed,
        prng: rng::PRNG_NAME.to_string(),
    })
}

/// Streaming mean and variance.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Welford {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        let var = (self.m2 / (self.n - 1) as f64).max(0.0);
        (var / self.n as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submodular::{Coverage, GroundSet, SetFunctionKind};

    fn three_coverage() -> SetFunctionSpec {
        SetFunctionSpec::coverage(
            &["a", "b", "c"],
            &["x", "y", "z"],
            &[1.0, 2.0, 3.0],
            &[("a", vec!["x", "y"]), ("b", vec!["y"]), ("c", vec!["y", "z"])],
        )
        .unwrap()
    }

    #[test]
    fn degenerate_points() {
        let f = three_coverage();
        assert_eq!(multilinear_exact(&f, &DensityVector::zeros(3)).unwrap(), 0.0);
        let x = DensityVector::indicator(3, &[0, 2]);
        assert_eq!(multilinear_exact(&f, &x).unwrap(), f.value(&[0, 2]));
        let s = multilinear_sampled(&f, &x, 50, 9).unwrap();
        assert_eq!(s.estimate, f.value(&[0, 2]));
        assert_eq!(s.stderr, 0.0);
    }

    #[test]
    fn half_density_is_subset_average() {
        let f = three_coverage();
        let avg: f64 = (0..8usize)
            .map(|m| f.value(&(0..3).filter(|b| m >> b & 1 == 1).collect::<Vec<_>>()))
            .sum::<f64>()
            / 8.0;
        let got = multilinear_exact(&f, &DensityVector::new(vec![0.5; 3]).unwrap()).unwrap();
        assert!((got - avg).abs() < 1e-12);
    }

    #[test]
    fn modular_gradient_is_constant() {
        let f = SetFunctionSpec::new(
            GroundSet::new(["a", "b"]).unwrap(),
            SetFunctionKind::WeightedCoverage(
                Coverage::new(vec!["x".into(), "y".into()], vec![1.5, 2.5], vec![vec![0], vec![1]]).unwrap(),
            ),
        )
        .unwrap();
        for x in [vec![0.0, 0.0], vec![0.3, 0.9], vec![1.0, 1.0]] {
            let g = multilinear_gradient(&f, &DensityVector::new(x).unwrap(), 1).unwrap();
            assert!((g - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_ignores_own_coordinate() {
        let f = three_coverage();
        let x = DensityVector::new(vec![0.2, 0.7, 0.4]).unwrap();
        let g0 = multilinear_gradient(&f, &x.with(1, 0.0).unwrap(), 1).unwrap();
        let g1 = multilinear_gradient(&f, &x.with(1, 1.0).unwrap(), 1).unwrap();
        assert_eq!(g0, g1);
    }

    #[test]
    fn sampled_is_reproducible_and_within_band() {
        let f = three_coverage();
        let x = DensityVector::new(vec![0.2, 0.7, 0.4]).unwrap();
        let a = multilinear_sampled(&f, &x, 20_000, 42).unwrap();
        let b = multilinear_sampled(&f, &x, 20_000, 42).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        let exact = multilinear_exact(&f, &x).unwrap();
        assert!((a.estimate - exact).abs() <= 4.0 * a.stderr);
    }

    #[test]
    fn too_many_fractional_coordinates_is_refused() {
        let ground: Vec<String> = (0..25).map(|i| format!("e{i}")).collect();
        let f = SetFunctionSpec::coverage(&ground, &ground, &vec![1.0; 25], &[]).unwrap();
        let err = multilinear_exact(&f, &DensityVector::new(vec![0.5; 25]).unwrap()).unwrap_err();
        assert!(err.is_budget());
        assert!(err.to_string().contains("multilinear_sampled"));
        assert!(DensityVector::new(vec![1.5]).is_err());
    }
}
