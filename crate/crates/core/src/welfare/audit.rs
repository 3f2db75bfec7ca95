use rand::Rng;
use serde::Serialize;

use super::opt::{compute_opt, OptimalProfileCertificate};
use super::strategy::{compute_str, StrMode};
use crate::game::GameDefinition;
use crate::rng::{seeded, shard_seed, Prng, PRNG_NAME};
use crate::submodular::{exact_expectation, DensityVector, SampledEstimate, SetFunctionSpec, Welford, MAX_EXACT_FRACTIONAL};
use crate::{one_minus_inv_e, Budget, Error, Result, EXACT_TOL};

/// `w_i^{θ_i}(a_i)`: how often `a_i` appears in the certified optimum given
/// the player's own type. `w[i][t]` is aligned with `g.actions(i, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginalProfile {
    pub w: Vec<Vec<Vec<f64>>>,
}

pub fn marginal_profile(g: &GameDefinition, cert: &OptimalProfileCertificate) -> MarginalProfile {
    let prior = g.prior();
    let mut w: Vec<Vec<Vec<f64>>> = (0..g.players())
        .map(|i| (0..g.type_count(i)).map(|t| vec![0.0; g.actions(i, t).len()]).collect())
        .collect();
    for k in 0..prior.len() {
        let theta = prior.profile(k);
        for (i, &t) in theta.iter().enumerate() {
            let a = cert.profile(k)[i];
            let pos = g.actions(i, t).iter().position(|&b| b == a).expect("certificate profile is feasible");
            w[i][t][pos] += prior.prob(k) / prior.marginal(i, t);
        }
    }
    MarginalProfile { w }
}

/// Heavy actions `C_i^{θ_i} = {w ≥ 1/√n}` and light densities
/// `y = √n·w` (zero on heavy actions), aligned with `g.actions(i, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeavyLightSplit {
    pub sqrt_n: f64,
    pub heavy: Vec<Vec<Vec<usize>>>,
    pub y: Vec<Vec<Vec<f64>>>,
}

pub fn heavy_light_split(g: &GameDefinition, mp: &MarginalProfile) -> HeavyLightSplit {
    let sqrt_n = (g.players() as f64).sqrt();
    let threshold = 1.0 / sqrt_n - 1e-12;
    let mut heavy = Vec::new();
    let mut y = Vec::new();
    for (i, per_type) in mp.w.iter().enumerate() {
        let mut h_i = Vec::new();
        let mut y_i = Vec::new();
        for (t, ws) in per_type.iter().enumerate() {
            let mut h = Vec::new();
            let mut yy = Vec::with_capacity(ws.len());
            for (&a, &w) in g.actions(i, t).iter().zip(ws) {
                if w >= threshold {
                    h.push(a);
                    yy.push(0.0);
                } else {
                    yy.push((sqrt_n * w).min(1.0));
                }
            }
            h_i.push(h);
            y_i.push(yy);
        }
        heavy.push(h_i);
        y.push(y_i);
    }
    HeavyLightSplit { sqrt_n, heavy, y }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditTerm {
    pub value: f64,
    /// Zero when computed exactly.
    pub stderr: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditInequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub band: f64,
    /// `rhs − lhs`; the inequality holds when `slack ≥ −band`.
    pub slack: f64,
    pub holds: bool,
}

/// Every term of the correlated-prior bound `OPT ≤ (2 + 1/(1−1/e))·√n·STR`,
/// with the slack of each step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SrBoundAudit {
    pub players: usize,
    pub sqrt_n: usize,
    pub opt: f64,
    pub str_value: f64,
    pub str_mode: &'static str,
    /// `Σ_θ ρ(θ) Σ_i E_B[f(a_i^θ | B_i ∪ C_i)]`.
    pub term_a: AuditTerm,
    /// `E_θ E_B[f(∪_i B_i)]`.
    pub term_b: AuditTerm,
    /// `E_θ[f(∪_i C_i)]`.
    pub term_c: AuditTerm,
    /// `(1−1/e)/n · Σ_i E_θ[F(y_i)]`.
    pub term_d: AuditTerm,
    pub inequalities: Vec<AuditInequality>,
    pub samples: u64,
    pub seed: u64,
    pub prng: String,
}

impl SrBoundAudit {
    pub fn holds(&self) -> bool {
        self.inequalities.iter().all(|q| q.holds)
    }
}

/// Accumulates `Σ coef·E[g(X)]` over independent densities, exactly when the
/// fractional support is small and by Monte Carlo otherwise.
struct TermBuilder {
    value: f64,
    variance: f64,
    exact: bool,
    samples: u64,
    seed: u64,
    shard: u64,
}

impl TermBuilder {
    fn new(samples: u64, seed: u64, shard: u64) -> Self {
        TermBuilder {
            value: 0.0,
            variance: 0.0,
            exact: true,
            samples,
            seed,
            shard: shard << 32,
        }
    }

    fn add(&mut self, coef: f64, x: &DensityVector, mut g: impl FnMut(&mut Vec<usize>) -> f64) -> Result<()> {
        self.shard += 1;
        let fractional = x.values().iter().filter(|&&v| v > 0.0 && v < 1.0).count();
        if fractional <= MAX_EXACT_FRACTIONAL {
            self.value += coef * exact_expectation(x, None, g)?;
            return Ok(());
        }
        self.exact = false;
        let mut rng: Prng = seeded(shard_seed(self.seed, self.shard));
        let mut stats = Welford::default();
        let mut set = Vec::new();
        for _ in 0..self.samples {
            set.clear();
            for (u, &p) in x.values().iter().enumerate() {
                if p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p) {
                    set.push(u);
                }
            }
            stats.push(g(&mut set));
        }
        self.value += coef * stats.mean;
        self.variance += (coef * stats.stderr()).powi(2);
        Ok(())
    }

    fn finish(self) -> AuditTerm {
        AuditTerm {
            value: self.value,
            stderr: self.variance.sqrt(),
            exact: self.exact,
        }
    }
}

fn density(f: &SetFunctionSpec, parts: &[(&[usize], &[f64])], fixed: &[usize]) -> Result<DensityVector> {
    let mut x = vec![0.0; f.len()];
    for (actions, ys) in parts {
        for (&a, &y) in actions.iter().zip(ys.iter()) {
            x[a] = y;
        }
    }
    for &a in fixed {
        x[a] = 1.0;
    }
    DensityVector::new(x)
}

/// Evaluates each term of the correlated-prior bound and checks every step
/// of the chain. Requires a perfect-square number of players. Terms whose
/// random sets have more than a few fractional coordinates are estimated
/// with `samples` draws and get 4-standard-error bands.
pub fn sr_bound_audit(g: &GameDefinition, str_mode: StrMode, samples: u64, seed: u64, budget: &Budget) -> Result<SrBoundAudit> {
    let n = g.players();
    let root = (n as f64).sqrt().round() as usize;
    if root * root != n {
        return Err(Error::Domain(format!(
            "the bound audit needs a perfect-square number of players, got {n}"
        )));
    }
    if samples == 0 {
        return Err(Error::Invalid("at least one sample is required".into()));
    }
    let f = g.welfare();
    let prior = g.prior();
    let cert = compute_opt(g, budget)?;
    let str_result = compute_str(g, str_mode, budget)?;
    let mp = marginal_profile(g, &cert);
    let split = heavy_light_split(g, &mp);

    // (a) = Σ_i Σ_{θ_i} ρ_i(θ_i) E_B[Σ_a w(a) f(a | B ∪ C)].
    let mut a_term = TermBuilder::new(samples, seed, 1);
    for i in 0..n {
        for t in 0..g.type_count(i) {
            let actions = g.actions(i, t);
            let x = density(f, &[(actions, &split.y[i][t])], &split.heavy[i][t])?;
            let ws = &mp.w[i][t];
            a_term.add(prior.marginal(i, t), &x, |set| {
                let base = f.value(set);
                let mut total = 0.0;
                for (&a, &w) in actions.iter().zip(ws) {
                    if w > 0.0 && !set.contains(&a) {
                        set.push(a);
                        total += w * (f.value(set) - base);
                        set.pop();
                    }
                }
                total
            })?;
        }
    }

    // (b), (c) per support profile.
    let mut b_term = TermBuilder::new(samples, seed, 2);
    let mut c = 0.0;
    for k in 0..prior.len() {
        let theta = prior.profile(k);
        let parts: Vec<(&[usize], &[f64])> = theta
            .iter()
            .enumerate()
            .map(|(i, &t)| (g.actions(i, t), split.y[i][t].as_slice()))
            .collect();
        let x = density(f, &parts, &[])?;
        b_term.add(prior.prob(k), &x, |set| f.value(set))?;
        let heavy: Vec<usize> = theta.iter().enumerate().flat_map(|(i, &t)| split.heavy[i][t].iter().copied()).collect();
        c += prior.prob(k) * f.value(&heavy);
    }

    // (d) = (1−1/e)/n Σ_i Σ_{θ_i} ρ_i(θ_i) F(y_i^{θ_i}).
    let mut d_term = TermBuilder::new(samples, seed, 3);
    for i in 0..n {
        for t in 0..g.type_count(i) {
            let x = density(f, &[(g.actions(i, t), &split.y[i][t])], &[])?;
            d_term.add(one_minus_inv_e() / n as f64 * prior.marginal(i, t), &x, |set| f.value(set))?;
        }
    }

    let term_a = a_term.finish();
    let term_b = b_term.finish();
    let term_c = AuditTerm {
        value: c,
        stderr: 0.0,
        exact: true,
    };
    let term_d = d_term.finish();
    let band = |terms: &[&AuditTerm]| {
        let se = terms.iter().map(|t| t.stderr.powi(2)).sum::<f64>().sqrt();
        if terms.iter().all(|t| t.exact) {
            EXACT_TOL
        } else {
            4.0 * se + EXACT_TOL
        }
    };
    let opt = cert.value;
    let s = str_result.value;
    let rn = root as f64;
    let e = one_minus_inv_e();
    let ineq = |name: &str, lhs: f64, rhs: f64, band: f64| AuditInequality {
        name: name.to_string(),
        lhs,
        rhs,
        band,
        slack: rhs - lhs,
        holds: rhs - lhs >= -band,
    };
    let inequalities = vec![
        ineq("STR >= d", term_d.value, s, band(&[&term_d])),
        ineq(
            "OPT <= a + b + c",
            opt,
            term_a.value + term_b.value + term_c.value,
            band(&[&term_a, &term_b]),
        ),
        ineq("a <= sqrt(n) STR / (1 - 1/e)", term_a.value, rn * s / e, band(&[&term_a])),
        ineq("b <= sqrt(n) STR", term_b.value, rn * s, band(&[&term_b])),
        ineq("c <= sqrt(n) STR", term_c.value, rn * s, EXACT_TOL),
        ineq("OPT <= (2 + 1/(1 - 1/e)) sqrt(n) STR", opt, (2.0 + 1.0 / e) * rn * s, EXACT_TOL),
    ];
    Ok(SrBoundAudit {
        players: n,
        sqrt_n: root,
        opt,
        str_value: s,
        str_mode: str_result.mode,
        term_a,
        term_b,
        term_c,
        term_d,
        inequalities,
        samples,
        seed,
        prng: PRNG_NAME.to_string(),
    })
}

/// Monte Carlo welfare of the randomized strategy profile that plays each
/// `a_i` with probability `w_i^{θ_i}(a_i)`, independently per player and
/// type. A lower bound on STR up to sampling error.
pub fn str_sampling_lower_bound(g: &GameDefinition, mp: &MarginalProfile, samples: u64, seed: u64) -> Result<SampledEstimate> {
    if samples == 0 {
        return Err(Error::Invalid("at least one sample is required".into()));
    }
    let prior = g.prior();
    let mut rng = seeded(seed);
    let mut stats = Welford::default();
    let mut a = vec![0; g.players()];
    for _ in 0..samples {
        let k = pick(&mut rng, prior.probs());
        let theta = prior.profile(k);
        for (i, &t) in theta.iter().enumerate() {
            a[i] = g.actions(i, t)[pick(&mut rng, &mp.w[i][t])];
        }
        stats.push(g.sw(&a));
    }
    Ok(SampledEstimate {
        estimate: stats.mean,
        stderr: stats.stderr(),
        samples,
        seed,
        prng: PRNG_NAME.to_string(),
    })
}

/// Inverse-CDF draw from unnormalized-safe probabilities.
fn pick(rng: &mut Prng, probs: &[f64]) -> usize {
    let total: f64 = probs.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (i, &p) in probs.iter().enumerate() {
        if r < p {
            return i;
        }
        r -= p;
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
