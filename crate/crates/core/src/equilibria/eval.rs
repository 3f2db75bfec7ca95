use std::collections::HashMap;

use crate::game::GameDefinition;
use crate::Result;

/// Memoized `SW(a)` and `v(a)` lookups; every LP and check touches the same
/// few profiles many times.
pub(crate) struct Evaluator<'g> {
    g: &'g GameDefinition,
    cache: HashMap<Vec<usize>, (f64, Vec<f64>)>,
    scratch: Vec<usize>,
}

impl<'g> Evaluator<'g> {
    pub fn new(g: &'g GameDefinition) -> Self {
        Evaluator {
            g,
            cache: HashMap::new(),
            scratch: Vec::with_capacity(g.players()),
        }
    }

    pub fn game(&self) -> &'g GameDefinition {
        self.g
    }

    fn entry(&mut self, a: &[usize]) -> Result<&(f64, Vec<f64>)> {
        if !self.cache.contains_key(a) {
            let value = (self.g.sw(a), self.g.payoffs(a)?);
            self.cache.insert(a.to_vec(), value);
        }
        Ok(&self.cache[a])
    }

    pub fn sw(&mut self, a: &[usize]) -> Result<f64> {
        Ok(self.entry(a)?.0)
    }

    pub fn v(&mut self, i: usize, a: &[usize]) -> Result<f64> {
        Ok(self.entry(a)?.1[i])
    }

    /// `v_i(d, a_{−i})`.
    pub fn v_dev(&mut self, i: usize, a: &[usize], d: usize) -> Result<f64> {
        let mut b = std::mem::take(&mut self.scratch);
        b.clear();
        b.extend_from_slice(a);
        b[i] = d;
        let out = self.v(i, &b);
        self.scratch = b;
        out
    }
}

/// Support profile indices grouped by each player's own type:
/// `by_type[i][t]` lists the `k` with `θ^k_i = t`.
pub(crate) fn support_by_type(g: &GameDefinition) -> Vec<Vec<Vec<usize>>> {
    let prior = g.prior();
    (0..g.players())
        .map(|i| {
            let mut groups = vec![Vec::new(); g.type_count(i)];
            for k in 0..prior.len() {
                groups[prior.profile(k)[i]].push(k);
            }
            groups
        })
        .collect()
}

/// Sums duplicate variable indices, keeping first-appearance order.
pub(crate) fn merge_terms(terms: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let mut pos: HashMap<usize, usize> = HashMap::new();
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
    for (v, c) in terms {
        match pos.get(&v) {
            Some(&p) => out[p].1 += c,
            None => {
                pos.insert(v, out.len());
                out.push((v, c));
            }
        }
    }
    out
}
