use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WayError};
use crate::obs::{observable_distance, DiscreteObservable};
use crate::qcore::eig::herm_eig_unchecked;
use crate::qcore::{ComplexMatrix, StateVector};

use super::yen::{reference_weights, weighted_average};
use super::{CovariantObservable, Representation};

/// Supports above this many subsets are searched by windows plus swaps.
const EXHAUSTIVE_LIMIT: u64 = 20_000;

/// How many generator eigenstates a reference state may occupy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Limited(usize),
    Unlimited,
}

impl Budget {
    pub fn resolve(self, dim: usize) -> Result<usize> {
        match self {
            Budget::Unlimited => Ok(dim),
            Budget::Limited(m) if m >= 1 && m <= dim => Ok(m),
            Budget::Limited(m) => Err(WayError::InfeasibleBudget { budget: m, dim }),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Limited(m) => write!(f, "{m}"),
            Budget::Unlimited => f.write_str("unlimited"),
        }
    }
}

impl FromStr for Budget {
    type Err = WayError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "unlimited" | "inf" => Ok(Budget::Unlimited),
            t => t
                .parse()
                .map(Budget::Limited)
                .map_err(|_| WayError::Parse(format!("bad budget {s:?}"))),
        }
    }
}

/// Best localised reference state for one budget.
#[derive(Debug, Clone)]
pub struct Localised {
    pub state: StateVector,
    /// `⟨η|F(at)|η⟩`.
    pub probability: f64,
    /// Indices into the generator's ascending eigenbasis.
    pub support: Vec<usize>,
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k) as u64;
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n as u64 - i) / (i + 1);
        if acc > EXHAUSTIVE_LIMIT * 1000 {
            return u64::MAX;
        }
    }
    acc
}

/// Cyclic windows of the eigen-ordering first, then, when small enough,
/// every other `m`-subset in lexicographic order. The flag tells whether the
/// list is exhaustive.
pub(crate) fn candidate_supports(n: usize, m: usize) -> (Vec<Vec<usize>>, bool) {
    if m == n {
        return (vec![(0..n).collect()], true);
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        let mut w: Vec<usize> = (0..m).map(|j| (start + j) % n).collect();
        w.sort_unstable();
        if !out.contains(&w) {
            out.push(w);
        }
    }
    if binomial(n, m) > EXHAUSTIVE_LIMIT {
        return (out, false);
    }
    let windows = out.clone();
    let mut comb: Vec<usize> = (0..m).collect();
    loop {
        if !windows.contains(&comb) {
            out.push(comb.clone());
        }
        let mut i = m;
        while i > 0 && comb[i - 1] == n - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        comb[i - 1] += 1;
        for j in i..m {
            comb[j] = comb[j - 1] + 1;
        }
    }
    (out, true)
}

/// Columns of the generator eigenbasis selected by `support`.
pub(crate) fn support_basis(rep: &Representation, support: &[usize]) -> Vec<Vec<C64>> {
    support.iter().map(|&j| rep.eigen().vectors.column(j)).collect()
}

/// Expands coefficients on a support into a full state.
pub(crate) fn embed(basis: &[Vec<C64>], coeffs: &[C64]) -> Vec<C64> {
    let d = basis[0].len();
    let mut v = vec![C64::new(0.0, 0.0); d];
    for (b, c) in basis.iter().zip(coeffs) {
        v.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
    }
    v
}

fn best_on_support(effect: &ComplexMatrix, basis: &[Vec<C64>]) -> (f64, Vec<C64>) {
    let m = basis.len();
    let images: Vec<Vec<C64>> = basis.iter().map(|b| effect.mul_vec(b)).collect();
    let compressed = ComplexMatrix::from_fn(m, m, |i, j| crate::qcore::inner(&basis[i], &images[j]));
    let eig = herm_eig_unchecked(&compressed.hermitian_part());
    let top = eig.values[m - 1];
    (top, embed(basis, &eig.vectors.column(m - 1)))
}

/// Maximises `⟨η|F(at)|η⟩` over states supported on at most `budget`
/// generator eigenstates. Ties go to the earliest candidate support.
pub fn localise(f: &CovariantObservable, at: i64, budget: Budget) -> Result<Localised> {
    let rep = f.rep();
    let d = rep.dim();
    let m = budget.resolve(d)?;
    let effect = f.effect(at);
    let (supports, exhaustive) = candidate_supports(d, m);
    let mut best: Option<(f64, Vec<C64>, Vec<usize>)> = None;
    for s in supports {
        let (p, v) = best_on_support(effect, &support_basis(rep, &s));
        if best.as_ref().is_none_or(|(bp, _, _)| p > bp + 1e-13) {
            best = Some((p, v, s));
        }
    }
    let (mut p, mut v, mut s) = best.expect("at least one support");
    if !exhaustive {
        // single swaps until no strict improvement
        'outer: loop {
            for pos in 0..s.len() {
                for cand in (0..d).filter(|c| !s.contains(c)) {
                    let mut t = s.clone();
                    t[pos] = cand;
                    t.sort_unstable();
                    let (q, w) = best_on_support(effect, &support_basis(rep, &t));
                    if q > p + 1e-13 {
                        (p, v, s) = (q, w, t);
                        continue 'outer;
                    }
                }
            }
            break;
        }
    }
    Ok(Localised {
        state: StateVector::normalized(v)?,
        probability: p.min(1.0),
        support: s,
    })
}

pub fn localised_state(f: &CovariantObservable, at: i64, budget: Budget) -> Result<StateVector> {
    localise(f, at, budget).map(|l| l.state)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalisationRow {
    pub budget: Budget,
    pub probability: f64,
    pub residual: f64,
}

/// For each budget, the distance between `e` and its reference-restricted
/// relativisation with the reference localised at the identity.
pub fn high_localisation_audit(
    e: &DiscreteObservable,
    rep_s: &Representation,
    f: &CovariantObservable,
    budgets: &[Budget],
) -> Result<Vec<LocalisationRow>> {
    if rep_s.group() != f.rep().group() {
        return Err(WayError::GroupMismatch("system and reference groups differ".into()));
    }
    if e.dim() != rep_s.dim() {
        return Err(WayError::DimensionMismatch("observable does not act on the system".into()));
    }
    budgets
        .iter()
        .map(|&b| {
            let loc = localise(f, 0, b)?;
            let w = reference_weights(f, &loc.state);
            let approx = e.map_effects(|x| weighted_average(x, rep_s, &w))?;
            Ok(LocalisationRow {
                budget: b,
                probability: loc.probability,
                residual: observable_distance(&approx, e)?,
            })
        })
        .collect()
}
