use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WayError};
use crate::models::{lookup, ModelDescriptor, RelativisationSetup};
use crate::obs::{Geometry, Outcome, OutcomeSet, ProbDist};
use crate::qcore::eig::herm_eig_unchecked;
use crate::qcore::{herm_op_norm, inner, norm, ComplexMatrix};
use crate::relfr::{candidate_supports, embed, support_basis};

/// Best achievable error for one spread budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub budget: usize,
    /// Variance of the chosen reference state's generator distribution.
    pub spread_variance: f64,
    /// Overall width of that distribution at the configured `eps`.
    pub spread_width: usize,
    pub min_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Mass allowed outside the reported width.
    pub eps: f64,
    pub seed: u64,
    /// Local refinement steps per retained candidate.
    pub refine_steps: usize,
    /// Candidates kept for refinement per budget.
    pub keep: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            eps: 0.1,
            seed: 0,
            refine_steps: 600,
            keep: 4,
        }
    }
}

/// Error of the reference-restricted relativised target, as a function of
/// the reference state.
struct Objective<'a> {
    setup: &'a RelativisationSetup,
    /// `U_S(k) E(x) U_S(k)*`, indexed `[k][x]`.
    moved: Vec<Vec<ComplexMatrix>>,
}

impl<'a> Objective<'a> {
    fn new(setup: &'a RelativisationSetup) -> Self {
        let n = setup.rep_s.group().order() as i64;
        let moved = (0..n)
            .map(|k| {
                let u = setup.rep_s.unitary(k);
                let ua = u.adjoint();
                setup.target.effects().iter().map(|e| u.matmul(e).matmul(&ua)).collect()
            })
            .collect();
        Self { setup, moved }
    }

    fn error(&self, eta: &[C64]) -> f64 {
        let f = &self.setup.reference;
        let p: Vec<f64> = (0..self.moved.len() as i64)
            .map(|k| inner(eta, &f.effect(k).mul_vec(eta)).re)
            .collect();
        let d = self.setup.target.dim();
        self.setup
            .target
            .effects()
            .iter()
            .enumerate()
            .map(|(x, e)| {
                let mut acc = e.scale_re(-1.0);
                for (k, &pk) in p.iter().enumerate() {
                    if pk != 0.0 {
                        acc = acc.add_mat(&self.moved[k][x].scale_re(pk));
                    }
                }
                debug_assert_eq!(acc.rows(), d);
                herm_op_norm(&acc.hermitian_part())
            })
            .fold(0.0, f64::max)
    }
}

struct Candidate {
    error: f64,
    support: Vec<usize>,
    coeffs: Vec<C64>,
}

fn normalise(c: &mut [C64]) {
    let s = norm(c);
    c.iter_mut().for_each(|z| *z /= s);
}

fn seeds_on_support(setup: &RelativisationSetup, support: &[usize]) -> Vec<Vec<C64>> {
    let m = support.len();
    let uniform = vec![C64::new(1.0 / (m as f64).sqrt(), 0.0); m];
    let basis = support_basis(setup.reference.rep(), support);
    let f0 = setup.reference.effect(0);
    let images: Vec<Vec<C64>> = basis.iter().map(|b| f0.mul_vec(b)).collect();
    let compressed = ComplexMatrix::from_fn(m, m, |i, j| inner(&basis[i], &images[j]));
    let eig = herm_eig_unchecked(&compressed.hermitian_part());
    vec![uniform, eig.vectors.column(m - 1)]
}

/// Derivative-free refinement of the coefficients on a fixed support.
fn refine(obj: &Objective, cand: &mut Candidate, steps: usize, rng: &mut ChaCha8Rng) {
    let basis = support_basis(obj.setup.reference.rep(), &cand.support);
    let m = cand.coeffs.len();
    let mut sigma = 0.3;
    for _ in 0..steps {
        if cand.error == 0.0 || sigma < 1e-9 {
            break;
        }
        let mut trial = cand.coeffs.clone();
        let j = rng.random_range(0..m);
        trial[j] += C64::new(rng.random_range(-sigma..sigma), rng.random_range(-sigma..sigma));
        normalise(&mut trial);
        let e = obj.error(&embed(&basis, &trial));
        if e < cand.error {
            cand.error = e;
            cand.coeffs = trial;
            sigma *= 1.3;
        } else {
            sigma *= 0.95;
        }
    }
}

fn spread(setup: &RelativisationSetup, eta: &[C64], eps: f64) -> Result<(f64, usize)> {
    let eig = setup.reference.rep().eigen();
    let d = eig.values.len();
    let weights: Vec<f64> = (0..d).map(|j| inner(&eig.vectors.column(j), eta).norm_sqr()).collect();
    let outcomes = OutcomeSet::new(
        eig.values
            .iter()
            .enumerate()
            .map(|(j, &v)| Outcome {
                label: j.to_string(),
                value: v,
            })
            .collect(),
        Geometry::Linear,
    )?;
    let dist = ProbDist::from_unnormalized(outcomes, weights)?;
    Ok((dist.variance(), dist.overall_width(eps)))
}

/// Smallest distance between the target and its relativisation restricted
/// to a reference state supported on at most `budget` generator
/// eigenstates, for each budget. Budgets are processed in increasing order
/// and each search starts from the previous optimum, so `min_error` never
/// increases.
pub fn error_vs_spread_sweep(family: &str, n: usize, budgets: &[usize], opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    let fam = lookup(family)?;
    let desc = ModelDescriptor::new(fam.name()).with_n(n);
    let setup = fam
        .relativisation(&desc)
        .ok_or_else(|| WayError::UnknownFamily(format!("{family} has no reference-frame sweep")))??;
    if !(opts.eps > 0.0 && opts.eps < 1.0) {
        return Err(WayError::OutOfRange(format!("eps {} outside (0, 1)", opts.eps)));
    }
    let dim = setup.reference.rep().dim();
    let mut order: Vec<usize> = budgets.to_vec();
    order.sort_unstable();
    order.dedup();
    if let Some(&bad) = order.iter().find(|&&m| m == 0 || m > dim) {
        return Err(WayError::InfeasibleBudget { budget: bad, dim });
    }
    let obj = Objective::new(&setup);
    let mut rows = Vec::with_capacity(order.len());
    let mut previous: Option<Candidate> = None;
    for m in order {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut pool: Vec<Candidate> = Vec::new();
        for support in candidate_supports(dim, m).0 {
            let basis = support_basis(setup.reference.rep(), &support);
            for coeffs in seeds_on_support(&setup, &support) {
                let error = obj.error(&embed(&basis, &coeffs));
                pool.push(Candidate {
                    error,
                    support: support.clone(),
                    coeffs,
                });
            }
        }
        // stable sort keeps enumeration order among ties
        pool.sort_by(|a, b| a.error.total_cmp(&b.error));
        pool.truncate(opts.keep.max(1));
        if let Some(prev) = previous.take() {
            pool.push(prev);
        }
        for cand in pool.iter_mut() {
            refine(&obj, cand, opts.refine_steps, &mut rng);
        }
        let best = pool
            .into_iter()
            .reduce(|a, b| if b.error < a.error { b } else { a })
            .expect("nonempty pool");
        let eta = embed(&support_basis(setup.reference.rep(), &best.support), &best.coeffs);
        let (spread_variance, spread_width) = spread(&setup, &eta, opts.eps)?;
        rows.push(SweepRow {
            budget: m,
            spread_variance,
            spread_width,
            min_error: best.error,
        });
        previous = Some(best);
    }
    Ok(rows)
}
