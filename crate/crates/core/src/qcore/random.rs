//! Seeded random matrices and states for property tests and searches.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{inner, norm, ComplexMatrix};
use super::state::{DensityOperator, StateVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary via Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let g = ginibre(rng, n, n);
        let cols: Vec<Vec<C64>> = (0..n).map(|j| g.column(j)).collect();
        if let Some(q) = orthonormalize(&cols) {
            return ComplexMatrix::from_columns(&q);
        }
    }
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ginibre(rng, n, n).hermitian_part()
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> StateVector {
    let v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
    StateVector::normalized(v).expect("gaussian vector is nonzero")
}

/// Full-rank random density matrix `GG*/tr(GG*)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityOperator {
    let g = ginibre(rng, n, n);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityOperator::new(m.scale_re(1.0 / tr).hermitian_part()).expect("Wishart matrix is a state")
}

/// Modified Gram-Schmidt with one re-orthogonalisation pass. Returns `None`
/// when the input is numerically rank-deficient.
pub fn orthonormalize(vectors: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        let n0 = norm(&w);
        for _ in 0..2 {
            for q in &out {
                let c = inner(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let n = norm(&w);
        if n <= 1e-10 * n0.max(1.0) {
            return None;
        }
        w.iter_mut().for_each(|z| *z /= n);
        out.push(w);
    }
    Some(out)
}

/// Completes a set of prescribed orthonormal columns to an `n x n` unitary.
///
/// `fixed` pairs a column index with its column. The remaining columns are
/// filled, in increasing index order, with standard basis vectors projected
/// onto the orthogonal complement (Gram-Schmidt).
pub fn complete_unitary(n: usize, fixed: &[(usize, Vec<C64>)]) -> Option<ComplexMatrix> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    for (_, col) in fixed {
        let mut w = col.clone();
        for q in &basis {
            let c = inner(q, &w);
            w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
        }
        if (norm(&w) - 1.0).abs() > 1e-9 || (norm(col) - 1.0).abs() > 1e-9 {
            return None;
        }
        basis.push(col.clone());
    }
    let mut out = ComplexMatrix::zeros(n, n);
    let mut used = vec![false; n];
    for (idx, col) in fixed {
        if *idx >= n || used[*idx] || col.len() != n {
            return None;
        }
        used[*idx] = true;
        out.set_column(*idx, col);
    }
    let mut free = (0..n).filter(|&j| !used[j]);
    for k in 0..n {
        if basis.len() == n {
            break;
        }
        let mut w = vec![C64::new(0.0, 0.0); n];
        w[k] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for q in &basis {
                let c = inner(q, &w);
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let nw = norm(&w);
        if nw < 1e-8 {
            continue;
        }
        w.iter_mut().for_each(|z| *z /= nw);
        // exact zeros keep permutation-like completions bit-clean
        for z in w.iter_mut() {
            if z.re.abs() < 1e-15 {
                z.re = 0.0;
            }
            if z.im.abs() < 1e-15 {
                z.im = 0.0;
            }
        }
        let j = free.next()?;
        out.set_column(j, &w);
        basis.push(w);
    }
    (basis.len() == n).then_some(out)
}
