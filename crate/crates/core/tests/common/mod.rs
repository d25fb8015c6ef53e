//! Shared helpers for the integration suites: a dense rational elimination
//! oracle kept independent of the library's fraction-free path, and
//! generators for zero-dimensional test schemes (reduced and 2-fat points).

#![allow(dead_code)]

use flatlab::poly::monomials_of_degree;
use flatlab::{
    DualForm, FieldTag, HomogeneousForm, HomogeneousIdeal, LinearPoint, Monomial, Scalar,
    SparseMatrix,
};
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

pub const Q: FieldTag = FieldTag::Rationals;

// ---------------------------------------------------------------------------
// dense rational oracle (column-major Gaussian elimination, no Bareiss)
// ---------------------------------------------------------------------------

pub fn dense_from_sparse(m: &SparseMatrix) -> Vec<Vec<BigRational>> {
    let mut rows = vec![vec![BigRational::zero(); m.ncols()]; m.nrows()];
    for (r, c, v) in m.iter() {
        rows[r][c] = v.as_rational().expect("rational matrix").clone();
    }
    rows
}

pub fn oracle_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (pivot_row, rest) = rows[rank..].split_first_mut().unwrap();
        let inv = pivot_row[col].clone();
        for row in rest {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &inv;
            for (c, cell) in row.iter_mut().enumerate().skip(col) {
                let v = &*cell - &factor * &pivot_row[c];
                *cell = v;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Membership of `candidate` in the row span of `basis`, by rank comparison.
pub fn oracle_in_span(basis: &[Vec<BigRational>], candidate: &[BigRational]) -> bool {
    let base = oracle_rank(basis.to_vec());
    let mut extended = basis.to_vec();
    extended.push(candidate.to_vec());
    oracle_rank(extended) == base
}

pub fn form_coeff_vector(f: &HomogeneousForm, basis: &[Monomial]) -> Vec<BigRational> {
    basis
        .iter()
        .map(|m| f.coefficient(m).as_rational().expect("rational form").clone())
        .collect()
}

// ---------------------------------------------------------------------------
// random inputs
// ---------------------------------------------------------------------------

pub fn random_point<R: Rng>(rng: &mut R, n: usize, bound: i64) -> LinearPoint {
    loop {
        let coords: Vec<i64> = (0..=n).map(|_| rng.random_range(-bound..=bound)).collect();
        if coords.iter().any(|&c| c != 0) {
            return LinearPoint::from_i64(&coords, Q).unwrap();
        }
    }
}

/// `r` pairwise distinct random points.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, r: usize, bound: i64) -> Vec<LinearPoint> {
    let mut points: Vec<LinearPoint> = Vec::new();
    while points.len() < r {
        let p = random_point(rng, n, bound);
        if !points.contains(&p) {
            points.push(p);
        }
    }
    points
}

/// Nonzero scalar in `[-bound, bound]`.
pub fn random_coeff<R: Rng>(rng: &mut R, bound: i64) -> Scalar {
    loop {
        let c = rng.random_range(-bound..=bound);
        if c != 0 {
            return Scalar::from_i64(c, Q);
        }
    }
}

// ---------------------------------------------------------------------------
// zero-dimensional test schemes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum SchemePoint {
    Reduced(LinearPoint),
    /// The 2-fat point: square of the point's maximal ideal, length n+1.
    Fat(LinearPoint),
}

pub fn scheme_length(points: &[SchemePoint], n: usize) -> usize {
    points
        .iter()
        .map(|p| match p {
            SchemePoint::Reduced(_) => 1,
            SchemePoint::Fat(_) => n + 1,
        })
        .sum()
}

fn eval_monomial(m: &Monomial, p: &LinearPoint) -> Scalar {
    let mut acc = Scalar::one(Q);
    for (i, &e) in m.0.iter().enumerate() {
        for _ in 0..e {
            acc = acc.mul(&p.coords()[i]);
        }
    }
    acc
}

/// Value of `∂_j y^m` at `p`: `m_j · p^{m − e_j}`.
fn eval_partial(m: &Monomial, j: usize, p: &LinearPoint) -> Scalar {
    if m.0[j] == 0 {
        return Scalar::zero(Q);
    }
    let mut shifted = m.clone();
    shifted.0[j] -= 1;
    eval_monomial(&shifted, p).mul(&Scalar::from_i64(m.0[j] as i64, Q))
}

/// The degree-t piece of the saturated ideal of the union scheme: dual forms
/// whose value (reduced points) and first partials (fat points) vanish.
pub fn scheme_ideal_piece(points: &[SchemePoint], n: usize, t: usize) -> Vec<DualForm> {
    let monos = monomials_of_degree(n + 1, t);
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for sp in points {
        match sp {
            SchemePoint::Reduced(p) => {
                rows.push(monos.iter().map(|m| eval_monomial(m, p)).collect());
            }
            SchemePoint::Fat(p) => {
                for j in 0..=n {
                    rows.push(monos.iter().map(|m| eval_partial(m, j, p)).collect());
                }
            }
        }
    }
    let mut mat = SparseMatrix::new(rows.len(), monos.len(), Q);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            mat.insert(r, c, v.clone()).unwrap();
        }
    }
    mat.kernel_basis()
        .into_iter()
        .map(|v| {
            DualForm::from_terms(
                n,
                t,
                Q,
                monos
                    .iter()
                    .cloned()
                    .zip(v)
                    .filter(|(_, c)| !c.is_zero()),
            )
            .unwrap()
        })
        .collect()
}

/// Generators of the scheme's saturated ideal: piece bases in every degree
/// from 1 through one past the degree where the scheme's conditions become
/// independent (that is regularity for these schemes), and at least through
/// `min_degree` so later piece computations stay exact.
pub fn scheme_ideal(points: &[SchemePoint], n: usize, min_degree: usize) -> HomogeneousIdeal {
    let target = scheme_length(points, n);
    let mut gens: Vec<DualForm> = Vec::new();
    let mut independent_at: Option<usize> = None;
    let hard_cap = target + 1;
    for t in 1..=(hard_cap.max(min_degree)) {
        let piece = scheme_ideal_piece(points, n, t);
        let corank = monomials_of_degree(n + 1, t).len() - piece.len();
        gens.extend(piece);
        if independent_at.is_none() && corank == target {
            independent_at = Some(t);
        }
        if let Some(t0) = independent_at {
            if t > t0 && t >= min_degree {
                break;
            }
        }
    }
    assert!(
        independent_at.is_some(),
        "scheme conditions never became independent (length {target})"
    );
    HomogeneousIdeal::new(n, Q, gens).unwrap()
}

/// A random nonzero form in the span of the scheme: a combination of the
/// kernel basis of the degree-d piece.
pub fn random_form_in_span<R: Rng>(
    rng: &mut R,
    ideal_piece_d: &[DualForm],
    n: usize,
    d: usize,
) -> Option<HomogeneousForm> {
    let monos = monomials_of_degree(n + 1, d);
    let index: std::collections::BTreeMap<&Monomial, usize> =
        monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = SparseMatrix::new(ideal_piece_d.len(), monos.len(), Q);
    for (r, g) in ideal_piece_d.iter().enumerate() {
        for (mono, c) in g.terms() {
            mat.insert(r, index[mono], c.clone()).unwrap();
        }
    }
    let kernel = mat.kernel_basis();
    if kernel.is_empty() {
        return None;
    }
    for _ in 0..32 {
        let mut f = HomogeneousForm::zero(n, d, Q);
        for v in &kernel {
            let c = Scalar::from_i64(rng.random_range(-4..=4), Q);
            if c.is_zero() {
                continue;
            }
            for (i, entry) in v.iter().enumerate() {
                if !entry.is_zero() {
                    f.add_term(monos[i].clone(), entry.mul(&c)).unwrap();
                }
            }
        }
        if !f.is_zero() {
            return Some(f);
        }
    }
    None
}
