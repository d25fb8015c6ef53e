//! Sparse matrices over ℚ and 𝔽_p with exact rank, kernel, and witness-minor
//! computation.
//!
//! Rational elimination is fraction-free (Bareiss-style): each row is scaled
//! to integers once, then every update is `(piv·a − c·b) / prev` with an
//! exact integer division, which keeps intermediate entries minor-sized.
//! Pivoting picks the shortest available row, ties broken by lowest original
//! row index, and the lowest column inside that row, so every result is
//! bit-reproducible.

use crate::error::{Error, Result};
use crate::scalar::{inv_mod, mul_mod, reduce_bigint_mod, FieldTag, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Public list of 62-bit primes used by the modular certification path.
pub const CERT_PRIMES: [u64; 30] = [
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387751,
    4611686018427387737,
    4611686018427387733,
    4611686018427387709,
    4611686018427387701,
    4611686018427387631,
    4611686018427387617,
    4611686018427387587,
    4611686018427387461,
    4611686018427387421,
    4611686018427387409,
    4611686018427387329,
    4611686018427387323,
    4611686018427387301,
    4611686018427387271,
    4611686018427387241,
    4611686018427387139,
    4611686018427387131,
    4611686018427387127,
    4611686018427387113,
    4611686018427387091,
    4611686018427387073,
    4611686018427386981,
    4611686018427386923,
    4611686018427386911,
    4611686018427386903,
];

const CERT_SEED: u64 = 0x464c_4154;

/// A sparse matrix with optional basis labels. Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    field: FieldTag,
    entries: BTreeMap<(usize, usize), Scalar>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize, field: FieldTag) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            field,
            entries: BTreeMap::new(),
            row_labels: None,
            col_labels: None,
        }
    }

    pub fn from_entries<I>(nrows: usize, ncols: usize, field: FieldTag, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut m = SparseMatrix::new(nrows, ncols, field);
        for (r, c, v) in entries {
            m.insert(r, c, v)?;
        }
        Ok(m)
    }

    /// Sets entry `(r, c)`. Inserting a zero clears the slot; a scalar whose
    /// field disagrees with the matrix is rejected.
    pub fn insert(&mut self, r: usize, c: usize, v: Scalar) -> Result<()> {
        if r >= self.nrows || c >= self.ncols {
            return Err(Error::DimensionMismatch(format!(
                "entry ({r}, {c}) outside {}x{} matrix",
                self.nrows, self.ncols
            )));
        }
        if v.field() != self.field {
            return Err(Error::MixedField {
                expected: self.field,
                found: v.field(),
            });
        }
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
        Ok(())
    }

    /// Adds `v` to entry `(r, c)`.
    pub fn add_to(&mut self, r: usize, c: usize, v: &Scalar) -> Result<()> {
        let cur = self.get(r, c);
        self.insert(r, c, cur.add(v))
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn set_row_labels(&mut self, labels: Vec<String>) -> Result<()> {
        check_labels(&labels, self.nrows, "row")?;
        self.row_labels = Some(labels);
        Ok(())
    }

    pub fn set_col_labels(&mut self, labels: Vec<String>) -> Result<()> {
        check_labels(&labels, self.ncols, "column")?;
        self.col_labels = Some(labels);
        Ok(())
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::new(self.ncols, self.nrows, self.field);
        for (&(r, c), v) in &self.entries {
            t.entries.insert((c, r), v.clone());
        }
        t.row_labels = self.col_labels.clone();
        t.col_labels = self.row_labels.clone();
        t
    }

    /// Restriction to the given (strictly increasing) row and column index
    /// sets; labels are dropped.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let rmap: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let cmap: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut m = SparseMatrix::new(rows.len(), cols.len(), self.field);
        for (&(r, c), v) in &self.entries {
            if let (Some(&ri), Some(&ci)) = (rmap.get(&r), cmap.get(&c)) {
                m.entries.insert((ri, ci), v.clone());
            }
        }
        m
    }

    /// Exact rank over the matrix's field.
    pub fn rank(&self) -> usize {
        self.eliminate().pivots.len()
    }

    /// A basis of the right kernel: vectors `v` with `M·v = 0`, exactly
    /// `ncols − rank` of them, ordered by free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let rref = self.rref_rows();
        let pivot_cols: Vec<usize> = rref.iter().map(|(c, _)| *c).collect();
        let is_pivot = |c: usize| pivot_cols.binary_search(&c).is_ok();
        let mut basis = Vec::new();
        for f in 0..self.ncols {
            if is_pivot(f) {
                continue;
            }
            let mut v = vec![Scalar::zero(self.field); self.ncols];
            v[f] = Scalar::one(self.field);
            for (pc, row) in &rref {
                if let Some((_, coeff)) = row.iter().find(|(c, _)| *c == f) {
                    v[*pc] = coeff.neg();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// The reduced row echelon form of the row space: rows sorted by pivot
    /// column, pivots normalized to 1, pivot columns cleared elsewhere. Each
    /// row is returned as sorted `(col, value)` pairs.
    pub fn rref_rows(&self) -> Vec<(usize, Vec<(usize, Scalar)>)> {
        let ech = self.eliminate();
        let mut rows: Vec<BTreeMap<usize, Scalar>> = ech
            .rows
            .iter()
            .map(|row| row.to_scalars())
            .collect();
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by_key(|&i| ech.pivots[i].1);
        let rows_sorted: Vec<(usize, BTreeMap<usize, Scalar>)> = order
            .iter()
            .map(|&i| (ech.pivots[i].1, std::mem::take(&mut rows[i])))
            .collect();
        let mut rows = rows_sorted;
        // normalize pivots to 1, then clear pivot columns upward and downward
        for i in 0..rows.len() {
            let (pc, row) = &mut rows[i];
            let piv = row.get(pc).expect("pivot entry").clone();
            let inv = piv.inverse().expect("nonzero pivot");
            for v in row.values_mut() {
                *v = v.mul(&inv);
            }
            let clean: BTreeMap<usize, Scalar> = row.clone();
            let pc = *pc;
            for (j, (_, other)) in rows.iter_mut().enumerate() {
                if j == i {
                    continue;
                }
                if let Some(c) = other.remove(&pc) {
                    for (col, val) in &clean {
                        if *col == pc {
                            continue;
                        }
                        let cur = other.remove(col).unwrap_or_else(|| Scalar::zero(self.field));
                        let nv = cur.sub(&c.mul(val));
                        if !nv.is_zero() {
                            other.insert(*col, nv);
                        }
                    }
                }
            }
        }
        rows.into_iter()
            .map(|(pc, row)| (pc, row.into_iter().collect()))
            .collect()
    }

    /// Rank computed over random primes and certified to equal the rational
    /// rank: the pivot minor is re-verified exactly over ℚ, and every
    /// non-pivot row is reduced to zero against the pivot rows. Falls back to
    /// full rational elimination when the prime budget runs out, so the
    /// result always equals `rank()`.
    pub fn rank_mod_certified(&self, prime_budget: usize) -> Result<usize> {
        if self.field != FieldTag::Rationals {
            return Err(Error::InvalidParameter(
                "rank_mod_certified requires a matrix over the rationals".into(),
            ));
        }
        if self.entries.is_empty() {
            return Ok(0);
        }
        let mut candidates: Vec<u64> = CERT_PRIMES
            .iter()
            .copied()
            .filter(|&p| {
                self.entries
                    .values()
                    .all(|s| reduce_bigint_mod(s.as_rational().unwrap().denom(), p) != 0)
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(CERT_SEED);
        candidates.shuffle(&mut rng);
        for p in candidates.into_iter().take(prime_budget) {
            if let Some(rank) = self.try_certify_mod(p) {
                return Ok(rank);
            }
        }
        Ok(self.rank())
    }

    fn try_certify_mod(&self, p: u64) -> Option<usize> {
        let mut reduced = SparseMatrix::new(self.nrows, self.ncols, FieldTag::PrimeField(p));
        for (&(r, c), v) in &self.entries {
            let value = v.reduce_mod(p)?;
            if value != 0 {
                reduced
                    .entries
                    .insert((r, c), Scalar::Residue { value, prime: p });
            }
        }
        let ech = reduced.eliminate();
        let rp = ech.pivots.len();
        let mut pivot_rows: Vec<usize> = ech.pivots.iter().map(|&(r, _)| r).collect();
        let mut pivot_cols: Vec<usize> = ech.pivots.iter().map(|&(_, c)| c).collect();
        pivot_rows.sort_unstable();
        pivot_cols.sort_unstable();
        // rank >= rp: the rp x rp pivot minor must be nonsingular over Q
        if rp > 0 && self.submatrix(&pivot_rows, &pivot_cols).rank() != rp {
            return None;
        }
        // rank <= rp: every remaining row lies in the span of the pivot rows
        if rp < self.nrows && !self.rows_spanned_by(&pivot_rows) {
            return None;
        }
        Some(rp)
    }

    /// Checks that every row outside `span_rows` lies in their rational span.
    fn rows_spanned_by(&self, span_rows: &[usize]) -> bool {
        let rows = self.integer_rows();
        let span: Vec<(usize, BTreeMap<usize, BigInt>)> = span_rows
            .iter()
            .map(|&r| (r, rows[r].clone()))
            .collect();
        let ech = q_eliminate(span);
        for (i, row) in rows.into_iter().enumerate() {
            if span_rows.contains(&i) {
                continue;
            }
            if !q_reduces_to_zero(row, &ech) {
                return false;
            }
        }
        true
    }

    /// Row and column index sets of size `r` whose minor is nonzero,
    /// certifying `rank ≥ r`. The submatrix is re-verified by an independent
    /// elimination before returning.
    pub fn witness_minor(&self, r: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let ech = self.eliminate();
        if r > ech.pivots.len() {
            return Err(Error::NoWitness {
                requested: r,
                rank: ech.pivots.len(),
            });
        }
        let mut rows: Vec<usize> = ech.pivots[..r].iter().map(|&(row, _)| row).collect();
        let mut cols: Vec<usize> = ech.pivots[..r].iter().map(|&(_, col)| col).collect();
        rows.sort_unstable();
        cols.sort_unstable();
        if self.submatrix(&rows, &cols).rank() != r {
            return Err(Error::InternalConsistency(
                "witness minor failed verification".into(),
            ));
        }
        Ok((rows, cols))
    }

    fn eliminate(&self) -> Echelon {
        match self.field {
            FieldTag::Rationals => {
                let rows: Vec<(usize, BTreeMap<usize, BigInt>)> =
                    self.integer_rows().into_iter().enumerate().collect();
                q_eliminate(rows)
            }
            FieldTag::PrimeField(p) => {
                let mut rows: Vec<(usize, BTreeMap<usize, u64>)> =
                    (0..self.nrows).map(|i| (i, BTreeMap::new())).collect();
                for (&(r, c), v) in &self.entries {
                    if let Scalar::Residue { value, .. } = v {
                        rows[r].1.insert(c, *value);
                    }
                }
                p_eliminate(rows, p)
            }
        }
    }

    /// Rows with denominators cleared (each row scaled by the lcm of its
    /// denominators; scaling does not change rank, pivots, or kernels).
    fn integer_rows(&self) -> Vec<BTreeMap<usize, BigInt>> {
        let mut rows: Vec<BTreeMap<usize, BigRational>> = vec![BTreeMap::new(); self.nrows];
        for (&(r, c), v) in &self.entries {
            if let Some(q) = v.as_rational() {
                rows[r].insert(c, q.clone());
            }
        }
        rows.into_iter()
            .map(|row| {
                let lcm = row
                    .values()
                    .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
                row.into_iter()
                    .map(|(c, q)| {
                        let v = q.numer() * (&lcm / q.denom());
                        (c, v)
                    })
                    .collect()
            })
            .collect()
    }
}

fn check_labels(labels: &[String], expected: usize, what: &str) -> Result<()> {
    if labels.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{} labels: got {}, expected {expected}",
            what,
            labels.len()
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvalidParameter(format!(
                "duplicate {what} label `{l}`"
            )));
        }
    }
    Ok(())
}

/// Echelon data shared by the two field backends: pivot `(original row,
/// column)` pairs in elimination order, plus the echelon rows.
struct Echelon {
    pivots: Vec<(usize, usize)>,
    rows: Vec<EchelonRow>,
}

enum EchelonRow {
    Q(BTreeMap<usize, BigInt>),
    P { row: BTreeMap<usize, u64>, prime: u64 },
}

impl EchelonRow {
    fn to_scalars(&self) -> BTreeMap<usize, Scalar> {
        match self {
            EchelonRow::Q(row) => row
                .iter()
                .map(|(&c, v)| (c, Scalar::Rational(BigRational::from(v.clone()))))
                .collect(),
            EchelonRow::P { row, prime } => row
                .iter()
                .map(|(&c, &v)| {
                    (
                        c,
                        Scalar::Residue {
                            value: v,
                            prime: *prime,
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Fraction-free elimination on integer rows. Every active row is updated at
/// every step, so divisions by the previous pivot stay exact (Sylvester's
/// identity).
fn q_eliminate(mut rows: Vec<(usize, BTreeMap<usize, BigInt>)>) -> Echelon {
    let mut pivots = Vec::new();
    let mut echelon = Vec::new();
    let mut prev = BigInt::one();
    rows.retain(|(_, m)| !m.is_empty());
    while !rows.is_empty() {
        let best = rows
            .iter()
            .enumerate()
            .min_by_key(|(_, (orig, m))| (m.len(), *orig))
            .map(|(i, _)| i)
            .unwrap();
        let (orig, prow) = rows.remove(best);
        let (&pc, piv) = prow.iter().next().unwrap();
        let piv = piv.clone();
        for (_, row) in rows.iter_mut() {
            match row.remove(&pc) {
                Some(coef) => {
                    let mut updated = BTreeMap::new();
                    let cols: Vec<usize> = row
                        .keys()
                        .chain(prow.keys())
                        .copied()
                        .filter(|&c| c != pc)
                        .collect();
                    for c in cols {
                        if updated.contains_key(&c) {
                            continue;
                        }
                        let a = row.get(&c).cloned().unwrap_or_else(BigInt::zero);
                        let b = prow.get(&c).cloned().unwrap_or_else(BigInt::zero);
                        let num = &piv * a - &coef * b;
                        if num.is_zero() {
                            continue;
                        }
                        debug_assert!((&num % &prev).is_zero(), "inexact Bareiss division");
                        updated.insert(c, num / &prev);
                    }
                    *row = updated;
                }
                None => {
                    for v in row.values_mut() {
                        let num = &*v * &piv;
                        debug_assert!((&num % &prev).is_zero(), "inexact Bareiss division");
                        *v = num / &prev;
                    }
                }
            }
        }
        rows.retain(|(_, m)| !m.is_empty());
        pivots.push((orig, pc));
        echelon.push(EchelonRow::Q(prow));
        prev = piv;
    }
    Echelon {
        pivots,
        rows: echelon,
    }
}

/// Reduces an integer row against a fraction-free echelon (in elimination
/// order) by cross-multiplication; returns true iff it vanishes, i.e. lies in
/// the echelon's rational row span.
fn q_reduces_to_zero(mut row: BTreeMap<usize, BigInt>, ech: &Echelon) -> bool {
    for (k, er) in ech.rows.iter().enumerate() {
        let EchelonRow::Q(prow) = er else { unreachable!() };
        let pc = ech.pivots[k].1;
        if let Some(coef) = row.remove(&pc) {
            let piv = prow.get(&pc).expect("pivot entry").clone();
            let cols: Vec<usize> = row
                .keys()
                .chain(prow.keys())
                .copied()
                .filter(|&c| c != pc)
                .collect();
            let mut updated = BTreeMap::new();
            for c in cols {
                if updated.contains_key(&c) {
                    continue;
                }
                let a = row.get(&c).cloned().unwrap_or_else(BigInt::zero);
                let b = prow.get(&c).cloned().unwrap_or_else(BigInt::zero);
                let v = &piv * a - &coef * b;
                if !v.is_zero() {
                    updated.insert(c, v);
                }
            }
            row = updated;
        }
    }
    row.is_empty()
}

/// Straightforward Gaussian elimination over 𝔽_p with the same pivot
/// strategy as the rational path.
fn p_eliminate(mut rows: Vec<(usize, BTreeMap<usize, u64>)>, p: u64) -> Echelon {
    let mut pivots = Vec::new();
    let mut echelon = Vec::new();
    rows.retain(|(_, m)| !m.is_empty());
    while !rows.is_empty() {
        let best = rows
            .iter()
            .enumerate()
            .min_by_key(|(_, (orig, m))| (m.len(), *orig))
            .map(|(i, _)| i)
            .unwrap();
        let (orig, prow) = rows.remove(best);
        let (&pc, &piv) = prow.iter().next().unwrap();
        let piv_inv = inv_mod(piv, p).expect("prime modulus");
        for (_, row) in rows.iter_mut() {
            if let Some(coef) = row.remove(&pc) {
                let factor = mul_mod(coef, piv_inv, p);
                for (&c, &v) in &prow {
                    if c == pc {
                        continue;
                    }
                    let sub = mul_mod(factor, v, p);
                    let cur = row.get(&c).copied().unwrap_or(0);
                    let nv = (cur + p - sub) % p;
                    if nv == 0 {
                        row.remove(&c);
                    } else {
                        row.insert(c, nv);
                    }
                }
            }
        }
        rows.retain(|(_, m)| !m.is_empty());
        pivots.push((orig, pc));
        echelon.push(EchelonRow::P { row: prow, prime: p });
    }
    Echelon {
        pivots,
        rows: echelon,
    }
}
