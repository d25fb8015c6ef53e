//! Flattening matrices of a homogeneous form: classical catalecticants and
//! the Koszul family.
//!
//! A [`FlatteningSpec`] names one bilinear presentation of a degree-d form in
//! n+1 variables together with its divisor `e`, the largest rank the matrix
//! attains at a d-th power of a linear point:
//!
//! - `Catalecticant(a)`: rows are degree-a dual monomials, columns degree-(d−a)
//!   monomials, entry(β, γ) = coefficient of `x^{β+γ}`; `e = 1`.
//! - `Koszul(p, a)`: the map `Λ^p V ⊗ S^a V* → Λ^{p+1} V ⊗ S^{d−a−1} V`
//!   sending `ω ⊗ D` to `Σ_i (x_i ∧ ω) ⊗ ((D·y_i) ⌟ F)`; `e = C(n, p)`.
//!
//! Dividing the rank of any of these matrices by `e` and rounding up gives a
//! lower bound for the cactus rank (hence the Waring rank) of the form; see
//! the `bounds` module.

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::poly::{
    binomial, contract, monomial_count, monomials_of_degree, power_of_linear, DualForm,
    HomogeneousForm, LinearPoint, Monomial,
};
use crate::scalar::{FieldTag, Scalar};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Default cap on `rows × cols` for grid-generated specs.
pub const DEFAULT_GRID_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlatteningKind {
    Catalecticant { a: usize },
    Koszul { p: usize, a: usize },
}

/// A validated choice of flattening for forms of shape `(n, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlatteningSpec {
    kind: FlatteningKind,
    n: usize,
    d: usize,
}

impl FlatteningSpec {
    pub fn catalecticant(n: usize, d: usize, a: usize) -> Result<Self> {
        if a < 1 || a + 1 > d {
            return Err(Error::InvalidParameter(format!(
                "catalecticant degree a = {a} outside 1..={} for d = {d}",
                d.saturating_sub(1)
            )));
        }
        Ok(FlatteningSpec {
            kind: FlatteningKind::Catalecticant { a },
            n,
            d,
        })
    }

    pub fn koszul(n: usize, d: usize, p: usize, a: usize) -> Result<Self> {
        if p > n {
            return Err(Error::InvalidParameter(format!(
                "koszul exterior degree p = {p} exceeds n = {n}"
            )));
        }
        if a + 1 > d {
            return Err(Error::InvalidParameter(format!(
                "koszul twist a = {a} needs a + 1 <= d = {d}"
            )));
        }
        Ok(FlatteningSpec {
            kind: FlatteningKind::Koszul { p, a },
            n,
            d,
        })
    }

    pub fn kind(&self) -> FlatteningKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// The divisor `e`: the generic rank of this flattening at a d-th power
    /// of a linear point.
    pub fn divisor(&self) -> usize {
        match self.kind {
            FlatteningKind::Catalecticant { .. } => 1,
            FlatteningKind::Koszul { p, .. } => binomial(self.n, p),
        }
    }

    /// Matrix shape `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        let n = self.n;
        let d = self.d;
        match self.kind {
            FlatteningKind::Catalecticant { a } => (monomial_count(n, a), monomial_count(n, d - a)),
            FlatteningKind::Koszul { p, a } => (
                binomial(n + 1, p) * monomial_count(n, a),
                binomial(n + 1, p + 1) * monomial_count(n, d - a - 1),
            ),
        }
    }

    /// The matrix of this flattening at `f`.
    pub fn matrix(&self, f: &HomogeneousForm) -> Result<SparseMatrix> {
        if f.n() != self.n || f.degree() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "form of shape (n={}, d={}) fed to {self}, which expects (n={}, d={})",
                f.n(),
                f.degree(),
                self.n,
                self.d
            )));
        }
        match self.kind {
            FlatteningKind::Catalecticant { a } => contraction_matrix(f, a),
            FlatteningKind::Koszul { p, a } => koszul_matrix_impl(f, p, a),
        }
    }

    /// Parses `cat:a` or `koszul:p:a`.
    pub fn parse(text: &str, n: usize, d: usize) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad spec parameter `{s}` in `{text}`")))
        };
        match parts.as_slice() {
            ["cat", a] => FlatteningSpec::catalecticant(n, d, num(a)?),
            ["koszul", p, a] => FlatteningSpec::koszul(n, d, num(p)?, num(a)?),
            _ => Err(Error::Parse(format!(
                "unrecognized spec `{text}` (expected cat:a or koszul:p:a)"
            ))),
        }
    }
}

impl fmt::Display for FlatteningSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FlatteningKind::Catalecticant { a } => write!(f, "cat(a={a})"),
            FlatteningKind::Koszul { p, a } => write!(f, "koszul(p={p}, a={a})"),
        }
    }
}

/// Strictly increasing tuple of variable indices: a basis element of the
/// exterior algebra factor of a Koszul flattening.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExteriorIndex(pub Vec<usize>);

impl ExteriorIndex {
    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Inserts variable `i`, returning the sign `(−1)^{#{j ∈ ω : j < i}}` and
    /// the sorted result; `None` when `i` already occurs (the wedge is zero).
    pub fn insert(&self, i: usize) -> Option<(i64, ExteriorIndex)> {
        match self.0.binary_search(&i) {
            Ok(_) => None,
            Err(pos) => {
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                let mut v = self.0.clone();
                v.insert(pos, i);
                Some((sign, ExteriorIndex(v)))
            }
        }
    }

    fn label(&self) -> String {
        if self.0.is_empty() {
            "1".to_string()
        } else {
            self.0
                .iter()
                .map(|i| format!("x{i}"))
                .collect::<Vec<_>>()
                .join("∧")
        }
    }
}

/// All `p`-element subsets of `{0, …, nvars−1}` in lexicographic order.
pub fn exterior_indices(nvars: usize, p: usize) -> Vec<ExteriorIndex> {
    fn rec(start: usize, nvars: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..nvars {
            cur.push(i);
            rec(i + 1, nvars, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= nvars {
        rec(0, nvars, p, &mut Vec::new(), &mut out);
    }
    out.into_iter().map(ExteriorIndex).collect()
}

fn mono_label(m: &Monomial, letter: char) -> String {
    let mut s = String::new();
    let mut first = true;
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            s.push('*');
        }
        first = false;
        s.push_str(&format!("{letter}{i}"));
        if e > 1 {
            s.push_str(&format!("^{e}"));
        }
    }
    if first {
        s.push('1');
    }
    s
}

/// Contraction matrix in degree `t` for any `0 ≤ t ≤ d`: rows are degree-t
/// dual monomials, columns degree-(d−t) monomials, entry(β, γ) = coefficient
/// of `x^{β+γ}` in `f`. Assembled row by row via `contract`.
pub(crate) fn contraction_matrix(f: &HomogeneousForm, t: usize) -> Result<SparseMatrix> {
    let n = f.n();
    let d = f.degree();
    if t > d {
        return Err(Error::Degree(format!(
            "contraction degree {t} exceeds form degree {d}"
        )));
    }
    let rows = monomials_of_degree(n + 1, t);
    let cols = monomials_of_degree(n + 1, d - t);
    let col_index: std::collections::BTreeMap<&Monomial, usize> =
        cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut m = SparseMatrix::new(rows.len(), cols.len(), f.field());
    for (ri, beta) in rows.iter().enumerate() {
        let dual = DualForm::monomial(n, beta.clone(), f.field())?;
        let image = contract(&dual, f)?;
        for (gamma, c) in image.terms() {
            m.insert(ri, col_index[gamma], c.clone())?;
        }
    }
    m.set_row_labels(rows.iter().map(|b| mono_label(b, 'y')).collect())?;
    m.set_col_labels(cols.iter().map(|g| mono_label(g, 'x')).collect())?;
    Ok(m)
}

/// The catalecticant matrix of `f` in degree `a`, for `1 ≤ a ≤ d−1`.
pub fn catalecticant_matrix(f: &HomogeneousForm, a: usize) -> Result<SparseMatrix> {
    FlatteningSpec::catalecticant(f.n(), f.degree(), a)?.matrix(f)
}

/// The Koszul flattening matrix of `f` with exterior degree `p` and twist `a`.
pub fn koszul_matrix(f: &HomogeneousForm, p: usize, a: usize) -> Result<SparseMatrix> {
    FlatteningSpec::koszul(f.n(), f.degree(), p, a)?.matrix(f)
}

fn koszul_matrix_impl(f: &HomogeneousForm, p: usize, a: usize) -> Result<SparseMatrix> {
    let n = f.n();
    let d = f.degree();
    let domain_wedges = exterior_indices(n + 1, p);
    let domain_monos = monomials_of_degree(n + 1, a);
    let target_wedges = exterior_indices(n + 1, p + 1);
    let target_monos = monomials_of_degree(n + 1, d - a - 1);
    let twedge_index: std::collections::BTreeMap<&ExteriorIndex, usize> = target_wedges
        .iter()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let tmono_index: std::collections::BTreeMap<&Monomial, usize> =
        target_monos.iter().enumerate().map(|(i, m)| (m, i)).collect();

    let mut m = SparseMatrix::new(
        domain_wedges.len() * domain_monos.len(),
        target_wedges.len() * target_monos.len(),
        f.field(),
    );
    for (wi, omega) in domain_wedges.iter().enumerate() {
        for i in 0..=n {
            let Some((sign, inserted)) = omega.insert(i) else {
                continue;
            };
            let sign = Scalar::from_i64(sign, f.field());
            let ti = twedge_index[&inserted];
            for (bi, beta) in domain_monos.iter().enumerate() {
                // (y^β · y_i) ⌟ F
                let shifted = beta.mul(&Monomial::variable(n + 1, i));
                let dual = DualForm::monomial(n, shifted, f.field())?;
                let image = contract(&dual, f)?;
                let row = wi * domain_monos.len() + bi;
                for (gamma, c) in image.terms() {
                    let col = ti * target_monos.len() + tmono_index[gamma];
                    m.add_to(row, col, &sign.mul(c))?;
                }
            }
        }
    }
    let row_labels = domain_wedges
        .iter()
        .flat_map(|w| {
            domain_monos
                .iter()
                .map(move |b| format!("{}⊗{}", w.label(), mono_label(b, 'y')))
        })
        .collect();
    let col_labels = target_wedges
        .iter()
        .flat_map(|w| {
            target_monos
                .iter()
                .map(move |g| format!("{}⊗{}", w.label(), mono_label(g, 'x')))
        })
        .collect();
    m.set_row_labels(row_labels)?;
    m.set_col_labels(col_labels)?;
    Ok(m)
}

/// Exact rank of the spec's matrix at `f`. Larger rational matrices go
/// through the certified modular path; the result is exact either way.
pub fn flattening_rank(f: &HomogeneousForm, spec: &FlatteningSpec) -> Result<usize> {
    let m = spec.matrix(f)?;
    if m.field() == FieldTag::Rationals && m.nrows().min(m.ncols()) >= 30 {
        m.rank_mod_certified(4)
    } else {
        Ok(m.rank())
    }
}

/// Maximum rank of the spec's matrix over `trials` random rational points,
/// evaluated at the point's d-th power. For a correctly assembled family this
/// equals the divisor `e`.
pub fn point_rank(spec: &FlatteningSpec, trials: usize, seed: u64) -> Result<usize> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..trials {
        let point = loop {
            let coords: Vec<i64> = (0..=spec.n).map(|_| rng.random_range(-9..=9)).collect();
            if coords.iter().any(|&c| c != 0) {
                break LinearPoint::from_i64(&coords, FieldTag::Rationals)?;
            }
        };
        let f = power_of_linear(&point, spec.d);
        best = best.max(flattening_rank(&f, spec)?);
    }
    Ok(best)
}

/// The default spec grid for shape `(n, d)`: all catalecticants `1 ≤ a ≤ d−1`
/// followed by all Koszul specs with `1 ≤ p ≤ n`, `0 ≤ a ≤ d−2`, skipping any
/// whose matrix would exceed `cap` entries.
pub fn default_spec_grid_capped(n: usize, d: usize, cap: usize) -> Result<Vec<FlatteningSpec>> {
    if n < 1 || d < 2 {
        return Err(Error::InvalidParameter(format!(
            "spec grid needs n >= 1 and d >= 2, got n = {n}, d = {d}"
        )));
    }
    let mut out = Vec::new();
    for a in 1..d {
        out.push(FlatteningSpec::catalecticant(n, d, a)?);
    }
    for p in 1..=n {
        for a in 0..=(d - 2) {
            out.push(FlatteningSpec::koszul(n, d, p, a)?);
        }
    }
    Ok(out
        .into_iter()
        .filter(|s| {
            let (r, c) = s.shape();
            r.saturating_mul(c) <= cap
        })
        .collect())
}

pub fn default_spec_grid(n: usize, d: usize) -> Result<Vec<FlatteningSpec>> {
    default_spec_grid_capped(n, d, DEFAULT_GRID_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_form, random_form};

    const Q: FieldTag = FieldTag::Rationals;

    #[test]
    fn catalecticant_of_cube_is_rank_one() {
        let f = parse_form("x0^3", 2, 3, Q).unwrap();
        let m = catalecticant_matrix(&f, 1).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (3, 6));
        assert_eq!(m.nnz(), 1);
        assert!(m.get(0, 0).is_one()); // (y0, x0^2) slot
        assert_eq!(m.rank(), 1);
        assert_eq!(m.row_labels().unwrap()[0], "y0");
        assert_eq!(m.col_labels().unwrap()[0], "x0^2");
    }

    #[test]
    fn catalecticant_of_x0x1x2_matches_hand_matrix() {
        let f = parse_form("x0*x1*x2", 2, 3, Q).unwrap();
        let m = catalecticant_matrix(&f, 1).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (3, 6));
        // row y_i = product of the other two variables
        assert!(m.get(0, 4).is_one()); // y0 -> x1*x2
        assert!(m.get(1, 2).is_one()); // y1 -> x0*x2
        assert!(m.get(2, 1).is_one()); // y2 -> x0*x1
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.rank(), 3);
        let (rows, cols) = m.witness_minor(3).unwrap();
        assert_eq!(rows, vec![0, 1, 2]);
        assert_eq!(cols, vec![1, 2, 4]);
    }

    #[test]
    fn generic_binary_quartic_middle_catalecticant() {
        let f = random_form(1, 4, Q, 1, 9).unwrap();
        let m = catalecticant_matrix(&f, 2).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (3, 3));
        assert_eq!(m.rank(), 3);
    }

    #[test]
    fn catalecticant_range_validated() {
        let f = parse_form("x0^3", 2, 3, Q).unwrap();
        assert!(catalecticant_matrix(&f, 0).is_err());
        assert!(catalecticant_matrix(&f, 3).is_err());
    }

    #[test]
    fn koszul_of_cube_has_rank_two() {
        let f = parse_form("x0^3", 2, 3, Q).unwrap();
        let m = koszul_matrix(&f, 1, 1).unwrap();
        assert_eq!((m.nrows(), m.ncols()), (9, 9));
        // x1⊗y0 ↦ +(x0∧x1)⊗x0 and x2⊗y0 ↦ +(x0∧x2)⊗x0; everything else dies
        assert_eq!(m.nnz(), 2);
        assert!(m.get(3, 0).is_one());
        assert!(m.get(6, 3).is_one());
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn koszul_p0_matches_catalecticant_rank() {
        for seed in [3u64, 5, 8] {
            let f = random_form(2, 4, Q, seed, 6).unwrap();
            for a in 1..=2usize {
                let cat = catalecticant_matrix(&f, a).unwrap().rank();
                let kos = koszul_matrix(&f, 0, a).unwrap().rank();
                assert_eq!(cat, kos, "seed {seed}, a {a}");
            }
        }
    }

    #[test]
    fn koszul_of_zero_form_is_zero() {
        let f = HomogeneousForm::zero(2, 3, Q);
        let m = koszul_matrix(&f, 1, 1).unwrap();
        assert!(m.is_zero());
        assert_eq!(m.rank(), 0);
    }

    #[test]
    fn wedge_insertion_signs() {
        let w = ExteriorIndex(vec![1, 3]);
        assert_eq!(w.insert(0).unwrap().0, 1);
        assert_eq!(w.insert(2).unwrap().0, -1);
        assert_eq!(w.insert(4).unwrap().0, 1);
        assert!(w.insert(3).is_none());
        assert_eq!(w.insert(2).unwrap().1, ExteriorIndex(vec![1, 2, 3]));
    }

    #[test]
    fn point_rank_of_catalecticant_is_one() {
        let spec = FlatteningSpec::catalecticant(2, 3, 1).unwrap();
        assert_eq!(point_rank(&spec, 5, 11).unwrap(), 1);
    }

    #[test]
    fn point_rank_of_koszul_is_binomial() {
        let spec = FlatteningSpec::koszul(2, 3, 1, 1).unwrap();
        assert_eq!(point_rank(&spec, 5, 11).unwrap(), 2);
        let spec = FlatteningSpec::koszul(2, 3, 0, 1).unwrap();
        assert_eq!(point_rank(&spec, 5, 11).unwrap(), 1);
    }

    #[test]
    fn default_grid_enumeration() {
        let grid = default_spec_grid(1, 3).unwrap();
        let expect = vec![
            FlatteningSpec::catalecticant(1, 3, 1).unwrap(),
            FlatteningSpec::catalecticant(1, 3, 2).unwrap(),
            FlatteningSpec::koszul(1, 3, 1, 0).unwrap(),
            FlatteningSpec::koszul(1, 3, 1, 1).unwrap(),
        ];
        assert_eq!(grid, expect);

        let grid = default_spec_grid(2, 2).unwrap();
        assert!(grid.contains(&FlatteningSpec::catalecticant(2, 2, 1).unwrap()));
        assert!(grid.contains(&FlatteningSpec::koszul(2, 2, 1, 0).unwrap()));
        assert!(grid.contains(&FlatteningSpec::koszul(2, 2, 2, 0).unwrap()));
    }

    #[test]
    fn grid_cap_is_respected() {
        let grid = default_spec_grid_capped(3, 6, 500).unwrap();
        assert!(!grid.is_empty());
        for s in &grid {
            let (r, c) = s.shape();
            assert!(r * c <= 500, "{s} has shape {r}x{c}");
        }
        assert!(default_spec_grid(0, 3).is_err());
        assert!(default_spec_grid(1, 1).is_err());
    }

    #[test]
    fn flattening_rank_of_powers_respects_divisor() {
        let p = LinearPoint::from_i64(&[2, -1, 3], Q).unwrap();
        let f = power_of_linear(&p, 4);
        for spec in default_spec_grid(2, 4).unwrap() {
            let r = flattening_rank(&f, &spec).unwrap();
            assert!(r <= spec.divisor(), "{spec}: rank {r} > e {}", spec.divisor());
        }
    }

    #[test]
    fn flattening_rank_checks_shape() {
        let f = parse_form("x0^3", 2, 3, Q).unwrap();
        let spec = FlatteningSpec::catalecticant(2, 4, 1).unwrap();
        assert!(flattening_rank(&f, &spec).is_err());
    }

    #[test]
    fn matrices_are_linear_in_the_form() {
        let f = random_form(2, 3, Q, 21, 5).unwrap();
        let g = random_form(2, 3, Q, 22, 5).unwrap();
        let sum = f.add(&g).unwrap();
        let spec = FlatteningSpec::koszul(2, 3, 1, 1).unwrap();
        let mf = spec.matrix(&f).unwrap();
        let mg = spec.matrix(&g).unwrap();
        let msum = spec.matrix(&sum).unwrap();
        for r in 0..mf.nrows() {
            for c in 0..mf.ncols() {
                assert_eq!(msum.get(r, c), mf.get(r, c).add(&mg.get(r, c)));
            }
        }
        // rank subadditivity follows
        assert!(msum.rank() <= mf.rank() + mg.rank());
    }

    #[test]
    fn catalecticants_transpose_into_each_other() {
        let f = random_form(2, 5, Q, 33, 7).unwrap();
        for a in 1..=2usize {
            let m1 = catalecticant_matrix(&f, a).unwrap();
            let m2 = catalecticant_matrix(&f, 5 - a).unwrap().transpose();
            assert_eq!((m1.nrows(), m1.ncols()), (m2.nrows(), m2.ncols()));
            for (r, c, v) in m1.iter() {
                assert_eq!(*v, m2.get(r, c));
            }
            assert_eq!(m1.nnz(), m2.nnz());
            assert_eq!(m1.rank(), m2.rank());
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(
            FlatteningSpec::parse("cat:2", 2, 4).unwrap(),
            FlatteningSpec::catalecticant(2, 4, 2).unwrap()
        );
        assert_eq!(
            FlatteningSpec::parse("koszul:1:0", 2, 4).unwrap(),
            FlatteningSpec::koszul(2, 4, 1, 0).unwrap()
        );
        assert!(FlatteningSpec::parse("cat:0", 2, 4).is_err());
        assert!(FlatteningSpec::parse("young:1", 2, 4).is_err());
    }
}
