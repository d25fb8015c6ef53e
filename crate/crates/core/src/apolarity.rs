//! Homogeneous ideals in the dual variables, their graded pieces and Hilbert
//! functions, and the apolarity membership tests.
//!
//! An ideal stands in for a closed subscheme of projective space: the
//! degree-t piece of the ideal plays the role of the degree-t forms vanishing
//! on the scheme. For saturated input this is exact in every degree at or
//! above the regularity; non-saturated input can only shrink the pieces,
//! which weakens but never falsifies the containment checks below.

use crate::error::{Error, Result};
use crate::flatten::{contraction_matrix, FlatteningKind, FlatteningSpec};
use crate::matrix::SparseMatrix;
use crate::poly::{contract, monomial_count, monomials_of_degree, parse_dual_form, DualForm, HomogeneousForm};
use crate::scalar::{FieldTag, Scalar};
use std::fmt;

/// A finite generating set of homogeneous dual forms, possibly of mixed
/// degrees. Generators must be nonzero; their order is kept but affects
/// nothing computable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousIdeal {
    n: usize,
    field: FieldTag,
    generators: Vec<DualForm>,
}

impl HomogeneousIdeal {
    pub fn new(n: usize, field: FieldTag, generators: Vec<DualForm>) -> Result<Self> {
        for g in &generators {
            if g.is_zero() {
                return Err(Error::ZeroForm);
            }
            if g.n() != n {
                return Err(Error::DimensionMismatch(format!(
                    "generator in {} variables in an ideal over {} variables",
                    g.n() + 1,
                    n + 1
                )));
            }
            if g.field() != field {
                return Err(Error::MixedField {
                    expected: field,
                    found: g.field(),
                });
            }
        }
        Ok(HomogeneousIdeal {
            n,
            field,
            generators,
        })
    }

    /// Parses the ideal file format: one generator per line in the dual
    /// grammar, `#` comments and blank lines ignored.
    pub fn parse(text: &str, n: usize, field: FieldTag) -> Result<Self> {
        let mut gens = Vec::new();
        for line in text.lines() {
            let line = match line.find('#') {
                Some(i) => &line[..i],
                None => line,
            };
            if line.trim().is_empty() {
                continue;
            }
            gens.push(parse_dual_form(line, n, field)?);
        }
        HomogeneousIdeal::new(n, field, gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn generators(&self) -> &[DualForm] {
        &self.generators
    }

    pub fn max_generator_degree(&self) -> usize {
        self.generators.iter().map(|g| g.degree()).max().unwrap_or(0)
    }
}

/// Recorded Hilbert function values of `S/I` with the detected stabilization,
/// if any. When `stabilized_at` is set the last three recorded values are
/// equal and `length` holds that value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertProfile {
    pub values: Vec<(usize, usize)>,
    pub stabilized_at: Option<usize>,
    pub length: Option<usize>,
}

/// A basis of the degree-t piece of the ideal: the span of all `m·g` with
/// `g` a generator of degree at most `t` and `m` a monomial of complementary
/// degree, row-reduced to a canonical (reduced echelon) basis.
pub fn ideal_piece(ideal: &HomogeneousIdeal, t: usize) -> Result<Vec<DualForm>> {
    let n = ideal.n();
    let basis = monomials_of_degree(n + 1, t);
    let index: std::collections::BTreeMap<_, usize> =
        basis.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
    let mut products: Vec<DualForm> = Vec::new();
    for g in ideal.generators() {
        if g.degree() > t {
            continue;
        }
        for m in monomials_of_degree(n + 1, t - g.degree()) {
            products.push(g.times_monomial(&m)?);
        }
    }
    if products.is_empty() {
        return Ok(Vec::new());
    }
    let mut matrix = SparseMatrix::new(products.len(), basis.len(), ideal.field());
    for (r, p) in products.iter().enumerate() {
        for (mono, c) in p.terms() {
            matrix.insert(r, index[mono], c.clone())?;
        }
    }
    rows_to_dual_forms(&matrix.rref_rows(), &basis, n, ideal.field())
}

/// `dim (S/I)_t`, i.e. the count of degree-t monomials minus the dimension
/// of the ideal's degree-t piece.
pub fn hilbert_function(ideal: &HomogeneousIdeal, t: usize) -> Result<usize> {
    Ok(monomial_count(ideal.n(), t) - ideal_piece(ideal, t)?.len())
}

/// Computes Hilbert function values until three consecutive values agree
/// (looking only from the maximum generator degree onward) or `t_max` is
/// reached.
pub fn hilbert_profile(ideal: &HomogeneousIdeal, t_max: usize) -> Result<HilbertProfile> {
    if t_max < 2 {
        return Err(Error::InvalidParameter("t_max must be at least 2".into()));
    }
    let start = ideal.max_generator_degree();
    let mut values = Vec::new();
    for t in 0..=t_max {
        values.push((t, hilbert_function(ideal, t)?));
        if t >= start + 2 && t >= 2 {
            let h2 = values[t].1;
            let h1 = values[t - 1].1;
            let h0 = values[t - 2].1;
            if t - 2 >= start && h0 == h1 && h1 == h2 {
                return Ok(HilbertProfile {
                    values,
                    stabilized_at: Some(t - 2),
                    length: Some(h2),
                });
            }
        }
    }
    Ok(HilbertProfile {
        values,
        stabilized_at: None,
        length: None,
    })
}

/// The stabilized Hilbert function value: the length of the subscheme the
/// ideal defines when it is zero-dimensional.
pub fn length(ideal: &HomogeneousIdeal, t_max: usize) -> Result<usize> {
    hilbert_profile(ideal, t_max)?
        .length
        .ok_or(Error::Unstable { t_max })
}

/// A canonical basis of the dual forms of degree `t` annihilating `f` under
/// contraction. For `t > deg f` everything annihilates and the full monomial
/// basis is returned.
pub fn annihilator_piece(f: &HomogeneousForm, t: usize) -> Result<Vec<DualForm>> {
    let n = f.n();
    if t > f.degree() {
        return monomials_of_degree(n + 1, t)
            .into_iter()
            .map(|m| DualForm::monomial(n, m, f.field()))
            .collect();
    }
    let basis = monomials_of_degree(n + 1, t);
    // the kernel of the contraction map lives on the dual (row) side of the
    // stored matrix, i.e. it is the right kernel of the transpose
    let kernel = contraction_matrix(f, t)?.transpose().kernel_basis();
    kernel
        .into_iter()
        .map(|v| {
            DualForm::from_terms(
                n,
                t,
                f.field(),
                basis
                    .iter()
                    .cloned()
                    .zip(v)
                    .filter(|(_, c)| !c.is_zero()),
            )
        })
        .collect()
}

/// The apolarity membership test: `f` lies in the span of the subscheme cut
/// out by the ideal iff the ideal's degree-d piece contracts `f` to zero.
pub fn in_span(ideal: &HomogeneousIdeal, f: &HomogeneousForm) -> Result<bool> {
    if f.is_zero() {
        return Err(Error::ZeroForm);
    }
    if ideal.n() != f.n() {
        return Err(Error::DimensionMismatch(format!(
            "ideal over {} variables against a form in {}",
            ideal.n() + 1,
            f.n() + 1
        )));
    }
    if ideal.field() != f.field() {
        return Err(Error::MixedField {
            expected: f.field(),
            found: ideal.field(),
        });
    }
    for d_form in ideal_piece(ideal, f.degree())? {
        if !contract(&d_form, f)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the kernel-containment check: when `in_span` holds,
/// `kernel_contained` must hold too; when `in_span` fails the containment
/// result carries no claim and the report is vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonabelianReport {
    pub in_span: bool,
    pub kernel_contained: bool,
}

impl NonabelianReport {
    pub fn holds(&self) -> bool {
        self.in_span && self.kernel_contained
    }

    pub fn is_vacuous(&self) -> bool {
        !self.in_span
    }
}

impl fmt::Display for NonabelianReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vacuous() {
            write!(f, "vacuous (form not in the scheme's span)")
        } else if self.kernel_contained {
            write!(f, "holds")
        } else {
            write!(f, "VIOLATED")
        }
    }
}

/// Checks that every element of the ideal's degree-a piece lies in the kernel
/// of the degree-a contraction of `f`. Only catalecticant specs are
/// supported; sections of the Koszul family are not computed.
pub fn check_nonabelian(
    ideal: &HomogeneousIdeal,
    f: &HomogeneousForm,
    spec: &FlatteningSpec,
) -> Result<NonabelianReport> {
    let FlatteningKind::Catalecticant { a } = spec.kind() else {
        return Err(Error::UnsupportedSpec(format!(
            "{spec}: kernel containment is only checked for catalecticants"
        )));
    };
    if spec.n() != f.n() || spec.d() != f.degree() {
        return Err(Error::DimensionMismatch(format!(
            "{spec} does not match a form of shape (n={}, d={})",
            f.n(),
            f.degree()
        )));
    }
    let in_span = in_span(ideal, f)?;
    let mut kernel_contained = true;
    for d_form in ideal_piece(ideal, a)? {
        if !contract(&d_form, f)?.is_zero() {
            kernel_contained = false;
            break;
        }
    }
    Ok(NonabelianReport {
        in_span,
        kernel_contained,
    })
}

fn rows_to_dual_forms(
    rows: &[(usize, Vec<(usize, Scalar)>)],
    basis: &[crate::poly::Monomial],
    n: usize,
    field: FieldTag,
) -> Result<Vec<DualForm>> {
    rows.iter()
        .map(|(_, row)| {
            DualForm::from_terms(
                n,
                basis.first().map(|m| m.degree()).unwrap_or(0),
                field,
                row.iter().map(|(c, v)| (basis[*c].clone(), v.clone())),
            )
        })
        .collect()
}
