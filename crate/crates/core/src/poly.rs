//! Homogeneous forms, dual forms, and the contraction pairing.
//!
//! Convention: contraction acts on monomials by exponent subtraction,
//! `y^β ⌟ x^α = x^{α−β}` when `β ≤ α` componentwise and `0` otherwise, so the
//! full-degree pairing of `y^β` against `x^α` is `1` exactly when `α = β`. A
//! form's coefficients are its coordinates in the basis dual to the dual
//! monomials under this pairing; in particular the d-th power of a linear
//! point `ℓ` has coefficient `ℓ^α` on `x^α`, and its contraction matrices all
//! have rank one. This is the factorial-free normalization: switching to the
//! factorial-scaled pairing only rescales matrix columns and changes no rank.

use crate::error::{Error, Result};
use crate::scalar::{parse_scalar, FieldTag, Scalar};
use num_traits::Signed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

/// Exponent vector of a monomial in `n+1` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn constant(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient(&self, other: &Monomial) -> Option<Monomial> {
        if self.divides(other) {
            Some(Monomial(
                other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect(),
            ))
        } else {
            None
        }
    }

    fn fmt_with(&self, letter: char, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{letter}{i}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Graded-lexicographic order with `x0 > x1 > … > xn`: degrees compare first,
/// then the earliest differing exponent decides (larger exponent on an
/// earlier variable wins).
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| {
                for (a, b) in self.0.iter().zip(&other.0) {
                    match a.cmp(b) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of the given degree in `nvars` variables, in descending
/// graded-lex order (`x0^d` first). This order labels every matrix row and
/// column in the crate.
pub fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Monomial> {
    fn rec(nvars: usize, d: usize, out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>) {
        if nvars == 1 {
            prefix.push(d as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=d).rev() {
            prefix.push(first as u32);
            rec(nvars - 1, d - first, out, prefix);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(nvars, d, &mut out, &mut Vec::new());
    out.into_iter().map(Monomial).collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of degree-`d` monomials in `n+1` variables.
pub fn monomial_count(n: usize, d: usize) -> usize {
    binomial(n + d, n)
}

/// Marker for the variable alphabet of a form.
pub trait VarKind: Clone + fmt::Debug + PartialEq + Eq + 'static {
    const LETTER: char;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Primal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dual;

impl VarKind for Primal {
    const LETTER: char = 'x';
}

impl VarKind for Dual {
    const LETTER: char = 'y';
}

/// A homogeneous form of fixed degree in `n+1` variables. Zero coefficients
/// are never stored; the zero form has an empty term map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form<V: VarKind> {
    n: usize,
    d: usize,
    field: FieldTag,
    terms: BTreeMap<Monomial, Scalar>,
    _kind: PhantomData<V>,
}

/// Element of `S^d V`, in the `x` variables.
pub type HomogeneousForm = Form<Primal>;

/// Element of `S^d V*`, in the `y` variables.
pub type DualForm = Form<Dual>;

impl<V: VarKind> Form<V> {
    pub fn zero(n: usize, d: usize, field: FieldTag) -> Self {
        Form {
            n,
            d,
            field,
            terms: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    pub fn from_terms<I>(n: usize, d: usize, field: FieldTag, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut f = Form::zero(n, d, field);
        for (m, c) in terms {
            f.add_term(m, c)?;
        }
        Ok(f)
    }

    /// A single monomial with coefficient one.
    pub fn monomial(n: usize, mono: Monomial, field: FieldTag) -> Result<Self> {
        let d = mono.degree();
        Form::from_terms(n, d, field, [(mono, Scalar::one(field))])
    }

    /// Adds `c·mono`, validating the variable count, degree, and field.
    pub fn add_term(&mut self, mono: Monomial, c: Scalar) -> Result<()> {
        if mono.nvars() != self.n + 1 {
            return Err(Error::DimensionMismatch(format!(
                "monomial in {} variables added to a form in {}",
                mono.nvars(),
                self.n + 1
            )));
        }
        if mono.degree() != self.d {
            return Err(Error::Degree(format!(
                "monomial of degree {} in a form of degree {}",
                mono.degree(),
                self.d
            )));
        }
        if c.field() != self.field {
            return Err(Error::MixedField {
                expected: self.field,
                found: c.field(),
            });
        }
        if c.is_zero() {
            return Ok(());
        }
        let cur = self
            .terms
            .remove(&mono)
            .unwrap_or_else(|| Scalar::zero(self.field));
        let nv = cur.add(&c);
        if !nv.is_zero() {
            self.terms.insert(mono, nv);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Scalar {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(|| Scalar::zero(self.field))
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Scalar::one(self.field).neg()))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Form::zero(self.n, self.d, self.field);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            out.terms.insert(m.clone(), v.mul(c));
        }
        out
    }

    /// Product of two forms in the same alphabet.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "product of forms in {} and {} variables",
                self.n + 1,
                other.n + 1
            )));
        }
        if self.field != other.field {
            return Err(Error::MixedField {
                expected: self.field,
                found: other.field,
            });
        }
        let mut out = Form::zero(self.n, self.d + other.d, self.field);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul(c2))?;
            }
        }
        Ok(out)
    }

    pub fn times_monomial(&self, mono: &Monomial) -> Result<Self> {
        let f = Form::<V>::monomial(self.n, mono.clone(), self.field)?;
        self.mul(&f)
    }

    /// Evaluates the form at a coordinate vector.
    pub fn evaluate(&self, coords: &[Scalar]) -> Result<Scalar> {
        if coords.len() != self.n + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a form in {} variables",
                coords.len(),
                self.n + 1
            )));
        }
        let mut acc = Scalar::zero(self.field);
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&coords[i]);
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Dense coefficient vector over the given monomial basis order.
    pub fn coefficient_vector(&self, basis: &[Monomial]) -> Vec<Scalar> {
        basis.iter().map(|m| self.coefficient(m)).collect()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::DimensionMismatch(format!(
                "forms of shape (n={}, d={}) and (n={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        if self.field != other.field {
            return Err(Error::MixedField {
                expected: self.field,
                found: other.field,
            });
        }
        Ok(())
    }
}

impl<V: VarKind> fmt::Display for Form<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // descending graded-lex: largest monomial first
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag) = match c {
                Scalar::Rational(r) if r.is_negative() => (true, c.neg()),
                _ => (false, c.clone()),
            };
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.degree() == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                m.fmt_with(V::LETTER, f)?;
            } else {
                write!(f, "{mag}*")?;
                m.fmt_with(V::LETTER, f)?;
            }
        }
        Ok(())
    }
}

/// A point of projective space, canonicalized so its first nonzero
/// coordinate is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearPoint {
    coords: Vec<Scalar>,
}

impl LinearPoint {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("empty coordinate vector".into()));
        }
        let field = coords[0].field();
        for c in &coords {
            if c.field() != field {
                return Err(Error::MixedField {
                    expected: field,
                    found: c.field(),
                });
            }
        }
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .cloned()
            .ok_or_else(|| Error::InvalidParameter("point has all-zero coordinates".into()))?;
        let inv = lead.inverse().expect("nonzero leading coordinate");
        Ok(LinearPoint {
            coords: coords.iter().map(|c| c.mul(&inv)).collect(),
        })
    }

    pub fn from_i64(coords: &[i64], field: FieldTag) -> Result<Self> {
        LinearPoint::new(coords.iter().map(|&c| Scalar::from_i64(c, field)).collect())
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn field(&self) -> FieldTag {
        self.coords[0].field()
    }
}

impl fmt::Display for LinearPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Contraction `D ⌟ F`: bilinear, `y^β ⌟ x^α = x^{α−β}` when `β ≤ α` and `0`
/// otherwise. For `deg D = deg F` the result is the degree-0 pairing value.
pub fn contract(d_form: &DualForm, f: &HomogeneousForm) -> Result<HomogeneousForm> {
    if d_form.n() != f.n() {
        return Err(Error::DimensionMismatch(format!(
            "contraction across variable counts {} and {}",
            d_form.n() + 1,
            f.n() + 1
        )));
    }
    if d_form.field() != f.field() {
        return Err(Error::MixedField {
            expected: f.field(),
            found: d_form.field(),
        });
    }
    if d_form.degree() > f.degree() {
        return Err(Error::Degree(format!(
            "cannot contract a degree-{} form by degree {}",
            f.degree(),
            d_form.degree()
        )));
    }
    let mut out = HomogeneousForm::zero(f.n(), f.degree() - d_form.degree(), f.field());
    for (beta, dc) in d_form.terms() {
        for (alpha, fc) in f.terms() {
            if let Some(gamma) = beta.quotient(alpha) {
                out.add_term(gamma, dc.mul(fc))?;
            }
        }
    }
    Ok(out)
}

/// The d-th power of a linear point in contraction-dual coordinates: the
/// coefficient of `x^α` is `ℓ^α`. All flattenings of such a power have point
/// rank (one for catalecticants), which is what makes rank bounds sound.
pub fn power_of_linear(point: &LinearPoint, d: usize) -> HomogeneousForm {
    let n = point.n();
    let field = point.field();
    let mut out = HomogeneousForm::zero(n, d, field);
    'mono: for m in monomials_of_degree(n + 1, d) {
        let mut c = Scalar::one(field);
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if point.coords()[i].is_zero() {
                continue 'mono;
            }
            for _ in 0..e {
                c = c.mul(&point.coords()[i]);
            }
        }
        out.terms.insert(m, c);
    }
    out
}

/// Deterministic random form: every degree-d monomial receives an integer
/// coefficient drawn uniformly from `[-coeff_bound, coeff_bound]`.
pub fn random_form(
    n: usize,
    d: usize,
    field: FieldTag,
    seed: u64,
    coeff_bound: i64,
) -> Result<HomogeneousForm> {
    if coeff_bound < 1 {
        return Err(Error::InvalidParameter(
            "coeff_bound must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = HomogeneousForm::zero(n, d, field);
    for m in monomials_of_degree(n + 1, d) {
        let c = rng.random_range(-coeff_bound..=coeff_bound);
        out.add_term(m, Scalar::from_i64(c, field))?;
    }
    Ok(out)
}

/// Parses the polynomial grammar: terms joined by `+`/`-`, each term an
/// optional rational coefficient and `*`-separated powers like `x2^3`;
/// whitespace is ignored. The zero polynomial is rejected unless
/// `allow_zero` is set.
pub fn parse_form_opts<V: VarKind>(
    text: &str,
    n: usize,
    expected_degree: Option<usize>,
    field: FieldTag,
    allow_zero: bool,
) -> Result<Form<V>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign = false;
    let mut started = false;
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && started {
            terms.push((sign, std::mem::take(&mut cur)));
            sign = ch == '-';
        } else if (ch == '+' || ch == '-') && !started {
            sign = ch == '-';
            started = true;
        } else {
            cur.push(ch);
            started = true;
        }
    }
    terms.push((sign, cur));

    let mut parsed: Vec<(Monomial, Scalar)> = Vec::new();
    let mut inferred: Option<usize> = None;
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(Error::Parse("dangling sign or empty term".into()));
        }
        let mut coeff = Scalar::one(field);
        let mut expo = vec![0u32; n + 1];
        for factor in term.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in term `{term}`")));
            }
            let first = factor.chars().next().unwrap();
            if first.is_ascii_digit() {
                let c = parse_scalar(factor, field).map_err(Error::Parse)?;
                coeff = coeff.mul(&c);
            } else if first == V::LETTER {
                let rest = &factor[1..];
                let (idx_str, exp_str) = match rest.split_once('^') {
                    Some((i, e)) => (i, Some(e)),
                    None => (rest, None),
                };
                let idx: usize = idx_str
                    .parse()
                    .map_err(|_| Error::UnknownVariable(factor.to_string()))?;
                if idx > n {
                    return Err(Error::UnknownVariable(format!(
                        "{}{idx} (only {}0..{}{n} available)",
                        V::LETTER,
                        V::LETTER,
                        V::LETTER
                    )));
                }
                let e: u32 = match exp_str {
                    Some(s) => s
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?,
                    None => 1,
                };
                expo[idx] += e;
            } else {
                return Err(Error::UnknownVariable(factor.to_string()));
            }
        }
        if neg {
            coeff = coeff.neg();
        }
        if coeff.is_zero() {
            continue;
        }
        let mono = Monomial(expo);
        match inferred {
            None => inferred = Some(mono.degree()),
            Some(d) if d != mono.degree() => {
                return Err(Error::NonHomogeneous {
                    term,
                    got: mono.degree(),
                    expected: d,
                });
            }
            _ => {}
        }
        parsed.push((mono, coeff));
    }
    if let (Some(expected), Some(got)) = (expected_degree, inferred) {
        if expected != got {
            return Err(Error::Degree(format!(
                "polynomial has degree {got}, expected {expected}"
            )));
        }
    }
    if parsed.is_empty() {
        let d = expected_degree.or(inferred).ok_or_else(|| {
            Error::Parse("zero polynomial with no degree context".into())
        })?;
        if allow_zero {
            return Ok(Form::zero(n, d, field));
        }
        return Err(Error::ZeroForm);
    }
    let d = inferred.expect("degree fixed by first term");
    let form = Form::from_terms(n, d, field, parsed)?;
    if form.is_zero() && !allow_zero {
        return Err(Error::ZeroForm);
    }
    Ok(form)
}

/// Parses a homogeneous form in the `x` alphabet, rejecting the zero form
/// and any degree other than `d`.
pub fn parse_form(text: &str, n: usize, d: usize, field: FieldTag) -> Result<HomogeneousForm> {
    parse_form_opts::<Primal>(text, n, Some(d), field, false)
}

/// Parses a dual form in the `y` alphabet, inferring its degree.
pub fn parse_dual_form(text: &str, n: usize, field: FieldTag) -> Result<DualForm> {
    parse_form_opts::<Dual>(text, n, None, field, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    const Q: FieldTag = FieldTag::Rationals;

    fn pf(text: &str, n: usize, d: usize) -> HomogeneousForm {
        parse_form(text, n, d, Q).unwrap()
    }

    fn pd(text: &str, n: usize) -> DualForm {
        parse_dual_form(text, n, Q).unwrap()
    }

    #[test]
    fn monomial_order_is_graded_lex() {
        let ms = monomials_of_degree(3, 2);
        let strs: Vec<String> = ms.iter().map(|m| format!("{:?}", m.0)).collect();
        assert_eq!(
            strs,
            vec!["[2, 0, 0]", "[1, 1, 0]", "[1, 0, 1]", "[0, 2, 0]", "[0, 1, 1]", "[0, 0, 2]"]
        );
        assert_eq!(ms.len(), monomial_count(2, 2));
        // descending under Ord
        for w in ms.windows(2) {
            assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn parse_basic_forms() {
        let f = pf("x0^3", 2, 3);
        assert_eq!(f.num_terms(), 1);
        assert_eq!(f.coefficient(&Monomial(vec![3, 0, 0])), Scalar::one(Q));

        let g = pf("x0*x1*x2 + 2*x1^3", 2, 3);
        assert_eq!(g.num_terms(), 2);
        assert_eq!(
            g.coefficient(&Monomial(vec![0, 3, 0])),
            Scalar::from_i64(2, Q)
        );
    }

    #[test]
    fn parse_rejects_non_homogeneous() {
        let e = parse_form("x0^2 + x1", 2, 2, Q);
        assert!(matches!(e, Err(Error::NonHomogeneous { .. })));
    }

    #[test]
    fn parse_rejects_degree_mismatch_and_unknowns() {
        assert!(matches!(parse_form("x0^2", 2, 3, Q), Err(Error::Degree(_))));
        assert!(matches!(
            parse_form("x3", 2, 1, Q),
            Err(Error::UnknownVariable(_))
        ));
        assert!(matches!(
            parse_form("z0", 2, 1, Q),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn parse_zero_needs_flag() {
        assert!(matches!(parse_form("0", 2, 3, Q), Err(Error::ZeroForm)));
        let z = parse_form_opts::<Primal>("0", 2, Some(3), Q, true).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn contract_single_rules() {
        let f = pf("x0^3", 2, 3);
        let y0 = pd("y0", 2);
        let y1 = pd("y1", 2);
        assert_eq!(contract(&y0, &f).unwrap(), pf("x0^2", 2, 2));
        assert!(contract(&y1, &f).unwrap().is_zero());
    }

    #[test]
    fn contract_componentwise_rule() {
        // frozen from the componentwise rule: (y0*y1) ⌟ (x0*x1*x2) = x2
        let f = pf("x0*x1*x2", 2, 3);
        let d = pd("y0*y1", 2);
        assert_eq!(contract(&d, &f).unwrap(), pf("x2", 2, 1));
    }

    #[test]
    fn contract_degree_error() {
        let f = pf("x0", 2, 1);
        let d = pd("y0^2", 2);
        assert!(matches!(contract(&d, &f), Err(Error::Degree(_))));
    }

    #[test]
    fn full_degree_pairing_is_diagonal() {
        // Gram matrix of the pairing on S^2* x S^2 is the identity pattern.
        let monos = monomials_of_degree(2, 2);
        for mi in &monos {
            for mj in &monos {
                let d = DualForm::monomial(1, mi.clone(), Q).unwrap();
                let f = HomogeneousForm::monomial(1, mj.clone(), Q).unwrap();
                let pairing = contract(&d, &f).unwrap();
                let expect = if mi == mj { 1 } else { 0 };
                assert_eq!(
                    pairing.coefficient(&Monomial::constant(2)),
                    Scalar::from_i64(expect, Q)
                );
            }
        }
    }

    #[test]
    fn power_of_coordinate_point() {
        let p = LinearPoint::from_i64(&[1, 0, 0], Q).unwrap();
        assert_eq!(power_of_linear(&p, 5), pf("x0^5", 2, 5));
    }

    #[test]
    fn power_coordinates_are_point_powers() {
        // coefficient of x^alpha is the alpha-power of the point
        let p = LinearPoint::from_i64(&[1, 1], Q).unwrap();
        assert_eq!(power_of_linear(&p, 2), pf("x0^2 + x0*x1 + x1^2", 1, 2));

        let p = LinearPoint::from_i64(&[1, 2], Q).unwrap();
        assert_eq!(
            power_of_linear(&p, 3),
            pf("x0^3 + 2*x0^2*x1 + 4*x0*x1^2 + 8*x1^3", 1, 3)
        );
    }

    #[test]
    fn power_contracts_to_scaled_power() {
        // D ⌟ ℓ^d = D(ℓ) · ℓ^(d−a): the rank-one law in coordinates
        let p = LinearPoint::from_i64(&[1, 2, -3], Q).unwrap();
        let f = power_of_linear(&p, 4);
        for d_text in ["y0*y1", "y1^2", "y0*y2", "3*y1*y2 - y0^2"] {
            let d = pd(d_text, 2);
            let lhs = contract(&d, &f).unwrap();
            let value = d.evaluate(p.coords()).unwrap();
            let rhs = power_of_linear(&p, 2).scale(&value);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn linear_point_canonicalizes() {
        let a = LinearPoint::from_i64(&[0, 2, 4], Q).unwrap();
        let b = LinearPoint::from_i64(&[0, 1, 2], Q).unwrap();
        assert_eq!(a, b);
        assert!(LinearPoint::from_i64(&[0, 0], Q).is_err());
    }

    #[test]
    fn random_form_is_deterministic() {
        let a = random_form(2, 3, Q, 42, 5).unwrap();
        let b = random_form(2, 3, Q, 42, 5).unwrap();
        assert_eq!(a, b);
        assert!(random_form(2, 3, Q, 42, 0).is_err());
        let c = random_form(1, 2, Q, 7, 3).unwrap();
        for (_, coeff) in c.terms() {
            let r = coeff.as_rational().unwrap();
            assert!(r.denom().is_one() && r.numer().abs() <= 3.into());
        }
    }

    #[test]
    fn display_round_trips_hand_cases() {
        for text in [
            "x0^3",
            "x0*x1*x2 + 2*x1^3",
            "-x0^2 + 1/2*x0*x1 - 3*x1^2",
            "2/3*x0^4 - x1^4",
        ] {
            let f = parse_form_opts::<Primal>(text, 2, None, Q, false).unwrap();
            let printed = f.to_string();
            let again = parse_form_opts::<Primal>(&printed, 2, None, Q, false).unwrap();
            assert_eq!(f, again, "round trip through `{printed}`");
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn print_parse_round_trip(seed in 0u64..1000) {
            let f = random_form(2, 3, Q, seed, 6).unwrap();
            if !f.is_zero() {
                let printed = f.to_string();
                let again = parse_form(&printed, 2, 3, Q).unwrap();
                proptest::prop_assert_eq!(f, again);
            }
        }

        #[test]
        fn contraction_is_associative(seed in 0u64..1000) {
            // D1 ⌟ (D2 ⌟ F) = (D1·D2) ⌟ F
            let f = random_form(2, 4, Q, seed, 4).unwrap();
            let d1 = pd("y0 - 2*y2", 2);
            let d2 = pd("y1 + y2", 2);
            let lhs = contract(&d1, &contract(&d2, &f).unwrap()).unwrap();
            let rhs = contract(&d1.mul(&d2).unwrap(), &f).unwrap();
            proptest::prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn contraction_is_bilinear(s1 in 0u64..500, s2 in 500u64..1000) {
            let f = random_form(2, 3, Q, s1, 4).unwrap();
            let g = random_form(2, 3, Q, s2, 4).unwrap();
            let d = pd("y0 + 3*y1", 2);
            let lhs = contract(&d, &f.add(&g).unwrap()).unwrap();
            let rhs = contract(&d, &f).unwrap().add(&contract(&d, &g).unwrap()).unwrap();
            proptest::prop_assert_eq!(lhs, rhs);
        }
    }
}
