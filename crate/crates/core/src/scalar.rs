//! Exact field elements: arbitrary-precision rationals and prime-field residues.
//!
//! Every matrix and polynomial in this crate carries a [`FieldTag`] and all of
//! its entries must agree with it. Arithmetic between mismatched tags is a
//! programming error and panics; the public constructors of matrices and
//! forms reject mixed inputs with a proper [`Error`](crate::Error) before any
//! arithmetic can happen.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// The field a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldTag {
    Rationals,
    PrimeField(u64),
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rationals => write!(f, "Q"),
            FieldTag::PrimeField(p) => write!(f, "Fp:{p}"),
        }
    }
}

/// An exact scalar: a rational in lowest terms, or a residue in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Residue { value: u64, prime: u64 },
}

impl Scalar {
    pub fn zero(field: FieldTag) -> Self {
        match field {
            FieldTag::Rationals => Scalar::Rational(BigRational::zero()),
            FieldTag::PrimeField(p) => Scalar::Residue { value: 0, prime: p },
        }
    }

    pub fn one(field: FieldTag) -> Self {
        match field {
            FieldTag::Rationals => Scalar::Rational(BigRational::one()),
            FieldTag::PrimeField(p) => Scalar::Residue {
                value: if p == 1 { 0 } else { 1 },
                prime: p,
            },
        }
    }

    /// Embeds a machine integer into the field.
    pub fn from_i64(v: i64, field: FieldTag) -> Self {
        match field {
            FieldTag::Rationals => Scalar::Rational(BigRational::from(BigInt::from(v))),
            FieldTag::PrimeField(p) => {
                let r = v.rem_euclid(p as i64) as u64;
                Scalar::Residue { value: r, prime: p }
            }
        }
    }

    /// Embeds a quotient of machine integers. `None` when the denominator
    /// vanishes in the field.
    pub fn from_fraction(num: i64, den: i64, field: FieldTag) -> Option<Self> {
        match field {
            FieldTag::Rationals => {
                if den == 0 {
                    None
                } else {
                    Some(Scalar::Rational(BigRational::new(
                        BigInt::from(num),
                        BigInt::from(den),
                    )))
                }
            }
            FieldTag::PrimeField(_) => {
                let d = Scalar::from_i64(den, field);
                let n = Scalar::from_i64(num, field);
                d.inverse().map(|di| n.mul(&di))
            }
        }
    }

    pub fn field(&self) -> FieldTag {
        match self {
            Scalar::Rational(_) => FieldTag::Rationals,
            Scalar::Residue { prime, .. } => FieldTag::PrimeField(*prime),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Residue { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Residue { value, .. } => *value == 1,
        }
    }

    fn check(&self, rhs: &Scalar) {
        assert_eq!(
            self.field(),
            rhs.field(),
            "field tag mismatch in scalar arithmetic"
        );
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Residue { value: a, prime }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: add_mod(*a, *b, *prime),
                    prime: *prime,
                }
            }
            _ => unreachable!(),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Residue { value, prime } => Scalar::Residue {
                value: if *value == 0 { 0 } else { prime - value },
                prime: *prime,
            },
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Residue { value: a, prime }, Scalar::Residue { value: b, .. }) => {
                Scalar::Residue {
                    value: mul_mod(*a, *b, *prime),
                    prime: *prime,
                }
            }
            _ => unreachable!(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Rational(a) => Some(Scalar::Rational(a.recip())),
            Scalar::Residue { value, prime } => inv_mod(*value, *prime).map(|v| Scalar::Residue {
                value: v,
                prime: *prime,
            }),
        }
    }

    /// Exact division; panics on zero divisor (callers pivot on nonzeros).
    pub fn div(&self, rhs: &Scalar) -> Scalar {
        self.mul(&rhs.inverse().expect("division by zero scalar"))
    }

    /// The rational value, if this scalar is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Reduction of a rational scalar modulo `p`. `None` when `p` divides the
    /// denominator.
    pub fn reduce_mod(&self, p: u64) -> Option<u64> {
        match self {
            Scalar::Residue { value, prime } => (*prime == p).then_some(*value),
            Scalar::Rational(r) => {
                let den = reduce_bigint_mod(r.denom(), p);
                if den == 0 {
                    return None;
                }
                let num = reduce_bigint_mod(r.numer(), p);
                Some(mul_mod(num, inv_mod(den, p)?, p))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Parses `p`, `-p`, or `p/q` into the given field.
pub fn parse_scalar(text: &str, field: FieldTag) -> Result<Scalar, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let n: i128 = num
        .parse()
        .map_err(|_| format!("invalid number `{text}`"))?;
    let d: i128 = match den {
        Some(d) => d.parse().map_err(|_| format!("invalid number `{text}`"))?,
        None => 1,
    };
    if d == 0 {
        return Err(format!("zero denominator in `{text}`"));
    }
    match field {
        FieldTag::Rationals => Ok(Scalar::Rational(BigRational::new(
            BigInt::from(n),
            BigInt::from(d),
        ))),
        FieldTag::PrimeField(p) => {
            let nn = n.rem_euclid(p as i128) as u64;
            let dd = d.rem_euclid(p as i128) as u64;
            let di = inv_mod(dd, p).ok_or_else(|| {
                format!("denominator of `{text}` vanishes modulo {p}")
            })?;
            Ok(Scalar::Residue {
                value: mul_mod(nn, di, p),
                prime: p,
            })
        }
    }
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = (a as u128 + b as u128) % p as u128;
    s as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Inverse modulo a prime via the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return None;
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None; // not invertible (p not prime or gcd > 1)
    }
    Some(t0.rem_euclid(p as i128) as u64)
}

pub(crate) fn reduce_bigint_mod(v: &BigInt, p: u64) -> u64 {
    let m = (v.magnitude() % BigUint::from(p)).to_u64_digits();
    let r = m.first().copied().unwrap_or(0);
    if v.is_negative() && r != 0 {
        p - r
    } else {
        r
    }
}

/// Deterministic Miller–Rabin for `u64` (complete base set for this range).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_normalize() {
        let a = Scalar::from_fraction(2, -4, FieldTag::Rationals).unwrap();
        match &a {
            Scalar::Rational(r) => {
                assert_eq!(r.numer(), &BigInt::from(-1));
                assert_eq!(r.denom(), &BigInt::from(2));
            }
            _ => panic!(),
        }
        assert_eq!(a.to_string(), "-1/2");
    }

    #[test]
    fn residues_stay_reduced() {
        let f = FieldTag::PrimeField(7);
        let a = Scalar::from_i64(-3, f);
        assert_eq!(a.to_string(), "4");
        let b = a.mul(&Scalar::from_i64(5, f));
        assert_eq!(b.to_string(), "6"); // 20 mod 7
        assert_eq!(b.inverse().unwrap().mul(&b), Scalar::one(f));
    }

    #[test]
    fn field_mismatch_panics() {
        let a = Scalar::one(FieldTag::Rationals);
        let b = Scalar::one(FieldTag::PrimeField(5));
        let r = std::panic::catch_unwind(|| a.add(&b));
        assert!(r.is_err());
    }

    #[test]
    fn reduce_mod_skips_bad_primes() {
        let a = Scalar::from_fraction(1, 7, FieldTag::Rationals).unwrap();
        assert_eq!(a.reduce_mod(7), None);
        assert_eq!(a.reduce_mod(11), Some(inv_mod(7, 11).unwrap()));
        let neg = Scalar::from_i64(-10, FieldTag::Rationals);
        assert_eq!(neg.reduce_mod(7), Some(4));
    }

    #[test]
    fn parse_scalar_handles_fractions() {
        assert_eq!(
            parse_scalar("3/2", FieldTag::Rationals).unwrap().to_string(),
            "3/2"
        );
        assert_eq!(
            parse_scalar("-4", FieldTag::PrimeField(7)).unwrap().to_string(),
            "3"
        );
        assert!(parse_scalar("1/7", FieldTag::PrimeField(7)).is_err());
        assert!(parse_scalar("x", FieldTag::Rationals).is_err());
    }

    #[test]
    fn miller_rabin_agrees_with_small_sieve() {
        let primes: Vec<u64> = (2..200).filter(|&n| (2..n).all(|d| n % d != 0)).collect();
        for n in 2..200 {
            assert_eq!(is_prime_u64(n), primes.contains(&n), "n = {n}");
        }
    }
}
