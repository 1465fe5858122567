//! Scalar abstraction shared by every module.
//!
//! Two modes are supported: exact rationals ([`Rational`], backed by
//! arbitrary-precision integers) and `f64`. Everything on the polynomial
//! side is generic over [`Scalar`], so identities such as orthogonality or
//! operator commutation can be checked with exact equality when the weight
//! parameters are rational.

use std::fmt::Debug;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Exact rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + Send
    + Sync
    + 'static
{
    /// True for exact arithmetic.
    const EXACT: bool;

    fn from_i64(n: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact zero test for rationals, `|x| <= tol` for floats.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Canonical text form: `"p/q"` for rationals, shortest round-trip decimal for floats.
    fn to_text(&self) -> String;

    /// JSON value used in reports: a `"p/q"` string or a number.
    fn to_json(&self) -> serde_json::Value;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    /// The exact value, when there is one.
    fn as_rational(&self) -> Option<&Rational>;

    fn from_rational(r: Rational) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }

    fn to_text(&self) -> String {
        format_f64(*self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn as_rational(&self) -> Option<&Rational> {
        None
    }

    fn from_rational(r: Rational) -> Self {
        Scalar::to_f64(&r)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // numerator and denominator individually overflow f64
            let (n, d) = (self.numer(), self.denom());
            let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
            let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn to_text(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_text())
    }

    fn abs_f64(&self) -> f64 {
        Scalar::to_f64(&self.abs())
    }

    fn as_rational(&self) -> Option<&Rational> {
        Some(self)
    }

    fn from_rational(r: Rational) -> Self {
        r
    }
}

/// Shortest round-trip decimal (never more than 17 significant digits),
/// switching to exponent form for very small or very large magnitudes.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Rational from numerator and denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, an integer, or (for `f64`) a decimal.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    let r: BigRational = t.parse().ok()?;
    Some(r)
}

/// Integer power by repeated squaring.
pub fn powi<S: Scalar>(base: &S, exp: usize) -> S {
    let mut result = S::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            let sq = b.clone();
            b *= &sq;
        }
    }
    result
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)`.
pub fn pochhammer<S: Scalar>(a: &S, n: usize) -> S {
    let mut acc = S::one();
    let mut term = a.clone();
    let one = S::one();
    for _ in 0..n {
        acc *= &term;
        term += &one;
    }
    acc
}

/// Binomial coefficient as a scalar.
pub fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    if k > n {
        return S::zero();
    }
    let k = k.min(n - k);
    // exact in u128 for every degree this crate handles
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    match i64::try_from(acc) {
        Ok(v) => S::from_i64(v),
        Err(_) => {
            let hi = (acc >> 62) as i64;
            let lo = (acc & ((1u128 << 62) - 1)) as i64;
            S::from_i64(hi) * powi(&S::from_i64(2), 62) + S::from_i64(lo)
        }
    }
}

pub fn factorial<S: Scalar>(n: usize) -> S {
    pochhammer(&S::one(), n)
}

/// `(-1)^n`
pub fn sign<S: Scalar>(n: usize) -> S {
    if n.is_multiple_of(2) {
        S::one()
    } else {
        -S::one()
    }
}

/// Incrementally extended table of `(base)_s` for `s = 0, 1, ...`.
///
/// The inner loops of the moment and operator code evaluate many
/// Pochhammer symbols with a shared base; caching them keeps exact
/// rational runs tractable.
#[derive(Debug, Clone)]
pub struct RisingTable<S: Scalar> {
    base: S,
    values: Vec<S>,
}

impl<S: Scalar> RisingTable<S> {
    pub fn new(base: S) -> Self {
        Self {
            base,
            values: vec![S::one()],
        }
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    /// `(base)_shift`
    pub fn get(&mut self, shift: usize) -> &S {
        while self.values.len() <= shift {
            let s = self.values.len() - 1;
            let mut next = self.values[s].clone();
            let mut factor = self.base.clone();
            factor += &S::from_i64(s as i64);
            next *= &factor;
            self.values.push(next);
        }
        &self.values[shift]
    }
}

/// `(p/q)_k = num(k) / q^k` with integer numerators, so long products of
/// rising factorials need no gcd reduction until the very end.
#[derive(Debug, Clone)]
pub(crate) struct IntRising {
    p: BigInt,
    q: BigInt,
    nums: Vec<BigInt>,
    qpows: Vec<BigInt>,
}

impl IntRising {
    pub(crate) fn new(base: &Rational) -> Self {
        Self {
            p: base.numer().clone(),
            q: base.denom().clone(),
            nums: vec![BigInt::from(1)],
            qpows: vec![BigInt::from(1)],
        }
    }

    /// The same table for `base + shift`.
    pub(crate) fn shifted(&self, shift: usize) -> Self {
        Self {
            p: &self.p + &self.q * BigInt::from(shift),
            q: self.q.clone(),
            nums: vec![BigInt::from(1)],
            qpows: vec![BigInt::from(1)],
        }
    }

    pub(crate) fn reserve(&mut self, k: usize) {
        while self.nums.len() <= k {
            let s = self.nums.len() - 1;
            let factor = &self.p + &self.q * BigInt::from(s);
            let next = &self.nums[s] * factor;
            self.nums.push(next);
            let qp = &self.qpows[s] * &self.q;
            self.qpows.push(qp);
        }
    }

    /// Numerator of `(p/q)_k`; call [`IntRising::reserve`] first.
    pub(crate) fn num(&self, k: usize) -> &BigInt {
        &self.nums[k]
    }

    /// `q^k`; call [`IntRising::reserve`] first.
    pub(crate) fn qpow(&self, k: usize) -> &BigInt {
        &self.qpows[k]
    }
}

/// Coefficients `c(l, m) = num / den` over one common denominator.
#[derive(Debug, Clone)]
pub(crate) struct IntCoeffs {
    pub den: BigInt,
    pub terms: Vec<(usize, usize, BigInt)>,
}

impl IntCoeffs {
    pub(crate) fn new<'a, S: Scalar>(terms: impl Iterator<Item = (&'a (usize, usize), &'a S)>) -> Option<Self> {
        let exact: Vec<(usize, usize, &Rational)> = terms
            .map(|(&(l, m), c)| Some((l, m, c.as_rational()?)))
            .collect::<Option<_>>()?;
        let den = exact.iter().fold(BigInt::from(1), |d, (_, _, r)| d.lcm(r.denom()));
        let terms = exact
            .into_iter()
            .map(|(l, m, r)| (l, m, r.numer() * (&den / r.denom())))
            .collect();
        Some(Self { den, terms })
    }
}
