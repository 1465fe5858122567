//! Bivariate polynomials in two bases.
//!
//! [`BaryPoly`] stores coefficients of the barycentric terms
//! `x^l y^m (1-x-y)^(N-l-m)` for a fixed total degree `N`; this basis is
//! closed under the Rodrigues operators. [`MonoPoly`] stores ordinary
//! monomials `z^a w^b` and is what the approximation side consumes.
//! Both keep a sparse map with lexicographic key order, so iteration and
//! serialization are deterministic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binomial, powi, sign, Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct BaryPoly<S: Scalar> {
    degree: usize,
    coeffs: BTreeMap<(usize, usize), S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonoPoly<S: Scalar> {
    degree: usize,
    coeffs: BTreeMap<(usize, usize), S>,
}

fn accumulate<S: Scalar>(map: &mut BTreeMap<(usize, usize), S>, key: (usize, usize), c: S) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                map.remove(&key);
            }
        }
        None => {
            map.insert(key, c);
        }
    }
}

impl<S: Scalar> BaryPoly<S> {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// `c · x^l y^m (1-x-y)^(degree-l-m)`
    pub fn term(l: usize, m: usize, degree: usize, c: S) -> Result<Self> {
        let mut p = Self::zero(degree);
        p.add_term(l, m, c)?;
        Ok(p)
    }

    pub fn from_terms<I>(degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), S)>,
    {
        let mut p = Self::zero(degree);
        for ((l, m), c) in terms {
            p.add_term(l, m, c)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, l: usize, m: usize, c: S) -> Result<()> {
        if l + m > self.degree {
            return Err(Error::Precondition(format!(
                "barycentric term ({l}, {m}) exceeds total degree {}",
                self.degree
            )));
        }
        accumulate(&mut self.coeffs, (l, m), c);
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, l: usize, m: usize) -> S {
        self.coeffs.get(&(l, m)).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &S)> {
        self.coeffs.iter()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `self + c · other`; both must share the total degree.
    pub fn scale_add(&self, other: &Self, c: &S) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (&key, v) in &other.coeffs {
            let mut t = v.clone();
            t *= c;
            accumulate(&mut out.coeffs, key, t);
        }
        Ok(out)
    }

    pub fn evaluate(&self, x: &S, y: &S) -> S {
        let mut t = S::one();
        t -= x;
        t -= y;
        let mut acc = S::zero();
        for (&(l, m), c) in &self.coeffs {
            let mut v = c.clone();
            v *= &powi(x, l);
            v *= &powi(y, m);
            v *= &powi(&t, self.degree - l - m);
            acc += &v;
        }
        acc
    }

    /// Expands every `(1-x-y)^s` by the multinomial theorem.
    pub fn to_mono(&self) -> MonoPoly<S> {
        let mut out = MonoPoly::zero(self.degree);
        for (&(l, m), c) in &self.coeffs {
            let s = self.degree - l - m;
            for u in 0..=s {
                let cu: S = binomial(s, u);
                for v in 0..=(s - u) {
                    let mut t = c.clone();
                    t *= &cu;
                    t *= &binomial::<S>(s - u, v);
                    t *= &sign::<S>(u + v);
                    accumulate(&mut out.coeffs, (l + u, m + v), t);
                }
            }
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BaryPoly<T> {
        let mut out = BaryPoly::zero(self.degree);
        for (&k, v) in &self.coeffs {
            accumulate(&mut out.coeffs, k, f(v));
        }
        out
    }

    pub fn to_f64(&self) -> BaryPoly<f64> {
        self.map(|c| c.to_f64())
    }

    /// Human-readable form, e.g. `3/2*x*(1-x-y)^2 - y^3`.
    pub fn to_expression(&self) -> String {
        let parts = self.coeffs.iter().map(|(&(l, m), c)| {
            let mut factors = Vec::new();
            push_power(&mut factors, "x", l);
            push_power(&mut factors, "y", m);
            push_power(&mut factors, "(1-x-y)", self.degree - l - m);
            (c.clone(), factors)
        });
        join_terms(parts)
    }
}

impl<S: Scalar> MonoPoly<S> {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), S)>,
    {
        let mut p = Self::zero(degree);
        for ((a, b), c) in terms {
            p.add_term(a, b, c)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, a: usize, b: usize, c: S) -> Result<()> {
        if a + b > self.degree {
            return Err(Error::Precondition(format!(
                "monomial ({a}, {b}) exceeds total degree {}",
                self.degree
            )));
        }
        accumulate(&mut self.coeffs, (a, b), c);
        Ok(())
    }

    /// Declared bound on the total degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Largest `a + b` over nonzero coefficients (0 for the zero polynomial).
    pub fn effective_degree(&self) -> usize {
        self.coeffs.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn coeff(&self, a: usize, b: usize) -> S {
        self.coeffs.get(&(a, b)).cloned().unwrap_or_else(S::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &S)> {
        self.coeffs.iter()
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale_add(&self, other: &Self, c: &S) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let mut out = self.clone();
        for (&key, v) in &other.coeffs {
            let mut t = v.clone();
            t *= c;
            accumulate(&mut out.coeffs, key, t);
        }
        Ok(out)
    }

    pub fn evaluate(&self, z: &S, w: &S) -> S {
        let mut acc = S::zero();
        for (&(a, b), c) in &self.coeffs {
            let mut v = c.clone();
            v *= &powi(z, a);
            v *= &powi(w, b);
            acc += &v;
        }
        acc
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MonoPoly<T> {
        let mut out = MonoPoly::zero(self.degree);
        for (&k, v) in &self.coeffs {
            accumulate(&mut out.coeffs, k, f(v));
        }
        out
    }

    pub fn to_f64(&self) -> MonoPoly<f64> {
        self.map(|c| c.to_f64())
    }

    /// Human-readable form in the given variable names, highest total degree
    /// first and, within a degree, descending powers of the second variable.
    pub fn to_expression(&self, first: &str, second: &str) -> String {
        let mut keys: Vec<_> = self.coeffs.keys().copied().collect();
        keys.sort_by_key(|&(a, b)| std::cmp::Reverse((a + b, b)));
        let parts = keys.into_iter().map(|(a, b)| {
            let mut factors = Vec::new();
            push_power(&mut factors, second, b);
            push_power(&mut factors, first, a);
            (self.coeffs[&(a, b)].clone(), factors)
        });
        join_terms(parts)
    }
}

fn push_power(factors: &mut Vec<String>, var: &str, e: usize) {
    match e {
        0 => {}
        1 => factors.push(var.to_string()),
        _ => factors.push(format!("{var}^{e}")),
    }
}

fn plain_text<S: Scalar>(c: &S) -> String {
    let t = c.to_text();
    match t.strip_suffix("/1") {
        Some(int) if S::EXACT => int.to_string(),
        _ => t,
    }
}

fn join_terms<S: Scalar>(parts: impl Iterator<Item = (S, Vec<String>)>) -> String {
    let mut out = String::new();
    for (c, factors) in parts {
        let negative = c < S::zero();
        let magnitude = if negative { -c } else { c };
        let mag_text = plain_text(&magnitude);
        let body = if factors.is_empty() {
            mag_text
        } else if magnitude == S::one() {
            factors.join("*")
        } else {
            format!("{mag_text}*{}", factors.join("*"))
        };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// One serialized term. Exact coefficients use `coeff_num`/`coeff_den`
/// (JSON integers, or decimal strings when they exceed 64 bits); float
/// coefficients use `coeff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermWire {
    pub l: usize,
    pub m: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coeff_num: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coeff_den: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coeff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyWire {
    pub basis: String,
    pub degree: usize,
    pub terms: Vec<TermWire>,
}

/// Scalars that can travel through [`PolyWire`].
pub trait WireCoeff: Scalar {
    fn write(&self, l: usize, m: usize) -> TermWire;
    fn read(term: &TermWire) -> Result<Self>;
}

fn bigint_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::String(v.to_string()),
    }
}

fn json_bigint(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Json(format!("non-integer coefficient part {n}"))),
        serde_json::Value::String(s) => s
            .parse()
            .map_err(|_| Error::Json(format!("bad integer string {s:?}"))),
        other => Err(Error::Json(format!("unexpected coefficient part {other}"))),
    }
}

impl WireCoeff for Rational {
    fn write(&self, l: usize, m: usize) -> TermWire {
        TermWire {
            l,
            m,
            coeff_num: Some(bigint_json(self.numer())),
            coeff_den: Some(bigint_json(self.denom())),
            coeff: None,
        }
    }

    fn read(term: &TermWire) -> Result<Self> {
        let (Some(n), Some(d)) = (&term.coeff_num, &term.coeff_den) else {
            return Err(Error::Json("exact term needs coeff_num and coeff_den".into()));
        };
        let d = json_bigint(d)?;
        if d.is_zero() {
            return Err(Error::Json("zero denominator".into()));
        }
        Ok(Rational::new(json_bigint(n)?, d))
    }
}

impl WireCoeff for f64 {
    fn write(&self, l: usize, m: usize) -> TermWire {
        TermWire {
            l,
            m,
            coeff_num: None,
            coeff_den: None,
            coeff: Some(*self),
        }
    }

    fn read(term: &TermWire) -> Result<Self> {
        term.coeff
            .ok_or_else(|| Error::Json("float term needs coeff".into()))
    }
}

fn to_wire<S: WireCoeff>(
    basis: &str,
    degree: usize,
    coeffs: &BTreeMap<(usize, usize), S>,
) -> PolyWire {
    PolyWire {
        basis: basis.to_string(),
        degree,
        terms: coeffs.iter().map(|(&(l, m), c)| c.write(l, m)).collect(),
    }
}

impl<S: WireCoeff> BaryPoly<S> {
    pub fn to_wire(&self) -> PolyWire {
        to_wire("bary", self.degree, &self.coeffs)
    }

    pub fn from_wire(wire: &PolyWire) -> Result<Self> {
        if wire.basis != "bary" {
            return Err(Error::Json(format!("expected basis \"bary\", got {:?}", wire.basis)));
        }
        let mut p = Self::zero(wire.degree);
        for t in &wire.terms {
            p.add_term(t.l, t.m, S::read(t)?)
                .map_err(|e| Error::Json(e.to_string()))?;
        }
        Ok(p)
    }
}

impl<S: WireCoeff> MonoPoly<S> {
    pub fn to_wire(&self) -> PolyWire {
        to_wire("mono", self.degree, &self.coeffs)
    }

    pub fn from_wire(wire: &PolyWire) -> Result<Self> {
        if wire.basis != "mono" {
            return Err(Error::Json(format!("expected basis \"mono\", got {:?}", wire.basis)));
        }
        let mut p = Self::zero(wire.degree);
        for t in &wire.terms {
            p.add_term(t.l, t.m, S::read(t)?)
                .map_err(|e| Error::Json(e.to_string()))?;
        }
        Ok(p)
    }
}
