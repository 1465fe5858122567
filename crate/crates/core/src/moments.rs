//! Moments of the Jacobi weights on the triangle and exact checks of the
//! multiple-orthogonality conditions.
//!
//! ∫_T x^a y^b (1-x-y)^c dx dy = Γ(a+1) Γ(b+1) Γ(c+1) / Γ(a+b+c+3).
//!
//! Inner products of a degree-`N` barycentric polynomial against
//! `x^l y^m W_j` all share the denominator Γ(α_j+β_j+γ+N+l+m+3). Dividing it
//! out together with Γ(α_j+1) Γ(β_j+1) Γ(γ+1) leaves a sum of Pochhammer
//! products, which is rational for rational parameters, so "= 0" becomes an
//! exact test.

use serde_json::json;

use crate::error::{Error, Result};
use crate::rodrigues::{jp_poly_operator, total_degree, IndexPair, ParamSet};
use crate::scalar::{IntCoeffs, IntRising, Rational, RisingTable, Scalar};
use crate::simplex_poly::BaryPoly;
use crate::specfun::ln_gamma;

/// ∫_T x^a y^b (1-x-y)^c dx dy for a, b, c > -1.
pub fn simplex_moment(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a > -1.0 && b > -1.0 && c > -1.0) {
        return Err(Error::Domain(format!(
            "moment exponents must exceed -1, got ({a}, {b}, {c})"
        )));
    }
    let log = ln_gamma(a + 1.0)? + ln_gamma(b + 1.0)? + ln_gamma(c + 1.0)?
        - ln_gamma(a + b + c + 3.0)?;
    Ok(log.exp())
}

/// Pochhammer caches for one measure: `(α+1)_s`, `(β+1)_s`, `(γ+1)_s`.
#[derive(Debug, Clone)]
pub struct MomentTables<S: Scalar> {
    alpha: RisingTable<S>,
    beta: RisingTable<S>,
    gamma: RisingTable<S>,
}

impl<S: Scalar> MomentTables<S> {
    pub fn new(params: &ParamSet<S>, j: usize) -> Self {
        let shift = |v: &S| {
            let mut s = v.clone();
            s += &S::one();
            RisingTable::new(s)
        };
        Self {
            alpha: shift(params.alpha(j)),
            beta: shift(params.beta(j)),
            gamma: shift(params.gamma()),
        }
    }

    /// Normalized ∫ p x^l y^m W_j; see [`normalized_inner_product`].
    pub fn inner_product(&mut self, p: &BaryPoly<S>, l: usize, m: usize) -> S {
        self.inner_product_with_mass(p, l, m).0
    }

    /// The inner product together with the sum of absolute values of its
    /// terms, the natural scale for a floating-point zero test.
    pub fn inner_product_with_mass(&mut self, p: &BaryPoly<S>, l: usize, m: usize) -> (S, f64) {
        let n = p.degree();
        let mut acc = S::zero();
        let mut mass = 0.0;
        for (&(lp, mp), c) in p.terms() {
            let mut t = c.clone();
            t *= self.alpha.get(lp + l);
            t *= self.beta.get(mp + m);
            t *= self.gamma.get(n - lp - mp);
            if !S::EXACT {
                mass += t.abs_f64();
            }
            acc += &t;
        }
        (acc, mass)
    }
}

/// [`MomentTables`] for rational data, summed over a common denominator.
struct ExactMoments {
    alpha: IntRising,
    beta: IntRising,
    gamma: IntRising,
}

impl ExactMoments {
    fn new<S: Scalar>(params: &ParamSet<S>, j: usize) -> Option<Self> {
        let shift = |v: &S| v.as_rational().map(|r| IntRising::new(&(r + Rational::from_integer(1.into()))));
        Some(Self {
            alpha: shift(params.alpha(j))?,
            beta: shift(params.beta(j))?,
            gamma: shift(params.gamma())?,
        })
    }

    /// Σ c (α+1)_{l'+l} (β+1)_{m'+m} (γ+1)_{N-l'-m'}, with each term scaled
    /// by `qa^{N+l} qb^{N+m} qg^N` so that it is an integer.
    fn inner_product(&mut self, p: &IntCoeffs, degree: usize, l: usize, m: usize) -> Rational {
        let n = degree;
        self.alpha.reserve(n + l);
        self.beta.reserve(n + m);
        self.gamma.reserve(n);
        let mut acc = num_bigint::BigInt::from(0);
        for (lp, mp, c) in &p.terms {
            let (lp, mp) = (*lp, *mp);
            acc += c
                * self.alpha.num(lp + l)
                * self.alpha.qpow(n - lp)
                * self.beta.num(mp + m)
                * self.beta.qpow(n - mp)
                * self.gamma.num(n - lp - mp)
                * self.gamma.qpow(lp + mp);
        }
        let den = &p.den * self.alpha.qpow(n + l) * self.beta.qpow(n + m) * self.gamma.qpow(n);
        Rational::new(acc, den)
    }
}

/// ∫_T p(x,y) x^l y^m W_j dx dy divided by
/// Γ(α_j+1) Γ(β_j+1) Γ(γ+1) / Γ(α_j+β_j+γ+N+l+m+3), i.e.
/// Σ c(l',m') (α_j+1)_{l'+l} (β_j+1)_{m'+m} (γ+1)_{N-l'-m'}.
pub fn normalized_inner_product<S: Scalar>(
    p: &BaryPoly<S>,
    l: usize,
    m: usize,
    params: &ParamSet<S>,
    j: usize,
) -> S {
    MomentTables::new(params, j).inner_product(p, l, m)
}

/// The factor removed by [`normalized_inner_product`], in floating point.
pub fn inner_product_scale(params: &ParamSet<f64>, j: usize, degree: usize, l: usize, m: usize) -> Result<f64> {
    let (a, b, g) = (*params.alpha(j), *params.beta(j), *params.gamma());
    let log = ln_gamma(a + 1.0)? + ln_gamma(b + 1.0)? + ln_gamma(g + 1.0)?
        - ln_gamma(a + b + g + (degree + l + m) as f64 + 3.0)?;
    Ok(log.exp())
}

/// Whether `(l, m)` belongs to the vanishing set of measure `j`:
/// `l < n_j - k_j` or `m < k_j`.
pub fn in_condition_set(pair: IndexPair, l: usize, m: usize) -> bool {
    l < pair.x_order() || m < pair.k
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionEntry<S: Scalar> {
    pub l: usize,
    pub m: usize,
    pub in_set: bool,
    pub residual: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport<S: Scalar> {
    /// 1-based measure number.
    pub measure: usize,
    pub pair: IndexPair,
    pub entries: Vec<ConditionEntry<S>>,
    pub pass: bool,
    /// Largest |residual| over in-set entries.
    pub max_in_set_residual: f64,
}

impl<S: Scalar> MeasureReport<S> {
    /// Out-of-set entries on the edge of the condition set
    /// (`l = n_j - k_j` or `m = k_j`).
    pub fn boundary(&self) -> impl Iterator<Item = &ConditionEntry<S>> {
        let (nx, ky) = (self.pair.x_order(), self.pair.k);
        self.entries
            .iter()
            .filter(move |e| !e.in_set && (e.l == nx || e.m == ky))
    }

    /// First nonzero residual in order of increasing `l + m`, then `l`.
    pub fn first_nonzero(&self, tol: f64) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .filter(|e| !e.residual.is_negligible(tol))
            .map(|e| (e.l, e.m))
            .min_by_key(|&(l, m)| (l + m, l))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pairs: Vec<_> = self
            .entries
            .iter()
            .map(|e| json!({"l": e.l, "m": e.m, "in_set": e.in_set, "residual": e.residual.to_json()}))
            .collect();
        json!({"measure": self.measure, "pairs": pairs, "pass": self.pass})
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport<S: Scalar> {
    pub measures: Vec<MeasureReport<S>>,
    pub pass: bool,
}

impl<S: Scalar> ConditionReport<S> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.measures.iter().map(MeasureReport::to_json).collect())
    }

    pub fn max_in_set_residual(&self) -> f64 {
        self.measures
            .iter()
            .map(|m| m.max_in_set_residual)
            .fold(0.0, f64::max)
    }
}

/// Evaluates `residual(j, l, m)` on every `(l, m)` with `l + m ≤ max_degree`
/// and marks membership in the vanishing set of each measure. The closure
/// also returns the magnitude that `tol` is relative to.
pub(crate) fn build_report<S: Scalar>(
    pairs: &[IndexPair],
    max_degree: usize,
    tol: f64,
    mut residual: impl FnMut(usize, usize, usize) -> (S, f64),
) -> ConditionReport<S> {
    let mut measures = Vec::with_capacity(pairs.len());
    for (j, &pair) in pairs.iter().enumerate() {
        let mut entries = Vec::new();
        let mut pass = true;
        let mut worst = 0.0f64;
        for l in 0..=max_degree {
            for m in 0..=(max_degree - l) {
                let (r, mass) = residual(j, l, m);
                let in_set = in_condition_set(pair, l, m);
                if in_set {
                    worst = worst.max(r.abs_f64());
                    if !r.is_negligible(tol * mass) {
                        pass = false;
                    }
                }
                entries.push(ConditionEntry {
                    l,
                    m,
                    in_set,
                    residual: r,
                });
            }
        }
        measures.push(MeasureReport {
            measure: j + 1,
            pair,
            entries,
            pass,
            max_in_set_residual: worst,
        });
    }
    let pass = measures.iter().all(|m| m.pass);
    ConditionReport { measures, pass }
}

/// Default truncation of the monomial grid: `Σ n_j + 2`.
pub fn default_max_degree(pairs: &[IndexPair]) -> usize {
    total_degree(pairs) + 2
}

/// Builds the polynomial by operator composition and checks it.
pub fn verify_orthogonality<S: Scalar>(
    params: &ParamSet<S>,
    pairs: &[IndexPair],
    max_degree: usize,
    tol: f64,
) -> Result<ConditionReport<S>> {
    let p = jp_poly_operator(params, pairs)?;
    verify_orthogonality_of(&p, params, pairs, max_degree, tol)
}

/// Normalized inner products of `p` against `x^l y^m W_j` for all
/// `l + m ≤ max_degree`. Passes iff every in-set residual vanishes
/// (exactly for rationals; for floats within `tol` relative to the sum of
/// the absolute values of its terms).
pub fn verify_orthogonality_of<S: Scalar>(
    p: &BaryPoly<S>,
    params: &ParamSet<S>,
    pairs: &[IndexPair],
    max_degree: usize,
    tol: f64,
) -> Result<ConditionReport<S>> {
    if pairs.len() != params.r() {
        return Err(Error::InvalidParams(format!(
            "{} index pairs for {} measures",
            pairs.len(),
            params.r()
        )));
    }
    let exact: Option<(IntCoeffs, Vec<ExactMoments>)> = IntCoeffs::new(p.terms())
        .and_then(|c| Some((c, (0..params.r()).map(|j| ExactMoments::new(params, j)).collect::<Option<_>>()?)));
    if let Some((coeffs, mut tables)) = exact {
        return Ok(build_report(pairs, max_degree, tol, |j, l, m| {
            (S::from_rational(tables[j].inner_product(&coeffs, p.degree(), l, m)), 0.0)
        }));
    }
    let mut tables: Vec<_> = (0..params.r()).map(|j| MomentTables::new(params, j)).collect();
    Ok(build_report(pairs, max_degree, tol, |j, l, m| {
        tables[j].inner_product_with_mass(p, l, m)
    }))
}
