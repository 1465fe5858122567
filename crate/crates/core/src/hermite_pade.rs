//! Hermite–Padé approximation of the Stieltjes-type transforms
//!
//! E_j(z, w) = ∫_T dμ_j(x, y) / ((z - x)(w - y)) = Σ c_{l,m} z^{-l-1} w^{-m-1},
//!
//! with common denominator `A(z, w)` (the multiple orthogonal polynomial in
//! the variables `z ↔ x`, `w ↔ y`) and numerators
//! `Φ_j = ψ_11 + ψ_12 + ψ_21 + ψ_22`.
//!
//! The inner Beta integrals that produce `P^(1,0)` and `P^(0,1)` depend on
//! the summation index `h`:
//!
//! ∫_0^{1-y} x^{α+h} (1-x-y)^γ dx = B(α+h+1, γ+1) (1-y)^{α+γ+h+1},
//!
//! so each `(1-y)^h` term carries `κ'_h = (α+1)_h / (α+γ+2)_h` relative to
//! the `h = 0` weight, and symmetrically `κ_h = (β+1)_h / (β+γ+2)_h` for
//! `P^(0,1)`. [`NumeratorOptions::unit_beta_ratios`] drops these factors for
//! comparison.

use std::collections::BTreeMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::moments::{build_report, simplex_moment, ConditionReport};
use crate::rodrigues::{jp_poly_operator, IndexPair, ParamSet};
use crate::scalar::{binomial, sign, IntCoeffs, IntRising, Rational, RisingTable, Scalar};
use crate::simplex_poly::MonoPoly;
use crate::specfun::{gauss_2f1, ln_gamma};

/// Default relative pole threshold: `|A(z,w)| < 1e-12 · Σ |a_uv| |z|^u |w|^v`.
pub const DEFAULT_POLE_THRESHOLD: f64 = 1e-12;

/// `c_{l,m} = Γ(γ+1) Γ(α_j+l+1) Γ(β_j+m+1) / Γ(α_j+β_j+γ+l+m+3)`.
pub fn series_coeff(params: &ParamSet<f64>, j: usize, l: usize, m: usize) -> Result<f64> {
    simplex_moment(
        params.alpha(j) + l as f64,
        params.beta(j) + m as f64,
        *params.gamma(),
    )
}

/// Partial sum of the double Laurent series of `E_j` up to `z^{-L-1} w^{-M-1}`.
pub fn e_truncated(
    params: &ParamSet<f64>,
    j: usize,
    z: f64,
    w: f64,
    big_l: usize,
    big_m: usize,
) -> Result<f64> {
    let (a, b, g) = (*params.alpha(j), *params.beta(j), *params.gamma());
    let s = a + b + g + 3.0;
    let (iz, iw) = (1.0 / z, 1.0 / w);
    // c_{l,m} by recurrence in both indices
    let mut row = series_coeff(params, j, 0, 0)?;
    let mut zp = iz;
    let mut total = 0.0;
    for l in 0..=big_l {
        let mut c = row;
        let mut wp = iw;
        let mut acc = 0.0;
        for m in 0..=big_m {
            acc += c * wp;
            c *= (b + m as f64 + 1.0) / (s + (l + m) as f64);
            wp *= iw;
        }
        total += acc * zp;
        row *= (a + l as f64 + 1.0) / (s + l as f64);
        zp *= iz;
    }
    Ok(total)
}

/// Coefficient of `z^{-l-1} w^{-m-1}` in `A · E_j`,
/// `Σ a_{u,v} c_{l+u, m+v}`, divided by
/// `Γ(γ+1) Γ(α_j+1) Γ(β_j+1) / Γ(α_j+β_j+γ+l+m+N+3)` with `N = deg A`:
///
/// Σ a_{u,v} (α_j+1)_{l+u} (β_j+1)_{m+v} (α_j+β_j+γ+l+m+u+v+3)_{N-u-v}.
pub fn fractional_coeff<S: Scalar>(
    a: &MonoPoly<S>,
    params: &ParamSet<S>,
    j: usize,
    l: usize,
    m: usize,
) -> S {
    FractionalTables::new(params, j).coeff(a, l, m)
}

/// The factor removed by [`fractional_coeff`].
pub fn fractional_scale(params: &ParamSet<f64>, j: usize, degree: usize, l: usize, m: usize) -> Result<f64> {
    crate::moments::inner_product_scale(params, j, degree, l, m)
}

struct FractionalTables<S: Scalar> {
    alpha: RisingTable<S>,
    beta: RisingTable<S>,
    /// `shifted[t]` holds `(s + t)_len` for `len = 0, 1, ...`.
    shifted: Vec<RisingTable<S>>,
    s: S,
}

impl<S: Scalar> FractionalTables<S> {
    fn new(params: &ParamSet<S>, j: usize) -> Self {
        let one = S::one();
        let mut a1 = params.alpha(j).clone();
        a1 += &one;
        let mut b1 = params.beta(j).clone();
        b1 += &one;
        let mut s = a1.clone();
        s += &b1;
        s += params.gamma();
        s += &one;
        Self {
            alpha: RisingTable::new(a1),
            beta: RisingTable::new(b1),
            shifted: Vec::new(),
            s,
        }
    }

    fn coeff(&mut self, a: &MonoPoly<S>, l: usize, m: usize) -> S {
        self.coeff_with_mass(a, l, m).0
    }

    fn shifted_rising(&mut self, t: usize, len: usize) -> &S {
        while self.shifted.len() <= t {
            let mut base = self.s.clone();
            base += &S::from_i64(self.shifted.len() as i64);
            self.shifted.push(RisingTable::new(base));
        }
        self.shifted[t].get(len)
    }

    fn coeff_with_mass(&mut self, a: &MonoPoly<S>, l: usize, m: usize) -> (S, f64) {
        let n = a.degree();
        let mut acc = S::zero();
        let mut mass = 0.0;
        for (&(u, v), c) in a.terms() {
            let mut t = c.clone();
            t *= self.alpha.get(l + u);
            t *= self.beta.get(m + v);
            t *= self.shifted_rising(l + m + u + v, n - u - v);
            if !S::EXACT {
                mass += t.abs_f64();
            }
            acc += &t;
        }
        (acc, mass)
    }
}

/// [`FractionalTables`] for rational data, summed over a common denominator.
struct ExactFractional {
    alpha: IntRising,
    beta: IntRising,
    s: IntRising,
    /// `shifted[t]` is the table for `s + t`.
    shifted: Vec<IntRising>,
}

impl ExactFractional {
    fn new<S: Scalar>(params: &ParamSet<S>, j: usize) -> Option<Self> {
        let one = Rational::from_integer(1.into());
        let a1 = params.alpha(j).as_rational()? + &one;
        let b1 = params.beta(j).as_rational()? + &one;
        let s = &a1 + &b1 + params.gamma().as_rational()? + &one;
        Some(Self {
            alpha: IntRising::new(&a1),
            beta: IntRising::new(&b1),
            s: IntRising::new(&s),
            shifted: Vec::new(),
        })
    }

    /// Σ a_{u,v} (α+1)_{l+u} (β+1)_{m+v} (s+l+m+u+v)_{N-u-v}, with each term
    /// scaled by `qa^{l+N} qb^{m+N} qs^N` so that it is an integer.
    fn coeff(&mut self, a: &IntCoeffs, degree: usize, l: usize, m: usize) -> Rational {
        let n = degree;
        self.alpha.reserve(n + l);
        self.beta.reserve(n + m);
        self.s.reserve(n);
        while self.shifted.len() <= l + m + n {
            let t = self.s.shifted(self.shifted.len());
            self.shifted.push(t);
        }
        let mut acc = num_bigint::BigInt::from(0);
        for (u, v, c) in &a.terms {
            let (u, v) = (*u, *v);
            let z = &mut self.shifted[l + m + u + v];
            z.reserve(n - u - v);
            acc += c
                * self.alpha.num(l + u)
                * self.alpha.qpow(n - u)
                * self.beta.num(m + v)
                * self.beta.qpow(n - v)
                * z.num(n - u - v)
                * self.s.qpow(u + v);
        }
        let den = &a.den * self.alpha.qpow(l + n) * self.beta.qpow(m + n) * self.s.qpow(n);
        Rational::new(acc, den)
    }
}

/// Fractional coefficients of `A · E_j` on `l + m ≤ max_degree`, with the
/// index set `𝕃_j = {l < n_j - k_j or m < k_j}` asserted to vanish.
pub fn check_hp_conditions<S: Scalar>(
    a: &MonoPoly<S>,
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
    let exact: Option<(IntCoeffs, Vec<ExactFractional>)> = IntCoeffs::new(a.terms())
        .and_then(|c| Some((c, (0..params.r()).map(|j| ExactFractional::new(params, j)).collect::<Option<_>>()?)));
    if let Some((coeffs, mut tables)) = exact {
        return Ok(build_report(pairs, max_degree, tol, |j, l, m| {
            (S::from_rational(tables[j].coeff(&coeffs, a.degree(), l, m)), 0.0)
        }));
    }
    let mut tables: Vec<_> = (0..params.r()).map(|j| FractionalTables::new(params, j)).collect();
    Ok(build_report(pairs, max_degree, tol, |j, l, m| {
        tables[j].coeff_with_mass(a, l, m)
    }))
}

/// Leading behaviour of `A · E_j - Φ_j` for one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderEntry {
    pub measure: usize,
    /// `(n_j - k_j, k_j)`: the remainder must start at or beyond this index.
    pub expected: (usize, usize),
    /// First nonzero fractional coefficient by increasing `l + m`, then `l`.
    pub first_nonzero: Option<(usize, usize)>,
    pub pass: bool,
}

impl OrderEntry {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "measure": self.measure,
            "expected": [self.expected.0, self.expected.1],
            "first_nonzero": self.first_nonzero.map(|(l, m)| vec![l, m]),
            "pass": self.pass,
        })
    }
}

/// Checks that the remainder `A · E_j - Φ_j` only contains
/// `z^{-l-1} w^{-m-1}` with `l ≥ n_j - k_j` and `m ≥ k_j`.
pub fn residual_order_check<S: Scalar>(
    a: &MonoPoly<S>,
    params: &ParamSet<S>,
    pairs: &[IndexPair],
    max_degree: usize,
    tol: f64,
) -> Result<Vec<OrderEntry>> {
    let report = check_hp_conditions(a, params, pairs, max_degree, tol)?;
    // floating-point residuals outside 𝕃 are compared against the largest one
    let scale = report
        .measures
        .iter()
        .flat_map(|m| m.entries.iter())
        .map(|e| e.residual.abs_f64())
        .fold(0.0, f64::max);
    Ok(report
        .measures
        .iter()
        .map(|mr| {
            let expected = (mr.pair.x_order(), mr.pair.k);
            let first = mr.first_nonzero(tol * scale);
            let ordered = mr
                .entries
                .iter()
                .filter(|e| !e.residual.is_negligible(tol * scale))
                .all(|e| e.l >= expected.0 && e.m >= expected.1);
            OrderEntry {
                measure: mr.measure,
                expected,
                first_nonzero: first,
                pass: mr.pass && ordered,
            }
        })
        .collect())
}

/// Raw table of `P^(1,0)(z, w, y)`: keys `(z-power, w-power, (1-y)-power)`,
/// `Σ_{u ≥ 1} a_{u,v} w^v Σ_{h<u} z^{u-1-h} (1-y)^h`.
pub fn build_p10<S: Scalar>(a: &MonoPoly<S>) -> BTreeMap<(usize, usize, usize), S> {
    build_p10_weighted(a, |_| S::one())
}

fn build_p10_weighted<S: Scalar>(
    a: &MonoPoly<S>,
    kappa: impl Fn(usize) -> S,
) -> BTreeMap<(usize, usize, usize), S> {
    let mut table: BTreeMap<_, S> = BTreeMap::new();
    for (&(u, v), c) in a.terms() {
        for h in 0..u {
            let mut t = c.clone();
            t *= &kappa(h);
            *table.entry((u - 1 - h, v, h)).or_insert_with(S::zero) += &t;
        }
    }
    table.retain(|_, c| !c.is_zero());
    table
}

/// Monomial table `b_{u,v}` of
/// `P^(0,1)(x, w) = Σ_{v ≥ 1} a_{u,v} x^u Σ_{h<v} κ_h w^{v-1-h} (1-x)^h`,
/// with `(1-x)^h` expanded binomially.
pub fn build_p01<S: Scalar>(a: &MonoPoly<S>, kappa: impl Fn(usize) -> S) -> MonoPoly<S> {
    let degree = a.degree().saturating_sub(1);
    let mut b = MonoPoly::zero(degree);
    for (&(u, v), c) in a.terms() {
        for h in 0..v {
            let mut ch = c.clone();
            ch *= &kappa(h);
            for s in 0..=h {
                let mut t = ch.clone();
                t *= &binomial::<S>(h, s);
                t *= &sign::<S>(s);
                b.add_term(u + s, v - 1 - h, t)
                    .expect("P^(0,1) terms stay within degree deg A - 1");
            }
        }
    }
    b
}

/// `(base)_h / (top)_h` for `h = 0..n`.
fn pochhammer_ratios(base: f64, top: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut r = 1.0;
    for h in 0..=n {
        out.push(r);
        r *= (base + h as f64) / (top + h as f64);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumeratorOptions {
    /// Replace `κ_h`, `κ'_h` by 1 in `P^(1,0)` and `P^(0,1)`.
    pub unit_beta_ratios: bool,
    /// Normalize ψ_22 by `Γ(α_1+β_1+γ+3)` instead of `Γ(α_j+β_j+γ+3)`.
    pub psi22_first_measure: bool,
    /// Tolerance for the ₂F₁ series.
    pub tol: f64,
}

impl Default for NumeratorOptions {
    fn default() -> Self {
        Self {
            unit_beta_ratios: false,
            psi22_first_measure: false,
            tol: 1e-14,
        }
    }
}

/// Precomputed data for evaluating `Φ_j` and `R_j = Φ_j / A`.
#[derive(Debug, Clone)]
pub struct NumeratorState {
    a: MonoPoly<f64>,
    alpha: f64,
    beta: f64,
    gamma: f64,
    j: usize,
    options: NumeratorOptions,
    p10: BTreeMap<(usize, usize, usize), f64>,
    b: MonoPoly<f64>,
    prefactor: f64,
    psi22_scale: f64,
    // (α+γ+2)_{t-1} / (α+β+γ+3)_{t-1}, indexed by t-1
    rho: Vec<f64>,
    // (α+1)_h / (α+β+γ+3)_h
    sigma: Vec<f64>,
}

impl NumeratorState {
    pub fn new(
        a: MonoPoly<f64>,
        params: &ParamSet<f64>,
        j: usize,
        options: NumeratorOptions,
    ) -> Result<Self> {
        if j >= params.r() {
            return Err(Error::InvalidParams(format!(
                "measure index {} out of range for {} measures",
                j + 1,
                params.r()
            )));
        }
        let (al, be, ga) = (*params.alpha(j), *params.beta(j), *params.gamma());
        let n = a.degree();
        let s = al + be + ga + 3.0;
        let (kx, ky) = if options.unit_beta_ratios {
            (vec![1.0; n + 1], vec![1.0; n + 1])
        } else {
            (
                pochhammer_ratios(al + 1.0, al + ga + 2.0, n),
                pochhammer_ratios(be + 1.0, be + ga + 2.0, n),
            )
        };
        let p10 = build_p10_weighted(&a, |h| kx[h]);
        let b = build_p01(&a, |h| ky[h]);
        let prefactor = series_coeff(params, j, 0, 0)?;
        let psi22_scale = if options.psi22_first_measure {
            let s1 = params.alpha(0) + params.beta(0) + ga + 3.0;
            (ln_gamma(s)? - ln_gamma(s1)?).exp()
        } else {
            1.0
        };
        Ok(Self {
            rho: pochhammer_ratios(al + ga + 2.0, s, n),
            sigma: pochhammer_ratios(al + 1.0, s, n),
            a,
            alpha: al,
            beta: be,
            gamma: ga,
            j,
            options,
            p10,
            b,
            prefactor,
            psi22_scale,
        })
    }

    /// State for `A = P_{(n_1,k_1),...}` built by operator composition.
    pub fn from_params<S: Scalar>(
        params: &ParamSet<S>,
        pairs: &[IndexPair],
        j: usize,
        options: NumeratorOptions,
    ) -> Result<Self> {
        let p = jp_poly_operator(params, pairs)?;
        Self::new(p.to_mono().to_f64(), &params.to_f64(), j, options)
    }

    pub fn denominator(&self) -> &MonoPoly<f64> {
        &self.a
    }

    pub fn p10_table(&self) -> &BTreeMap<(usize, usize, usize), f64> {
        &self.p10
    }

    pub fn p01_poly(&self) -> &MonoPoly<f64> {
        &self.b
    }

    /// 0-based measure index.
    pub fn measure(&self) -> usize {
        self.j
    }

    pub fn options(&self) -> NumeratorOptions {
        self.options
    }

    /// `Γ(α_j+1) Γ(β_j+1) Γ(γ+1) / Γ(α_j+β_j+γ+3)`.
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn p10_eval(&self, z: f64, w: f64, y: f64) -> f64 {
        let one_y = 1.0 - y;
        self.p10
            .iter()
            .map(|(&(zp, wp, h), c)| c * z.powi(zp as i32) * w.powi(wp as i32) * one_y.powi(h as i32))
            .sum()
    }

    pub fn p01_eval(&self, x: f64, w: f64) -> f64 {
        self.b.evaluate(&x, &w)
    }

    pub fn psi11(&self, z: f64, w: f64) -> f64 {
        let one_w = 1.0 - w;
        let mut acc = 0.0;
        for (&(zp, wp, h), c) in &self.p10 {
            if h == 0 {
                continue;
            }
            let mut inner = 0.0;
            let mut pw = 1.0;
            for k in 0..h {
                inner += pw * self.rho[h - k - 1];
                pw *= one_w;
            }
            acc += c * z.powi(zp as i32) * w.powi(wp as i32) * inner;
        }
        self.prefactor * acc
    }

    pub fn psi12(&self, z: f64, w: f64) -> Result<f64> {
        if self.p10.is_empty() {
            return Ok(0.0);
        }
        let f = gauss_2f1(self.beta + 1.0, 1.0, self.s(), 1.0 / w, self.options.tol)?;
        Ok(self.prefactor * self.p10_eval(z, w, w) * f / w)
    }

    pub fn psi21(&self, z: f64, w: f64) -> f64 {
        let mut acc = 0.0;
        for (&(u, v), c) in self.b.terms() {
            let mut inner = 0.0;
            for h in 0..u {
                inner += self.sigma[h] * z.powi((u - 1 - h) as i32);
            }
            acc += c * w.powi(v as i32) * inner;
        }
        -self.prefactor * acc
    }

    pub fn psi22(&self, z: f64, w: f64) -> Result<f64> {
        if self.b.is_zero() {
            return Ok(0.0);
        }
        let f = gauss_2f1(self.alpha + 1.0, 1.0, self.s(), 1.0 / z, self.options.tol)?;
        Ok(self.prefactor * self.psi22_scale * self.p01_eval(z, w) * f / z)
    }

    /// `Φ_j(z, w)`, defined for `|z|, |w| > 1`.
    pub fn phi(&self, z: f64, w: f64) -> Result<f64> {
        Ok(self.psi11(z, w) + self.psi12(z, w)? + self.psi21(z, w) + self.psi22(z, w)?)
    }

    /// `R_j = Φ_j / A`, refusing points where `|A|` falls below
    /// `pole_threshold · Σ |a_uv| |z|^u |w|^v`.
    pub fn approximant(&self, z: f64, w: f64, pole_threshold: f64) -> Result<f64> {
        let value = self.a.evaluate(&z, &w);
        let scale: f64 = self
            .a
            .terms()
            .map(|(&(u, v), c)| c.abs() * z.abs().powi(u as i32) * w.abs().powi(v as i32))
            .sum();
        let threshold = pole_threshold * scale;
        if value.abs() < threshold {
            return Err(Error::Pole { value, threshold });
        }
        if self.a.is_zero() {
            return Ok(0.0);
        }
        Ok(self.phi(z, w)? / value)
    }

    fn s(&self) -> f64 {
        self.alpha + self.beta + self.gamma + 3.0
    }
}

/// `R_j(z, w)` for the polynomial of the given parameters and index pairs.
pub fn approximant_eval<S: Scalar>(
    params: &ParamSet<S>,
    pairs: &[IndexPair],
    j: usize,
    z: f64,
    w: f64,
    tol: f64,
) -> Result<f64> {
    let options = NumeratorOptions {
        tol,
        ..NumeratorOptions::default()
    };
    NumeratorState::from_params(params, pairs, j, options)?.approximant(z, w, DEFAULT_POLE_THRESHOLD)
}
