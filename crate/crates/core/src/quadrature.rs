//! Gauss–Jacobi oracles on `[0, 1]` and on the triangle.
//!
//! These are reference integrators for validating closed forms; nothing on
//! the production path depends on them.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::rodrigues::ParamSet;
use crate::simplex_poly::MonoPoly;
use crate::specfun::ln_gamma;

/// Gauss rule for `∫_0^1 f(x) x^a (1-x)^b dx`.
#[derive(Debug, Clone)]
pub struct GaussJacobi {
    pub a: f64,
    pub b: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Recurrence coefficients of the orthonormal polynomials for `x^a (1-x)^b`
/// on `[0, 1]`: diagonal `d_0..d_{q-1}` and off-diagonal `e_1..e_q`
/// (`e[k-1]` couples degrees `k-1` and `k`).
fn jacobi_recurrence(a: f64, b: f64, q: usize) -> (Vec<f64>, Vec<f64>) {
    // standard weight (1-t)^al (1+t)^be on [-1, 1] with x = (1+t)/2
    let (al, be) = (b, a);
    let s = al + be;
    let diag = (0..q)
        .map(|k| {
            let t = if k == 0 {
                (be - al) / (s + 2.0)
            } else {
                let k2 = 2.0 * k as f64 + s;
                (be * be - al * al) / (k2 * (k2 + 2.0))
            };
            (1.0 + t) / 2.0
        })
        .collect();
    let off = (1..=q)
        .map(|k| {
            let kf = k as f64;
            let sq = if k == 1 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                let k2 = 2.0 * kf + s;
                4.0 * kf * (kf + al) * (kf + be) * (kf + s) / (k2 * k2 * (k2 + 1.0) * (k2 - 1.0))
            };
            sq.sqrt() / 2.0
        })
        .collect();
    (diag, off)
}

impl GaussJacobi {
    /// `q`-point rule, exact for polynomials of degree `2q - 1`.
    pub fn new(a: f64, b: f64, q: usize) -> Result<Self> {
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::Domain(format!(
                "Jacobi exponents must exceed -1, got ({a}, {b})"
            )));
        }
        if q == 0 {
            return Err(Error::Domain("quadrature needs at least one node".into()));
        }
        let (diag, off) = jacobi_recurrence(a, b, q);
        let mut jm = DMatrix::<f64>::zeros(q, q);
        for k in 0..q {
            jm[(k, k)] = diag[k];
            if k + 1 < q {
                jm[(k, k + 1)] = off[k];
                jm[(k + 1, k)] = off[k];
            }
        }
        let mut nodes: Vec<f64> = jm.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(|x, y| x.total_cmp(y));

        let mu0 = (ln_gamma(a + 1.0)? + ln_gamma(b + 1.0)? - ln_gamma(a + b + 2.0)?).exp();
        let p0 = 1.0 / mu0.sqrt();
        let mut weights = Vec::with_capacity(q);
        for x in &mut nodes {
            for _ in 0..8 {
                let (p, dp, _) = orthonormal_eval(&diag, &off, p0, *x);
                let step = p / dp;
                *x -= step;
                if step.abs() <= 1e-17 {
                    break;
                }
            }
            let (_, _, norm) = orthonormal_eval(&diag, &off, p0, *x);
            weights.push(1.0 / norm);
        }
        Ok(Self {
            a,
            b,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &wt)| wt * f(x))
            .sum()
    }
}

/// `(p_q(x), p_q'(x), Σ_{k<q} p_k(x)^2)` for the orthonormal family.
fn orthonormal_eval(diag: &[f64], off: &[f64], p0: f64, x: f64) -> (f64, f64, f64) {
    let (mut prev, mut cur) = (0.0, p0);
    let (mut dprev, mut dcur) = (0.0, 0.0);
    let mut norm = 0.0;
    for k in 0..diag.len() {
        norm += cur * cur;
        let back = if k == 0 { 0.0 } else { off[k - 1] };
        let next = ((x - diag[k]) * cur - back * prev) / off[k];
        let dnext = (cur + (x - diag[k]) * dcur - back * dprev) / off[k];
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
    }
    (cur, dcur, norm)
}

/// Tensor rule for `∫_T f(x,y) x^α y^β (1-x-y)^γ dx dy` via `y = (1-x) t`.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub q: usize,
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&(x, y), &wt)| wt * f(x, y))
            .sum()
    }
}

pub fn build_rule(alpha: f64, beta: f64, gamma: f64, q: usize) -> Result<TriangleRule> {
    let outer = GaussJacobi::new(alpha, beta + gamma + 1.0, q)?;
    let inner = GaussJacobi::new(beta, gamma, q)?;
    let mut points = Vec::with_capacity(q * q);
    let mut weights = Vec::with_capacity(q * q);
    for (&x, &wx) in outer.nodes.iter().zip(&outer.weights) {
        for (&t, &wt) in inner.nodes.iter().zip(&inner.weights) {
            points.push((x, (1.0 - x) * t));
            weights.push(wx * wt);
        }
    }
    Ok(TriangleRule { q, points, weights })
}

/// Rule for measure `j` of a parameter set.
pub fn measure_rule(params: &ParamSet<f64>, j: usize, q: usize) -> Result<TriangleRule> {
    build_rule(*params.alpha(j), *params.beta(j), *params.gamma(), q)
}

fn check_outside(z: f64, w: f64) -> Result<()> {
    for (name, v) in [("z", z), ("w", w)] {
        if !v.is_finite() || (0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!(
                "{name} = {v} lies on the support [0, 1] of the measure"
            )));
        }
    }
    Ok(())
}

/// `E_j(z, w) = ∫_T dμ_j / ((z-x)(w-y))` on a prebuilt rule.
pub fn e_with_rule(rule: &TriangleRule, z: f64, w: f64) -> Result<f64> {
    check_outside(z, w)?;
    Ok(rule.integrate(|x, y| 1.0 / ((z - x) * (w - y))))
}

pub fn e_direct(params: &ParamSet<f64>, j: usize, z: f64, w: f64, q: usize) -> Result<f64> {
    e_with_rule(&measure_rule(params, j, q)?, z, w)
}

/// `Φ_j(z, w) = ∫_T (A(z,w) - A(x,y)) / ((z-x)(w-y)) dμ_j`.
pub fn phi_direct(
    a: &MonoPoly<f64>,
    params: &ParamSet<f64>,
    j: usize,
    z: f64,
    w: f64,
    q: usize,
) -> Result<f64> {
    check_outside(z, w)?;
    let azw = a.evaluate(&z, &w);
    let rule = measure_rule(params, j, q)?;
    Ok(rule.integrate(|x, y| (azw - a.evaluate(&x, &y)) / ((z - x) * (w - y))))
}

/// `ψ_1 = ∫_T [(A(z,w) - A(x,w)) / (z-x)] / (w-y) dμ_j`.
pub fn psi1_direct(
    a: &MonoPoly<f64>,
    params: &ParamSet<f64>,
    j: usize,
    z: f64,
    w: f64,
    q: usize,
) -> Result<f64> {
    check_outside(z, w)?;
    let azw = a.evaluate(&z, &w);
    let rule = measure_rule(params, j, q)?;
    Ok(rule.integrate(|x, y| (azw - a.evaluate(&x, &w)) / ((z - x) * (w - y))))
}

/// `ψ_2 = ∫_T [(A(x,w) - A(x,y)) / (w-y)] / (z-x) dμ_j`.
pub fn psi2_direct(
    a: &MonoPoly<f64>,
    params: &ParamSet<f64>,
    j: usize,
    z: f64,
    w: f64,
    q: usize,
) -> Result<f64> {
    check_outside(z, w)?;
    let rule = measure_rule(params, j, q)?;
    Ok(rule.integrate(|x, y| (a.evaluate(&x, &w) - a.evaluate(&x, &y)) / ((w - y) * (z - x))))
}

/// Lazily built triangle rules of one weight, keyed by node count.
#[derive(Debug, Clone)]
pub struct RuleCache {
    alpha: f64,
    beta: f64,
    gamma: f64,
    rules: BTreeMap<usize, TriangleRule>,
}

impl RuleCache {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            rules: BTreeMap::new(),
        }
    }

    pub fn for_measure(params: &ParamSet<f64>, j: usize) -> Self {
        Self::new(*params.alpha(j), *params.beta(j), *params.gamma())
    }

    pub fn get(&mut self, q: usize) -> Result<&TriangleRule> {
        if !self.rules.contains_key(&q) {
            let rule = build_rule(self.alpha, self.beta, self.gamma, q)?;
            self.rules.insert(q, rule);
        }
        Ok(&self.rules[&q])
    }

    /// `E(z, w)` from rules with `q, 2q, ...` nodes, accepted once two
    /// successive values agree to `tol` relative.
    pub fn e_converged(&mut self, z: f64, w: f64, q: usize, tol: f64, max_q: usize) -> Result<(f64, usize)> {
        check_outside(z, w)?;
        self_converged(|n| e_with_rule(self.get(n)?, z, w), q, tol, max_q)
    }
}

/// Evaluates `integral(q)`, `integral(2q)`, ... until consecutive values agree
/// to `tol` relative, returning the finer value and its node count.
pub fn self_converged(
    mut integral: impl FnMut(usize) -> Result<f64>,
    q: usize,
    tol: f64,
    max_q: usize,
) -> Result<(f64, usize)> {
    let mut q = q.max(1);
    let mut prev = integral(q)?;
    let mut diff = f64::NAN;
    loop {
        let next_q = 2 * q;
        if next_q > max_q {
            return Err(Error::QuadratureConvergence { q, diff });
        }
        let next = integral(next_q)?;
        diff = (next - prev).abs();
        if diff <= tol * next.abs() {
            return Ok((next, next_q));
        }
        prev = next;
        q = next_q;
    }
}
