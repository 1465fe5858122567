//! Rodrigues operators on the triangle and the bivariate Jacobi–Piñeiro
//! polynomials they generate.
//!
//! For a weight `W_j = x^α_j y^β_j (1-x-y)^γ` and a pair `0 ≤ k ≤ n` the
//! operator is
//!
//! ```text
//! D_j[f] = W_j^{-1} ∂^n/∂x^{n-k}∂y^k ( W_j x^{n-k} y^k f )
//! ```
//!
//! Applied to a barycentric term `x^l y^m (1-x-y)^{N-l-m}` it returns a short
//! combination of barycentric terms of the same total degree whose
//! coefficients are products of Pochhammer symbols, so the whole
//! construction runs at coefficient level and stays exact over the
//! rationals.

use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, pochhammer, sign, Scalar};
use crate::simplex_poly::BaryPoly;

/// Weight parameters `(α⃗, β⃗, γ)` for `r` Jacobi measures on the triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet<S: Scalar> {
    alphas: Vec<S>,
    betas: Vec<S>,
    gamma: S,
}

impl<S: Scalar> ParamSet<S> {
    pub fn new(alphas: Vec<S>, betas: Vec<S>, gamma: S) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParams("at least one measure is required".into()));
        }
        if alphas.len() != betas.len() {
            return Err(Error::InvalidParams(format!(
                "{} alphas but {} betas",
                alphas.len(),
                betas.len()
            )));
        }
        let minus_one = -S::one();
        for (name, v) in alphas
            .iter()
            .map(|a| ("alpha", a))
            .chain(betas.iter().map(|b| ("beta", b)))
            .chain(std::iter::once(("gamma", &gamma)))
        {
            if !(*v > minus_one) {
                return Err(Error::InvalidParams(format!(
                    "{name} = {} must be > -1",
                    v.to_text()
                )));
            }
        }
        for i in 0..alphas.len() {
            for j in (i + 1)..alphas.len() {
                if alphas[i] == alphas[j] && betas[i] == betas[j] {
                    return Err(Error::InvalidParams(format!(
                        "measures {} and {} share (alpha, beta)",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self {
            alphas,
            betas,
            gamma,
        })
    }

    /// Number of measures.
    pub fn r(&self) -> usize {
        self.alphas.len()
    }

    pub fn alpha(&self, j: usize) -> &S {
        &self.alphas[j]
    }

    pub fn beta(&self, j: usize) -> &S {
        &self.betas[j]
    }

    pub fn gamma(&self) -> &S {
        &self.gamma
    }

    pub fn alphas(&self) -> &[S] {
        &self.alphas
    }

    pub fn betas(&self) -> &[S] {
        &self.betas
    }

    /// Reorders the measures: entry `i` of the result is measure `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            alphas: order.iter().map(|&j| self.alphas[j].clone()).collect(),
            betas: order.iter().map(|&j| self.betas[j].clone()).collect(),
            gamma: self.gamma.clone(),
        }
    }

    pub fn to_f64(&self) -> ParamSet<f64> {
        ParamSet {
            alphas: self.alphas.iter().map(Scalar::to_f64).collect(),
            betas: self.betas.iter().map(Scalar::to_f64).collect(),
            gamma: self.gamma.to_f64(),
        }
    }
}

/// `(n, k)` with `0 ≤ k ≤ n`: `n - k` derivatives in `x`, `k` in `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexPair {
    pub n: usize,
    pub k: usize,
}

impl IndexPair {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidParams(format!("index pair needs k <= n, got ({n}, {k})")));
        }
        Ok(Self { n, k })
    }

    pub fn x_order(&self) -> usize {
        self.n - self.k
    }
}

/// Sum of the `n_j`.
pub fn total_degree(pairs: &[IndexPair]) -> usize {
    pairs.iter().map(|p| p.n).sum()
}

/// `D_j` applied to `x^l y^m (1-x-y)^(n-l-m)`.
///
/// The result is a polynomial only when the power of `(1-x-y)` is at least
/// `pair.n`; otherwise the derivatives leave negative powers of `(1-x-y)`
/// behind and a precondition error is returned.
pub fn apply_d<S: Scalar>(
    params: &ParamSet<S>,
    j: usize,
    pair: IndexPair,
    l: usize,
    m: usize,
    n: usize,
) -> Result<BaryPoly<S>> {
    check_measure(params, j)?;
    let mut out = BaryPoly::zero(n);
    apply_term_into(params, j, pair, l, m, n, &S::one(), &mut out)?;
    Ok(out)
}

/// Linear extension of [`apply_d`]; the total degree is preserved.
pub fn apply_d_poly<S: Scalar>(
    params: &ParamSet<S>,
    j: usize,
    pair: IndexPair,
    p: &BaryPoly<S>,
) -> Result<BaryPoly<S>> {
    check_measure(params, j)?;
    let n = p.degree();
    let mut out = BaryPoly::zero(n);
    for (&(l, m), c) in p.terms() {
        apply_term_into(params, j, pair, l, m, n, c, &mut out)?;
    }
    Ok(out)
}

fn check_measure<S: Scalar>(params: &ParamSet<S>, j: usize) -> Result<()> {
    if j >= params.r() {
        return Err(Error::Precondition(format!(
            "measure index {j} out of range for {} measures",
            params.r()
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn apply_term_into<S: Scalar>(
    params: &ParamSet<S>,
    j: usize,
    pair: IndexPair,
    l: usize,
    m: usize,
    n: usize,
    scale: &S,
    out: &mut BaryPoly<S>,
) -> Result<()> {
    if pair.k > pair.n {
        return Err(Error::Precondition(format!("invalid pair ({}, {})", pair.n, pair.k)));
    }
    if l + m > n {
        return Err(Error::Precondition(format!("term ({l}, {m}) exceeds degree {n}")));
    }
    let free = n - l - m;
    if free < pair.n {
        return Err(Error::Precondition(format!(
            "(1-x-y) power {free} of term ({l}, {m}) is below operator order {}",
            pair.n
        )));
    }
    let (alpha, beta, gamma) = (params.alpha(j), params.beta(j), params.gamma());
    let kx = pair.x_order();
    let ky = pair.k;
    let int = |v: usize| S::from_i64(v as i64);

    for i in 0..=ky {
        // y-derivatives: i of them hit (1-x-y), k-i hit the y power
        let mut ci = sign::<S>(i);
        ci *= &binomial::<S>(ky, i);
        let mut b = beta.clone();
        b += &int(m + i + 1);
        ci *= &pochhammer(&b, ky - i);
        let mut g = gamma.clone();
        g += &int(free - i + 1);
        ci *= &pochhammer(&g, i);
        if ci.is_zero() {
            continue;
        }
        for p in 0..=kx {
            let mut c = ci.clone();
            c *= &sign::<S>(p);
            c *= &binomial::<S>(kx, p);
            let mut a = alpha.clone();
            a += &int(l + p + 1);
            c *= &pochhammer(&a, kx - p);
            let mut g = gamma.clone();
            g += &int(free - i - p + 1);
            c *= &pochhammer(&g, p);
            c *= scale;
            out.add_term(l + p, m + i, c)?;
        }
    }
    Ok(())
}

/// `D_r ∘ ⋯ ∘ D_1 [(1-x-y)^(n_1+⋯+n_r)]`, operators applied in measure order.
pub fn jp_poly_operator<S: Scalar>(
    params: &ParamSet<S>,
    pairs: &[IndexPair],
) -> Result<BaryPoly<S>> {
    if pairs.len() != params.r() {
        return Err(Error::InvalidParams(format!(
            "{} index pairs for {} measures",
            pairs.len(),
            params.r()
        )));
    }
    let n = total_degree(pairs);
    let mut p = BaryPoly::term(0, 0, n, S::one())?;
    for (j, &pair) in pairs.iter().enumerate() {
        p = apply_d_poly(params, j, pair, &p)?;
    }
    Ok(p)
}

/// Closed-form coefficients of the two-measure polynomial:
/// `c(l, m) = Σ A(p, i) B(p, i, l-p, m-i)`.
pub fn jp_poly_explicit<S: Scalar>(
    params: &ParamSet<S>,
    pairs: &[IndexPair],
) -> Result<BaryPoly<S>> {
    if params.r() != 2 || pairs.len() != 2 {
        return Err(Error::InvalidParams(format!(
            "closed form needs exactly two measures, got {} (with {} pairs)",
            params.r(),
            pairs.len()
        )));
    }
    let (p1, p2) = (pairs[0], pairs[1]);
    let n_tot = p1.n + p2.n;
    let int = |v: i64| S::from_i64(v);
    let gamma_n = {
        let mut g = params.gamma().clone();
        g += &int(n_tot as i64);
        g
    };

    let a_coef = |p: usize, i: usize| -> S {
        let mut v = pochhammer(&int(p1.k as i64 - p1.n as i64), p);
        v *= &pochhammer(&int(-(p1.k as i64)), i);
        let mut a = params.alpha(0).clone();
        a += &int(p as i64 + 1);
        v *= &pochhammer(&a, p1.x_order() - p);
        let mut b = params.beta(0).clone();
        b += &int(i as i64 + 1);
        v *= &pochhammer(&b, p1.k - i);
        let mut g = gamma_n.clone();
        g += &int(1 - i as i64);
        v *= &pochhammer(&g, i);
        let mut g = gamma_n.clone();
        g += &int(1 - i as i64 - p as i64);
        v *= &pochhammer(&g, p);
        let mut d = factorial::<S>(p);
        d *= &factorial::<S>(i);
        v / d
    };
    let b_coef = |p: usize, i: usize, h: usize, s: usize| -> S {
        let mut v = pochhammer(&int(p2.k as i64 - p2.n as i64), h);
        v *= &pochhammer(&int(-(p2.k as i64)), s);
        let mut a = params.alpha(1).clone();
        a += &int((p + h) as i64 + 1);
        v *= &pochhammer(&a, p2.x_order() - h);
        let mut b = params.beta(1).clone();
        b += &int((i + s) as i64 + 1);
        v *= &pochhammer(&b, p2.k - s);
        let mut g = gamma_n.clone();
        g += &int(1 - (p + i + s) as i64);
        v *= &pochhammer(&g, s);
        let mut g = gamma_n.clone();
        g += &int(1 - (p + i + h + s) as i64);
        v *= &pochhammer(&g, h);
        let mut d = factorial::<S>(h);
        d *= &factorial::<S>(s);
        v / d
    };

    let a_table: Vec<Vec<S>> = (0..=p1.x_order())
        .map(|p| (0..=p1.k).map(|i| a_coef(p, i)).collect())
        .collect();

    let mut out = BaryPoly::zero(n_tot);
    for l in 0..=(n_tot - p1.k - p2.k) {
        for m in 0..=(p1.k + p2.k) {
            let mut c = S::zero();
            // A vanishes for p > n1-k1 or i > k1, B for h > n2-k2 or s > k2
            for p in l.saturating_sub(p2.x_order())..=l.min(p1.x_order()) {
                for i in m.saturating_sub(p2.k)..=m.min(p1.k) {
                    let mut t = a_table[p][i].clone();
                    t *= &b_coef(p, i, l - p, m - i);
                    c += &t;
                }
            }
            out.add_term(l, m, c)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn q(n: i64) -> Rational {
        ratio(n, 1)
    }

    fn flat(r: usize) -> ParamSet<Rational> {
        // distinct alphas keep the invariant satisfied
        ParamSet::new((0..r).map(|j| q(j as i64)).collect(), vec![q(0); r], q(0)).unwrap()
    }

    #[test]
    fn zeroth_order_operator_is_identity() {
        let params = ParamSet::new(vec![ratio(1, 3)], vec![ratio(5, 2)], ratio(-1, 2)).unwrap();
        let out = apply_d(&params, 0, IndexPair::new(0, 0).unwrap(), 1, 2, 5).unwrap();
        assert_eq!(out, BaryPoly::term(1, 2, 5, q(1)).unwrap());
    }

    #[test]
    fn first_order_operators_on_linear_seed() {
        let params = flat(1);
        // ∂x(x(1-x-y)) = (1-x-y) - x
        let dx = apply_d(&params, 0, IndexPair::new(1, 0).unwrap(), 0, 0, 1).unwrap();
        assert_eq!(dx, BaryPoly::from_terms(1, [((0, 0), q(1)), ((1, 0), q(-1))]).unwrap());
        // ∂y(y(1-x-y)) = (1-x-y) - y
        let dy = apply_d(&params, 0, IndexPair::new(1, 1).unwrap(), 0, 0, 1).unwrap();
        assert_eq!(dy, BaryPoly::from_terms(1, [((0, 0), q(1)), ((0, 1), q(-1))]).unwrap());
    }

    #[test]
    fn linear_extension() {
        let params = ParamSet::new(vec![ratio(1, 2)], vec![ratio(2, 3)], q(1)).unwrap();
        let pair = IndexPair::new(2, 1).unwrap();
        let zero = BaryPoly::<Rational>::zero(4);
        assert!(apply_d_poly(&params, 0, pair, &zero).unwrap().is_zero());

        let t1 = BaryPoly::term(1, 0, 4, ratio(3, 7)).unwrap();
        let t2 = BaryPoly::term(0, 1, 4, q(-2)).unwrap();
        let single = apply_d_poly(&params, 0, pair, &t1).unwrap();
        let direct = apply_d(&params, 0, pair, 1, 0, 4).unwrap();
        assert_eq!(single, BaryPoly::zero(4).scale_add(&direct, &ratio(3, 7)).unwrap());

        let both = apply_d_poly(&params, 0, pair, &t1.scale_add(&t2, &q(1)).unwrap()).unwrap();
        let separate = apply_d_poly(&params, 0, pair, &t1)
            .unwrap()
            .scale_add(&apply_d_poly(&params, 0, pair, &t2).unwrap(), &q(1))
            .unwrap();
        assert_eq!(both, separate);
    }

    #[test]
    fn insufficient_free_power_is_rejected() {
        let params = flat(1);
        let err = apply_d(&params, 0, IndexPair::new(2, 1).unwrap(), 1, 1, 3).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        assert!(apply_d(&params, 1, IndexPair::new(0, 0).unwrap(), 0, 0, 0).is_err());
    }

    #[test]
    fn trivial_pairs_give_constant_one() {
        let params = flat(3);
        let pairs = [IndexPair::new(0, 0).unwrap(); 3];
        let p = jp_poly_operator(&params, &pairs).unwrap();
        assert_eq!(p, BaryPoly::term(0, 0, 0, q(1)).unwrap());
        let p2 = jp_poly_explicit(&flat(2), &pairs[..2]).unwrap();
        assert_eq!(p2, BaryPoly::term(0, 0, 0, q(1)).unwrap());
    }

    #[test]
    fn explicit_requires_two_measures() {
        let pairs = [IndexPair::new(1, 0).unwrap(); 3];
        assert!(jp_poly_explicit(&flat(3), &pairs).is_err());
        assert!(jp_poly_operator(&flat(3), &pairs[..2]).is_err());
    }

    #[test]
    fn param_validation() {
        assert!(ParamSet::new(vec![q(-1)], vec![q(0)], q(0)).is_err());
        assert!(ParamSet::new(vec![q(0), q(0)], vec![q(1), q(1)], q(0)).is_err());
        assert!(ParamSet::new(vec![q(0)], vec![q(1), q(1)], q(0)).is_err());
        assert!(ParamSet::<Rational>::new(vec![], vec![], q(0)).is_err());
        assert!(IndexPair::new(1, 2).is_err());
    }

    #[test]
    fn two_measure_example_constant_term() {
        // P(0, 0) is the (0, 0) barycentric coefficient
        let params = ParamSet::new(vec![q(0), ratio(3, 2)], vec![ratio(1, 2), ratio(4, 3)], q(0)).unwrap();
        let pairs = [IndexPair::new(2, 1).unwrap(); 2];
        let p = jp_poly_operator(&params, &pairs).unwrap();
        assert_eq!(p.coeff(0, 0), ratio(35, 4));
        assert_eq!(p, jp_poly_explicit(&params, &pairs).unwrap());
    }
}
