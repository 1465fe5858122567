//! Test-only oracles and generators.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triangle_mop::scalar::ratio;
use triangle_mop::{BaryPoly, IndexPair, ParamSet, Rational};

/// Exponents of `x`, `y` and `z = 1 - x - y`.
type Exps = (Rational, Rational, Rational);

/// Sums of `c · x^a y^b (1-x-y)^c` with rational exponents, differentiated
/// term by term with the product rule.
#[derive(Debug, Clone, Default)]
pub struct Symbolic {
    terms: BTreeMap<Exps, Rational>,
}

impl Symbolic {
    pub fn from_bary(p: &BaryPoly<Rational>) -> Self {
        let n = p.degree() as i64;
        let mut s = Self::default();
        for (&(l, m), c) in p.terms() {
            let e = (int(l as i64), int(m as i64), int(n - l as i64 - m as i64));
            s.add(e, c.clone());
        }
        s
    }

    fn add(&mut self, e: Exps, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn shift(&self, dx: &Rational, dy: &Rational, dz: &Rational) -> Self {
        let mut out = Self::default();
        for ((a, b, c), coeff) in &self.terms {
            out.add((a + dx, b + dy, c + dz), coeff.clone());
        }
        out
    }

    /// ∂/∂x, with ∂z/∂x = -1.
    pub fn dx(&self) -> Self {
        let one = int(1);
        let mut out = Self::default();
        for ((a, b, c), coeff) in &self.terms {
            out.add((a - &one, b.clone(), c.clone()), coeff * a);
            out.add((a.clone(), b.clone(), c - &one), -(coeff * c));
        }
        out
    }

    /// ∂/∂y, with ∂z/∂y = -1.
    pub fn dy(&self) -> Self {
        let one = int(1);
        let mut out = Self::default();
        for ((a, b, c), coeff) in &self.terms {
            out.add((a.clone(), b - &one, c.clone()), coeff * b);
            out.add((a.clone(), b.clone(), c - &one), -(coeff * c));
        }
        out
    }

    /// Back to the barycentric basis; `None` unless every exponent is a
    /// nonnegative integer and each term has total degree `degree`.
    pub fn to_bary(&self, degree: usize) -> Option<BaryPoly<Rational>> {
        let mut p = BaryPoly::zero(degree);
        for ((a, b, c), coeff) in &self.terms {
            let as_usize = |r: &Rational| -> Option<usize> {
                (r.is_integer() && !r.is_negative()).then(|| r.to_integer().try_into().ok())?
            };
            let (a, b, c) = (as_usize(a)?, as_usize(b)?, as_usize(c)?);
            if a + b + c != degree {
                return None;
            }
            p.add_term(a, b, coeff.clone()).ok()?;
        }
        Some(p)
    }
}

pub fn int(n: i64) -> Rational {
    ratio(n, 1)
}

/// `W^{-1} ∂^n / ∂x^{n-k} ∂y^k (W x^{n-k} y^k f)` by repeated product-rule
/// differentiation, `W = x^α y^β (1-x-y)^γ`.
pub fn rodrigues_symbolic(
    alpha: &Rational,
    beta: &Rational,
    gamma: &Rational,
    pair: IndexPair,
    f: &BaryPoly<Rational>,
) -> Option<BaryPoly<Rational>> {
    let nx = (pair.n - pair.k) as i64;
    let mut s = Symbolic::from_bary(f).shift(&(alpha + int(nx)), &(beta + int(pair.k as i64)), gamma);
    for _ in 0..(pair.n - pair.k) {
        s = s.dx();
    }
    for _ in 0..pair.k {
        s = s.dy();
    }
    s.shift(&-alpha, &-beta, &-gamma).to_bary(f.degree())
}

/// The classical triangle polynomial
/// `W^{-1} ∂^n / ∂x^{n-k} ∂y^k (x^{α+n-k} y^{β+k} (1-x-y)^{γ+n})`.
pub fn classical_triangle(alpha: &Rational, beta: &Rational, gamma: &Rational, n: usize, k: usize) -> BaryPoly<Rational> {
    let pair = IndexPair::new(n, k).unwrap();
    let seed = BaryPoly::term(0, 0, n, int(1)).unwrap();
    rodrigues_symbolic(alpha, beta, gamma, pair, &seed).expect("integer exponents")
}

/// `D_r ∘ ... ∘ D_1 [(1-x-y)^{Σ n_j}]` via [`rodrigues_symbolic`].
pub fn jp_poly_symbolic(params: &ParamSet<Rational>, pairs: &[IndexPair]) -> BaryPoly<Rational> {
    let n: usize = pairs.iter().map(|p| p.n).sum();
    let mut p = BaryPoly::term(0, 0, n, int(1)).unwrap();
    for (j, &pair) in pairs.iter().enumerate() {
        p = rodrigues_symbolic(params.alpha(j), params.beta(j), params.gamma(), pair, &p).unwrap();
    }
    p
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational in `(-1, 3)` with denominator at most 6.
pub fn random_exponent(rng: &mut impl Rng) -> Rational {
    let den = rng.gen_range(1..=6i64);
    let num = rng.gen_range((-den + 1)..=(3 * den - 1));
    ratio(num, den)
}

/// Random rational weights for `r` measures with distinct `(α_j, β_j)`.
pub fn random_params(rng: &mut impl Rng, r: usize) -> ParamSet<Rational> {
    loop {
        let alphas = (0..r).map(|_| random_exponent(rng)).collect();
        let betas = (0..r).map(|_| random_exponent(rng)).collect();
        if let Ok(p) = ParamSet::new(alphas, betas, random_exponent(rng)) {
            return p;
        }
    }
}

pub fn random_bary(rng: &mut impl Rng, degree: usize) -> BaryPoly<Rational> {
    let mut p = BaryPoly::zero(degree);
    for l in 0..=degree {
        for m in 0..=(degree - l) {
            if rng.gen_bool(0.6) {
                p.add_term(l, m, ratio(rng.gen_range(-9..=9), rng.gen_range(1..=5))).unwrap();
            }
        }
    }
    p
}

pub fn pairs(list: &[(usize, usize)]) -> Vec<IndexPair> {
    list.iter().map(|&(n, k)| IndexPair::new(n, k).unwrap()).collect()
}

/// Every `((n_1,k_1),(n_2,k_2))` with `n_1 + n_2 ≤ max_total`.
pub fn all_pair_pairs(max_total: usize) -> Vec<Vec<IndexPair>> {
    let mut out = Vec::new();
    for n1 in 0..=max_total {
        for n2 in 0..=(max_total - n1) {
            for k1 in 0..=n1 {
                for k2 in 0..=n2 {
                    out.push(pairs(&[(n1, k1), (n2, k2)]));
                }
            }
        }
    }
    out
}

/// The two-measure example: α = (0, 3/2), β = (1/2, 4/3), γ = 0, pairs (2,1), (2,1).
pub fn two_measure_example() -> (ParamSet<Rational>, Vec<IndexPair>) {
    let params = ParamSet::new(
        vec![ratio(0, 1), ratio(3, 2)],
        vec![ratio(1, 2), ratio(4, 3)],
        ratio(0, 1),
    )
    .unwrap();
    (params, pairs(&[(2, 1), (2, 1)]))
}

/// The three-measure example: α = (0, 1/2, 3/4), β = (1/3, 1/5, 2/3),
/// γ = 1/2, pairs (1,0), (1,1), (2,1).
pub fn three_measure_example() -> (ParamSet<Rational>, Vec<IndexPair>) {
    let params = ParamSet::new(
        vec![ratio(0, 1), ratio(1, 2), ratio(3, 4)],
        vec![ratio(1, 3), ratio(1, 5), ratio(2, 3)],
        ratio(1, 2),
    )
    .unwrap();
    (params, pairs(&[(1, 0), (1, 1), (2, 1)]))
}

/// Monomial coefficients `(z-power, w-power, "p/q")` of the two-measure
/// polynomial as displayed in the reference.
pub const TWO_MEASURE_MONO: [(usize, usize, i64, i64); 15] = [
    (0, 4, 1045, 12),
    (1, 3, 672, 1),
    (2, 2, 2457, 2),
    (3, 1, 2200, 3),
    (4, 0, 455, 4),
    (0, 3, -240, 1),
    (1, 2, -1274, 1),
    (2, 1, -1350, 1),
    (3, 0, -308, 1),
    (0, 2, 455, 2),
    (1, 1, 700, 1),
    (2, 0, 567, 2),
    (0, 1, -250, 3),
    (1, 0, -98, 1),
    (0, 0, 35, 4),
];
