//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use triangle_mop::hermite_pade::{check_hp_conditions, e_truncated, NumeratorOptions, NumeratorState};
use triangle_mop::moments::{in_condition_set, simplex_moment, verify_orthogonality_of};
use triangle_mop::quadrature::{build_rule, e_direct, phi_direct, psi1_direct, psi2_direct, self_converged, RuleCache};
use rand::Rng;
use triangle_mop::rodrigues::{apply_d_poly, jp_poly_explicit, jp_poly_operator};
use triangle_mop::scalar::ratio;
use triangle_mop::simplex_poly::MonoPoly;
use triangle_mop::{BaryPoly, IndexPair, ParamSet, Rational};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

const SAMPLE_POINTS: [f64; 3] = [2.0, 5.0, 20.0];

/// Ten random rational parameter sets for two measures, fixed by seed.
fn random_matrix_params() -> Vec<ParamSet<Rational>> {
    let mut rng = rng(0x5EED_0001);
    (0..10).map(|_| random_params(&mut rng, 2)).collect()
}

fn criterion_1() -> Outcome {
    let args = [
        "triangle-mop", "poly", "--alphas", "0,3/2", "--betas", "1/2,4/3", "--gamma", "0", "--pairs", "2:1,2:1",
        "--format", "json",
    ];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = triangle_mop::cli::run(args, &mut out, &mut err);
    if code != 0 {
        return outcome(false, format!("exit code {code}: {}", String::from_utf8_lossy(&err)));
    }
    let v: serde_json::Value = serde_json::from_slice(&out).expect("poly emits JSON");
    let wire = serde_json::from_value(v["mono_terms"].clone()).expect("mono terms");
    let mono = MonoPoly::<Rational>::from_wire(&wire).expect("valid wire");
    let mut mismatches = Vec::new();
    for &(a, b, num, den) in &TWO_MEASURE_MONO {
        if mono.coeff(a, b) != ratio(num, den) {
            mismatches.push(format!("z^{a} w^{b}"));
        }
    }
    let exact_count = mono.len() == TWO_MEASURE_MONO.len();
    outcome(
        mismatches.is_empty() && exact_count,
        format!("15/15 coefficients exact: {}; {} terms", mismatches.is_empty(), mono.len()),
    )
}

fn criterion_2() -> Outcome {
    let mut cases = 0;
    let mut failures = 0;
    for params in random_matrix_params() {
        for pairs in all_pair_pairs(8) {
            let op = jp_poly_operator(&params, &pairs).unwrap();
            let ex = jp_poly_explicit(&params, &pairs).unwrap();
            cases += 1;
            if op != ex {
                failures += 1;
            }
        }
    }
    outcome(failures == 0, format!("{cases} cases (n1+n2 ≤ 8, 10 parameter sets), {failures} mismatches"))
}

fn criterion_3() -> Outcome {
    let mut cases = 0;
    let mut failures = 0;
    for params in random_matrix_params() {
        let swapped = params.permuted(&[1, 0]);
        for pairs in all_pair_pairs(8) {
            let forward = jp_poly_operator(&params, &pairs).unwrap();
            let backward = jp_poly_operator(&swapped, &[pairs[1], pairs[0]]).unwrap();
            cases += 1;
            if forward != backward {
                failures += 1;
            }
        }
    }
    let mut rng = rng(0x5EED_0003);
    let mut term_cases = 0;
    let mut term_failures = 0;
    for params in random_matrix_params().iter().take(3) {
        for pairs in all_pair_pairs(4) {
            let (p1, p2) = (pairs[0], pairs[1]);
            let degree = p1.n + p2.n + 2;
            let l = rng.gen_range(0..=2);
            let m = rng.gen_range(0..=(2 - l));
            let seed = BaryPoly::term(l, m, degree, ratio(1, 1)).unwrap();
            let one_two = apply_d_poly(params, 1, p2, &apply_d_poly(params, 0, p1, &seed).unwrap()).unwrap();
            let two_one = apply_d_poly(params, 0, p1, &apply_d_poly(params, 1, p2, &seed).unwrap()).unwrap();
            term_cases += 1;
            if one_two != two_one {
                term_failures += 1;
            }
        }
    }
    outcome(
        failures == 0 && term_failures == 0,
        format!(
            "{cases} operator-order swaps, {failures} differ; D_1 D_2 = D_2 D_1 on {term_cases} random terms, {term_failures} differ"
        ),
    )
}

/// Index-pair lists for `r` measures with `Σ n_j ≤ max_total`.
fn pair_lists(r: usize, max_total: usize) -> Vec<Vec<IndexPair>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for n in 0..=max_total {
        for k in 0..=n {
            for mut rest in pair_lists(r - 1, max_total - n) {
                rest.insert(0, IndexPair::new(n, k).unwrap());
                out.push(rest);
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let mut rng = rng(0x5EED_0004);
    let mut cases = 0;
    let mut failures = Vec::new();
    let mut mutations = 0;
    let mut unbroken = 0;
    for r in [2, 3] {
        let param_sets: Vec<_> = (0..2).map(|_| random_params(&mut rng, r)).collect();
        for params in &param_sets {
            for pairs in pair_lists(r, 6) {
                let total: usize = pairs.iter().map(|p| p.n).sum();
                let d = total + 2;
                let p = jp_poly_operator(params, &pairs).unwrap();
                let report = verify_orthogonality_of(&p, params, &pairs, d, 0.0).unwrap();
                cases += 1;
                if !report.pass {
                    failures.push(format!("{pairs:?}"));
                }
                let nonempty = pairs.iter().any(|pair| in_condition_set(*pair, 0, 0));
                if nonempty {
                    let mut bumped = p.clone();
                    bumped.add_term(0, 0, ratio(1, 1)).unwrap();
                    mutations += 1;
                    if verify_orthogonality_of(&bumped, params, &pairs, d, 0.0).unwrap().pass {
                        unbroken += 1;
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty() && unbroken == 0,
        format!(
            "{cases} polynomials (r = 2, 3; Σn ≤ 6) exactly orthogonal: {}; {mutations} mutations, {unbroken} undetected",
            failures.is_empty()
        ),
    )
}

fn criterion_5() -> Outcome {
    let (params, pairs) = two_measure_example();
    let a = jp_poly_operator(&params, &pairs).unwrap().to_mono();
    let example_ok = check_hp_conditions(&a, &params, &pairs, 6, 0.0).unwrap().pass;
    let mut cases = 0;
    let mut failures = 0;
    for params in random_matrix_params() {
        for pairs in all_pair_pairs(8) {
            let d = pairs[0].n + pairs[1].n + 2;
            let a = jp_poly_operator(&params, &pairs).unwrap().to_mono();
            cases += 1;
            if !check_hp_conditions(&a, &params, &pairs, d, 0.0).unwrap().pass {
                failures += 1;
            }
        }
    }
    outcome(
        example_ok && failures == 0,
        format!("example: {example_ok}; random matrix: {cases} cases, {failures} with a nonzero coefficient on 𝕃"),
    )
}

fn example_states() -> (Vec<NumeratorState>, ParamSet<f64>) {
    let (params, pairs) = two_measure_example();
    let states = (0..2)
        .map(|j| NumeratorState::from_params(&params, &pairs, j, NumeratorOptions::default()).unwrap())
        .collect();
    (states, params.to_f64())
}

fn criterion_6() -> Outcome {
    let (states, pf) = example_states();
    let mut worst: f64 = 0.0;
    let mut worst_q = 0;
    for (j, s) in states.iter().enumerate() {
        for &z in &SAMPLE_POINTS {
            for &w in &SAMPLE_POINTS {
                let a = s.denominator();
                let (direct, q) = match self_converged(|q| phi_direct(a, &pf, j, z, w, q), 16, 1e-10, 512) {
                    Ok(v) => v,
                    Err(e) => return outcome(false, format!("oracle did not converge at ({z},{w}): {e}")),
                };
                let phi = s.phi(z, w).unwrap();
                worst = worst.max(((phi - direct) / direct).abs());
                worst_q = worst_q.max(q);
            }
        }
    }
    outcome(worst <= 1e-8, format!("max relative deviation {worst:.3e} (≤ 1e-8), oracle q ≤ {worst_q}"))
}

fn criterion_7() -> Outcome {
    let (states, pf) = example_states();
    let (mut w1, mut w2): (f64, f64) = (0.0, 0.0);
    for (j, s) in states.iter().enumerate() {
        let a = s.denominator();
        for &z in &SAMPLE_POINTS {
            for &w in &SAMPLE_POINTS {
                let d1 = self_converged(|q| psi1_direct(a, &pf, j, z, w, q), 16, 1e-10, 512).unwrap().0;
                let d2 = self_converged(|q| psi2_direct(a, &pf, j, z, w, q), 16, 1e-10, 512).unwrap().0;
                let c1 = s.psi11(z, w) + s.psi12(z, w).unwrap();
                let c2 = s.psi21(z, w) + s.psi22(z, w).unwrap();
                w1 = w1.max(((c1 - d1) / d1).abs());
                w2 = w2.max(((c2 - d2) / d2).abs());
            }
        }
    }
    outcome(
        w1 <= 1e-8 && w2 <= 1e-8,
        format!("ψ11+ψ12 max rel {w1:.3e}, ψ21+ψ22 max rel {w2:.3e} (≤ 1e-8)"),
    )
}

fn criterion_8() -> Outcome {
    let (states, pf) = example_states();
    let diag = [2.0, 5.0, 10.0, 20.0];
    let mut ok = true;
    let mut lines = Vec::new();
    for (j, s) in states.iter().enumerate() {
        let mut cache = RuleCache::for_measure(&pf, j);
        let errs: Vec<f64> = diag
            .iter()
            .map(|&t| {
                let e = cache.e_converged(t, t, 64, 1e-10, 512).unwrap().0;
                let r = s.approximant(t, t, 1e-12).unwrap();
                ((e - r) / e).abs()
            })
            .collect();
        let monotone = errs.windows(2).all(|w| w[1] <= w[0]);
        let drop = errs[3] <= errs[0] / 10.0;
        ok &= monotone && drop;
        lines.push(format!(
            "j={}: {}",
            j + 1,
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" → ")
        ));
    }
    outcome(ok, format!("rel_err along (2,2)→(20,20): {}", lines.join("; ")))
}

fn criterion_9() -> Outcome {
    let (al, be, ga) = (0.0, 0.5, 0.0);
    let rule = build_rule(al, be, ga, 8).unwrap();
    let mut worst_moment: f64 = 0.0;
    for l in 0..=10usize {
        for m in 0..=(10 - l) {
            let exact = simplex_moment(al + l as f64, be + m as f64, ga).unwrap();
            let got = rule.integrate(|x, y| x.powi(l as i32) * y.powi(m as i32));
            worst_moment = worst_moment.max((got / exact - 1.0).abs());
        }
    }
    let (params, _) = two_measure_example();
    let pf = params.to_f64();
    let mut worst_series: f64 = 0.0;
    for j in 0..2 {
        let direct = e_direct(&pf, j, 10.0, 10.0, 64).unwrap();
        let series = e_truncated(&pf, j, 10.0, 10.0, 80, 80).unwrap();
        worst_series = worst_series.max(((series - direct) / direct).abs());
    }
    outcome(
        worst_moment <= 1e-13 && worst_series <= 1e-10,
        format!("moments max rel {worst_moment:.2e} (≤ 1e-13); E_truncated vs E_direct at (10,10) {worst_series:.2e} (≤ 1e-10)"),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = rng(0x5EED_0010);
    let mut sets: Vec<ParamSet<Rational>> = (0..4).map(|_| random_params(&mut rng, 1)).collect();
    sets.push(ParamSet::new(vec![ratio(0, 1)], vec![ratio(1, 2)], ratio(0, 1)).unwrap());
    let mut cases = 0;
    let mut failures = 0;
    for params in &sets {
        for n in 0..=3 {
            for k in 0..=n {
                let ours = jp_poly_operator(params, &pairs(&[(n, k)])).unwrap();
                let reference = classical_triangle(params.alpha(0), params.beta(0), params.gamma(), n, k);
                cases += 1;
                if ours != reference {
                    failures += 1;
                }
            }
        }
    }
    outcome(failures == 0, format!("{cases} single-measure cases (n ≤ 3) vs symbolic differentiation, {failures} differ"))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("two-measure polynomial reproduction", Duration::from_secs(1), criterion_1),
        ("operator vs closed-form construction", Duration::from_secs(30), criterion_2),
        ("operator commutation / symmetry", Duration::from_secs(30), criterion_3),
        ("orthogonality on the strict condition set", Duration::from_secs(60), criterion_4),
        ("Hermite–Padé vanishing on 𝕃", Duration::from_secs(60), criterion_5),
        ("Φ vs 2-D quadrature", Duration::from_secs(30), criterion_6),
        ("ψ-level decomposition vs quadrature", Duration::from_secs(30), criterion_7),
        ("error-surface shape along the diagonal", Duration::from_secs(30), criterion_8),
        ("oracle self-tests", Duration::from_secs(30), criterion_9),
        ("single-measure reduction", Duration::from_secs(30), criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = result.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} | {} | {:.2?} (budget {:?})",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            name,
            result.detail,
            elapsed,
            budget
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
