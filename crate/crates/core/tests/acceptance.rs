//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the summary lines are always printed.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use fskq::experiments::{
    bond_closed_form, integrand_ex1, monte_carlo, run_experiment, true_integral_ex2, ExperimentConfig, ExperimentId,
    VasicekParams, EX1_REFERENCE,
};
use fskq::io::{from_json, to_json, NodeSetFile, NodeSource, RuleFile};
use fskq::kernels::{apply_signed_permutation, initial_error_sq, kernel_mean};
use fskq::node_selection::{count_nodes, gauss_hermite_basis, sparse_grid_generators, NestedBasis};
use fskq::weights::{build_s_matrix, make_rule, naive_weights, worst_case_error, SymmetricNodeSet};
use fskq::{cardinality, expand, GaussianKernel, GeneratorVector, Kernel, MeasureKind, SymmetricMeasure};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

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

type Criterion = (u32, &'static str, bool, fn() -> Outcome);

fn main() {
    // `cargo test -- --list` style invocations should not run the suite.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: Vec<Criterion> = vec![
        (1, "fast weights equal the full-system weights", true, c1_oracle_equivalence),
        (2, "cardinality table", true, c2_cardinality_table),
        (3, "sparse-grid node counts", true, c3_sparse_grid_counts),
        (4, "sparse grid equals brute-force Smolyak union", true, c4_smolyak_equivalence),
        (5, "Gaussian bump on the 11-cube", true, c5_ex2),
        (6, "Vasicek bond", true, c6_ex3),
        (7, "random generators in three dimensions", true, c7_ex1),
        (8, "kernel-mean closed forms", true, c8_kernel_means),
        (9, "invariant suites", true, c9_invariants),
        (10, "one-dimensional convergence rate (observational)", false, c10_rate),
    ];
    let mut failed = Vec::new();
    for (id, name, gating, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        let o = result.unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = match (o.pass, gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "INFO",
        };
        println!("{tag} criterion {id} ({name}): {} [{secs:.1} s]", o.detail);
        if gating && !o.pass {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: all gating criteria passed");
}

fn points_of(set: &SymmetricNodeSet) -> Vec<Vec<f64>> {
    set.points().map(|p| p.to_vec()).collect()
}

/// Random generators whose non-zero entries sit on a jittered lattice with
/// spacing `0.8ℓ`, so that no two nodes are much closer than the length scale.
fn lattice_generators(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    let levels: Vec<f64> = (1..=3).map(|i| 0.8 * i as f64 * (1.0 + rng.random_range(-0.05..0.05))).collect();
    let j = rng.random_range(2..=4);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < j {
        let mut g: Vec<f64> = (0..d)
            .map(|_| if rng.random_bool(0.3) { 0.0 } else { levels[rng.random_range(0..3)] })
            .collect();
        g.sort_by(|a, b| b.total_cmp(a));
        let key: Vec<u64> = g.iter().map(|v| v.to_bits()).collect();
        if seen.insert(key) {
            out.push(g);
        }
    }
    out
}

fn c1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut comparisons = 0;
    let mut max_n = 0;
    let mut worst_cond: f64 = 0.0;
    for d in 2..=4 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + d as u64);
        for _ in 0..20 {
            let shape = lattice_generators(&mut rng, d);
            for l in [0.5, 1.0, 2.0] {
                let gens: Vec<GeneratorVector> = shape
                    .iter()
                    .map(|g| GeneratorVector::new(&g.iter().map(|v| v * l).collect::<Vec<_>>()).unwrap())
                    .collect();
                let nodes = SymmetricNodeSet::from_generators_default(&gens).unwrap();
                assert!(nodes.total_nodes() <= 3000);
                max_n = max_n.max(nodes.total_nodes());
                let pts = points_of(&nodes);
                let k = GaussianKernel::new(l).unwrap();
                for kind in [MeasureKind::StandardGaussian, MeasureKind::UniformCube] {
                    let mu = SymmetricMeasure::new(kind, d).unwrap();
                    let naive = naive_weights(&pts, &k, &mu).unwrap();
                    worst_cond = worst_cond.max(naive.cond_estimate);
                    let rule = make_rule(nodes.clone(), &k, &mu).unwrap();
                    let fast = rule.expanded_weights();
                    let scale = naive.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
                    let dev = fast
                        .iter()
                        .zip(&naive.weights)
                        .map(|(a, b)| (a - b).abs() / scale)
                        .fold(0.0, f64::max);
                    worst = worst.max(dev);
                    comparisons += 1;
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-8 && secs < 120.0,
        format!(
            "{comparisons} comparisons, n ≤ {max_n}, max relative deviation {worst:.2e} (≤ 1e-8), \
             largest condition estimate {worst_cond:.1e}, {secs:.1} s (< 120 s)"
        ),
    )
}

fn c2_cardinality_table() -> Outcome {
    // Rows: m = 1..=6; columns: d = 2..=6 (0 where m > d).
    let table: [[u64; 5]; 6] = [
        [4, 6, 8, 10, 12],
        [8, 24, 48, 80, 120],
        [0, 48, 192, 480, 960],
        [0, 0, 384, 1920, 5760],
        [0, 0, 0, 3840, 23040],
        [0, 0, 0, 0, 46080],
    ];
    let mut checked = 0;
    for (mi, row) in table.iter().enumerate() {
        let m = mi + 1;
        for (di, &expected) in row.iter().enumerate() {
            let d = di + 2;
            if m > d {
                continue;
            }
            let raw: Vec<f64> = (0..d).map(|i| if i < m { (m - i) as f64 * 0.37 } else { 0.0 }).collect();
            let g = GeneratorVector::new(&raw).unwrap();
            let card = cardinality(&g).unwrap();
            let set = expand(&g).unwrap();
            let distinct: HashSet<Vec<u64>> = set.points().map(|p| p.iter().map(|v| v.to_bits()).collect()).collect();
            if card != expected || set.size() as u64 != expected || distinct.len() as u64 != expected {
                return outcome(false, format!("d={d} m={m}: cardinality {card}, expanded {}, expected {expected}", distinct.len()));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked} entries match, e.g. d=5 m=4 → 1920"))
}

fn all_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if total >= 1 { vec![vec![total]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in all_compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|v| if *v == 0.0 { 0 } else { v.to_bits() }).collect()
}

/// The union over `|α| = d + q` of the tensor grids `X^{α_1} × … × X^{α_d}`.
fn brute_force_smolyak(q: usize, d: usize, basis: &NestedBasis) -> HashSet<Vec<u64>> {
    let mut out = HashSet::new();
    for alpha in all_compositions(d + q, d) {
        let levels: Vec<&[f64]> = alpha.iter().map(|&a| basis.level(a)).collect();
        let mut idx = vec![0usize; d];
        loop {
            let p: Vec<f64> = idx.iter().zip(&levels).map(|(&i, l)| l[i]).collect();
            out.insert(key(&p));
            let mut j = d;
            while j > 0 {
                j -= 1;
                idx[j] += 1;
                if idx[j] < levels[j].len() {
                    break;
                }
                idx[j] = 0;
                if j == 0 {
                    j = usize::MAX;
                    break;
                }
            }
            if j == usize::MAX {
                break;
            }
        }
    }
    out
}

fn fss_points(q: usize, d: usize, basis: &NestedBasis) -> (Vec<Vec<u64>>, usize) {
    let gens = sparse_grid_generators(q, d, basis).unwrap();
    let nodes = SymmetricNodeSet::from_generators_default(&gens).unwrap();
    (nodes.points().map(key).collect(), gens.len())
}

fn c3_sparse_grid_counts() -> Outcome {
    let cc = NestedBasis::clenshaw_curtis(8).unwrap();
    let expected = [(23u64, 2usize), (265, 4), (2069, 8), (12497, 17), (63097, 36)];
    let mut got = Vec::new();
    for q in 1..=5 {
        let gens = sparse_grid_generators(q, 11, &cc).unwrap();
        got.push((count_nodes(&gens).unwrap(), gens.len()));
    }
    if got != expected {
        return outcome(false, format!("d=11 CC counts {got:?}, expected {expected:?}"));
    }
    let figure = [
        ("CC d=2 q=7", 705usize, 7, 2, cc.clone()),
        ("CC d=3 q=6", 1073, 6, 3, cc.clone()),
        ("GH d=2 q=11", 265, 11, 2, gauss_hermite_basis(11).unwrap()),
        ("GH d=3 q=10", 1561, 10, 3, gauss_hermite_basis(10).unwrap()),
    ];
    let mut notes = Vec::new();
    for (label, n, q, d, basis) in figure {
        let (pts, _) = fss_points(q, d, &basis);
        let distinct: HashSet<Vec<u64>> = pts.iter().cloned().collect();
        let brute = brute_force_smolyak(q, d, &basis).len();
        if pts.len() != n || distinct.len() != n || brute != n {
            return outcome(false, format!("{label}: fss {} distinct {} brute force {brute}, expected {n}", pts.len(), distinct.len()));
        }
        notes.push(format!("{label}={n}"));
    }
    outcome(
        true,
        format!("d=11 CC q=1..5 → n {:?}, J {:?}; {}", got.iter().map(|g| g.0).collect::<Vec<_>>(), got.iter().map(|g| g.1).collect::<Vec<_>>(), notes.join(", ")),
    )
}

fn c4_smolyak_equivalence() -> Outcome {
    let mut checked = 0;
    for d in 2..=3 {
        for q in 1..=4 {
            for (name, basis) in [
                ("CC", NestedBasis::clenshaw_curtis(q + 1).unwrap()),
                ("GH", gauss_hermite_basis(q).unwrap()),
            ] {
                let (pts, _) = fss_points(q, d, &basis);
                let fss: HashSet<Vec<u64>> = pts.iter().cloned().collect();
                let brute = brute_force_smolyak(q, d, &basis);
                if fss.len() != pts.len() || fss != brute {
                    return outcome(false, format!("{name} d={d} q={q}: {} vs {} points", fss.len(), brute.len()));
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("{checked} grids identical as point sets"))
}

fn c5_ex2() -> Outcome {
    let start = Instant::now();
    let truth = true_integral_ex2();
    let printed = format!("{truth:.4}");
    let report = run_experiment(ExperimentId::Ex2, &ExperimentConfig::default_for(ExperimentId::Ex2)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let errs: Vec<f64> = report.rows.iter().map(|r| r.rel_error).collect();
    let wces: Vec<f64> = report.rows.iter().map(|r| r.wce.unwrap()).collect();
    let ns: Vec<usize> = report.rows.iter().map(|r| r.n).collect();
    let monotone = wces.windows(2).all(|w| w[1] < w[0]);
    let pass = printed == "0.0392"
        && ns == [23, 265, 2069, 12497, 63097]
        && errs[4] * 10.0 <= errs[0]
        && monotone
        && secs < 300.0;
    outcome(
        pass,
        format!(
            "truth {truth:.6} prints {printed}; rel. errors {:?}; WCE {:?} (decreasing: {monotone}); {secs:.1} s",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
            wces.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
        ),
    )
}

fn c6_ex3() -> Outcome {
    let values: Vec<f64> = (10..=300).map(|d| bond_closed_form(&VasicekParams::benchmark(d)).unwrap()).collect();
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let rounded_ok = values.iter().all(|v| {
        let r: f64 = format!("{v:.3}").parse().unwrap();
        (0.81..=0.815).contains(&r)
    });
    let strict_ok = lo >= 0.81 && hi <= 0.815;

    let report = run_experiment(ExperimentId::Ex3, &ExperimentConfig::default_for(ExperimentId::Ex3)).unwrap();
    let mut quad_ok = true;
    let mut mc_wins = 0;
    let mut notes = Vec::new();
    for row in &report.rows {
        let mut mc: Vec<f64> = report.baselines.iter().filter(|b| b.dim == row.dim).map(|b| b.rel_error).collect();
        mc.sort_by(f64::total_cmp);
        let median = 0.5 * (mc[mc.len() / 2] + mc[(mc.len() - 1) / 2]);
        quad_ok &= row.rel_error <= 0.02;
        if median >= row.rel_error {
            mc_wins += 1;
        }
        notes.push(format!("d={} n={} quad {:.1e} mc median {:.1e}", row.dim + 1, row.n, row.rel_error, median));
    }
    let pass = rounded_ok && quad_ok && mc_wins >= 4 && report.rows.len() == 5;
    outcome(
        pass,
        format!(
            "closed form in [{lo:.6}, {hi:.6}] (3 s.f. within [0.81, 0.815]: {rounded_ok}; exact: {strict_ok}); {}; quadrature ≤ MC median in {mc_wins}/5",
            notes.join("; ")
        ),
    )
}

fn c7_ex1() -> Outcome {
    let mc = monte_carlo(integrand_ex1, 3, 10_000_000, MeasureKind::StandardGaussian, 2024);
    let mc_ok = format!("{mc:.3}") == "0.389";
    let mut config = ExperimentConfig::default_for(ExperimentId::Ex1);
    config.j_values = vec![50];
    config.seeds = (0..10).collect();
    let report = run_experiment(ExperimentId::Ex1, &config).unwrap();
    let within = report.rows.iter().filter(|r| (r.estimate - 0.389).abs() <= 0.05).count();
    let estimates: Vec<String> = report.rows.iter().map(|r| format!("{:.3}", r.estimate)).collect();
    let ells: Vec<String> = report.rows.iter().map(|r| format!("{:.2}", r.length_scale.unwrap())).collect();
    let n_ok = report.rows.len() == 10 && report.rows.iter().all(|r| r.n == 2400 && r.j == 50);
    outcome(
        mc_ok && within >= 8 && n_ok,
        format!(
            "MC(1e7) = {mc:.5} (reference {EX1_REFERENCE:.5}); FSKMC J=50 estimates {estimates:?} with ℓ {ells:?}; {within}/10 within ±0.05"
        ),
    )
}

/// Gauss–Hermite (probability weights) by Golub–Welsch.
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        j[(k, k - 1)] = (k as f64).sqrt();
        j[(k - 1, k)] = (k as f64).sqrt();
    }
    let eig = j.symmetric_eigen();
    let x: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let w: Vec<f64> = (0..n).map(|i| eig.eigenvectors[(0, i)].powi(2)).collect();
    (x, w)
}

/// Composite Gauss–Legendre on `[−1, 1]` with weights for the uniform
/// probability measure.
fn composite_legendre(panels: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(m, m);
    for k in 1..m {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = j.symmetric_eigen();
    let h = 2.0 / panels as f64;
    let mut x = Vec::new();
    let mut w = Vec::new();
    for p in 0..panels {
        let left = -1.0 + p as f64 * h;
        for i in 0..m {
            x.push(left + 0.5 * h * (eig.eigenvalues[i] + 1.0));
            w.push(0.5 * h * 2.0 * eig.eigenvectors[(0, i)].powi(2) * 0.5);
        }
    }
    (x, w)
}

/// `∫ k(x, y) dμ(y)` by a full tensor rule in `x.len()` dimensions.
fn tensor_mean(k: &GaussianKernel, x: &[f64], nodes: &[f64], weights: &[f64]) -> f64 {
    let d = x.len();
    let n = nodes.len();
    let mut idx = vec![0usize; d];
    let mut y = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (i, &ix) in idx.iter().enumerate() {
            y[i] = nodes[ix];
            w *= weights[ix];
        }
        total += w * k.eval(x, &y);
        let mut j = d;
        loop {
            if j == 0 {
                return total;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < n {
                break;
            }
            idx[j] = 0;
        }
    }
}

fn c8_kernel_means() -> Outcome {
    let gh = gauss_hermite(80);
    let gh_check = gauss_hermite(100);
    let gl = composite_legendre(8, 12);
    let gl_check = composite_legendre(10, 14);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut worst_rule_gap: f64 = 0.0;
    let mut count = 0;
    for kind in [MeasureKind::StandardGaussian, MeasureKind::UniformCube] {
        let ((xs, ws), (xc, wc), range) = match kind {
            MeasureKind::StandardGaussian => (&gh, &gh_check, 3.0),
            MeasureKind::UniformCube => (&gl, &gl_check, 1.5),
        };
        for d in 1..=3 {
            let mu = SymmetricMeasure::new(kind, d).unwrap();
            for l in [0.5, 1.0, 2.0] {
                let k = GaussianKernel::new(l).unwrap();
                for i in 0..100 {
                    let x: Vec<f64> = (0..d).map(|_| rng.random_range(-range..range)).collect();
                    let oracle = tensor_mean(&k, &x, xs, ws);
                    if i % 10 == 0 {
                        // Confirm the oracle has converged.
                        let finer = tensor_mean(&k, &x, xc, wc);
                        worst_rule_gap = worst_rule_gap.max(((finer - oracle) / oracle).abs());
                    }
                    let closed = kernel_mean(&k, &mu, &x).unwrap();
                    worst = worst.max(((closed - oracle) / oracle).abs());
                    count += 1;
                }
            }
        }
    }
    outcome(
        worst <= 1e-8 && worst_rule_gap <= 1e-10,
        format!("{count} points, max relative error {worst:.2e} (≤ 1e-8); oracle refinement gap {worst_rule_gap:.1e}"),
    )
}

fn c9_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checks = Vec::new();

    // Orbit closure and norm equality.
    let mut ok = true;
    for _ in 0..200 {
        let d = rng.random_range(1..=5);
        let raw: Vec<f64> = (0..d).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.1..2.0) }).collect();
        let g = GeneratorVector::new(&raw).unwrap();
        let set = expand(&g).unwrap();
        let members: HashSet<Vec<u64>> = set.points().map(key).collect();
        for p in set.points() {
            let n2: f64 = p.iter().map(|v| v * v).sum();
            ok &= (n2 - g.norm_sq()).abs() <= 1e-12 * g.norm_sq().max(1.0);
        }
        let x = set.point(rng.random_range(0..set.size())).to_vec();
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(&mut rng);
        let signs: Vec<f64> = (0..d).map(|_| if rng.random_bool(0.5) { -1.0 } else { 1.0 }).collect();
        ok &= members.contains(&key(&apply_signed_permutation(&perm, &signs, &x)));
    }
    checks.push(("orbit closure and norm equality", ok));

    // Block structure of the kernel matrix and of S.
    let mut rows_ok = true;
    let mut s_ok = true;
    let mut identity_ok = true;
    let mut clamp_ok = true;
    let mut removal_ok = true;
    let mut roundtrip_ok = true;
    for case in 0..30 {
        let d = rng.random_range(2..=3);
        let shape = lattice_generators(&mut rng, d);
        let gens: Vec<GeneratorVector> = shape.iter().map(|g| GeneratorVector::new(g).unwrap()).collect();
        let nodes = SymmetricNodeSet::from_generators_default(&gens).unwrap();
        let l = [0.5, 1.0, 2.0][case % 3];
        let k = GaussianKernel::new(l).unwrap();
        for a in nodes.sets() {
            for b in nodes.sets() {
                let row = |x: &[f64]| {
                    let mut r: Vec<f64> = b.points().map(|y| k.eval(x, y)).collect();
                    r.sort_by(f64::total_cmp);
                    r
                };
                let first = row(a.point(0));
                for x in a.points() {
                    rows_ok &= row(x).iter().zip(&first).all(|(u, v)| (u - v).abs() <= 1e-14);
                }
            }
        }
        let s = build_s_matrix(&nodes, &k).unwrap();
        let sizes = nodes.sizes();
        for i in 0..s.size() {
            for j in 0..s.size() {
                let lhs = sizes[i] as f64 * s.get(i, j);
                let rhs = sizes[j] as f64 * s.get(j, i);
                s_ok &= (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300);
            }
        }
        let kind = if case % 2 == 0 { MeasureKind::StandardGaussian } else { MeasureKind::UniformCube };
        let mu = SymmetricMeasure::new(kind, d).unwrap();
        let rule = make_rule(nodes.clone(), &k, &mu).unwrap();
        let q_of_mean = fskq::integrate(&rule, |x| kernel_mean(&k, &mu, x).unwrap()).unwrap();
        let init = initial_error_sq(&k, &mu).unwrap();
        identity_ok &= (q_of_mean + rule.wce().powi(2) - init).abs() <= 1e-12 * init;
        let w = worst_case_error(&rule);
        clamp_ok &= w.value >= 0.0 && w.value <= init.sqrt() * (1.0 + 1e-12) && !w.unstable;
        for drop in 0..nodes.num_sets() {
            let kept: Vec<GeneratorVector> = gens.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, g)| g.clone()).collect();
            let smaller = make_rule(SymmetricNodeSet::from_generators_default(&kept).unwrap(), &k, &mu).unwrap();
            removal_ok &= smaller.wce() >= rule.wce() - 1e-12;
        }
        let file = RuleFile::new(&rule, NodeSource::Custom).unwrap();
        let back: RuleFile = from_json(&to_json(&file).unwrap()).unwrap();
        roundtrip_ok &= back == file && back.verify().is_ok();
        let nf = NodeSetFile::new(d, NodeSource::Custom, &gens).unwrap();
        let nb: NodeSetFile = from_json(&to_json(&nf).unwrap()).unwrap();
        roundtrip_ok &= nb == nf && nb.generators().unwrap() == gens;
    }
    checks.push(("kernel-matrix blocks have permuted rows", rows_ok));
    checks.push(("n_i S_ij = n_j S_ji", s_ok));
    checks.push(("Q(k_mu) + e^2 = mu(k_mu)", identity_ok));
    checks.push(("WCE clamp bounds", clamp_ok));
    checks.push(("WCE non-decreasing under set removal", removal_ok));
    checks.push(("file round-trips", roundtrip_ok));

    let pass = checks.iter().all(|c| c.1);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        pass,
        if pass { format!("{} invariant families hold", checks.len()) } else { format!("violated: {failed:?}") },
    )
}

fn c10_rate() -> Outcome {
    let k = GaussianKernel::new(0.8).unwrap();
    let mu = SymmetricMeasure::uniform_cube(1).unwrap();
    let basis = NestedBasis::clenshaw_curtis(8).unwrap();
    let mut pairs = Vec::new();
    for q in 1..=7 {
        let gens = sparse_grid_generators(q, 1, &basis).unwrap();
        let nodes = SymmetricNodeSet::from_generators_default(&gens).unwrap();
        let n = nodes.total_nodes();
        let wce = make_rule(nodes, &k, &mu).map_or(f64::NAN, |rule| rule.wce());
        pairs.push((n, wce));
    }
    let usable: Vec<(usize, f64)> = pairs.iter().copied().filter(|p| p.1.is_finite() && p.1 > 1e-7).collect();
    let slope = if usable.len() >= 2 {
        let (a, b) = (usable[0], usable[usable.len() - 1]);
        (b.1.ln() - a.1.ln()) / ((b.0 as f64).ln() - (a.0 as f64).ln())
    } else {
        f64::NAN
    };
    outcome(
        slope < -2.0,
        format!(
            "(n, WCE) = {:?}; log-log slope over levels above the round-off floor {slope:.2} (n^-2 has slope -2)",
            pairs.iter().map(|(n, w)| format!("({n}, {w:.1e})")).collect::<Vec<_>>()
        ),
    )
}
