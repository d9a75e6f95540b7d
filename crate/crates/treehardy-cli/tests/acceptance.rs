//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Run with `cargo test -p treehardy-cli --test acceptance -- --nocapture`.

use std::process::Command;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treehardy::num::{rel_close, rel_le};
use treehardy::operator::{CompactnessVerdict, InvertibilityVerdict, IsometryVerdict};
use treehardy::oracle::{Distribution, SearchConfig};
use treehardy::report::AnalysisReport;
use treehardy::{
    apply, compactness_report, empirical_opnorm, fixed_point_support, growth_bound_margin,
    inclusion_witness, inequality_chain, invertibility_verdict, is_fixed_point, isometry_verdict,
    level_mean, opnorm_formula, tp_norm, verify_witness_equality, Exponent, RootedTree, SymbolGen,
    TreeFunction, VertexId,
};

const FINITE: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 3.0, 7.0];

fn fin(x: f64) -> Exponent {
    Exponent::Finite(x)
}

const INF: Exponent = Exponent::Infinity;

fn random_tree(rng: &mut ChaCha8Rng) -> Arc<RootedTree> {
    if rng.gen::<bool>() {
        let k = rng.gen_range(2..=4);
        let depth = rng.gen_range(3..=6);
        RootedTree::homogeneous(k, depth).unwrap().into_shared()
    } else {
        let depth = rng.gen_range(1..=5);
        let mut levels = Vec::new();
        let mut prev = 1usize;
        for _ in 0..depth {
            let size = rng.gen_range(1..=6);
            let level: Vec<usize> = (0..size).map(|_| rng.gen_range(0..prev)).collect();
            prev = size;
            levels.push(level);
        }
        RootedTree::from_parent_lists(levels).unwrap().into_shared()
    }
}

fn random_values(
    tree: &Arc<RootedTree>,
    rng: &mut ChaCha8Rng,
    max_depth: usize,
) -> TreeFunction {
    let values = (0..=tree.depth())
        .map(|n| {
            (0..tree.level_size(n) as usize)
                .map(|_| {
                    if n > max_depth {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let phase = rng.gen::<f64>() * std::f64::consts::TAU;
                        Complex64::from_polar(2.0 * rng.gen::<f64>(), phase)
                    }
                })
                .collect()
        })
        .collect();
    TreeFunction::from_values(Arc::clone(tree), values).unwrap()
}

fn ordered(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let i = rng.gen_range(0..FINITE.len() - 1);
    let j = rng.gen_range(i + 1..FINITE.len());
    (FINITE[i], FINITE[j])
}

#[test]
fn criterion_01_inequality_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..1000 {
        let tree = random_tree(&mut rng);
        let f = random_values(&tree, &mut rng, tree.depth());
        let (p, q) = ordered(&mut rng);
        let n = rng.gen_range(0..=tree.depth());
        let report = inequality_chain(&f, fin(p), fin(q), n).unwrap();
        for w in report.quantities.windows(2) {
            assert!(
                rel_le(w[0], w[1], 1e-12),
                "case {case}: chain violated at level {n}, p={p}, q={q}: {:?}",
                report.quantities
            );
        }
    }
    println!("criterion 1 (inequality chain, 1000 randomized instances at rel 1e-12): PASS");
}

#[test]
fn criterion_02_growth_estimate() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let ps = [0.5, 1.0, 2.0, 5.0];
    for case in 0..1000 {
        let tree = random_tree(&mut rng);
        let p = ps[rng.gen_range(0..ps.len())];
        let is_indicator = case % 5 == 0;
        let (f, marked) = if is_indicator {
            let level = rng.gen_range(0..=tree.depth());
            let index = rng.gen_range(0..tree.level_size(level) as usize);
            let v = VertexId::new(level, index);
            (
                TreeFunction::indicator(Arc::clone(&tree), v).unwrap(),
                Some(v),
            )
        } else {
            let support = tree.depth().saturating_sub(1);
            (random_values(&tree, &mut rng, support), None)
        };
        let norm = tp_norm(&f, fin(p)).value;
        for v in tree.vertices() {
            let margin = growth_bound_margin(&f, fin(p), v).unwrap();
            let scale = norm * tree.level_size_pow(v.level, 1.0 / p);
            assert!(
                margin >= -1e-12 * scale,
                "case {case}: margin {margin} below tolerance at {v} (p={p})"
            );
        }
        if let Some(v) = marked {
            let margin = growth_bound_margin(&f, fin(p), v).unwrap();
            let scale = (norm * tree.level_size_pow(v.level, 1.0 / p)).max(1.0);
            assert!(
                margin.abs() <= 1e-12 * scale,
                "case {case}: equality not attained for indicator at {v}: {margin}"
            );
        }
    }
    println!("criterion 2 (growth estimate, 1000 randomized f incl. indicator equality): PASS");
}

type CasePicker = Box<dyn Fn(&mut ChaCha8Rng) -> (Exponent, Exponent)>;

#[test]
fn criterion_03_norm_formula_vs_oracle_all_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let case_pairs: [(&str, CasePicker); 5] = [
        ("EQUAL", Box::new(|rng| {
            if rng.gen_range(0..4) == 0 {
                (INF, INF)
            } else {
                let p = FINITE[rng.gen_range(0..FINITE.len())];
                (fin(p), fin(p))
            }
        })),
        ("DOWN", Box::new(|rng| {
            let (lo, hi) = ordered(rng);
            (fin(hi), fin(lo))
        })),
        ("FROM_INF", Box::new(|rng| {
            (INF, fin(FINITE[rng.gen_range(0..FINITE.len())]))
        })),
        ("TO_INF", Box::new(|rng| {
            (fin(FINITE[rng.gen_range(0..FINITE.len())]), INF)
        })),
        ("UP", Box::new(|rng| {
            let (lo, hi) = ordered(rng);
            (fin(lo), fin(hi))
        })),
    ];
    for (label, pick) in &case_pairs {
        for case in 0..200 {
            let tree = random_tree(&mut rng);
            let (p, q) = pick(&mut rng);
            let support = tree.depth().saturating_sub(1);
            let psi = random_values(&tree, &mut rng, support);
            let formula = opnorm_formula(&psi, p, q).value;
            let cfg = SearchConfig {
                depth: tree.depth(),
                trials: 24,
                seed: rng.gen(),
                distribution: Distribution::SingleLevel,
            };
            let est = empirical_opnorm(&psi, p, q, &cfg).unwrap().value;
            assert!(
                (est - formula).abs() <= 1e-9 * formula.max(f64::MIN_POSITIVE),
                "{label} case {case}: empirical {est} vs formula {formula}"
            );
            assert!(
                rel_le(est, formula, 1e-9),
                "{label} case {case}: empirical exceeded formula"
            );
        }
    }
    println!(
        "criterion 3 (norm formula vs oracle, 5 cases x 200 symbols at rel 1e-9): PASS"
    );
}

#[test]
fn criterion_04_witness_equality_down() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut verified = 0;
    while verified < 500 {
        let tree = random_tree(&mut rng);
        let (lo, hi) = ordered(&mut rng);
        let (p, q) = (fin(hi), fin(lo));
        let psi = random_values(&tree, &mut rng, tree.depth());
        let n = rng.gen_range(0..=tree.depth());
        let check = verify_witness_equality(&psi, p, q, n, 1e-10).unwrap();
        if check.vacuous {
            continue;
        }
        assert!(
            check.holds,
            "witness equality failed: p={hi}, q={lo}, level {n}: {check:?}"
        );
        verified += 1;
    }
    println!("criterion 4 (DOWN witness equality, 500 instances at rel 1e-10): PASS");
}

#[test]
fn criterion_05_compactness_coherence() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    // Finitely supported symbols: compact-exact in all five regimes.
    let pairs = [
        (fin(2.0), fin(2.0)),
        (fin(3.0), fin(1.0)),
        (INF, fin(1.5)),
        (fin(0.5), INF),
        (fin(1.0), fin(7.0)),
    ];
    for case in 0..100 {
        let tree = random_tree(&mut rng);
        if tree.depth() == 0 {
            continue;
        }
        let psi = random_values(&tree, &mut rng, tree.depth() - 1);
        for (p, q) in pairs {
            let r = compactness_report(&psi, p, q, 4, 1e-9).unwrap();
            assert_eq!(
                r.verdict,
                CompactnessVerdict::CompactExact,
                "case {case} ({p}, {q})"
            );
        }
    }

    // psi = 1 in the EQUAL regime: bounded, not compact, tail max exactly 1.
    let tree = RootedTree::homogeneous(3, 8).unwrap().into_shared();
    let one = TreeFunction::constant(Arc::clone(&tree), Complex64::new(1.0, 0.0));
    let r = compactness_report(&one, fin(2.0), fin(2.0), 5, 1e-9).unwrap();
    assert_eq!(r.verdict, CompactnessVerdict::NotCompactEvidence);
    assert_eq!(r.tail_max, 1.0);

    // Level-power symbol tuned against TO_INF: b_n = 1 on every level.
    for p in [0.5, 1.0, 2.0, 5.0] {
        let psi = SymbolGen::LevelPower(-1.0 / p).build(&tree).unwrap();
        let r = compactness_report(&psi, fin(p), INF, 5, 1e-9).unwrap();
        let seq = treehardy::indicator_sequence(&psi, fin(p), INF);
        for (n, b) in seq.values.iter().enumerate() {
            assert!(
                (b - 1.0).abs() <= 1e-12,
                "b[{n}] = {b} departs from 1 (p={p})"
            );
        }
        assert_eq!(r.verdict, CompactnessVerdict::NotCompactEvidence);
        assert!(rel_close(opnorm_formula(&psi, fin(p), INF).value, 1.0, 1e-12));
    }
    println!("criterion 5 (compactness coherence: exact, constant, level-power): PASS");
}

#[test]
fn criterion_06_isometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let tree = RootedTree::homogeneous(3, 6).unwrap().into_shared();

    // Unit modulus with random phases: isometry in the EQUAL regime.
    for _ in 0..50 {
        let base = TreeFunction::zero(Arc::clone(&tree));
        let psi = base.map(|_, _| {
            Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
        });
        let p = fin(FINITE[rng.gen_range(0..FINITE.len())]);
        let r = isometry_verdict(&psi, p, p, 1e-9);
        assert_eq!(r.verdict, IsometryVerdict::Isometry);
    }

    // A single deviation of at least 1e-6 is detected and localized.
    for _ in 0..50 {
        let level = rng.gen_range(0..=tree.depth());
        let index = rng.gen_range(0..tree.level_size(level) as usize);
        let w = VertexId::new(level, index);
        let delta = 1e-6 * (1.0 + rng.gen::<f64>());
        let base = TreeFunction::zero(Arc::clone(&tree));
        let psi = base.map(|v, _| {
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            if v == w {
                Complex64::from_polar(1.0 + delta, phase)
            } else {
                Complex64::from_polar(1.0, phase)
            }
        });
        let r = isometry_verdict(&psi, fin(2.0), fin(2.0), 1e-9);
        assert_eq!(r.verdict, IsometryVerdict::NotIsometry);
        assert_eq!(r.offender, Some(w), "wrong offender reported");
        assert!(r.worst_deviation.unwrap() >= 1e-6);
    }

    // All four p != q regimes on a growing tree: impossible by theorem.
    let one = TreeFunction::constant(Arc::clone(&tree), Complex64::new(1.0, 0.0));
    let expectations = [
        (fin(2.0), INF, 1u8),
        (INF, fin(2.0), 2),
        (fin(2.0), fin(1.0), 3),
        (fin(1.0), fin(2.0), 4),
    ];
    for (p, q, case_no) in expectations {
        let r = isometry_verdict(&one, p, q, 1e-9);
        assert_eq!(r.verdict, IsometryVerdict::ImpossibleByTheorem);
        assert_eq!(r.theorem_case, Some(case_no));
    }
    println!("criterion 6 (isometry: unit modulus, offender detection, four impossibility cases): PASS");
}

#[test]
fn criterion_07_inclusion_witness() {
    let tree = RootedTree::homogeneous(3, 12).unwrap().into_shared();
    let f = inclusion_witness(fin(1.0), fin(4.0), 2.0, &tree).unwrap();
    let mut prev_m1 = f64::INFINITY;
    let mut prev_m4 = 0.0f64;
    for n in 1..=12usize {
        let c_n = 3.0 * 2f64.powi(n as i32 - 1);
        assert_eq!(tree.level_size(n) as f64, c_n);
        let m1 = level_mean(&f, fin(1.0), n).unwrap();
        let m4 = level_mean(&f, fin(4.0), n).unwrap();
        assert!(
            rel_close(m1, c_n.powf(-0.5), 1e-12),
            "M_1({n}) = {m1}, closed form {}",
            c_n.powf(-0.5)
        );
        assert!(
            rel_close(m4, c_n.powf(0.25), 1e-12),
            "M_4({n}) = {m4}, closed form {}",
            c_n.powf(0.25)
        );
        assert!(m1 < prev_m1, "M_1 not strictly decreasing at {n}");
        assert!(m4 > prev_m4, "M_4 not strictly increasing at {n}");
        prev_m1 = m1;
        prev_m4 = m4;
    }
    println!("criterion 7 (inclusion witness on 3-homogeneous depth 12 at rel 1e-12): PASS");
}

#[test]
fn criterion_08_fixed_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let tol = 1e-9;
    for case in 0..500 {
        let tree = random_tree(&mut rng);
        let base = TreeFunction::zero(Arc::clone(&tree));
        let psi = base.map(|_, _| {
            if rng.gen::<bool>() {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
                    + Complex64::from_polar(
                        1e-3 + rng.gen::<f64>(),
                        rng.gen::<f64>() * std::f64::consts::TAU,
                    )
            }
        });
        let f = random_values(&tree, &mut rng, tree.depth());
        let set = fixed_point_support(&psi, tol);
        let projected = set.project(&f);
        assert!(
            is_fixed_point(&psi, &projected, tol).unwrap(),
            "case {case}: projection is not fixed"
        );

        // Mass >= 1e-3 where the symbol deviates by >= 1e-3.
        let count = tree.vertex_count() as usize;
        let w = tree.vertices().nth(rng.gen_range(0..count)).unwrap();
        let dev = 1e-3 * (1.0 + rng.gen::<f64>());
        let psi_off = psi.map(|v, z| {
            if v == w {
                Complex64::new(1.0 + dev, 0.0)
            } else {
                z
            }
        });
        let mass = 1e-3 * (1.0 + rng.gen::<f64>());
        let f_on = f.map(|v, z| if v == w { Complex64::new(mass, 0.0) } else { z });
        assert!(
            !is_fixed_point(&psi_off, &f_on, tol).unwrap(),
            "case {case}: off-support mass reported fixed"
        );
    }
    println!("criterion 8 (fixed points, 500 projection/off-mass instances): PASS");
}

#[test]
fn criterion_09_inverse_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    for case in 0..200 {
        let tree = random_tree(&mut rng);
        let base = TreeFunction::zero(Arc::clone(&tree));
        let psi = base.map(|_, _| {
            Complex64::from_polar(
                0.5 + 1.5 * rng.gen::<f64>(),
                rng.gen::<f64>() * std::f64::consts::TAU,
            )
        });
        let p = fin(FINITE[rng.gen_range(0..FINITE.len())]);
        let inv = invertibility_verdict(&psi, p, p, 1e-9);
        assert_eq!(
            inv.report.verdict,
            InvertibilityVerdict::InvertibleEvidence,
            "case {case}"
        );
        let inverse = inv.inverse.unwrap();

        let f = random_values(&tree, &mut rng, tree.depth());
        let back = apply(&inverse, &apply(&psi, &f).unwrap()).unwrap();
        for v in tree.vertices() {
            let orig = f.value(v).unwrap();
            let got = back.value(v).unwrap();
            assert!(
                (orig - got).norm() <= 1e-10 * orig.norm().max(1.0),
                "case {case}: round trip moved {v}"
            );
        }

        // Norm of the inverse operator vs sup 1/|psi| computed directly.
        let reported = opnorm_formula(&inverse, p, p).value;
        let direct = tree
            .vertices()
            .map(|v| 1.0 / psi.value(v).unwrap().norm())
            .fold(0.0, f64::max);
        assert!(
            rel_close(reported, direct, 1e-9),
            "case {case}: {reported} vs {direct}"
        );
    }
    println!("criterion 9 (inverse composition + inverse norm, 200 symbols): PASS");
}

#[test]
fn criterion_10_cli_determinism_and_round_trip() {
    let bin = env!("CARGO_BIN_EXE_treehardy");
    let args = [
        "analyze",
        "--homogeneous",
        "3",
        "--depth",
        "6",
        "--gen",
        "random,31",
        "--p",
        "2",
        "--q",
        "1",
        "--seed",
        "17",
        "--trials",
        "64",
        "--machine",
    ];
    let run = |args: &[&str]| {
        let out = Command::new(bin).args(args).output().expect("spawn");
        assert!(out.status.success(), "analyze failed: {out:?}");
        out.stdout
    };
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first, second, "machine output not byte-identical");

    let text = String::from_utf8(first).unwrap();
    let parsed: AnalysisReport = serde_json::from_str(&text).unwrap();
    let reserialized = serde_json::to_string_pretty(&parsed).unwrap();
    assert_eq!(
        text.trim_end(),
        reserialized,
        "round-trip serialization differs"
    );
    println!("criterion 10 (CLI determinism and machine round trip): PASS");
}
