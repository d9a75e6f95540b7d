//! Randomized invariants: the structural lemmas behind the library, on
//! arbitrary trees and functions.

use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treehardy::hardy::naive_level_mean;
use treehardy::num::{rel_close, rel_le};
use treehardy::operator::{
    CompactnessVerdict, InvertibilityVerdict,
};
use treehardy::oracle::{Distribution, SearchConfig};
use treehardy::report::Exactness;
use treehardy::{
    apply, classify, compactness_report, empirical_opnorm, fixed_point_support, growth_bound_margin,
    inequality_chain, invertibility_verdict, is_fixed_point, level_mean, opnorm_formula, ratio,
    tp_norm, verify_witness_equality, witness_function, Exponent, OperatorCase, RootedTree,
    TreeFunction, VertexId,
};

const FINITE: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 3.0, 7.0];

fn arb_tree() -> impl Strategy<Value = Arc<RootedTree>> {
    prop::collection::vec(prop::collection::vec(any::<u32>(), 1..=5), 0..=5).prop_map(|raw| {
        let mut levels: Vec<Vec<usize>> = Vec::with_capacity(raw.len());
        let mut prev = 1usize;
        for level in raw {
            let size = level.len();
            levels.push(level.into_iter().map(|r| r as usize % prev).collect());
            prev = size;
        }
        RootedTree::from_parent_lists(levels)
            .expect("indices are reduced modulo the level above")
            .into_shared()
    })
}

/// Deterministic random function from a seed; support limited to
/// `max_depth`.
fn seeded_function(tree: &Arc<RootedTree>, seed: u64, max_depth: usize) -> TreeFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..=tree.depth())
        .map(|n| {
            (0..tree.level_size(n) as usize)
                .map(|_| {
                    if n > max_depth {
                        Complex64::new(0.0, 0.0)
                    } else {
                        let phase = rng.gen::<f64>() * std::f64::consts::TAU;
                        let modulus = 2.0 * rng.gen::<f64>();
                        Complex64::from_polar(modulus, phase)
                    }
                })
                .collect()
        })
        .collect();
    TreeFunction::from_values(Arc::clone(tree), values).expect("shape matches")
}

fn fin(x: f64) -> Exponent {
    Exponent::Finite(x)
}

fn ordered_pair(i: usize, j: usize) -> (f64, f64) {
    let i = i % (FINITE.len() - 1);
    let j = i + 1 + j % (FINITE.len() - 1 - i);
    (FINITE[i], FINITE[j])
}

proptest! {
    /// M_p <= M_q <= M_inf for p < q, and the reverse bound
    /// M_q <= c_n^{1/p - 1/q} M_p, on every level.
    #[test]
    fn level_mean_monotone_in_p(
        tree in arb_tree(),
        seed in any::<u64>(),
        i in 0usize..8,
        j in 0usize..8,
    ) {
        let f = seeded_function(&tree, seed, tree.depth());
        let (p, q) = ordered_pair(i, j);
        for n in 0..=tree.depth() {
            let mp = level_mean(&f, fin(p), n).unwrap();
            let mq = level_mean(&f, fin(q), n).unwrap();
            let minf = level_mean(&f, Exponent::Infinity, n).unwrap();
            prop_assert!(rel_le(mp, mq, 1e-12));
            prop_assert!(rel_le(mq, minf, 1e-12));
            let reverse = tree.level_size_pow(n, 1.0 / p - 1.0 / q) * mp;
            prop_assert!(rel_le(mq, reverse, 1e-12));
        }
    }

    /// The full five-quantity chain holds on random data.
    #[test]
    fn chain_holds(
        tree in arb_tree(),
        seed in any::<u64>(),
        i in 0usize..8,
        j in 0usize..8,
        n_pick in any::<u32>(),
    ) {
        let f = seeded_function(&tree, seed, tree.depth());
        let (p, q) = ordered_pair(i, j);
        let n = n_pick as usize % (tree.depth() + 1);
        let report = inequality_chain(&f, fin(p), fin(q), n).unwrap();
        prop_assert!(report.holds, "chain failed: {:?}", report.quantities);
    }

    /// Growth bound: margins non-negative at every vertex, up to scaled
    /// roundoff.
    #[test]
    fn growth_margin_nonnegative(
        tree in arb_tree(),
        seed in any::<u64>(),
        pi in 0usize..4,
    ) {
        let p = [0.5, 1.0, 2.0, 5.0][pi];
        let f = seeded_function(&tree, seed, tree.depth());
        let norm = tp_norm(&f, fin(p)).value;
        for v in tree.vertices() {
            let margin = growth_bound_margin(&f, fin(p), v).unwrap();
            let scale = norm * tree.level_size_pow(v.level, 1.0 / p);
            prop_assert!(margin >= -1e-12 * scale, "margin {margin} at {v}");
        }
    }

    /// Absolute homogeneity of the truncated norm, all exponents.
    #[test]
    fn norm_scaling(
        tree in arb_tree(),
        seed in any::<u64>(),
        i in 0usize..7,
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
    ) {
        let exponents = [
            fin(0.5), fin(1.0), fin(1.5), fin(2.0), fin(3.0), fin(7.0),
            Exponent::Infinity,
        ];
        let p = exponents[i];
        let f = seeded_function(&tree, seed, tree.depth());
        let lambda = Complex64::new(re, im);
        let lhs = tp_norm(&f.scaled(lambda), p).value;
        let rhs = lambda.norm() * tp_norm(&f, p).value;
        prop_assert!(rel_close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    /// Triangle inequality for p >= 1. Deliberately not asserted for
    /// p < 1, where the level mean is only a quasi-norm.
    #[test]
    fn triangle_inequality_for_p_at_least_one(
        tree in arb_tree(),
        seed_f in any::<u64>(),
        seed_g in any::<u64>(),
        i in 0usize..5,
    ) {
        let exponents = [fin(1.0), fin(1.5), fin(2.0), fin(7.0), Exponent::Infinity];
        let p = exponents[i];
        let f = seeded_function(&tree, seed_f, tree.depth());
        let g = seeded_function(&tree, seed_g, tree.depth());
        let sum = f.try_add(&g).unwrap();
        let lhs = tp_norm(&sum, p).value;
        let rhs = tp_norm(&f, p).value + tp_norm(&g, p).value;
        prop_assert!(rel_le(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    /// Max-rescaled level means agree with the naive formula on
    /// well-scaled inputs.
    #[test]
    fn rescaled_mean_matches_naive(
        tree in arb_tree(),
        seed in any::<u64>(),
        i in 0usize..6,
    ) {
        let p = fin(FINITE[i]);
        let f = seeded_function(&tree, seed, tree.depth());
        for n in 0..=tree.depth() {
            let fast = level_mean(&f, p, n).unwrap();
            let slow = naive_level_mean(&f, p, n).unwrap();
            prop_assert!(rel_close(fast, slow, 1e-12), "{fast} vs {slow}");
        }
    }

    /// Exporting parent lists and rebuilding is the identity.
    #[test]
    fn parent_list_round_trip(tree in arb_tree()) {
        let rebuilt = RootedTree::from_parent_lists(tree.parent_lists().to_vec()).unwrap();
        prop_assert_eq!(rebuilt, (*tree).clone());
        prop_assert!(tree.validate().is_empty());
    }

    /// Any single corruption of a valid tree is caught by validation.
    #[test]
    fn single_corruption_detected(
        tree in arb_tree(),
        which in any::<u32>(),
    ) {
        prop_assume!(tree.depth() >= 1);
        let mut sizes = tree.level_sizes().to_vec();
        let mut parents = tree.parent_lists().to_vec();
        match which % 3 {
            0 => sizes[0] = 2,
            1 => {
                let n = which as usize % parents.len();
                parents[n].push(usize::MAX);
            }
            _ => {
                let n = which as usize % sizes.len();
                sizes[n] += 1;
            }
        }
        let corrupted = RootedTree::from_raw_parts(sizes, parents);
        prop_assert!(!corrupted.validate().is_empty());
    }

    /// classify is total and assigns exactly one regime.
    #[test]
    fn classify_total_and_unique(
        pi in 0usize..7,
        qi in 0usize..7,
    ) {
        let exps = [
            fin(0.5), fin(1.0), fin(1.5), fin(2.0), fin(3.0), fin(7.0),
            Exponent::Infinity,
        ];
        let (p, q) = (exps[pi], exps[qi]);
        let case = classify(p, q);
        let expected = match (p.value(), q.value()) {
            (None, None) => OperatorCase::Equal,
            (None, Some(_)) => OperatorCase::FromInf,
            (Some(_), None) => OperatorCase::ToInf,
            (Some(pv), Some(qv)) if pv == qv => OperatorCase::Equal,
            (Some(pv), Some(qv)) if qv < pv => OperatorCase::Down,
            _ => OperatorCase::Up,
        };
        prop_assert_eq!(case, expected);
    }

    /// Witnesses attain the indicator values; nothing sampled beats the
    /// closed form; witness levels make the search tight.
    #[test]
    fn norm_formula_consistency(
        tree in arb_tree(),
        seed in any::<u64>(),
        case_pick in 0usize..5,
    ) {
        prop_assume!(tree.depth() >= 1);
        let support = tree.depth() - 1;
        let psi = seeded_function(&tree, seed, support);
        let (p, q) = match case_pick {
            0 => (fin(2.0), fin(2.0)),
            1 => (fin(3.0), fin(1.5)),
            2 => (Exponent::Infinity, fin(2.0)),
            3 => (fin(0.5), Exponent::Infinity),
            _ => (fin(1.0), fin(3.0)),
        };
        let formula = opnorm_formula(&psi, p, q);
        prop_assert_eq!(formula.exactness, Exactness::Exact);

        let cfg = SearchConfig {
            depth: tree.depth(),
            trials: 16,
            seed,
            distribution: Distribution::SingleLevel,
        };
        let est = empirical_opnorm(&psi, p, q, &cfg).unwrap();
        prop_assert!(rel_le(est.value, formula.value, 1e-9));
        prop_assert!(rel_le(formula.value, est.value, 1e-9));
    }

    /// The witness identity of the q < p regime at tight tolerance.
    #[test]
    fn down_witness_identity(
        tree in arb_tree(),
        seed in any::<u64>(),
        i in 0usize..8,
        j in 0usize..8,
    ) {
        let (qv, pv) = ordered_pair(i, j);
        let psi = seeded_function(&tree, seed, tree.depth());
        for n in 0..=tree.depth() {
            let check = verify_witness_equality(&psi, fin(pv), fin(qv), n, 1e-10).unwrap();
            prop_assert!(check.holds, "level {n}: {check:?}");
        }
    }

    /// Finitely supported symbols are compact-exact in every regime, and
    /// bounded with the same indicator data.
    #[test]
    fn compactness_boundedness_coherence(
        tree in arb_tree(),
        seed in any::<u64>(),
        case_pick in 0usize..5,
    ) {
        prop_assume!(tree.depth() >= 1);
        let psi = seeded_function(&tree, seed, tree.depth() - 1);
        let (p, q) = match case_pick {
            0 => (Exponent::Infinity, Exponent::Infinity),
            1 => (fin(2.0), fin(0.5)),
            2 => (Exponent::Infinity, fin(1.0)),
            3 => (fin(3.0), Exponent::Infinity),
            _ => (fin(1.5), fin(2.0)),
        };
        let report = compactness_report(&psi, p, q, 3, 1e-9).unwrap();
        prop_assert_eq!(report.verdict, CompactnessVerdict::CompactExact);
        let formula = opnorm_formula(&psi, p, q);
        prop_assert!(formula.value.is_finite());
        prop_assert_eq!(formula.exactness, Exactness::Exact);
    }

    /// Projection onto the fixed-point support always yields a fixed
    /// point; visible mass where the symbol is far from 1 never does.
    #[test]
    fn fixed_point_equivalence(
        tree in arb_tree(),
        seed in any::<u64>(),
        vertex_pick in any::<u32>(),
    ) {
        let tol = 1e-9;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = TreeFunction::constant(Arc::clone(&tree), Complex64::new(1.0, 0.0));
        let psi = base.map(|_, one| {
            if rng.gen::<bool>() {
                one
            } else {
                one + Complex64::new(0.5 + rng.gen::<f64>(), 0.0)
            }
        });
        let f = seeded_function(&tree, seed ^ 0xABCD, tree.depth());
        let set = fixed_point_support(&psi, tol);
        let projected = set.project(&f);
        prop_assert!(is_fixed_point(&psi, &projected, tol).unwrap());

        let count = tree.vertex_count() as usize;
        let w = tree.vertices().nth(vertex_pick as usize % count).unwrap();
        let psi_off = psi.map(|v, z| {
            if v == w { Complex64::new(1.5, 0.0) } else { z }
        });
        let f_on = f.map(|v, z| {
            if v == w { Complex64::new(1.0, 0.0) } else { z }
        });
        prop_assert!(!is_fixed_point(&psi_off, &f_on, tol).unwrap());
    }

    /// M_psi is linear in f.
    #[test]
    fn apply_is_linear(
        tree in arb_tree(),
        s1 in any::<u64>(),
        s2 in any::<u64>(),
        s3 in any::<u64>(),
        a_re in -2.0f64..2.0,
        b_im in -2.0f64..2.0,
    ) {
        let psi = seeded_function(&tree, s1, tree.depth());
        let f = seeded_function(&tree, s2, tree.depth());
        let g = seeded_function(&tree, s3, tree.depth());
        let alpha = Complex64::new(a_re, 0.7);
        let beta = Complex64::new(-0.3, b_im);
        let combo = f.scaled(alpha).try_add(&g.scaled(beta)).unwrap();
        let lhs = apply(&psi, &combo).unwrap();
        let rhs = apply(&psi, &f)
            .unwrap()
            .scaled(alpha)
            .try_add(&apply(&psi, &g).unwrap().scaled(beta))
            .unwrap();
        for v in tree.vertices() {
            let l = lhs.value(v).unwrap();
            let r = rhs.value(v).unwrap();
            let scale = l.norm().max(r.norm()).max(1.0);
            prop_assert!((l - r).norm() <= 1e-12 * scale);
        }
    }

    /// Where invertibility evidence holds, composing with the inverse
    /// symbol is the identity.
    #[test]
    fn inverse_composition(
        tree in arb_tree(),
        seed in any::<u64>(),
        f_seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = TreeFunction::zero(Arc::clone(&tree));
        let psi = base.map(|_, _| {
            let phase = rng.gen::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(0.5 + 1.5 * rng.gen::<f64>(), phase)
        });
        let inv = invertibility_verdict(&psi, fin(2.0), fin(2.0), 1e-9);
        prop_assert_eq!(inv.report.verdict, InvertibilityVerdict::InvertibleEvidence);
        let inverse = inv.inverse.unwrap();
        let f = seeded_function(&tree, f_seed, tree.depth());
        let back = apply(&inverse, &apply(&psi, &f).unwrap()).unwrap();
        for v in tree.vertices() {
            let orig = f.value(v).unwrap();
            let got = back.value(v).unwrap();
            let scale = orig.norm().max(1.0);
            prop_assert!((orig - got).norm() <= 1e-10 * scale);
        }
    }

    /// Ratio is invariant under scaling of the test function.
    #[test]
    fn ratio_scale_invariant(
        tree in arb_tree(),
        s1 in any::<u64>(),
        s2 in any::<u64>(),
        re in 0.1f64..4.0,
        im in -4.0f64..4.0,
    ) {
        let psi = seeded_function(&tree, s1, tree.depth());
        let f = seeded_function(&tree, s2, tree.depth());
        prop_assume!(!f.is_zero());
        let lambda = Complex64::new(re, im);
        let base = ratio(&psi, &f, fin(1.5), fin(3.0)).unwrap();
        let scaled = ratio(&psi, &f.scaled(lambda), fin(1.5), fin(3.0)).unwrap();
        prop_assert!(rel_close(base, scaled, 1e-12));
    }

    /// Witnesses always have unit source-space norm.
    #[test]
    fn witness_unit_norm(
        tree in arb_tree(),
        seed in any::<u64>(),
        case_pick in 0usize..5,
    ) {
        let psi = seeded_function(&tree, seed, tree.depth());
        let (p, q) = match case_pick {
            0 => (fin(1.0), fin(1.0)),
            1 => (fin(7.0), fin(2.0)),
            2 => (Exponent::Infinity, fin(0.5)),
            3 => (fin(2.0), Exponent::Infinity),
            _ => (fin(0.5), fin(3.0)),
        };
        for n in 0..=tree.depth() {
            match witness_function(&psi, p, q, n) {
                Ok(w) => {
                    let norm = tp_norm(&w, p).value;
                    prop_assert!(rel_close(norm, 1.0, 1e-12), "norm {norm} at level {n}");
                    prop_assert_eq!(w.support_depth(), n);
                }
                Err(treehardy::Error::DegenerateWitness { .. }) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}

#[test]
fn zero_function_edge_cases() {
    let tree = RootedTree::homogeneous(3, 3).unwrap().into_shared();
    let zero = TreeFunction::zero(Arc::clone(&tree));
    assert_eq!(tp_norm(&zero, fin(0.5)).value, 0.0);
    assert_eq!(tp_norm(&zero, Exponent::Infinity).value, 0.0);
    let chain = inequality_chain(&zero, fin(1.0), fin(2.0), 2).unwrap();
    assert!(chain.holds);
    let margin = growth_bound_margin(&zero, fin(2.0), VertexId::new(3, 5)).unwrap();
    assert_eq!(margin, 0.0);
}
