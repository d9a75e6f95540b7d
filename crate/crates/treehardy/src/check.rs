//! Randomized self-check suites: the library's own invariants, runnable
//! against any tree from the command line.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::function::{random_complex, TreeFunction};
use crate::hardy::{growth_bound_margin, inequality_chain, tp_norm};
use crate::num::{rel_close, rel_le};
use crate::operator::{
    classify, fixed_point_support, is_fixed_point, opnorm_formula, OperatorCase,
};
use crate::oracle::{
    empirical_opnorm, random_function, verify_witness_equality, Distribution, SearchConfig,
};
use crate::tree::{RootedTree, VertexId};

const FINITE_PALETTE: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 3.0, 7.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub seed: u64,
    pub trials: u64,
    pub tol: f64,
    /// Testing hook: deliberately perturbs the expected values of the
    /// witness-equality suite so the harness provably can fail.
    pub corrupt: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 0,
            trials: 200,
            tol: 1e-9,
            corrupt: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: u64,
    pub failed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub suites: Vec<SuiteOutcome>,
    pub seed: u64,
    pub trials: u64,
}

impl CheckReport {
    pub fn total_failed(&self) -> u64 {
        self.suites.iter().map(|s| s.failed).sum()
    }
}

fn suite_rng(seed: u64, suite: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x1000 + suite);
    rng
}

fn pick_finite(rng: &mut impl Rng) -> Exponent {
    Exponent::Finite(FINITE_PALETTE[rng.gen_range(0..FINITE_PALETTE.len())])
}

fn pick_ordered(rng: &mut impl Rng) -> (Exponent, Exponent) {
    let i = rng.gen_range(0..FINITE_PALETTE.len() - 1);
    let j = rng.gen_range(i + 1..FINITE_PALETTE.len());
    (
        Exponent::Finite(FINITE_PALETTE[i]),
        Exponent::Finite(FINITE_PALETTE[j]),
    )
}

fn pick_case(rng: &mut impl Rng) -> (Exponent, Exponent) {
    match rng.gen_range(0..6) {
        0 => {
            let p = pick_finite(rng);
            (p, p)
        }
        1 => (Exponent::Infinity, Exponent::Infinity),
        2 => {
            let (lo, hi) = pick_ordered(rng);
            (hi, lo)
        }
        3 => (Exponent::Infinity, pick_finite(rng)),
        4 => (pick_finite(rng), Exponent::Infinity),
        _ => pick_ordered(rng),
    }
}

/// Random function supported within `max_depth`.
fn random_supported(
    tree: &Arc<RootedTree>,
    rng: &mut impl Rng,
    max_depth: usize,
) -> TreeFunction {
    let dist = match rng.gen_range(0..3) {
        0 => Distribution::UnitSpherePerLevel,
        1 => Distribution::SingleLevel,
        _ => Distribution::Sparse,
    };
    random_function(tree, rng, dist, max_depth)
}

fn run_inequality_chain(tree: &Arc<RootedTree>, cfg: &CheckConfig) -> SuiteOutcome {
    let mut rng = suite_rng(cfg.seed, 1);
    let mut outcome = SuiteOutcome {
        name: "inequality-chain".into(),
        passed: 0,
        failed: 0,
    };
    for _ in 0..cfg.trials {
        let f = random_supported(tree, &mut rng, tree.depth());
        let (p, q) = pick_ordered(&mut rng);
        let n = rng.gen_range(0..=tree.depth());
        let ok = inequality_chain(&f, p, q, n)
            .map(|r| r.holds)
            .unwrap_or(false);
        if ok {
            outcome.passed += 1;
        } else {
            outcome.failed += 1;
        }
    }
    outcome
}

fn run_growth_bound(tree: &Arc<RootedTree>, cfg: &CheckConfig) -> SuiteOutcome {
    let mut rng = suite_rng(cfg.seed, 2);
    let mut outcome = SuiteOutcome {
        name: "growth-bound".into(),
        passed: 0,
        failed: 0,
    };
    let ps = [0.5, 1.0, 2.0, 5.0];
    for trial in 0..cfg.trials {
        let p = Exponent::Finite(ps[rng.gen_range(0..ps.len())]);
        let support = rng.gen_range(0..=tree.depth());
        let (f, equality_at) = if trial % 5 == 0 {
            let level = support;
            let index = rng.gen_range(0..tree.level_size(level) as usize);
            let v = VertexId::new(level, index);
            (
                TreeFunction::indicator(Arc::clone(tree), v).expect("vertex in tree"),
                Some(v),
            )
        } else {
            (random_supported(tree, &mut rng, support), None)
        };
        if f.is_zero() {
            outcome.passed += 1;
            continue;
        }
        let norm = tp_norm(&f, p).value;
        let mut ok = true;
        for v in tree.vertices() {
            let margin = growth_bound_margin(&f, p, v).expect("materialized");
            let scale = norm * tree.level_size_pow(v.level, p.recip());
            if margin < -1e-12 * scale {
                ok = false;
                break;
            }
        }
        if let Some(v) = equality_at {
            let margin = growth_bound_margin(&f, p, v).expect("materialized");
            let scale = norm * tree.level_size_pow(v.level, p.recip());
            if margin > 1e-12 * scale.max(1.0) {
                ok = false;
            }
        }
        if ok {
            outcome.passed += 1;
        } else {
            outcome.failed += 1;
        }
    }
    outcome
}

fn run_witness_equality(tree: &Arc<RootedTree>, cfg: &CheckConfig) -> SuiteOutcome {
    let mut rng = suite_rng(cfg.seed, 3);
    let mut outcome = SuiteOutcome {
        name: "witness-equality".into(),
        passed: 0,
        failed: 0,
    };
    for _ in 0..cfg.trials {
        let (p, q) = pick_case(&mut rng);
        let support = rng.gen_range(0..=tree.depth());
        let psi = random_supported(tree, &mut rng, support);
        let n = rng.gen_range(0..=tree.depth());
        let tol = if classify(p, q) == OperatorCase::Down {
            1e-10
        } else {
            1e-9
        };
        let ok = match verify_witness_equality(&psi, p, q, n, tol) {
            Ok(check) if cfg.corrupt => {
                check.vacuous
                    || rel_close(check.observed_ratio, check.expected * (1.0 + 1e-3), tol)
            }
            Ok(check) => check.holds,
            Err(_) => false,
        };
        if ok {
            outcome.passed += 1;
        } else {
            outcome.failed += 1;
        }
    }
    outcome
}

fn run_oracle_bounds(tree: &Arc<RootedTree>, cfg: &CheckConfig) -> SuiteOutcome {
    let mut rng = suite_rng(cfg.seed, 4);
    let mut outcome = SuiteOutcome {
        name: "oracle-bounds".into(),
        passed: 0,
        failed: 0,
    };
    let dists = [
        Distribution::UnitSpherePerLevel,
        Distribution::SingleLevel,
        Distribution::Sparse,
    ];
    for trial in 0..cfg.trials {
        let (p, q) = pick_case(&mut rng);
        let support = tree.depth().saturating_sub(1);
        let psi = random_supported(tree, &mut rng, support);
        let search = SearchConfig {
            depth: tree.depth(),
            trials: 8,
            seed: cfg.seed ^ (trial << 8),
            distribution: dists[(trial % 3) as usize],
        };
        let formula = opnorm_formula(&psi, p, q).value;
        let ok = match empirical_opnorm(&psi, p, q, &search) {
            Ok(est) => {
                rel_le(est.value, formula, 1e-9) && rel_le(formula, est.value, 1e-9)
            }
            Err(_) => false,
        };
        if ok {
            outcome.passed += 1;
        } else {
            outcome.failed += 1;
        }
    }
    outcome
}

fn run_fixed_point(tree: &Arc<RootedTree>, cfg: &CheckConfig) -> SuiteOutcome {
    let mut rng = suite_rng(cfg.seed, 5);
    let mut outcome = SuiteOutcome {
        name: "fixed-point".into(),
        passed: 0,
        failed: 0,
    };
    for _ in 0..cfg.trials {
        // Symbol close to 1 on roughly half the vertices, clearly off 1
        // somewhere else.
        let base = TreeFunction::constant(Arc::clone(tree), Complex64::new(1.0, 0.0));
        let psi = base.map(|_, one| {
            if rng.gen::<bool>() {
                one
            } else {
                one + random_complex(&mut rng)
            }
        });
        let f = random_supported(tree, &mut rng, tree.depth());
        let set = fixed_point_support(&psi, cfg.tol);
        let projected = set.project(&f);
        let mut ok = is_fixed_point(&psi, &projected, cfg.tol).expect("same tree");

        // Force mass on a vertex where the symbol is far from 1.
        let count = tree.vertex_count() as usize;
        let pick = rng.gen_range(0..count);
        let w = tree.vertices().nth(pick).expect("in range");
        let psi_off = psi.map(|v, z| {
            if v == w {
                Complex64::new(1.0 + 0.01 + rng.gen::<f64>(), 0.0)
            } else {
                z
            }
        });
        let f_on = f.map(|v, z| if v == w { Complex64::new(1.0, 0.0) } else { z });
        if is_fixed_point(&psi_off, &f_on, cfg.tol).expect("same tree") {
            ok = false;
        }
        if ok {
            outcome.passed += 1;
        } else {
            outcome.failed += 1;
        }
    }
    outcome
}

/// Runs every suite against one tree. Deterministic in the seed.
pub fn run_suites(tree: &Arc<RootedTree>, cfg: &CheckConfig) -> Result<CheckReport> {
    if cfg.trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let suites = vec![
        run_inequality_chain(tree, cfg),
        run_growth_bound(tree, cfg),
        run_witness_equality(tree, cfg),
        run_oracle_bounds(tree, cfg),
        run_fixed_point(tree, cfg),
    ];
    Ok(CheckReport {
        suites,
        seed: cfg.seed,
        trials: cfg.trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_homogeneous_tree() {
        let tree = RootedTree::homogeneous(3, 4).unwrap().into_shared();
        let cfg = CheckConfig {
            trials: 40,
            ..CheckConfig::default()
        };
        let report = run_suites(&tree, &cfg).unwrap();
        assert_eq!(report.suites.len(), 5);
        for suite in &report.suites {
            assert_eq!(suite.failed, 0, "{}: {suite:?}", suite.name);
            assert_eq!(suite.passed, 40);
        }
    }

    #[test]
    fn corruption_hook_fails() {
        let tree = RootedTree::homogeneous(3, 3).unwrap().into_shared();
        let cfg = CheckConfig {
            trials: 30,
            corrupt: true,
            ..CheckConfig::default()
        };
        let report = run_suites(&tree, &cfg).unwrap();
        assert!(report.total_failed() >= 1);
    }

    #[test]
    fn zero_trials_rejected() {
        let tree = RootedTree::homogeneous(2, 2).unwrap().into_shared();
        let cfg = CheckConfig {
            trials: 0,
            ..CheckConfig::default()
        };
        assert!(matches!(
            run_suites(&tree, &cfg),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn determinism() {
        let tree = RootedTree::homogeneous(3, 3).unwrap().into_shared();
        let cfg = CheckConfig {
            trials: 10,
            seed: 42,
            ..CheckConfig::default()
        };
        let a = run_suites(&tree, &cfg).unwrap();
        let b = run_suites(&tree, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
