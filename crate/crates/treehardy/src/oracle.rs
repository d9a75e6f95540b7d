//! Brute-force validation of the closed-form operator norms.
//!
//! The operator norm is `sup { ||psi f||_q / ||f||_p : f != 0 }`, so any
//! family of test functions yields a certified lower bound. The search
//! here combines random functions with the per-level proof witnesses; it
//! never reads the closed-form value it is used to check.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::function::{random_complex, TreeFunction};
use crate::hardy::tp_norm;
use crate::num::rel_close;
use crate::operator::{apply, indicator_sequence, witness_function};
use crate::tree::RootedTree;

/// How random test functions are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    /// Random values on every level up to the search depth, each level
    /// rescaled to unit maximum modulus.
    UnitSpherePerLevel,
    /// Random values on one randomly chosen level. Extremizers live on
    /// single levels, so this mode reaches them fastest.
    SingleLevel,
    /// A few randomly placed point masses.
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Deepest support level for test functions.
    pub depth: usize,
    pub trials: u64,
    pub seed: u64,
    pub distribution: Distribution,
}

impl SearchConfig {
    pub fn new(depth: usize, trials: u64, seed: u64) -> Self {
        SearchConfig {
            depth,
            trials,
            seed,
            distribution: Distribution::SingleLevel,
        }
    }
}

/// `||psi f||_q / ||f||_p`, both norms taken on the truncation.
pub fn ratio(psi: &TreeFunction, f: &TreeFunction, p: Exponent, q: Exponent) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::DegenerateInput);
    }
    let denominator = tp_norm(f, p).value;
    let numerator = tp_norm(&apply(psi, f)?, q).value;
    Ok(numerator / denominator)
}

/// Where the best ratio came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BestSource {
    WitnessLevel { level: usize },
    RandomTrial { trial: u64 },
    /// Nothing produced a nonzero ratio (for example a vanishing symbol).
    NoneFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalOpNorm {
    /// Best ratio found: a lower bound for the truncated operator norm.
    pub value: f64,
    pub source: BestSource,
    /// Set when no test function achieved a nonzero ratio.
    pub degenerate: bool,
}

/// Maximizes the ratio over `trials` random functions plus every level
/// witness up to `cfg.depth`. Deterministic in the seed: each trial uses
/// its own counter-derived stream, so the outcome does not depend on
/// evaluation order.
pub fn empirical_opnorm(
    psi: &TreeFunction,
    p: Exponent,
    q: Exponent,
    cfg: &SearchConfig,
) -> Result<EmpiricalOpNorm> {
    let tree = psi.tree();
    if cfg.trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    if cfg.depth > tree.depth() {
        return Err(Error::Parameter(format!(
            "search depth {} exceeds tree depth {}",
            cfg.depth,
            tree.depth()
        )));
    }
    let mut best = 0.0f64;
    let mut source = BestSource::NoneFound;
    for n in 0..=cfg.depth {
        let witness = match witness_function(psi, p, q, n) {
            Ok(w) => w,
            Err(Error::DegenerateWitness { .. }) => continue,
            Err(e) => return Err(e),
        };
        let r = ratio(psi, &witness, p, q)?;
        if r > best {
            best = r;
            source = BestSource::WitnessLevel { level: n };
        }
    }
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(trial + 1);
        let f = random_function(tree, &mut rng, cfg.distribution, cfg.depth);
        if f.is_zero() {
            continue;
        }
        let r = ratio(psi, &f, p, q)?;
        if r > best {
            best = r;
            source = BestSource::RandomTrial { trial };
        }
    }
    Ok(EmpiricalOpNorm {
        value: best,
        source,
        degenerate: best == 0.0,
    })
}

/// Checks that the level witness attains `b_n`:
/// `ratio(psi, witness_n) = b_n` within relative `tol`. Levels where
/// `b_n = 0` are vacuously true and flagged as such.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub holds: bool,
    pub vacuous: bool,
    pub observed_ratio: f64,
    pub expected: f64,
}

pub fn verify_witness_equality(
    psi: &TreeFunction,
    p: Exponent,
    q: Exponent,
    n: usize,
    tol: f64,
) -> Result<WitnessCheck> {
    let depth = psi.tree().depth();
    if n > depth {
        return Err(Error::LevelRange { level: n, depth });
    }
    let expected = indicator_sequence(psi, p, q).values[n];
    if expected == 0.0 {
        return Ok(WitnessCheck {
            holds: true,
            vacuous: true,
            observed_ratio: 0.0,
            expected,
        });
    }
    let witness = witness_function(psi, p, q, n)?;
    let observed_ratio = ratio(psi, &witness, p, q)?;
    Ok(WitnessCheck {
        holds: rel_close(observed_ratio, expected, tol),
        vacuous: false,
        observed_ratio,
        expected,
    })
}

/// Draws a random test function; shared by the search and the self-check
/// suites.
pub(crate) fn random_function(
    tree: &Arc<RootedTree>,
    rng: &mut impl Rng,
    distribution: Distribution,
    depth: usize,
) -> TreeFunction {
    let mut values: Vec<Vec<Complex64>> = tree
        .level_sizes()
        .iter()
        .map(|&c| vec![Complex64::new(0.0, 0.0); c as usize])
        .collect();
    match distribution {
        Distribution::UnitSpherePerLevel => {
            for level in values.iter_mut().take(depth + 1) {
                for z in level.iter_mut() {
                    *z = random_complex(rng);
                }
                let max = level.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if max > 0.0 {
                    for z in level.iter_mut() {
                        *z /= max;
                    }
                }
            }
        }
        Distribution::SingleLevel => {
            let n = rng.gen_range(0..=depth);
            for z in values[n].iter_mut() {
                *z = random_complex(rng);
            }
        }
        Distribution::Sparse => {
            for (n, level) in values.iter_mut().enumerate().take(depth + 1) {
                if n > 0 && !rng.gen::<bool>() {
                    continue;
                }
                let i = rng.gen_range(0..level.len());
                level[i] = random_complex(rng);
            }
        }
    }
    TreeFunction::from_values(Arc::clone(tree), values).expect("shape matches tree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::VertexId;
    use crate::operator::opnorm_formula;
    use crate::tree::RootedTree;

    const INF: Exponent = Exponent::Infinity;

    fn fin(x: f64) -> Exponent {
        Exponent::Finite(x)
    }

    fn tri_tree(depth: usize) -> Arc<RootedTree> {
        RootedTree::homogeneous(3, depth).unwrap().into_shared()
    }

    fn spike(tree: &Arc<RootedTree>) -> TreeFunction {
        TreeFunction::from_entries(
            Arc::clone(tree),
            &[(VertexId::new(1, 0), Complex64::new(3.0, 0.0))],
        )
        .unwrap()
    }

    #[test]
    fn ratio_examples() {
        let t = tri_tree(3);
        let one = TreeFunction::constant(Arc::clone(&t), Complex64::new(1.0, 0.0));
        let three = TreeFunction::constant(Arc::clone(&t), Complex64::new(0.0, 3.0));
        let f = TreeFunction::indicator(Arc::clone(&t), VertexId::new(2, 1)).unwrap();
        assert!(rel_close(ratio(&one, &f, fin(2.0), fin(2.0)).unwrap(), 1.0, 1e-13));
        assert!(rel_close(ratio(&three, &f, fin(0.5), fin(0.5)).unwrap(), 3.0, 1e-13));

        let psi = spike(&t);
        let g = spike(&t);
        let r = ratio(&psi, &g, fin(2.0), fin(1.0)).unwrap();
        assert!(rel_close(r, 3f64.sqrt(), 1e-13));

        let zero = TreeFunction::zero(t);
        assert!(matches!(
            ratio(&one, &zero, fin(1.0), fin(1.0)),
            Err(Error::DegenerateInput)
        ));
    }

    #[test]
    fn empirical_examples() {
        let t = tri_tree(4);
        let two = TreeFunction::constant(Arc::clone(&t), Complex64::new(2.0, 0.0));
        let cfg = SearchConfig::new(t.depth(), 32, 7);
        let est = empirical_opnorm(&two, fin(2.0), fin(2.0), &cfg).unwrap();
        assert!(rel_close(est.value, 2.0, 1e-12));
        assert!(!est.degenerate);

        let psi = spike(&t);
        let est = empirical_opnorm(&psi, fin(2.0), fin(1.0), &cfg).unwrap();
        assert!(rel_close(est.value, 3f64.sqrt(), 1e-12));
        assert_eq!(est.source, BestSource::WitnessLevel { level: 1 });

        let zero = TreeFunction::zero(Arc::clone(&t));
        let est = empirical_opnorm(&zero, fin(1.0), fin(2.0), &cfg).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.degenerate);

        assert!(empirical_opnorm(&two, fin(1.0), fin(1.0), &SearchConfig::new(2, 0, 0)).is_err());
        assert!(empirical_opnorm(&two, fin(1.0), fin(1.0), &SearchConfig::new(99, 5, 0)).is_err());
    }

    #[test]
    fn empirical_never_exceeds_formula() {
        let t = tri_tree(4);
        for (seed, (p, q)) in [
            (fin(2.0), fin(2.0)),
            (fin(2.0), fin(1.0)),
            (INF, fin(2.0)),
            (fin(2.0), INF),
            (fin(1.0), fin(2.0)),
        ]
        .into_iter()
        .enumerate()
        {
            let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
            let psi = random_function(&t, &mut rng, Distribution::UnitSpherePerLevel, 3);
            let formula = opnorm_formula(&psi, p, q).value;
            for dist in [
                Distribution::UnitSpherePerLevel,
                Distribution::SingleLevel,
                Distribution::Sparse,
            ] {
                let cfg = SearchConfig {
                    depth: t.depth(),
                    trials: 64,
                    seed: 11,
                    distribution: dist,
                };
                let est = empirical_opnorm(&psi, p, q, &cfg).unwrap();
                assert!(est.value <= formula * (1.0 + 1e-9), "{dist:?}");
                assert!(est.value >= formula * (1.0 - 1e-9), "{dist:?}");
            }
        }
    }

    #[test]
    fn determinism_bit_for_bit() {
        let t = tri_tree(4);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_function(&t, &mut rng, Distribution::UnitSpherePerLevel, 4);
        let cfg = SearchConfig::new(4, 50, 123);
        let a = empirical_opnorm(&psi, fin(1.0), fin(3.0), &cfg).unwrap();
        let b = empirical_opnorm(&psi, fin(1.0), fin(3.0), &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.source, b.source);
    }

    #[test]
    fn witness_equality_checks() {
        let t = tri_tree(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_function(&t, &mut rng, Distribution::UnitSpherePerLevel, 3);
        for n in 0..=3 {
            let check = verify_witness_equality(&psi, fin(3.0), fin(1.5), n, 1e-10).unwrap();
            assert!(check.holds, "level {n}: {check:?}");
            assert!(!check.vacuous);
        }
        // Vacuous on a level where the symbol vanishes.
        let spike = spike(&t);
        let check = verify_witness_equality(&spike, fin(3.0), fin(1.5), 2, 1e-10).unwrap();
        assert!(check.holds && check.vacuous);
    }

    #[test]
    fn witness_mutations() {
        let t = tri_tree(3);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let psi = random_function(&t, &mut rng, Distribution::UnitSpherePerLevel, 3);
        let (p, q) = (fin(3.0), fin(1.0));
        let n = 2;
        let b_n = indicator_sequence(&psi, p, q).values[n];

        // Scaling the witness leaves the ratio unchanged.
        let witness = witness_function(&psi, p, q, n).unwrap();
        let scaled = witness.scaled(Complex64::new(-7.5, 2.0));
        let r = ratio(&psi, &scaled, p, q).unwrap();
        assert!(rel_close(r, b_n, 1e-10));

        // Corrupting the construction exponent breaks the equality.
        let e = q.value().unwrap() / (p.value().unwrap() - q.value().unwrap());
        let corrupted = psi.map(|v, z| {
            if v.level == n {
                Complex64::new(z.norm().powf(e * 1.5), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let r = ratio(&psi, &corrupted, p, q).unwrap();
        assert!(!rel_close(r, b_n, 1e-6), "corrupted witness still matched: {r} vs {b_n}");
    }

    #[test]
    fn ratio_scale_invariance() {
        let t = tri_tree(3);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let psi = random_function(&t, &mut rng, Distribution::UnitSpherePerLevel, 3);
        let f = random_function(&t, &mut rng, Distribution::SingleLevel, 3);
        if f.is_zero() {
            return;
        }
        let base = ratio(&psi, &f, fin(1.5), fin(2.5)).unwrap();
        let scaled = ratio(&psi, &f.scaled(Complex64::new(0.0, -4.0)), fin(1.5), fin(2.5)).unwrap();
        assert!(rel_close(base, scaled, 1e-12));
    }
}
