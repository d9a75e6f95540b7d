//! Multiplication operators `M_psi f = psi * f` between `T_p` and `T_q`.
//!
//! Every boundedness, norm, and compactness statement here reduces to one
//! per-level indicator sequence `b_n` whose truncated supremum is the
//! operator norm and whose vanishing along levels characterizes
//! compactness:
//!
//! | regime                        | `b_n`                              |
//! |-------------------------------|------------------------------------|
//! | `p = q` (including both inf)  | `M_inf(n, psi)`                    |
//! | `q < p < inf`                 | `M_{pq/(p-q)}(n, psi)`             |
//! | `p = inf, q < inf`            | `M_q(n, psi)`                      |
//! | `p < inf, q = inf`            | `c_n^{1/p} * M_inf(n, psi)`        |
//! | `p < q < inf`                 | `c_n^{1/p - 1/q} * M_inf(n, psi)`  |
//!
//! Each level value is attained by an explicit witness function supported
//! on that level, so the closed forms are checkable against a search that
//! never uses them.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::function::{ensure_same_tree, TreeFunction};
use crate::hardy::level_mean;
use crate::report::Exactness;
use crate::tree::VertexId;

/// The exponent regime of an operator `M_psi: T_p -> T_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OperatorCase {
    /// `p = q`, both finite-equal or both infinite.
    Equal,
    /// `0 < q < p < inf`.
    Down,
    /// `p = inf`, `q` finite.
    FromInf,
    /// `p` finite, `q = inf`.
    ToInf,
    /// `0 < p < q < inf`.
    Up,
}

impl OperatorCase {
    pub fn label(self) -> &'static str {
        match self {
            OperatorCase::Equal => "EQUAL",
            OperatorCase::Down => "DOWN",
            OperatorCase::FromInf => "FROM_INF",
            OperatorCase::ToInf => "TO_INF",
            OperatorCase::Up => "UP",
        }
    }

    /// One-line statement of the norm rule governing the regime.
    pub fn rule(self) -> &'static str {
        match self {
            OperatorCase::Equal => "operator norm = sup |psi| (levelwise max of the symbol)",
            OperatorCase::Down => {
                "operator norm = symbol norm with exponent pq/(p-q)"
            }
            OperatorCase::FromInf => "operator norm = symbol norm with the target exponent q",
            OperatorCase::ToInf => "operator norm = sup c_n^{1/p} * M_inf(n, psi)",
            OperatorCase::Up => "operator norm = sup c_n^{1/p - 1/q} * M_inf(n, psi)",
        }
    }
}

/// Total, mutually exclusive classification of a valid `(p, q)` pair.
pub fn classify(p: Exponent, q: Exponent) -> OperatorCase {
    match (p, q) {
        (Exponent::Infinity, Exponent::Infinity) => OperatorCase::Equal,
        (Exponent::Infinity, Exponent::Finite(_)) => OperatorCase::FromInf,
        (Exponent::Finite(_), Exponent::Infinity) => OperatorCase::ToInf,
        (Exponent::Finite(pv), Exponent::Finite(qv)) => {
            if pv == qv {
                OperatorCase::Equal
            } else if qv < pv {
                OperatorCase::Down
            } else {
                OperatorCase::Up
            }
        }
    }
}

/// `pq / (p - q)` for the `q < p` regime.
pub fn down_exponent(p: Exponent, q: Exponent) -> Result<f64> {
    match (p, q) {
        (Exponent::Finite(pv), Exponent::Finite(qv)) if qv < pv => Ok(pv * qv / (pv - qv)),
        _ => Err(Error::ExponentOrder {
            requirement: "requires q < p, both finite",
        }),
    }
}

/// Pointwise product `psi * f`.
pub fn apply(psi: &TreeFunction, f: &TreeFunction) -> Result<TreeFunction> {
    ensure_same_tree(psi, f)?;
    Ok(f.map(|v, z| psi.value(v).expect("same tree") * z))
}

/// The per-level indicator sequence of an operator, with its truncated
/// supremum.
#[derive(Debug, Clone)]
pub struct IndicatorSequence {
    pub case: OperatorCase,
    /// `b_0 ..= b_depth`.
    pub values: Vec<f64>,
    /// `max(values)`; the truncated operator norm.
    pub sup: f64,
    /// First level attaining the supremum.
    pub argmax_level: usize,
    /// Exact when the symbol is finitely supported within the truncation
    /// (all deeper `b_n` vanish), otherwise a lower bound.
    pub exactness: Exactness,
}

pub fn indicator_sequence(psi: &TreeFunction, p: Exponent, q: Exponent) -> IndicatorSequence {
    let case = classify(p, q);
    let tree = psi.tree();
    let values: Vec<f64> = (0..=tree.depth())
        .map(|n| match case {
            OperatorCase::Equal => level_mean(psi, Exponent::Infinity, n),
            OperatorCase::Down => {
                let s = down_exponent(p, q).expect("down case");
                level_mean(psi, Exponent::Finite(s), n)
            }
            OperatorCase::FromInf => level_mean(psi, q, n),
            OperatorCase::ToInf => {
                let m = level_mean(psi, Exponent::Infinity, n)?;
                Ok(tree.level_size_pow(n, p.recip()) * m)
            }
            OperatorCase::Up => {
                let m = level_mean(psi, Exponent::Infinity, n)?;
                Ok(tree.level_size_pow(n, p.recip() - q.recip()) * m)
            }
        })
        .map(|r| r.expect("level within depth"))
        .collect();
    let (argmax_level, sup) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    IndicatorSequence {
        case,
        values,
        sup,
        argmax_level,
        exactness: psi.norm_exactness(),
    }
}

/// The closed-form operator norm: the truncated supremum of `b_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpNorm {
    pub value: f64,
    pub exactness: Exactness,
}

pub fn opnorm_formula(psi: &TreeFunction, p: Exponent, q: Exponent) -> OpNorm {
    let seq = indicator_sequence(psi, p, q);
    OpNorm {
        value: seq.sup,
        exactness: seq.exactness,
    }
}

/// First vertex of maximal modulus on a level (ties broken by smallest
/// index), together with that modulus.
fn level_argmax(psi: &TreeFunction, n: usize) -> (usize, f64) {
    let mut best = (0usize, 0.0f64);
    for (i, z) in psi.level_values(n).iter().enumerate() {
        let m = z.norm();
        if m > best.1 {
            best = (i, m);
        }
    }
    best
}

/// Builds the proof witness for level `n`: a function supported on `D_n`
/// with `||f||_p = 1` whose ratio `||psi f||_q / ||f||_p` equals `b_n`.
///
/// Constructions per regime:
/// - `q < p`: `f(v) = |psi(v)|^{q/(p-q)} / A_n` on the level, with the
///   normalizer `A_n = ((1/c_n) sum |psi|^{pq/(p-q)})^{1/p}`; degenerate
///   (error) when the symbol vanishes on the whole level.
/// - `p = inf`: the characteristic function of the level.
/// - all other regimes: `c_n^{1/p} * chi_{v_n}` at a vertex of maximal
///   `|psi|` on the level (for `p = q = inf` the prefactor is 1).
pub fn witness_function(
    psi: &TreeFunction,
    p: Exponent,
    q: Exponent,
    n: usize,
) -> Result<TreeFunction> {
    let tree = psi.tree();
    if n > tree.depth() {
        return Err(Error::LevelRange {
            level: n,
            depth: tree.depth(),
        });
    }
    let case = classify(p, q);
    match case {
        OperatorCase::Down => {
            let (_, max) = level_argmax(psi, n);
            if max == 0.0 {
                return Err(Error::DegenerateWitness { level: n });
            }
            let (pv, qv) = (p.value().expect("finite"), q.value().expect("finite"));
            let e = qv / (pv - qv);
            let s = pv * qv / (pv - qv);
            let c = tree.level_size(n) as f64;
            // Work with psi / max throughout; the normalized witness is
            // scale-invariant in the symbol.
            let scaled: Vec<f64> = psi
                .level_values(n)
                .iter()
                .map(|z| (z.norm() / max).powf(e))
                .collect();
            let sum_s: f64 = psi
                .level_values(n)
                .iter()
                .map(|z| (z.norm() / max).powf(s))
                .sum();
            let normalizer = (sum_s / c).powf(pv.recip());
            let entries: Vec<(VertexId, Complex64)> = scaled
                .iter()
                .enumerate()
                .filter(|(_, g)| **g != 0.0)
                .map(|(i, g)| (VertexId::new(n, i), Complex64::new(g / normalizer, 0.0)))
                .collect();
            TreeFunction::from_entries(Arc::clone(tree), &entries)
        }
        OperatorCase::FromInf => {
            let entries: Vec<(VertexId, Complex64)> = (0..tree.level_size(n) as usize)
                .map(|i| (VertexId::new(n, i), Complex64::new(1.0, 0.0)))
                .collect();
            TreeFunction::from_entries(Arc::clone(tree), &entries)
        }
        OperatorCase::Equal | OperatorCase::ToInf | OperatorCase::Up => {
            let (index, _) = level_argmax(psi, n);
            let scale = tree.level_size_pow(n, p.recip());
            TreeFunction::from_entries(
                Arc::clone(tree),
                &[(VertexId::new(n, index), Complex64::new(scale, 0.0))],
            )
        }
    }
}

/// Verdict tokens for compactness evidence on a truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompactnessVerdict {
    /// Finitely supported symbol: `b_n = 0` beyond the support, so the
    /// vanishing criterion holds exactly.
    CompactExact,
    /// Tail of `b_n` below tolerance.
    CompactEvidence,
    /// Tail bounded away from zero and non-decreasing.
    NotCompactEvidence,
    Inconclusive,
}

impl fmt::Display for CompactnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompactnessVerdict::CompactExact => "compact-exact",
            CompactnessVerdict::CompactEvidence => "compact-evidence",
            CompactnessVerdict::NotCompactEvidence => "not-compact-evidence",
            CompactnessVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Tail behaviour of `b_n` over the deepest `window` levels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompactnessReport {
    pub case: OperatorCase,
    /// `(level, b_level)` pairs.
    pub tail: Vec<(usize, f64)>,
    pub tail_max: f64,
    pub verdict: CompactnessVerdict,
    pub window_clamped: bool,
    pub tolerance: f64,
}

pub fn compactness_report(
    psi: &TreeFunction,
    p: Exponent,
    q: Exponent,
    window: usize,
    tol: f64,
) -> Result<CompactnessReport> {
    if window == 0 {
        return Err(Error::InvalidWindow);
    }
    let seq = indicator_sequence(psi, p, q);
    let depth = psi.tree().depth();
    let clamped = window.min(depth + 1);
    let start = depth + 1 - clamped;
    let tail: Vec<(usize, f64)> = (start..=depth).map(|n| (n, seq.values[n])).collect();
    let tail_max = tail.iter().map(|&(_, b)| b).fold(0.0, f64::max);
    let verdict = if seq.exactness == Exactness::Exact {
        CompactnessVerdict::CompactExact
    } else if tail_max <= tol {
        CompactnessVerdict::CompactEvidence
    } else {
        let tail_min = tail.iter().map(|&(_, b)| b).fold(f64::INFINITY, f64::min);
        let nondecreasing = tail
            .windows(2)
            .all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-12));
        if tail_min > tol && nondecreasing {
            CompactnessVerdict::NotCompactEvidence
        } else {
            CompactnessVerdict::Inconclusive
        }
    };
    Ok(CompactnessReport {
        case: seq.case,
        tail,
        tail_max,
        verdict,
        window_clamped: clamped < window,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsometryVerdict {
    Isometry,
    NotIsometry,
    /// `p != q` on a truncation whose level sizes look unbounded: the
    /// impossibility theorem applies.
    ImpossibleByTheorem,
    /// `p != q` but the unboundedness hypothesis cannot be confirmed from
    /// the truncation.
    TheoremInapplicableOnEvidence,
}

impl fmt::Display for IsometryVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IsometryVerdict::Isometry => "isometry",
            IsometryVerdict::NotIsometry => "not-isometry",
            IsometryVerdict::ImpossibleByTheorem => "impossible-by-theorem",
            IsometryVerdict::TheoremInapplicableOnEvidence => "theorem-inapplicable-on-evidence",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometryReport {
    pub case: OperatorCase,
    pub verdict: IsometryVerdict,
    /// Largest `||psi(v)| - 1|` over the truncation (`p = q` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_deviation: Option<f64>,
    /// Vertex attaining the worst deviation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offender: Option<VertexId>,
    /// Which impossibility argument applies: 1 = into `T_inf`,
    /// 2 = from `T_inf`, 3 = `q < p`, 4 = `p < q`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem_case: Option<u8>,
    /// Informational: a `p != q` isometry would force
    /// `|psi(v)| = c_{|v|}^e` with this exponent `e = 1/q - 1/p`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub implied_modulus_exponent: Option<f64>,
    pub tolerance: f64,
}

pub fn isometry_verdict(
    psi: &TreeFunction,
    p: Exponent,
    q: Exponent,
    tol: f64,
) -> IsometryReport {
    let case = classify(p, q);
    if case == OperatorCase::Equal {
        let mut worst = (VertexId::ROOT, -1.0f64);
        for v in psi.tree().vertices() {
            let dev = (psi.value(v).expect("materialized").norm() - 1.0).abs();
            if dev > worst.1 {
                worst = (v, dev);
            }
        }
        let verdict = if worst.1 <= tol {
            IsometryVerdict::Isometry
        } else {
            IsometryVerdict::NotIsometry
        };
        return IsometryReport {
            case,
            verdict,
            worst_deviation: Some(worst.1),
            offender: Some(worst.0),
            theorem_case: None,
            implied_modulus_exponent: None,
            tolerance: tol,
        };
    }
    let theorem_case = match case {
        OperatorCase::ToInf => 1,
        OperatorCase::FromInf => 2,
        OperatorCase::Down => 3,
        OperatorCase::Up => 4,
        OperatorCase::Equal => unreachable!(),
    };
    let verdict = if psi.tree().unbounded_evidence() {
        IsometryVerdict::ImpossibleByTheorem
    } else {
        IsometryVerdict::TheoremInapplicableOnEvidence
    };
    IsometryReport {
        case,
        verdict,
        worst_deviation: None,
        offender: None,
        theorem_case: Some(theorem_case),
        implied_modulus_exponent: Some(q.recip() - p.recip()),
        tolerance: tol,
    }
}

/// Injectivity holds exactly when the symbol never vanishes; on a
/// truncation the zero set is reported explicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub injective: bool,
    /// Vertices with `|psi(v)| <= tol`, lexicographic order.
    pub zero_set: Vec<VertexId>,
    pub tolerance: f64,
}

pub fn injectivity_check(psi: &TreeFunction, tol: f64) -> InjectivityReport {
    let zero_set: Vec<VertexId> = psi
        .tree()
        .vertices()
        .filter(|&v| psi.value(v).expect("materialized").norm() <= tol)
        .collect();
    InjectivityReport {
        injective: zero_set.is_empty(),
        zero_set,
        tolerance: tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvertibilityVerdict {
    /// `p = q` with `min |psi| > tol` on the truncation.
    InvertibleEvidence,
    /// `p = q` with the minimum at or below tolerance.
    NotInvertible,
    ImpossibleByTheorem,
    TheoremInapplicableOnEvidence,
}

impl fmt::Display for InvertibilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvertibilityVerdict::InvertibleEvidence => "invertible-evidence",
            InvertibilityVerdict::NotInvertible => "not-invertible",
            InvertibilityVerdict::ImpossibleByTheorem => "impossible-by-theorem",
            InvertibilityVerdict::TheoremInapplicableOnEvidence => {
                "theorem-inapplicable-on-evidence"
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvertibilityReport {
    pub case: OperatorCase,
    pub verdict: InvertibilityVerdict,
    /// `min |psi|` over the truncation (`p = q` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_modulus: Option<f64>,
    /// `max |psi|` over the truncation (`p = q` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_modulus: Option<f64>,
    /// Vertex attaining the minimum modulus.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_witness: Option<VertexId>,
    /// Heuristic warning: the per-level minima strictly decrease over the
    /// whole truncation, so the infimum may be 0 on the full tree even
    /// though the truncated minimum is positive.
    pub infimum_trend_to_zero: bool,
    /// `p != q` with `p, q >= 1` and unbounded-looking levels: no bounded
    /// operator in this regime is onto.
    pub never_onto: bool,
    pub tolerance: f64,
}

/// The invertibility verdict plus, when invertibility evidence holds, the
/// inverse symbol `1/psi` for downstream composition.
#[derive(Debug, Clone)]
pub struct Invertibility {
    pub report: InvertibilityReport,
    pub inverse: Option<TreeFunction>,
}

pub fn invertibility_verdict(
    psi: &TreeFunction,
    p: Exponent,
    q: Exponent,
    tol: f64,
) -> Invertibility {
    let case = classify(p, q);
    let tree = psi.tree();
    if case == OperatorCase::Equal {
        let mut min = (VertexId::ROOT, f64::INFINITY);
        let mut max = 0.0f64;
        let mut level_mins = Vec::with_capacity(tree.depth() + 1);
        for n in 0..=tree.depth() {
            let mut lmin = f64::INFINITY;
            for (i, z) in psi.level_values(n).iter().enumerate() {
                let m = z.norm();
                if m < min.1 {
                    min = (VertexId::new(n, i), m);
                }
                lmin = lmin.min(m);
                max = max.max(m);
            }
            level_mins.push(lmin);
        }
        let trend = tree.depth() >= 1 && level_mins.windows(2).all(|w| w[1] < w[0]);
        let invertible = min.1 > tol;
        let inverse = invertible.then(|| psi.map(|_, z| z.finv()));
        let report = InvertibilityReport {
            case,
            verdict: if invertible {
                InvertibilityVerdict::InvertibleEvidence
            } else {
                InvertibilityVerdict::NotInvertible
            },
            min_modulus: Some(min.1),
            max_modulus: Some(max),
            min_witness: Some(min.0),
            infimum_trend_to_zero: trend,
            never_onto: false,
            tolerance: tol,
        };
        return Invertibility { report, inverse };
    }
    let unbounded = tree.unbounded_evidence();
    let verdict = if unbounded {
        InvertibilityVerdict::ImpossibleByTheorem
    } else {
        InvertibilityVerdict::TheoremInapplicableOnEvidence
    };
    let at_least_one = |e: Exponent| e.value().is_none_or(|v| v >= 1.0);
    let report = InvertibilityReport {
        case,
        verdict,
        min_modulus: None,
        max_modulus: None,
        min_witness: None,
        infimum_trend_to_zero: false,
        never_onto: unbounded && at_least_one(p) && at_least_one(q),
        tolerance: tol,
    };
    Invertibility {
        report,
        inverse: None,
    }
}

/// The complement of `E = {v : psi(v) != 1}` within the truncation: the
/// vertices where the symbol equals 1 up to tolerance. Fixed points of
/// `M_psi` are exactly the functions supported inside this set.
#[derive(Debug, Clone)]
pub struct FixedPointSet {
    /// Lexicographically ordered.
    non_e: Vec<VertexId>,
    tol: f64,
}

impl FixedPointSet {
    pub fn vertices(&self) -> &[VertexId] {
        &self.non_e
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.non_e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.non_e.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.non_e.binary_search(&v).is_ok()
    }

    /// Zeroes `f` outside the set; the result is always a fixed point of
    /// the generating symbol at the set's tolerance.
    pub fn project(&self, f: &TreeFunction) -> TreeFunction {
        f.map(|v, z| {
            if self.contains(v) {
                z
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

pub fn fixed_point_support(psi: &TreeFunction, tol: f64) -> FixedPointSet {
    let one = Complex64::new(1.0, 0.0);
    let non_e = psi
        .tree()
        .vertices()
        .filter(|&v| (psi.value(v).expect("materialized") - one).norm() <= tol)
        .collect();
    FixedPointSet { non_e, tol }
}

/// `f` is fixed by `M_psi` exactly when `(psi - 1) f = 0`; numerically,
/// when `max |(psi(v) - 1) f(v)| <= tol * (1 + max |f|)`.
pub fn is_fixed_point(psi: &TreeFunction, f: &TreeFunction, tol: f64) -> Result<bool> {
    ensure_same_tree(psi, f)?;
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for v in psi.tree().vertices() {
        let d = ((psi.value(v)? - one) * f.value(v)?).norm();
        worst = worst.max(d);
    }
    Ok(worst <= tol * (1.0 + f.max_modulus()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::tp_norm;
    use crate::num::rel_close;
    use crate::tree::RootedTree;

    const INF: Exponent = Exponent::Infinity;

    fn fin(x: f64) -> Exponent {
        Exponent::Finite(x)
    }

    fn tri_tree(depth: usize) -> Arc<RootedTree> {
        RootedTree::homogeneous(3, depth).unwrap().into_shared()
    }

    /// |psi| = (3, 0, 0) on D_1, zero elsewhere.
    fn spike(tree: &Arc<RootedTree>) -> TreeFunction {
        TreeFunction::from_entries(
            Arc::clone(tree),
            &[(VertexId::new(1, 0), Complex64::new(0.0, 3.0))],
        )
        .unwrap()
    }

    #[test]
    fn classify_table() {
        assert_eq!(classify(fin(2.0), fin(1.0)), OperatorCase::Down);
        assert_eq!(classify(INF, fin(3.0)), OperatorCase::FromInf);
        assert_eq!(classify(fin(2.0), fin(2.0)), OperatorCase::Equal);
        assert_eq!(classify(INF, INF), OperatorCase::Equal);
        assert_eq!(classify(fin(0.5), INF), OperatorCase::ToInf);
        assert_eq!(classify(fin(1.0), fin(2.0)), OperatorCase::Up);
    }

    #[test]
    fn apply_examples() {
        let t = tri_tree(2);
        let f = spike(&t);
        let id = TreeFunction::constant(Arc::clone(&t), Complex64::new(1.0, 0.0));
        let g = apply(&id, &f).unwrap();
        assert_eq!(g.value(VertexId::new(1, 0)).unwrap(), Complex64::new(0.0, 3.0));

        let zero = TreeFunction::zero(Arc::clone(&t));
        assert!(apply(&zero, &f).unwrap().is_zero());

        let v = VertexId::new(2, 2);
        let two_chi = TreeFunction::from_entries(
            Arc::clone(&t),
            &[(v, Complex64::new(2.0, 0.0))],
        )
        .unwrap();
        let three_chi = TreeFunction::from_entries(
            Arc::clone(&t),
            &[(v, Complex64::new(3.0, 0.0))],
        )
        .unwrap();
        let prod = apply(&two_chi, &three_chi).unwrap();
        assert_eq!(prod.value(v).unwrap(), Complex64::new(6.0, 0.0));

        let other = RootedTree::homogeneous(2, 2).unwrap().into_shared();
        let h = TreeFunction::zero(other);
        assert!(matches!(apply(&f, &h), Err(Error::TreeMismatch)));
    }

    #[test]
    fn indicator_sequence_examples() {
        let t = tri_tree(3);
        // DOWN with p = 2, q = 1: pq/(p-q) = 2, b_1 = M_2(1, psi) = sqrt(3).
        let psi = spike(&t);
        let seq = indicator_sequence(&psi, fin(2.0), fin(1.0));
        assert_eq!(seq.case, OperatorCase::Down);
        assert!(rel_close(seq.values[1], 3f64.sqrt(), 1e-14));
        assert_eq!(seq.argmax_level, 1);
        assert!(rel_close(seq.sup, 3f64.sqrt(), 1e-14));
        assert_eq!(seq.exactness, Exactness::Exact);

        // UP with p = 1, q = 2: b_2 = c_2^{1/2} = sqrt(6).
        let chi = TreeFunction::indicator(Arc::clone(&t), VertexId::new(2, 4)).unwrap();
        let seq = indicator_sequence(&chi, fin(1.0), fin(2.0));
        assert_eq!(seq.case, OperatorCase::Up);
        assert!(rel_close(seq.values[2], 6f64.sqrt(), 1e-14));

        // EQUAL with a constant symbol.
        let c = TreeFunction::constant(Arc::clone(&t), Complex64::new(-1.5, 2.0));
        let seq = indicator_sequence(&c, fin(7.0), fin(7.0));
        let modulus = (1.5f64 * 1.5 + 4.0).sqrt();
        assert!(seq.values.iter().all(|b| rel_close(*b, modulus, 1e-14)));
        assert!(rel_close(seq.sup, modulus, 1e-14));
        assert_eq!(seq.exactness, Exactness::Truncated { depth: 3 });
    }

    #[test]
    fn opnorm_examples() {
        let t = tri_tree(3);
        let two = TreeFunction::constant(Arc::clone(&t), Complex64::new(2.0, 0.0));
        assert!(rel_close(opnorm_formula(&two, fin(2.0), fin(2.0)).value, 2.0, 1e-15));

        let chi_root = TreeFunction::indicator(Arc::clone(&t), VertexId::ROOT).unwrap();
        let norm = opnorm_formula(&chi_root, INF, fin(1.0));
        assert!(rel_close(norm.value, 1.0, 1e-15));
        assert_eq!(norm.exactness, Exactness::Exact);

        let psi = spike(&t);
        assert!(rel_close(
            opnorm_formula(&psi, fin(2.0), fin(1.0)).value,
            3f64.sqrt(),
            1e-14
        ));
    }

    #[test]
    fn witness_examples() {
        let t = tri_tree(3);

        // DOWN p = 2, q = 1 at level 1: f ~ (sqrt 3, 0, 0), unit 2-norm.
        let psi = spike(&t);
        let f = witness_function(&psi, fin(2.0), fin(1.0), 1).unwrap();
        assert!(rel_close(tp_norm(&f, fin(2.0)).value, 1.0, 1e-13));
        let ratio = tp_norm(&apply(&psi, &f).unwrap(), fin(1.0)).value;
        assert!(rel_close(ratio, 3f64.sqrt(), 1e-13));

        // TO_INF p = 1 at level 2: f = 6 chi at the argmax vertex.
        let g = witness_function(&psi, fin(1.0), INF, 2).unwrap();
        assert!(rel_close(tp_norm(&g, fin(1.0)).value, 1.0, 1e-13));
        assert!(rel_close(g.max_modulus(), 6.0, 1e-13));

        // FROM_INF, psi = 1, level 3: indicator of the level, ratio 1.
        let one = TreeFunction::constant(Arc::clone(&t), Complex64::new(1.0, 0.0));
        let h = witness_function(&one, INF, fin(2.5), 3).unwrap();
        assert!(rel_close(tp_norm(&h, INF).value, 1.0, 1e-15));
        let ratio = tp_norm(&apply(&one, &h).unwrap(), fin(2.5)).value;
        assert!(rel_close(ratio, 1.0, 1e-13));

        // DOWN on a level where the symbol vanishes: degenerate.
        assert!(matches!(
            witness_function(&psi, fin(2.0), fin(1.0), 2),
            Err(Error::DegenerateWitness { level: 2 })
        ));
        assert!(matches!(
            witness_function(&psi, fin(2.0), fin(1.0), 9),
            Err(Error::LevelRange { .. })
        ));
    }

    #[test]
    fn compactness_examples() {
        let t = tri_tree(5);
        let psi = spike(&t);
        for (p, q) in [
            (fin(2.0), fin(2.0)),
            (fin(2.0), fin(1.0)),
            (INF, fin(2.0)),
            (fin(2.0), INF),
            (fin(1.0), fin(2.0)),
        ] {
            let r = compactness_report(&psi, p, q, 3, 1e-9).unwrap();
            assert_eq!(r.verdict, CompactnessVerdict::CompactExact);
        }

        let one = TreeFunction::constant(Arc::clone(&t), Complex64::new(1.0, 0.0));
        let r = compactness_report(&one, fin(2.0), fin(2.0), 4, 1e-9).unwrap();
        assert_eq!(r.verdict, CompactnessVerdict::NotCompactEvidence);
        assert_eq!(r.tail_max, 1.0);

        // TO_INF with psi = c_n^{-1/p}: b_n = 1 for every level.
        let p = 2.0;
        let psi = crate::function::SymbolGen::LevelPower(-1.0 / p)
            .build(&t)
            .unwrap();
        let r = compactness_report(&psi, fin(p), INF, 4, 1e-9).unwrap();
        assert_eq!(r.verdict, CompactnessVerdict::NotCompactEvidence);
        for &(_, b) in &r.tail {
            assert!(rel_close(b, 1.0, 1e-12));
        }

        // Decaying but not yet small: inconclusive.
        let decay = crate::function::SymbolGen::LevelDecay.build(&t).unwrap();
        let r = compactness_report(&decay, fin(2.0), fin(2.0), 4, 1e-9).unwrap();
        assert_eq!(r.verdict, CompactnessVerdict::Inconclusive);

        assert!(matches!(
            compactness_report(&decay, fin(2.0), fin(2.0), 0, 1e-9),
            Err(Error::InvalidWindow)
        ));
    }

    #[test]
    fn isometry_examples() {
        let t = tri_tree(6);
        // Unit modulus, arbitrary phases.
        let phases = TreeFunction::constant(Arc::clone(&t), Complex64::new(1.0, 0.0))
            .map(|v, _| Complex64::from_polar(1.0, 0.1 * (v.level as f64 + v.index as f64)));
        let r = isometry_verdict(&phases, fin(2.0), fin(2.0), 1e-9);
        assert_eq!(r.verdict, IsometryVerdict::Isometry);

        let two = TreeFunction::constant(Arc::clone(&t), Complex64::new(2.0, 0.0));
        let r = isometry_verdict(&two, INF, INF, 1e-9);
        assert_eq!(r.verdict, IsometryVerdict::NotIsometry);
        assert_eq!(r.worst_deviation, Some(1.0));

        let r = isometry_verdict(&two, fin(1.0), fin(2.0), 1e-9);
        assert_eq!(r.verdict, IsometryVerdict::ImpossibleByTheorem);
        assert_eq!(r.theorem_case, Some(4));
        assert!(rel_close(r.implied_modulus_exponent.unwrap(), -0.5, 1e-15));

        // Bounded-looking levels: theorem hypothesis unconfirmed.
        let flat = RootedTree::homogeneous(2, 6).unwrap().into_shared();
        let g = TreeFunction::constant(Arc::clone(&flat), Complex64::new(1.0, 0.0));
        let r = isometry_verdict(&g, fin(1.0), fin(2.0), 1e-9);
        assert_eq!(r.verdict, IsometryVerdict::TheoremInapplicableOnEvidence);
    }

    #[test]
    fn injectivity_examples() {
        let t = tri_tree(2);
        let one = TreeFunction::constant(Arc::clone(&t), Complex64::new(1.0, 0.0));
        let r = injectivity_check(&one, 1e-9);
        assert!(r.injective);
        assert!(r.zero_set.is_empty());

        let chi_root = TreeFunction::indicator(Arc::clone(&t), VertexId::ROOT).unwrap();
        let r = injectivity_check(&chi_root, 1e-9);
        assert!(!r.injective);
        assert_eq!(r.zero_set.len() as u64, t.vertex_count() - 1);

        let decay = crate::function::SymbolGen::LevelDecay.build(&t).unwrap();
        assert!(injectivity_check(&decay, 1e-9).injective);
    }

    #[test]
    fn invertibility_examples() {
        let t = tri_tree(4);
        let psi = TreeFunction::constant(Arc::clone(&t), Complex64::new(0.0, 1.5));
        let inv = invertibility_verdict(&psi, fin(2.0), fin(2.0), 1e-9);
        assert_eq!(inv.report.verdict, InvertibilityVerdict::InvertibleEvidence);
        assert_eq!(inv.report.min_modulus, Some(1.5));
        assert_eq!(inv.report.max_modulus, Some(1.5));
        assert!(!inv.report.infimum_trend_to_zero);
        let inverse = inv.inverse.unwrap();
        let composed = apply(&inverse, &apply(&psi, &psi).unwrap()).unwrap();
        for v in t.vertices() {
            let back = composed.value(v).unwrap();
            let orig = psi.value(v).unwrap();
            assert!((back - orig).norm() <= 1e-12);
        }

        let decay = crate::function::SymbolGen::LevelDecay.build(&t).unwrap();
        let inv = invertibility_verdict(&decay, fin(1.0), fin(1.0), 1e-9);
        assert_eq!(inv.report.verdict, InvertibilityVerdict::InvertibleEvidence);
        assert!(rel_close(inv.report.min_modulus.unwrap(), 0.2, 1e-15));
        assert!(inv.report.infimum_trend_to_zero);

        let with_zero = TreeFunction::indicator(Arc::clone(&t), VertexId::ROOT).unwrap();
        let inv = invertibility_verdict(&with_zero, INF, INF, 1e-9);
        assert_eq!(inv.report.verdict, InvertibilityVerdict::NotInvertible);
        assert!(inv.inverse.is_none());
        assert!(inv.report.min_witness.is_some());

        let inv = invertibility_verdict(&decay, fin(1.0), fin(2.0), 1e-9);
        assert_eq!(inv.report.verdict, InvertibilityVerdict::ImpossibleByTheorem);
        assert!(inv.report.never_onto);

        // p < 1 in a p != q regime: the onto theorem hypothesis fails.
        let inv = invertibility_verdict(&decay, fin(0.5), fin(2.0), 1e-9);
        assert_eq!(inv.report.verdict, InvertibilityVerdict::ImpossibleByTheorem);
        assert!(!inv.report.never_onto);

        let flat = RootedTree::homogeneous(2, 4).unwrap().into_shared();
        let g = TreeFunction::constant(Arc::clone(&flat), Complex64::new(1.0, 0.0));
        let inv = invertibility_verdict(&g, fin(1.0), fin(2.0), 1e-9);
        assert_eq!(
            inv.report.verdict,
            InvertibilityVerdict::TheoremInapplicableOnEvidence
        );
        assert!(!inv.report.never_onto);
    }

    #[test]
    fn fixed_point_examples() {
        let t = tri_tree(2);
        let one = TreeFunction::constant(Arc::clone(&t), Complex64::new(1.0, 0.0));
        let set = fixed_point_support(&one, 1e-9);
        assert_eq!(set.len() as u64, t.vertex_count());

        let zero = TreeFunction::zero(Arc::clone(&t));
        assert!(fixed_point_support(&zero, 1e-9).is_empty());

        let mixed = one.map(|v, z| {
            if v == VertexId::ROOT {
                z
            } else {
                Complex64::new(2.0, 0.0)
            }
        });
        let set = fixed_point_support(&mixed, 1e-9);
        assert_eq!(set.vertices(), &[VertexId::ROOT]);

        assert!(is_fixed_point(&mixed, &zero, 1e-9).unwrap());
        assert!(is_fixed_point(&one, &mixed, 1e-9).unwrap());
        let two = TreeFunction::constant(Arc::clone(&t), Complex64::new(2.0, 0.0));
        let chi_root = TreeFunction::indicator(Arc::clone(&t), VertexId::ROOT).unwrap();
        assert!(!is_fixed_point(&two, &chi_root, 1e-9).unwrap());

        // Projection always lands in the fixed subspace.
        let f = TreeFunction::constant(Arc::clone(&t), Complex64::new(0.3, -0.8));
        let projected = set.project(&f);
        assert!(is_fixed_point(&mixed, &projected, 1e-9).unwrap());
        assert_eq!(projected.value(VertexId::new(1, 1)).unwrap(), Complex64::new(0.0, 0.0));
    }
}
