//! Level means `M_p(n, f)`, truncated `T_p` norms, and the structural
//! facts that every operator verdict builds on.
//!
//! For finite `p` the level mean is the power mean of the moduli over the
//! level,
//! `M_p(n, f) = ((1/c_n) * sum_{|v|=n} |f(v)|^p)^{1/p}`,
//! and `M_inf(n, f)` is the maximum modulus. The truncated norm is the
//! maximum of the level means over the materialized levels; it equals the
//! supremum exactly when the support ends strictly above the truncation
//! depth.
//!
//! Finite means are evaluated with max-rescaling,
//! `m * ((1/c_n) * sum (|f(v)|/m)^p)^{1/p}` with `m` the level maximum,
//! which is exact in real arithmetic and keeps large `p` and extreme
//! values inside floating-point range.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::function::TreeFunction;
use crate::num::rel_le;
use crate::report::Exactness;
use crate::tree::{RootedTree, VertexId};

/// `M_p(n, f)` for one level.
pub fn level_mean(f: &TreeFunction, p: Exponent, n: usize) -> Result<f64> {
    let depth = f.tree().depth();
    if n > depth {
        return Err(Error::LevelRange { level: n, depth });
    }
    let values = f.level_values(n);
    let max = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match p {
        Exponent::Infinity => Ok(max),
        Exponent::Finite(pv) => {
            if max == 0.0 {
                return Ok(0.0);
            }
            let c = f.tree().level_size(n) as f64;
            let sum: f64 = values
                .iter()
                .map(|z| (z.norm() / max).powf(pv))
                .sum();
            Ok(max * (sum / c).powf(pv.recip()))
        }
    }
}

/// The full sequence `M_p(n, f)` for `n = 0 ..= depth`.
#[derive(Debug, Clone)]
pub struct LevelMeans {
    pub p: Exponent,
    pub means: Vec<f64>,
}

pub fn level_means(f: &TreeFunction, p: Exponent) -> LevelMeans {
    let means = (0..=f.tree().depth())
        .map(|n| level_mean(f, p, n).expect("level within depth"))
        .collect();
    LevelMeans { p, means }
}

/// A truncated norm value together with its exactness tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpNorm {
    pub value: f64,
    pub exactness: Exactness,
}

/// `sup_n M_p(n, f)` over the materialized levels. Exact for finitely
/// supported data, otherwise a lower bound tagged with the truncation
/// depth.
pub fn tp_norm(f: &TreeFunction, p: Exponent) -> TpNorm {
    let value = (0..=f.tree().depth())
        .map(|n| level_mean(f, p, n).expect("level within depth"))
        .fold(0.0, f64::max);
    TpNorm {
        value,
        exactness: f.norm_exactness(),
    }
}

/// Evidence about membership in the little space `T_{p,0}` (level means
/// tending to zero). A truncation can never certify the limit; this
/// reports the tail behaviour only.
#[derive(Debug, Clone)]
pub struct TailReport {
    /// `(level, M_p(level, f))` for the last `window` levels.
    pub tail: Vec<(usize, f64)>,
    pub tail_max: f64,
    /// Strictly decreasing tail, or an identically zero one.
    pub decreasing: bool,
    /// Set when the requested window exceeded `depth + 1` and was clamped.
    pub window_clamped: bool,
}

pub fn little_space_tail(f: &TreeFunction, p: Exponent, window: usize) -> Result<TailReport> {
    if window == 0 {
        return Err(Error::InvalidWindow);
    }
    let depth = f.tree().depth();
    let clamped = window.min(depth + 1);
    let start = depth + 1 - clamped;
    let tail: Vec<(usize, f64)> = (start..=depth)
        .map(|n| (n, level_mean(f, p, n).expect("level within depth")))
        .collect();
    let tail_max = tail.iter().map(|&(_, m)| m).fold(0.0, f64::max);
    let decreasing = tail_max == 0.0 || tail.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(TailReport {
        tail,
        tail_max,
        decreasing,
        window_clamped: clamped < window,
    })
}

/// `c_{|v|}^{1/p} * ||f||_p - |f(v)|`; non-negative whenever the truncated
/// norm is exact. Stated for finite `p` only.
pub fn growth_bound_margin(f: &TreeFunction, p: Exponent, v: VertexId) -> Result<f64> {
    let Exponent::Finite(_) = p else {
        return Err(Error::UnsupportedExponent);
    };
    if !f.tree().contains(v) {
        return Err(Error::VertexRange {
            level: v.level,
            index: v.index,
        });
    }
    let norm = tp_norm(f, p).value;
    let bound = f.tree().level_size_pow(v.level, p.recip());
    Ok(bound * norm - f.value(v)?.norm())
}

/// The five quantities of the level-mean comparison chain at one level,
/// in non-decreasing order when the chain holds:
/// `M_inf / c_n^{1/p} <= c_n^{-(1/p - 1/q)} M_q <= M_p <= M_q <= M_inf`.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub quantities: [f64; 5],
    /// All four inequalities, within relative slack `1e-12`.
    pub holds: bool,
}

pub const CHAIN_REL_TOL: f64 = 1e-12;

pub fn inequality_chain(
    f: &TreeFunction,
    p: Exponent,
    q: Exponent,
    n: usize,
) -> Result<ChainReport> {
    let (Exponent::Finite(pv), Exponent::Finite(qv)) = (p, q) else {
        return Err(Error::UnsupportedExponent);
    };
    if pv >= qv {
        return Err(Error::ExponentOrder {
            requirement: "requires p < q (both finite)",
        });
    }
    let tree = f.tree();
    let m_inf = level_mean(f, Exponent::Infinity, n)?;
    let m_p = level_mean(f, p, n)?;
    let m_q = level_mean(f, q, n)?;
    let quantities = [
        m_inf * tree.level_size_pow(n, -pv.recip()),
        m_q * tree.level_size_pow(n, -(pv.recip() - qv.recip())),
        m_p,
        m_q,
        m_inf,
    ];
    let holds = quantities
        .windows(2)
        .all(|w| rel_le(w[0], w[1], CHAIN_REL_TOL));
    Ok(ChainReport { quantities, holds })
}

/// The separating function of the proper-inclusion argument: value
/// `c_n^{1/r}` at the first vertex of every level `n >= 1`, zero
/// elsewhere. Its level means are `M_p(n) = c_n^{1/r - 1/p}` and
/// `M_q(n) = c_n^{1/r - 1/q}`, so on trees with growing levels it lies in
/// `T_p` but escapes `T_q`.
pub fn inclusion_witness(
    p: Exponent,
    q: Exponent,
    r: f64,
    tree: &Arc<RootedTree>,
) -> Result<TreeFunction> {
    let (Exponent::Finite(pv), Exponent::Finite(qv)) = (p, q) else {
        return Err(Error::UnsupportedExponent);
    };
    if pv >= qv {
        return Err(Error::ExponentOrder {
            requirement: "requires p < q (both finite)",
        });
    }
    if !(r > pv && r < qv) {
        return Err(Error::Parameter(format!(
            "r = {r} must lie strictly between p = {pv} and q = {qv}"
        )));
    }
    let entries: Vec<(VertexId, Complex64)> = (1..=tree.depth())
        .map(|n| {
            (
                VertexId::new(n, 0),
                Complex64::new(tree.level_size_pow(n, r.recip()), 0.0),
            )
        })
        .collect();
    TreeFunction::from_entries(Arc::clone(tree), &entries)
}

/// Naive reference mean without rescaling; the oracle the max-rescaled
/// implementation is cross-checked against on well-scaled inputs.
#[doc(hidden)]
pub fn naive_level_mean(f: &TreeFunction, p: Exponent, n: usize) -> Result<f64> {
    let depth = f.tree().depth();
    if n > depth {
        return Err(Error::LevelRange { level: n, depth });
    }
    let values = f.level_values(n);
    match p {
        Exponent::Infinity => Ok(values.iter().map(|z| z.norm()).fold(0.0, f64::max)),
        Exponent::Finite(pv) => {
            let c = f.tree().level_size(n) as f64;
            let sum: f64 = values.iter().map(|z| z.norm().powf(pv)).sum();
            Ok((sum / c).powf(pv.recip()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rel_close;
    use crate::function::SymbolGen;
    use crate::tree::RootedTree;

    fn tri_tree(depth: usize) -> Arc<RootedTree> {
        RootedTree::homogeneous(3, depth).unwrap().into_shared()
    }

    /// |values| (1, 2, 2) on D_1 of the 3-homogeneous tree.
    fn one_two_two(tree: &Arc<RootedTree>) -> TreeFunction {
        TreeFunction::from_entries(
            Arc::clone(tree),
            &[
                (VertexId::new(1, 0), Complex64::new(0.0, 1.0)),
                (VertexId::new(1, 1), Complex64::new(-2.0, 0.0)),
                (VertexId::new(1, 2), Complex64::new(0.0, -2.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn level_mean_examples() {
        let t = tri_tree(2);
        let f = one_two_two(&t);
        // Oracle: ((1 + 4 + 4) / 3)^{1/2} = sqrt(3).
        let got = level_mean(&f, Exponent::Finite(2.0), 1).unwrap();
        assert!(rel_close(got, 3f64.sqrt(), 1e-14), "{got}");
        let naive = naive_level_mean(&f, Exponent::Finite(2.0), 1).unwrap();
        assert!(rel_close(got, naive, 1e-12));

        assert_eq!(level_mean(&f, Exponent::INF, 1).unwrap(), 2.0);
        let zero = TreeFunction::zero(Arc::clone(&t));
        assert_eq!(level_mean(&zero, Exponent::Finite(0.5), 2).unwrap(), 0.0);
        assert_eq!(level_mean(&zero, Exponent::INF, 0).unwrap(), 0.0);

        assert!(matches!(
            level_mean(&f, Exponent::Finite(1.0), 9),
            Err(Error::LevelRange { level: 9, depth: 2 })
        ));
    }

    #[test]
    fn level_means_vanish_beyond_support() {
        let t = tri_tree(4);
        let f = one_two_two(&t);
        let means = level_means(&f, Exponent::Finite(1.5));
        assert_eq!(means.means.len(), 5);
        assert!(means.means[0] == 0.0);
        assert!(means.means[1] > 0.0);
        for n in 2..=4 {
            assert_eq!(means.means[n], 0.0);
        }
    }

    #[test]
    fn tp_norm_examples() {
        let t = tri_tree(3);
        let chi = TreeFunction::indicator(Arc::clone(&t), VertexId::new(2, 1)).unwrap();
        let n1 = tp_norm(&chi, Exponent::Finite(1.0));
        assert!(rel_close(n1.value, 1.0 / 6.0, 1e-15));
        assert_eq!(n1.exactness, Exactness::Exact);

        let ninf = tp_norm(&chi, Exponent::INF);
        assert_eq!(ninf.value, 1.0);

        let ones = TreeFunction::constant(Arc::clone(&t), Complex64::new(1.0, 0.0));
        let n = tp_norm(&ones, Exponent::Finite(2.0));
        assert!(rel_close(n.value, 1.0, 1e-15));
        assert_eq!(n.exactness, Exactness::Truncated { depth: 3 });

        let zero = TreeFunction::zero(t);
        assert_eq!(tp_norm(&zero, Exponent::Finite(1.0)).exactness, Exactness::Exact);
    }

    #[test]
    fn tail_examples() {
        let t2 = RootedTree::homogeneous(2, 10).unwrap().into_shared();
        let f = SymbolGen::LevelDecay.build(&t2).unwrap();
        let report = little_space_tail(&f, Exponent::INF, 4).unwrap();
        let expected: Vec<(usize, f64)> =
            vec![(7, 1.0 / 8.0), (8, 1.0 / 9.0), (9, 1.0 / 10.0), (10, 1.0 / 11.0)];
        assert_eq!(report.tail.len(), 4);
        for ((ln, lv), (en, ev)) in report.tail.iter().zip(expected) {
            assert_eq!(*ln, en);
            assert!(rel_close(*lv, ev, 1e-15));
        }
        assert!(report.decreasing);
        assert!(!report.window_clamped);

        let ones = TreeFunction::constant(Arc::clone(&t2), Complex64::new(1.0, 0.0));
        let r = little_space_tail(&ones, Exponent::Finite(1.0), 3).unwrap();
        assert_eq!(r.tail_max, 1.0);
        assert!(!r.decreasing);

        let chi = TreeFunction::indicator(Arc::clone(&t2), VertexId::new(1, 0)).unwrap();
        let r = little_space_tail(&chi, Exponent::Finite(2.0), 4).unwrap();
        assert_eq!(r.tail_max, 0.0);
        assert!(r.decreasing);

        let r = little_space_tail(&chi, Exponent::INF, 99).unwrap();
        assert!(r.window_clamped);
        assert_eq!(r.tail.len(), 11);
        assert!(matches!(
            little_space_tail(&chi, Exponent::INF, 0),
            Err(Error::InvalidWindow)
        ));
    }

    #[test]
    fn growth_margin_examples() {
        let t = tri_tree(3);
        let v = VertexId::new(2, 3);
        let chi = TreeFunction::indicator(Arc::clone(&t), v).unwrap();
        // Equality case: 6 * (1/6) - 1 = 0.
        let margin = growth_bound_margin(&chi, Exponent::Finite(1.0), v).unwrap();
        assert!(margin.abs() <= 1e-12);

        let ones = TreeFunction::constant(Arc::clone(&t), Complex64::new(1.0, 0.0));
        let margin = growth_bound_margin(&ones, Exponent::Finite(2.0), VertexId::new(3, 0)).unwrap();
        assert!(rel_close(margin, 12f64.sqrt() - 1.0, 1e-13), "{margin}");

        let zero = TreeFunction::zero(Arc::clone(&t));
        assert_eq!(
            growth_bound_margin(&zero, Exponent::Finite(1.0), VertexId::ROOT).unwrap(),
            0.0
        );

        assert!(matches!(
            growth_bound_margin(&chi, Exponent::INF, v),
            Err(Error::UnsupportedExponent)
        ));
    }

    #[test]
    fn chain_example_values() {
        let t = tri_tree(1);
        let f = one_two_two(&t);
        let report =
            inequality_chain(&f, Exponent::Finite(1.0), Exponent::Finite(2.0), 1).unwrap();
        let expected = [2.0 / 3.0, 1.0, 5.0 / 3.0, 3f64.sqrt(), 2.0];
        for (got, want) in report.quantities.iter().zip(expected) {
            assert!(rel_close(*got, want, 1e-14), "{got} vs {want}");
        }
        assert!(report.holds);

        let constant = TreeFunction::constant(Arc::clone(&t), Complex64::new(0.0, 0.7));
        let r = inequality_chain(&constant, Exponent::Finite(0.5), Exponent::Finite(3.0), 1)
            .unwrap();
        assert!(rel_close(r.quantities[2], 0.7, 1e-13));
        assert!(rel_close(r.quantities[3], 0.7, 1e-13));
        assert!(rel_close(r.quantities[4], 0.7, 1e-13));
        assert!(rel_close(r.quantities[0], 0.7 / 3f64.powf(2.0), 1e-13));
        assert!(r.holds);

        let zero = TreeFunction::zero(Arc::clone(&t));
        let r = inequality_chain(&zero, Exponent::Finite(1.0), Exponent::Finite(2.0), 0).unwrap();
        assert_eq!(r.quantities, [0.0; 5]);
        assert!(r.holds);

        assert!(matches!(
            inequality_chain(&f, Exponent::Finite(2.0), Exponent::Finite(1.0), 1),
            Err(Error::ExponentOrder { .. })
        ));
        assert!(matches!(
            inequality_chain(&f, Exponent::Finite(2.0), Exponent::INF, 1),
            Err(Error::UnsupportedExponent)
        ));
    }

    #[test]
    fn inclusion_witness_values() {
        let t = tri_tree(3);
        let f = inclusion_witness(Exponent::Finite(1.0), Exponent::Finite(4.0), 2.0, &t).unwrap();
        // M_1(2, f) = 6^{-1/2}, M_4(2, f) = 6^{1/4}.
        let m1 = level_mean(&f, Exponent::Finite(1.0), 2).unwrap();
        let m4 = level_mean(&f, Exponent::Finite(4.0), 2).unwrap();
        assert!(rel_close(m1, 6f64.powf(-0.5), 1e-13), "{m1}");
        assert!(rel_close(m4, 6f64.powf(0.25), 1e-13), "{m4}");
        assert_eq!(level_mean(&f, Exponent::Finite(1.0), 0).unwrap(), 0.0);

        // Bounded-level tree: both means stay constant, no separation.
        let t2 = RootedTree::homogeneous(2, 5).unwrap().into_shared();
        let g = inclusion_witness(Exponent::Finite(1.0), Exponent::Finite(4.0), 2.0, &t2).unwrap();
        for n in 2..=5 {
            let mq = level_mean(&g, Exponent::Finite(4.0), n).unwrap();
            assert!(rel_close(mq, 2f64.powf(0.25), 1e-13));
        }

        assert!(matches!(
            inclusion_witness(Exponent::Finite(1.0), Exponent::Finite(4.0), 5.0, &t),
            Err(Error::Parameter(_))
        ));
    }
}
