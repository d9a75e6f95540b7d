//! Aggregated operator analysis: everything the `analyze` frontend
//! reports, in one serializable document with fixed field names.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exponent::Exponent;
use crate::function::TreeFunction;
use crate::operator::{
    compactness_report, fixed_point_support, indicator_sequence, injectivity_check,
    invertibility_verdict, isometry_verdict, CompactnessReport, InjectivityReport,
    InvertibilityReport, IsometryReport, OperatorCase,
};
use crate::oracle::{empirical_opnorm, BestSource, Distribution, SearchConfig};

/// Whether a truncated supremum is the exact value or only a lower bound.
///
/// Finite data cannot certify a supremum over an infinite tree; it can
/// when the function is finitely supported strictly inside the
/// truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    Truncated { depth: usize },
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exactness::Exact => write!(f, "exact"),
            Exactness::Truncated { depth } => write!(f, "truncated at depth {depth}"),
        }
    }
}

/// Inputs of a full analysis beyond the symbol and exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub window: usize,
    pub tol: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            window: 5,
            tol: 1e-9,
            trials: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSummary {
    /// Best ratio found by the search (a lower bound).
    pub value: f64,
    pub source: BestSource,
    /// `b_sup - value`; small non-negative when formula and search agree.
    pub agreement_margin: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivitySummary {
    pub injective: bool,
    pub zero_set_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointSummary {
    /// Number of vertices where the symbol equals 1 up to tolerance.
    pub non_e_size: usize,
}

/// The complete machine-readable analysis document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub case: OperatorCase,
    pub p: Exponent,
    pub q: Exponent,
    pub depth: usize,
    /// `(level, b_level)` for the first `window` levels.
    pub b_head: Vec<(usize, f64)>,
    /// `(level, b_level)` for the last `window` levels.
    pub b_tail: Vec<(usize, f64)>,
    /// Truncated supremum of the indicator sequence: the closed-form
    /// operator norm on the truncation.
    pub b_sup: f64,
    pub argmax_level: usize,
    pub exactness: Exactness,
    pub empirical: EmpiricalSummary,
    pub compactness: CompactnessReport,
    pub isometry: IsometryReport,
    pub injectivity: InjectivitySummary,
    pub invertibility: InvertibilityReport,
    pub fixed_points: FixedPointSummary,
    pub tolerance: f64,
    pub window: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Runs the whole battery over one symbol: indicator sequence and norm,
/// empirical cross-check, compactness, isometry, injectivity,
/// invertibility, and fixed-point support.
pub fn analyze(
    psi: &TreeFunction,
    p: Exponent,
    q: Exponent,
    cfg: &AnalysisConfig,
) -> Result<AnalysisReport> {
    let seq = indicator_sequence(psi, p, q);
    let depth = psi.tree().depth();
    let window = cfg.window.max(1);
    let head_end = (window - 1).min(depth);
    let b_head: Vec<(usize, f64)> = (0..=head_end).map(|n| (n, seq.values[n])).collect();
    let tail_start = (depth + 1).saturating_sub(window);
    let b_tail: Vec<(usize, f64)> = (tail_start..=depth).map(|n| (n, seq.values[n])).collect();

    let search = SearchConfig {
        depth,
        trials: cfg.trials,
        seed: cfg.seed,
        distribution: Distribution::SingleLevel,
    };
    let empirical = empirical_opnorm(psi, p, q, &search)?;
    let compactness = compactness_report(psi, p, q, window, cfg.tol)?;
    let isometry = isometry_verdict(psi, p, q, cfg.tol);
    let injectivity_full: InjectivityReport = injectivity_check(psi, cfg.tol);
    let invertibility: InvertibilityReport = invertibility_verdict(psi, p, q, cfg.tol).report;
    let fixed = fixed_point_support(psi, cfg.tol);

    Ok(AnalysisReport {
        case: seq.case,
        p,
        q,
        depth,
        b_head,
        b_tail,
        b_sup: seq.sup,
        argmax_level: seq.argmax_level,
        exactness: seq.exactness,
        empirical: EmpiricalSummary {
            value: empirical.value,
            source: empirical.source,
            agreement_margin: seq.sup - empirical.value,
            degenerate: empirical.degenerate,
        },
        compactness,
        isometry,
        injectivity: InjectivitySummary {
            injective: injectivity_full.injective,
            zero_set_size: injectivity_full.zero_set.len(),
        },
        invertibility,
        fixed_points: FixedPointSummary {
            non_e_size: fixed.len(),
        },
        tolerance: cfg.tol,
        window,
        trials: cfg.trials,
        seed: cfg.seed,
    })
}

fn fmt_levels(pairs: &[(usize, f64)]) -> String {
    pairs
        .iter()
        .map(|(n, b)| format!("b[{n}]={b}"))
        .collect::<Vec<_>>()
        .join("  ")
}

impl AnalysisReport {
    /// Line-oriented text form of the report.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "case: {} (p={}, q={}); rule: {}\n",
            self.case.label(),
            self.p,
            self.q,
            self.case.rule()
        ));
        out.push_str(&format!("b head:  {}\n", fmt_levels(&self.b_head)));
        out.push_str(&format!("b tail:  {}\n", fmt_levels(&self.b_tail)));
        out.push_str(&format!(
            "operator norm: {} ({}), attained at level {}\n",
            self.b_sup, self.exactness, self.argmax_level
        ));
        let source = match self.empirical.source {
            BestSource::WitnessLevel { level } => format!("witness at level {level}"),
            BestSource::RandomTrial { trial } => format!("random trial {trial}"),
            BestSource::NoneFound => "no nonzero ratio found".to_string(),
        };
        out.push_str(&format!(
            "empirical lower bound: {} ({source}), agreement margin {}\n",
            self.empirical.value, self.empirical.agreement_margin
        ));
        out.push_str(&format!(
            "compactness: {} (tail max {})\n",
            self.compactness.verdict, self.compactness.tail_max
        ));
        match (&self.isometry.worst_deviation, &self.isometry.offender) {
            (Some(dev), Some(v)) => out.push_str(&format!(
                "isometry: {}, worst | |psi|-1 | = {dev} at {v}\n",
                self.isometry.verdict
            )),
            _ => out.push_str(&format!(
                "isometry: {} (case {})\n",
                self.isometry.verdict,
                self.isometry.theorem_case.unwrap_or(0)
            )),
        }
        out.push_str(&format!(
            "injectivity: {} (zero-set size {})\n",
            if self.injectivity.injective {
                "injective"
            } else {
                "not injective"
            },
            self.injectivity.zero_set_size
        ));
        let bounds = match (
            self.invertibility.min_modulus,
            self.invertibility.max_modulus,
        ) {
            (Some(m), Some(mx)) => format!(", m={m}, M={mx}"),
            _ => String::new(),
        };
        out.push_str(&format!(
            "invertibility: {}{bounds}{}{}\n",
            self.invertibility.verdict,
            if self.invertibility.infimum_trend_to_zero {
                ", infimum-trend-to-zero"
            } else {
                ""
            },
            if self.invertibility.never_onto {
                ", never-onto"
            } else {
                ""
            },
        ));
        out.push_str(&format!(
            "fixed points: non-E size {}\n",
            self.fixed_points.non_e_size
        ));
        out.push_str(&format!(
            "tolerance {:e}, window {}, trials {}, seed {}\n",
            self.tolerance, self.window, self.trials, self.seed
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rel_close;
    use crate::operator::{CompactnessVerdict, InvertibilityVerdict, IsometryVerdict};
    use crate::tree::RootedTree;
    use num_complex::Complex64;
    use std::sync::Arc;

    #[test]
    fn constant_symbol_report() {
        let t = RootedTree::homogeneous(3, 4).unwrap().into_shared();
        let psi = TreeFunction::constant(Arc::clone(&t), Complex64::new(2.0, 0.0));
        let cfg = AnalysisConfig {
            trials: 16,
            ..AnalysisConfig::default()
        };
        let r = analyze(&psi, Exponent::Finite(2.0), Exponent::Finite(2.0), &cfg).unwrap();
        assert_eq!(r.case, OperatorCase::Equal);
        assert!(rel_close(r.b_sup, 2.0, 1e-13));
        assert!(rel_close(r.empirical.value, 2.0, 1e-12));
        assert!(r.empirical.agreement_margin.abs() <= 1e-12 * 2.0);
        assert_eq!(r.compactness.verdict, CompactnessVerdict::NotCompactEvidence);
        assert_eq!(r.isometry.verdict, IsometryVerdict::NotIsometry);
        assert_eq!(
            r.invertibility.verdict,
            InvertibilityVerdict::InvertibleEvidence
        );
        assert_eq!(r.invertibility.min_modulus, Some(2.0));
        assert_eq!(r.fixed_points.non_e_size, 0);
        assert!(r.injectivity.injective);
        let text = r.render_text();
        assert!(text.contains("case: EQUAL"));
        assert!(text.contains("operator norm: 2"));
    }

    #[test]
    fn machine_round_trip_is_identical() {
        let t = RootedTree::homogeneous(3, 5).unwrap().into_shared();
        let psi = crate::function::SymbolGen::Random(11).build(&t).unwrap();
        let cfg = AnalysisConfig {
            trials: 8,
            ..AnalysisConfig::default()
        };
        let r = analyze(&psi, Exponent::Finite(1.0), Exponent::Infinity, &cfg).unwrap();
        let json = serde_json::to_string_pretty(&r).unwrap();
        let parsed: AnalysisReport = serde_json::from_str(&json).unwrap();
        let json2 = serde_json::to_string_pretty(&parsed).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn exactness_display() {
        assert_eq!(Exactness::Exact.to_string(), "exact");
        assert_eq!(
            Exactness::Truncated { depth: 12 }.to_string(),
            "truncated at depth 12"
        );
    }
}
