//! Complex-valued functions on the vertex set of a truncated tree.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::report::Exactness;
use crate::tree::{RootedTree, VertexId};

/// A function `f: T -> C` on a truncated tree, stored densely level by
/// level. Vertices omitted from a constructor are zero.
#[derive(Debug, Clone)]
pub struct TreeFunction {
    tree: Arc<RootedTree>,
    values: Vec<Vec<Complex64>>,
    /// Deepest level carrying a nonzero value; 0 for the zero function.
    support_depth: usize,
}

impl TreeFunction {
    pub fn zero(tree: Arc<RootedTree>) -> Self {
        let values = tree
            .level_sizes()
            .iter()
            .map(|&c| vec![Complex64::new(0.0, 0.0); c as usize])
            .collect();
        TreeFunction {
            tree,
            values,
            support_depth: 0,
        }
    }

    /// Builds from dense per-level values; lengths must match the level
    /// sizes exactly.
    pub fn from_values(tree: Arc<RootedTree>, values: Vec<Vec<Complex64>>) -> Result<Self> {
        if values.len() != tree.level_sizes().len() {
            return Err(Error::ValueShape {
                level: values.len().min(tree.depth()),
                got: values.len(),
                expected: tree.level_sizes().len(),
            });
        }
        for (n, level) in values.iter().enumerate() {
            if level.len() as u64 != tree.level_size(n) {
                return Err(Error::ValueShape {
                    level: n,
                    got: level.len(),
                    expected: tree.level_size(n) as usize,
                });
            }
        }
        let support_depth = tight_support_depth(&values);
        Ok(TreeFunction {
            tree,
            values,
            support_depth,
        })
    }

    /// Builds from sparse `(vertex, value)` entries; everything else is
    /// zero.
    pub fn from_entries(tree: Arc<RootedTree>, entries: &[(VertexId, Complex64)]) -> Result<Self> {
        let mut f = TreeFunction::zero(tree);
        for &(v, z) in entries {
            if !f.tree.contains(v) {
                return Err(Error::VertexRange {
                    level: v.level,
                    index: v.index,
                });
            }
            f.values[v.level][v.index] = z;
        }
        f.support_depth = tight_support_depth(&f.values);
        Ok(f)
    }

    /// The characteristic function of a single vertex.
    pub fn indicator(tree: Arc<RootedTree>, v: VertexId) -> Result<Self> {
        TreeFunction::from_entries(tree, &[(v, Complex64::new(1.0, 0.0))])
    }

    /// The constant function `c` on every materialized vertex.
    pub fn constant(tree: Arc<RootedTree>, c: Complex64) -> Self {
        let values = tree
            .level_sizes()
            .iter()
            .map(|&size| vec![c; size as usize])
            .collect::<Vec<_>>();
        let support_depth = tight_support_depth(&values);
        TreeFunction {
            tree,
            values,
            support_depth,
        }
    }

    pub fn tree(&self) -> &Arc<RootedTree> {
        &self.tree
    }

    pub fn support_depth(&self) -> usize {
        self.support_depth
    }

    pub fn is_zero(&self) -> bool {
        self.values
            .iter()
            .all(|level| level.iter().all(|z| z.norm_sqr() == 0.0))
    }

    /// Whether the truncated norm of this function is the exact supremum:
    /// true when the support ends strictly above the truncation depth, so
    /// the data is the whole (finitely supported) function rather than a
    /// window onto something deeper.
    pub fn norm_exactness(&self) -> Exactness {
        if self.is_zero() || self.support_depth < self.tree.depth() {
            Exactness::Exact
        } else {
            Exactness::Truncated {
                depth: self.tree.depth(),
            }
        }
    }

    pub fn value(&self, v: VertexId) -> Result<Complex64> {
        if !self.tree.contains(v) {
            return Err(Error::VertexRange {
                level: v.level,
                index: v.index,
            });
        }
        Ok(self.values[v.level][v.index])
    }

    pub fn level_values(&self, n: usize) -> &[Complex64] {
        &self.values[n]
    }

    /// Largest modulus over all materialized vertices.
    pub fn max_modulus(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `lambda * f`.
    pub fn scaled(&self, lambda: Complex64) -> TreeFunction {
        let values = self
            .values
            .iter()
            .map(|level| level.iter().map(|z| lambda * z).collect())
            .collect::<Vec<Vec<_>>>();
        let support_depth = tight_support_depth(&values);
        TreeFunction {
            tree: Arc::clone(&self.tree),
            values,
            support_depth,
        }
    }

    /// Pointwise sum; both functions must live on the same tree.
    pub fn try_add(&self, other: &TreeFunction) -> Result<TreeFunction> {
        ensure_same_tree(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect::<Vec<Vec<_>>>();
        let support_depth = tight_support_depth(&values);
        Ok(TreeFunction {
            tree: Arc::clone(&self.tree),
            values,
            support_depth,
        })
    }

    /// Applies `map` to every materialized value, keeping the tree.
    pub fn map(&self, mut map: impl FnMut(VertexId, Complex64) -> Complex64) -> TreeFunction {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(level, vals)| {
                vals.iter()
                    .enumerate()
                    .map(|(index, &z)| map(VertexId::new(level, index), z))
                    .collect()
            })
            .collect::<Vec<Vec<_>>>();
        let support_depth = tight_support_depth(&values);
        TreeFunction {
            tree: Arc::clone(&self.tree),
            values,
            support_depth,
        }
    }

    /// Nonzero entries in lexicographic `(level, index)` order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (VertexId, Complex64)> + '_ {
        self.values.iter().enumerate().flat_map(|(level, vals)| {
            vals.iter().enumerate().filter_map(move |(index, &z)| {
                (z.norm_sqr() != 0.0).then_some((VertexId::new(level, index), z))
            })
        })
    }

    /// Serializes to the `func v1` text format: one `n i re im` line per
    /// nonzero vertex, lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = String::from("func v1\n");
        for (v, z) in self.nonzero_entries() {
            out.push_str(&format!("{} {} {} {}\n", v.level, v.index, z.re, z.im));
        }
        out
    }

    /// Parses the `func v1` text format against a tree. Entries must be in
    /// strictly increasing lexicographic order; omitted vertices are zero.
    pub fn parse(text: &str, tree: Arc<RootedTree>) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (first_no, first) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty function file"))?;
        if first != "func v1" {
            return Err(Error::parse(
                first_no,
                format!("expected header `func v1`, got `{first}`"),
            ));
        }
        let mut f = TreeFunction::zero(tree);
        let mut last: Option<VertexId> = None;
        for (line_no, line) in lines {
            let mut it = line.split_whitespace();
            let mut field = |name: &str| {
                it.next()
                    .ok_or_else(|| Error::parse(line_no, format!("missing {name} field")))
            };
            let level: usize = field("level")?
                .parse()
                .map_err(|_| Error::parse(line_no, "invalid level"))?;
            let index: usize = field("index")?
                .parse()
                .map_err(|_| Error::parse(line_no, "invalid index"))?;
            let re: f64 = field("re")?
                .parse()
                .map_err(|_| Error::parse(line_no, "invalid real part"))?;
            let im: f64 = field("im")?
                .parse()
                .map_err(|_| Error::parse(line_no, "invalid imaginary part"))?;
            if it.next().is_some() {
                return Err(Error::parse(line_no, "trailing tokens after `n i re im`"));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::parse(line_no, "values must be finite"));
            }
            let v = VertexId::new(level, index);
            if !f.tree.contains(v) {
                return Err(Error::parse(
                    line_no,
                    format!("vertex ({level}, {index}) is not in the tree"),
                ));
            }
            if let Some(prev) = last {
                if v <= prev {
                    return Err(Error::parse(
                        line_no,
                        "entries must be in strictly increasing (level, index) order",
                    ));
                }
            }
            last = Some(v);
            f.values[level][index] = Complex64::new(re, im);
        }
        f.support_depth = tight_support_depth(&f.values);
        Ok(f)
    }
}

fn tight_support_depth(values: &[Vec<Complex64>]) -> usize {
    values
        .iter()
        .rposition(|level| level.iter().any(|z| z.norm_sqr() != 0.0))
        .unwrap_or(0)
}

pub(crate) fn ensure_same_tree(a: &TreeFunction, b: &TreeFunction) -> Result<()> {
    if Arc::ptr_eq(&a.tree, &b.tree) || a.tree == b.tree {
        Ok(())
    } else {
        Err(Error::TreeMismatch)
    }
}

/// Builtin symbol generators surfaced by the CLI; each realizes one of the
/// qualitative families the operator verdicts distinguish.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolGen {
    /// `psi(v) = c` everywhere.
    Constant(Complex64),
    /// `psi(v) = c_{|v|}^alpha`.
    LevelPower(f64),
    /// `psi(v) = 1 / (|v| + 1)`.
    LevelDecay,
    /// The characteristic function of level `n`.
    IndicatorLevel(usize),
    /// Uniform phases, moduli from the same heavy-tailed mixture the
    /// oracle samples; deterministic in the seed.
    Random(u64),
}

impl SymbolGen {
    pub fn build(&self, tree: &Arc<RootedTree>) -> Result<TreeFunction> {
        match *self {
            SymbolGen::Constant(c) => Ok(TreeFunction::constant(Arc::clone(tree), c)),
            SymbolGen::LevelPower(alpha) => {
                let values = (0..=tree.depth())
                    .map(|n| {
                        let x = tree.level_size_pow(n, alpha);
                        vec![Complex64::new(x, 0.0); tree.level_size(n) as usize]
                    })
                    .collect();
                TreeFunction::from_values(Arc::clone(tree), values)
            }
            SymbolGen::LevelDecay => {
                let values = (0..=tree.depth())
                    .map(|n| {
                        let x = 1.0 / (n as f64 + 1.0);
                        vec![Complex64::new(x, 0.0); tree.level_size(n) as usize]
                    })
                    .collect();
                TreeFunction::from_values(Arc::clone(tree), values)
            }
            SymbolGen::IndicatorLevel(n) => {
                if n > tree.depth() {
                    return Err(Error::LevelRange {
                        level: n,
                        depth: tree.depth(),
                    });
                }
                let values = (0..=tree.depth())
                    .map(|m| {
                        let x = if m == n { 1.0 } else { 0.0 };
                        vec![Complex64::new(x, 0.0); tree.level_size(m) as usize]
                    })
                    .collect();
                TreeFunction::from_values(Arc::clone(tree), values)
            }
            SymbolGen::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let values = (0..=tree.depth())
                    .map(|n| {
                        (0..tree.level_size(n) as usize)
                            .map(|_| random_complex(&mut rng))
                            .collect()
                    })
                    .collect();
                TreeFunction::from_values(Arc::clone(tree), values)
            }
        }
    }

    /// Parses `NAME[,PARAMS]`, e.g. `constant,2`, `level-power,-0.5`,
    /// `indicator,3`, `random,42`, `level-decay`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split(',').map(str::trim);
        let name = parts.next().unwrap_or("");
        let params: Vec<&str> = parts.collect();
        let arity_err = |want: &str| {
            Error::Parameter(format!("generator `{name}` expects {want}"))
        };
        match name {
            "constant" => {
                let re: f64 = params
                    .first()
                    .ok_or_else(|| arity_err("a value: constant,RE[,IM]"))?
                    .parse()
                    .map_err(|_| arity_err("a numeric value"))?;
                let im: f64 = match params.get(1) {
                    Some(s) => s.parse().map_err(|_| arity_err("a numeric value"))?,
                    None => 0.0,
                };
                if params.len() > 2 {
                    return Err(arity_err("at most two values"));
                }
                Ok(SymbolGen::Constant(Complex64::new(re, im)))
            }
            "level-power" => {
                let alpha: f64 = params
                    .first()
                    .ok_or_else(|| arity_err("an exponent: level-power,ALPHA"))?
                    .parse()
                    .map_err(|_| arity_err("a numeric exponent"))?;
                if params.len() > 1 {
                    return Err(arity_err("exactly one exponent"));
                }
                Ok(SymbolGen::LevelPower(alpha))
            }
            "level-decay" => {
                if !params.is_empty() {
                    return Err(arity_err("no parameters"));
                }
                Ok(SymbolGen::LevelDecay)
            }
            "indicator" => {
                let n: usize = params
                    .first()
                    .ok_or_else(|| arity_err("a level: indicator,N"))?
                    .parse()
                    .map_err(|_| arity_err("a level number"))?;
                if params.len() > 1 {
                    return Err(arity_err("exactly one level"));
                }
                Ok(SymbolGen::IndicatorLevel(n))
            }
            "random" => {
                let seed: u64 = params
                    .first()
                    .ok_or_else(|| arity_err("a seed: random,SEED"))?
                    .parse()
                    .map_err(|_| arity_err("an integer seed"))?;
                if params.len() > 1 {
                    return Err(arity_err("exactly one seed"));
                }
                Ok(SymbolGen::Random(seed))
            }
            other => Err(Error::Parameter(format!(
                "unknown generator `{other}` (expected constant, level-power, level-decay, indicator, random)"
            ))),
        }
    }
}

/// Uniform phase; modulus drawn from an even mixture of `U[0, 1]` and
/// `Exp(1)` so extreme values appear with useful frequency.
pub(crate) fn random_complex(rng: &mut impl Rng) -> Complex64 {
    let phase = rng.gen::<f64>() * std::f64::consts::TAU;
    let modulus = if rng.gen::<bool>() {
        rng.gen::<f64>()
    } else {
        -(1.0 - rng.gen::<f64>()).ln()
    };
    Complex64::from_polar(modulus, phase)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree() -> Arc<RootedTree> {
        RootedTree::homogeneous(3, 3).unwrap().into_shared()
    }

    #[test]
    fn support_depth_is_tight() {
        let t = tree();
        let f = TreeFunction::indicator(Arc::clone(&t), VertexId::new(2, 4)).unwrap();
        assert_eq!(f.support_depth(), 2);
        assert!(!f.is_zero());
        let z = TreeFunction::zero(t);
        assert_eq!(z.support_depth(), 0);
        assert!(z.is_zero());
    }

    #[test]
    fn from_values_checks_shape() {
        let t = tree();
        let err = TreeFunction::from_values(
            Arc::clone(&t),
            vec![vec![Complex64::new(1.0, 0.0)]; 2],
        )
        .unwrap_err();
        assert!(matches!(err, Error::ValueShape { .. }));
    }

    #[test]
    fn out_of_tree_entry_rejected() {
        let t = tree();
        let err =
            TreeFunction::indicator(Arc::clone(&t), VertexId::new(1, 3)).unwrap_err();
        assert!(matches!(err, Error::VertexRange { level: 1, index: 3 }));
    }

    #[test]
    fn text_round_trip_keeps_nonzeros() {
        let t = tree();
        let f = TreeFunction::from_entries(
            Arc::clone(&t),
            &[
                (VertexId::ROOT, Complex64::new(1.5, -0.25)),
                (VertexId::new(2, 3), Complex64::new(0.0, 2.0)),
            ],
        )
        .unwrap();
        let text = f.to_text();
        assert_eq!(text, "func v1\n0 0 1.5 -0.25\n2 3 0 2\n");
        let g = TreeFunction::parse(&text, Arc::clone(&t)).unwrap();
        assert_eq!(g.value(VertexId::ROOT).unwrap(), Complex64::new(1.5, -0.25));
        assert_eq!(g.value(VertexId::new(2, 3)).unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(g.value(VertexId::new(1, 1)).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(g.support_depth(), 2);
    }

    #[test]
    fn parse_rejects_disorder_and_bad_vertices() {
        let t = tree();
        let err = TreeFunction::parse("func v1\n1 0 1 0\n0 0 1 0\n", Arc::clone(&t)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = TreeFunction::parse("func v1\n9 0 1 0\n", Arc::clone(&t)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = TreeFunction::parse("func v1\n0 0 1\n", Arc::clone(&t)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = TreeFunction::parse("func v1\n0 0 nan 0\n", t).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn generators_produce_expected_profiles() {
        let t = tree();
        let c = SymbolGen::Constant(Complex64::new(2.0, 0.0)).build(&t).unwrap();
        assert_eq!(c.value(VertexId::new(3, 7)).unwrap().re, 2.0);

        let lp = SymbolGen::LevelPower(-0.5).build(&t).unwrap();
        let got = lp.value(VertexId::new(2, 0)).unwrap().re;
        assert!((got - 1.0 / 6f64.sqrt()).abs() < 1e-15);

        let ld = SymbolGen::LevelDecay.build(&t).unwrap();
        assert_eq!(ld.value(VertexId::new(3, 0)).unwrap().re, 0.25);

        let ind = SymbolGen::IndicatorLevel(1).build(&t).unwrap();
        assert_eq!(ind.value(VertexId::new(1, 2)).unwrap().re, 1.0);
        assert_eq!(ind.value(VertexId::ROOT).unwrap().re, 0.0);
        assert!(SymbolGen::IndicatorLevel(9).build(&t).is_err());

        let r1 = SymbolGen::Random(7).build(&t).unwrap();
        let r2 = SymbolGen::Random(7).build(&t).unwrap();
        for v in t.vertices() {
            assert_eq!(r1.value(v).unwrap(), r2.value(v).unwrap());
        }
    }

    #[test]
    fn generator_spec_parsing() {
        assert_eq!(
            SymbolGen::parse("constant,2").unwrap(),
            SymbolGen::Constant(Complex64::new(2.0, 0.0))
        );
        assert_eq!(
            SymbolGen::parse("constant,1,-1").unwrap(),
            SymbolGen::Constant(Complex64::new(1.0, -1.0))
        );
        assert_eq!(
            SymbolGen::parse("level-power,-0.25").unwrap(),
            SymbolGen::LevelPower(-0.25)
        );
        assert_eq!(SymbolGen::parse("level-decay").unwrap(), SymbolGen::LevelDecay);
        assert_eq!(
            SymbolGen::parse("indicator,3").unwrap(),
            SymbolGen::IndicatorLevel(3)
        );
        assert_eq!(SymbolGen::parse("random,9").unwrap(), SymbolGen::Random(9));
        assert!(SymbolGen::parse("bogus").is_err());
        assert!(SymbolGen::parse("constant").is_err());
        assert!(SymbolGen::parse("level-decay,1").is_err());
    }
}
