//! Truncated rooted trees and their level structure.
//!
//! A tree is stored level by level: `level_sizes[n]` is the cardinality
//! `c_n` of the vertex set `D_n` at edge-distance `n` from the root, and
//! every vertex at level `n >= 1` records the index of its parent one
//! level up. All norm and operator formulas downstream depend only on
//! this level structure and on per-vertex values.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Positional identity of a vertex: `level` is the edge-distance from the
/// root, `index` the 0-based position inside its level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId {
    pub level: usize,
    pub index: usize,
}

impl VertexId {
    pub const ROOT: VertexId = VertexId { level: 0, index: 0 };

    pub fn new(level: usize, index: usize) -> Self {
        VertexId { level, index }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.level, self.index)
    }
}

/// A rooted tree truncated at a finite depth.
///
/// Immutable after construction; share across threads with [`Arc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    /// `c_0 ..= c_depth`; `c_0 == 1`.
    level_sizes: Vec<u64>,
    /// `parents[n]` maps each vertex index at level `n + 1` to its parent
    /// index at level `n`.
    parents: Vec<Vec<usize>>,
}

/// A single invariant violation found by [`RootedTree::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Root level size differs from 1.
    RootLevelSize { size: u64 },
    /// Declared `c_n` does not match the parent list length at level `n`.
    LevelSizeMismatch {
        level: usize,
        declared: u64,
        actual: usize,
    },
    /// A level with no vertices below the truncation depth.
    EmptyLevel { level: usize },
    /// A parent index that refers past the previous level.
    DanglingParent {
        level: usize,
        index: usize,
        parent: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RootLevelSize { size } => {
                write!(f, "root level size {size} != 1")
            }
            Violation::LevelSizeMismatch {
                level,
                declared,
                actual,
            } => write!(
                f,
                "level {level}: declared size {declared} but parent list has {actual} entries"
            ),
            Violation::EmptyLevel { level } => write!(f, "level {level} is empty"),
            Violation::DanglingParent {
                level,
                index,
                parent,
            } => write!(
                f,
                "vertex ({level}, {index}) points at missing parent index {parent}"
            ),
        }
    }
}

/// Level sizes of the `k`-homogeneous tree truncated at `depth`:
/// `c_0 = 1`, `c_1 = k`, `c_n = k (k-1)^{n-1}`.
///
/// Computed with checked integer arithmetic before anything is allocated,
/// so overflow is reported by level rather than by a failed allocation.
pub fn homogeneous_level_sizes(k: u64, depth: usize) -> Result<Vec<u64>> {
    if k < 2 {
        return Err(Error::InvalidDegree(k));
    }
    let mut sizes = Vec::with_capacity(depth + 1);
    sizes.push(1u64);
    let mut current = 1u64;
    for level in 1..=depth {
        let factor = if level == 1 { k } else { k - 1 };
        current = current
            .checked_mul(factor)
            .ok_or(Error::Overflow { level })?;
        sizes.push(current);
    }
    Ok(sizes)
}

impl RootedTree {
    /// The root-only tree.
    pub fn root_only() -> Self {
        RootedTree {
            level_sizes: vec![1],
            parents: Vec::new(),
        }
    }

    /// Builds the `k`-homogeneous tree truncated at `depth`: the root has
    /// `k` children and every other non-leaf vertex has `k - 1`, so every
    /// vertex of the infinite tree has exactly `k` neighbours. Children
    /// are laid out contiguously: children of parent index `i` precede
    /// children of parent index `i + 1`.
    pub fn homogeneous(k: u64, depth: usize) -> Result<Self> {
        let level_sizes = homogeneous_level_sizes(k, depth)?;
        let mut parents = Vec::with_capacity(depth);
        for (level, &size) in level_sizes.iter().enumerate().skip(1) {
            let arity = if level == 1 { k } else { k - 1 } as usize;
            let mut list = Vec::with_capacity(size as usize);
            for child in 0..size as usize {
                list.push(child / arity);
            }
            parents.push(list);
        }
        Ok(RootedTree {
            level_sizes,
            parents,
        })
    }

    /// Builds a tree from explicit parent lists; `levels[n]` holds the
    /// parent indices of the vertices at level `n + 1`. The root level is
    /// implicit. Trailing empty levels are trimmed; an empty level with a
    /// nonempty one below it is a structure error, as is any parent index
    /// that refers past the level above.
    pub fn from_parent_lists(levels: Vec<Vec<usize>>) -> Result<Self> {
        let mut levels = levels;
        while levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        let mut level_sizes = vec![1u64];
        for (i, list) in levels.iter().enumerate() {
            let level = i + 1;
            if list.is_empty() {
                return Err(Error::structure(
                    level,
                    0,
                    "empty level followed by a nonempty level",
                ));
            }
            let above = level_sizes[level - 1] as usize;
            for (index, &parent) in list.iter().enumerate() {
                if parent >= above {
                    return Err(Error::structure(
                        level,
                        index,
                        format!("parent index {parent} out of range (level {} has {above} vertices)", level - 1),
                    ));
                }
            }
            level_sizes.push(list.len() as u64);
        }
        Ok(RootedTree {
            level_sizes,
            parents: levels,
        })
    }

    /// Assembles a tree from raw parts without any validation. Intended
    /// for diagnostics and mutation tests; run [`RootedTree::validate`] to
    /// inspect the result.
    pub fn from_raw_parts(level_sizes: Vec<u64>, parents: Vec<Vec<usize>>) -> Self {
        RootedTree {
            level_sizes,
            parents,
        }
    }

    /// Checks every structural invariant and reports all violations found;
    /// an empty report means the tree is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        match self.level_sizes.first() {
            Some(&1) => {}
            Some(&size) => violations.push(Violation::RootLevelSize { size }),
            None => violations.push(Violation::RootLevelSize { size: 0 }),
        }
        for (n, &size) in self.level_sizes.iter().enumerate() {
            if size == 0 {
                violations.push(Violation::EmptyLevel { level: n });
            }
            if n >= 1 {
                let actual = self.parents.get(n - 1).map_or(0, Vec::len);
                if actual as u64 != size {
                    violations.push(Violation::LevelSizeMismatch {
                        level: n,
                        declared: size,
                        actual,
                    });
                }
            }
        }
        if self.parents.len() + 1 > self.level_sizes.len() {
            for n in self.level_sizes.len()..=self.parents.len() {
                violations.push(Violation::LevelSizeMismatch {
                    level: n,
                    declared: 0,
                    actual: self.parents[n - 1].len(),
                });
            }
        }
        for (i, list) in self.parents.iter().enumerate() {
            let level = i + 1;
            let above = self
                .level_sizes
                .get(level - 1)
                .copied()
                .unwrap_or(0) as usize;
            for (index, &parent) in list.iter().enumerate() {
                if parent >= above {
                    violations.push(Violation::DanglingParent {
                        level,
                        index,
                        parent,
                    });
                }
            }
        }
        violations
    }

    /// Deepest materialized level.
    pub fn depth(&self) -> usize {
        self.level_sizes.len().saturating_sub(1)
    }

    /// `c_n`, the number of vertices at level `n`.
    ///
    /// Panics if `n` exceeds the truncation depth.
    pub fn level_size(&self, n: usize) -> u64 {
        self.level_sizes[n]
    }

    /// All level sizes `c_0 ..= c_depth`.
    pub fn level_sizes(&self) -> &[u64] {
        &self.level_sizes
    }

    /// Total number of materialized vertices.
    pub fn vertex_count(&self) -> u64 {
        self.level_sizes.iter().sum()
    }

    /// `c_n^e` evaluated in the log domain.
    pub fn level_size_pow(&self, n: usize, e: f64) -> f64 {
        crate::num::pow_u64(self.level_sizes[n], e)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.level < self.level_sizes.len() && (v.index as u64) < self.level_sizes[v.level]
    }

    /// Parent of `v`, or `None` for the root.
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        if v.level == 0 || !self.contains(v) {
            return None;
        }
        Some(VertexId::new(v.level - 1, self.parents[v.level - 1][v.index]))
    }

    /// Parent lists in the shape accepted by [`RootedTree::from_parent_lists`].
    pub fn parent_lists(&self) -> &[Vec<usize>] {
        &self.parents
    }

    /// Vertices in lexicographic `(level, index)` order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.level_sizes
            .iter()
            .enumerate()
            .flat_map(|(level, &size)| {
                (0..size as usize).map(move |index| VertexId::new(level, index))
            })
    }

    /// Shared handle, the form every [`crate::function::TreeFunction`]
    /// holds.
    pub fn into_shared(self) -> Arc<RootedTree> {
        Arc::new(self)
    }

    /// True when the materialized level sizes look like an unbounded
    /// sequence: the last `min(3, depth)` consecutive pairs strictly
    /// increase. Unboundedness of `{c_n}` is not decidable from a
    /// truncation; this is the evidence heuristic used by verdicts that
    /// depend on it.
    pub fn unbounded_evidence(&self) -> bool {
        let depth = self.depth();
        if depth == 0 {
            return false;
        }
        let pairs = depth.min(3);
        (depth - pairs..depth).all(|n| self.level_sizes[n + 1] > self.level_sizes[n])
    }

    /// Serializes to the `tree v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::from("tree v1\n");
        out.push_str(&format!("depth {}\n", self.depth()));
        for (i, list) in self.parents.iter().enumerate() {
            out.push_str(&format!("level {}:", i + 1));
            for p in list {
                out.push_str(&format!(" {p}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `tree v1` text format, or the single-line shorthand
    /// `homogeneous K D`.
    ///
    /// ```text
    /// tree v1
    /// depth 2
    /// level 1: 0 0
    /// level 2: 0 1 1
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (first_no, first) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty tree file"))?;

        if let Some(rest) = first.strip_prefix("homogeneous ") {
            let mut it = rest.split_whitespace();
            let k: u64 = it
                .next()
                .ok_or_else(|| Error::parse(first_no, "expected `homogeneous K D`"))?
                .parse()
                .map_err(|_| Error::parse(first_no, "invalid degree in `homogeneous K D`"))?;
            let depth: usize = it
                .next()
                .ok_or_else(|| Error::parse(first_no, "expected `homogeneous K D`"))?
                .parse()
                .map_err(|_| Error::parse(first_no, "invalid depth in `homogeneous K D`"))?;
            if it.next().is_some() {
                return Err(Error::parse(first_no, "trailing tokens after `homogeneous K D`"));
            }
            if lines.next().is_some() {
                return Err(Error::parse(
                    first_no + 1,
                    "homogeneous shorthand must be the only line",
                ));
            }
            return RootedTree::homogeneous(k, depth);
        }

        if first != "tree v1" {
            return Err(Error::parse(
                first_no,
                format!("expected header `tree v1`, got `{first}`"),
            ));
        }
        let (depth_no, depth_line) = lines
            .next()
            .ok_or_else(|| Error::parse(first_no + 1, "missing `depth D` line"))?;
        let depth: usize = depth_line
            .strip_prefix("depth ")
            .ok_or_else(|| Error::parse(depth_no, "expected `depth D`"))?
            .trim()
            .parse()
            .map_err(|_| Error::parse(depth_no, "invalid depth value"))?;

        let mut levels: Vec<Vec<usize>> = Vec::with_capacity(depth);
        for expect in 1..=depth {
            let (line_no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(depth_no + expect, format!("missing `level {expect}:` line")))?;
            let rest = line
                .strip_prefix("level ")
                .ok_or_else(|| Error::parse(line_no, format!("expected `level {expect}: ...`")))?;
            let (label, body) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(line_no, "missing `:` after level number"))?;
            let n: usize = label
                .trim()
                .parse()
                .map_err(|_| Error::parse(line_no, "invalid level number"))?;
            if n != expect {
                return Err(Error::parse(
                    line_no,
                    format!("levels out of order: expected {expect}, got {n}"),
                ));
            }
            let mut list = Vec::new();
            for tok in body.split_whitespace() {
                let parent: usize = tok.parse().map_err(|_| {
                    Error::parse(line_no, format!("invalid parent index `{tok}`"))
                })?;
                list.push(parent);
            }
            levels.push(list);
        }
        if let Some((line_no, line)) = lines.next() {
            return Err(Error::parse(
                line_no,
                format!("unexpected trailing line `{line}`"),
            ));
        }
        RootedTree::from_parent_lists(levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// BFS enumeration of the k-homogeneous tree: independent of the
    /// closed-form level sizes used by the builder.
    fn bfs_homogeneous_sizes(k: u64, depth: usize) -> Vec<u64> {
        let mut sizes = vec![1u64];
        let mut frontier = 1u64;
        for level in 1..=depth {
            let arity = if level == 1 { k } else { k - 1 };
            frontier *= arity;
            sizes.push(frontier);
        }
        sizes
    }

    #[test]
    fn homogeneous_examples() {
        assert_eq!(
            RootedTree::homogeneous(2, 3).unwrap().level_sizes(),
            &[1, 2, 2, 2]
        );
        assert_eq!(
            RootedTree::homogeneous(3, 3).unwrap().level_sizes(),
            &bfs_homogeneous_sizes(3, 3)[..]
        );
        assert_eq!(
            RootedTree::homogeneous(3, 3).unwrap().level_sizes(),
            &[1, 3, 6, 12]
        );
        assert_eq!(RootedTree::homogeneous(2, 0).unwrap().level_sizes(), &[1]);
    }

    #[test]
    fn homogeneous_recurrence_and_count() {
        for k in 2..=5u64 {
            for depth in 0..=6usize {
                let tree = RootedTree::homogeneous(k, depth).unwrap();
                let c = tree.level_sizes();
                assert_eq!(c, &bfs_homogeneous_sizes(k, depth)[..]);
                if depth >= 1 {
                    assert_eq!(c[1], k * c[0]);
                }
                for n in 1..depth {
                    assert_eq!(c[n + 1], (k - 1) * c[n]);
                }
                // Closed-form vertex count for k > 2; BFS covers k = 2.
                if k > 2 && depth >= 1 {
                    let expected = 1 + k * ((k - 1).pow(depth as u32) - 1) / (k - 2);
                    assert_eq!(tree.vertex_count(), expected);
                }
            }
        }
    }

    #[test]
    fn homogeneous_child_arity() {
        let k = 3u64;
        let tree = RootedTree::homogeneous(k, 4).unwrap();
        for level in 1..=tree.depth() {
            let mut child_counts = vec![0u64; tree.level_size(level - 1) as usize];
            for &p in &tree.parent_lists()[level - 1] {
                child_counts[p] += 1;
            }
            let expected = if level == 1 { k } else { k - 1 };
            assert!(child_counts.iter().all(|&c| c == expected));
        }
    }

    #[test]
    fn degree_below_two_rejected() {
        assert!(matches!(
            RootedTree::homogeneous(1, 2),
            Err(Error::InvalidDegree(1))
        ));
        assert!(matches!(
            RootedTree::homogeneous(0, 0),
            Err(Error::InvalidDegree(0))
        ));
    }

    #[test]
    fn overflow_names_first_offending_level() {
        // c_n = 3 * 2^{n-1}; c_63 = 3 * 2^62 still fits u64, c_64 does not.
        let err = homogeneous_level_sizes(3, 70).unwrap_err();
        assert!(matches!(err, Error::Overflow { level: 64 }));
        assert!(matches!(
            RootedTree::homogeneous(3, 70),
            Err(Error::Overflow { level: 64 })
        ));
        assert!(homogeneous_level_sizes(3, 63).is_ok());
    }

    #[test]
    fn parent_list_examples() {
        let tree = RootedTree::from_parent_lists(vec![vec![0, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(tree.level_sizes(), &[1, 2, 3]);
        assert_eq!(
            tree.parent(VertexId::new(2, 2)),
            Some(VertexId::new(1, 1))
        );
        assert_eq!(tree.parent(VertexId::ROOT), None);

        let err = RootedTree::from_parent_lists(vec![vec![0], vec![1]]).unwrap_err();
        match err {
            Error::Structure { level, index, .. } => {
                assert_eq!((level, index), (2, 0));
            }
            other => panic!("unexpected error {other:?}"),
        }

        assert_eq!(
            RootedTree::from_parent_lists(vec![]).unwrap().level_sizes(),
            &[1]
        );
    }

    #[test]
    fn interior_empty_level_rejected_trailing_trimmed() {
        let err = RootedTree::from_parent_lists(vec![vec![0], vec![], vec![0]]).unwrap_err();
        assert!(matches!(err, Error::Structure { level: 2, .. }));
        let tree = RootedTree::from_parent_lists(vec![vec![0], vec![]]).unwrap();
        assert_eq!(tree.level_sizes(), &[1, 1]);
    }

    #[test]
    fn validate_clean_tree() {
        let tree = RootedTree::homogeneous(3, 2).unwrap();
        assert!(tree.validate().is_empty());
    }

    #[test]
    fn validate_reports_forced_corruptions() {
        let base = RootedTree::homogeneous(3, 2).unwrap();

        let bad_root = RootedTree::from_raw_parts(vec![2, 3, 6], base.parent_lists().to_vec());
        assert!(bad_root
            .validate()
            .contains(&Violation::RootLevelSize { size: 2 }));

        let mut short = base.parent_lists().to_vec();
        short[1].pop();
        let bad_len = RootedTree::from_raw_parts(vec![1, 3, 6], short);
        assert!(bad_len.validate().iter().any(|v| matches!(
            v,
            Violation::LevelSizeMismatch { level: 2, declared: 6, actual: 5 }
        )));

        let mut dangling = base.parent_lists().to_vec();
        dangling[1][0] = 9;
        let bad_parent = RootedTree::from_raw_parts(vec![1, 3, 6], dangling);
        assert!(bad_parent.validate().contains(&Violation::DanglingParent {
            level: 2,
            index: 0,
            parent: 9
        }));

        let empty = RootedTree::from_raw_parts(vec![1, 0, 6], base.parent_lists().to_vec());
        assert!(empty
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::EmptyLevel { level: 1 })));
    }

    #[test]
    fn text_round_trip() {
        let tree = RootedTree::from_parent_lists(vec![vec![0, 0], vec![0, 1, 1]]).unwrap();
        let text = tree.to_text();
        assert_eq!(text, "tree v1\ndepth 2\nlevel 1: 0 0\nlevel 2: 0 1 1\n");
        assert_eq!(RootedTree::parse(&text).unwrap(), tree);

        let root = RootedTree::root_only();
        assert_eq!(RootedTree::parse(&root.to_text()).unwrap(), root);
    }

    #[test]
    fn shorthand_parse() {
        let tree = RootedTree::parse("homogeneous 3 2\n").unwrap();
        assert_eq!(tree, RootedTree::homogeneous(3, 2).unwrap());
        assert!(matches!(
            RootedTree::parse("homogeneous 1 4"),
            Err(Error::InvalidDegree(1))
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = RootedTree::parse("tree v1\ndepth 2\nlevel 1: 0 0\nlevel 2: 0 x\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected error {other:?}"),
        }
        let err = RootedTree::parse("tree v2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn unbounded_evidence_heuristic() {
        assert!(RootedTree::homogeneous(3, 6).unwrap().unbounded_evidence());
        assert!(!RootedTree::homogeneous(2, 6).unwrap().unbounded_evidence());
        assert!(!RootedTree::root_only().unbounded_evidence());
        // path tree: c_n constant
        let path = RootedTree::from_parent_lists(vec![vec![0], vec![0], vec![0]]).unwrap();
        assert!(!path.unbounded_evidence());
    }

    #[test]
    fn vertices_are_lexicographic() {
        let tree = RootedTree::homogeneous(2, 2).unwrap();
        let all: Vec<_> = tree.vertices().collect();
        assert_eq!(all.len(), 5);
        assert_eq!(all[0], VertexId::ROOT);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }
}
