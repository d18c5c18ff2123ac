//! The spectral tree: a leveled, labeled, ordered tree whose level `k`
//! lists the bands (`A`, `B`) and gaps (`G`) of the `k`-th periodic
//! approximant in spectral order.
//!
//! Levels are stored as left-to-right arrays. Each vertex keeps the index of
//! its parent in the previous level and the contiguous range of its children
//! in the next one. The root (level -1) is implicit: the two vertices of
//! level 0 have no stored parent.
//!
//! Only the tree for positive coupling is built. The tree for negative
//! coupling is its mirror image (reverse every level).

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratcf::{convergents, ContinuedFraction, Convergent, Int, RatcfError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("depth {depth} needs {needed} digits, only {available} given")]
    NotEnoughDigits {
        depth: usize,
        needed: usize,
        available: usize,
    },
    #[error("level {level} is outside the built depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("no vertex at level {level}, position {position}")]
    NoSuchVertex { level: usize, position: usize },
    #[error("vertex at level {level}, position {position} is labeled {label}, expected G")]
    NotAGap {
        level: usize,
        position: usize,
        label: VertexLabel,
    },
    #[error(transparent)]
    Ratcf(#[from] RatcfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexLabel {
    A,
    B,
    G,
}

impl VertexLabel {
    pub fn is_band(self) -> bool {
        !matches!(self, VertexLabel::G)
    }

    pub fn as_char(self) -> char {
        match self {
            VertexLabel::A => 'A',
            VertexLabel::B => 'B',
            VertexLabel::G => 'G',
        }
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Address of a vertex: its level and its position within the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexId {
    pub level: usize,
    pub position: usize,
}

impl VertexId {
    pub fn new(level: usize, position: usize) -> Self {
        Self { level, position }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeVertex {
    pub label: VertexLabel,
    /// Position of the parent in the previous level; `None` on level 0.
    pub parent: Option<usize>,
    /// Children in the next level. Empty on the deepest built level.
    pub children: Range<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCounts {
    pub k: usize,
    pub z_a: usize,
    pub z_b: usize,
}

impl LevelCounts {
    pub fn bands(&self) -> usize {
        self.z_a + self.z_b
    }
}

#[derive(Debug, Clone)]
struct Level {
    vertices: Vec<TreeVertex>,
    // prefix_a[i] = number of A-vertices strictly left of position i
    prefix_a: Vec<usize>,
    prefix_b: Vec<usize>,
}

impl Level {
    fn from_vertices(vertices: Vec<TreeVertex>) -> Self {
        let mut prefix_a = Vec::with_capacity(vertices.len() + 1);
        let mut prefix_b = Vec::with_capacity(vertices.len() + 1);
        let (mut a, mut b) = (0, 0);
        prefix_a.push(0);
        prefix_b.push(0);
        for v in &vertices {
            match v.label {
                VertexLabel::A => a += 1,
                VertexLabel::B => b += 1,
                VertexLabel::G => {}
            }
            prefix_a.push(a);
            prefix_b.push(b);
        }
        Self {
            vertices,
            prefix_a,
            prefix_b,
        }
    }

    fn counts(&self, k: usize) -> LevelCounts {
        let n = self.vertices.len();
        LevelCounts {
            k,
            z_a: self.prefix_a[n],
            z_b: self.prefix_b[n],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralTree {
    digits: ContinuedFraction,
    depth: usize,
    levels: Vec<Level>,
    ladder: Vec<Convergent>,
}

/// Builds levels `0..=depth` from the digits `a_1..a_depth`.
pub fn build_tree(digits: &ContinuedFraction, depth: usize) -> Result<SpectralTree, TreeError> {
    if digits.len() < depth + 1 {
        return Err(TreeError::NotEnoughDigits {
            depth,
            needed: depth + 1,
            available: digits.len(),
        });
    }
    let ladder = convergents(digits, depth)?;

    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(Level::from_vertices(vec![
        TreeVertex {
            label: VertexLabel::A,
            parent: None,
            children: 0..0,
        },
        TreeVertex {
            label: VertexLabel::G,
            parent: None,
            children: 0..0,
        },
    ]));

    for k in 0..depth {
        let a_next = digits.digit(k + 1).expect("checked digit count") as usize;
        let current = &mut levels[k].vertices;
        let mut next = Vec::new();
        for (pos, v) in current.iter_mut().enumerate() {
            let start = next.len();
            match v.label {
                VertexLabel::G => next.push(TreeVertex {
                    label: VertexLabel::B,
                    parent: Some(pos),
                    children: 0..0,
                }),
                band => {
                    let m = if band == VertexLabel::A {
                        a_next - 1
                    } else {
                        a_next
                    };
                    for i in 0..(2 * m + 1) {
                        next.push(TreeVertex {
                            label: if i % 2 == 0 {
                                VertexLabel::G
                            } else {
                                VertexLabel::A
                            },
                            parent: Some(pos),
                            children: 0..0,
                        });
                    }
                }
            }
            v.children = start..next.len();
        }
        levels.push(Level::from_vertices(next));
    }

    let tree = SpectralTree {
        digits: digits.clone(),
        depth,
        levels,
        ladder,
    };
    for k in 0..=depth {
        let c = tree.levels[k].counts(k);
        assert_eq!(
            c.bands() as Int,
            tree.ladder[k].q,
            "band count at level {k} disagrees with q_k"
        );
    }
    Ok(tree)
}

impl SpectralTree {
    pub fn digits(&self) -> &ContinuedFraction {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Convergents `p_k/q_k` for every built level.
    pub fn convergents(&self) -> &[Convergent] {
        &self.ladder
    }

    pub fn convergent(&self, k: usize) -> Result<Convergent, TreeError> {
        self.check_level(k)?;
        Ok(self.ladder[k])
    }

    fn check_level(&self, k: usize) -> Result<(), TreeError> {
        if k > self.depth {
            return Err(TreeError::LevelOutOfRange {
                level: k,
                depth: self.depth,
            });
        }
        Ok(())
    }

    pub fn level(&self, k: usize) -> Result<&[TreeVertex], TreeError> {
        self.check_level(k)?;
        Ok(&self.levels[k].vertices)
    }

    pub fn level_len(&self, k: usize) -> usize {
        self.levels.get(k).map_or(0, |l| l.vertices.len())
    }

    pub fn vertex(&self, id: VertexId) -> Result<&TreeVertex, TreeError> {
        self.level(id.level)?
            .get(id.position)
            .ok_or(TreeError::NoSuchVertex {
                level: id.level,
                position: id.position,
            })
    }

    pub fn label(&self, id: VertexId) -> Result<VertexLabel, TreeError> {
        Ok(self.vertex(id)?.label)
    }

    /// Label string of a level, e.g. `"GAGAGB"`.
    pub fn labels(&self, k: usize) -> Result<String, TreeError> {
        Ok(self.level(k)?.iter().map(|v| v.label.as_char()).collect())
    }

    pub fn level_counts(&self, k: usize) -> Result<LevelCounts, TreeError> {
        self.check_level(k)?;
        Ok(self.levels[k].counts(k))
    }

    /// Numbers of A- and B-vertices strictly left of the G-vertex `v`.
    pub fn prefix_counts(&self, v: VertexId) -> Result<(usize, usize), TreeError> {
        self.expect_gap(v)?;
        let level = &self.levels[v.level];
        Ok((level.prefix_a[v.position], level.prefix_b[v.position]))
    }

    /// Number of band vertices strictly left of any vertex.
    pub fn bands_left_of(&self, v: VertexId) -> Result<usize, TreeError> {
        self.vertex(v)?;
        let level = &self.levels[v.level];
        Ok(level.prefix_a[v.position] + level.prefix_b[v.position])
    }

    pub(crate) fn expect_gap(&self, v: VertexId) -> Result<(), TreeError> {
        let label = self.label(v)?;
        if label != VertexLabel::G {
            return Err(TreeError::NotAGap {
                level: v.level,
                position: v.position,
                label,
            });
        }
        Ok(())
    }

    /// All G-vertices of level `k`, left to right.
    pub fn gaps_at(&self, k: usize) -> Result<Vec<VertexId>, TreeError> {
        Ok(self
            .level(k)?
            .iter()
            .enumerate()
            .filter(|(_, v)| v.label == VertexLabel::G)
            .map(|(i, _)| VertexId::new(k, i))
            .collect())
    }

    /// All band vertices of level `k`, left to right.
    pub fn bands_at(&self, k: usize) -> Result<Vec<VertexId>, TreeError> {
        Ok(self
            .level(k)?
            .iter()
            .enumerate()
            .filter(|(_, v)| v.label.is_band())
            .map(|(i, _)| VertexId::new(k, i))
            .collect())
    }

    pub fn parent(&self, v: VertexId) -> Result<Option<VertexId>, TreeError> {
        Ok(self
            .vertex(v)?
            .parent
            .map(|p| VertexId::new(v.level - 1, p)))
    }

    pub fn children(&self, v: VertexId) -> Result<Vec<VertexId>, TreeError> {
        Ok(self
            .vertex(v)?
            .children
            .clone()
            .map(|c| VertexId::new(v.level + 1, c))
            .collect())
    }

    pub fn leftmost_child(&self, v: VertexId) -> Result<Option<VertexId>, TreeError> {
        let r = &self.vertex(v)?.children;
        Ok((!r.is_empty()).then(|| VertexId::new(v.level + 1, r.start)))
    }

    pub fn rightmost_child(&self, v: VertexId) -> Result<Option<VertexId>, TreeError> {
        let r = &self.vertex(v)?.children;
        Ok((!r.is_empty()).then(|| VertexId::new(v.level + 1, r.end - 1)))
    }

    pub fn left_neighbor(&self, v: VertexId) -> Result<Option<VertexId>, TreeError> {
        self.vertex(v)?;
        Ok((v.position > 0).then(|| VertexId::new(v.level, v.position - 1)))
    }

    pub fn right_neighbor(&self, v: VertexId) -> Result<Option<VertexId>, TreeError> {
        self.vertex(v)?;
        Ok((v.position + 1 < self.level_len(v.level))
            .then(|| VertexId::new(v.level, v.position + 1)))
    }

    /// Proper band ancestors of `v`, nearest first.
    pub fn band_ancestors(&self, v: VertexId) -> Result<Vec<VertexId>, TreeError> {
        let mut out = Vec::new();
        let mut cur = self.parent(v)?;
        while let Some(p) = cur {
            if self.label(p)?.is_band() {
                out.push(p);
            }
            cur = self.parent(p)?;
        }
        Ok(out)
    }

    /// JSON-ready description: per level the label string and parent positions.
    pub fn to_document(&self) -> TreeDocument {
        TreeDocument {
            digits: self.digits.to_string(),
            depth: self.depth,
            levels: (0..=self.depth)
                .map(|k| {
                    let level = &self.levels[k];
                    let c = level.counts(k);
                    LevelDocument {
                        k,
                        p: self.ladder[k].p,
                        q: self.ladder[k].q,
                        z_a: c.z_a,
                        z_b: c.z_b,
                        labels: level.vertices.iter().map(|v| v.label.as_char()).collect(),
                        parents: level.vertices.iter().map(|v| v.parent).collect(),
                        indices: None,
                    }
                })
                .collect(),
        }
    }
}

/// Serialized form of a [`SpectralTree`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDocument {
    pub digits: String,
    pub depth: usize,
    pub levels: Vec<LevelDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDocument {
    pub k: usize,
    pub p: Int,
    pub q: Int,
    pub z_a: usize,
    pub z_b: usize,
    pub labels: String,
    /// Parent position in level `k - 1`; `null` on level 0 (the root).
    pub parents: Vec<Option<usize>>,
    /// Gap index per vertex (`null` for band vertices), when annotated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<Option<Int>>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(digits: &str, depth: usize) -> SpectralTree {
        build_tree(&digits.parse().unwrap(), depth).unwrap()
    }

    #[test]
    fn first_levels() {
        let t = tree("0,3,2", 2);
        assert_eq!(t.labels(0).unwrap(), "AG");
        assert_eq!(t.labels(1).unwrap(), "GAGAGB");
        let t = tree("0,1,2,3", 3);
        assert_eq!(t.labels(1).unwrap(), "GB");
        // B spawns 2*2+1 children, G spawns one B
        assert_eq!(t.labels(2).unwrap(), "BGAGAG");
    }

    #[test]
    fn level_counts_match_convergents() {
        let t = tree("0,3,2,1,2", 4);
        let c0 = t.level_counts(0).unwrap();
        assert_eq!((c0.z_a, c0.z_b), (1, 0));
        let c1 = t.level_counts(1).unwrap();
        assert_eq!((c1.z_a, c1.z_b), (2, 1));
        for k in 1..=4 {
            let c = t.level_counts(k).unwrap();
            assert_eq!(c.z_b as Int, t.convergent(k - 1).unwrap().q);
        }
        assert!(matches!(
            t.level_counts(5),
            Err(TreeError::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn prefix_counts_cases() {
        let t = tree("0,3,2,1,2", 4);
        assert_eq!(t.prefix_counts(VertexId::new(0, 1)).unwrap(), (1, 0));
        assert_eq!(t.prefix_counts(VertexId::new(1, 0)).unwrap(), (0, 0));
        assert_eq!(t.prefix_counts(VertexId::new(3, 0)).unwrap(), (0, 0));
        assert_eq!(t.prefix_counts(VertexId::new(1, 2)).unwrap(), (1, 0));
        assert!(matches!(
            t.prefix_counts(VertexId::new(1, 1)),
            Err(TreeError::NotAGap { .. })
        ));
        assert!(t.prefix_counts(VertexId::new(1, 99)).is_err());
    }

    #[test]
    fn too_few_digits() {
        assert!(matches!(
            build_tree(&"0,2".parse().unwrap(), 2),
            Err(TreeError::NotEnoughDigits { .. })
        ));
    }

    #[test]
    fn document_shape() {
        let doc = tree("0,2", 1).to_document();
        assert_eq!(doc.levels[1].labels, "GAGB");
        assert_eq!(
            doc.levels[1].parents,
            vec![Some(0), Some(0), Some(0), Some(1)]
        );
        assert_eq!(doc.levels[0].parents, vec![None, None]);
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"labels\":\"AG\""));
    }
}
