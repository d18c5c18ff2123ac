//! Gap indices on the spectral tree.
//!
//! Every G-vertex `v` at level `k` gets the count matrix
//!
//! ```text
//! Q_k(v) = | Z_A(k)  z_A(v) |
//!          | Z_B(k)  z_B(v) |
//! ```
//!
//! (level totals in the first column, counts strictly left of `v` in the
//! second). Its signed determinant `i_k(v) = (-1)^k det Q_k(v)` lies in
//! `[0, q_k)` and the gap index is the centered residue
//! `c_k(v) = i_k(v) mod* q_k`.
//!
//! The same index solves `c * p_k = n (mod q_k)` where `n = z_A(v) + z_B(v)`
//! is the number of bands below the gap; [`solve_diophantine`] computes it
//! directly from a modular inverse without building a tree.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratcf::{mod_inverse, mod_star, Int, RatcfError};
use crate::tree::{SpectralTree, TreeDocument, TreeError, VertexId, VertexLabel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexingError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Ratcf(#[from] RatcfError),
    #[error("G-vertex {0:?} has index 0 (an unbounded gap); no boundary path is defined")]
    ZeroIndex(VertexId),
    #[error("path from level {from} with {steps} steps runs past the built depth {depth}")]
    PathTooDeep {
        from: usize,
        steps: usize,
        depth: usize,
    },
    #[error("the B-child of {0:?} is missing a G-neighbor on the {1} side")]
    NeighborMissing(VertexId, &'static str),
    #[error("gap number {n} is outside 0..={q}")]
    GapNumberOutOfRange { n: Int, q: Int },
}

pub type Mat2 = [[Int; 2]; 2];

pub fn det(m: &Mat2) -> Int {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

fn sign(k: usize) -> Int {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QMatrix(pub Mat2);

impl QMatrix {
    pub fn det(&self) -> Int {
        det(&self.0)
    }

    pub fn level_column(&self) -> [Int; 2] {
        [self.0[0][0], self.0[1][0]]
    }

    pub fn prefix_column(&self) -> [Int; 2] {
        [self.0[0][1], self.0[1][1]]
    }
}

/// The digit matrix `T_k = ((a_k - 1, a_k), (1, 1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferDigitMatrix(pub Mat2);

impl TransferDigitMatrix {
    pub fn new(a: Int) -> Self {
        Self([[a - 1, a], [1, 1]])
    }

    pub fn det(&self) -> Int {
        det(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapIndex {
    pub level: usize,
    /// `i_k(v) = (-1)^k det Q_k(v)`.
    pub raw: Int,
    /// `c_k(v) = raw mod* q_k`.
    pub value: Int,
    pub q: Int,
}

impl GapIndex {
    /// The quantity conserved along the boundary path of this vertex:
    /// `raw` for positive indices, `raw - q` for negative ones.
    pub fn preserved(&self) -> Int {
        if self.value < 0 {
            self.raw - self.q
        } else {
            self.raw
        }
    }
}

pub fn q_matrix(tree: &SpectralTree, v: VertexId) -> Result<QMatrix, IndexingError> {
    let (z_a, z_b) = tree.prefix_counts(v)?;
    let c = tree.level_counts(v.level)?;
    Ok(QMatrix([
        [c.z_a as Int, z_a as Int],
        [c.z_b as Int, z_b as Int],
    ]))
}

pub fn gap_index(tree: &SpectralTree, v: VertexId) -> Result<GapIndex, IndexingError> {
    let q = tree.convergent(v.level)?.q;
    let raw = sign(v.level) * q_matrix(tree, v)?.det();
    Ok(GapIndex {
        level: v.level,
        raw,
        value: mod_star(raw, q)?,
        q,
    })
}

/// Index of the `n`-th gap of the `q`-periodic operator with frequency `p/q`:
/// the unique `c` in `[-q/2, q/2)` with `c * p = n (mod q)`.
///
/// `n = 0` and `n = q` (the unbounded gaps) give 0.
pub fn solve_diophantine(n: Int, p: Int, q: Int) -> Result<Int, IndexingError> {
    if q <= 0 {
        return Err(RatcfError::NonPositiveModulus(q).into());
    }
    if !(0..=q).contains(&n) {
        return Err(IndexingError::GapNumberOutOfRange { n, q });
    }
    let inv = mod_inverse(p, q)?;
    let residue = (n % q)
        .checked_mul(inv)
        .ok_or(RatcfError::Overflow)?
        .rem_euclid(q);
    Ok(mod_star(residue, q)?)
}

/// Matrices and derived identities around one G-vertex `v` at level `k`,
/// its B-child and that child's G-neighbors `u` (left) and `w` (right).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecursionReport {
    pub v: VertexId,
    pub u: VertexId,
    pub w: VertexId,
    pub q_v: QMatrix,
    pub q_u: QMatrix,
    pub q_w: QMatrix,
    pub transfer: TransferDigitMatrix,
    /// `Q(w) = Q(u) + ((0,0),(0,1))`.
    pub neighbor_step: bool,
    /// `Q(w) = T_{k+1} Q(v) + ((0,0),(0, k mod 2))`.
    pub transfer_step: bool,
    /// `i_k(v) = i_{k+1}(w)` for even `k`, `i_{k+1}(u)` for odd `k`.
    pub raw_relation: bool,
    /// `i_k(v) - q_k = i_{k+1}(u) - q_{k+1}` for even `k`, with `w` for odd `k`.
    pub shifted_relation: bool,
}

impl RecursionReport {
    pub fn passed(&self) -> bool {
        self.neighbor_step && self.transfer_step && self.raw_relation && self.shifted_relation
    }
}

pub fn verify_q_recursion(
    tree: &SpectralTree,
    v: VertexId,
) -> Result<RecursionReport, IndexingError> {
    tree.expect_gap(v)?;
    let k = v.level;
    let child = tree
        .leftmost_child(v)?
        .ok_or(IndexingError::Tree(TreeError::LevelOutOfRange {
            level: k + 1,
            depth: tree.depth(),
        }))?;
    let u = tree
        .left_neighbor(child)?
        .ok_or(IndexingError::NeighborMissing(v, "left"))?;
    let w = tree
        .right_neighbor(child)?
        .ok_or(IndexingError::NeighborMissing(v, "right"))?;

    let q_v = q_matrix(tree, v)?;
    let q_u = q_matrix(tree, u)?;
    let q_w = q_matrix(tree, w)?;
    let a = tree
        .digits()
        .digit(k + 1)
        .expect("built levels have digits");
    let transfer = TransferDigitMatrix::new(a);
    let parity = (k % 2) as Int;

    let neighbor_step = q_w.0 == mat_add(&q_u.0, &[[0, 0], [0, 1]]);
    let transfer_step = q_w.0 == mat_add(&mat_mul(&transfer.0, &q_v.0), &[[0, 0], [0, parity]]);

    let i_v = gap_index(tree, v)?;
    let i_u = gap_index(tree, u)?;
    let i_w = gap_index(tree, w)?;
    let (same, shifted) = if k.is_multiple_of(2) {
        (i_w, i_u)
    } else {
        (i_u, i_w)
    };
    Ok(RecursionReport {
        v,
        u,
        w,
        q_v,
        q_u,
        q_w,
        transfer,
        neighbor_step,
        transfer_step,
        raw_relation: i_v.raw == same.raw,
        shifted_relation: i_v.raw - i_v.q == shifted.raw - shifted.q,
    })
}

/// The tree document with the index `c_k(v)` filled in for every G-vertex.
pub fn annotated_document(tree: &SpectralTree) -> Result<TreeDocument, IndexingError> {
    let mut doc = tree.to_document();
    for level in &mut doc.levels {
        let indices = level
            .labels
            .chars()
            .enumerate()
            .map(|(pos, c)| match c {
                'G' => gap_index(tree, VertexId::new(level.k, pos)).map(|g| Some(g.value)),
                _ => Ok(None),
            })
            .collect::<Result<Vec<_>, _>>()?;
        level.indices = Some(indices);
    }
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathSide {
    LeftMost,
    RightMost,
}

impl PathSide {
    /// Branching rule for a G-vertex at `level` with a nonzero index.
    pub fn for_index(level: usize, value: Int) -> Option<Self> {
        match (level.is_multiple_of(2), value.signum()) {
            (_, 0) => None,
            (true, 1) | (false, -1) => Some(PathSide::RightMost),
            _ => Some(PathSide::LeftMost),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPath {
    pub origin: VertexId,
    pub side: PathSide,
    /// `v_0 = origin, v_1, v_2, ...`; even positions are G, odd are B.
    pub vertices: Vec<VertexId>,
}

/// Descends `steps` levels from the G-vertex `v`: first to its B-child, then
/// always to the right-most (or left-most) child, depending on the sign of
/// the index and the parity of the level.
pub fn boundary_path(
    tree: &SpectralTree,
    v: VertexId,
    steps: usize,
) -> Result<BoundaryPath, IndexingError> {
    let index = gap_index(tree, v)?;
    let side = PathSide::for_index(v.level, index.value).ok_or(IndexingError::ZeroIndex(v))?;
    if v.level + steps > tree.depth() {
        return Err(IndexingError::PathTooDeep {
            from: v.level,
            steps,
            depth: tree.depth(),
        });
    }
    let mut vertices = Vec::with_capacity(steps + 1);
    vertices.push(v);
    let mut cur = v;
    for _ in 0..steps {
        let next = match side {
            PathSide::LeftMost => tree.leftmost_child(cur)?,
            PathSide::RightMost => tree.rightmost_child(cur)?,
        }
        .expect("levels above the built depth have children");
        vertices.push(next);
        cur = next;
    }
    Ok(BoundaryPath {
        origin: v,
        side,
        vertices,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathRole {
    /// A G-vertex on the path itself (even position).
    OnPath,
    /// The G-neighbor of an odd-position B-vertex, on the path's side.
    Zigzag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConservationRecord {
    pub vertex: VertexId,
    pub role: PathRole,
    pub index: GapIndex,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConservationReport {
    pub origin: GapIndex,
    pub side: PathSide,
    pub records: Vec<ConservationRecord>,
}

impl ConservationReport {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

/// Checks that every G-vertex on the path carries the origin's index, and
/// that the zigzag neighbors carry the origin's preserved quantity (`i` for
/// positive indices, `i - q` for negative ones).
pub fn verify_conservation(
    tree: &SpectralTree,
    path: &BoundaryPath,
) -> Result<ConservationReport, IndexingError> {
    let origin = gap_index(tree, path.origin)?;
    let mut records = Vec::new();
    for (pos, &vertex) in path.vertices.iter().enumerate() {
        if pos % 2 == 0 {
            let record = if tree.label(vertex)? == VertexLabel::G {
                let index = gap_index(tree, vertex)?;
                ConservationRecord {
                    vertex,
                    role: PathRole::OnPath,
                    index,
                    passed: index.value == origin.value,
                }
            } else {
                // a band where a gap belongs: recorded against the origin
                ConservationRecord {
                    vertex,
                    role: PathRole::OnPath,
                    index: origin,
                    passed: false,
                }
            };
            records.push(record);
        } else {
            let zig = match path.side {
                PathSide::RightMost => tree.right_neighbor(vertex)?,
                PathSide::LeftMost => tree.left_neighbor(vertex)?,
            };
            let Some(zig) = zig else { continue };
            if tree.label(vertex)? != VertexLabel::B || tree.label(zig)? != VertexLabel::G {
                records.push(ConservationRecord {
                    vertex,
                    role: PathRole::Zigzag,
                    index: origin,
                    passed: false,
                });
                continue;
            }
            let index = gap_index(tree, zig)?;
            let preserved = if origin.value < 0 {
                index.raw - index.q
            } else {
                index.raw
            };
            records.push(ConservationRecord {
                vertex: zig,
                role: PathRole::Zigzag,
                index,
                passed: preserved == origin.preserved(),
            });
        }
    }
    Ok(ConservationReport {
        origin,
        side: path.side,
        records,
    })
}
