//! Distance requirement matrices.
//!
//! Entry (i, j) is the parity distance that messages `u_i` and `u_j` still
//! need once their own Hamming distance is counted. For a problem with
//! sorted distances d_1 <= ... <= d_H, the binding level for a pair is the
//! largest h whose partition separates it.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::partition::{join_many, Partition};
use crate::space::{distance, FieldVector, Space};

/// H partitions of one space paired with their required distances, sorted by
/// distance ascending (stable).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfcpcProblem {
    space: Space,
    partitions: Vec<Partition>,
    distances: Vec<usize>,
    original_order: Vec<usize>,
}

/// Stably sorts `(partition, distance)` pairs by distance and records where
/// each pair came from.
pub fn canonicalize_problem(
    partitions: Vec<Partition>,
    distances: Vec<usize>,
) -> Result<GfcpcProblem> {
    if partitions.is_empty() {
        return Err(Error::Input("a problem needs at least one partition".into()));
    }
    if partitions.len() != distances.len() {
        return Err(Error::Input(format!(
            "{} partitions but {} distances",
            partitions.len(),
            distances.len()
        )));
    }
    if let Some(h) = distances.iter().position(|&d| d == 0) {
        return Err(Error::Input(format!(
            "distance requirement {} must be positive",
            h + 1
        )));
    }
    let space = partitions[0].space();
    if let Some(p) = partitions.iter().find(|p| p.space() != space) {
        return Err(Error::Shape(format!(
            "partitions over {} and {} in one problem",
            space,
            p.space()
        )));
    }
    let mut order: Vec<usize> = (0..partitions.len()).collect();
    order.sort_by_key(|&i| distances[i]);
    let mut slots: Vec<Option<Partition>> = partitions.into_iter().map(Some).collect();
    let sorted_parts = order.iter().map(|&i| slots[i].take().unwrap()).collect();
    let sorted_dist = order.iter().map(|&i| distances[i]).collect();
    Ok(GfcpcProblem {
        space,
        partitions: sorted_parts,
        distances: sorted_dist,
        original_order: order,
    })
}

impl GfcpcProblem {
    /// A single-partition (FCPC) problem.
    pub fn single(partition: Partition, distance: usize) -> Result<Self> {
        canonicalize_problem(vec![partition], vec![distance])
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Number of partitions, H.
    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn distances(&self) -> &[usize] {
        &self.distances
    }

    /// `original_order()[i]` is the caller's index of canonical entry `i`.
    pub fn original_order(&self) -> &[usize] {
        &self.original_order
    }

    pub fn max_distance(&self) -> usize {
        *self.distances.last().unwrap()
    }

    /// Correctable errors at level `h` (0-based): floor((d_h - 1) / 2).
    pub fn correctable(&self, h: usize) -> usize {
        (self.distances[h] - 1) / 2
    }

    /// Join of the partitions at levels `h..H` (0-based), the partition whose
    /// blocks must reach distance `d_h`.
    pub fn tail_join(&self, h: usize) -> Partition {
        join_many(&self.partitions[h..]).expect("tail of a nonempty problem")
    }

    /// Join of the partitions at the given 0-based levels.
    pub fn join_of(&self, levels: &[usize]) -> Result<Partition> {
        join_many(levels.iter().map(|&h| &self.partitions[h]))
    }

    /// Largest 0-based level whose partition separates the two ranks.
    pub(crate) fn binding_level(&self, a: usize, b: usize) -> Option<usize> {
        (0..self.len())
            .rev()
            .find(|&h| !self.partitions[h].same_block_rank(a, b))
    }

    /// The requirement matrix over every message in lexicographic order.
    pub fn full_drm(&self) -> Result<RequirementMatrix> {
        gfcpc_drm(self, &self.space.vectors()?)
    }
}

/// A symmetric matrix of pairwise parity-distance demands over an ordered
/// list of messages.
#[derive(Clone, PartialEq, Eq)]
pub struct RequirementMatrix {
    messages: Vec<FieldVector>,
    entries: Vec<usize>,
    /// 1-based level that produced each entry; `None` on the diagonal and for
    /// pairs that no level separates.
    source: Vec<Option<usize>>,
}

impl RequirementMatrix {
    /// Wraps explicit entries, checking that the matrix is square, symmetric
    /// and zero on the diagonal.
    pub fn new(messages: Vec<FieldVector>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let m = messages.len();
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Shape(format!(
                "requirement matrix must be {m}x{m} to match its messages"
            )));
        }
        for i in 0..m {
            if rows[i][i] != 0 {
                return Err(Error::Input(format!("diagonal entry {} is nonzero", i + 1)));
            }
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::Input(format!(
                        "entries ({}, {}) and ({}, {}) differ",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let entries = rows.into_iter().flatten().collect();
        Ok(RequirementMatrix {
            messages,
            entries,
            source: vec![None; m * m],
        })
    }

    /// A matrix without meaningful messages; rows are labelled by the binary
    /// expansion of their index.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        let m = rows.len();
        let width = (usize::BITS - m.saturating_sub(1).leading_zeros()).max(1) as usize;
        let space = Space::new(2, width)?;
        let messages = (0..m).map(|i| space.unrank(i)).collect();
        Self::new(messages, rows)
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn messages(&self) -> &[FieldVector] {
        &self.messages
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.len() + j]
    }

    /// The 1-based level h' behind entry (i, j), if any level separates the pair.
    pub fn source_level(&self, i: usize, j: usize) -> Option<usize> {
        self.source[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        let m = self.len();
        &self.entries[i * m..(i + 1) * m]
    }

    pub fn max_entry(&self) -> usize {
        self.entries.iter().copied().max().unwrap_or(0)
    }

    /// The principal submatrix on the given indices, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Result<Self> {
        let m = self.len();
        if let Some(&bad) = indices.iter().find(|&&i| i >= m) {
            return Err(Error::Shape(format!("index {bad} outside a {m}x{m} matrix")));
        }
        let mut seen = HashSet::new();
        if !indices.iter().all(|i| seen.insert(*i)) {
            return Err(Error::Input("submatrix indices repeat".into()));
        }
        let n = indices.len();
        let mut entries = Vec::with_capacity(n * n);
        let mut source = Vec::with_capacity(n * n);
        for &i in indices {
            for &j in indices {
                entries.push(self.get(i, j));
                source.push(self.source_level(i, j));
            }
        }
        Ok(RequirementMatrix {
            messages: indices.iter().map(|&i| self.messages[i].clone()).collect(),
            entries,
            source,
        })
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }
}

impl fmt::Debug for RequirementMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RequirementMatrix {}x{}", self.len(), self.len())?;
        for i in 0..self.len() {
            write!(f, "{} |", self.messages[i])?;
            for j in 0..self.len() {
                match self.source_level(i, j) {
                    Some(h) => write!(f, " ({})_{h}", self.get(i, j))?,
                    None => write!(f, " {}", self.get(i, j))?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn message_ranks(space: Space, msgs: &[FieldVector]) -> Result<Vec<usize>> {
    let mut seen = HashSet::new();
    msgs.iter()
        .map(|v| {
            space.check(v)?;
            let r = space.rank(v);
            if !seen.insert(r) {
                return Err(Error::Input(format!("message {v} listed twice")));
            }
            Ok(r)
        })
        .collect()
}

/// Requirement matrix of a single partition: `max(d - d(u_i, u_j), 0)` for
/// pairs in different blocks, zero otherwise.
pub fn single_drm(p: &Partition, d: usize, msgs: &[FieldVector]) -> Result<RequirementMatrix> {
    let ranks = message_ranks(p.space(), msgs)?;
    let m = msgs.len();
    let mut entries = vec![0; m * m];
    let mut source = vec![None; m * m];
    for i in 0..m {
        for j in 0..m {
            if i != j && !p.same_block_rank(ranks[i], ranks[j]) {
                let dist = distance(msgs[i].symbols(), msgs[j].symbols());
                entries[i * m + j] = d.saturating_sub(dist);
                source[i * m + j] = Some(1);
            }
        }
    }
    Ok(RequirementMatrix {
        messages: msgs.to_vec(),
        entries,
        source,
    })
}

/// Requirement matrix of a whole problem, with the binding level recorded
/// for every separated pair.
pub fn gfcpc_drm(prob: &GfcpcProblem, msgs: &[FieldVector]) -> Result<RequirementMatrix> {
    let ranks = message_ranks(prob.space(), msgs)?;
    let m = msgs.len();
    let mut entries = vec![0; m * m];
    let mut source = vec![None; m * m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            if let Some(h) = prob.binding_level(ranks[i], ranks[j]) {
                let dist = distance(msgs[i].symbols(), msgs[j].symbols());
                entries[i * m + j] = prob.distances()[h].saturating_sub(dist);
                source[i * m + j] = Some(h + 1);
            }
        }
    }
    Ok(RequirementMatrix {
        messages: msgs.to_vec(),
        entries,
        source,
    })
}

/// Entrywise maximum. The source level of an entry is the position (1-based)
/// of the last matrix in the sequence that has a source there.
pub fn entrywise_max(ms: &[RequirementMatrix]) -> Result<RequirementMatrix> {
    let first = ms
        .first()
        .ok_or_else(|| Error::Input("entrywise maximum of no matrices".into()))?;
    if let Some(bad) = ms.iter().find(|x| x.messages != first.messages) {
        return Err(Error::Shape(format!(
            "matrices over different message sequences ({} vs {} messages)",
            first.len(),
            bad.len()
        )));
    }
    let cells = first.entries.len();
    let mut entries = vec![0; cells];
    let mut source = vec![None; cells];
    for (pos, mat) in ms.iter().enumerate() {
        for c in 0..cells {
            entries[c] = entries[c].max(mat.entries[c]);
            if mat.source[c].is_some() {
                source[c] = Some(pos + 1);
            }
        }
    }
    Ok(RequirementMatrix {
        messages: first.messages.clone(),
        entries,
        source,
    })
}
