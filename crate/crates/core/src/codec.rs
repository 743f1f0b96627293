//! Systematic encodings and the constructions that produce them.

use std::fmt;

use crate::dcode::{min_length_dcode, SearchBudget};
use crate::drm::{GfcpcProblem, RequirementMatrix};
use crate::error::{BudgetExhausted, Error, Result};
use crate::partition::{join_many, Partition};
use crate::space::{distance, FieldVector, Space};

/// A parity of length r for every message of a space, indexed by rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystematicEncoding {
    space: Space,
    r: usize,
    parities: Vec<FieldVector>,
}

impl SystematicEncoding {
    /// `parities[i]` belongs to the message of rank `i`.
    pub fn new(space: Space, r: usize, parities: Vec<FieldVector>) -> Result<Self> {
        let size = space.size()?;
        if parities.len() != size {
            return Err(Error::Input(format!(
                "{} parities for the {} messages of {}",
                parities.len(),
                size,
                space
            )));
        }
        if let Some(p) = parities.iter().find(|p| p.len() != r || p.q() != space.q()) {
            return Err(Error::Input(format!(
                "parity {p} is not a length-{r} vector over q={}",
                space.q()
            )));
        }
        Ok(SystematicEncoding { space, r, parities })
    }

    /// The encoding with no parity at all.
    pub fn empty(space: Space) -> Result<Self> {
        let size = space.size()?;
        Self::new(space, 0, vec![FieldVector::zero(space.q(), 0); size])
    }

    /// Gives every member of each block of `p` the block's parity.
    pub fn block_constant(p: &Partition, r: usize, block_parities: &[FieldVector]) -> Result<Self> {
        if block_parities.len() != p.num_blocks() {
            return Err(Error::Shape(format!(
                "{} block parities for {} blocks",
                block_parities.len(),
                p.num_blocks()
            )));
        }
        let space = p.space();
        let parities = (0..space.size()?)
            .map(|i| block_parities[p.block_of_rank(i)].clone())
            .collect();
        Self::new(space, r, parities)
    }

    pub fn space(&self) -> Space {
        self.space
    }

    /// Redundancy: the parity length.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn parities(&self) -> &[FieldVector] {
        &self.parities
    }

    pub fn parity(&self, u: &FieldVector) -> Result<&FieldVector> {
        self.space.check(u)?;
        Ok(&self.parities[self.space.rank(u)])
    }

    /// The codeword (u, p(u)).
    pub fn encode(&self, u: &FieldVector) -> Result<FieldVector> {
        u.concat(self.parity(u)?)
    }

    /// This encoding's parity followed by `other`'s.
    pub fn append(&self, other: &SystematicEncoding) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::Shape(format!(
                "encodings over {} and {}",
                self.space, other.space
            )));
        }
        let parities = self
            .parities
            .iter()
            .zip(&other.parities)
            .map(|(a, b)| a.concat(b))
            .collect::<Result<_>>()?;
        Self::new(self.space, self.r + other.r, parities)
    }

    /// The first `len` parity symbols of every message.
    pub fn truncate(&self, len: usize) -> Result<Self> {
        if len > self.r {
            return Err(Error::Input(format!("cannot truncate length {} to {len}", self.r)));
        }
        let parities = self.parities.iter().map(|p| p.split(len).0).collect();
        Self::new(self.space, len, parities)
    }

    /// Whether every block of `p` carries a single parity.
    pub fn is_constant_on(&self, p: &Partition) -> bool {
        (0..p.num_blocks()).all(|b| {
            let ranks = p.block_ranks(b);
            ranks.iter().all(|&i| self.parities[i] == self.parities[ranks[0]])
        })
    }

    /// Codeword distance between the messages of ranks `a` and `b`.
    pub(crate) fn codeword_distance(&self, a: usize, b: usize) -> usize {
        let ua = self.space.unrank(a);
        let ub = self.space.unrank(b);
        distance(ua.symbols(), ub.symbols())
            + distance(self.parities[a].symbols(), self.parities[b].symbols())
    }
}

/// One unmet requirement: messages `u`, `v` lie in different blocks of the
/// partition at `level` (1-based, sorted order) but their codewords are only
/// `achieved` apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub level: usize,
    pub u: FieldVector,
    pub v: FieldVector,
    pub achieved: usize,
    pub required: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every pair of messages against every level it is separated at.
pub fn verify_gfcpc(enc: &SystematicEncoding, prob: &GfcpcProblem) -> Result<VerificationReport> {
    if enc.space() != prob.space() {
        return Err(Error::Shape(format!(
            "encoding over {} but problem over {}",
            enc.space(),
            prob.space()
        )));
    }
    let space = enc.space();
    let size = space.size()?;
    let mut violations = Vec::new();
    for a in 0..size {
        for b in a + 1..size {
            let got = enc.codeword_distance(a, b);
            for (h, (p, &need)) in prob.partitions().iter().zip(prob.distances()).enumerate() {
                if got < need && !p.same_block_rank(a, b) {
                    violations.push(Violation {
                        level: h + 1,
                        u: space.unrank(a),
                        v: space.unrank(b),
                        achieved: got,
                        required: need,
                    });
                }
            }
        }
    }
    violations.sort_by_key(|v| v.level);
    Ok(VerificationReport { violations })
}

/// How each construction step may assign parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepMode {
    /// One parity per block of the step's join partition.
    BlockConstant,
    /// Any parity per message; solves the message-level residual matrix.
    Free,
}

impl fmt::Display for StepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepMode::BlockConstant => "block-constant",
            StepMode::Free => "free",
        })
    }
}

/// One step of the multi-step construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionStep {
    /// 1-based level in sorted order.
    pub level: usize,
    pub distance: usize,
    /// Q_h, the join of this level's partition with every later one.
    pub partition: Partition,
    /// Parity appended by this step (r_h symbols per message).
    pub parity: SystematicEncoding,
}

impl ConstructionStep {
    pub fn redundancy(&self) -> usize {
        self.parity.r()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionTrace {
    pub mode: StepMode,
    pub steps: Vec<ConstructionStep>,
}

impl ConstructionTrace {
    pub fn redundancies(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.redundancy()).collect()
    }

    pub fn total_redundancy(&self) -> usize {
        self.steps.iter().map(|s| s.redundancy()).sum()
    }
}

/// A construction that ran out of search budget, with the steps it finished.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialConstruction {
    pub trace: ConstructionTrace,
    /// 1-based level whose step could not be solved.
    pub level: usize,
    pub exhausted: BudgetExhausted,
}

/// Demands between blocks of `q`: for blocks B, B', the largest shortfall
/// `d - d(u, v) - d(acc(u), acc(v))` over u in B, v in B'. Rows are labelled by
/// block representatives.
pub fn block_residual_drm(q: &Partition, d: usize, acc: &SystematicEncoding) -> Result<RequirementMatrix> {
    if q.space() != acc.space() {
        return Err(Error::Shape("partition and encoding over different spaces".into()));
    }
    let n = q.num_blocks();
    let size = q.space().size()?;
    let mut rows = vec![vec![0; n]; n];
    for a in 0..size {
        let ba = q.block_of_rank(a);
        for b in a + 1..size {
            let bb = q.block_of_rank(b);
            if ba != bb {
                let need = d.saturating_sub(acc.codeword_distance(a, b));
                if need > rows[ba][bb] {
                    rows[ba][bb] = need;
                    rows[bb][ba] = need;
                }
            }
        }
    }
    let reps = (0..n).map(|b| q.representative(b)).collect();
    RequirementMatrix::new(reps, rows)
}

/// Message-level shortfalls for pairs in different blocks of `q`.
fn free_residual_drm(q: &Partition, d: usize, acc: &SystematicEncoding) -> Result<RequirementMatrix> {
    let space = q.space();
    let size = space.size()?;
    let mut rows = vec![vec![0; size]; size];
    for a in 0..size {
        for b in a + 1..size {
            if !q.same_block_rank(a, b) {
                let need = d.saturating_sub(acc.codeword_distance(a, b));
                rows[a][b] = need;
                rows[b][a] = need;
            }
        }
    }
    RequirementMatrix::new(space.vectors()?, rows)
}

/// Shortest block-constant parity giving every cross-block pair of `p`
/// codeword distance `d`, on top of `acc`.
fn solve_step(
    p: &Partition,
    d: usize,
    acc: &SystematicEncoding,
    mode: StepMode,
    budget: &SearchBudget,
) -> Result<SystematicEncoding> {
    let q = p.space().q();
    match mode {
        StepMode::BlockConstant => {
            let drm = block_residual_drm(p, d, acc)?;
            let w = min_length_dcode(&drm, q, budget)?;
            SystematicEncoding::block_constant(p, w.length(), w.parities())
        }
        StepMode::Free => {
            let drm = free_residual_drm(p, d, acc)?;
            let w = min_length_dcode(&drm, q, budget)?;
            SystematicEncoding::new(p.space(), w.length(), w.into_parities())
        }
    }
}

/// Optimal block-constant FCPC for a single partition at distance `d`.
pub fn block_constant_fcpc(p: &Partition, d: usize, budget: &SearchBudget) -> Result<SystematicEncoding> {
    solve_step(p, d, &SystematicEncoding::empty(p.space())?, StepMode::BlockConstant, budget)
}

/// The H-step construction with block-constant steps.
pub fn multi_step_construct(
    prob: &GfcpcProblem,
    budget: &SearchBudget,
) -> Result<(SystematicEncoding, ConstructionTrace)> {
    multi_step_construct_with(prob, budget, StepMode::BlockConstant)
}

/// The H-step construction. Step h appends the shortest parity that lifts
/// every cross-block pair of Q_h = P_h ∨ ... ∨ P_H to codeword distance d_h,
/// counting the parity of earlier steps.
pub fn multi_step_construct_with(
    prob: &GfcpcProblem,
    budget: &SearchBudget,
    mode: StepMode,
) -> Result<(SystematicEncoding, ConstructionTrace)> {
    let mut acc = SystematicEncoding::empty(prob.space())?;
    let mut trace = ConstructionTrace {
        mode,
        steps: Vec::new(),
    };
    for h in 0..prob.len() {
        let q_h = prob.tail_join(h);
        let d = prob.distances()[h];
        let parity = match solve_step(&q_h, d, &acc, mode, budget) {
            Ok(p) => p,
            Err(Error::Budget(exhausted)) => {
                return Err(Error::Construction(Box::new(PartialConstruction {
                    trace,
                    level: h + 1,
                    exhausted,
                })))
            }
            Err(e) => return Err(e),
        };
        acc = acc.append(&parity)?;
        trace.steps.push(ConstructionStep {
            level: h + 1,
            distance: d,
            partition: q_h,
            parity,
        });
    }
    Ok((acc, trace))
}

/// A set partition of the levels {1..H}, each group listed ascending and
/// groups ordered by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexGrouping {
    groups: Vec<Vec<usize>>,
}

impl IndexGrouping {
    /// Validates that `groups` partitions {1..h}.
    pub fn new(h: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; h + 1];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::Input("empty group in grouping".into()));
            }
            for &i in g {
                if i == 0 || i > h {
                    return Err(Error::Input(format!("level {i} outside 1..={h}")));
                }
                if seen[i] {
                    return Err(Error::Input(format!("level {i} appears twice in grouping")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = (1..=h).find(|&i| !seen[i]) {
            return Err(Error::Input(format!("level {i} missing from grouping")));
        }
        let mut groups: Vec<Vec<usize>> = groups
            .into_iter()
            .map(|mut g| {
                g.sort_unstable();
                g
            })
            .collect();
        groups.sort_by_key(|g| g[0]);
        Ok(IndexGrouping { groups })
    }

    /// Parses `1,2|3`.
    pub fn parse(h: usize, text: &str) -> Result<Self> {
        let groups = text
            .split('|')
            .map(|g| {
                g.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Input(format!("bad level {x:?} in grouping {text:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(h, groups)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn finest(h: usize) -> Self {
        IndexGrouping {
            groups: (1..=h).map(|i| vec![i]).collect(),
        }
    }

    pub fn coarsest(h: usize) -> Self {
        IndexGrouping {
            groups: vec![(1..=h).collect()],
        }
    }
}

impl fmt::Display for IndexGrouping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self
            .groups
            .iter()
            .map(|g| g.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&text.join("|"))
    }
}

/// One group's code inside a grouped construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupCode {
    pub levels: Vec<usize>,
    pub distance: usize,
    pub encoding: SystematicEncoding,
}

/// Concatenates, for each group A, an optimal block-constant FCPC for the join
/// of the group's partitions at the group's largest distance. Levels are
/// 1-based in sorted order.
pub fn grouped_construct(
    prob: &GfcpcProblem,
    grouping: &IndexGrouping,
    budget: &SearchBudget,
) -> Result<(SystematicEncoding, Vec<GroupCode>)> {
    let h = prob.len();
    IndexGrouping::new(h, grouping.groups().to_vec())?;
    let mut acc = SystematicEncoding::empty(prob.space())?;
    let mut codes = Vec::new();
    for g in grouping.groups() {
        let join = join_many(g.iter().map(|&i| &prob.partitions()[i - 1]))?;
        let d = g.iter().map(|&i| prob.distances()[i - 1]).max().unwrap();
        let enc = block_constant_fcpc(&join, d, budget)?;
        acc = acc.append(&enc)?;
        codes.push(GroupCode {
            levels: g.clone(),
            distance: d,
            encoding: enc,
        });
    }
    Ok((acc, codes))
}

/// Bounded-distance block decoding at `level` (1-based, sorted order) with
/// radius t_h. Returns the block of P_h, or `None` when no codeword lies
/// within the radius.
pub fn decode_block(
    enc: &SystematicEncoding,
    prob: &GfcpcProblem,
    level: usize,
    received: &FieldVector,
) -> Result<Option<usize>> {
    if level == 0 || level > prob.len() {
        return Err(Error::Input(format!("level {level} outside 1..={}", prob.len())));
    }
    decode_block_within(enc, prob, level, prob.correctable(level - 1), received)
}

/// As [`decode_block`] with an explicit radius. Candidates spread over more
/// than one block also count as a failure.
pub fn decode_block_within(
    enc: &SystematicEncoding,
    prob: &GfcpcProblem,
    level: usize,
    radius: usize,
    received: &FieldVector,
) -> Result<Option<usize>> {
    if level == 0 || level > prob.len() {
        return Err(Error::Input(format!("level {level} outside 1..={}", prob.len())));
    }
    if enc.space() != prob.space() {
        return Err(Error::Shape("encoding and problem over different spaces".into()));
    }
    let space = enc.space();
    let n = space.k() + enc.r();
    if received.len() != n || received.q() != space.q() {
        return Err(Error::Shape(format!(
            "received word {received} is not a length-{n} vector over q={}",
            space.q()
        )));
    }
    let (head, tail) = received.split(space.k());
    let p = &prob.partitions()[level - 1];
    let mut block = None;
    for (i, parity) in enc.parities().iter().enumerate() {
        let u = space.unrank(i);
        let dist = distance(u.symbols(), head.symbols()) + distance(parity.symbols(), tail.symbols());
        if dist <= radius {
            let b = p.block_of_rank(i);
            match block {
                None => block = Some(b),
                Some(x) if x != b => return Ok(None),
                Some(_) => {}
            }
        }
    }
    Ok(block)
}
