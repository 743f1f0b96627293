//! Redundancy bounds for generalized FCPCs.
//!
//! Every result is a [`BoundReport`]. Its status says how the value relates
//! to the quantity the kind names: `exact` when it was computed exactly,
//! `certified-lower` or `upper` when a search budget ran out first, and
//! `inapplicable` when a structural bound has no witness.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use crate::codec::{
    block_constant_fcpc, multi_step_construct, IndexGrouping, SystematicEncoding,
};
use crate::dcode::{lower_bound_triples, min_length_dcode, SearchBudget};
use crate::drm::{gfcpc_drm, single_drm, GfcpcProblem};
use crate::error::{Error, Result};
use crate::partition::{join_many, Partition};
use crate::space::{distance, neighbors, FieldVector};

/// Largest H whose groupings are enumerated (Bell(8) = 4140).
pub const MAX_GROUPING_LEVELS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    LowerJoin,
    LowerDrmSubmatrix,
    LowerTrivial,
    LowerBinaryTriple,
    LowerBinaryStructural,
    UpperGrouping,
    UpperMultistep,
    Exact,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::LowerJoin => "lower-join",
            BoundKind::LowerDrmSubmatrix => "lower-drm-submatrix",
            BoundKind::LowerTrivial => "lower-trivial",
            BoundKind::LowerBinaryTriple => "lower-binary-triple",
            BoundKind::LowerBinaryStructural => "lower-binary-structural",
            BoundKind::UpperGrouping => "upper-grouping",
            BoundKind::UpperMultistep => "upper-multistep",
            BoundKind::Exact => "exact",
        }
    }

    /// Whether the value never exceeds the optimal redundancy.
    pub fn is_lower(self) -> bool {
        self.name().starts_with("lower")
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundStatus {
    Exact,
    CertifiedLower,
    Upper,
    Inapplicable,
}

impl fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundStatus::Exact => "exact",
            BoundStatus::CertifiedLower => "certified-lower",
            BoundStatus::Upper => "upper",
            BoundStatus::Inapplicable => "inapplicable",
        })
    }
}

/// Optimal single-partition redundancy r_P(k : d), or an interval around it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FcpcValue {
    pub lower: usize,
    pub upper: usize,
    /// An encoding achieving `upper`, when one was built.
    pub encoding: Option<SystematicEncoding>,
}

impl FcpcValue {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// One term r_{Q_h}(k : d_h) of the join lower bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTerm {
    pub level: usize,
    pub distance: usize,
    pub value: FcpcValue,
}

/// One group A of a grouping with its code value at d_A.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTerm {
    pub levels: Vec<usize>,
    pub distance: usize,
    pub value: FcpcValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupingRow {
    pub grouping: IndexGrouping,
    pub terms: Vec<GroupTerm>,
}

impl GroupingRow {
    pub fn total(&self) -> usize {
        self.terms
            .iter()
            .fold(0usize, |acc, t| acc.saturating_add(t.value.upper))
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|t| t.value.is_exact())
    }
}

/// u adjacent to both v and w, d(v, w) = 2, all in different blocks of P_2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleWitness {
    pub u: FieldVector,
    pub v: FieldVector,
    pub w: FieldVector,
}

/// v, w share block `block` of P_2 but not a block of P_1; u lies outside
/// that block and is a neighbour of v or w (condition 1, d(v, w) = 1) or of
/// both (condition 2, d(v, w) = 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralWitness {
    pub condition: u8,
    pub block: usize,
    pub v: FieldVector,
    pub w: FieldVector,
    pub u: FieldVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    None,
    Note(String),
    Levels { best: usize, terms: Vec<LevelTerm> },
    Messages(Vec<FieldVector>),
    Pair { u: FieldVector, v: FieldVector },
    Triple(TripleWitness),
    Structural(StructuralWitness),
    Grouping { best: IndexGrouping, table: Vec<GroupingRow> },
    Encoding(SystematicEncoding),
    Interval { lower: usize, upper: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub status: BoundStatus,
    /// `None` only for inapplicable reports.
    pub value: Option<usize>,
    pub certificate: Certificate,
}

impl BoundReport {
    fn new(kind: BoundKind, status: BoundStatus, value: usize, certificate: Certificate) -> Self {
        BoundReport {
            kind,
            status,
            value: Some(value),
            certificate,
        }
    }

    fn inapplicable(kind: BoundKind, note: &str) -> Self {
        BoundReport {
            kind,
            status: BoundStatus::Inapplicable,
            value: None,
            certificate: Certificate::Note(note.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// single-partition values

/// r_P(k : d): the triangle bound on the full matrix against the best
/// block-constant code, with a message-level search when they differ.
pub fn fcpc_redundancy(p: &Partition, d: usize, budget: &SearchBudget) -> Result<FcpcValue> {
    let space = p.space();
    let q = space.q();
    let full = single_drm(p, d, &space.vectors()?)?;
    let mut lower = lower_bound_triples(&full, q);
    let (mut upper, mut encoding) = match block_constant_fcpc(p, d, budget) {
        Ok(enc) => (enc.r(), Some(enc)),
        Err(Error::Budget(b)) => (b.upper.unwrap_or(usize::MAX), None),
        Err(e) => return Err(e),
    };
    if lower < upper {
        match min_length_dcode(&full, q, budget) {
            Ok(w) => {
                let enc = SystematicEncoding::new(space, w.length(), w.into_parities())?;
                lower = enc.r();
                upper = enc.r();
                encoding = Some(enc);
            }
            Err(Error::Budget(b)) => {
                lower = lower.max(b.lower);
                if let Some(u) = b.upper {
                    if u < upper {
                        upper = u;
                        encoding = None;
                    }
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(FcpcValue {
        lower,
        upper,
        encoding,
    })
}

fn status_for(exact: bool, degraded: BoundStatus) -> BoundStatus {
    if exact {
        BoundStatus::Exact
    } else {
        degraded
    }
}

/// max over h of r_{Q_h}(k : d_h) with Q_h = P_h ∨ ... ∨ P_H.
pub fn lower_bound_joins(prob: &GfcpcProblem, budget: &SearchBudget) -> Result<BoundReport> {
    let mut terms = Vec::with_capacity(prob.len());
    for h in 0..prob.len() {
        let d = prob.distances()[h];
        terms.push(LevelTerm {
            level: h + 1,
            distance: d,
            value: fcpc_redundancy(&prob.tail_join(h), d, budget)?,
        });
    }
    let best = terms
        .iter()
        .max_by_key(|t| (t.value.lower, std::cmp::Reverse(t.level)))
        .unwrap();
    let value = best.value.lower;
    let best = best.level;
    let exact = terms.iter().all(|t| t.value.is_exact());
    Ok(BoundReport::new(
        BoundKind::LowerJoin,
        status_for(exact, BoundStatus::CertifiedLower),
        value,
        Certificate::Levels { best, terms },
    ))
}

/// All set partitions of {1..h} as restricted-growth strings in
/// lexicographic order.
pub fn enumerate_index_groupings(h: usize) -> Result<Vec<IndexGrouping>> {
    if h == 0 {
        return Err(Error::Input("a grouping needs at least one level".into()));
    }
    if h > MAX_GROUPING_LEVELS {
        return Err(Error::Capacity(format!(
            "{h} levels exceed the grouping limit of {MAX_GROUPING_LEVELS}"
        )));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; h];
    loop {
        let blocks = rgs.iter().max().unwrap() + 1;
        let mut groups = vec![Vec::new(); blocks];
        for (i, &b) in rgs.iter().enumerate() {
            groups[b].push(i + 1);
        }
        out.push(IndexGrouping::new(h, groups)?);
        // next restricted-growth string
        let mut i = h - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            let prefix_max = rgs[..i].iter().max().copied().unwrap_or(0);
            if rgs[i] <= prefix_max {
                rgs[i] += 1;
                rgs[i + 1..].iter_mut().for_each(|x| *x = 0);
                break;
            }
            i -= 1;
        }
    }
}

/// Grouping upper bound: the minimum over groupings A of the sum of
/// r_{∨A}(k : d_A). The certificate carries every grouping, finest first.
pub fn upper_bound_grouping(prob: &GfcpcProblem, budget: &SearchBudget) -> Result<BoundReport> {
    let mut groupings = enumerate_index_groupings(prob.len())?;
    groupings.sort_by_key(|g| std::cmp::Reverse(g.groups().len()));
    let mut cache: HashMap<Vec<usize>, FcpcValue> = HashMap::new();
    let mut table = Vec::with_capacity(groupings.len());
    for g in groupings {
        let mut terms = Vec::new();
        for levels in g.groups() {
            let d = levels.iter().map(|&i| prob.distances()[i - 1]).max().unwrap();
            let value = match cache.get(levels) {
                Some(v) => v.clone(),
                None => {
                    let join = join_many(levels.iter().map(|&i| &prob.partitions()[i - 1]))?;
                    let v = fcpc_redundancy(&join, d, budget)?;
                    cache.insert(levels.clone(), v.clone());
                    v
                }
            };
            terms.push(GroupTerm {
                levels: levels.clone(),
                distance: d,
                value,
            });
        }
        table.push(GroupingRow { grouping: g, terms });
    }
    let best = table.iter().min_by_key(|row| row.total()).unwrap();
    let value = best.total();
    let best = best.grouping.clone();
    let exact = table.iter().all(|row| row.is_exact());
    Ok(BoundReport::new(
        BoundKind::UpperGrouping,
        status_for(exact, BoundStatus::Upper),
        value,
        Certificate::Grouping { best, table },
    ))
}

/// Redundancy of the multi-step construction, with its encoding.
pub fn upper_bound_multistep(prob: &GfcpcProblem, budget: &SearchBudget) -> Result<BoundReport> {
    let (enc, _) = multi_step_construct(prob, budget)?;
    Ok(BoundReport::new(
        BoundKind::UpperMultistep,
        BoundStatus::Exact,
        enc.r(),
        Certificate::Encoding(enc),
    ))
}

/// N of the requirement matrix restricted to `msgs`.
pub fn lower_bound_drm_submatrix(
    prob: &GfcpcProblem,
    msgs: &[FieldVector],
    budget: &SearchBudget,
) -> Result<BoundReport> {
    let drm = gfcpc_drm(prob, msgs)?;
    let cert = Certificate::Messages(msgs.to_vec());
    match min_length_dcode(&drm, prob.space().q(), budget) {
        Ok(w) => Ok(BoundReport::new(
            BoundKind::LowerDrmSubmatrix,
            BoundStatus::Exact,
            w.length(),
            cert,
        )),
        Err(Error::Budget(b)) => Ok(BoundReport::new(
            BoundKind::LowerDrmSubmatrix,
            BoundStatus::CertifiedLower,
            b.lower,
            cert,
        )),
        Err(e) => Err(e),
    }
}

/// d_H - 1, witnessed by the first adjacent pair split by P_H.
pub fn lower_bound_trivial(prob: &GfcpcProblem) -> Result<BoundReport> {
    let p = prob.partitions().last().unwrap();
    let d = prob.max_distance();
    if p.num_blocks() < 2 {
        return Ok(BoundReport::new(
            BoundKind::LowerTrivial,
            BoundStatus::Exact,
            0,
            Certificate::Note("the last partition has a single block".into()),
        ));
    }
    for u in p.space().vectors()? {
        for v in neighbors(&u) {
            if !p.same_block(&u, &v)? {
                return Ok(BoundReport::new(
                    BoundKind::LowerTrivial,
                    BoundStatus::Exact,
                    d - 1,
                    Certificate::Pair { u, v },
                ));
            }
        }
    }
    unreachable!("a partition with two blocks splits some adjacent pair")
}

// ---------------------------------------------------------------------------
// binary structural bounds

fn require_binary(p: &Partition) -> Result<()> {
    if p.space().q() != 2 {
        return Err(Error::Domain(format!(
            "binary bounds need q = 2, not q = {}",
            p.space().q()
        )));
    }
    Ok(())
}

fn require_two_levels(prob: &GfcpcProblem) -> Result<()> {
    require_binary(&prob.partitions()[0])?;
    if prob.len() != 2 {
        return Err(Error::Domain(format!(
            "binary bounds need exactly two partitions, not {}",
            prob.len()
        )));
    }
    Ok(())
}

/// ⌈3 d_2 / 2 - 2⌉, clamped at zero.
pub fn binary_triple_formula(d2: usize) -> usize {
    (3 * d2).saturating_sub(4).div_ceil(2)
}

/// ⌈d_2 + d_1 / 2 - 2⌉, clamped at zero.
pub fn binary_structural_formula(d1: usize, d2: usize) -> usize {
    (2 * d2 + d1).saturating_sub(4).div_ceil(2)
}

/// First u (lexicographic) with neighbours v, w (neighbour order) such that
/// u, v, w lie in three different blocks of `p2`.
pub fn scan_binary_triple_witness(p2: &Partition) -> Result<Option<TripleWitness>> {
    require_binary(p2)?;
    for u in p2.space().vectors()? {
        let bu = p2.block_index(&u)?;
        let near = neighbors(&u);
        for (i, v) in near.iter().enumerate() {
            let bv = p2.block_index(v)?;
            if bv == bu {
                continue;
            }
            for w in &near[i + 1..] {
                let bw = p2.block_index(w)?;
                if bw != bu && bw != bv {
                    return Ok(Some(TripleWitness {
                        u: u.clone(),
                        v: v.clone(),
                        w: w.clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn check_pair(p1: &Partition, p2: &Partition) -> Result<()> {
    require_binary(p2)?;
    if p1.space() != p2.space() {
        return Err(Error::Shape(format!(
            "partitions over {} and {}",
            p1.space(),
            p2.space()
        )));
    }
    Ok(())
}

/// Pairs v < w inside each block of `p2` (blocks in order) at distance
/// `dist` that `p1` separates.
fn split_pairs(p1: &Partition, p2: &Partition, dist: usize) -> Vec<(usize, FieldVector, FieldVector)> {
    let mut out = Vec::new();
    for b in 0..p2.num_blocks() {
        let members = p2.block_members(b);
        for (i, v) in members.iter().enumerate() {
            for w in &members[i + 1..] {
                if distance(v.symbols(), w.symbols()) == dist && !p1.same_block(v, w).unwrap() {
                    out.push((b, v.clone(), w.clone()));
                }
            }
        }
    }
    out
}

/// Condition 1: v, w at distance 1 in one block of `p2`, split by `p1`, and a
/// neighbour u of v or w outside the block (smallest such u).
pub fn scan_condition_one(p1: &Partition, p2: &Partition) -> Result<Option<StructuralWitness>> {
    check_pair(p1, p2)?;
    for (b, v, w) in split_pairs(p1, p2, 1) {
        let mut outside: Vec<FieldVector> = neighbors(&v)
            .into_iter()
            .chain(neighbors(&w))
            .filter(|u| p2.block_index(u).unwrap() != b)
            .collect();
        outside.sort();
        if let Some(u) = outside.into_iter().next() {
            return Ok(Some(StructuralWitness {
                condition: 1,
                block: b,
                v,
                w,
                u,
            }));
        }
    }
    Ok(None)
}

/// Condition 2: v, w at distance 2 in one block of `p2`, split by `p1`, with a
/// common neighbour u outside the block (smallest such u).
pub fn scan_condition_two(p1: &Partition, p2: &Partition) -> Result<Option<StructuralWitness>> {
    check_pair(p1, p2)?;
    for (b, v, w) in split_pairs(p1, p2, 2) {
        let mut common: Vec<FieldVector> = neighbors(&v)
            .into_iter()
            .filter(|u| distance(u.symbols(), w.symbols()) == 1)
            .filter(|u| p2.block_index(u).unwrap() != b)
            .collect();
        common.sort();
        if let Some(u) = common.into_iter().next() {
            return Ok(Some(StructuralWitness {
                condition: 2,
                block: b,
                v,
                w,
                u,
            }));
        }
    }
    Ok(None)
}

/// Condition 1 over every block, then condition 2.
pub fn scan_binary_structural_witness(p1: &Partition, p2: &Partition) -> Result<Option<StructuralWitness>> {
    match scan_condition_one(p1, p2)? {
        Some(w) => Ok(Some(w)),
        None => scan_condition_two(p1, p2),
    }
}

pub fn binary_triple_bound(prob: &GfcpcProblem) -> Result<BoundReport> {
    require_two_levels(prob)?;
    let d2 = prob.distances()[1];
    Ok(match scan_binary_triple_witness(&prob.partitions()[1])? {
        Some(w) => BoundReport::new(
            BoundKind::LowerBinaryTriple,
            BoundStatus::Exact,
            binary_triple_formula(d2),
            Certificate::Triple(w),
        ),
        None => BoundReport::inapplicable(
            BoundKind::LowerBinaryTriple,
            "no adjacent triple spans three blocks of the second partition",
        ),
    })
}

pub fn binary_structural_bound(prob: &GfcpcProblem) -> Result<BoundReport> {
    require_two_levels(prob)?;
    let (d1, d2) = (prob.distances()[0], prob.distances()[1]);
    let (p1, p2) = (&prob.partitions()[0], &prob.partitions()[1]);
    Ok(match scan_binary_structural_witness(p1, p2)? {
        Some(w) => BoundReport::new(
            BoundKind::LowerBinaryStructural,
            BoundStatus::Exact,
            binary_structural_formula(d1, d2),
            Certificate::Structural(w),
        ),
        None => BoundReport::inapplicable(
            BoundKind::LowerBinaryStructural,
            "neither neighbourhood condition holds",
        ),
    })
}

// ---------------------------------------------------------------------------
// exact value

/// N of the full requirement matrix. When the triangle bound already meets
/// the multi-step redundancy no search is needed.
pub fn optimal_redundancy_exact(prob: &GfcpcProblem, budget: &SearchBudget) -> Result<BoundReport> {
    let space = prob.space();
    let q = space.q();
    let full = prob.full_drm()?;
    let lower = lower_bound_triples(&full, q);
    let multistep = match multi_step_construct(prob, budget) {
        Ok((enc, _)) => Some(enc),
        Err(Error::Construction(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(enc) = &multistep {
        if enc.r() == lower {
            return Ok(BoundReport::new(
                BoundKind::Exact,
                BoundStatus::Exact,
                lower,
                Certificate::Encoding(enc.clone()),
            ));
        }
    }
    match min_length_dcode(&full, q, budget) {
        Ok(w) => {
            let enc = SystematicEncoding::new(space, w.length(), w.into_parities())?;
            Ok(BoundReport::new(
                BoundKind::Exact,
                BoundStatus::Exact,
                enc.r(),
                Certificate::Encoding(enc),
            ))
        }
        Err(Error::Budget(b)) => {
            let upper = b
                .upper
                .into_iter()
                .chain(multistep.map(|e| e.r()))
                .min()
                .unwrap_or(usize::MAX);
            let lower = lower.max(b.lower);
            Ok(BoundReport::new(
                BoundKind::Exact,
                BoundStatus::Upper,
                upper,
                Certificate::Interval { lower, upper },
            ))
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// rendering

fn set_notation(g: &IndexGrouping) -> String {
    let inner: Vec<String> = g
        .groups()
        .iter()
        .map(|grp| {
            let items: Vec<String> = grp.iter().map(|i| i.to_string()).collect();
            format!("{{{}}}", items.join(","))
        })
        .collect();
    format!("{{{}}}", inner.join(","))
}

fn join_name(levels: &[usize]) -> String {
    levels
        .iter()
        .map(|i| format!("P{i}"))
        .collect::<Vec<_>>()
        .join("vP")
        .replace("vPP", "vP")
}

fn term_value(v: &FcpcValue) -> String {
    if v.is_exact() {
        v.upper.to_string()
    } else {
        format!("{}*", v.upper)
    }
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        out.push_str(cells.join(" | ").trim_end());
        out.push('\n');
        if i == 0 {
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            out.push_str(&rule.join("-+-"));
            out.push('\n');
        }
    }
    out
}

/// The grouping table: one row per grouping with its expression and value.
/// Values marked `*` are upper bounds whose optimality was not certified.
pub fn render_grouping_table(table: &[GroupingRow]) -> String {
    let mut rows = vec![vec!["grouping".to_string(), "expression".to_string(), "value".to_string()]];
    for row in table {
        let expr: Vec<String> = row
            .terms
            .iter()
            .map(|t| format!("r[{}](k:{})", join_name(&t.levels), t.distance))
            .collect();
        let parts: Vec<String> = row.terms.iter().map(|t| term_value(&t.value)).collect();
        let value = if parts.len() == 1 {
            parts[0].clone()
        } else {
            format!("{} = {}", parts.join(" + "), row.total())
        };
        rows.push(vec![set_notation(&row.grouping), expr.join(" + "), value]);
    }
    let mut out = aligned(&rows);
    if table.iter().any(|r| !r.is_exact()) {
        out.push_str("* upper bound only\n");
    }
    out
}

fn certificate_summary(c: &Certificate) -> String {
    match c {
        Certificate::None => String::new(),
        Certificate::Note(n) => n.clone(),
        Certificate::Levels { best, terms } => {
            let parts: Vec<String> = terms
                .iter()
                .map(|t| format!("r[Q{}](k:{})={}", t.level, t.distance, term_value(&t.value)))
                .collect();
            format!("{} ; max at h={best}", parts.join(" "))
        }
        Certificate::Messages(m) => {
            let v: Vec<String> = m.iter().map(|x| x.to_string()).collect();
            format!("messages {}", v.join(" "))
        }
        Certificate::Pair { u, v } => format!("u={u} v={v}"),
        Certificate::Triple(t) => format!("u={} v={} w={}", t.u, t.v, t.w),
        Certificate::Structural(s) => {
            format!("condition {} block {} v={} w={} u={}", s.condition, s.block, s.v, s.w, s.u)
        }
        Certificate::Grouping { best, .. } => format!("grouping {}", set_notation(best)),
        Certificate::Encoding(e) => format!("encoding with r={}", e.r()),
        Certificate::Interval { lower, upper } => format!("optimum in [{lower}, {upper}]"),
    }
}

/// Aligned kind / status / value / certificate table.
pub fn render_reports(reports: &[BoundReport]) -> String {
    let mut rows = vec![vec![
        "bound".to_string(),
        "status".to_string(),
        "value".to_string(),
        "certificate".to_string(),
    ]];
    for r in reports {
        rows.push(vec![
            r.kind.to_string(),
            r.status.to_string(),
            r.value.map_or("-".to_string(), |v| v.to_string()),
            certificate_summary(&r.certificate),
        ]);
    }
    let mut out = aligned(&rows);
    for r in reports {
        if let Certificate::Grouping { table, .. } = &r.certificate {
            out.push('\n');
            out.push_str(&render_grouping_table(table));
        }
    }
    out
}

/// Machine-readable dump: `gfcpc-report v1` then `bound <kind> <status> <value>`.
pub fn dump_reports(reports: &[BoundReport]) -> String {
    let mut out = String::from("gfcpc-report v1\n");
    for r in reports {
        let value = r.value.map_or("-".to_string(), |v| v.to_string());
        writeln!(out, "bound {} {} {}", r.kind, r.status, value).unwrap();
    }
    out
}
