//! D-codes: vectors whose pairwise distances meet a requirement matrix, and
//! the minimal length N(D) at which one exists.
//!
//! The exact search places parities message by message. Columns that carry
//! identical symbols in every placed parity are interchangeable, so they are
//! kept as contiguous classes and a new parity only chooses how many columns
//! of each class receive each symbol. Within a class the symbols already in
//! use are 0..b and at most one fresh symbol b is tried, since any other
//! unused symbol gives an equivalent code.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::drm::RequirementMatrix;
use crate::error::{BudgetExhausted, Error, Result};
use crate::space::{distance, FieldVector, MAX_Q};

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

/// Limits for the exact search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest parity length tried before giving up.
    pub max_length: usize,
    /// Search nodes allowed across all lengths of one call.
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
    /// Worker threads for the exact search; 1 keeps witnesses reproducible.
    pub jobs: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_length: 64,
            node_limit: DEFAULT_NODE_LIMIT,
            time_limit: None,
            jobs: 1,
        }
    }
}

impl SearchBudget {
    pub fn with_nodes(node_limit: u64) -> Self {
        SearchBudget {
            node_limit: node_limit.max(1),
            ..Self::default()
        }
    }
}

/// Parities p_1..p_M of a common length over one alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DcodeWitness {
    q: usize,
    length: usize,
    parities: Vec<FieldVector>,
}

impl DcodeWitness {
    pub fn new(q: usize, length: usize, parities: Vec<FieldVector>) -> Result<Self> {
        if let Some(p) = parities.iter().find(|p| p.q() != q || p.len() != length) {
            return Err(Error::Shape(format!(
                "parity {p} is not a length-{length} vector over q={q}"
            )));
        }
        Ok(DcodeWitness { q, length, parities })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn parities(&self) -> &[FieldVector] {
        &self.parities
    }

    pub fn into_parities(self) -> Vec<FieldVector> {
        self.parities
    }
}

/// Index pairs `(i, j)`, `i < j`, whose parities fall short of `D[i][j]`.
/// An empty list means the parities form a D-code.
pub fn verify_dcode(parities: &[FieldVector], d: &RequirementMatrix) -> Result<Vec<(usize, usize)>> {
    if parities.len() != d.len() {
        return Err(Error::Shape(format!(
            "{} parities for a {}x{} requirement matrix",
            parities.len(),
            d.len(),
            d.len()
        )));
    }
    if let Some(first) = parities.first() {
        if let Some(p) = parities
            .iter()
            .find(|p| p.len() != first.len() || p.q() != first.q())
        {
            return Err(Error::Shape(format!(
                "parities {first} and {p} differ in length or alphabet"
            )));
        }
    }
    let mut bad = Vec::new();
    for i in 0..parities.len() {
        for j in i + 1..parities.len() {
            if distance(parities[i].symbols(), parities[j].symbols()) < d.get(i, j) {
                bad.push((i, j));
            }
        }
    }
    Ok(bad)
}

/// The largest single demand.
pub fn lower_bound_pairwise(d: &RequirementMatrix) -> usize {
    d.max_entry()
}

/// Triangle bound: three parities of length r have pairwise distances summing
/// to at most 2r when q = 2 and 3r otherwise. Includes the pairwise bound.
pub fn lower_bound_triples(d: &RequirementMatrix, q: usize) -> usize {
    let div = if q == 2 { 2 } else { 3 };
    let m = d.len();
    let mut best = lower_bound_pairwise(d);
    for i in 0..m {
        for j in i + 1..m {
            let dij = d.get(i, j);
            for k in j + 1..m {
                let s = dij + d.get(i, k) + d.get(j, k);
                best = best.max(s.div_ceil(div));
            }
        }
    }
    best
}

/// Smallest r with r * (pairs split by a balanced q-colouring) >= total demand.
fn plotkin_bound(d: &RequirementMatrix, q: usize) -> usize {
    let m = d.len();
    let total: usize = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .map(|(i, j)| d.get(i, j))
        .sum();
    let per_column = max_split_pairs(m, q);
    if per_column == 0 {
        return 0;
    }
    total.div_ceil(per_column)
}

fn max_split_pairs(m: usize, q: usize) -> usize {
    let parts = q.min(m.max(1));
    let base = m / parts;
    let extra = m % parts;
    let same: usize = (0..parts)
        .map(|i| {
            let s = base + usize::from(i < extra);
            s * s.saturating_sub(1) / 2
        })
        .sum();
    m * m.saturating_sub(1) / 2 - same
}

/// A length that always suffices: a distinct q-ary label per message,
/// repeated max-demand times.
fn trivial_upper(d: &RequirementMatrix, q: usize) -> usize {
    let m = d.len();
    let mut width = 0;
    let mut reach = 1usize;
    while reach < m {
        reach = reach.saturating_mul(q);
        width += 1;
    }
    width * d.max_entry()
}

fn check_alphabet(q: usize) -> Result<()> {
    if !(2..=MAX_Q).contains(&q) {
        return Err(Error::Input(format!("alphabet size {q} outside 2..={MAX_Q}")));
    }
    Ok(())
}

/// Exact N(D) with a witness. The search runs lengths upward from the
/// triangle bound and only returns a length once every shorter one has been
/// refuted.
pub fn min_length_dcode(d: &RequirementMatrix, q: usize, budget: &SearchBudget) -> Result<DcodeWitness> {
    check_alphabet(q)?;
    let m = d.len();
    if m <= 1 || d.max_entry() == 0 {
        return DcodeWitness::new(q, 0, vec![FieldVector::zero(q, 0); m]);
    }
    let lower = lower_bound_triples(d, q).max(plotkin_bound(d, q));
    let shared = Shared::new(budget);
    let order = search_order(d);
    let orders = standard_orders(d);
    for r in lower..=budget.max_length {
        match decide(d, q, r, &order, &orders, &shared, budget.jobs) {
            Decision::Code(w) => return Ok(w),
            Decision::Refuted => {}
            Decision::Exhausted => {
                let upper = heuristic_dcode(d, q, budget.max_length.max(trivial_upper(d, q)))
                    .map(|w| w.length())
                    .unwrap_or(trivial_upper(d, q))
                    .max(r);
                return Err(Error::Budget(BudgetExhausted {
                    lower: r,
                    upper: Some(upper),
                    nodes: shared.nodes.load(Ordering::Relaxed),
                }));
            }
        }
    }
    let upper = heuristic_dcode(d, q, trivial_upper(d, q)).map(|w| w.length());
    Err(Error::Budget(BudgetExhausted {
        lower: budget.max_length + 1,
        upper: upper.or(Some(trivial_upper(d, q))),
        nodes: shared.nodes.load(Ordering::Relaxed),
    }))
}

/// Whether a D-code of exactly length `r` exists; `None` when the budget runs out.
pub fn dcode_exists(
    d: &RequirementMatrix,
    q: usize,
    r: usize,
    budget: &SearchBudget,
) -> Result<Option<Option<DcodeWitness>>> {
    check_alphabet(q)?;
    if d.len() <= 1 {
        return Ok(Some(Some(DcodeWitness::new(q, r, vec![FieldVector::zero(q, r); d.len()])?)));
    }
    if r < lower_bound_triples(d, q).max(plotkin_bound(d, q)) {
        return Ok(Some(None));
    }
    let shared = Shared::new(budget);
    Ok(
        match decide(d, q, r, &search_order(d), &standard_orders(d), &shared, budget.jobs) {
            Decision::Code(w) => Some(Some(w)),
            Decision::Refuted => Some(None),
            Decision::Exhausted => None,
        },
    )
}

enum Decision {
    Code(DcodeWitness),
    Refuted,
    Exhausted,
}

/// Nodes spent on a first exact pass before falling back to local search.
const PROBE_NODES: u64 = 200_000;

/// Settles one length: greedy, then a short exact pass (cheap refutations),
/// then local search (cheap constructions), then the exact search proper.
fn decide(
    d: &RequirementMatrix,
    q: usize,
    r: usize,
    order: &[usize],
    orders: &[Vec<usize>],
    shared: &Shared,
    jobs: usize,
) -> Decision {
    if let Some(w) = greedy_at(d, q, r, orders) {
        return Decision::Code(w);
    }
    let inst = Instance::new(d, q, r, order);
    let full = shared.limit.load(Ordering::SeqCst);
    let probe = shared.nodes.load(Ordering::SeqCst).saturating_add(PROBE_NODES);
    if probe < full {
        shared.limit.store(probe, Ordering::SeqCst);
        let outcome = run(&inst, shared, jobs);
        shared.limit.store(full, Ordering::SeqCst);
        match outcome {
            Outcome::Found(rows) => return Decision::Code(inst.witness(&rows)),
            Outcome::Infeasible => return Decision::Refuted,
            Outcome::Exhausted if shared.out_of_time() => return Decision::Exhausted,
            Outcome::Exhausted => shared.exhausted.store(false, Ordering::SeqCst),
        }
        if let Some(w) = local_search_at(d, q, r) {
            return Decision::Code(w);
        }
    }
    match run(&inst, shared, jobs) {
        Outcome::Found(rows) => Decision::Code(inst.witness(&rows)),
        Outcome::Infeasible => Decision::Refuted,
        Outcome::Exhausted => Decision::Exhausted,
    }
}

/// Most demanding rows first, ties by index.
fn search_order(d: &RequirementMatrix) -> Vec<usize> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(d.row(i).iter().copied().max().unwrap_or(0)));
    order
}

// ---------------------------------------------------------------------------
// greedy upper bounds

/// Largest candidate list the greedy pass will enumerate.
const GREEDY_CANDIDATES: usize = 1 << 20;
const GREEDY_SHUFFLES: u64 = 12;

fn standard_orders(d: &RequirementMatrix) -> Vec<Vec<usize>> {
    let m = d.len();
    let natural: Vec<usize> = (0..m).collect();
    let mut orders = vec![natural.clone(), search_order(d), natural.iter().rev().copied().collect()];
    for seed in 0..GREEDY_SHUFFLES {
        let mut o = natural.clone();
        o.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        orders.push(o);
    }
    orders.dedup();
    orders
}

/// Greedy D-code search: each message in turn takes the lexicographically
/// first parity compatible with those already placed, restarting over several
/// message orders. Tries every length up to `r_cap` and returns the shortest
/// success.
pub fn heuristic_dcode(d: &RequirementMatrix, q: usize, r_cap: usize) -> Option<DcodeWitness> {
    if !(2..=MAX_Q).contains(&q) {
        return None;
    }
    let orders = standard_orders(d);
    (lower_bound_pairwise(d)..=r_cap).find_map(|r| greedy_at(d, q, r, &orders))
}

fn greedy_at(d: &RequirementMatrix, q: usize, r: usize, orders: &[Vec<usize>]) -> Option<DcodeWitness> {
    let m = d.len();
    if r < lower_bound_pairwise(d) {
        return None;
    }
    let count = crate::space::checked_power(q, r).filter(|&c| c <= GREEDY_CANDIDATES)?;
    let mut placed: Vec<usize> = Vec::with_capacity(m);
    let mut cand = vec![0u8; r];
    let mut rows = vec![0u8; m * r];
    'orders: for order in orders {
        placed.clear();
        for &i in order {
            let mut found = false;
            cand.iter_mut().for_each(|c| *c = 0);
            for idx in 0..count {
                if idx > 0 {
                    increment(&mut cand, q as u8);
                }
                let fits = placed.iter().all(|&j| {
                    distance(&cand, &rows[j * r..(j + 1) * r]) >= d.get(i, j)
                });
                if fits {
                    rows[i * r..(i + 1) * r].copy_from_slice(&cand);
                    placed.push(i);
                    found = true;
                    break;
                }
            }
            if !found {
                continue 'orders;
            }
        }
        let parities = (0..m)
            .map(|i| FieldVector::from_raw(q, rows[i * r..(i + 1) * r].to_vec()))
            .collect();
        return DcodeWitness::new(q, r, parities).ok();
    }
    None
}

fn increment(v: &mut [u8], q: u8) {
    for s in v.iter_mut().rev() {
        *s += 1;
        if *s < q {
            return;
        }
        *s = 0;
    }
}

/// Largest candidate list the local search will scan per move.
const LOCAL_CANDIDATES: usize = 1 << 14;
const LOCAL_STEPS: usize = 20_000;
/// Rough cap on distance evaluations per restart.
const LOCAL_WORK: usize = 200_000_000;
const LOCAL_RESTARTS: u64 = 4;

/// Min-conflicts local search at a fixed length: repeatedly move one parity
/// of a violated pair to the candidate with the smallest total shortfall.
fn local_search_at(d: &RequirementMatrix, q: usize, r: usize) -> Option<DcodeWitness> {
    use rand::Rng;
    let m = d.len();
    let count = crate::space::checked_power(q, r).filter(|&c| c <= LOCAL_CANDIDATES)?;
    if r < lower_bound_pairwise(d) || m < 2 {
        return None;
    }
    let mut cands = vec![0u8; count * r];
    let mut cur = vec![0u8; r];
    for idx in 1..count {
        increment(&mut cur, q as u8);
        cands[idx * r..(idx + 1) * r].copy_from_slice(&cur);
    }
    let cand = |c: usize| &cands[c * r..(c + 1) * r];
    let shortfall = |i: usize, j: usize, a: usize, b: usize| -> usize {
        d.get(i, j).saturating_sub(distance(cand(a), cand(b)))
    };
    for seed in 0..LOCAL_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut at: Vec<usize> = (0..m).map(|_| rng.gen_range(0..count)).collect();
        let mut tabu = vec![0usize; m];
        let mut scores = vec![0usize; count];
        let steps = LOCAL_STEPS.min(LOCAL_WORK / (m * count * r.max(1)).max(1));
        for step in 1..=steps {
            let violated: Vec<(usize, usize)> = (0..m)
                .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
                .filter(|&(i, j)| shortfall(i, j, at[i], at[j]) > 0)
                .collect();
            if violated.is_empty() {
                let parities = at
                    .iter()
                    .map(|&c| FieldVector::from_raw(q, cand(c).to_vec()))
                    .collect();
                return DcodeWitness::new(q, r, parities).ok();
            }
            let (a, b) = violated[rng.gen_range(0..violated.len())];
            let i = match (tabu[a] >= step, tabu[b] >= step) {
                (false, true) => a,
                (true, false) => b,
                _ => if rng.gen_bool(0.5) { a } else { b },
            };
            if rng.gen_bool(0.05) {
                at[i] = rng.gen_range(0..count);
            } else {
                for (c, score) in scores.iter_mut().enumerate() {
                    *score = (0..m).filter(|&j| j != i).map(|j| shortfall(i, j, c, at[j])).sum();
                }
                let best = *scores.iter().min().unwrap();
                let ties: Vec<usize> = (0..count).filter(|&c| scores[c] == best && c != at[i]).collect();
                if let Some(&c) = ties.get(rng.gen_range(0..ties.len().max(1))) {
                    at[i] = c;
                }
            }
            tabu[i] = step + 2;
        }
    }
    None
}

// ---------------------------------------------------------------------------
// brute-force oracle

/// Largest number of parity tuples the oracle will enumerate.
const ORACLE_LIMIT: u128 = 1 << 31;

/// Smallest r <= `r_max` admitting a D-code, found by enumerating every tuple
/// of parities with p_1 = 0. Kept deliberately naive as a test reference.
pub fn brute_force_ndcode_oracle(d: &RequirementMatrix, q: usize, r_max: usize) -> Result<Option<usize>> {
    check_alphabet(q)?;
    let m = d.len();
    let mut total: u128 = 0;
    for r in 0..=r_max {
        let words = (q as u128).checked_pow(r as u32).unwrap_or(u128::MAX);
        let tuples = words.checked_pow(m.saturating_sub(1) as u32).unwrap_or(u128::MAX);
        total = total.saturating_add(tuples);
        if total > ORACLE_LIMIT || words.saturating_mul(words) > ORACLE_LIMIT {
            return Err(Error::Capacity(format!(
                "enumerating {m} parities up to length {r_max} over q={q} is too large"
            )));
        }
    }
    for r in 0..=r_max {
        let words = q.pow(r as u32);
        let mut table = vec![0u8; words * words];
        let vecs: Vec<Vec<u8>> = (0..words)
            .map(|mut x| {
                let mut v = vec![0u8; r];
                for s in v.iter_mut().rev() {
                    *s = (x % q) as u8;
                    x /= q;
                }
                v
            })
            .collect();
        for a in 0..words {
            for b in 0..words {
                table[a * words + b] = distance(&vecs[a], &vecs[b]) as u8;
            }
        }
        let mut tuple = vec![0usize; m];
        'tuples: loop {
            let ok = (0..m).all(|i| {
                (i + 1..m).all(|j| table[tuple[i] * words + tuple[j]] as usize >= d.get(i, j))
            });
            if ok {
                return Ok(Some(r));
            }
            if m <= 1 {
                break;
            }
            let mut pos = m - 1;
            loop {
                tuple[pos] += 1;
                if tuple[pos] < words {
                    break;
                }
                tuple[pos] = 0;
                if pos == 1 {
                    break 'tuples;
                }
                pos -= 1;
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// exact search

struct Shared {
    nodes: AtomicU64,
    limit: AtomicU64,
    deadline: Option<Instant>,
    stop: AtomicBool,
    exhausted: AtomicBool,
}

impl Shared {
    fn new(budget: &SearchBudget) -> Self {
        Shared {
            nodes: AtomicU64::new(0),
            limit: AtomicU64::new(budget.node_limit.max(1)),
            deadline: budget.time_limit.map(|t| Instant::now() + t),
            stop: AtomicBool::new(false),
            exhausted: AtomicBool::new(false),
        }
    }

    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn reset_stop(&self) {
        self.stop.store(false, Ordering::SeqCst);
    }
}

/// The requirement matrix permuted into search order, at a fixed length.
struct Instance {
    m: usize,
    q: u8,
    r: usize,
    req: Vec<usize>,
    order: Vec<usize>,
}

impl Instance {
    fn new(d: &RequirementMatrix, q: usize, r: usize, order: &[usize]) -> Self {
        let m = d.len();
        let mut req = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                req[a * m + b] = d.get(order[a], order[b]);
            }
        }
        Instance {
            m,
            q: q as u8,
            r,
            req,
            order: order.to_vec(),
        }
    }

    fn req(&self, a: usize, b: usize) -> usize {
        self.req[a * self.m + b]
    }

    fn witness(&self, rows: &[u8]) -> DcodeWitness {
        let r = self.r;
        let mut parities = vec![FieldVector::zero(self.q as usize, r); self.m];
        for (t, &i) in self.order.iter().enumerate() {
            parities[i] = FieldVector::from_raw(self.q as usize, rows[t * r..(t + 1) * r].to_vec());
        }
        DcodeWitness::new(self.q as usize, r, parities).expect("uniform parities")
    }
}

/// Columns `start..start+len` hold identical symbols in every placed parity;
/// those symbols, across the placed parities, are exactly 0..used.
#[derive(Clone, Copy, Debug)]
struct Class {
    start: usize,
    len: usize,
    used: u8,
}

enum Flow {
    Continue,
    Found,
    Abort,
}

enum Outcome {
    Found(Vec<u8>),
    Infeasible,
    Exhausted,
}

#[derive(Clone)]
struct Snapshot {
    depth: usize,
    rows: Vec<u8>,
    classes: Vec<Class>,
    rowsum: Vec<usize>,
}

struct Search<'a> {
    inst: &'a Instance,
    shared: &'a Shared,
    rows: Vec<u8>,
    /// `classes[t]` is the column structure before parity t is placed.
    classes: Vec<Vec<Class>>,
    /// For each message, total demand towards the parities placed so far.
    rowsum: Vec<usize>,
    /// Row t: agreeing columns between parity t and each earlier parity.
    agree: Vec<usize>,
    pending: u64,
    split_at: Option<usize>,
    frontier: Vec<Snapshot>,
}

const FLUSH_EVERY: u64 = 64;

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, shared: &'a Shared) -> Self {
        let mut classes = vec![Vec::new(); inst.m + 1];
        if inst.r > 0 {
            classes[0].push(Class {
                start: 0,
                len: inst.r,
                used: 0,
            });
        }
        Search {
            inst,
            shared,
            rows: vec![0; inst.m * inst.r],
            classes,
            rowsum: vec![0; inst.m],
            agree: vec![0; inst.m * inst.m],
            pending: 0,
            split_at: None,
            frontier: Vec::new(),
        }
    }

    fn resume(inst: &'a Instance, shared: &'a Shared, snap: &Snapshot) -> Self {
        let mut s = Search::new(inst, shared);
        s.rows[..snap.rows.len()].copy_from_slice(&snap.rows);
        s.classes[snap.depth] = snap.classes.clone();
        s.rowsum.copy_from_slice(&snap.rowsum);
        s
    }

    fn flush(&mut self) {
        if self.pending > 0 {
            self.shared.nodes.fetch_add(self.pending, Ordering::Relaxed);
            self.pending = 0;
        }
    }

    fn tick(&mut self) -> bool {
        self.pending += 1;
        if self.pending >= FLUSH_EVERY {
            let total = self.shared.nodes.fetch_add(self.pending, Ordering::Relaxed) + self.pending;
            self.pending = 0;
            if total >= self.shared.limit.load(Ordering::Relaxed) || self.shared.out_of_time() {
                self.shared.exhausted.store(true, Ordering::SeqCst);
                self.shared.stop.store(true, Ordering::SeqCst);
            }
        }
        !self.shared.stop.load(Ordering::Relaxed)
    }

    fn place(&mut self, t: usize) -> Flow {
        let inst = self.inst;
        if t == inst.m {
            return Flow::Found;
        }
        if self.split_at == Some(t) {
            self.frontier.push(Snapshot {
                depth: t,
                rows: self.rows[..t * inst.r].to_vec(),
                classes: self.classes[t].clone(),
                rowsum: self.rowsum.clone(),
            });
            return Flow::Continue;
        }
        if !self.tick() {
            return Flow::Abort;
        }
        if (0..t).any(|j| inst.req(t, j) > inst.r) {
            return Flow::Continue;
        }
        self.classes[t + 1].clear();
        self.agree[t * inst.m..t * inst.m + t].fill(0);
        self.compose(t, 0)
    }

    fn compose(&mut self, t: usize, ci: usize) -> Flow {
        if ci == self.classes[t].len() {
            return self.finish(t);
        }
        let c = self.classes[t][ci];
        self.assign(t, ci, c, 0, c.start, c.len)
    }

    /// Decides how many of the remaining columns of class `c` get symbol `s`.
    fn assign(&mut self, t: usize, ci: usize, c: Class, s: u8, pos: usize, remaining: usize) -> Flow {
        if remaining == 0 {
            return self.compose(t, ci + 1);
        }
        let inst = self.inst;
        let r = inst.r;
        let fresh = s == c.used;
        let forced = fresh || (c.used == inst.q && s + 1 == c.used);
        // How many more agreeing columns the parities carrying `s` here can take.
        let mut cap = remaining;
        if !fresh {
            for j in 0..t {
                if self.rows[j * r + c.start] == s {
                    let slack = r - inst.req(t, j);
                    cap = cap.min(slack.saturating_sub(self.agree[t * inst.m + j]));
                }
            }
        }
        if forced && cap < remaining {
            return Flow::Continue;
        }
        let lo = if forced { remaining } else { 0 };
        for count in (lo..=cap).rev() {
            if count > 0 {
                if !self.tick() {
                    return Flow::Abort;
                }
                if !fresh {
                    for j in 0..t {
                        if self.rows[j * r + c.start] == s {
                            self.agree[t * inst.m + j] += count;
                        }
                    }
                }
                self.rows[t * r + pos..t * r + pos + count].fill(s);
                self.classes[t + 1].push(Class {
                    start: pos,
                    len: count,
                    used: c.used.max(s + 1),
                });
            }
            let flow = self.assign(t, ci, c, s + 1, pos + count, remaining - count);
            if count > 0 {
                self.classes[t + 1].pop();
                if !fresh {
                    for j in 0..t {
                        if self.rows[j * r + c.start] == s {
                            self.agree[t * inst.m + j] -= count;
                        }
                    }
                }
            }
            match flow {
                Flow::Continue => {}
                other => return other,
            }
        }
        Flow::Continue
    }

    /// Parity t is complete: test every later message against cheap
    /// necessary conditions, then descend.
    fn finish(&mut self, t: usize) -> Flow {
        let inst = self.inst;
        let (m, r) = (inst.m, inst.r);
        let n = t + 1;
        // Most total distance a further parity can have to the n placed ones.
        let mut reach = 0;
        let mut mult = vec![0usize; inst.q as usize];
        for c in &self.classes[t + 1] {
            if c.used < inst.q {
                reach += c.len * n;
            } else {
                mult.iter_mut().for_each(|x| *x = 0);
                for j in 0..n {
                    mult[self.rows[j * r + c.start] as usize] += 1;
                }
                reach += c.len * (n - mult.iter().min().unwrap());
            }
        }
        for l in n..m {
            self.rowsum[l] += inst.req(l, t);
        }
        let mut ok = (n..m).all(|l| self.rowsum[l] <= reach);
        if ok && inst.q == 2 {
            // Binary: d(x, a) + d(x, b) <= 2r - d(a, b), and d(p_t, p_j) = r - agree[j].
            ok = (n..m).all(|l| {
                let dl = inst.req(l, t);
                (0..t).all(|j| inst.req(l, j) + dl <= r + self.agree[t * m + j])
            });
        }
        let flow = if ok { self.place(t + 1) } else { Flow::Continue };
        for l in n..m {
            self.rowsum[l] -= inst.req(l, t);
        }
        flow
    }
}

fn run(inst: &Instance, shared: &Shared, jobs: usize) -> Outcome {
    shared.reset_stop();
    if jobs <= 1 || inst.m <= 2 {
        let mut s = Search::new(inst, shared);
        let flow = s.place(0);
        s.flush();
        return match flow {
            Flow::Found => Outcome::Found(s.rows),
            Flow::Continue => Outcome::Infeasible,
            Flow::Abort => Outcome::Exhausted,
        };
    }
    // Split the tree at the shallowest depth that yields enough subtrees.
    let target = 8 * jobs;
    let mut frontier = Vec::new();
    for depth in 1..inst.m {
        let mut s = Search::new(inst, shared);
        s.split_at = Some(depth);
        let flow = s.place(0);
        s.flush();
        match flow {
            Flow::Found => return Outcome::Found(s.rows),
            Flow::Abort => return Outcome::Exhausted,
            Flow::Continue => {}
        }
        frontier = s.frontier;
        if frontier.is_empty() {
            return Outcome::Infeasible;
        }
        if frontier.len() >= target {
            break;
        }
    }
    let next = AtomicUsize::new(0);
    let found: Mutex<Option<Vec<u8>>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= frontier.len() || shared.stop.load(Ordering::SeqCst) {
                    break;
                }
                let snap = &frontier[i];
                let mut s = Search::resume(inst, shared, snap);
                let flow = s.place(snap.depth);
                s.flush();
                if let Flow::Found = flow {
                    let mut slot = found.lock().unwrap();
                    if slot.is_none() {
                        *slot = Some(s.rows);
                    }
                    shared.stop.store(true, Ordering::SeqCst);
                    break;
                }
            });
        }
    });
    if let Some(rows) = found.into_inner().unwrap() {
        return Outcome::Found(rows);
    }
    if shared.exhausted.load(Ordering::SeqCst) {
        Outcome::Exhausted
    } else {
        Outcome::Infeasible
    }
}
