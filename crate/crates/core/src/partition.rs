//! Partitions of GF(q)^k and the join (coarsest common refinement).
//!
//! Blocks are numbered by their lexicographically smallest member, so two
//! partitions with the same blocks compare equal regardless of how they were
//! built.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::space::{FieldVector, Space};

#[derive(Clone, PartialEq, Eq)]
pub struct Partition {
    space: Space,
    /// Block id of every vector, indexed by lexicographic rank.
    block_of: Vec<u32>,
    /// Member ranks of every block, ascending.
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds the partition whose blocks are the classes of equal labels,
    /// where `labels[i]` belongs to the vector of rank `i`.
    pub fn from_labels<L: Eq + Hash>(space: Space, labels: &[L]) -> Result<Self> {
        let n = space.size()?;
        if labels.len() != n {
            return Err(Error::Input(format!(
                "{} labels supplied for {n} vectors of {space}",
                labels.len()
            )));
        }
        let mut ids: HashMap<&L, u32> = HashMap::new();
        let mut block_of = Vec::with_capacity(n);
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (rank, label) in labels.iter().enumerate() {
            let next = blocks.len() as u32;
            let id = *ids.entry(label).or_insert(next);
            if id == next {
                blocks.push(Vec::new());
            }
            blocks[id as usize].push(rank);
            block_of.push(id);
        }
        Ok(Partition {
            space,
            block_of,
            blocks,
        })
    }

    /// The partition into preimages of `f`. `f` returning `None` means it is
    /// undefined at that vector, which is an input error.
    pub fn from_function<L, F>(space: Space, f: F) -> Result<Self>
    where
        L: Eq + Hash,
        F: Fn(&FieldVector) -> Option<L>,
    {
        let labels = space
            .vectors()?
            .iter()
            .map(|v| f(v).ok_or_else(|| Error::Input(format!("function undefined at {v}"))))
            .collect::<Result<Vec<L>>>()?;
        Self::from_labels(space, &labels)
    }

    /// Builds a partition from explicit blocks, checking that they are
    /// nonempty, disjoint and cover the space.
    pub fn from_blocks(space: Space, blocks: &[Vec<FieldVector>]) -> Result<Self> {
        let n = space.size()?;
        let mut labels: Vec<Option<usize>> = vec![None; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Input(format!("block {b} is empty")));
            }
            for v in block {
                space.check(v)?;
                let slot = &mut labels[space.rank(v)];
                if slot.is_some() {
                    return Err(Error::Input(format!("vector {v} appears in two blocks")));
                }
                *slot = Some(b);
            }
        }
        if let Some(missing) = labels.iter().position(Option::is_none) {
            return Err(Error::Input(format!(
                "vector {} is not covered by any block",
                space.unrank(missing)
            )));
        }
        let labels: Vec<usize> = labels.into_iter().flatten().collect();
        Self::from_labels(space, &labels)
    }

    /// Every vector in its own block.
    pub fn finest(space: Space) -> Result<Self> {
        let n = space.size()?;
        Ok(Partition {
            space,
            block_of: (0..n as u32).collect(),
            blocks: (0..n).map(|i| vec![i]).collect(),
        })
    }

    /// The whole space as one block.
    pub fn single_block(space: Space) -> Result<Self> {
        let n = space.size()?;
        Ok(Partition {
            space,
            block_of: vec![0; n],
            blocks: vec![(0..n).collect()],
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Block id of the vector with lexicographic rank `rank`.
    pub fn block_of_rank(&self, rank: usize) -> usize {
        self.block_of[rank] as usize
    }

    pub fn block_index(&self, v: &FieldVector) -> Result<usize> {
        self.space.check(v)?;
        Ok(self.block_of_rank(self.space.rank(v)))
    }

    /// Member ranks of block `b`, ascending.
    pub fn block_ranks(&self, b: usize) -> &[usize] {
        &self.blocks[b]
    }

    pub fn block_members(&self, b: usize) -> Vec<FieldVector> {
        self.blocks[b]
            .iter()
            .map(|&r| self.space.unrank(r))
            .collect()
    }

    /// The lexicographically smallest member, which doubles as the block's
    /// printable identifier.
    pub fn representative(&self, b: usize) -> FieldVector {
        self.space.unrank(self.blocks[b][0])
    }

    pub fn same_block(&self, u: &FieldVector, v: &FieldVector) -> Result<bool> {
        Ok(self.block_index(u)? == self.block_index(v)?)
    }

    pub(crate) fn same_block_rank(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    fn check_space(&self, other: &Partition) -> Result<()> {
        if self.space != other.space {
            return Err(Error::Shape(format!(
                "partitions of {} and {} cannot be combined",
                self.space, other.space
            )));
        }
        Ok(())
    }

    /// Blocks are the nonempty intersections of a block of `self` with a
    /// block of `other`.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        self.check_space(other)?;
        let labels: Vec<(u32, u32)> = self
            .block_of
            .iter()
            .zip(&other.block_of)
            .map(|(&a, &b)| (a, b))
            .collect();
        Partition::from_labels(self.space, &labels)
    }

    /// True iff every block of `self` lies inside a single block of `coarser`.
    pub fn is_refinement_of(&self, coarser: &Partition) -> Result<bool> {
        self.check_space(coarser)?;
        Ok(self.blocks.iter().all(|members| {
            let target = coarser.block_of[members[0]];
            members.iter().all(|&r| coarser.block_of[r] == target)
        }))
    }
}

/// Left fold of [`Partition::join`] over a nonempty sequence.
pub fn join_many<'a, I>(parts: I) -> Result<Partition>
where
    I: IntoIterator<Item = &'a Partition>,
{
    let mut iter = parts.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::Input("join of an empty sequence of partitions".into()))?;
    iter.try_fold(first.clone(), |acc, p| acc.join(p))
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({}) {{", self.space)?;
        for b in 0..self.num_blocks() {
            let members: Vec<String> = self
                .block_members(b)
                .iter()
                .map(ToString::to_string)
                .collect();
            write!(f, " {{{}}}", members.join(", "))?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(q: usize, k: usize) -> Space {
        Space::new(q, k).unwrap()
    }

    fn weight_partition() -> Partition {
        Partition::from_function(space(3, 3), |v| Some(v.weight())).unwrap()
    }

    fn sum_mod3_partition() -> Partition {
        Partition::from_function(space(3, 3), |v| {
            Some(v.symbols().iter().map(|&s| s as usize).sum::<usize>() % 3)
        })
        .unwrap()
    }

    fn block_texts(p: &Partition) -> Vec<Vec<String>> {
        (0..p.num_blocks())
            .map(|b| p.block_members(b).iter().map(|v| v.to_string()).collect())
            .collect()
    }

    fn has_block(p: &Partition, members: &[&str]) -> bool {
        let mut want: Vec<String> = members.iter().map(|s| s.to_string()).collect();
        want.sort();
        block_texts(p).contains(&want)
    }

    #[test]
    fn function_partitions_have_expected_block_sizes() {
        assert_eq!(weight_partition().block_sizes(), [1, 6, 12, 8]);
        assert_eq!(sum_mod3_partition().block_sizes(), [9, 9, 9]);
        let constant = Partition::from_function(space(2, 3), |_| Some(())).unwrap();
        assert_eq!(constant.block_sizes(), [8]);
    }

    #[test]
    fn undefined_function_is_an_input_error() {
        let r = Partition::from_function(space(2, 2), |v| (v.weight() < 2).then_some(0));
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn finest_partition() {
        assert_eq!(Partition::finest(space(2, 2)).unwrap().num_blocks(), 4);
        let f = Partition::finest(space(3, 3)).unwrap();
        assert_eq!(f.num_blocks(), 27);
        assert_eq!(f.join(&weight_partition()).unwrap(), f);
    }

    #[test]
    fn join_of_weight_and_sum_partitions() {
        let j = weight_partition().join(&sum_mod3_partition()).unwrap();
        assert_eq!(j.num_blocks(), 9);
        assert!(has_block(&j, &["111", "222"]));
        assert!(has_block(&j, &["012", "021", "102", "120", "201", "210"]));
        assert!(has_block(&j, &["000"]));
        assert!(has_block(&j, &["001", "010", "100"]));
    }

    #[test]
    fn join_is_idempotent_and_commutative() {
        let p = weight_partition();
        let q = sum_mod3_partition();
        assert_eq!(p.join(&p).unwrap(), p);
        assert_eq!(p.join(&q).unwrap(), q.join(&p).unwrap());
    }

    #[test]
    fn join_many_edge_cases() {
        let p = weight_partition();
        assert_eq!(join_many([&p]).unwrap(), p);
        assert!(matches!(join_many(Vec::<&Partition>::new()), Err(Error::Input(_))));
    }

    #[test]
    fn refinement_examples() {
        let p1 = weight_partition();
        let p2 = sum_mod3_partition();
        let finest = Partition::finest(space(3, 3)).unwrap();
        assert!(finest.is_refinement_of(&p1).unwrap());
        assert!(p1.is_refinement_of(&p1).unwrap());
        assert!(!p1.is_refinement_of(&p2).unwrap());
    }

    #[test]
    fn same_block_examples() {
        let p1 = weight_partition();
        let p2 = sum_mod3_partition();
        let s = space(3, 3);
        let a = s.parse_vector("000").unwrap();
        let b = s.parse_vector("111").unwrap();
        assert!(p2.same_block(&a, &a).unwrap());
        assert!(p2.same_block(&a, &b).unwrap());
        assert!(!p1.same_block(&a, &b).unwrap());
    }

    #[test]
    fn mismatched_spaces_are_shape_errors() {
        let a = Partition::finest(space(2, 2)).unwrap();
        let b = Partition::finest(space(2, 3)).unwrap();
        assert!(matches!(a.join(&b), Err(Error::Shape(_))));
        assert!(matches!(a.is_refinement_of(&b), Err(Error::Shape(_))));
    }

    #[test]
    fn explicit_blocks_are_validated() {
        let s = space(2, 2);
        let v = |t: &str| s.parse_vector(t).unwrap();
        let ok = Partition::from_blocks(s, &[vec![v("00"), v("11")], vec![v("01"), v("10")]]);
        assert_eq!(ok.unwrap().num_blocks(), 2);
        let dup = Partition::from_blocks(s, &[vec![v("00"), v("11")], vec![v("00"), v("01"), v("10")]]);
        assert!(matches!(dup, Err(Error::Input(_))));
        let missing = Partition::from_blocks(s, &[vec![v("00"), v("11")], vec![v("01")]]);
        assert!(matches!(missing, Err(Error::Input(_))));
        let empty = Partition::from_blocks(s, &[vec![v("00"), v("11"), v("01"), v("10")], vec![]]);
        assert!(matches!(empty, Err(Error::Input(_))));
    }

    /// Every partition of a 4-element space, as restricted-growth label strings.
    fn all_partitions_q2_k2() -> Vec<Partition> {
        let s = space(2, 2);
        let mut out = Vec::new();
        for code in 0..256u32 {
            let labels: Vec<u32> = (0..4).map(|i| (code >> (2 * i)) & 3).collect();
            let rgs = labels
                .iter()
                .enumerate()
                .all(|(i, &l)| l <= labels[..i].iter().copied().max().map_or(0, |m| m + 1));
            if rgs {
                out.push(Partition::from_labels(s, &labels).unwrap());
            }
        }
        out
    }

    #[test]
    fn join_is_the_coarsest_common_refinement() {
        let all = all_partitions_q2_k2();
        assert_eq!(all.len(), 15); // Bell(4)
        for p in &all {
            for q in &all {
                let j = p.join(q).unwrap();
                assert!(j.is_refinement_of(p).unwrap());
                assert!(j.is_refinement_of(q).unwrap());
                for r in &all {
                    if r.is_refinement_of(p).unwrap() && r.is_refinement_of(q).unwrap() {
                        assert!(r.is_refinement_of(&j).unwrap());
                    }
                }
                if q.is_refinement_of(p).unwrap() {
                    assert_eq!(&j, q);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn random_joins_refine_inputs(a in proptest::collection::vec(0u8..3, 8), b in proptest::collection::vec(0u8..3, 8)) {
            let s = space(2, 3);
            let p = Partition::from_labels(s, &a).unwrap();
            let q = Partition::from_labels(s, &b).unwrap();
            let j = p.join(&q).unwrap();
            prop_assert!(j.is_refinement_of(&p).unwrap());
            prop_assert!(j.is_refinement_of(&q).unwrap());
            prop_assert_eq!(j.block_sizes().iter().sum::<usize>(), 8);
            prop_assert_eq!(&j, &q.join(&p).unwrap());
        }
    }
}
