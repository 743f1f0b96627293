//! Vectors over a q-ary alphabet and their Hamming geometry.
//!
//! Symbols are stored explicitly (one byte each) so the alphabet size stays
//! generic. [`Space::rank`] gives the lexicographic index of a vector, with
//! coordinate 1 most significant; every enumeration in the crate follows
//! that order.

use std::fmt;

use crate::error::{Error, Result};

/// Largest alphabet accepted anywhere in the crate.
pub const MAX_Q: usize = u8::MAX as usize;
/// Largest alphabet accepted by the digit-string text form.
pub const MAX_TEXT_Q: usize = 10;

/// The message space GF(q)^k, described by its alphabet size and dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Space {
    q: u8,
    k: usize,
}

impl Space {
    pub fn new(q: usize, k: usize) -> Result<Self> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(Error::Input(format!(
                "alphabet size must lie in [2, {MAX_Q}], got {q}"
            )));
        }
        if k == 0 {
            return Err(Error::Input("dimension must be at least 1".into()));
        }
        Ok(Space { q: q as u8, k })
    }

    pub fn q(&self) -> usize {
        self.q as usize
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of vectors, q^k.
    pub fn size(&self) -> Result<usize> {
        checked_power(self.q(), self.k).ok_or_else(|| {
            Error::Capacity(format!("{}^{} vectors do not fit an index", self.q, self.k))
        })
    }

    /// All q^k vectors in lexicographic order.
    pub fn vectors(&self) -> Result<Vec<FieldVector>> {
        let n = self.size()?;
        Ok((0..n).map(|i| self.unrank(i)).collect())
    }

    pub fn zero(&self) -> FieldVector {
        FieldVector::zero(self.q(), self.k)
    }

    pub fn contains(&self, v: &FieldVector) -> bool {
        v.q == self.q && v.len() == self.k
    }

    pub(crate) fn check(&self, v: &FieldVector) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "vector {v} (q={}, length {}) is not in GF({})^{}",
                v.q,
                v.len(),
                self.q,
                self.k
            )))
        }
    }

    /// Lexicographic index of `v`. The caller guarantees `v` lies in the space.
    pub fn rank(&self, v: &FieldVector) -> usize {
        debug_assert!(self.contains(v));
        v.symbols
            .iter()
            .fold(0usize, |acc, &s| acc * self.q() + s as usize)
    }

    pub fn unrank(&self, mut index: usize) -> FieldVector {
        let mut symbols = vec![0u8; self.k];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % self.q()) as u8;
            index /= self.q();
        }
        FieldVector { q: self.q, symbols }
    }

    /// Parses the k-digit text form, enforcing q <= 10.
    pub fn parse_vector(&self, text: &str) -> Result<FieldVector> {
        let v = FieldVector::parse(text, self.q())?;
        if v.len() != self.k {
            return Err(Error::Input(format!(
                "vector {text:?} has {} symbols, expected {}",
                v.len(),
                self.k
            )));
        }
        Ok(v)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})^{}", self.q, self.k)
    }
}

pub(crate) fn checked_power(base: usize, exp: usize) -> Option<usize> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// A tuple of symbols in {0, ..., q-1}.
///
/// Used both for messages (length k) and for parity vectors (length r, which
/// may be zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector {
    q: u8,
    symbols: Vec<u8>,
}

impl FieldVector {
    pub fn new(q: usize, symbols: Vec<u8>) -> Result<Self> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(Error::Input(format!("alphabet size {q} out of range")));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= q) {
            return Err(Error::Input(format!("symbol {bad} is not below q={q}")));
        }
        Ok(FieldVector { q: q as u8, symbols })
    }

    pub(crate) fn from_raw(q: usize, symbols: Vec<u8>) -> Self {
        debug_assert!(symbols.iter().all(|&s| (s as usize) < q));
        FieldVector { q: q as u8, symbols }
    }

    pub fn zero(q: usize, len: usize) -> Self {
        FieldVector {
            q: q as u8,
            symbols: vec![0; len],
        }
    }

    /// Parses a digit string such as `"012"`. Only alphabets up to 10 symbols
    /// have a text form.
    pub fn parse(text: &str, q: usize) -> Result<Self> {
        if !(2..=MAX_TEXT_Q).contains(&q) {
            return Err(Error::Input(format!(
                "text vectors need 2 <= q <= {MAX_TEXT_Q}, got q={q}"
            )));
        }
        let symbols = text
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if (d as usize) < q => Ok(d as u8),
                _ => Err(Error::Input(format!(
                    "{c:?} in {text:?} is not a digit below q={q}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldVector { q: q as u8, symbols })
    }

    pub fn q(&self) -> usize {
        self.q as usize
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn weight(&self) -> usize {
        hamming_weight(self)
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &FieldVector) -> Result<FieldVector> {
        if self.q != other.q {
            return Err(Error::Shape(format!(
                "cannot concatenate q={} with q={}",
                self.q, other.q
            )));
        }
        let mut symbols = Vec::with_capacity(self.len() + other.len());
        symbols.extend_from_slice(&self.symbols);
        symbols.extend_from_slice(&other.symbols);
        Ok(FieldVector { q: self.q, symbols })
    }

    /// Splits off the first `at` symbols, returning `(prefix, suffix)`.
    pub fn split(&self, at: usize) -> (FieldVector, FieldVector) {
        let (a, b) = self.symbols.split_at(at.min(self.len()));
        (
            FieldVector::from_raw(self.q(), a.to_vec()),
            FieldVector::from_raw(self.q(), b.to_vec()),
        )
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q() <= MAX_TEXT_Q {
            for &s in &self.symbols {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.symbols.iter().map(u8::to_string).collect();
            write!(f, "[{}]", parts.join("."))
        }
    }
}

/// Number of coordinates in which `u` and `v` differ.
pub fn hamming_distance(u: &FieldVector, v: &FieldVector) -> Result<usize> {
    if u.q != v.q || u.len() != v.len() {
        return Err(Error::Shape(format!(
            "cannot compare {u} (q={}, length {}) with {v} (q={}, length {})",
            u.q,
            u.len(),
            v.q,
            v.len()
        )));
    }
    Ok(distance(&u.symbols, &v.symbols))
}

/// Unchecked distance on raw symbol slices of equal length.
#[inline]
pub(crate) fn distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn hamming_weight(u: &FieldVector) -> usize {
    u.symbols.iter().filter(|&&s| s != 0).count()
}

/// All vectors at distance exactly 1 from `u`, coordinate ascending, then
/// replacement symbol ascending.
pub fn neighbors(u: &FieldVector) -> Vec<FieldVector> {
    let mut out = Vec::with_capacity(u.len() * (u.q() - 1));
    for i in 0..u.len() {
        for s in 0..u.q {
            if s != u.symbols[i] {
                let mut symbols = u.symbols.clone();
                symbols[i] = s;
                out.push(FieldVector { q: u.q, symbols });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(text: &str, q: usize) -> FieldVector {
        FieldVector::parse(text, q).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&v("000", 3), &v("100", 3)).unwrap(), 1);
        assert_eq!(hamming_distance(&v("012", 3), &v("012", 3)).unwrap(), 0);
        assert_eq!(hamming_distance(&v("012", 3), &v("021", 3)).unwrap(), 2);
    }

    #[test]
    fn distance_rejects_mismatched_shapes() {
        assert!(matches!(
            hamming_distance(&v("00", 3), &v("000", 3)),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            hamming_distance(&v("01", 2), &v("01", 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(hamming_weight(&v("000", 3)), 0);
        assert_eq!(hamming_weight(&v("111", 3)), 3);
        assert_eq!(hamming_weight(&v("102", 3)), 2);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let s = Space::new(2, 2).unwrap();
        let text: Vec<String> = s.vectors().unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(text, ["00", "01", "10", "11"]);

        let s = Space::new(3, 1).unwrap();
        let text: Vec<String> = s.vectors().unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(text, ["0", "1", "2"]);

        let all = Space::new(2, 3).unwrap().vectors().unwrap();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0].to_string(), "000");
        assert_eq!(all[7].to_string(), "111");
    }

    #[test]
    fn enumeration_overflow_is_a_capacity_error() {
        let s = Space::new(255, 200).unwrap();
        assert!(matches!(s.size(), Err(Error::Capacity(_))));
        assert!(matches!(s.vectors(), Err(Error::Capacity(_))));
    }

    #[test]
    fn neighbor_examples() {
        let n: Vec<String> = neighbors(&v("00", 2)).iter().map(|x| x.to_string()).collect();
        assert_eq!(n, ["10", "01"]);
        let n: Vec<String> = neighbors(&v("0", 3)).iter().map(|x| x.to_string()).collect();
        assert_eq!(n, ["1", "2"]);
        assert_eq!(neighbors(&v("120", 3)).len(), 6);
    }

    #[test]
    fn parse_rejects_bad_digits() {
        assert!(FieldVector::parse("013", 3).is_err());
        assert!(FieldVector::parse("0a", 3).is_err());
        assert!(FieldVector::parse("01", 11).is_err());
        assert!(Space::new(3, 3).unwrap().parse_vector("01").is_err());
    }

    #[test]
    fn wide_alphabets_render_with_separators() {
        let x = FieldVector::new(16, vec![15, 0, 3]).unwrap();
        assert_eq!(x.to_string(), "[15.0.3]");
    }

    fn vec_triple() -> impl Strategy<Value = (usize, Vec<u8>, Vec<u8>, Vec<u8>)> {
        (2usize..5, 1usize..7).prop_flat_map(|(q, k)| {
            let sym = proptest::collection::vec(0..q as u8, k);
            (Just(q), sym.clone(), sym.clone(), sym)
        })
    }

    proptest! {
        #[test]
        fn triangle_inequality_and_symmetry((q, a, b, c) in vec_triple()) {
            let (a, b, c) = (
                FieldVector::new(q, a).unwrap(),
                FieldVector::new(q, b).unwrap(),
                FieldVector::new(q, c).unwrap(),
            );
            let ab = hamming_distance(&a, &b).unwrap();
            let bc = hamming_distance(&b, &c).unwrap();
            let ac = hamming_distance(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc);
            prop_assert_eq!(ab, hamming_distance(&b, &a).unwrap());
            prop_assert_eq!(hamming_weight(&a), hamming_distance(&a, &FieldVector::zero(q, a.len())).unwrap());
        }

        #[test]
        fn neighbor_relation_is_distance_one((q, a, b, _c) in vec_triple()) {
            let (a, b) = (FieldVector::new(q, a).unwrap(), FieldVector::new(q, b).unwrap());
            let d = hamming_distance(&a, &b).unwrap();
            prop_assert_eq!(neighbors(&a).contains(&b), d == 1);
            prop_assert_eq!(neighbors(&b).contains(&a), d == 1);
            prop_assert_eq!(neighbors(&a).len(), a.len() * (q - 1));
        }

        #[test]
        fn rank_round_trips(q in 2usize..5, k in 1usize..6, seed in any::<usize>()) {
            let s = Space::new(q, k).unwrap();
            let i = seed % s.size().unwrap();
            prop_assert_eq!(s.rank(&s.unrank(i)), i);
        }
    }

    #[test]
    fn enumeration_yields_distinct_vectors() {
        let s = Space::new(3, 3).unwrap();
        let all = s.vectors().unwrap();
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 27);
    }
}
