//! Signed index sets identified with wedge products `e_{i1}∧…∧e_{ik}`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Canonical (strictly increasing) set of 1-based indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(Vec<usize>);

/// Sign of the permutation sorting `seq`, or 0 when an index repeats.
pub fn sort_sign(seq: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return 0;
            }
            if seq[i] > seq[j] {
                sign = -sign;
            }
        }
    }
    sign
}

impl IndexSet {
    pub fn empty() -> IndexSet {
        IndexSet(Vec::new())
    }

    /// Canonicalize an ordered sequence: returns the sorted set and the sign
    /// of the sorting permutation, or `None` if an index repeats.
    pub fn from_seq(seq: &[usize]) -> Option<(IndexSet, i32)> {
        let sign = sort_sign(seq);
        if sign == 0 {
            return None;
        }
        let mut v = seq.to_vec();
        v.sort_unstable();
        Some((IndexSet(v), sign))
    }

    /// Build from already increasing indices.
    pub fn sorted(v: &[usize]) -> IndexSet {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        IndexSet(v.to_vec())
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i == 0 || i > n) {
            Some(&index) => Err(Error::IndexOutOfRange { index, n }),
            None => Ok(()),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn pair(&self) -> Option<(usize, usize)> {
        match self.0[..] {
            [a, b] => Some((a, b)),
            _ => None,
        }
    }

    /// All subsets of `{1..n}` of the given size, in lexicographic order.
    pub fn subsets(n: usize, size: usize) -> Vec<IndexSet> {
        fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<IndexSet>) {
            if left == 0 {
                out.push(IndexSet(cur.clone()));
                return;
            }
            for i in start..=n {
                if n - i + 1 < left {
                    break;
                }
                cur.push(i);
                rec(i + 1, n, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(1, n, size, &mut Vec::new(), &mut out);
        out
    }

    /// Ordered splits `I = I1 ⊔ I2` with `|I1| = a`, each with its sign
    /// `(-1)^{(I1,I2)}`.
    pub fn splits(&self, a: usize) -> Vec<(IndexSet, IndexSet, i32)> {
        let mut out = Vec::new();
        let n = self.0.len();
        if a > n {
            return out;
        }
        for pos in IndexSet::subsets(n, a) {
            let first: Vec<usize> = pos.0.iter().map(|&p| self.0[p - 1]).collect();
            let second: Vec<usize> = self
                .0
                .iter()
                .copied()
                .filter(|i| !first.contains(i))
                .collect();
            let seq: Vec<usize> = first.iter().chain(second.iter()).copied().collect();
            out.push((IndexSet(first), IndexSet(second), sort_sign(&seq)));
        }
        out
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `I ∖ J`: zero unless `J ⊆ I`, otherwise the complement carrying the sign
/// of the permutation that places `J` first.
pub fn set_minus(i: &IndexSet, j: &IndexSet) -> Option<(IndexSet, i32)> {
    if !j.is_subset(i) {
        return None;
    }
    let rest: Vec<usize> = i.0.iter().copied().filter(|x| !j.contains(*x)).collect();
    let seq: Vec<usize> = j.0.iter().chain(rest.iter()).copied().collect();
    Some((IndexSet(rest), sort_sign(&seq)))
}

/// `(-1)^{(I1,I2)}` for a partition `I = I1 ⊔ I2`.
pub fn split_sign(i: &IndexSet, i1: &IndexSet, i2: &IndexSet) -> Result<i32> {
    let seq: Vec<usize> = i1.0.iter().chain(i2.0.iter()).copied().collect();
    match IndexSet::from_seq(&seq) {
        Some((s, sign)) if &s == i => Ok(sign),
        _ => Err(Error::NotAPartition),
    }
}

/// Finite linear combination of canonical index sets.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct IndexSetCombination {
    terms: BTreeMap<IndexSet, Scalar>,
}

impl IndexSetCombination {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(i: IndexSet, c: Scalar) -> Self {
        let mut s = Self::zero();
        s.add_term(i, c);
        s
    }

    /// From an ordered sequence, canonicalized with its sorting sign.
    pub fn from_seq(seq: &[usize]) -> Self {
        match IndexSet::from_seq(seq) {
            Some((i, s)) => Self::single(i, Scalar::int(s as i64)),
            None => Self::zero(),
        }
    }

    pub fn add_term(&mut self, i: IndexSet, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(i) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&mut self, other: &Self, c: &Scalar) {
        for (i, v) in &other.terms {
            self.add_term(i.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        out.add(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexSet, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: &IndexSet) -> Scalar {
        self.terms.get(i).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for IndexSetCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}){i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for IndexSetCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Action of `F_ij = E_ij - E_ji` on a single basis vector `e_m`:
/// `F_ij e_j = e_i`, `F_ij e_i = -e_j`.
pub fn f_on_vector(i: usize, j: usize, m: usize) -> Option<(usize, i32)> {
    if m == j {
        Some((i, 1))
    } else if m == i {
        Some((j, -1))
    } else {
        None
    }
}

/// Derivation action of `F_ij` on `e_{I}`.
pub fn f_action(i: usize, j: usize, set: &IndexSet) -> IndexSetCombination {
    let mut out = IndexSetCombination::zero();
    let idx = set.indices();
    for (pos, &m) in idx.iter().enumerate() {
        if let Some((t, s)) = f_on_vector(i, j, m) {
            let mut seq = idx.to_vec();
            seq[pos] = t;
            if let Some((c, sign)) = IndexSet::from_seq(&seq) {
                out.add_term(c, Scalar::int((s * sign) as i64));
            }
        }
    }
    out
}

/// `F_ij` acting on a combination.
pub fn f_action_comb(i: usize, j: usize, x: &IndexSetCombination) -> IndexSetCombination {
    let mut out = IndexSetCombination::zero();
    for (set, c) in x.terms() {
        out.add(&f_action(i, j, set), c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::sorted(v)
    }

    #[test]
    fn set_minus_examples() {
        assert_eq!(
            set_minus(&set(&[1, 2, 3, 4]), &set(&[2, 3])),
            Some((set(&[1, 4]), 1))
        );
        assert_eq!(
            set_minus(&set(&[1, 2, 3, 4]), &set(&[1, 3])),
            Some((set(&[2, 4]), -1))
        );
        assert_eq!(set_minus(&set(&[1, 2, 3, 4]), &set(&[1, 5])), None);
    }

    #[test]
    fn split_sign_examples() {
        let i = set(&[1, 2, 3, 4]);
        assert_eq!(split_sign(&i, &set(&[1, 2]), &set(&[3, 4])), Ok(1));
        assert_eq!(split_sign(&i, &set(&[1, 3]), &set(&[2, 4])), Ok(-1));
        assert_eq!(split_sign(&i, &set(&[2, 3]), &set(&[1, 4])), Ok(1));
        assert_eq!(
            split_sign(&i, &set(&[1, 2]), &set(&[3, 5])),
            Err(Error::NotAPartition)
        );
    }

    #[test]
    fn f_action_examples() {
        let a = f_action(1, 2, &set(&[2, 3]));
        assert_eq!(a, IndexSetCombination::single(set(&[1, 3]), Scalar::int(1)));
        let b = f_action(1, 2, &set(&[1, 3]));
        assert_eq!(
            b,
            IndexSetCombination::single(set(&[2, 3]), Scalar::int(-1))
        );
        assert!(f_action(3, 4, &set(&[1, 2])).is_zero());
        // both indices present: F_12 e1∧e2 = -e2∧e2 + e1∧e1 = 0
        assert!(f_action(1, 2, &set(&[1, 2])).is_zero());
    }

    #[test]
    fn repeated_index_is_zero() {
        assert!(IndexSetCombination::from_seq(&[1, 2, 1]).is_zero());
        assert_eq!(
            IndexSetCombination::from_seq(&[2, 1]),
            IndexSetCombination::single(set(&[1, 2]), Scalar::int(-1))
        );
    }

    #[test]
    fn splits_cover_partitions() {
        let i = set(&[1, 2, 3, 4]);
        let s = i.splits(2);
        assert_eq!(s.len(), 6);
        for (a, b, sign) in s {
            assert_eq!(split_sign(&i, &a, &b).unwrap(), sign);
            assert_eq!(set_minus(&i, &a).unwrap(), (b, sign));
        }
    }

    #[test]
    fn subsets_count() {
        assert_eq!(IndexSet::subsets(6, 4).len(), 15);
        assert_eq!(IndexSet::subsets(5, 4).len(), 5);
        assert_eq!(IndexSet::subsets(3, 0), vec![IndexSet::empty()]);
    }
}
