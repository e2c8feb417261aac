//! Universal enveloping algebra in PBW normal form.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::indexset::{IndexSet, IndexSetCombination};
use crate::lie::{Family, LieAlgebra};
use crate::scalar::{Scalar, Q};

/// Generator word, nondecreasing in basis order when stored.
pub type Word = Vec<u16>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Tag(Family, usize);

/// Element of `U(g)` as a map from PBW words to rational coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct UeaElement {
    tag: Tag,
    terms: BTreeMap<Word, Q>,
}

impl UeaElement {
    fn with_tag(tag: Tag) -> Self {
        UeaElement {
            tag,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[u16]) -> Q {
        self.terms.get(w).copied().unwrap_or(Q::ZERO)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.tag == o.tag {
            Ok(())
        } else {
            Err(Error::MixedAlgebras)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.clone();
        for (w, &c) in &o.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scaled(-Q::ONE))
    }

    pub fn scaled(&self, c: Q) -> Self {
        let mut out = Self::with_tag(self.tag);
        if !c.is_zero() {
            out.terms = self
                .terms
                .iter()
                .map(|(w, &v)| (w.clone(), v * c))
                .collect();
        }
        out
    }
}

impl fmt::Debug for UeaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.terms)
    }
}

/// Multiplication context: a Lie algebra plus a shared cache of
/// generator-times-word products.
pub struct Uea {
    alg: Arc<LieAlgebra>,
    cache: DashMap<(u16, Word), Arc<BTreeMap<Word, Q>>>,
}

/// Outcome of a centrality test.
#[derive(Clone, Debug)]
pub struct Centrality {
    pub central: bool,
    /// First generator (basis index) with a nonzero commutator, and that commutator.
    pub witness: Option<(usize, UeaElement)>,
}

impl Uea {
    pub fn new(alg: Arc<LieAlgebra>) -> Uea {
        Uea {
            alg,
            cache: DashMap::new(),
        }
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.alg
    }

    fn tag(&self) -> Tag {
        Tag(self.alg.family(), self.alg.n())
    }

    pub fn zero(&self) -> UeaElement {
        UeaElement::with_tag(self.tag())
    }

    pub fn one(&self) -> UeaElement {
        let mut e = self.zero();
        e.add_term(Vec::new(), Q::ONE);
        e
    }

    pub fn generator(&self, a: usize) -> Result<UeaElement> {
        if a >= self.alg.dim() {
            return Err(Error::InvalidGenerator(format!("basis index {a}")));
        }
        let mut e = self.zero();
        e.add_term(vec![a as u16], Q::ONE);
        Ok(e)
    }

    /// `F_ij` for `so_N`, with `F_ji = -F_ij` and `F_ii = 0`.
    pub fn skew(&self, i: usize, j: usize) -> Result<UeaElement> {
        if i == j {
            return Ok(self.zero());
        }
        let (a, s) = self
            .alg
            .skew_index(i, j)
            .ok_or_else(|| Error::InvalidGenerator(format!("F[{i},{j}] in {:?}", self.alg)))?;
        Ok(self.generator(a)?.scaled(Q::int(s as i64)))
    }

    /// `g · w` for a single generator and a PBW word, in normal form.
    fn gen_times_word(&self, g: u16, w: &[u16]) -> Arc<BTreeMap<Word, Q>> {
        if w.is_empty() || g <= w[0] {
            let mut m = BTreeMap::new();
            let mut v = Vec::with_capacity(w.len() + 1);
            v.push(g);
            v.extend_from_slice(w);
            m.insert(v, Q::ONE);
            return Arc::new(m);
        }
        let key = (g, w.to_vec());
        if let Some(hit) = self.cache.get(&key) {
            return hit.clone();
        }
        // g w0 rest = w0 (g rest) + [g, w0] rest
        let w0 = w[0];
        let rest = &w[1..];
        let mut out: BTreeMap<Word, Q> = BTreeMap::new();
        let inner = self.gen_times_word(g, rest);
        for (u, c) in inner.iter() {
            for (v, d) in self.gen_times_word(w0, u).iter() {
                *out.entry(v.clone()).or_insert(Q::ZERO) += *c * *d;
            }
        }
        for &(h, c) in self.alg.bracket(g as usize, w0 as usize) {
            for (v, d) in self.gen_times_word(h as u16, rest).iter() {
                *out.entry(v.clone()).or_insert(Q::ZERO) += c * *d;
            }
        }
        out.retain(|_, v| !v.is_zero());
        let out = Arc::new(out);
        self.cache.insert(key, out.clone());
        out
    }

    fn word_times(&self, w: &[u16], x: &BTreeMap<Word, Q>) -> BTreeMap<Word, Q> {
        let mut cur = x.clone();
        for &g in w.iter().rev() {
            let mut next: BTreeMap<Word, Q> = BTreeMap::new();
            for (u, c) in &cur {
                for (v, d) in self.gen_times_word(g, u).iter() {
                    *next.entry(v.clone()).or_insert(Q::ZERO) += *c * *d;
                }
            }
            next.retain(|_, v| !v.is_zero());
            cur = next;
        }
        cur
    }

    /// PBW normal form of an arbitrary generator word.
    pub fn normalize(&self, word: &[usize]) -> Result<UeaElement> {
        if let Some(&a) = word.iter().find(|&&a| a >= self.alg.dim()) {
            return Err(Error::InvalidGenerator(format!("basis index {a}")));
        }
        let w: Word = word.iter().map(|&a| a as u16).collect();
        let mut unit = BTreeMap::new();
        unit.insert(Vec::new(), Q::ONE);
        let mut e = self.zero();
        e.terms = self.word_times(&w, &unit);
        Ok(e)
    }

    pub fn mul(&self, a: &UeaElement, b: &UeaElement) -> Result<UeaElement> {
        a.check(b)?;
        if a.tag != self.tag() {
            return Err(Error::MixedAlgebras);
        }
        let mut out = self.zero();
        for (w, &c) in &a.terms {
            for (v, d) in self.word_times(w, &b.terms) {
                out.add_term(v, c * d);
            }
        }
        Ok(out)
    }

    pub fn commutator(&self, a: &UeaElement, b: &UeaElement) -> Result<UeaElement> {
        self.mul(a, b)?.sub(&self.mul(b, a)?)
    }

    /// Noncommutative pfaffian of an ordered index sequence. Repeated
    /// indices give zero; an unsorted sequence picks up its sorting sign.
    pub fn pfaffian_seq(&self, seq: &[usize]) -> Result<UeaElement> {
        self.require(Family::So)?;
        if seq.len() % 2 == 1 {
            return Err(Error::OddPfaffian(seq.len()));
        }
        for &i in seq {
            if i == 0 || i > self.alg.n() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    n: self.alg.n(),
                });
            }
        }
        let Some((set, sign)) = IndexSet::from_seq(seq) else {
            return Ok(self.zero());
        };
        Ok(self.pfaffian(&set)?.scaled(Q::int(sign as i64)))
    }

    /// `Pf F_I`. Every term of the symmetrized sum is a product of generators
    /// on pairwise disjoint index pairs, which commute, so the sum collapses
    /// to signed perfect matchings.
    pub fn pfaffian(&self, set: &IndexSet) -> Result<UeaElement> {
        self.require(Family::So)?;
        if set.len() % 2 == 1 {
            return Err(Error::OddPfaffian(set.len()));
        }
        set.check_range(self.alg.n())?;
        let mut out = self.zero();
        for (pairs, sign) in matchings(set.indices()) {
            let word: Vec<usize> = pairs
                .iter()
                .map(|&(i, j)| {
                    self.alg
                        .skew_index(i, j)
                        .map(|(a, _)| a)
                        .expect("valid pair")
                })
                .collect();
            let e = self.normalize(&word)?;
            out = out.add(&e.scaled(Q::int(sign as i64)))?;
        }
        Ok(out)
    }

    /// `Pf F_{Σ c_I I}` extended linearly; only constant coefficients allowed.
    pub fn pfaffian_comb(&self, x: &IndexSetCombination) -> Result<UeaElement> {
        let mut out = self.zero();
        for (set, c) in x.terms() {
            let q = c
                .as_constant()
                .ok_or_else(|| Error::Unsupported("k-dependent coefficient in U(g)".into()))?;
            out = out.add(&self.pfaffian(set)?.scaled(q))?;
        }
        Ok(out)
    }

    /// `C_n = Σ_{|I|=n} (Pf F_I)²`.
    pub fn capelli(&self, n: usize) -> Result<UeaElement> {
        self.require(Family::So)?;
        if n % 2 == 1 {
            return Err(Error::OddPfaffian(n));
        }
        if n < 2 || n > self.alg.n() {
            return Err(Error::Unsupported(format!("C_{n} for N={}", self.alg.n())));
        }
        let parts: Vec<UeaElement> = IndexSet::subsets(self.alg.n(), n)
            .par_iter()
            .map(|i| {
                let p = self.pfaffian(i)?;
                self.mul(&p, &p)
            })
            .collect::<Result<_>>()?;
        let mut out = self.zero();
        for p in parts {
            out = out.add(&p)?;
        }
        Ok(out)
    }

    /// `d^{αβγ} x_α x_β x_γ`; zero for `sl_2`.
    pub fn gelfand_third(&self) -> Result<UeaElement> {
        self.require(Family::Sl)?;
        let d = self.alg.d_upper();
        let mut out = self.zero();
        for (a, da) in d.iter().enumerate() {
            for (b, dab) in da.iter().enumerate() {
                for (c, &v) in dab.iter().enumerate() {
                    if !v.is_zero() {
                        out = out.add(&self.normalize(&[a, b, c])?.scaled(v))?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Action on `Λ V` where a word acts by composition, its left factor last.
    pub fn act_on_indexset(&self, x: &UeaElement, set: &IndexSet) -> Result<IndexSetCombination> {
        set.check_range(self.alg.n())?;
        let mut out = IndexSetCombination::zero();
        for (w, &c) in &x.terms {
            let mut cur = IndexSetCombination::single(set.clone(), Scalar::one());
            for &g in w.iter().rev() {
                cur = self.gen_on_comb(g as usize, &cur);
                if cur.is_zero() {
                    break;
                }
            }
            out.add(&cur, &Scalar::from_q(c));
        }
        Ok(out)
    }

    /// Derivation action of a basis matrix on wedge products.
    pub fn gen_on_comb(&self, g: usize, x: &IndexSetCombination) -> IndexSetCombination {
        let m = self.alg.matrix(g);
        let mut out = IndexSetCombination::zero();
        for (set, c) in x.terms() {
            let idx = set.indices();
            for (pos, &e) in idx.iter().enumerate() {
                for (row, r) in m.iter().enumerate() {
                    let v = r[e - 1];
                    if v.is_zero() {
                        continue;
                    }
                    let mut seq = idx.to_vec();
                    seq[pos] = row + 1;
                    if let Some((s, sign)) = IndexSet::from_seq(&seq) {
                        out.add_term(s, c.scale(v * Q::int(sign as i64)));
                    }
                }
            }
        }
        out
    }

    pub fn is_central(&self, x: &UeaElement) -> Result<Centrality> {
        let bad = (0..self.alg.dim())
            .into_par_iter()
            .map(|g| -> Result<Option<(usize, UeaElement)>> {
                let c = self.commutator(x, &self.generator(g)?)?;
                Ok(if c.is_zero() { None } else { Some((g, c)) })
            })
            .collect::<Result<Vec<_>>>()?;
        let witness = bad.into_iter().flatten().next();
        Ok(Centrality {
            central: witness.is_none(),
            witness,
        })
    }

    fn require(&self, f: Family) -> Result<()> {
        if self.alg.family() == f {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "operation needs {f}_N, got {:?}",
                self.alg
            )))
        }
    }

    /// Human-readable rendering, words by degree then basis order.
    pub fn display(&self, x: &UeaElement) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(&Word, &Q)> = x.terms.iter().collect();
        terms.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        let mut s = String::new();
        for (n, (w, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if w.is_empty() {
                s.push_str(&a.to_string());
                continue;
            }
            if !a.is_one() {
                s.push_str(&a.to_string());
                s.push(' ');
            }
            let mut i = 0;
            while i < w.len() {
                let mut r = 1;
                while i + r < w.len() && w[i + r] == w[i] {
                    r += 1;
                }
                s.push_str(&self.alg.name(w[i] as usize));
                if r > 1 {
                    s.push_str(&format!("^{r}"));
                }
                i += r;
            }
        }
        s
    }
}

/// Perfect matchings of an increasing index list with their pfaffian signs.
pub fn matchings(idx: &[usize]) -> Vec<(Vec<(usize, usize)>, i32)> {
    if idx.is_empty() {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    let first = idx[0];
    for p in 1..idx.len() {
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|&(q, _)| q + 1 != p)
            .map(|(_, &x)| x)
            .collect();
        let sign = if p % 2 == 1 { 1 } else { -1 };
        for (mut m, s) in matchings(&rest) {
            m.insert(0, (first, idx[p]));
            out.push((m, s * sign));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexset::f_action;

    fn so(n: usize) -> Uea {
        Uea::new(Arc::new(LieAlgebra::so(n).unwrap()))
    }

    fn f(u: &Uea, i: usize, j: usize) -> usize {
        u.algebra().skew_index(i, j).unwrap().0
    }

    #[test]
    fn pbw_examples() {
        let u = so(4);
        let e = u.normalize(&[f(&u, 2, 3), f(&u, 1, 2)]).unwrap();
        let expect = u
            .normalize(&[f(&u, 1, 2), f(&u, 2, 3)])
            .unwrap()
            .sub(&u.generator(f(&u, 1, 3)).unwrap())
            .unwrap();
        assert_eq!(e, expect);
        assert_eq!(u.display(&e), "F[1,2]F[2,3] - F[1,3]");
        let e = u.normalize(&[f(&u, 1, 2), f(&u, 3, 4)]).unwrap();
        assert_eq!(e.coeff(&[f(&u, 1, 2) as u16, f(&u, 3, 4) as u16]), Q::ONE);
        assert_eq!(e.len(), 1);
        assert_eq!(u.display(&u.normalize(&[0, 0]).unwrap()), "F[1,2]^2");
    }

    #[test]
    fn pfaffian_examples() {
        let u = so(4);
        let set = IndexSet::sorted(&[1, 2, 3, 4]);
        assert_eq!(
            u.display(&u.pfaffian(&set).unwrap()),
            "F[1,2]F[3,4] - F[1,3]F[2,4] + F[1,4]F[2,3]"
        );
        assert_eq!(
            u.pfaffian(&IndexSet::sorted(&[2, 4])).unwrap(),
            u.generator(f(&u, 2, 4)).unwrap()
        );
        assert!(u.pfaffian_seq(&[1, 2, 1, 3]).unwrap().is_zero());
        assert_eq!(u.pfaffian_seq(&[2, 1]).unwrap(), u.skew(2, 1).unwrap());
        assert!(matches!(
            u.pfaffian_seq(&[1, 2, 3]),
            Err(Error::OddPfaffian(3))
        ));
        assert_eq!(u.pfaffian(&IndexSet::empty()).unwrap(), u.one());
    }

    #[test]
    fn matchings_count_and_signs() {
        assert_eq!(matchings(&[1, 2, 3, 4, 5, 6]).len(), 15);
        let m = matchings(&[1, 2, 3, 4]);
        let signs: Vec<i32> = m.iter().map(|x| x.1).collect();
        assert_eq!(signs, vec![1, -1, 1]);
    }

    #[test]
    fn capelli_small() {
        let u = so(3);
        let c2 = u.capelli(2).unwrap();
        let mut expect = u.zero();
        for a in 0..3 {
            expect = expect.add(&u.normalize(&[a, a]).unwrap()).unwrap();
        }
        assert_eq!(c2, expect);
        assert!(u.is_central(&c2).unwrap().central);
        let v = so(4);
        assert_eq!(v.capelli(4).unwrap(), {
            let p = v.pfaffian(&IndexSet::sorted(&[1, 2, 3, 4])).unwrap();
            v.mul(&p, &p).unwrap()
        });
        assert!(u.capelli(3).is_err());
    }

    #[test]
    fn generator_not_central() {
        let u = so(3);
        let c = u.is_central(&u.skew(1, 2).unwrap()).unwrap();
        assert!(!c.central);
        assert!(c.witness.is_some());
    }

    #[test]
    fn gelfand_sl2_zero() {
        let u = Uea::new(Arc::new(LieAlgebra::sl(2).unwrap()));
        assert!(u.gelfand_third().unwrap().is_zero());
    }

    #[test]
    fn action_examples() {
        let u = so(4);
        let w = u.normalize(&[f(&u, 1, 2), f(&u, 2, 3)]).unwrap();
        // normalize keeps F12 F23 as is
        let r = u.act_on_indexset(&w, &IndexSet::sorted(&[3])).unwrap();
        assert_eq!(
            r,
            IndexSetCombination::single(IndexSet::sorted(&[1]), Scalar::one())
        );
        let i = IndexSet::sorted(&[1, 3]);
        assert_eq!(
            u.act_on_indexset(&u.one(), &i).unwrap(),
            IndexSetCombination::single(i.clone(), Scalar::one())
        );
        let pf = u.pfaffian(&IndexSet::sorted(&[1, 2, 3, 4])).unwrap();
        let r = u.act_on_indexset(&pf, &IndexSet::sorted(&[1, 2])).unwrap();
        assert_eq!(
            r,
            IndexSetCombination::single(IndexSet::sorted(&[3, 4]), Scalar::int(-2))
        );
    }

    #[test]
    fn matrix_action_matches_f_action() {
        let u = so(5);
        for a in 0..u.algebra().dim() {
            let (i, j) = u.algebra().skew_pair(a).unwrap();
            for set in IndexSet::subsets(5, 2)
                .into_iter()
                .chain(IndexSet::subsets(5, 3))
            {
                let x = IndexSetCombination::single(set.clone(), Scalar::one());
                assert_eq!(u.gen_on_comb(a, &x), f_action(i, j, &set));
            }
        }
    }

    #[test]
    fn mixed_algebras_rejected() {
        let a = so(4);
        let b = so(5);
        assert_eq!(a.mul(&a.one(), &b.one()).unwrap_err(), Error::MixedAlgebras);
    }
}
