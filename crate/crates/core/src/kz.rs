//! Higher KZ operator: mode decomposition of `C_4^{-1}`, correlator
//! insertion rules, canonical emission and exact numeric evaluation.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::indexset::{f_action, set_minus, IndexSet};
use crate::scalar::{Scalar, Q};
use crate::suite::{c4_minus_one_scalar, Workbench};

const BASE_TUPLES: [[i32; 4]; 3] = [[0, 1, -1, -1], [0, 1, 0, -2], [0, 0, 0, -1]];

/// Mode word `(k,l,p,q)` of `F^k F^l F^p F^q`; `multiplicity` counts the
/// index permutations of its base tuple that produce it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeTuple {
    pub modes: [i32; 4],
    pub multiplicity: usize,
}

impl ModeTuple {
    pub fn sum(&self) -> i32 {
        self.modes.iter().sum()
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// The deduplicated permutation closure of the three base tuples.
pub fn admissible_tuples() -> Vec<ModeTuple> {
    let mut seen: BTreeMap<[i32; 4], usize> = BTreeMap::new();
    for base in BASE_TUPLES {
        for p in permutations4() {
            *seen
                .entry([base[p[0]], base[p[1]], base[p[2]], base[p[3]]])
                .or_default() += 1;
        }
    }
    seen.into_iter()
        .map(|(modes, multiplicity)| ModeTuple {
            modes,
            multiplicity,
        })
        .collect()
}

/// No current mode above 1 (those kill a pfaffian) and no pfaffian mode
/// above 2 on either side of the word.
pub fn check_mode_bounds(tuples: &[ModeTuple]) -> Result<()> {
    for t in tuples {
        let [k, l, p, q] = t.modes;
        if t.modes.iter().any(|&m| !(-2..=1).contains(&m))
            || k + l > 2
            || p + q > 2
            || t.sum() != -1
        {
            return Err(Error::Unsupported(format!("mode tuple {:?}", t.modes)));
        }
    }
    Ok(())
}

/// `1/(z_i - z_j)^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pole {
    pub i: usize,
    pub j: usize,
    pub p: u32,
}

/// `F_pair` acting on tensor slot `slot` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotOp {
    pub pair: IndexSet,
    pub slot: usize,
}

impl SlotOp {
    /// Different slots, or disjoint pairs in the same slot.
    pub fn commutes(&self, other: &SlotOp) -> bool {
        self.slot != other.slot || self.pair.indices().iter().all(|&x| !other.pair.contains(x))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    /// `<PfF_J(z_1) ...>`
    Pf,
    /// `sign * <F_{J∖pair}(z_1) ...>`
    Minus { pair: IndexSet, sign: i32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorTerm {
    pub scalar: Scalar,
    pub poles: Vec<Pole>,
    pub ops: Vec<SlotOp>,
    pub target: Target,
}

type TermKey = (Vec<Pole>, Vec<SlotOp>, Target);

impl CorrelatorTerm {
    fn key(&self) -> TermKey {
        (self.poles.clone(), self.ops.clone(), self.target.clone())
    }

    pub fn pole_order(&self) -> u32 {
        self.poles.iter().map(|p| p.p).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HigherKzEquation {
    pub n: usize,
    pub r: usize,
    pub j: IndexSet,
    pub lhs: Scalar,
    pub rhs: Vec<CorrelatorTerm>,
}

/// One summand produced by a single mode factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion {
    pub scalar: Scalar,
    pub pole: Option<Pole>,
    pub op: Option<SlotOp>,
    /// Rewrites the target `PfF_J ↦ PfF_{J∖pair}`.
    pub contract: bool,
}

pub fn insertion_rules(mode: i32, pair: &IndexSet, r: usize) -> Result<Vec<Insertion>> {
    if pair.len() != 2 {
        return Err(Error::InvalidGenerator(format!("F{pair}")));
    }
    let op = |slot| {
        Some(SlotOp {
            pair: pair.clone(),
            slot,
        })
    };
    Ok(match mode {
        0 => vec![Insertion {
            scalar: Scalar::one(),
            pole: None,
            op: op(1),
            contract: false,
        }],
        -1 | -2 => (2..=r)
            .map(|j| Insertion {
                scalar: Scalar::int(-1),
                pole: Some(Pole {
                    i: 1,
                    j,
                    p: (-mode) as u32,
                }),
                op: op(j),
                contract: false,
            })
            .collect(),
        1 => vec![Insertion {
            scalar: Scalar::k_plus(2),
            pole: None,
            op: None,
            contract: true,
        }],
        _ => return Err(Error::Unsupported(format!("insertion of mode {mode}"))),
    })
}

fn rewrite(target: &Target, pair: &IndexSet, j: &IndexSet) -> Result<Option<Target>> {
    match target {
        Target::Pf => Ok(set_minus(j, pair).map(|(_, sign)| Target::Minus {
            pair: pair.clone(),
            sign,
        })),
        Target::Minus { .. } => Err(Error::Unsupported("second target rewrite".into())),
    }
}

/// Least word reachable by swapping adjacent commuting operators.
pub fn normal_order(ops: Vec<SlotOp>) -> Vec<SlotOp> {
    let mut seen = BTreeSet::from([ops.clone()]);
    let mut stack = vec![ops];
    while let Some(w) = stack.pop() {
        for i in 0..w.len().saturating_sub(1) {
            if w[i].commutes(&w[i + 1]) {
                let mut v = w.clone();
                v.swap(i, i + 1);
                if seen.insert(v.clone()) {
                    stack.push(v);
                }
            }
        }
    }
    seen.into_iter().next().unwrap_or_default()
}

#[derive(Clone)]
struct Partial {
    scalar: Scalar,
    poles: BTreeMap<usize, u32>,
    ops: Vec<SlotOp>,
    target: Target,
}

fn expand_word(
    word: &[(IndexSet, i32)],
    r: usize,
    j: &IndexSet,
    scalar: Scalar,
) -> Result<Vec<CorrelatorTerm>> {
    let mut partials = vec![Partial {
        scalar,
        poles: BTreeMap::new(),
        ops: Vec::new(),
        target: Target::Pf,
    }];
    for (pair, mode) in word {
        let rules = insertion_rules(*mode, pair, r)?;
        let mut next = Vec::with_capacity(partials.len() * rules.len());
        for p in &partials {
            for ins in &rules {
                let mut q = p.clone();
                q.scalar = &q.scalar * &ins.scalar;
                if let Some(pole) = ins.pole {
                    *q.poles.entry(pole.j).or_default() += pole.p;
                }
                if let Some(op) = &ins.op {
                    q.ops.push(op.clone());
                }
                if ins.contract {
                    match rewrite(&q.target, pair, j)? {
                        Some(t) => q.target = t,
                        None => continue,
                    }
                }
                next.push(q);
            }
        }
        partials = next;
    }
    Ok(partials
        .into_iter()
        .map(|p| CorrelatorTerm {
            scalar: p.scalar,
            poles: p
                .poles
                .into_iter()
                .map(|(j, p)| Pole { i: 1, j, p })
                .collect(),
            ops: normal_order(p.ops),
            target: p.target,
        })
        .collect())
}

fn merge(terms: impl IntoIterator<Item = CorrelatorTerm>) -> Vec<CorrelatorTerm> {
    let mut acc: BTreeMap<TermKey, Scalar> = BTreeMap::new();
    for t in terms {
        let e = acc.entry(t.key()).or_default();
        *e += &t.scalar;
    }
    acc.into_iter()
        .filter(|(_, s)| !s.is_zero())
        .map(|((poles, ops, target), scalar)| CorrelatorTerm {
            scalar,
            poles,
            ops,
            target,
        })
        .collect()
}

fn check_params(n: usize, r: usize, j: &IndexSet) -> Result<()> {
    if n < 5 {
        return Err(Error::Unsupported(format!("N={n}, need N >= 5")));
    }
    if r < 2 {
        return Err(Error::Unsupported(format!("r={r}, need r >= 2")));
    }
    if j.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: j.len(),
        });
    }
    j.check_range(n)
}

/// Right-hand side for `<PfF_J(z_1) φ_2 ... φ_r>`, canonically merged.
pub fn emit_rhs(n: usize, r: usize, j: &IndexSet) -> Result<Vec<CorrelatorTerm>> {
    check_params(n, r, j)?;
    let tuples = admissible_tuples();
    check_mode_bounds(&tuples)?;
    let quarter = Scalar::from_q(Q::new(1, 4));
    let per_set: Vec<Vec<CorrelatorTerm>> = IndexSet::subsets(n, 4)
        .par_iter()
        .map(|i| -> Result<Vec<CorrelatorTerm>> {
            let mut out = Vec::new();
            for (a1, a2, s) in i.splits(2) {
                for (b1, b2, t) in i.splits(2) {
                    let c = quarter.scale(Q::int((s * t) as i64));
                    let pairs = [&a1, &a2, &b1, &b2];
                    for tuple in &tuples {
                        let word: Vec<(IndexSet, i32)> = pairs
                            .iter()
                            .zip(tuple.modes)
                            .map(|(p, m)| ((*p).clone(), m))
                            .collect();
                        out.extend(expand_word(&word, r, j, c.clone())?);
                    }
                }
            }
            Ok(merge(out))
        })
        .collect::<Result<_>>()?;
    Ok(merge(per_set.into_iter().flatten()))
}

pub fn lhs_scalar(wb: &Workbench, n: usize) -> Result<Scalar> {
    c4_minus_one_scalar(wb, n)?.ok_or_else(|| {
        Error::Unsupported(format!("C4^(-1) PfF_J not proportional to dPfF_J at N={n}"))
    })
}

pub fn emit_equation(n: usize, r: usize, j: &IndexSet) -> Result<HigherKzEquation> {
    emit_equation_with(&Workbench::new(), n, r, j)
}

pub fn emit_equation_with(
    wb: &Workbench,
    n: usize,
    r: usize,
    j: &IndexSet,
) -> Result<HigherKzEquation> {
    let rhs = emit_rhs(n, r, j)?;
    Ok(HigherKzEquation {
        n,
        r,
        j: j.clone(),
        lhs: lhs_scalar(wb, n)?,
        rhs,
    })
}

/// Least linearization of `ops` keeping every non-commuting pair in order.
fn least_linearization(ops: &[SlotOp]) -> Vec<SlotOp> {
    let n = ops.len();
    let mut best: Option<Vec<SlotOp>> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let pos: Vec<usize> = (0..n)
            .map(|x| idx.iter().position(|&y| y == x).unwrap_or(0))
            .collect();
        let valid = (0..n).all(|a| (a + 1..n).all(|b| ops[a].commutes(&ops[b]) || pos[a] < pos[b]));
        if valid {
            let w: Vec<SlotOp> = idx.iter().map(|&x| ops[x].clone()).collect();
            if best.as_ref().is_none_or(|b| &w < b) {
                best = Some(w);
            }
        }
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| idx[i] < idx[i + 1])
        else {
            break;
        };
        let k = (i + 1..n).rev().find(|&k| idx[k] > idx[i]).unwrap_or(i);
        idx.swap(i, k);
        idx[i + 1..].reverse();
    }
    best.unwrap_or_default()
}

/// Direct per-summand expansion over tuples, dummy sets and insertion
/// sites; keyed by the rendered `poles= ops= target=` fields.
pub fn termwise_expansion(n: usize, r: usize, j: &IndexSet) -> Result<Vec<(String, Scalar)>> {
    check_params(n, r, j)?;
    let mut acc: HashMap<String, Scalar> = HashMap::new();
    for t in admissible_tuples() {
        let neg: Vec<usize> = (0..4).filter(|&p| t.modes[p] < 0).collect();
        let one = (0..4).find(|&p| t.modes[p] == 1);
        for i in IndexSet::subsets(n, 4) {
            for (a1, a2, s) in i.splits(2) {
                for (b1, b2, s2) in i.splits(2) {
                    let pairs = [a1.clone(), a2.clone(), b1, b2];
                    let (target, mut c) = match one {
                        None => (Target::Pf, Scalar::one()),
                        Some(p) => match set_minus(j, &pairs[p]) {
                            None => continue,
                            Some((_, sign)) => (
                                Target::Minus {
                                    pair: pairs[p].clone(),
                                    sign,
                                },
                                Scalar::k_plus(2),
                            ),
                        },
                    };
                    let sign = s * s2 * if neg.len() % 2 == 1 { -1 } else { 1 };
                    c = c.scale(Q::new(sign as i128, 4));
                    for code in 0..(r - 1).pow(neg.len() as u32) {
                        let mut site = [1usize; 4];
                        let mut rest = code;
                        for &p in &neg {
                            site[p] = 2 + rest % (r - 1);
                            rest /= r - 1;
                        }
                        let mut power = vec![0u32; r + 1];
                        for &p in &neg {
                            power[site[p]] += t.modes[p].unsigned_abs();
                        }
                        let poles: Vec<Pole> = (2..=r)
                            .filter(|&x| power[x] > 0)
                            .map(|x| Pole {
                                i: 1,
                                j: x,
                                p: power[x],
                            })
                            .collect();
                        let ops: Vec<SlotOp> = (0..4)
                            .filter(|&p| t.modes[p] != 1)
                            .map(|p| SlotOp {
                                pair: pairs[p].clone(),
                                slot: site[p],
                            })
                            .collect();
                        let key = render_key(&poles, &least_linearization(&ops), &target);
                        *acc.entry(key).or_default() += &c;
                    }
                }
            }
        }
    }
    let mut out: Vec<(String, Scalar)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Emitted terms in the keyed form of [`termwise_expansion`].
pub fn keyed_terms(terms: &[CorrelatorTerm]) -> Vec<(String, Scalar)> {
    let mut out: Vec<(String, Scalar)> = terms
        .iter()
        .map(|t| (render_key(&t.poles, &t.ops, &t.target), t.scalar.clone()))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn join<T>(items: &[T], sep: &str, f: impl Fn(&T) -> String) -> String {
    if items.is_empty() {
        return "-".into();
    }
    items.iter().map(f).collect::<Vec<_>>().join(sep)
}

fn indices(s: &IndexSet) -> String {
    join(s.indices(), ",", |x| x.to_string())
}

fn render_key(poles: &[Pole], ops: &[SlotOp], target: &Target) -> String {
    format!(
        "poles={} ops={} target={target}",
        join(poles, ";", |p| format!("{}:{}:{}", p.i, p.j, p.p)),
        join(ops, ";", |o| format!("{}@{}", indices(&o.pair), o.slot)),
    )
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Pf => write!(f, "PfJ"),
            Target::Minus { pair, sign } => write!(f, "PfJminus:{}:{sign:+}", indices(pair)),
        }
    }
}

impl fmt::Display for CorrelatorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "term scalar={} {}",
            self.scalar,
            render_key(&self.poles, &self.ops, &self.target)
        )
    }
}

impl fmt::Display for HigherKzEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "kz4 N={} r={} J={} lhs={}",
            self.n,
            self.r,
            indices(&self.j),
            self.lhs
        )?;
        for t in &self.rhs {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Sparse tensor on `r` slots: slot 1 holds `Λ^4 ⊕ Λ^2` of the vector
/// representation, slots `2..=r` the adjoint `Λ^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    n: usize,
    r: usize,
    coeffs: BTreeMap<Vec<IndexSet>, Q>,
}

impl Tensor {
    pub fn zero(n: usize, r: usize) -> Tensor {
        Tensor {
            n,
            r,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn insert(&mut self, key: Vec<IndexSet>, c: Q) -> Result<()> {
        if key.len() != self.r {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                got: key.len(),
            });
        }
        for (slot, s) in key.iter().enumerate() {
            let ok = if slot == 0 {
                s.len() == 4 || s.len() == 2
            } else {
                s.len() == 2
            };
            if !ok {
                return Err(Error::DimensionMismatch {
                    expected: if slot == 0 { 4 } else { 2 },
                    got: s.len(),
                });
            }
            s.check_range(self.n)?;
        }
        self.add_term(key, c);
        Ok(())
    }

    fn add_term(&mut self, key: Vec<IndexSet>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<IndexSet>, &Q)> {
        self.coeffs.iter()
    }

    pub fn get(&self, key: &[IndexSet]) -> Q {
        self.coeffs.get(key).copied().unwrap_or(Q::ZERO)
    }

    pub fn scaled(&self, c: Q) -> Tensor {
        let mut out = Tensor::zero(self.n, self.r);
        if !c.is_zero() {
            for (k, v) in &self.coeffs {
                out.coeffs.insert(k.clone(), *v * c);
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &Tensor) {
        for (k, v) in &other.coeffs {
            self.add_term(k.clone(), *v);
        }
    }

    /// `F_pair` on slot `slot` (derivation action on wedge powers).
    pub fn apply(&self, slot: usize, pair: &IndexSet) -> Tensor {
        let (a, b) = (pair.indices()[0], pair.indices()[1]);
        let mut out = Tensor::zero(self.n, self.r);
        for (key, v) in &self.coeffs {
            for (set, c) in f_action(a, b, &key[slot - 1]).terms() {
                let mut k = key.clone();
                k[slot - 1] = set.clone();
                out.add_term(k, *v * c.as_constant().unwrap_or(Q::ZERO));
            }
        }
        out
    }

    /// Contraction of slot 1 by `e_pair`: `e_K ↦ ±e_{K∖pair}` on 4-forms.
    pub fn contract(&self, pair: &IndexSet) -> Tensor {
        let mut out = Tensor::zero(self.n, self.r);
        for (key, v) in &self.coeffs {
            if key[0].len() != 4 {
                continue;
            }
            if let Some((rest, sign)) = set_minus(&key[0], pair) {
                let mut k = key.clone();
                k[0] = rest;
                out.add_term(k, *v * Q::int(sign as i64));
            }
        }
        out
    }

    /// Diagonal action of the generator `F_pair` on all slots.
    pub fn rotate(&self, pair: &IndexSet) -> Tensor {
        let mut out = Tensor::zero(self.n, self.r);
        for slot in 1..=self.r {
            out.add_assign(&self.apply(slot, pair));
        }
        out
    }

    /// Restriction to the slot-1 component `e_K`.
    pub fn slice(&self, k: &IndexSet) -> Tensor {
        let mut out = Tensor::zero(self.n, self.r);
        for (key, v) in &self.coeffs {
            if &key[0] == k {
                out.coeffs.insert(key.clone(), *v);
            }
        }
        out
    }

    /// `e_J ⊗ φ` with `φ` having seeded random integer entries in `-3..=3`
    /// on every basis element of the adjoint slots.
    pub fn random_state(n: usize, r: usize, j: &IndexSet, seed: u64) -> Result<Tensor> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let adj = IndexSet::subsets(n, 2);
        let mut out = Tensor::zero(n, r);
        let mut keys: Vec<Vec<IndexSet>> = vec![vec![j.clone()]];
        for _ in 2..=r {
            keys = keys
                .into_iter()
                .flat_map(|k| {
                    adj.iter().map(move |a| {
                        let mut v = k.clone();
                        v.push(a.clone());
                        v
                    })
                })
                .collect();
        }
        for key in keys {
            out.insert(key, Q::int(rng.gen_range(-3..=3)))?;
        }
        Ok(out)
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return writeln!(f, "0");
        }
        for (key, v) in &self.coeffs {
            let slots: Vec<String> = key.iter().map(|s| format!("e{s}")).collect();
            writeln!(f, "{v}\t{}", slots.join(" x "))?;
        }
        Ok(())
    }
}

fn check_points(points: &[Q], r: usize) -> Result<()> {
    if points.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: points.len(),
        });
    }
    for a in 0..r {
        for b in a + 1..r {
            if points[a] == points[b] {
                return Err(Error::CoincidentPoints(a + 1, b + 1));
            }
        }
    }
    Ok(())
}

fn apply_terms(terms: &[CorrelatorTerm], k: Q, points: &[Q], state: &Tensor) -> Result<Tensor> {
    let parts: Vec<Tensor> = terms
        .par_iter()
        .map(|t| -> Result<Tensor> {
            let mut c = t.scalar.eval(k).ok_or_else(|| {
                Error::Unsupported(format!("scalar {} singular at k={k}", t.scalar))
            })?;
            for p in &t.poles {
                c *= (points[p.i - 1] - points[p.j - 1]).pow(p.p).recip();
            }
            let mut x = match &t.target {
                Target::Pf => state.clone(),
                Target::Minus { pair, .. } => state.contract(pair),
            };
            for op in t.ops.iter().rev() {
                x = x.apply(op.slot, &op.pair);
            }
            Ok(x.scaled(c))
        })
        .collect::<Result<_>>()?;
    let mut out = Tensor::zero(state.n, state.r);
    for p in &parts {
        out.add_assign(p);
    }
    Ok(out)
}

/// Right-hand side applied to `state`, whose slot 1 holds the component
/// of the target pfaffian.
pub fn evaluate_rhs(eq: &HigherKzEquation, k: Q, points: &[Q], state: &Tensor) -> Result<Tensor> {
    if state.n != eq.n {
        return Err(Error::DimensionMismatch {
            expected: eq.n,
            got: state.n,
        });
    }
    if state.r != eq.r {
        return Err(Error::DimensionMismatch {
            expected: eq.r,
            got: state.r,
        });
    }
    check_points(points, eq.r)?;
    apply_terms(&eq.rhs, k, points, state)
}

/// Outcome of the global rotation test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivariance {
    pub checked: usize,
    pub failures: Vec<(IndexSet, IndexSet)>,
}

impl Equivariance {
    pub fn holds(&self) -> bool {
        self.checked > 0 && self.failures.is_empty()
    }
}

/// For every `J` and generator `g`: `g·R(e_J⊗φ) = R(g·(e_J⊗φ))`, where `R`
/// acts on the slot-1 component `e_K` through the equation for `K`.
pub fn check_equivariance(
    n: usize,
    r: usize,
    k: Q,
    points: &[Q],
    seed: u64,
) -> Result<Equivariance> {
    check_points(points, r)?;
    let sets = IndexSet::subsets(n, 4);
    let eqs: BTreeMap<IndexSet, Vec<CorrelatorTerm>> = sets
        .iter()
        .map(|j| Ok((j.clone(), emit_rhs(n, r, j)?)))
        .collect::<Result<_>>()?;
    let apply_all = |psi: &Tensor| -> Result<Tensor> {
        let mut out = Tensor::zero(n, r);
        for (j, terms) in &eqs {
            let part = psi.slice(j);
            if !part.is_zero() {
                out.add_assign(&apply_terms(terms, k, points, &part)?);
            }
        }
        Ok(out)
    };
    let mut report = Equivariance {
        checked: 0,
        failures: Vec::new(),
    };
    for (m, j) in sets.iter().enumerate() {
        let psi = Tensor::random_state(n, r, j, seed.wrapping_add(m as u64))?;
        let image = apply_all(&psi)?;
        for g in IndexSet::subsets(n, 2) {
            report.checked += 1;
            if image.rotate(&g) != apply_all(&psi.rotate(&g))? {
                report.failures.push((j.clone(), g));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::sorted(v)
    }

    #[test]
    fn tuple_closure() {
        let t = admissible_tuples();
        assert_eq!(t.len(), 28);
        let count = |b: [i32; 4]| {
            let mut s = b;
            s.sort();
            t.iter()
                .filter(|x| {
                    let mut m = x.modes;
                    m.sort();
                    m == s
                })
                .count()
        };
        assert_eq!(count([0, 1, -1, -1]), 12);
        assert_eq!(count([0, 1, 0, -2]), 12);
        assert_eq!(count([0, 0, 0, -1]), 4);
        assert!(t.iter().all(|x| x.sum() == -1));
        assert_eq!(t.iter().map(|x| x.multiplicity).sum::<usize>(), 72);
        check_mode_bounds(&t).unwrap();
    }

    #[test]
    fn insertion() {
        let rules = insertion_rules(-1, &set(&[1, 2]), 2).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].pole, Some(Pole { i: 1, j: 2, p: 1 }));
        assert_eq!(rules[0].scalar, Scalar::int(-1));
        assert_eq!(insertion_rules(-2, &set(&[1, 2]), 4).unwrap().len(), 3);
        assert!(insertion_rules(2, &set(&[1, 2]), 2).is_err());
        let j = set(&[1, 2, 3, 4]);
        assert_eq!(
            rewrite(&Target::Pf, &set(&[2, 3]), &j).unwrap(),
            Some(Target::Minus {
                pair: set(&[2, 3]),
                sign: 1
            })
        );
        assert_eq!(rewrite(&Target::Pf, &set(&[1, 5]), &j).unwrap(), None);
    }

    #[test]
    fn normal_forms_agree() {
        let ops = vec![
            SlotOp {
                pair: set(&[3, 4]),
                slot: 1,
            },
            SlotOp {
                pair: set(&[1, 2]),
                slot: 1,
            },
            SlotOp {
                pair: set(&[2, 3]),
                slot: 2,
            },
            SlotOp {
                pair: set(&[1, 3]),
                slot: 1,
            },
        ];
        let a = normal_order(ops.clone());
        assert_eq!(a, least_linearization(&ops));
        assert_eq!(a[0].pair, set(&[1, 2]));
    }

    #[test]
    fn emission_matches_termwise_small() {
        let j = set(&[1, 2, 3, 4]);
        let rhs = emit_rhs(5, 2, &j).unwrap();
        assert!(rhs
            .iter()
            .all(|t| t.poles.iter().all(|p| p.i == 1 && p.j == 2 && p.p <= 2)));
        assert_eq!(keyed_terms(&rhs), termwise_expansion(5, 2, &j).unwrap());
    }

    #[test]
    fn evaluation_basics() {
        let j = set(&[1, 2, 3, 4]);
        let eq = HigherKzEquation {
            n: 5,
            r: 2,
            j: j.clone(),
            lhs: Scalar::one(),
            rhs: emit_rhs(5, 2, &j).unwrap(),
        };
        let k = Q::int(3);
        let pts = [Q::int(0), Q::int(2)];
        let zero = Tensor::zero(5, 2);
        assert!(evaluate_rhs(&eq, k, &pts, &zero).unwrap().is_zero());
        let psi = Tensor::random_state(5, 2, &j, 1).unwrap();
        assert_eq!(
            evaluate_rhs(&eq, k, &[Q::ONE, Q::ONE], &psi),
            Err(Error::CoincidentPoints(1, 2))
        );
        assert!(matches!(
            evaluate_rhs(&eq, k, &pts, &Tensor::zero(5, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut bad = Tensor::zero(5, 2);
        assert!(bad
            .insert(vec![j.clone(), set(&[1, 2, 3])], Q::ONE)
            .is_err());
        assert!(bad.insert(vec![j.clone()], Q::ONE).is_err());
    }

    #[test]
    fn pole_homogeneity() {
        let j = set(&[1, 2, 3, 4]);
        let psi = Tensor::random_state(5, 2, &j, 4).unwrap();
        let rhs = emit_rhs(5, 2, &j).unwrap();
        let k = Q::new(1, 3);
        let pts = [Q::int(1), Q::int(-2)];
        let lambda = Q::int(5);
        let scaled = [pts[0] * lambda, pts[1] * lambda];
        for p in 1..=2 {
            let part: Vec<CorrelatorTerm> = rhs
                .iter()
                .filter(|t| t.pole_order() == p)
                .cloned()
                .collect();
            let a = apply_terms(&part, k, &scaled, &psi).unwrap();
            let b = apply_terms(&part, k, &pts, &psi)
                .unwrap()
                .scaled(lambda.pow(p).recip());
            assert_eq!(a, b);
        }
    }
}
