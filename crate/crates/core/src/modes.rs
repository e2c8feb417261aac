//! Independent check of the contraction engine on the vacuum module.
//!
//! States are PBW words of negative current modes acting on `|0⟩`. Field
//! modes are expanded into current modes and commuted with
//! `[J^a_p, J^b_q] = f^{ab}_c J^c_{p+q} + k p κ^{ab} δ_{p+q,0}`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::Arc;

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::field::{Field, Letter, Monomial};
use crate::lie::LieAlgebra;
use crate::scalar::{Scalar, Q};

/// `J^gen_{-depth}` with `depth >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode {
    pub depth: u32,
    pub gen: u16,
}

/// Nondecreasing word of negative modes, applied to the vacuum.
pub type ModeWord = Vec<Mode>;

/// A vector in the vacuum module.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct State(BTreeMap<ModeWord, Scalar>);

impl State {
    pub fn zero() -> State {
        State::default()
    }

    pub fn vacuum() -> State {
        let mut s = State::zero();
        s.add(Vec::new(), Scalar::one());
        s
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModeWord, &Scalar)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&mut self, w: ModeWord, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(w) {
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

    fn add_state(&mut self, o: &State, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (w, v) in &o.0 {
            self.add(w.clone(), v * c);
        }
    }

    /// Grade (total `L_0` eigenvalue) of the highest word.
    pub fn grade(&self) -> u32 {
        self.0.keys().map(|w| grade(w)).max().unwrap_or(0)
    }
}

fn grade(w: &[Mode]) -> u32 {
    w.iter().map(|m| m.depth).sum()
}

/// Level-truncated vacuum module with memoized current-mode action.
pub struct VacuumModule {
    alg: Arc<LieAlgebra>,
    truncation: u32,
    memo: DashMap<(u16, i64, ModeWord), Arc<State>>,
}

fn factorial(n: usize) -> Q {
    (1..=n as i64).fold(Q::ONE, |acc, i| acc * Q::int(i))
}

impl VacuumModule {
    pub fn new(alg: Arc<LieAlgebra>, truncation: u32) -> VacuumModule {
        VacuumModule {
            alg,
            truncation,
            memo: DashMap::new(),
        }
    }

    /// `J^a_n` applied to a PBW word.
    fn current_mode(&self, a: u16, n: i64, w: &[Mode]) -> Result<Arc<State>> {
        let g = grade(w) as i64 - n;
        if g < 0 {
            return Ok(Arc::new(State::zero()));
        }
        if g > self.truncation as i64 {
            return Err(Error::TruncationTooSmall {
                given: self.truncation as usize,
                needed: g as usize,
            });
        }
        if n < 0 {
            let x = Mode {
                depth: (-n) as u32,
                gen: a,
            };
            if w.is_empty() || x <= w[0] {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(x);
                v.extend_from_slice(w);
                let mut s = State::zero();
                s.add(v, Scalar::one());
                return Ok(Arc::new(s));
            }
        } else if w.is_empty() {
            return Ok(Arc::new(State::zero()));
        }
        let key = (a, n, w.to_vec());
        let hit = self.memo.get(&key).map(|r| r.clone());
        if let Some(h) = hit {
            return Ok(h);
        }
        // J^a_n w0 rest = w0 (J^a_n rest) + [J^a_n, w0] rest
        let w0 = w[0];
        let rest = &w[1..];
        let m = -(w0.depth as i64);
        let mut out = State::zero();
        let inner = self.current_mode(a, n, rest)?;
        for (u, c) in inner.terms() {
            out.add_state(&*self.current_mode(w0.gen, m, u)?, c);
        }
        for &(c, f) in self.alg.bracket(a as usize, w0.gen as usize) {
            out.add_state(
                &*self.current_mode(c as u16, n + m, rest)?,
                &Scalar::from_q(f),
            );
        }
        if n + m == 0 {
            let kap = self.alg.metric(a as usize, w0.gen as usize);
            if !kap.is_zero() {
                let mut s = State::zero();
                s.add(rest.to_vec(), Scalar::k().scale(kap * Q::int(n)));
                out.add_state(&s, &Scalar::one());
            }
        }
        let out = Arc::new(out);
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn apply_current(&self, a: u16, n: i64, v: &State) -> Result<State> {
        let mut out = State::zero();
        for (w, c) in v.terms() {
            out.add_state(&*self.current_mode(a, n, w)?, c);
        }
        Ok(out)
    }

    /// `X_(n) v` for a field monomial `X`, any integer `n`.
    fn apply_mono(&self, x: &[Letter], n: i64, v: &State) -> Result<State> {
        if v.is_zero() {
            return Ok(State::zero());
        }
        let hx: i64 = x.iter().map(|l| l.weight() as i64).sum();
        // X_(n) lowers the grade by n + 1 - h_X
        if v.grade() as i64 + hx - n - 1 < 0 {
            return Ok(State::zero());
        }
        match x {
            [] => {
                // 1_(n) = δ_{n,-1}
                Ok(if n == -1 { v.clone() } else { State::zero() })
            }
            [l] => {
                // (∂^p J)_(n) = (-1)^p n(n-1)…(n-p+1) J_(n-p)
                let p = l.deriv as usize;
                let c = (0..p as i64).fold(Q::ONE, |acc, i| acc * Q::int(n - i));
                let c = if p % 2 == 1 { -c } else { c };
                if c.is_zero() {
                    return Ok(State::zero());
                }
                let s = self.apply_current(l.gen, n - p as i64, v)?;
                let mut out = State::zero();
                out.add_state(&s, &Scalar::from_q(c));
                Ok(out)
            }
            [a, r @ ..] => {
                // (a R)_(n) v = Σ_j a_(-1-j) R_(n+j) v + Σ_j R_(n-1-j) a_(j) v
                let ha = a.weight() as i64;
                let hr = hx - ha;
                let g = v.grade() as i64;
                let mut out = State::zero();
                let mut j = 0i64;
                while g + hr - (n + j) > 0 {
                    let inner = self.apply_mono(r, n + j, v)?;
                    if !inner.is_zero() {
                        out.add_state(
                            &self.apply_mono(std::slice::from_ref(a), -1 - j, &inner)?,
                            &Scalar::one(),
                        );
                    }
                    j += 1;
                }
                let mut j = 0i64;
                while g + ha - j > 0 {
                    let inner = self.apply_mono(std::slice::from_ref(a), j, v)?;
                    if !inner.is_zero() {
                        out.add_state(&self.apply_mono(r, n - 1 - j, &inner)?, &Scalar::one());
                    }
                    j += 1;
                }
                Ok(out)
            }
        }
    }

    /// The state `X_(-1)|0⟩` of a field.
    pub fn state_of(&self, f: &Field) -> Result<State> {
        let mut out = State::zero();
        let vac = State::vacuum();
        for (m, c) in f.terms() {
            out.add_state(&self.state_of_mono(m, &vac)?, c);
        }
        Ok(out)
    }

    fn state_of_mono(&self, m: &Monomial, vac: &State) -> Result<State> {
        // (l1 (l2 …)) ↦ l1_(-1) l2_(-1) … |0⟩, and (∂^d J)_(-1) = d! J_{-d-1}
        let mut s = vac.clone();
        for l in m.letters().iter().rev() {
            let t = self.apply_current(l.gen, -(l.deriv as i64) - 1, &s)?;
            s = State::zero();
            s.add_state(&t, &Scalar::from_q(factorial(l.deriv as usize)));
        }
        Ok(s)
    }

    /// `(ab)_m |0⟩ = a_(m-1) b_(-1) |0⟩`.
    pub fn pole(&self, a: &Field, m: i64, b: &Field) -> Result<State> {
        let vb = self.state_of(b)?;
        let mut out = State::zero();
        for (am, ac) in a.terms() {
            out.add_state(&self.apply_mono(am.letters(), m - 1, &vb)?, ac);
        }
        Ok(out)
    }
}

/// Mode-level evaluation of `(ab)_m` on the vacuum, truncated at `truncation`.
pub fn mode_oracle(
    alg: Arc<LieAlgebra>,
    a: &Field,
    m: i64,
    b: &Field,
    truncation: u32,
) -> Result<State> {
    let wa = a.weights().last().copied().unwrap_or(0) as i64;
    let wb = b.weights().last().copied().unwrap_or(0) as i64;
    let needed = (wa + wb + (-m).max(0)) as usize;
    if (truncation as usize) < needed {
        return Err(Error::TruncationTooSmall {
            given: truncation as usize,
            needed,
        });
    }
    VacuumModule::new(alg, truncation).pole(a, m, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ope::OpeEngine;

    fn setup(n: usize) -> (Arc<LieAlgebra>, OpeEngine) {
        let alg = Arc::new(LieAlgebra::so(n).unwrap());
        (alg.clone(), OpeEngine::new(alg))
    }

    #[test]
    fn current_pair_examples() {
        let (alg, e) = setup(5);
        let a = e.skew_current(1, 2).unwrap();
        let s = mode_oracle(alg.clone(), &a, 2, &a, 4).unwrap();
        let mut expect = State::vacuum();
        expect = {
            let mut t = State::zero();
            t.add_state(&expect, &Scalar::k().scale(alg.metric(0, 0)));
            t
        };
        assert_eq!(s, expect);
        assert!(mode_oracle(alg.clone(), &a, 1, &a, 4).unwrap().is_zero());
        let s0 = mode_oracle(alg.clone(), &a, 0, &a, 4).unwrap();
        let m = Mode { depth: 1, gen: 0 };
        assert_eq!(
            s0.terms().collect::<Vec<_>>(),
            vec![(&vec![m, m], &Scalar::one())]
        );
    }

    #[test]
    fn truncation_reported() {
        let (alg, e) = setup(5);
        let a = e.skew_current(1, 2).unwrap();
        assert!(matches!(
            mode_oracle(alg, &a, 0, &a, 1),
            Err(Error::TruncationTooSmall {
                given: 1,
                needed: 2
            })
        ));
    }

    #[test]
    fn engine_agrees_on_products() {
        let (alg, e) = setup(5);
        let vm = VacuumModule::new(alg.clone(), 10);
        let f = |i, j| e.skew_current(i, j).unwrap();
        let a = e
            .normal_product(&f(1, 2), &e.derivative(&f(2, 3)).unwrap())
            .unwrap();
        let b = e.nested(&[f(1, 3), f(1, 2), f(3, 4)]).unwrap();
        for (x, y) in [(&a, &b), (&b, &a), (&b, &b), (&f(2, 4), &b)] {
            let r = e.contract(x, y, 2).unwrap();
            for m in -1..=6 {
                let lhs = vm.state_of(&r.pole(m)).unwrap();
                let rhs = vm.pole(x, m, y).unwrap();
                assert_eq!(lhs, rhs, "m={m}");
            }
        }
    }
}
