//! Named composite fields: pfaffian fields, `C_4`, the cubic `W` family and
//! the Sugawara tensor.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{add_scaled, Field, Terms};
use crate::indexset::{IndexSet, IndexSetCombination};
use crate::lie::Family;
use crate::ope::OpeEngine;
use crate::scalar::{Scalar, Q};
use crate::uea::matchings;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

impl OpeEngine {
    fn require(&self, f: Family) -> Result<()> {
        if self.algebra().family() == f {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "needs {f}_N, got {:?}",
                self.algebra()
            )))
        }
    }

    /// Pfaffian field of an ordered index sequence: the signed permutation
    /// sum of right-nested products of `F` currents, divided by `k! 2^k`.
    pub fn pf_field_seq(&self, seq: &[usize]) -> Result<Field> {
        self.require(Family::So)?;
        if seq.len() % 2 == 1 {
            return Err(Error::OddPfaffian(seq.len()));
        }
        let n = self.algebra().n();
        if let Some(&index) = seq.iter().find(|&&i| i == 0 || i > n) {
            return Err(Error::IndexOutOfRange { index, n });
        }
        let Some((set, sign)) = IndexSet::from_seq(seq) else {
            return Ok(Field::zero(self.tag()));
        };
        Ok(self.pf_field(&set)?.scale(&Scalar::int(sign as i64)))
    }

    /// `PfF_I(z)`. Permutations that differ only inside a pair or by the
    /// sign of a pair are grouped, leaving each perfect matching in each of
    /// its `k!` pair orders with weight `±1/k!`.
    pub fn pf_field(&self, set: &IndexSet) -> Result<Field> {
        self.require(Family::So)?;
        if set.len() % 2 == 1 {
            return Err(Error::OddPfaffian(set.len()));
        }
        set.check_range(self.algebra().n())?;
        let half = set.len() / 2;
        let orders = permutations(half);
        let weight = Q::ONE / (1..=half as i64).fold(Q::ONE, |a, i| a * Q::int(i));
        let mut out = Terms::new();
        for (pairs, sign) in matchings(set.indices()) {
            let currents: Vec<Field> = pairs
                .iter()
                .map(|&(i, j)| self.skew_current(i, j))
                .collect::<Result<_>>()?;
            for ord in &orders {
                let fs: Vec<Field> = ord.iter().map(|&p| currents[p].clone()).collect();
                let f = self.nested(&fs)?;
                add_scaled(
                    &mut out,
                    f.terms(),
                    &Scalar::from_q(weight * Q::int(sign as i64)),
                );
            }
        }
        Ok(self.field(out))
    }

    /// `PfF_{Σ c_I I}` extended linearly.
    pub fn pf_field_comb(&self, x: &IndexSetCombination) -> Result<Field> {
        let mut out = Field::zero(self.tag());
        for (set, c) in x.terms() {
            out = out.add(&self.pf_field(set)?.scale(c))?;
        }
        Ok(out)
    }

    /// `C_4(z) = Σ_{|I|=4} (PfF_I PfF_I)(z)`.
    pub fn c4_field(&self) -> Result<Field> {
        self.require(Family::So)?;
        let n = self.algebra().n();
        if n < 4 {
            return Err(Error::Unsupported(format!("C4 needs N >= 4, got {n}")));
        }
        let parts: Vec<Field> = IndexSet::subsets(n, 4)
            .par_iter()
            .map(|i| {
                let p = self.pf_field(i)?;
                self.normal_product(&p, &p)
            })
            .collect::<Result<_>>()?;
        let mut out = Terms::new();
        for p in &parts {
            add_scaled(&mut out, p.terms(), &Scalar::one());
        }
        Ok(self.field(out))
    }

    /// `W = d^{αβγ}(J_α(J_β J_γ))`, unnormalized.
    pub fn w_field(&self) -> Result<Field> {
        self.require(Family::Sl)?;
        let alg = self.algebra().clone();
        let d = alg.d_upper();
        let dim = alg.dim();
        let cur: Vec<Field> = (0..dim).map(|a| self.current(a)).collect::<Result<_>>()?;
        let mut out = Terms::new();
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    let v = d[a][b][c];
                    if v.is_zero() {
                        continue;
                    }
                    let f = self.nested(&[cur[a].clone(), cur[b].clone(), cur[c].clone()])?;
                    add_scaled(&mut out, f.terms(), &Scalar::from_q(v));
                }
            }
        }
        Ok(self.field(out))
    }

    /// `W_a = ½ d_a^{βγ}(J_β J_γ)` for every basis index `a`.
    pub fn w_a_fields(&self) -> Result<Vec<Field>> {
        self.require(Family::Sl)?;
        let alg = self.algebra().clone();
        let d = alg.d_mixed();
        let dim = alg.dim();
        let cur: Vec<Field> = (0..dim).map(|a| self.current(a)).collect::<Result<_>>()?;
        (0..dim)
            .into_par_iter()
            .map(|a| {
                let mut out = Terms::new();
                for b in 0..dim {
                    for c in 0..dim {
                        let v = d[a][b][c];
                        if v.is_zero() {
                            continue;
                        }
                        let f = self.normal_product(&cur[b], &cur[c])?;
                        add_scaled(&mut out, f.terms(), &Scalar::from_q(v * Q::new(1, 2)));
                    }
                }
                Ok(self.field(out))
            })
            .collect()
    }

    /// `(W, [W_a])`.
    pub fn gelfand_fields(&self) -> Result<(Field, Vec<Field>)> {
        Ok((self.w_field()?, self.w_a_fields()?))
    }

    /// `T = κ^{ab}(J_a J_b) / (2(k+g))`.
    pub fn sugawara_field(&self) -> Result<Field> {
        let alg = self.algebra().clone();
        let mut out = Terms::new();
        for a in 0..alg.dim() {
            for (b, m) in alg.metric_inv_row(a) {
                let f = self.normal_product(&self.current(a)?, &self.current(b)?)?;
                add_scaled(&mut out, f.terms(), &Scalar::from_q(m));
            }
        }
        let pre = Scalar::k_plus(alg.dual_coxeter()).scale(Q::int(2)).recip();
        Ok(self.field(out).scale(&pre))
    }
}

/// `A_N(k)` rendered as text; it carries a square root and is never
/// multiplied into a field.
pub fn gelfand_normalization(n: usize) -> String {
    format!("sqrt({n}/(18(k+{n})^2({n}+2k)({})))", n * n - 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;
    use std::sync::Arc;

    fn so(n: usize) -> OpeEngine {
        OpeEngine::new(Arc::new(LieAlgebra::so(n).unwrap()))
    }

    #[test]
    fn pf_two_set_is_current() {
        let e = so(5);
        assert_eq!(
            e.pf_field(&IndexSet::sorted(&[1, 2])).unwrap(),
            e.skew_current(1, 2).unwrap()
        );
        assert!(e.pf_field_seq(&[1, 1, 2, 3]).unwrap().is_zero());
        assert!(matches!(
            e.pf_field(&IndexSet::sorted(&[1, 2, 3])),
            Err(Error::OddPfaffian(3))
        ));
    }

    #[test]
    fn pf_four_set_three_terms() {
        let e = so(6);
        let f = |i, j| e.skew_current(i, j).unwrap();
        let np = |a: &Field, b: &Field| e.normal_product(a, b).unwrap();
        let expect = np(&f(1, 2), &f(3, 4))
            .sub(&np(&f(1, 3), &f(2, 4)))
            .unwrap()
            .add(&np(&f(1, 4), &f(2, 3)))
            .unwrap();
        let pf = e.pf_field(&IndexSet::sorted(&[1, 2, 3, 4])).unwrap();
        assert_eq!(pf, expect);
        assert_eq!(pf.weight().unwrap(), 2);
        assert_eq!(pf.len(), 3);
    }

    #[test]
    fn c4_weight() {
        let e = so(5);
        assert_eq!(e.c4_field().unwrap().weight().unwrap(), 4);
        assert!(so(3).c4_field().is_err());
    }

    #[test]
    fn sugawara_on_current() {
        for e in [
            so(3),
            so(5),
            OpeEngine::new(Arc::new(LieAlgebra::sl(3).unwrap())),
        ] {
            let t = e.sugawara_field().unwrap();
            assert_eq!(t.weight().unwrap(), 2);
            for a in 0..e.algebra().dim() {
                let j = e.current(a).unwrap();
                let r = e.contract(&t, &j, 0).unwrap();
                assert_eq!(r.singular_depth(), 2);
                assert_eq!(r.pole(2), j);
                assert_eq!(r.pole(1), e.derivative(&j).unwrap());
            }
        }
    }

    #[test]
    fn sl2_gelfand_zero() {
        let e = OpeEngine::new(Arc::new(LieAlgebra::sl(2).unwrap()));
        let (w, wa) = e.gelfand_fields().unwrap();
        assert!(w.is_zero());
        assert!(wa.iter().all(Field::is_zero));
    }
}
