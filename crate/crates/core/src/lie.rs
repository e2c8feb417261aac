//! Concrete matrix Lie algebras `so_N` and `sl_N` with exact structure
//! constants, invariant metric and (for `sl_N`) the symmetric d-tensor.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    So,
    Sl,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::So => "so",
            Family::Sl => "sl",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s {
            "so" => Ok(Family::So),
            "sl" => Ok(Family::Sl),
            _ => Err(Error::Unsupported(format!("algebra family `{s}`"))),
        }
    }
}

/// A basis element of the defining matrix realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `F_ij = E_ij - E_ji`, `i < j`.
    Skew(usize, usize),
    /// `E_ij`, `i != j`.
    Unit(usize, usize),
    /// `E_ii - E_{i+1,i+1}`.
    Cartan(usize),
}

type Matrix = Vec<Vec<Q>>;

fn mat_zero(n: usize) -> Matrix {
    vec![vec![Q::ZERO; n]; n]
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut c = mat_zero(n);
    for i in 0..n {
        for l in 0..n {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[l][j].is_zero() {
                    c[i][j] += a[i][l] * b[l][j];
                }
            }
        }
    }
    c
}

fn mat_sub(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(&x, &y)| x - y).collect())
        .collect()
}

fn trace(a: &Matrix) -> Q {
    (0..a.len()).fold(Q::ZERO, |acc, i| acc + a[i][i])
}

/// Inverse of a square rational matrix by Gauss-Jordan elimination.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::ONE } else { Q::ZERO }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for c in 0..2 * n {
                    let v = a[col][c];
                    a[r][c] -= f * v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Sparse linear combination of basis indices.
pub type Combo = Vec<(usize, Q)>;

/// `[F_ij, F_kl]` from the delta formula, re-expressed on the canonical
/// basis (`F_ji = -F_ij`, `F_ii = 0`). Result entries are `((i, j), c)` with
/// `i < j`.
pub fn so_commutator(
    n: usize,
    a: (usize, usize),
    b: (usize, usize),
) -> Result<Vec<((usize, usize), Q)>> {
    for &x in [a.0, a.1, b.0, b.1].iter() {
        if x == 0 || x > n {
            return Err(Error::IndexOutOfRange { index: x, n });
        }
    }
    if a.0 >= a.1 || b.0 >= b.1 {
        return Err(Error::InvalidGenerator(format!(
            "F[{},{}] / F[{},{}] not increasing",
            a.0, a.1, b.0, b.1
        )));
    }
    let (i, j) = a;
    let (k, l) = b;
    let d = |x: usize, y: usize| x == y;
    let mut raw: Vec<((usize, usize), i64)> = Vec::new();
    if d(k, j) {
        raw.push(((i, l), 1));
    }
    if d(i, l) {
        raw.push(((k, j), -1));
    }
    if d(i, k) {
        raw.push(((j, l), -1));
    }
    if d(j, l) {
        raw.push(((k, i), 1));
    }
    let mut out: Vec<((usize, usize), Q)> = Vec::new();
    for ((p, q), c) in raw {
        if p == q {
            continue;
        }
        let (key, c) = if p < q { ((p, q), c) } else { ((q, p), -c) };
        match out.iter_mut().find(|(k2, _)| *k2 == key) {
            Some(e) => e.1 += Q::int(c),
            None => out.push((key, Q::int(c))),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out.sort_by_key(|(k, _)| *k);
    Ok(out)
}

/// Lie algebra with a fixed ordered basis.
#[derive(Clone)]
pub struct LieAlgebra {
    family: Family,
    n: usize,
    basis: Vec<Generator>,
    matrices: Vec<Matrix>,
    bracket: Vec<Vec<Combo>>,
    metric: Vec<Vec<Q>>,
    metric_inv: Vec<Vec<Q>>,
    dual_coxeter: i64,
    /// `d_abc = tr(x_a {x_b, x_c})`, lowered indices; empty for `so`.
    d_lower: Vec<Q>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family, self.n)
    }
}

impl PartialEq for LieAlgebra {
    fn eq(&self, o: &Self) -> bool {
        self.family == o.family && self.n == o.n
    }
}

impl Eq for LieAlgebra {}

impl LieAlgebra {
    pub fn new(family: Family, n: usize) -> Result<LieAlgebra> {
        match family {
            Family::So => Self::so(n),
            Family::Sl => Self::sl(n),
        }
    }

    /// `so_N` on the skew basis `F_ij`, `i < j`, lexicographic.
    ///
    /// The metric is the normalized trace form `½ tr(XY)`, which gives
    /// `κ(F_ij, F_kl) = -(δ_ik δ_jl - δ_il δ_jk)`. With it the Sugawara
    /// coefficient is `1/(2(k + N - 2))`.
    pub fn so(n: usize) -> Result<LieAlgebra> {
        if n < 2 {
            return Err(Error::Unsupported(format!("so_{n}")));
        }
        let mut basis = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                basis.push(Generator::Skew(i, j));
            }
        }
        Self::build(Family::So, n, basis, Q::new(1, 2), n as i64 - 2)
    }

    /// `sl_N` on `E_ij` (`i != j`, lexicographic) followed by
    /// `H_i = E_ii - E_{i+1,i+1}`, with metric `tr(XY)`.
    pub fn sl(n: usize) -> Result<LieAlgebra> {
        if n < 2 {
            return Err(Error::Unsupported(format!("sl_{n}")));
        }
        let mut basis = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i != j {
                    basis.push(Generator::Unit(i, j));
                }
            }
        }
        for i in 1..n {
            basis.push(Generator::Cartan(i));
        }
        Self::build(Family::Sl, n, basis, Q::ONE, n as i64)
    }

    fn matrix_of(n: usize, g: Generator) -> Matrix {
        let mut m = mat_zero(n);
        match g {
            Generator::Skew(i, j) => {
                m[i - 1][j - 1] = Q::ONE;
                m[j - 1][i - 1] = -Q::ONE;
            }
            Generator::Unit(i, j) => m[i - 1][j - 1] = Q::ONE,
            Generator::Cartan(i) => {
                m[i - 1][i - 1] = Q::ONE;
                m[i][i] = -Q::ONE;
            }
        }
        m
    }

    fn build(
        family: Family,
        n: usize,
        basis: Vec<Generator>,
        trace_scale: Q,
        dual_coxeter: i64,
    ) -> Result<LieAlgebra> {
        let matrices: Vec<Matrix> = basis.iter().map(|&g| Self::matrix_of(n, g)).collect();
        let dim = basis.len();
        let mut alg = LieAlgebra {
            family,
            n,
            basis,
            matrices,
            bracket: Vec::new(),
            metric: vec![vec![Q::ZERO; dim]; dim],
            metric_inv: Vec::new(),
            dual_coxeter,
            d_lower: Vec::new(),
        };
        let mut bracket = vec![vec![Vec::new(); dim]; dim];
        for a in 0..dim {
            for b in 0..dim {
                let pa = &alg.matrices[a];
                let pb = &alg.matrices[b];
                alg.metric[a][b] = trace(&mat_mul(pa, pb)) * trace_scale;
                if a != b {
                    let c = mat_sub(&mat_mul(pa, pb), &mat_mul(pb, pa));
                    bracket[a][b] = alg.decompose(&c);
                }
            }
        }
        alg.bracket = bracket;
        alg.metric_inv =
            invert(&alg.metric).ok_or_else(|| Error::Unsupported("degenerate metric".into()))?;
        if family == Family::Sl {
            let mut d = vec![Q::ZERO; dim * dim * dim];
            let prods: Vec<Vec<Matrix>> = (0..dim)
                .map(|b| {
                    (0..dim)
                        .map(|c| mat_mul(&alg.matrices[b], &alg.matrices[c]))
                        .collect()
                })
                .collect();
            for a in 0..dim {
                for b in 0..dim {
                    for c in b..dim {
                        let mut t = Q::ZERO;
                        let x = &alg.matrices[a];
                        for i in 0..n {
                            for l in 0..n {
                                if x[i][l].is_zero() {
                                    continue;
                                }
                                let s = prods[b][c][l][i] + prods[c][b][l][i];
                                t += x[i][l] * s;
                            }
                        }
                        d[(a * dim + b) * dim + c] = t;
                        d[(a * dim + c) * dim + b] = t;
                    }
                }
            }
            alg.d_lower = d;
        }
        Ok(alg)
    }

    /// Coordinates of a matrix in the basis.
    fn decompose(&self, m: &Matrix) -> Combo {
        let mut out = Vec::new();
        match self.family {
            Family::So => {
                for (idx, g) in self.basis.iter().enumerate() {
                    if let Generator::Skew(i, j) = *g {
                        let c = m[i - 1][j - 1];
                        if !c.is_zero() {
                            out.push((idx, c));
                        }
                    }
                }
            }
            Family::Sl => {
                let mut acc = Q::ZERO;
                for (idx, g) in self.basis.iter().enumerate() {
                    match *g {
                        Generator::Unit(i, j) => {
                            let c = m[i - 1][j - 1];
                            if !c.is_zero() {
                                out.push((idx, c));
                            }
                        }
                        Generator::Cartan(i) => {
                            acc += m[i - 1][i - 1];
                            if !acc.is_zero() {
                                out.push((idx, acc));
                            }
                        }
                        Generator::Skew(..) => unreachable!(),
                    }
                }
            }
        }
        out
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    pub fn dual_coxeter(&self) -> i64 {
        self.dual_coxeter
    }

    pub fn matrix(&self, a: usize) -> &[Vec<Q>] {
        &self.matrices[a]
    }

    /// `[x_a, x_b] = Σ_c f_ab^c x_c`.
    pub fn bracket(&self, a: usize, b: usize) -> &Combo {
        &self.bracket[a][b]
    }

    pub fn metric(&self, a: usize, b: usize) -> Q {
        self.metric[a][b]
    }

    pub fn metric_inv(&self, a: usize, b: usize) -> Q {
        self.metric_inv[a][b]
    }

    /// Nonzero entries of row `a` of the inverse metric.
    pub fn metric_inv_row(&self, a: usize) -> impl Iterator<Item = (usize, Q)> + '_ {
        self.metric_inv[a]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, &c)| (b, c))
    }

    pub fn d_lower(&self, a: usize, b: usize, c: usize) -> Q {
        if self.d_lower.is_empty() {
            return Q::ZERO;
        }
        let dim = self.dim();
        self.d_lower[(a * dim + b) * dim + c]
    }

    /// `d_a^{bc}`: first index lowered, last two raised with `κ^{-1}`.
    pub fn d_mixed(&self) -> Vec<Vec<Vec<Q>>> {
        let dim = self.dim();
        let mut out = vec![vec![vec![Q::ZERO; dim]; dim]; dim];
        if self.d_lower.is_empty() {
            return out;
        }
        for a in 0..dim {
            // raise c first
            let mut half = vec![vec![Q::ZERO; dim]; dim];
            for b in 0..dim {
                for c in 0..dim {
                    let mut s = Q::ZERO;
                    for (c2, m) in self.metric_inv_row(c) {
                        let v = self.d_lower(a, b, c2);
                        if !v.is_zero() {
                            s += m * v;
                        }
                    }
                    half[b][c] = s;
                }
            }
            for b in 0..dim {
                for c in 0..dim {
                    let mut s = Q::ZERO;
                    for (b2, m) in self.metric_inv_row(b) {
                        let v = half[b2][c];
                        if !v.is_zero() {
                            s += m * v;
                        }
                    }
                    out[a][b][c] = s;
                }
            }
        }
        out
    }

    /// `d^{abc}` with all indices raised.
    pub fn d_upper(&self) -> Vec<Vec<Vec<Q>>> {
        let dim = self.dim();
        let mixed = self.d_mixed();
        let mut out = vec![vec![vec![Q::ZERO; dim]; dim]; dim];
        for a in 0..dim {
            for (a2, m) in self.metric_inv_row(a) {
                for b in 0..dim {
                    for c in 0..dim {
                        let v = mixed[a2][b][c];
                        if !v.is_zero() {
                            out[a][b][c] += m * v;
                        }
                    }
                }
            }
        }
        out
    }

    /// Basis index of `F_ij` (either order; `i != j`).
    pub fn skew_index(&self, i: usize, j: usize) -> Option<(usize, i32)> {
        if self.family != Family::So || i == j || i == 0 || j == 0 || i > self.n || j > self.n {
            return None;
        }
        let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
        // lexicographic position of (a, b)
        let n = self.n;
        let before: usize = (1..a).map(|r| n - r).sum();
        Some((before + (b - a - 1), s))
    }

    pub fn skew_pair(&self, a: usize) -> Option<(usize, usize)> {
        match self.basis.get(a) {
            Some(Generator::Skew(i, j)) => Some((*i, *j)),
            _ => None,
        }
    }

    /// Surface name of a basis element: `F[i,j]` for `so`, `J[a]` (1-based) for `sl`.
    pub fn name(&self, a: usize) -> String {
        match self.basis[a] {
            Generator::Skew(i, j) => format!("F[{i},{j}]"),
            _ => format!("J[{}]", a + 1),
        }
    }

    /// `κ([x, y], z)` as a rational number.
    pub fn metric_on_bracket(&self, x: usize, y: usize, z: usize) -> Q {
        self.bracket(x, y)
            .iter()
            .fold(Q::ZERO, |acc, &(c, v)| acc + v * self.metric(c, z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn combo_add(acc: &mut Vec<Q>, c: &Combo, s: Q) {
        for &(i, v) in c {
            acc[i] += v * s;
        }
    }

    fn nested(alg: &LieAlgebra, x: usize, y: usize, z: usize) -> Vec<Q> {
        // [x, [y, z]]
        let mut out = vec![Q::ZERO; alg.dim()];
        for &(c, v) in alg.bracket(y, z) {
            combo_add(&mut out, alg.bracket(x, c), v);
        }
        out
    }

    #[test]
    fn so_commutator_examples() {
        let q = |i| Q::int(i);
        assert_eq!(
            so_commutator(4, (1, 2), (2, 3)).unwrap(),
            vec![((1, 3), q(1))]
        );
        assert!(so_commutator(4, (1, 2), (3, 4)).unwrap().is_empty());
        assert_eq!(
            so_commutator(4, (1, 3), (2, 3)).unwrap(),
            vec![((1, 2), q(-1))]
        );
        assert!(matches!(
            so_commutator(3, (1, 4), (1, 2)),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn so_formula_matches_matrices() {
        for n in 3..=6 {
            let alg = LieAlgebra::so(n).unwrap();
            for a in 0..alg.dim() {
                for b in 0..alg.dim() {
                    let pa = alg.skew_pair(a).unwrap();
                    let pb = alg.skew_pair(b).unwrap();
                    let f = so_commutator(n, pa, pb).unwrap();
                    let m: Vec<((usize, usize), Q)> = alg
                        .bracket(a, b)
                        .iter()
                        .map(|&(c, v)| (alg.skew_pair(c).unwrap(), v))
                        .collect();
                    assert_eq!(f, m, "[{pa:?},{pb:?}]");
                }
            }
        }
    }

    #[test]
    fn jacobi_and_invariance() {
        let algs: Vec<LieAlgebra> = (3..=6)
            .map(|n| LieAlgebra::so(n).unwrap())
            .chain((2..=4).map(|n| LieAlgebra::sl(n).unwrap()))
            .collect();
        for alg in &algs {
            let d = alg.dim();
            for x in 0..d {
                for y in 0..d {
                    let mut s = alg.bracket(x, y).clone();
                    s.sort();
                    let mut t: Combo = alg.bracket(y, x).iter().map(|&(c, v)| (c, -v)).collect();
                    t.sort();
                    assert_eq!(s, t);
                    for z in 0..d {
                        assert_eq!(alg.metric(x, y), alg.metric(y, x));
                        let inv = alg.metric_on_bracket(x, y, z) + {
                            // κ(y, [x, z])
                            alg.bracket(x, z)
                                .iter()
                                .fold(Q::ZERO, |acc, &(c, v)| acc + v * alg.metric(y, c))
                        };
                        assert!(inv.is_zero());
                        let mut j = nested(alg, x, y, z);
                        for (i, v) in nested(alg, y, z, x).into_iter().enumerate() {
                            j[i] += v;
                        }
                        for (i, v) in nested(alg, z, x, y).into_iter().enumerate() {
                            j[i] += v;
                        }
                        assert!(j.iter().all(Q::is_zero), "Jacobi {alg:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn so_metric_sign() {
        let alg = LieAlgebra::so(4).unwrap();
        let (a, _) = alg.skew_index(1, 2).unwrap();
        let (b, _) = alg.skew_index(3, 4).unwrap();
        assert_eq!(alg.metric(a, a), Q::int(-1));
        assert!(alg.metric(a, b).is_zero());
    }

    #[test]
    fn casimir_on_adjoint_is_twice_dual_coxeter() {
        for alg in [
            LieAlgebra::so(5).unwrap(),
            LieAlgebra::so(6).unwrap(),
            LieAlgebra::sl(3).unwrap(),
        ] {
            let d = alg.dim();
            for y in 0..d {
                let mut acc = vec![Q::ZERO; d];
                for a in 0..d {
                    for (b, m) in alg.metric_inv_row(a) {
                        for (i, v) in nested(&alg, a, b, y).into_iter().enumerate() {
                            acc[i] += v * m;
                        }
                    }
                }
                for (i, v) in acc.iter().enumerate() {
                    let expect = if i == y {
                        Q::int(2 * alg.dual_coxeter())
                    } else {
                        Q::ZERO
                    };
                    assert_eq!(*v, expect);
                }
            }
        }
    }

    #[test]
    fn sl2_has_no_d_tensor() {
        let alg = LieAlgebra::sl(2).unwrap();
        let d = alg.d_upper();
        assert!(d.iter().flatten().flatten().all(Q::is_zero));
    }

    #[test]
    fn sl3_d_contraction_constant() {
        // d^{γαβ} d_{αβ}^c = C κ^{γc}; the trace-form normalization gives
        // C = 2(N²-4)/N.
        for n in [3usize, 4] {
            let alg = LieAlgebra::sl(n).unwrap();
            let dim = alg.dim();
            let up = alg.d_upper();
            let mixed = alg.d_mixed(); // d_c^{αβ}
            let c_expect = Q::new(2 * (n as i128 * n as i128 - 4), n as i128);
            for g in 0..dim {
                for c in 0..dim {
                    // Σ d^{gab} d_{ab}^{c'} with d_{ab}^{c} from mixed via symmetry
                    let mut s = Q::ZERO;
                    for a in 0..dim {
                        for b in 0..dim {
                            let u = up[g][a][b];
                            if u.is_zero() {
                                continue;
                            }
                            // d_{ab}^c = Σ κ^{cc'} d_{abc'}
                            let mut low = Q::ZERO;
                            for (c2, m) in alg.metric_inv_row(c) {
                                low += m * alg.d_lower(a, b, c2);
                            }
                            s += u * low;
                        }
                    }
                    assert_eq!(s, c_expect * alg.metric_inv(g, c), "N={n}");
                }
            }
            let _ = mixed;
        }
    }

    #[test]
    fn skew_index_round_trip() {
        let alg = LieAlgebra::so(6).unwrap();
        for a in 0..alg.dim() {
            let (i, j) = alg.skew_pair(a).unwrap();
            assert_eq!(alg.skew_index(i, j), Some((a, 1)));
            assert_eq!(alg.skew_index(j, i), Some((a, -1)));
        }
    }
}
