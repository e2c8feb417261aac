//! Registry of identity checks. Each check recomputes a claim from first
//! principles and compares engine truth with the transcribed printed value.

mod algebraic;
mod gelfand;
mod pfaffian;
pub mod report;

use std::fmt;
use std::hash::Hash;
use std::str::FromStr;
use std::sync::Arc;

use dashmap::DashMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::indexset::IndexSet;
use crate::lie::{Family, LieAlgebra};
use crate::npoly::KnPoly;
use crate::ope::{OpeEngine, OpeResult};
use crate::scalar::Scalar;
use crate::uea::Uea;

pub use pfaffian::c4_minus_one_scalar;
pub use report::Format;

/// Ranks at which polynomial-in-`N` claims are interpolated.
pub const INTERPOLATION_NODES: [usize; 4] = [6, 7, 8, 9];
/// Extra rank used to confirm an interpolated polynomial.
pub const CONFIRMATION_NODE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Match,
    Mismatch,
    PaperInconsistency,
    StructuralOnly,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "mismatch",
            Verdict::PaperInconsistency => "paper-internal-inconsistency",
            Verdict::StructuralOnly => "structural-only",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;
    fn from_str(s: &str) -> Result<Verdict> {
        match s {
            "match" => Ok(Verdict::Match),
            "mismatch" => Ok(Verdict::Mismatch),
            "paper-internal-inconsistency" => Ok(Verdict::PaperInconsistency),
            "structural-only" => Ok(Verdict::StructuralOnly),
            _ => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown verdict `{s}`"),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteParams {
    pub so_n: usize,
    pub sl_n: usize,
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            so_n: 6,
            sl_n: 3,
            seed: 0,
        }
    }
}

impl SuiteParams {
    pub fn validate(&self) -> Result<()> {
        if !(5..=9).contains(&self.so_n) {
            return Err(Error::Unsupported(format!(
                "so_N needs 5 <= N <= 9, got {}",
                self.so_n
            )));
        }
        if !(3..=4).contains(&self.sl_n) {
            return Err(Error::Unsupported(format!(
                "sl_N needs 3 <= N <= 4, got {}",
                self.sl_n
            )));
        }
        Ok(())
    }
}

/// Outcome of one registry entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub id: &'static str,
    pub params: String,
    pub verdict: Verdict,
    /// Whether the claimed shape (which poles, which fields) holds.
    pub structural: bool,
    pub engine_value: String,
    pub paper_value: Option<String>,
    pub diff: Option<String>,
}

/// Verdict from the comparison against each printed variant.
fn verdict_of(agrees: &[bool], variants_consistent: bool) -> Verdict {
    if agrees.iter().all(|&a| a) {
        Verdict::Match
    } else if !variants_consistent {
        Verdict::PaperInconsistency
    } else {
        Verdict::Mismatch
    }
}

struct CheckBuilder {
    id: &'static str,
    params: Vec<String>,
    engine: Vec<String>,
    paper: Vec<String>,
    diff: Vec<String>,
    structural: bool,
}

impl CheckBuilder {
    fn new(id: &'static str) -> CheckBuilder {
        CheckBuilder {
            id,
            params: Vec::new(),
            engine: Vec::new(),
            paper: Vec::new(),
            diff: Vec::new(),
            structural: true,
        }
    }

    fn param(&mut self, s: impl Into<String>) -> &mut Self {
        self.params.push(s.into());
        self
    }

    fn engine(&mut self, s: impl Into<String>) -> &mut Self {
        self.engine.push(s.into());
        self
    }

    fn paper(&mut self, s: impl Into<String>) -> &mut Self {
        self.paper.push(s.into());
        self
    }

    fn diff(&mut self, s: impl Into<String>) -> &mut Self {
        self.diff.push(s.into());
        self
    }

    /// Records a shape claim; a failing claim is also listed in the diff.
    fn shape(&mut self, ok: bool, what: &str) -> &mut Self {
        if !ok {
            self.structural = false;
            self.diff.push(format!("shape fails: {what}"));
        }
        self
    }

    fn finish(&self, verdict: Verdict) -> IdentityCheck {
        let join = |v: &[String]| v.join("; ");
        IdentityCheck {
            id: self.id,
            params: join(&self.params),
            verdict,
            structural: self.structural,
            engine_value: join(&self.engine),
            paper_value: (!self.paper.is_empty()).then(|| join(&self.paper)),
            diff: (!self.diff.is_empty()).then(|| join(&self.diff)),
        }
    }
}

/// Memo that tolerates duplicated work under contention but never blocks.
struct Memo<K, V>(DashMap<K, V>);

impl<K: Hash + Eq, V: Clone> Memo<K, V> {
    fn new() -> Self {
        Memo(DashMap::new())
    }

    fn get(&self, k: K, f: impl FnOnce() -> Result<V>) -> Result<V> {
        if let Some(v) = self.0.get(&k) {
            return Ok(v.clone());
        }
        let v = f()?;
        Ok(self.0.entry(k).or_insert(v).clone())
    }
}

/// The five pfaffian lemmas; `L4Squared` is L4 with its stated `1/(z-x)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lemma {
    L1,
    L2,
    L3,
    L4,
    L4Squared,
    L5,
}

/// Shared engines and expensive intermediate results.
pub struct Workbench {
    engines: Memo<(Family, usize), Arc<OpeEngine>>,
    ueas: Memo<(Family, usize), Arc<Uea>>,
    c4: Memo<usize, Arc<Field>>,
    c4_pf: Memo<(usize, IndexSet, bool), Arc<OpeResult>>,
    lemmas: Memo<(usize, u8, i64), Arc<Vec<Field>>>,
}

impl Default for Workbench {
    fn default() -> Self {
        Workbench::new()
    }
}

impl Workbench {
    pub fn new() -> Workbench {
        Workbench {
            engines: Memo::new(),
            ueas: Memo::new(),
            c4: Memo::new(),
            c4_pf: Memo::new(),
            lemmas: Memo::new(),
        }
    }

    fn algebra(family: Family, n: usize) -> Result<Arc<LieAlgebra>> {
        Ok(Arc::new(LieAlgebra::new(family, n)?))
    }

    pub fn engine(&self, family: Family, n: usize) -> Result<Arc<OpeEngine>> {
        self.engines.get((family, n), || {
            Ok(Arc::new(OpeEngine::new(Self::algebra(family, n)?)))
        })
    }

    pub fn uea(&self, family: Family, n: usize) -> Result<Arc<Uea>> {
        self.ueas.get((family, n), || {
            Ok(Arc::new(Uea::new(Self::algebra(family, n)?)))
        })
    }

    pub fn c4(&self, n: usize) -> Result<Arc<Field>> {
        self.c4
            .get(n, || Ok(Arc::new(self.engine(Family::So, n)?.c4_field()?)))
    }

    /// `C_4(z) PfF_J(w)` (`c4_first`) or `PfF_J(z) C_4(w)`, singular part.
    pub fn c4_pf(&self, n: usize, j: &IndexSet, c4_first: bool) -> Result<Arc<OpeResult>> {
        self.c4_pf.get((n, j.clone(), c4_first), || {
            let e = self.engine(Family::So, n)?;
            let c4 = self.c4(n)?;
            let pf = e.pf_field(j)?;
            let r = if c4_first {
                e.contract(&c4, &pf, 0)?
            } else {
                e.contract(&pf, &c4, 0)?
            };
            Ok(Arc::new(r))
        })
    }

    /// Pole coefficients (index = pole order) of a lemma partial sum at `J = {1,2,3,4}`.
    fn lemma_sum(&self, n: usize, lemma: u8, shift: i64) -> Result<Arc<Vec<Field>>> {
        self.lemmas.get((n, lemma, shift), || {
            let e = self.engine(Family::So, n)?;
            Ok(Arc::new(pfaffian::lemma_partial_sum(
                &e,
                &default_j(),
                lemma,
                shift,
            )?))
        })
    }

    /// Summed OPE `Σ_I Σ_{I=I1⊔I2} ± X(z) PfF_I(w)` for one lemma at `J = {1,2,3,4}`,
    /// indexed by pole order.
    pub fn lemma_series(&self, n: usize, lemma: Lemma) -> Result<Arc<Vec<Field>>> {
        let (id, shift) = match lemma {
            Lemma::L1 => (1, 4),
            Lemma::L2 => (2, 3),
            Lemma::L3 => (3, 2),
            Lemma::L4 => (4, 1),
            Lemma::L4Squared => (4, 2),
            Lemma::L5 => (5, 1),
        };
        self.lemma_sum(n, id, shift)
    }

    /// Computes the shared heavy intermediates ahead of a parallel run.
    pub fn prewarm(&self, so_n: usize) -> Result<()> {
        let mut ns: Vec<usize> = INTERPOLATION_NODES.to_vec();
        ns.push(CONFIRMATION_NODE);
        if !ns.contains(&so_n) {
            ns.push(so_n);
        }
        for &n in &ns {
            self.c4(n)?;
        }
        ns.par_iter()
            .map(|&n| {
                self.c4_pf(n, &default_j(), true)?;
                self.c4_pf(n, &default_j(), false)?;
                Ok(())
            })
            .collect::<Result<Vec<()>>>()?;
        Ok(())
    }
}

pub(crate) fn default_j() -> IndexSet {
    IndexSet::sorted(&[1, 2, 3, 4])
}

/// Per-check evaluation context.
pub(crate) struct Ctx<'a> {
    pub wb: &'a Workbench,
    pub p: SuiteParams,
    pub id: &'static str,
}

impl Ctx<'_> {
    /// Deterministic generator for this check: depends only on seed and id.
    pub fn rng(&self) -> ChaCha8Rng {
        let h = self.id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
        });
        ChaCha8Rng::seed_from_u64(self.p.seed ^ h)
    }

    pub fn so(&self) -> Result<Arc<OpeEngine>> {
        self.wb.engine(Family::So, self.p.so_n)
    }

    pub fn sl(&self) -> Result<Arc<OpeEngine>> {
        self.wb.engine(Family::Sl, self.p.sl_n)
    }

    /// A random 4-subset of `1..=n` other than the default, for sampling.
    pub fn random_four_set(&self, n: usize) -> IndexSet {
        use rand::seq::SliceRandom;
        let mut rng = self.rng();
        let all: Vec<usize> = (1..=n).collect();
        loop {
            let mut v: Vec<usize> = all.choose_multiple(&mut rng, 4).copied().collect();
            v.sort_unstable();
            let s = IndexSet::sorted(&v);
            if s != default_j() {
                return s;
            }
        }
    }
}

/// Evaluates a polynomial-in-`N` engine quantity at the interpolation
/// nodes, interpolates, and confirms the result at the extra node.
pub(crate) fn interpolate_in_n(
    mut at: impl FnMut(usize) -> Result<Option<Scalar>>,
) -> Result<Interpolated> {
    let mut samples = Vec::new();
    for &n in &INTERPOLATION_NODES {
        match at(n)? {
            Some(s) => samples.push((n as i64, s)),
            None => return Ok(Interpolated::NotScalar { n }),
        }
    }
    let Some(poly) = KnPoly::interpolate(&samples) else {
        return Ok(Interpolated::NotPolynomial);
    };
    let check = at(CONFIRMATION_NODE)?;
    let confirmed = check.as_ref() == Some(&poly.at(CONFIRMATION_NODE as i64));
    Ok(Interpolated::Poly { poly, confirmed })
}

pub(crate) enum Interpolated {
    Poly { poly: KnPoly, confirmed: bool },
    NotScalar { n: usize },
    NotPolynomial,
}

impl Interpolated {
    pub fn poly(&self) -> Option<&KnPoly> {
        match self {
            Interpolated::Poly {
                poly,
                confirmed: true,
            } => Some(poly),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Interpolated::Poly { poly, confirmed } => {
                let c = if *confirmed {
                    "confirmed"
                } else {
                    "NOT confirmed"
                };
                format!("{poly} ({c} at N={CONFIRMATION_NODE})")
            }
            Interpolated::NotScalar { n } => format!("not proportional at N={n}"),
            Interpolated::NotPolynomial => "not polynomial in k".into(),
        }
    }
}

type CheckFn = fn(&Ctx) -> Result<IdentityCheck>;

/// Registry entry.
pub struct CheckEntry {
    pub id: &'static str,
    pub family: Family,
    pub summary: &'static str,
    run: CheckFn,
}

macro_rules! entry {
    ($id:literal, $fam:ident, $sum:literal, $f:path) => {
        CheckEntry {
            id: $id,
            family: Family::$fam,
            summary: $sum,
            run: $f,
        }
    };
}

static REGISTRY: &[CheckEntry] = &[
    entry!(
        "capelli_center",
        So,
        "C_2 and C_4 commute with every generator of U(so_N)",
        algebraic::capelli_center
    ),
    entry!(
        "gelfand_center",
        Sl,
        "cubic Gelfand element commutes with U(sl_N)",
        algebraic::gelfand_center
    ),
    entry!(
        "prop_pffco",
        So,
        "[F_ij, PfF_I] = PfF_{F_ij I}",
        algebraic::prop_pffco
    ),
    entry!(
        "minor_sum",
        So,
        "PfF_I = 1/2 sum over splits of signed F_I1 F_I2",
        algebraic::minor_sum
    ),
    entry!(
        "eq_com",
        So,
        "commutator of two order-4 pfaffians",
        algebraic::eq_com
    ),
    entry!(
        "eq_ei",
        So,
        "sum_I e_I (x) e_I is so_N-invariant",
        algebraic::eq_ei
    ),
    entry!(
        "prop_p6",
        So,
        "F_I2(J minus I1) nonzero iff I, J differ by one element",
        algebraic::prop_p6
    ),
    entry!(
        "prop_p1",
        Sl,
        "current times quadratic composite, six terms",
        pfaffian::prop_p1
    ),
    entry!(
        "prop_p2",
        So,
        "F_j times (F_a F_b) for disjoint pairs",
        pfaffian::prop_p2
    ),
    entry!("prop_p4", So, "F_J times PfF_I", pfaffian::prop_p4),
    entry!("eq_jpf", So, "modes of F_J on PfF_I", pfaffian::eq_jpf),
    entry!(
        "prop_p5",
        So,
        "PfF_J times PfF_I against the simplified split formula",
        pfaffian::prop_p5
    ),
    entry!(
        "eq_rq2",
        So,
        "(PfF_J)_m PfF_I = 0 for m > 2",
        pfaffian::eq_rq2
    ),
    entry!(
        "prop_lead_pole",
        So,
        "PfF_{PfF_I J}(z) PfF_I(w) starts at the simple pole",
        pfaffian::prop_lead_pole
    ),
    entry!(
        "eq_pfb",
        So,
        "symmetrized commutator OPE vanishes",
        pfaffian::eq_pfb
    ),
    entry!(
        "eq_ab1",
        So,
        "associativity rearrangement of normal products",
        pfaffian::eq_ab1
    ),
    entry!(
        "eq_ab2",
        So,
        "commutation rearrangement of normal products",
        pfaffian::eq_ab2
    ),
    entry!(
        "lemma_l1",
        So,
        "quartic pole term of the split sum",
        pfaffian::lemma_l1
    ),
    entry!(
        "lemma_l2",
        So,
        "cubic-denominator term of the split sum",
        pfaffian::lemma_l2
    ),
    entry!(
        "lemma_l3",
        So,
        "no poles above order 2 in the F PfF term",
        pfaffian::lemma_l3
    ),
    entry!(
        "lemma_l4",
        So,
        "no poles above order 2 in the (F PfF)_1 term",
        pfaffian::lemma_l4
    ),
    entry!("lemma_l5", So, "F_I1 PfF_{F_I2 J} term", pfaffian::lemma_l5),
    entry!("thm_c4_ope", So, "PfF_J(z) C_4(w)", pfaffian::thm_c4_ope),
    entry!(
        "eq_c4_swapped",
        So,
        "C_4(z) PfF_J(w)",
        pfaffian::eq_c4_swapped
    ),
    entry!(
        "cor_s1",
        So,
        "C_4^{-1} PfF_J proportional to d PfF_J",
        pfaffian::cor_s1
    ),
    entry!(
        "eq_sugawara",
        Sl,
        "T(z) J(w) for the Sugawara tensor",
        gelfand::eq_sugawara
    ),
    entry!(
        "bracket_indep",
        Sl,
        "d(J(JJ)) = d((JJ)J)",
        gelfand::bracket_indep
    ),
    entry!("eq_op1", Sl, "T(z) W_a(w)", gelfand::eq_op1),
    entry!("eq_ja", Sl, "J_a(z) W_b(w)", gelfand::eq_ja),
    entry!("eq_r1", Sl, "J_a(z) W(w)", gelfand::eq_r1),
    entry!("eq_r2", Sl, "W(z) W_a(w)", gelfand::eq_r2),
    entry!(
        "eq_opeosn",
        Sl,
        "leading W OPE on primaries has differential-operator shape",
        gelfand::eq_opeosn
    ),
    entry!(
        "thm_wn_j",
        Sl,
        "W_n on derivatives of currents",
        gelfand::thm_wn_j
    ),
    entry!(
        "thm_wn_w",
        Sl,
        "W_n on derivatives of W_a",
        gelfand::thm_wn_w
    ),
    entry!(
        "cor_not_diff",
        Sl,
        "W_n is not a differential operator on currents",
        gelfand::cor_not_diff
    ),
];

pub fn registry() -> &'static [CheckEntry] {
    REGISTRY
}

pub fn check_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|s| s.id).collect()
}

pub fn run_check(id: &str, params: SuiteParams) -> Result<IdentityCheck> {
    run_check_with(&Workbench::new(), id, params)
}

pub fn run_check_with(wb: &Workbench, id: &str, params: SuiteParams) -> Result<IdentityCheck> {
    params.validate()?;
    let spec = REGISTRY
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownCheck(id.to_string()))?;
    (spec.run)(&Ctx {
        wb,
        p: params,
        id: spec.id,
    })
}

/// Aggregate of a full registry run, in registry order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub params: SuiteParams,
    pub checks: Vec<IdentityCheck>,
}

impl Report {
    pub fn structural_failures(&self) -> Vec<&IdentityCheck> {
        self.checks.iter().filter(|c| !c.structural).collect()
    }

    /// True iff every structural claim holds.
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.structural)
    }

    pub fn get(&self, id: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.checks.iter().filter(|c| c.verdict == v).count()
    }
}

pub fn run_all(params: SuiteParams) -> Result<Report> {
    run_all_with(&Workbench::new(), params)
}

pub fn run_all_with(wb: &Workbench, params: SuiteParams) -> Result<Report> {
    params.validate()?;
    wb.prewarm(params.so_n)?;
    let checks = REGISTRY
        .par_iter()
        .map(|s| {
            (s.run)(&Ctx {
                wb,
                p: params,
                id: s.id,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report { params, checks })
}

/// Compact rendering of a field: full text when short, a term count otherwise.
pub(crate) fn show(alg: &LieAlgebra, f: &Field) -> String {
    const LIMIT: usize = 12;
    if f.len() <= LIMIT {
        f.display(alg).to_string()
    } else {
        format!("<{} terms, weights {:?}>", f.len(), f.weights())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_unique() {
        let mut ids = check_ids();
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn unknown_and_out_of_range() {
        assert!(matches!(
            run_check("nope", SuiteParams::default()),
            Err(Error::UnknownCheck(_))
        ));
        let p = SuiteParams {
            so_n: 4,
            ..Default::default()
        };
        assert!(matches!(
            run_check("prop_p4", p),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn verdict_round_trip() {
        for v in [
            Verdict::Match,
            Verdict::Mismatch,
            Verdict::PaperInconsistency,
            Verdict::StructuralOnly,
        ] {
            assert_eq!(v.to_string().parse::<Verdict>().unwrap(), v);
        }
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(verdict_of(&[true, true], false), Verdict::Match);
        assert_eq!(
            verdict_of(&[true, false], false),
            Verdict::PaperInconsistency
        );
        assert_eq!(verdict_of(&[false], true), Verdict::Mismatch);
    }
}
