use std::sync::Arc;

use wzw_ope::lie::{Family, LieAlgebra};
use wzw_ope::modes::VacuumModule;
use wzw_ope::{IndexSet, OpeEngine};

fn main() -> wzw_ope::Result<()> {
    let alg = Arc::new(LieAlgebra::new(Family::So, 5)?);
    let e = OpeEngine::new(alg.clone());
    let vm = VacuumModule::new(alg, 8);
    let a = e.skew_current(1, 5)?;
    let b = e.pf_field(&IndexSet::sorted(&[1, 2, 3, 4]))?;
    let r = e.contract(&a, &b, 1)?;
    for m in 0..=r.singular_depth() as i64 {
        let engine = vm.state_of(&r.pole(m))?;
        let oracle = vm.pole(&a, m, &b)?;
        println!(
            "pole {m}: {} vacuum-module terms, agree = {}",
            oracle.len(),
            engine == oracle
        );
    }
    Ok(())
}
