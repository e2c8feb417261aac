use std::sync::Arc;

use wzw_ope::lie::{Family, LieAlgebra};
use wzw_ope::{IndexSet, OpeEngine};

fn main() -> wzw_ope::Result<()> {
    let alg = Arc::new(LieAlgebra::new(Family::So, 6)?);
    let e = OpeEngine::new(alg.clone());
    let pf = e.pf_field(&IndexSet::sorted(&[1, 2, 3, 4]))?;

    for (i, j) in [(1, 2), (1, 5), (5, 6)] {
        let f = e.skew_current(i, j)?;
        let r = e.contract(&f, &pf, 0)?;
        println!("F[{i},{j}](z) Pf[1,2,3,4](w):");
        print!("{}", r.display(&alg));
    }

    let r = e.contract(&pf, &pf, 1)?;
    println!(
        "Pf[1,2,3,4](z) Pf[1,2,3,4](w), singular depth {}:",
        r.singular_depth()
    );
    print!("{}", r.display(&alg));
    Ok(())
}
