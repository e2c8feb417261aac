use std::sync::Arc;

use wzw_ope::lie::{Family, LieAlgebra};
use wzw_ope::uea::Uea;
use wzw_ope::IndexSet;

fn main() -> wzw_ope::Result<()> {
    let u = Uea::new(Arc::new(LieAlgebra::new(Family::So, 6)?));
    let i = IndexSet::sorted(&[1, 2, 3, 4]);
    let pf = u.pfaffian(&i)?;
    println!("Pf F_{i} = {}", u.display(&pf));

    // Pf F_I acting on wedge basis vectors
    for j in [
        IndexSet::sorted(&[1, 2]),
        IndexSet::sorted(&[3, 4]),
        IndexSet::sorted(&[1, 5]),
    ] {
        println!("Pf F_{i} . e_{j} = {}", u.act_on_indexset(&pf, &j)?);
    }

    // [F_15, Pf F_1234] = Pf F_{F_15 {1,2,3,4}}
    let f15 = u.skew(1, 5)?;
    let lhs = u.commutator(&f15, &pf)?;
    let rhs = u.pfaffian_comb(&wzw_ope::indexset::f_action(1, 5, &i))?;
    println!("[F_15, Pf F_1234] matches Pf F_(F_15 I): {}", lhs == rhs);
    Ok(())
}
