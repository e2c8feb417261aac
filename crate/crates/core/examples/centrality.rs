use std::sync::Arc;

use wzw_ope::lie::{Family, LieAlgebra};
use wzw_ope::uea::Uea;

fn main() -> wzw_ope::Result<()> {
    for n in [5, 6] {
        let u = Uea::new(Arc::new(LieAlgebra::new(Family::So, n)?));
        for order in [2, 4] {
            let c = u.capelli(order)?;
            println!(
                "so_{n}: C_{order} has {} PBW terms, central = {}",
                c.len(),
                u.is_central(&c)?.central
            );
        }
    }
    let u = Uea::new(Arc::new(LieAlgebra::new(Family::Sl, 3)?));
    let g = u.gelfand_third()?;
    println!(
        "sl_3: cubic Gelfand element central = {}",
        u.is_central(&g)?.central
    );

    // a generator is not central; the witness is the first nonzero commutator
    let f = u.generator(0)?;
    let c = u.is_central(&f)?;
    if let Some((g, w)) = c.witness {
        println!(
            "[{}, {}] = {}",
            u.algebra().name(0),
            u.algebra().name(g),
            u.display(&w)
        );
    }
    Ok(())
}
