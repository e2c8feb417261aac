use std::sync::Arc;

use wzw_ope::lie::{Family, LieAlgebra};
use wzw_ope::OpeEngine;

fn main() -> wzw_ope::Result<()> {
    let alg = Arc::new(LieAlgebra::new(Family::Sl, 3)?);
    let e = OpeEngine::new(alg.clone());
    let w = e.w_field()?;
    let wa = e.w_a_fields()?;
    let j = e.current(0)?;

    println!("J[1](z) W(w):");
    print!("{}", e.contract(&j, &w, 0)?.display(&alg));
    println!("J[1](z) W[1](w):");
    print!("{}", e.contract(&j, &wa[0], 0)?.display(&alg));

    // W_n acting on a current: W_n = pole n+3
    for n in -1..=1 {
        println!("W_{n} J[1] = {}", e.pole(&w, n + 3, &j)?.display(&alg));
    }
    Ok(())
}
