use std::sync::Arc;

use wzw_ope::lie::{Family, LieAlgebra};
use wzw_ope::parse::{parse_expr, parse_field};
use wzw_ope::OpeEngine;

fn main() -> wzw_ope::Result<()> {
    let alg = Arc::new(LieAlgebra::new(Family::So, 6)?);
    let e = OpeEngine::new(alg.clone());
    for s in [
        "(F[1,2](F[3,4]F[5,6]))",
        "Pf[1,2,3,4]",
        "(k+2)/2*d(F[1,3]) - F[2,4]",
    ] {
        let f = parse_field(s, &e)?;
        let printed = f.display(&alg).to_string();
        let again = parse_field(&printed, &e)?;
        println!(
            "{s}\n  -> {printed}\n  weight {:?}, round trip {}",
            f.weights(),
            f == again
        );
    }
    match parse_expr("F[1,2] + * F[3,4]") {
        Err(err) => println!("{err}"),
        Ok(x) => println!("unexpected: {x}"),
    }
    Ok(())
}
