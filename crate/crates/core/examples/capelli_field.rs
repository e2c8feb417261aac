use wzw_ope::lie::Family;
use wzw_ope::suite::{c4_minus_one_scalar, Workbench};
use wzw_ope::IndexSet;

fn main() -> wzw_ope::Result<()> {
    let wb = Workbench::new();
    let j = IndexSet::sorted(&[1, 2, 3, 4]);
    for n in [5, 6, 7] {
        let e = wb.engine(Family::So, n)?;
        let r = wb.c4_pf(n, &j, true)?;
        let pf = e.pf_field(&j)?;
        let c4 = r.pole(4).ratio_to(&pf);
        let c = c4_minus_one_scalar(&wb, n)?;
        println!(
            "N={n}: C4(z)PfF_J(w) depth {}, pole 4 = {:?} PfF_J, C4^(-1) PfF_J = {:?} dPfF_J",
            r.singular_depth(),
            c4,
            c
        );
    }
    Ok(())
}
