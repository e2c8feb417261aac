use wzw_ope::kz::{self, HigherKzEquation, Tensor};
use wzw_ope::{IndexSet, Q};

fn main() -> wzw_ope::Result<()> {
    let (n, r) = (5, 2);
    let j = IndexSet::sorted(&[1, 2, 3, 4]);
    let eq = HigherKzEquation {
        n,
        r,
        j: j.clone(),
        lhs: Default::default(),
        rhs: kz::emit_rhs(n, r, &j)?,
    };
    let k = Q::new(3, 2);
    let points = [Q::int(0), Q::int(1)];

    let psi = Tensor::random_state(n, r, &j, 11)?;
    let out = kz::evaluate_rhs(&eq, k, &points, &psi)?;
    println!("rhs on a random state ({} entries):", out.len());
    print!("{out}");

    let eqv = kz::check_equivariance(n, r, k, &points, 11)?;
    println!(
        "equivariance: {}/{} cases",
        eqv.checked - eqv.failures.len(),
        eqv.checked
    );
    Ok(())
}
