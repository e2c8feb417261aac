use wzw_ope::kz;
use wzw_ope::IndexSet;

fn main() -> wzw_ope::Result<()> {
    let j = IndexSet::sorted(&[1, 2, 3, 4]);
    println!("{} admissible mode tuples", kz::admissible_tuples().len());

    let eq = kz::emit_equation(5, 2, &j)?;
    let text = eq.to_string();
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("... {} terms", eq.rhs.len());

    let same = kz::keyed_terms(&eq.rhs) == kz::termwise_expansion(5, 2, &j)?;
    println!("matches the termwise expansion: {same}");
    Ok(())
}
