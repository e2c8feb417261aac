use wzw_ope::suite::{self, Format, SuiteParams, Verdict};

fn main() -> wzw_ope::Result<()> {
    let report = suite::run_all(SuiteParams {
        seed: 7,
        ..Default::default()
    })?;
    for c in &report.checks {
        if c.verdict != Verdict::Match {
            print!("{}", suite::report::render_check(c));
        }
    }
    println!(
        "{}",
        report.render(Format::Records).lines().last().unwrap_or("")
    );
    let bad: Vec<&str> = report.structural_failures().iter().map(|c| c.id).collect();
    println!("structural failures: {bad:?}");
    Ok(())
}
