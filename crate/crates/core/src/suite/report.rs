//! Rendering of suite reports.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{IdentityCheck, Report, Verdict};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Records,
    Latex,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format, Error> {
        match s {
            "text" => Ok(Format::Text),
            "records" => Ok(Format::Records),
            "latex" => Ok(Format::Latex),
            _ => Err(Error::Parse {
                pos: 0,
                msg: format!("unknown format `{s}` (text|records|latex)"),
            }),
        }
    }
}

/// Tabs and newlines would break a record line.
fn field(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

fn latex_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '^' => out.push_str("\\textasciicircum{}"),
            '~' => out.push_str("\\textasciitilde{}"),
            _ => out.push(c),
        }
    }
    out
}

/// One record line for a check.
pub fn record(c: &IdentityCheck) -> String {
    let opt = |o: &Option<String>| o.as_deref().map(field).unwrap_or_else(|| "-".into());
    format!(
        "check\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        c.id,
        field(&c.params),
        c.verdict,
        c.structural,
        field(&c.engine_value),
        opt(&c.paper_value),
        opt(&c.diff)
    )
}

impl Report {
    fn summary(&self) -> String {
        let counts: Vec<String> = [
            Verdict::Match,
            Verdict::Mismatch,
            Verdict::PaperInconsistency,
            Verdict::StructuralOnly,
        ]
        .iter()
        .map(|v| format!("{v}={}", self.count(*v)))
        .collect();
        format!(
            "{} checks; {}; structural failures={}",
            self.checks.len(),
            counts.join(" "),
            self.structural_failures().len()
        )
    }

    pub fn render(&self, format: Format) -> String {
        let p = self.params;
        let mut s = String::new();
        match format {
            Format::Records => {
                let _ = writeln!(
                    s,
                    "# wzw-ope records seed={} so_N={} sl_N={}",
                    p.seed, p.so_n, p.sl_n
                );
                for c in &self.checks {
                    let _ = writeln!(s, "{}", record(c));
                }
                let _ = writeln!(s, "summary\t{}", self.summary());
            }
            Format::Text => {
                for c in &self.checks {
                    s.push_str(&render_check(c));
                    s.push('\n');
                }
                let _ = writeln!(s, "{}", self.summary());
            }
            Format::Latex => {
                s.push_str("\\begin{tabular}{llll}\n\\hline\nid & verdict & structural & engine \\\\\n\\hline\n");
                for c in &self.checks {
                    let _ = writeln!(
                        s,
                        "{} & {} & {} & {} \\\\",
                        latex_escape(c.id),
                        latex_escape(&c.verdict.to_string()),
                        if c.structural { "yes" } else { "no" },
                        latex_escape(&c.engine_value)
                    );
                }
                s.push_str("\\hline\n\\end{tabular}\n");
                let _ = writeln!(s, "% {}", self.summary());
            }
        }
        s
    }
}

/// Human-readable block for one check.
pub fn render_check(c: &IdentityCheck) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "[{}] {} (structural: {})",
        c.id,
        c.verdict,
        if c.structural { "ok" } else { "FAIL" }
    );
    let _ = writeln!(s, "  params: {}", c.params);
    let _ = writeln!(s, "  engine: {}", c.engine_value);
    if let Some(p) = &c.paper_value {
        let _ = writeln!(s, "  paper:  {p}");
    }
    if let Some(d) = &c.diff {
        let _ = writeln!(s, "  diff:   {d}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escaping() {
        assert_eq!(latex_escape("a_b^{c}"), "a\\_b\\textasciicircum{}\\{c\\}");
        assert_eq!(field("a\tb\nc"), "a b c");
        assert_eq!("records".parse::<Format>().unwrap(), Format::Records);
        assert!("xml".parse::<Format>().is_err());
    }
}
