//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::indexset::IndexSet;
use crate::kz::{self, Tensor};
use crate::lie::{Family, LieAlgebra};
use crate::ope::OpeEngine;
use crate::parse::parse_field;
use crate::scalar::Q;
use crate::suite::{self, Format, SuiteParams};
use crate::uea::Uea;

#[derive(Parser, Debug)]
#[command(
    name = "wzw-ope",
    version,
    about = "Exact OPEs, pfaffian identities and higher KZ operators"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Algebra {
    So,
    Sl,
}

impl From<Algebra> for Family {
    fn from(a: Algebra) -> Family {
        match a {
            Algebra::So => Family::So,
            Algebra::Sl => Family::Sl,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Element {
    #[value(name = "C2")]
    C2,
    #[value(name = "C4")]
    C4,
    Gelfand3,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StateKind {
    Random,
    Zero,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// OPE of two fields.
    Ope {
        #[arg(long, value_enum)]
        algebra: Algebra,
        #[arg(long = "N")]
        n: usize,
        /// Number of regular coefficients to print.
        #[arg(long, default_value_t = 0)]
        depth: usize,
        a: String,
        b: String,
    },
    /// Pfaffian of F_I in U(so_N), PBW form.
    Pf {
        #[arg(long = "N")]
        n: usize,
        /// Indices, comma or space separated.
        #[arg(required = true, num_args = 1..)]
        indices: Vec<String>,
    },
    /// Centrality test in U(g).
    Center {
        #[arg(long, value_enum)]
        algebra: Algebra,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, value_enum)]
        element: Element,
    },
    /// Run the identity suite.
    VerifyPaper {
        #[arg(long = "N", default_value_t = 6)]
        n: usize,
        #[arg(long = "sl-N", default_value_t = 3)]
        sl_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the rendered report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Higher KZ equations.
    Kz {
        #[command(subcommand)]
        command: KzCommand,
    },
}

#[derive(Subcommand, Debug)]
enum KzCommand {
    /// Expand the right-hand side into correlator terms
    Emit {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long = "J", default_value = "1,2,3,4")]
        j: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the right-hand side on a tensor state at given points
    Eval {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long = "J", default_value = "1,2,3,4")]
        j: String,
        #[arg(long)]
        k: String,
        /// Comma separated rationals z_1,...,z_r.
        #[arg(long, allow_hyphen_values = true)]
        points: String,
        #[arg(long, value_enum, default_value = "random")]
        state: StateKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl clap::builder::ValueParserFactory for Format {
    type Parser = clap::builder::ValueParser;
    fn value_parser() -> Self::Parser {
        clap::builder::ValueParser::new(|s: &str| s.parse::<Format>().map_err(|e| e.to_string()))
    }
}

/// Printed output plus whether a structural check failed.
pub struct Outcome {
    pub stdout: String,
    pub structural_failure: bool,
}

fn indices(items: &[String]) -> Result<Vec<usize>> {
    items
        .iter()
        .flat_map(|s| s.split(','))
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim().parse::<usize>().map_err(|_| Error::Parse {
                pos: 0,
                msg: format!("bad index `{s}`"),
            })
        })
        .collect()
}

fn four_set(s: &str, n: usize) -> Result<IndexSet> {
    let v = indices(&[s.to_string()])?;
    let (set, _) = IndexSet::from_seq(&v)
        .ok_or_else(|| Error::Unsupported(format!("repeated index in {s}")))?;
    set.check_range(n)?;
    Ok(set)
}

fn rationals(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(|x| x.trim().parse::<Q>()).collect()
}

fn engine(family: Family, n: usize) -> Result<OpeEngine> {
    Ok(OpeEngine::new(Arc::new(LieAlgebra::new(family, n)?)))
}

fn ope(format: Format, family: Family, n: usize, depth: usize, a: &str, b: &str) -> Result<String> {
    let e = engine(family, n)?;
    let alg = e.algebra().clone();
    let (fa, fb) = (parse_field(a, &e)?, parse_field(b, &e)?);
    let r = e.contract(&fa, &fb, depth as i64)?;
    // every pole up to the singular depth, zero ones included
    let rows: Vec<(i64, Field)> = (1 - depth as i64..=r.singular_depth() as i64)
        .rev()
        .map(|m| (m, r.pole(m)))
        .collect();
    let mut s = String::new();
    match format {
        Format::Text => {
            if rows.is_empty() {
                s.push_str("regular\n");
            }
            for (m, f) in &rows {
                let _ = writeln!(s, "[{m}] {}", f.display(&alg));
            }
        }
        Format::Records => {
            for (m, f) in &rows {
                let _ = writeln!(s, "pole\t{m}\t{}", f.display(&alg));
            }
        }
        Format::Latex => {
            for (m, f) in &rows {
                let m = *m;
                let den = match m {
                    ..=0 => String::new(),
                    1 => "\\frac{1}{z-w}".into(),
                    _ => format!("\\frac{{1}}{{(z-w)^{{{m}}}}}"),
                };
                let _ = writeln!(s, "{den}\\left({}\\right)(w) \\\\", f.latex(&alg));
            }
        }
    }
    Ok(s)
}

fn pf(format: Format, n: usize, items: &[String]) -> Result<String> {
    let v = indices(items)?;
    let u = Uea::new(Arc::new(LieAlgebra::new(Family::So, n)?));
    let x = u.pfaffian_seq(&v)?;
    let list = v
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",");
    Ok(match format {
        Format::Records => format!("pf\t{list}\t{}\n", u.display(&x)),
        _ => format!("{}\n", u.display(&x)),
    })
}

fn center(family: Family, n: usize, element: Element) -> Result<Outcome> {
    let alg = Arc::new(LieAlgebra::new(family, n)?);
    let u = Uea::new(alg.clone());
    let x = match element {
        Element::C2 => u.capelli(2)?,
        Element::C4 => u.capelli(4)?,
        Element::Gelfand3 => u.gelfand_third()?,
    };
    let c = u.is_central(&x)?;
    let mut s = format!("central: {}\n", if c.central { "yes" } else { "no" });
    if let Some((g, w)) = &c.witness {
        let _ = writeln!(s, "witness: [x, {}] = {}", alg.name(*g), u.display(w));
    }
    Ok(Outcome {
        stdout: s,
        structural_failure: !c.central,
    })
}

fn verify(
    format: Format,
    n: usize,
    sl_n: usize,
    seed: u64,
    report: Option<&PathBuf>,
) -> Result<Outcome> {
    let r = suite::run_all(SuiteParams {
        so_n: n,
        sl_n,
        seed,
    })?;
    let text = r.render(format);
    if let Some(path) = report {
        std::fs::write(path, &text)?;
    }
    Ok(Outcome {
        stdout: text,
        structural_failure: !r.structural_failures().is_empty(),
    })
}

fn render_equation(eq: &kz::HigherKzEquation, format: Format) -> String {
    match format {
        Format::Latex => {
            let mut s = format!("% kz4 N={} r={} J={}\n", eq.n, eq.r, eq.j);
            let _ = writeln!(
                s,
                "\\begin{{tabular}}{{llll}}\nscalar & poles & operators & target \\\\"
            );
            for t in &eq.rhs {
                let line = t.to_string();
                let cols: Vec<&str> = line
                    .split(' ')
                    .skip(1)
                    .map(|c| c.split_once('=').map(|x| x.1).unwrap_or(c))
                    .collect();
                let _ = writeln!(s, "${}$ \\\\", cols.join("$ & $"));
            }
            s.push_str("\\end{tabular}\n");
            s
        }
        _ => eq.to_string(),
    }
}

fn kz_emit(format: Format, n: usize, r: usize, j: &str, out: Option<&PathBuf>) -> Result<String> {
    let j = four_set(j, n)?;
    let eq = kz::emit_equation(n, r, &j)?;
    let text = render_equation(&eq, format);
    match out {
        Some(path) => {
            std::fs::write(path, &text)?;
            Ok(format!(
                "wrote {} terms to {}\n",
                eq.rhs.len(),
                path.display()
            ))
        }
        None => Ok(text),
    }
}

#[allow(clippy::too_many_arguments)]
fn kz_eval(
    format: Format,
    n: usize,
    r: usize,
    j: &str,
    k: &str,
    points: &str,
    state: StateKind,
    seed: u64,
) -> Result<String> {
    let j = four_set(j, n)?;
    let k: Q = k.parse()?;
    let points = rationals(points)?;
    let rhs = kz::emit_rhs(n, r, &j)?;
    let eq = kz::HigherKzEquation {
        n,
        r,
        j: j.clone(),
        lhs: Default::default(),
        rhs,
    };
    let psi = match state {
        StateKind::Random => Tensor::random_state(n, r, &j, seed)?,
        StateKind::Zero => Tensor::zero(n, r),
    };
    let v = kz::evaluate_rhs(&eq, k, &points, &psi)?;
    Ok(match format {
        Format::Records => {
            let mut s = String::new();
            for (key, c) in v.iter() {
                let slots: Vec<String> = key.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "entry\t{}\t{c}", slots.join(" "));
            }
            s
        }
        Format::Latex => {
            let mut s = String::from("\\begin{tabular}{ll}\n");
            for (key, c) in v.iter() {
                let slots: Vec<String> = key
                    .iter()
                    .map(|x| {
                        format!(
                            "e_{{{}}}",
                            x.indices()
                                .iter()
                                .map(|i| i.to_string())
                                .collect::<String>()
                        )
                    })
                    .collect();
                let _ = writeln!(s, "${c}$ & ${}$ \\\\", slots.join(" \\otimes "));
            }
            s.push_str("\\end{tabular}\n");
            s
        }
        Format::Text => v.to_string(),
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let f = cli.format;
    let plain = |stdout: String| Outcome {
        stdout,
        structural_failure: false,
    };
    match &cli.command {
        Command::Ope {
            algebra,
            n,
            depth,
            a,
            b,
        } => Ok(plain(ope(f, (*algebra).into(), *n, *depth, a, b)?)),
        Command::Pf { n, indices } => Ok(plain(pf(f, *n, indices)?)),
        Command::Center {
            algebra,
            n,
            element,
        } => center((*algebra).into(), *n, *element),
        Command::VerifyPaper {
            n,
            sl_n,
            seed,
            report,
        } => verify(f, *n, *sl_n, *seed, report.as_ref()),
        Command::Kz { command } => match command {
            KzCommand::Emit { n, r, j, out } => Ok(plain(kz_emit(f, *n, *r, j, out.as_ref())?)),
            KzCommand::Eval {
                n,
                r,
                j,
                k,
                points,
                state,
                seed,
            } => Ok(plain(kz_eval(f, *n, *r, j, k, points, *state, *seed)?)),
        },
    }
}

/// Exit status: 0 ok, 1 structural failure, 2 usage or runtime error.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(o) => {
            print!("{}", o.stdout);
            if o.structural_failure {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

pub fn parse_args<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)
}
