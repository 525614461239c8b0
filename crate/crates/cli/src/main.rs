use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use swapping_core::fractions::fraction_bracket;
use swapping_core::linking::{linking_number, six_point_f, six_point_g, cocycle_defect, PointConfig};
use swapping_core::operlab::{integrate, OperSpec};
use swapping_core::parse::{parse_coeff, parse_expression, Expr};
use swapping_core::repval::{wolpert_check, Representation};
use swapping_core::swapalg::{jacobiator, swap_bracket, Coeff};
use swapping_core::verify::{run_suite, VerifyOptions, SUITES};
use swapping_core::words::{minus_label, plus_label, FixedPoint, Word};

#[derive(Parser)]
#[command(name = "swapping", version, about = "Swapping algebra, multi fractions and their numeric evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bracket two expressions over a point file.
    Bracket {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "0")]
        alpha: String,
        left: String,
        right: String,
    },
    /// Jacobiator of three polynomial expressions; fails unless it is zero.
    Jacobi {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "0")]
        alpha: String,
        a: String,
        b: String,
        c: String,
    },
    /// Check the linking identities exhaustively on the points of a point file.
    Identities {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate a balanced expression on a representation file.
    Eval {
        #[arg(long)]
        config: PathBuf,
        /// Point labels to register (default: g+ and g- for every generator g).
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
        expr: String,
    },
    /// Period of a word at an anchor point, against its width.
    Period {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        word: String,
        anchor: String,
    },
    /// Length-bracket formula for two crossing hyperbolic SL2 generators.
    Wolpert {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        g: String,
        h: String,
    },
    /// Integrate an oper file; optionally evaluate a weak cross ratio.
    Oper {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 4096)]
        steps: usize,
        /// Four parameters `x,y,z,t`.
        #[arg(long, value_delimiter = ',')]
        points: Vec<f64>,
    },
    /// Run a verification suite (or `all`).
    Verify {
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 4096)]
        steps: usize,
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn points(path: &Path) -> Result<Arc<PointConfig>> {
    Ok(Arc::new(PointConfig::parse(&read(path)?)?))
}

fn alpha(text: &str) -> Result<Coeff> {
    Ok(parse_coeff(text)?)
}

/// `Ok(true)` on success, `Ok(false)` on a failed check; errors are input errors.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Bracket { config, alpha: a, left, right } => {
            let cfg = points(&config)?;
            let a = alpha(&a)?;
            let (l, r) = (parse_expression(&left, &cfg)?, parse_expression(&right, &cfg)?);
            let out = match (l.as_element(), r.as_element()) {
                (Some(x), Some(y)) => Expr::Element(swap_bracket(x, y, &a)?),
                _ => Expr::Fraction(fraction_bracket(&l.into_fraction(), &r.into_fraction(), &a)?),
            };
            println!("{}", out);
            Ok(true)
        }
        Command::Jacobi { config, alpha: a, a: x, b: y, c: z } => {
            let cfg = points(&config)?;
            let a = alpha(&a)?;
            let mut els = Vec::new();
            for text in [&x, &y, &z] {
                match parse_expression(text, &cfg)? {
                    Expr::Element(e) => els.push(e),
                    Expr::Fraction(_) => bail!("jacobi takes polynomial expressions, `{}` is a fraction", text),
                }
            }
            let j = jacobiator(&els[0], &els[1], &els[2], &a)?;
            println!("jacobiator = {}", j);
            Ok(j.is_zero())
        }
        Command::Identities { config } => {
            let cfg = points(&config)?;
            let pts = cfg.points();
            let mut failures = 0usize;
            let mut cases = 0usize;
            let zero = num_rational::Rational64::from_integer(0);
            for a in pts {
                for b in pts {
                    for c in pts {
                        for d in pts {
                            cases += 1;
                            let l = linking_number(a, b, c, d);
                            if l + linking_number(c, d, a, b) != zero || l + linking_number(a, b, d, c) != zero {
                                failures += 1;
                            }
                            for e in pts {
                                cases += 1;
                                if cocycle_defect(a, b, c, d, e) != zero {
                                    failures += 1;
                                }
                                for f in pts {
                                    cases += 1;
                                    if six_point_f(a, b, c, d, e, f) != -six_point_g(c, d, a, b, e, f) {
                                        failures += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            println!("points={}", pts.len());
            println!("cases={}", cases);
            println!("failures={}", failures);
            Ok(failures == 0)
        }
        Command::Eval { config, points: labels, expr } => {
            let rep = Representation::parse(&read(&config)?)?;
            let labels: Vec<String> = if labels.is_empty() {
                rep.generators()
                    .flat_map(|(g, _)| {
                        let w = Word::letter(g);
                        [plus_label(&w), minus_label(&w)]
                    })
                    .collect()
            } else {
                labels
            };
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            let cfg = Arc::new(rep.point_config(&refs)?);
            let f = parse_expression(&expr, &cfg)?.into_fraction();
            println!("{}", rep.eval_fraction(&f)?);
            Ok(true)
        }
        Command::Period { config, tolerance, word, anchor } => {
            let rep = Representation::parse(&read(&config)?)?;
            let w = Word::parse(&word)?;
            let y = FixedPoint::parse(&anchor)?;
            let p = rep.period(&w, &y)?;
            let width = rep.width(&w)?;
            println!("period={}", p);
            println!("width={}", width);
            println!("deviation={:e}", (p - width).abs());
            Ok((p - width).abs() <= tolerance)
        }
        Command::Wolpert { config, tolerance, g, h } => {
            let rep = Representation::parse(&read(&config)?)?;
            let m = |l: &str| rep.word_matrix(&Word::parse(l)?);
            let w = wolpert_check(&m(&g)?, &m(&h)?)?;
            println!("sum={:e}", w.rhs);
            println!("iota_2cos_theta={:e}", w.lhs);
            println!("cos_theta={:e}", w.cos_theta);
            println!("linking={}", w.linking);
            println!("deviation={:e}", w.deviation());
            Ok(w.deviation() <= tolerance)
        }
        Command::Oper { config, steps, points } => {
            let oper = OperSpec::parse(&read(&config)?)?;
            let sol = integrate(&oper, steps)?;
            println!("order={}", oper.order());
            println!("steps={}", steps);
            println!("holonomy_class={}", sol.holonomy_class());
            println!("holonomy_defect={:e}", sol.holonomy_defect());
            if !points.is_empty() {
                if points.len() != 4 {
                    bail!("--points takes four parameters x,y,z,t");
                }
                let p = points;
                let b = sol.weak_cross_ratio(p[0], p[1], p[2], p[3])?;
                println!("weak_cross_ratio={}", b);
            }
            Ok(true)
        }
        Command::Verify { suite, seed, size, steps, tolerance } => {
            let opts = VerifyOptions { seed, size, steps, tolerance };
            let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut ok = true;
            for (i, name) in names.iter().enumerate() {
                let report = run_suite(name, &opts)?;
                if i > 0 {
                    println!();
                }
                print!("{}", report.render());
                ok &= report.passed();
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
