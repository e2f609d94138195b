use std::error::Error as StdError;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use torsionlab::rs_torsion::cheeger_muller_check;
use torsionlab::spaces::{circle_spectrum, lens_complex, multisets_differ, torus_spectrum};
use torsionlab::spectral::{closed_form, zeta_det, zeta_eval, MellinSplit, Spectrum};
use torsionlab::topology::barycentric_subdivide;
use torsionlab::{ComplexFile, EdgeCocycle, Error, LensModel, Matrix, TorsionMethod};

mod numfmt;

use numfmt::g12;

type CliResult = std::result::Result<(), Box<dyn StdError>>;

#[derive(Parser)]
#[command(
    name = "torsionlab",
    version,
    about = "Reidemeister and analytic torsion calculator"
)]
#[command(
    after_help = "Set TORSIONLAB_PRECISION=extended to evaluate closed forms in double-double arithmetic."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Def,
    Laplacian,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Circle,
    Torus,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Torsion of the complex described by a JSON file
    Torsion {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "def")]
        method: Method,
    },
    /// Torsion of L(p, q) for every nontrivial character k
    LensTable {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        /// Second q to compare against
        #[arg(long)]
        compare: Option<u64>,
    },
    /// Spectral zeta function along a range of real s
    #[command(after_help = "CSV columns: s, value, error_estimate, pole_flag.\n\
        At a pole value and error_estimate are empty and pole_flag is true.\n\
        The torus is the square torus of side L with trivial coefficients.")]
    ZetaScan {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long = "L")]
        length: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, allow_negative_numbers = true)]
        s_from: f64,
        #[arg(long, allow_negative_numbers = true)]
        s_to: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, value_enum, default_value = "csv")]
        out: OutFormat,
    },
    /// Zeta-regularized determinant of the Laplacian on functions
    Det {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long = "L")]
        length: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
    },
    /// Analytic against combinatorial torsion on the circle, theta = 2 pi k / p
    #[command(after_help = "CSV columns: p, k, log_tau, log_T, gap.")]
    CmCheck {
        #[arg(long)]
        p: u64,
        /// Defaults to every k = 1..p-1
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 2)]
        subdiv: usize,
    },
    /// Barycentric subdivision of a simplicial complex file
    Subdivide {
        file: PathBuf,
        #[arg(long)]
        levels: usize,
        /// Write here instead of standard output
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Precision {
    Double,
    Extended,
}

fn precision() -> Result<Precision, Error> {
    match std::env::var("TORSIONLAB_PRECISION") {
        Err(_) => Ok(Precision::Double),
        Ok(v) => match v.as_str() {
            "" | "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            other => Err(Error::Input(format!(
                "TORSIONLAB_PRECISION must be double or extended, got {other:?}"
            ))),
        },
    }
}

fn read_complex_file(path: &PathBuf) -> Result<ComplexFile, Box<dyn StdError>> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ComplexFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn function_spectrum(space: Space, length: f64, theta: f64) -> Result<Spectrum, Error> {
    match space {
        Space::Circle => Ok(circle_spectrum(length, theta)?.degrees.remove(0)),
        Space::Torus => {
            if theta != 0.0 {
                return Err(Error::Unsupported(
                    "the torus takes trivial coefficients only".into(),
                ));
            }
            torus_spectrum(&Matrix::identity(2).scale(length), 0)
        }
    }
}

fn torsion(file: &PathBuf, method: Method, out: &mut impl Write) -> CliResult {
    let doc = read_complex_file(file)?;
    let c = doc.to_chain_complex()?;
    let t = match method {
        Method::Def => {
            let h = doc.homology_basis(c.dims())?;
            c.torsion_def(h.as_ref())?
        }
        Method::Laplacian => c.torsion(TorsionMethod::Laplacian)?,
    };
    writeln!(out, "tau\t{}", g12(t.tau))?;
    writeln!(out, "log_tau\t{}", g12(t.log_tau))?;
    writeln!(out, "condition\t{}", g12(t.condition_report))?;
    Ok(())
}

fn lens_row(p: u64, q: u64) -> Result<Vec<f64>, Error> {
    (1..p)
        .map(|k| {
            Ok(lens_complex(&LensModel::new(p, q, k)?)
                .torsion_def(None)?
                .tau)
        })
        .collect()
}

fn lens_table(p: u64, q: u64, compare: Option<u64>, out: &mut impl Write) -> CliResult {
    let first = lens_row(p, q)?;
    let second = compare.map(|q2| lens_row(p, q2)).transpose()?;
    match compare {
        Some(q2) => writeln!(out, "k\tL({p},{q})\tL({p},{q2})")?,
        None => writeln!(out, "k\tL({p},{q})")?,
    }
    for (i, tau) in first.iter().enumerate() {
        match &second {
            Some(s) => writeln!(out, "{}\t{}\t{}", i + 1, g12(*tau), g12(s[i]))?,
            None => writeln!(out, "{}\t{}", i + 1, g12(*tau))?,
        }
    }
    if let Some(mut s) = second {
        let mut f = first;
        f.sort_by(f64::total_cmp);
        s.sort_by(f64::total_cmp);
        let verdict = if multisets_differ(&f, &s, 1e-9) {
            "distinct: not homeomorphic"
        } else {
            "equal torsion multisets: not distinguished"
        };
        writeln!(out, "verdict\t{verdict}")?;
    }
    Ok(())
}

fn zeta_scan(
    space: Space,
    length: f64,
    theta: f64,
    from: f64,
    to: f64,
    step: f64,
    out: &mut impl Write,
) -> CliResult {
    let valid = step > 0.0 && to >= from && from.is_finite() && to.is_finite();
    if !valid {
        return Err(Error::Input("need s-from <= s-to and step > 0".into()).into());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    let spec = function_spectrum(space, length, theta)?;
    let split = MellinSplit::default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "value", "error_estimate", "pole_flag"])?;
    for i in 0..=n {
        let s = from + i as f64 * step;
        match zeta_eval(&spec, s, &split) {
            Ok(z) => {
                w.write_record([g12(s), g12(z.value), g12(z.error_estimate), "false".into()])?
            }
            Err(Error::Pole { .. }) => {
                w.write_record([g12(s), String::new(), String::new(), "true".into()])?
            }
            Err(e) => return Err(e.into()),
        }
    }
    w.flush()?;
    Ok(())
}

fn det(space: Space, length: f64, theta: f64, out: &mut impl Write) -> CliResult {
    let prec = precision()?;
    let spec = function_spectrum(space, length, theta)?;
    let value = zeta_det(&spec, &MellinSplit::default())?;
    writeln!(out, "det\t{}", g12(value))?;
    if let Space::Circle = space {
        let weight = if spec.kernel_dim() > 0 { 1 } else { 2 };
        let closed = match prec {
            Precision::Double => {
                let (_, dz) = closed_form::circle_zeta(length, theta, weight, 0.0)?;
                (-dz).exp()
            }
            Precision::Extended => closed_form::circle_log_det_extended(length, theta, weight)?
                .exp()
                .to_f64(),
        };
        writeln!(out, "closed_form\t{}", g12(closed))?;
        writeln!(out, "relative_gap\t{}", g12((value / closed - 1.0).abs()))?;
    }
    writeln!(
        out,
        "precision\t{}",
        if prec == Precision::Extended {
            "extended"
        } else {
            "double"
        }
    )?;
    Ok(())
}

fn cm_check(p: u64, k: Option<u64>, subdiv: usize, out: &mut impl Write) -> CliResult {
    let ks: Vec<u64> = match k {
        Some(k) => vec![k],
        None => (1..p).collect(),
    };
    let rows = ks
        .into_iter()
        .map(|k| cheeger_muller_check(p, k, subdiv))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p", "k", "log_tau", "log_T", "gap"])?;
    for c in rows {
        w.write_record([
            c.p.to_string(),
            c.k.to_string(),
            g12(c.log_tau_combinatorial),
            g12(c.log_t_analytic),
            g12(c.gap),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn subdivide(
    file: &PathBuf,
    levels: usize,
    output: Option<&PathBuf>,
    out: &mut impl Write,
) -> CliResult {
    let doc = read_complex_file(file)?;
    let (mut k, rho) = doc
        .simplicial()?
        .ok_or_else(|| Error::Input("subdivide needs a file with \"simplices\"".into()))?;
    let keep_cocycle = rho.is_some();
    let mut rho = rho.unwrap_or_else(|| EdgeCocycle::trivial(&k, 1));
    for _ in 0..levels {
        (k, rho) = barycentric_subdivide(&k, &rho)?;
    }
    let result = ComplexFile::from_simplicial(&k, keep_cocycle.then_some(&rho), doc.label.clone())?;
    match output {
        Some(path) => {
            std::fs::write(path, result.write()).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => out.write_all(result.write().as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Torsion { file, method } => torsion(&file, method, &mut out),
        Command::LensTable { p, q, compare } => lens_table(p, q, compare, &mut out),
        Command::ZetaScan {
            space,
            length,
            theta,
            s_from,
            s_to,
            step,
            out: OutFormat::Csv,
        } => zeta_scan(space, length, theta, s_from, s_to, step, &mut out),
        Command::Det {
            space,
            length,
            theta,
        } => det(space, length, theta, &mut out),
        Command::CmCheck { p, k, subdiv } => cm_check(p, k, subdiv, &mut out),
        Command::Subdivide {
            file,
            levels,
            output,
        } => subdivide(&file, levels, output.as_ref(), &mut out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
