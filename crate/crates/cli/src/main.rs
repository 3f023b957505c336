//! Command-line front end: rank invariant queries, the distance suite
//! (erosion in all variants, interleaving, sup-norm, natural pseudo-distance),
//! diagram dumps and sublevel filtration builds, over the JSON file formats.
//!
//! Output is line oriented, `key<TAB>value`; distances are printed as exact
//! rationals with a decimal approximation. Exit codes: 0 on success, 1 on
//! usage errors, 2 on file or validation errors.

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use erodist::category::CatObject;
use erodist::erosion::{
    axis_shift_candidates, erosion_distance_family, erosion_distance_projection,
    erosion_distance_restricted, ErosionReport,
};
use erodist::format;
use erodist::homology::{levelset_invariant_distance, module_from_size_pair, npd_bruteforce};
use erodist::module::{Coefficients, PersistenceModule, RankInvariant};
use erodist::onedim::{interleaving_distance_1d, ConstructibleModule};
use erodist::poset::{derive_adjoint_projection, DgmPoint, PosetPoint, SuperlinearFamily};
use erodist::rational::{approx_decimal, format_rational, parse_rational, ExtRat};

#[derive(Parser)]
#[command(name = "erodist", version, about = "Exact erosion distances for persistence modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the rank invariant of a module at a diagram point
    Rank(RankArgs),
    /// Distances between modules, functions, or size pairs
    Dist {
        #[command(subcommand)]
        kind: DistCommand,
    },
    /// Dump the type-B persistence diagram of a 1-D field module
    Diagram {
        module: PathBuf,
    },
    /// Build the sublevel-set homology module of a size pair
    Filtration(FiltrationArgs),
}

#[derive(Args)]
struct RankArgs {
    module: PathBuf,
    /// Diagram point: `a;b` with comma-separated coordinates
    /// (for 1-D modules `a,b` also works)
    #[arg(long)]
    at: String,
}

#[derive(Subcommand)]
enum DistCommand {
    /// Erosion distance of two modules
    Erosion {
        m1: PathBuf,
        m2: PathBuf,
        /// Use the sublinear-projection formulation over axis-aligned shifts
        #[arg(long)]
        projection: bool,
        /// Quantify dominance over the strictly increasing diagram domain
        #[arg(long)]
        restricted: bool,
        /// Superlinear family: linear | floor
        #[arg(long, default_value = "linear")]
        family: String,
    },
    /// Interleaving distance of two 1-D field modules (bottleneck matching)
    Interleaving { m1: PathBuf, m2: PathBuf },
    /// Sup-norm distance of two functions, computed as an erosion distance
    Linf { f1: PathBuf, f2: PathBuf },
    /// Brute-force natural pseudo-distance of two discrete size pairs
    Npd { sp1: PathBuf, sp2: PathBuf },
}

#[derive(Args)]
struct FiltrationArgs {
    complex: PathBuf,
    #[arg(long)]
    degree: usize,
    /// Coefficients: z | f2 | f3 | f<p>
    #[arg(long)]
    coeff: String,
    #[arg(short, long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout with success, usage errors
            // on stderr with exit code 1
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<erodist::Error> for CliError {
    fn from(e: erodist::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn load_module(path: &PathBuf) -> Result<PersistenceModule, CliError> {
    let module = format::read_module_json(&read_file(path)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    module
        .validate_functoriality()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(module)
}

fn print_distance(d: &ExtRat) {
    match d {
        ExtRat::Finite(q) => {
            println!("distance\t{}\t{}", format_rational(q), approx_decimal(q, 6));
        }
        ExtRat::Infinite => println!("distance\tinf\tinf"),
    }
}

fn print_object(obj: &CatObject) {
    match obj {
        CatObject::Vect { dim, field } => {
            println!("kind\tvect");
            println!("field\t{field}");
            println!("dimension\t{dim}");
        }
        CatObject::Ab { free_rank, torsion } => {
            println!("kind\tab");
            println!("free_rank\t{free_rank}");
            let parts: Vec<String> = torsion.iter().map(|t| t.to_string()).collect();
            println!("torsion\t{}", parts.join(","));
        }
        CatObject::Set { elements } => {
            let parts: Vec<String> = elements.iter().map(|e| e.to_string()).collect();
            println!("kind\tset");
            println!("elements\t{}", parts.join(","));
        }
    }
}

fn parse_point_list(s: &str) -> Result<Vec<BigRational>, CliError> {
    s.split(',')
        .map(|c| parse_rational(c).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn parse_dgm_point(s: &str, dim: usize) -> Result<DgmPoint, CliError> {
    let (a, b) = if let Some((a, b)) = s.split_once(';') {
        (parse_point_list(a)?, parse_point_list(b)?)
    } else {
        // 1-D convenience: `a,b`
        let flat = parse_point_list(s)?;
        if flat.len() != 2 || dim != 1 {
            return Err(CliError::Usage(format!(
                "diagram point {s:?} must be `a;b` with {dim} comma-separated coordinates each"
            )));
        }
        (vec![flat[0].clone()], vec![flat[1].clone()])
    };
    if a.len() != dim || b.len() != dim {
        return Err(CliError::Usage(format!(
            "diagram point {s:?} must have {dim} coordinates on each side"
        )));
    }
    DgmPoint::new(PosetPoint::new(a), PosetPoint::new(b))
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_family(name: &str, dim: usize) -> Result<SuperlinearFamily, CliError> {
    match name {
        "linear" => Ok(SuperlinearFamily::linear(dim)),
        "floor" => Ok(SuperlinearFamily::floor_shift(dim)),
        other => Err(CliError::Usage(format!(
            "unknown family {other:?}; use linear or floor"
        ))),
    }
}

fn parse_coefficients(name: &str) -> Result<Coefficients, CliError> {
    if name == "z" {
        return Ok(Coefficients::Int);
    }
    if let Some(p) = name.strip_prefix('f') {
        if let Ok(p) = p.parse::<u64>() {
            return Ok(Coefficients::Field(p));
        }
    }
    Err(CliError::Usage(format!(
        "unknown coefficients {name:?}; use z or f<p>"
    )))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Rank(args) => {
            let module = load_module(&args.module)?;
            let dim = module.dim();
            let point = parse_dgm_point(&args.at, dim)?;
            let invariant = RankInvariant::new(module);
            let obj = invariant.at(&point)?;
            print_object(&obj);
            Ok(())
        }
        Command::Dist { kind } => match kind {
            DistCommand::Erosion {
                m1,
                m2,
                projection,
                restricted,
                family,
            } => {
                if projection && restricted {
                    return Err(CliError::Usage(
                        "--projection and --restricted cannot be combined".into(),
                    ));
                }
                let f = RankInvariant::new(load_module(&m1)?);
                let g = RankInvariant::new(load_module(&m2)?);
                let fam = parse_family(&family, f.dim())?;
                let report: ErosionReport = if projection {
                    let omega = derive_adjoint_projection(&fam);
                    let shifts = axis_shift_candidates(&f, &g, &fam);
                    let mut pairs = Vec::with_capacity(shifts.len() * shifts.len());
                    for a in &shifts {
                        for b in &shifts {
                            pairs.push((a.clone(), b.clone()));
                        }
                    }
                    erosion_distance_projection(&f, &g, &omega, &pairs)?
                } else if restricted {
                    erosion_distance_restricted(&f, &g, &fam)?
                } else {
                    erosion_distance_family(&f, &g, &fam)?
                };
                print_distance(&report.distance);
                println!("candidates\t{}", report.witness_epsilon_grid.len());
                Ok(())
            }
            DistCommand::Interleaving { m1, m2 } => {
                let f = ConstructibleModule::new(load_module(&m1)?)?;
                let g = ConstructibleModule::new(load_module(&m2)?)?;
                let d = interleaving_distance_1d(&f, &g)?;
                print_distance(&d);
                Ok(())
            }
            DistCommand::Linf { f1, f2 } => {
                let (f, names_f) = format::read_level_set_json(&read_file(&f1)?)
                    .map_err(|e| CliError::Data(format!("{}: {e}", f1.display())))?;
                let (g, names_g) = format::read_level_set_json(&read_file(&f2)?)
                    .map_err(|e| CliError::Data(format!("{}: {e}", f2.display())))?;
                if names_f != names_g {
                    return Err(CliError::Data(
                        "functions are defined on different sets".into(),
                    ));
                }
                let d = levelset_invariant_distance(&f, &g)?;
                print_distance(&ExtRat::Finite(d));
                Ok(())
            }
            DistCommand::Npd { sp1, sp2 } => {
                let (a, _) = format::read_size_pair_json(&read_file(&sp1)?)
                    .map_err(|e| CliError::Data(format!("{}: {e}", sp1.display())))?;
                let (b, _) = format::read_size_pair_json(&read_file(&sp2)?)
                    .map_err(|e| CliError::Data(format!("{}: {e}", sp2.display())))?;
                let d = npd_bruteforce(&a, &b)?;
                print_distance(&d);
                Ok(())
            }
        },
        Command::Diagram { module } => {
            let module = load_module(&module)?;
            let constructible = ConstructibleModule::new(module)?;
            let diagram = constructible.diagram()?;
            for ((birth, death), mass) in diagram.support() {
                println!("{} {} {}", plain_rational(birth), plain_ext(death), mass);
            }
            Ok(())
        }
        Command::Filtration(args) => {
            let (pair, _) = format::read_size_pair_json(&read_file(&args.complex)?)
                .map_err(|e| CliError::Data(format!("{}: {e}", args.complex.display())))?;
            let coefficients = parse_coefficients(&args.coeff)?;
            let grid = pair.value_grid();
            let module = module_from_size_pair(&pair, &grid, args.degree, coefficients)?;
            let text = format::write_module_json(&module);
            fs::write(&args.output, text)
                .map_err(|e| CliError::Data(format!("{}: {e}", args.output.display())))?;
            println!("written\t{}", args.output.display());
            Ok(())
        }
    }
}

/// Bare integer when possible, `p/q` otherwise; diagram dumps read naturally.
fn plain_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format_rational(q)
    }
}

fn plain_ext(d: &ExtRat) -> String {
    match d {
        ExtRat::Finite(q) => plain_rational(q),
        ExtRat::Infinite => "inf".to_string(),
    }
}
