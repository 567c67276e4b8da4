//! Command-line front-end for the `liegeo` library.
//!
//! Every subcommand reads a Lie algebra (from a JSON file, from stdin, or
//! from the built-in catalog), runs one geometric computation, and emits a
//! JSON report (plus CSV for flow trajectories).  Reports carry the tool
//! version, the seed that produced them, and the sign convention, so a
//! report is reproducible from its own header: the same input and the same
//! seed yield byte-identical output.
//!
//! Exit codes: 0 on success, 1 for I/O and schema problems, 2 when the
//! input fails validation (Jacobi identity, bad metric), 3 when a search or
//! integration gives up within its budget.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use liegeo::jsonio::{algebra_to_json, matrix_to_json, parse_algebra_file, Jv};
use liegeo::metric::perturbed_identity;
use liegeo::{
    catalog, check_solution, detect_su2, einstein_check, find_negative_scalar_metric, integrate,
    orthonormal_constants, ricci_coordinates, ricci_from_connection, scalar_curvature,
    soliton_project, solve_einstein_extension, solve_nilsoliton, solve_parameters, Error,
    HCParameters, LieAlgebra, Normalization, SearchConfig, SolitonCertificate, CATALOG_NAMES,
    SIGN_CONVENTION, VERSION,
};

#[derive(Parser)]
#[command(
    name = "liegeo",
    version,
    about = "Left-invariant geometry on Lie groups from structure constants",
    long_about = "Computes curvature, Ricci soliton metrics, Einstein extensions, Ricci flow,\n\
                  and quadratic-curvature field equations for left-invariant metrics given by\n\
                  structure constants.  Algebras come from JSON files, stdin, or the built-in\n\
                  catalog; reports are JSON (CSV for flow trajectories) and are byte-identical\n\
                  across reruns with the same inputs and seed."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Input selector shared by every command that consumes an algebra.
#[derive(Args)]
struct InputArg {
    /// Algebra source: a JSON file path, "-" for stdin, or a catalog name
    #[arg(short = 'i', long = "input", default_value = "-")]
    input: String,
    /// Catalog parameter, used when the input names a catalog entry
    #[arg(long)]
    param: Option<f64>,
}

#[derive(Args)]
struct OutputArg {
    /// Write the report here instead of stdout
    #[arg(short = 'o', long = "output")]
    output: Option<String>,
}

#[derive(Copy, Clone, ValueEnum)]
enum GaugeArg {
    /// Unnormalized Ricci flow
    None,
    /// Rescale each step to unit determinant
    Volume,
    /// Rescale each step to unit orthonormal bracket norm
    Bracket,
}

impl GaugeArg {
    fn to_normalization(self) -> Normalization {
        match self {
            GaugeArg::None => Normalization::None,
            GaugeArg::Volume => Normalization::UnitVolume,
            GaugeArg::Bracket => Normalization::UnitBracketNorm,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check bracket antisymmetry and the Jacobi identity
    Validate {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Structural profile: nilpotency, solvability, Killing form, unimodularity
    Classify {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Ricci tensor, scalar curvature, and Einstein check at a metric
    Curvature {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Find or certify a nilsoliton metric
    Soliton {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
        /// Seed for the soliton search
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Iteration budget per restart
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
    },
    /// Extend a nilsoliton to an Einstein solvable algebra one dimension up
    Extend {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
        /// Seed for the underlying soliton search
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Integrate the Ricci flow of a left-invariant metric
    Flow {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
        /// Final flow time
        #[arg(long)]
        t_max: f64,
        /// Time step for the integrator
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Gauge applied after each step
        #[arg(long, value_enum, default_value_t = GaugeArg::None)]
        normalize: GaugeArg,
        /// Also write the trajectory as CSV to this path
        #[arg(long)]
        csv: Option<String>,
        /// Start from a seeded random perturbation of the identity metric
        #[arg(long)]
        perturb: Option<f64>,
        /// Seed for the perturbed initial metric
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve the quadratic-curvature field equation for (alpha, beta, Lambda)
    HcSolve {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Check one (alpha, beta, Lambda) triple against the field equation
    HcCheck {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Search for a metric with scalar curvature at or below a target
    #[command(name = "search-negR")]
    SearchNegR {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
        /// Stop once the scalar curvature reaches this value
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        target: f64,
        /// Seed for the randomized search
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Iteration budget per restart
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
    },
    /// Detect an su(2) subalgebra by locating a cyclic bracket triple
    DetectSu2 {
        #[command(flatten)]
        input: InputArg,
        #[command(flatten)]
        output: OutputArg,
        /// Seed for the randomized detection
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a catalog algebra as JSON suitable for piping into other commands
    Catalog {
        /// Catalog entry name
        #[arg(long)]
        name: String,
        /// Entry parameter (dimension or structure coefficient)
        #[arg(long)]
        param: Option<f64>,
        #[command(flatten)]
        output: OutputArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Parsed algebra plus the optional metric that rode along in the file.
struct LoadedInput {
    algebra: LieAlgebra,
    metric: Option<DMatrix<f64>>,
}

/// Resolve `-i`: "-" reads stdin, an existing file is parsed as JSON, and
/// anything else is tried against the catalog.  `validate` is the one
/// command that wants the algebra without a Jacobi check, so it can report
/// on the violation instead of merely failing.
fn load_input(arg: &InputArg, validate: bool) -> Result<LoadedInput, Error> {
    let text = if arg.input == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Some(buf)
    } else if std::path::Path::new(&arg.input).exists() {
        Some(std::fs::read_to_string(&arg.input)?)
    } else {
        None
    };
    match text {
        Some(text) => {
            let file = parse_algebra_file(&text)?;
            let algebra = if validate {
                file.validated_algebra()?
            } else {
                file.algebra()?
            };
            let metric = file.metric_matrix()?;
            Ok(LoadedInput { algebra, metric })
        }
        None => {
            let algebra = catalog(&arg.input, arg.param)?;
            Ok(LoadedInput {
                algebra,
                metric: None,
            })
        }
    }
}

/// Build an object from ordered key/value pairs.
fn obj(fields: Vec<(&str, Jv)>) -> Jv {
    let mut o = Jv::object();
    for (k, v) in fields {
        o.set(k, v);
    }
    o
}

/// Standard report envelope followed by the command payload.
fn report(command: &str, seed: u64, fields: Vec<(&str, Jv)>) -> Jv {
    let mut o = Jv::object();
    o.set("command", Jv::Str(command.into()));
    o.set("tool", Jv::Str("liegeo".into()));
    o.set("version", Jv::Str(VERSION.into()));
    o.set("seed", Jv::Int(seed as i64));
    o.set("sign_convention", Jv::Str(SIGN_CONVENTION.into()));
    for (k, v) in fields {
        o.set(k, v);
    }
    o
}

fn emit(output: &OutputArg, doc: Jv) -> Result<(), Error> {
    let text = doc.render();
    match &output.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn vector_json(v: &DVector<f64>) -> Jv {
    Jv::Arr(v.iter().map(|&x| Jv::F(x)).collect())
}

fn floats_json(xs: &[f64]) -> Jv {
    Jv::Arr(xs.iter().map(|&x| Jv::F(x)).collect())
}

fn certificate_json(cert: &SolitonCertificate) -> Jv {
    obj(vec![
        ("lambda", Jv::F(cert.lambda)),
        ("derivation", matrix_to_json(&cert.d)),
        ("residual", Jv::F(cert.residual)),
        ("derivation_residual", Jv::F(cert.derivation_residual)),
        ("verified", Jv::Bool(cert.verified())),
    ])
}

/// The metric the command should work at: the input file's when present,
/// the identity otherwise.
fn input_metric(loaded: &LoadedInput) -> DMatrix<f64> {
    let n = loaded.algebra.dim();
    loaded
        .metric
        .clone()
        .unwrap_or_else(|| DMatrix::identity(n, n))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Validate { input, output } => {
            let loaded = load_input(&input, false)?;
            let rep = loaded.algebra.validate();
            let (i, j, k, l) = rep.worst;
            let doc = report(
                "validate",
                0,
                vec![
                    ("dim", Jv::Int(loaded.algebra.dim() as i64)),
                    (
                        "jacobi",
                        obj(vec![
                            ("max_residual", Jv::F(rep.max_residual)),
                            (
                                "worst",
                                Jv::Arr([i, j, k, l].iter().map(|&x| Jv::Int(x as i64)).collect()),
                            ),
                            ("ok", Jv::Bool(rep.ok)),
                        ]),
                    ),
                    ("unimodular", Jv::Bool(loaded.algebra.profile().unimodular)),
                ],
            );
            emit(&output, doc)?;
            if !rep.ok {
                return Err(Error::JacobiViolation {
                    residual: rep.max_residual,
                    worst: rep.worst,
                });
            }
            Ok(())
        }
        Command::Classify { input, output } => {
            let loaded = load_input(&input, true)?;
            let profile = loaded.algebra.profile();
            let dims_json =
                |dims: &[usize]| Jv::Arr(dims.iter().map(|&d| Jv::Int(d as i64)).collect());
            let step_json = |step: Option<usize>| match step {
                Some(s) => Jv::Int(s as i64),
                None => Jv::Null,
            };
            let doc = report(
                "classify",
                0,
                vec![
                    ("dim", Jv::Int(loaded.algebra.dim() as i64)),
                    ("unimodular", Jv::Bool(profile.unimodular)),
                    ("nilpotent_step", step_json(profile.nilpotent)),
                    ("solvable_step", step_json(profile.solvable)),
                    ("semisimple", Jv::Bool(profile.semisimple)),
                    ("lower_central_dims", dims_json(&profile.lower_central_dims)),
                    ("derived_dims", dims_json(&profile.derived_dims)),
                    ("trace_vector", vector_json(&profile.trace_vector)),
                    ("killing", matrix_to_json(&profile.killing)),
                ],
            );
            emit(&output, doc)
        }
        Command::Curvature { input, output } => {
            let loaded = load_input(&input, true)?;
            let g = input_metric(&loaded);
            let ortho = orthonormal_constants(&loaded.algebra, &g)?;
            let ric = ricci_coordinates(&loaded.algebra, &g)?;
            let check = einstein_check(&ortho);
            let mut eig: Vec<f64> = ricci_from_connection(&ortho)
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect();
            eig.sort_by(f64::total_cmp);
            let doc = report(
                "curvature",
                0,
                vec![
                    ("dim", Jv::Int(loaded.algebra.dim() as i64)),
                    ("metric", matrix_to_json(&g)),
                    ("ricci", matrix_to_json(&ric)),
                    ("scalar", Jv::F(scalar_curvature(&ortho))),
                    ("ricci_eigenvalues", floats_json(&eig)),
                    (
                        "einstein",
                        obj(vec![
                            ("lambda", Jv::F(check.lambda)),
                            ("residual", Jv::F(check.residual)),
                        ]),
                    ),
                ],
            );
            emit(&output, doc)
        }
        Command::Soliton {
            input,
            output,
            seed,
            max_iter,
        } => {
            let loaded = load_input(&input, true)?;
            let g = input_metric(&loaded);
            let ortho = orthonormal_constants(&loaded.algebra, &g)?;
            let cert = soliton_project(&ortho);
            let mut fields = vec![
                ("dim", Jv::Int(loaded.algebra.dim() as i64)),
                ("projection", certificate_json(&cert)),
            ];
            if cert.verified() {
                fields.push(("searched", Jv::Bool(false)));
                fields.push(("metric", matrix_to_json(&g)));
            } else if loaded.algebra.profile().nilpotent.is_some() {
                let cfg = SearchConfig {
                    seed,
                    max_iter,
                    ..SearchConfig::default()
                };
                let sol = solve_nilsoliton(&loaded.algebra, &cfg)?;
                fields.push(("searched", Jv::Bool(true)));
                fields.push(("certificate", certificate_json(&sol.certificate)));
                fields.push(("metric", matrix_to_json(&sol.frame.g())));
                fields.push(("iterations", Jv::Int(sol.iterations as i64)));
                fields.push(("restarts_used", Jv::Int(sol.restarts_used as i64)));
            } else {
                fields.push(("searched", Jv::Bool(false)));
                fields.push((
                    "note",
                    Jv::Str("algebra is not nilpotent; showing the soliton projection only".into()),
                ));
            }
            emit(&output, report("soliton", seed, fields))
        }
        Command::Extend {
            input,
            output,
            seed,
        } => {
            let loaded = load_input(&input, true)?;
            let cfg = SearchConfig {
                seed,
                ..SearchConfig::default()
            };
            let ext = solve_einstein_extension(&loaded.algebra, &cfg)?;
            let doc = report(
                "extend",
                seed,
                vec![
                    ("base_dim", Jv::Int(ext.extension.base_dim as i64)),
                    (
                        "soliton",
                        obj(vec![
                            ("lambda", Jv::F(ext.certificate.lambda)),
                            ("residual", Jv::F(ext.certificate.residual)),
                            ("base", algebra_to_json(&ext.base, None, None)),
                        ]),
                    ),
                    (
                        "extended",
                        algebra_to_json(&ext.extension.total, None, None),
                    ),
                    ("scale", Jv::F(ext.extension.scale)),
                    ("derivation", matrix_to_json(&ext.extension.d)),
                    (
                        "positive_derivation_eigenvalues",
                        Jv::Bool(ext.extension.positive_eigenvalues),
                    ),
                    ("einstein_lambda", Jv::F(ext.einstein_lambda)),
                    ("einstein_residual", Jv::F(ext.einstein_residual)),
                ],
            );
            emit(&output, doc)
        }
        Command::Flow {
            input,
            output,
            t_max,
            dt,
            normalize,
            csv,
            perturb,
            seed,
        } => {
            let loaded = load_input(&input, true)?;
            let n = loaded.algebra.dim();
            let g0 = match (&loaded.metric, perturb) {
                (Some(g), _) => g.clone(),
                (None, Some(amp)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    perturbed_identity(n, amp, &mut rng)
                }
                (None, None) => DMatrix::identity(n, n),
            };
            let norm = normalize.to_normalization();
            let traj = integrate(&loaded.algebra, &g0, t_max, dt, norm)?;
            if let Some(path) = &csv {
                std::fs::write(path, traj.to_csv())?;
            }
            let sample_json = |s: &liegeo::FlowSample| {
                obj(vec![
                    ("t", Jv::F(s.t)),
                    ("metric", matrix_to_json(&s.g)),
                    ("scalar", Jv::F(s.scalar)),
                    ("soliton_residual", Jv::F(s.soliton_residual)),
                    ("scale_estimate", Jv::F(s.scale_estimate)),
                ])
            };
            let first = traj.samples.first().expect("trajectory has samples");
            let doc = report(
                "flow",
                seed,
                vec![
                    ("dim", Jv::Int(n as i64)),
                    ("t_max", Jv::F(t_max)),
                    ("dt", Jv::F(dt)),
                    ("normalization", Jv::Str(norm.name().into())),
                    ("steps", Jv::Int((traj.samples.len() - 1) as i64)),
                    ("initial", sample_json(first)),
                    ("final", sample_json(traj.final_sample())),
                    (
                        "csv",
                        match &csv {
                            Some(path) => Jv::Str(path.clone()),
                            None => Jv::Null,
                        },
                    ),
                ],
            );
            emit(&output, doc)
        }
        Command::HcSolve { input, output } => {
            let loaded = load_input(&input, true)?;
            let g = input_metric(&loaded);
            let ortho = orthonormal_constants(&loaded.algebra, &g)?;
            let set = solve_parameters(&ortho);
            let params_json = |p: &HCParameters| floats_json(&[p.alpha, p.beta, p.lambda_cc]);
            let doc = report(
                "hc-solve",
                0,
                vec![
                    ("dim", Jv::Int(loaded.algebra.dim() as i64)),
                    ("empty", Jv::Bool(set.empty)),
                    ("residual", Jv::F(set.residual)),
                    ("offset", params_json(&set.offset)),
                    (
                        "basis",
                        Jv::Arr(set.basis.iter().map(params_json).collect()),
                    ),
                    (
                        "invariant_products",
                        Jv::Arr(
                            set.invariant_products
                                .iter()
                                .map(|p| {
                                    obj(vec![
                                        ("label", Jv::Str(p.label.clone())),
                                        ("value", Jv::F(p.value)),
                                    ])
                                })
                                .collect(),
                        ),
                    ),
                ],
            );
            emit(&output, doc)
        }
        Command::HcCheck {
            input,
            output,
            alpha,
            beta,
            lambda,
        } => {
            let loaded = load_input(&input, true)?;
            let g = input_metric(&loaded);
            let ortho = orthonormal_constants(&loaded.algebra, &g)?;
            let params = HCParameters::new(alpha, beta, lambda);
            let rep = check_solution(&ortho, &params);
            let doc = report(
                "hc-check",
                0,
                vec![
                    ("dim", Jv::Int(loaded.algebra.dim() as i64)),
                    ("alpha", Jv::F(alpha)),
                    ("beta", Jv::F(beta)),
                    ("lambda", Jv::F(lambda)),
                    ("residual", Jv::F(rep.residual)),
                    (
                        "satisfied",
                        Jv::Bool(rep.residual <= liegeo::tol::HC_VERIFY),
                    ),
                    ("lagrangian_density", Jv::F(rep.lagrangian_density)),
                    ("phi", matrix_to_json(&rep.phi)),
                ],
            );
            emit(&output, doc)
        }
        Command::SearchNegR {
            input,
            output,
            target,
            seed,
            max_iter,
        } => {
            let loaded = load_input(&input, true)?;
            let cfg = SearchConfig {
                seed,
                max_iter,
                ..SearchConfig::default()
            };
            let witness = find_negative_scalar_metric(&loaded.algebra, &cfg, target)?;
            let doc = report(
                "search-negR",
                seed,
                vec![
                    ("dim", Jv::Int(loaded.algebra.dim() as i64)),
                    ("target", Jv::F(target)),
                    ("scalar", Jv::F(witness.scalar)),
                    ("iterations", Jv::Int(witness.iterations as i64)),
                    ("evaluations", Jv::Int(witness.evaluations as i64)),
                    ("metric", matrix_to_json(&witness.frame.g())),
                ],
            );
            emit(&output, doc)
        }
        Command::DetectSu2 {
            input,
            output,
            seed,
        } => {
            let loaded = load_input(&input, true)?;
            let cfg = SearchConfig {
                seed,
                ..SearchConfig::default()
            };
            let detection = detect_su2(&loaded.algebra, &cfg);
            let doc = report(
                "detect-su2",
                seed,
                vec![
                    ("dim", Jv::Int(loaded.algebra.dim() as i64)),
                    ("found", Jv::Bool(detection.found)),
                    ("residual", Jv::F(detection.residual)),
                    (
                        "triple",
                        match &detection.triple {
                            Some(t) => Jv::Arr(t.iter().map(vector_json).collect()),
                            None => Jv::Null,
                        },
                    ),
                ],
            );
            emit(&output, doc)
        }
        Command::Catalog {
            name,
            param,
            output,
        } => {
            let algebra = catalog(&name, param).inspect_err(|_| {
                eprintln!("known catalog entries: {}", CATALOG_NAMES.join(", "));
            })?;
            emit(&output, algebra_to_json(&algebra, Some(&name), None))
        }
    }
}
