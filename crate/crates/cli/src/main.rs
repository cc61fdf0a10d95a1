mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use prym_forge_core::bounds::{
    castelnuovo_max_genus, clifford_lower_bound, genus_formulas, gonality_of_simple_cover,
    gonality_threshold, plan_counterexample, vandermonde_check, BoundsError,
};
use prym_forge_core::corresp::{verify_sst, verify_sts};
use prym_forge_core::cover::{is_primitive, pair_action, validate, MonodromyRep};
use prym_forge_core::homology::verify_isogeny_package;
use prym_forge_core::ngonal::{lift_action, sigma_quotient, split, split_checks};
use prym_forge_core::search::{search, SearchError, SearchParams, SignMode};
use prym_forge_core::seed::{parse_seed, SeedError, SeedFile};

use report::{
    AnalyzeBody, Body, BoundsRecord, ErrorBody, Report, SearchBody, SigmaSummary, VerifyBody,
};

const EXIT_OK: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_PARSE: i32 = 2;
const EXIT_UNSUPPORTED: i32 = 3;
const EXIT_EXHAUSTED: i32 = 4;

#[derive(Parser)]
#[command(
    name = "prym-forge",
    version,
    about = "Monodromy seeds, n-gonal constructions and Prym lattice checks"
)]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Correspondences,
    Prym,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Check a seed file for admissibility.
    Validate { seed: PathBuf },
    /// Split analysis of the n-gonal construction of a seed.
    Analyze { seed: PathBuf },
    /// Verify the correspondence identities and the Prym lattice package.
    Verify {
        seed: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        which: Which,
    },
    /// Seeded random search for admissible split seeds.
    Search {
        /// Half the number of sheets.
        n: usize,
        /// Genus of the base curve.
        g_y: usize,
        /// Number of branch points.
        b: usize,
        /// Number of seeds wanted.
        count: usize,
        /// RNG seed.
        seed: u64,
        /// Require a non-split sign character.
        #[arg(long)]
        non_split: bool,
        /// Write each seed to its own file in this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Attempt budget; overrides the environment.
        #[arg(long)]
        attempts: Option<u64>,
    },
    /// Numerical bounds and closed-form genus data.
    #[command(group(ArgGroup::new("mode").required(true).multiple(false)))]
    Bounds {
        /// Castelnuovo bound: N1 N2 G1 G2.
        #[arg(long, num_args = 4, value_names = ["N1", "N2", "G1", "G2"], group = "mode")]
        castelnuovo: Option<Vec<u64>>,
        /// Gonality of a simple cover: N GON_Y DELTA.
        #[arg(long, num_args = 3, value_names = ["N", "GON_Y", "DELTA"], group = "mode")]
        gonality: Option<Vec<u64>>,
        /// Clifford index lower bound for a double cover: G_Y DELTA.
        #[arg(long, num_args = 2, value_names = ["G_Y", "DELTA"], group = "mode")]
        clifford: Option<Vec<u64>>,
        /// Parameters of a double cover with large Clifford index: TARGET.
        #[arg(long, value_name = "TARGET", group = "mode")]
        plan: Option<u64>,
        /// Alternating binomial sum: N G_X.
        #[arg(long, num_args = 2, value_names = ["N", "G_X"], group = "mode")]
        vandermonde: Option<Vec<u64>>,
        /// Closed-form genera of the construction: N G_X G_Y.
        #[arg(long, num_args = 3, value_names = ["N", "G_X", "G_Y"], group = "mode")]
        genus: Option<Vec<u64>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(cli.command);
    if cli.json {
        print!("{}", report.to_json());
    } else if report.exit_code == EXIT_OK || report.exit_code == EXIT_FAIL {
        print!("{}", report.to_text());
    } else {
        eprint!("{}", report.to_text());
    }
    ExitCode::from(report.exit_code as u8)
}

fn error(command: &'static str, category: &'static str, message: String, code: i32) -> Report {
    Report::new(
        command,
        Body::Error(ErrorBody {
            category,
            message,
            line: None,
            column: None,
            validation: None,
        }),
        code,
    )
}

fn seed_error(command: &'static str, err: &SeedError) -> Report {
    let (line, column) = match err.location() {
        Some((l, c)) => (Some(l), Some(c)),
        None => (None, None),
    };
    Report::new(
        command,
        Body::Error(ErrorBody {
            category: "parse",
            message: err.to_string(),
            line,
            column,
            validation: None,
        }),
        EXIT_PARSE,
    )
}

/// Reads and parses a seed, or returns the error report.
fn load(command: &'static str, path: &PathBuf) -> Result<(Vec<u8>, MonodromyRep), Box<Report>> {
    let shown = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| {
        Box::new(
            error(
                command,
                "io",
                format!("cannot read {shown}: {e}"),
                EXIT_PARSE,
            )
            .with_input(&shown, None),
        )
    })?;
    let text = String::from_utf8_lossy(&bytes).into_owned();
    match parse_seed(&text) {
        Ok((_, rep)) => Ok((bytes, rep)),
        Err(e) => Err(Box::new(
            seed_error(command, &e).with_input(&shown, Some(&bytes)),
        )),
    }
}

/// Loads a seed and requires it to be admissible.
fn load_admissible(
    command: &'static str,
    path: &PathBuf,
) -> Result<(Vec<u8>, MonodromyRep), Box<Report>> {
    let (bytes, rep) = load(command, path)?;
    let validation = validate(&rep);
    if validation.is_admissible() {
        return Ok((bytes, rep));
    }
    let report = Report::new(
        command,
        Body::Error(ErrorBody {
            category: "inadmissible",
            message: "seed fails admissibility checks".into(),
            line: None,
            column: None,
            validation: Some(validation),
        }),
        EXIT_FAIL,
    );
    Err(Box::new(
        report.with_input(&path.display().to_string(), Some(&bytes)),
    ))
}

fn run(command: Command) -> Report {
    match command {
        Command::Validate { seed } => cmd_validate(&seed),
        Command::Analyze { seed } => cmd_analyze(&seed),
        Command::Verify { seed, which } => cmd_verify(&seed, which),
        Command::Search {
            n,
            g_y,
            b,
            count,
            seed,
            non_split,
            out_dir,
            attempts,
        } => {
            let mut params = SearchParams::new(n, g_y, b, count, seed).with_env_budget();
            if let Some(a) = attempts {
                params.attempts = a;
            }
            if non_split {
                params.sign = SignMode::NonSplit;
            }
            cmd_search(&params, out_dir.as_ref())
        }
        Command::Bounds {
            castelnuovo,
            gonality,
            clifford,
            plan,
            vandermonde,
            genus,
        } => cmd_bounds(castelnuovo, gonality, clifford, plan, vandermonde, genus),
    }
}

fn cmd_validate(path: &PathBuf) -> Report {
    let (bytes, rep) = match load("validate", path) {
        Ok(v) => v,
        Err(r) => return *r,
    };
    let validation = validate(&rep);
    let admissible = validation.is_admissible();
    Report::new(
        "validate",
        Body::Validate {
            admissible,
            validation,
        },
        if admissible { EXIT_OK } else { EXIT_FAIL },
    )
    .with_input(&path.display().to_string(), Some(&bytes))
}

fn cmd_analyze(path: &PathBuf) -> Report {
    const CMD: &str = "analyze";
    let shown = path.display().to_string();
    let (bytes, rep) = match load_admissible(CMD, path) {
        Ok(v) => v,
        Err(r) => return *r,
    };
    let lifts = match lift_action(&rep) {
        Ok(l) => l,
        Err(e) => {
            return error(CMD, "unsupported", e.to_string(), EXIT_UNSUPPORTED)
                .with_input(&shown, Some(&bytes))
        }
    };
    let report = split(&lifts);
    let checks = split_checks(&report);
    let mut notes = Vec::new();
    let formulas = if report.split {
        genus_formulas(
            rep.degree_n() as u64,
            report.pair_genus.max(0) as u64,
            rep.base_genus() as u64,
        )
        .map_err(|e| notes.push(format!("closed forms unavailable: {e}")))
        .ok()
    } else {
        notes.push("sign character is nonzero: the lift cover is connected, so the construction does not split".into());
        None
    };
    let quotient = sigma_quotient(&lifts);
    let sigma = SigmaSummary {
        swaps_components: quotient.swaps_components,
        fixed_point_free: quotient.fixed_point_free,
        quotient_genera: quotient
            .quotient_analysis
            .components
            .iter()
            .map(|c| c.genus)
            .collect(),
    };
    let primitive = pair_action(&rep).map(|a| is_primitive(&a)).unwrap_or(false);
    let passed = checks.iter().all(|c| c.passed);
    Report::new(
        CMD,
        Body::Analyze(Box::new(AnalyzeBody {
            validation: validate(&rep),
            split: report,
            checks,
            formulas,
            sigma,
            primitive,
            notes,
        })),
        if passed { EXIT_OK } else { EXIT_FAIL },
    )
    .with_input(&shown, Some(&bytes))
}

fn cmd_verify(path: &PathBuf, which: Which) -> Report {
    const CMD: &str = "verify";
    let shown = path.display().to_string();
    let (bytes, rep) = match load_admissible(CMD, path) {
        Ok(v) => v,
        Err(r) => return *r,
    };
    let unsupported = |message: String| {
        error(CMD, "unsupported", message, EXIT_UNSUPPORTED).with_input(&shown, Some(&bytes))
    };
    let n = rep.degree_n();
    if matches!(which, Which::Prym) && n != 4 {
        return unsupported(format!("the Prym isogeny package needs n = 4, got n = {n}"));
    }
    let lifts = match lift_action(&rep) {
        Ok(l) => l,
        Err(e) => return unsupported(e.to_string()),
    };
    if !lifts.is_split() {
        return unsupported(
            "the lift cover does not split, so the correspondence is undefined".into(),
        );
    }
    let mut notes = Vec::new();
    let mut identities = Vec::new();
    if matches!(which, Which::Correspondences | Which::All) {
        for check in [verify_sts, verify_sst] {
            match check(&lifts) {
                Ok(r) => identities.push(r),
                Err(e) => return unsupported(e.to_string()),
            }
        }
    }
    let mut prym = None;
    if matches!(which, Which::Prym | Which::All) {
        match verify_isogeny_package(&rep) {
            Ok(p) => {
                if n == 4 && p.pair_genus < 2 {
                    notes.push(format!(
                        "g_X = {}: lattices are reported but isogeny verdicts need g_X >= 2",
                        p.pair_genus
                    ));
                } else if n != 4 {
                    notes.push(format!("n = {n}: isogeny verdicts apply to n = 4 only"));
                }
                prym = Some(p);
            }
            Err(e) => return unsupported(e.to_string()),
        }
    }
    let passed = identities.iter().all(|r| r.holds) && prym.as_ref().is_none_or(|p| p.all_pass());
    let which = match which {
        Which::Correspondences => "correspondences",
        Which::Prym => "prym",
        Which::All => "all",
    };
    Report::new(
        CMD,
        Body::Verify(Box::new(VerifyBody {
            which,
            identities,
            prym,
            notes,
        })),
        if passed { EXIT_OK } else { EXIT_FAIL },
    )
    .with_input(&shown, Some(&bytes))
}

fn cmd_search(params: &SearchParams, out_dir: Option<&PathBuf>) -> Report {
    const CMD: &str = "search";
    let outcome = match search(params) {
        Ok(o) => o,
        Err(e @ SearchError::Exhausted { .. }) => {
            return error(CMD, "exhausted", e.to_string(), EXIT_EXHAUSTED)
        }
        Err(e) => return error(CMD, "unsupported", e.to_string(), EXIT_UNSUPPORTED),
    };
    let seeds: Vec<SeedFile> = outcome
        .seeds
        .iter()
        .enumerate()
        .map(|(i, rep)| {
            let name = format!(
                "n{}-g{}-b{}-s{}-{:03}",
                params.n, params.base_genus, params.branch_count, params.seed, i
            );
            SeedFile::from_rep(rep, Some(name), None)
        })
        .collect();
    let mut written = Vec::new();
    if let Some(dir) = out_dir {
        if let Err(e) = std::fs::create_dir_all(dir) {
            return error(
                CMD,
                "io",
                format!("cannot create {}: {e}", dir.display()),
                EXIT_PARSE,
            );
        }
        for s in &seeds {
            let path = dir.join(format!("{}.json", s.name.as_deref().unwrap_or("seed")));
            if let Err(e) = std::fs::write(&path, s.to_canonical()) {
                return error(
                    CMD,
                    "io",
                    format!("cannot write {}: {e}", path.display()),
                    EXIT_PARSE,
                );
            }
            written.push(path.display().to_string());
        }
    }
    Report::new(
        CMD,
        Body::Search(SearchBody {
            n: params.n,
            base_genus: params.base_genus,
            branch_count: params.branch_count,
            requested: params.count,
            seed: params.seed,
            attempt_budget: params.attempts,
            attempts: outcome.attempts,
            seeds,
            written,
        }),
        EXIT_OK,
    )
}

fn cmd_bounds(
    castelnuovo: Option<Vec<u64>>,
    gonality: Option<Vec<u64>>,
    clifford: Option<Vec<u64>>,
    plan: Option<u64>,
    vandermonde: Option<Vec<u64>>,
    genus: Option<Vec<u64>>,
) -> Report {
    const CMD: &str = "bounds";
    let bounds_error = |e: BoundsError| {
        let code = match e {
            BoundsError::HypothesisFails { .. } => EXIT_FAIL,
            _ => EXIT_UNSUPPORTED,
        };
        error(CMD, "bounds", e.to_string(), code)
    };
    let record = if let Some(v) = castelnuovo {
        match castelnuovo_max_genus(v[0], v[1], v[2], v[3]) {
            Ok(max_genus) => BoundsRecord::Castelnuovo {
                n1: v[0],
                n2: v[1],
                g_y1: v[2],
                g_y2: v[3],
                max_genus,
            },
            Err(e) => return bounds_error(e),
        }
    } else if let Some(v) = gonality {
        BoundsRecord::Gonality {
            n: v[0],
            gon_y: v[1],
            delta: v[2],
            threshold: gonality_threshold(v[0], v[1]),
            verdict: gonality_of_simple_cover(v[0], v[1], v[2]),
        }
    } else if let Some(v) = clifford {
        match clifford_lower_bound(v[0], v[1]) {
            Ok(c) => BoundsRecord::Clifford(c),
            Err(e) => return bounds_error(e),
        }
    } else if let Some(t) = plan {
        match plan_counterexample(t) {
            Ok(p) => BoundsRecord::Plan(p),
            Err(e) => return bounds_error(e),
        }
    } else if let Some(v) = vandermonde {
        BoundsRecord::Vandermonde {
            n: v[0],
            g_x: v[1],
            value: vandermonde_check(v[0], v[1]).to_string(),
        }
    } else if let Some(v) = genus {
        match genus_formulas(v[0], v[1], v[2]) {
            Ok(f) => BoundsRecord::Genus(f),
            Err(e) => return bounds_error(e),
        }
    } else {
        return error(CMD, "usage", "choose exactly one bound".into(), EXIT_PARSE);
    };
    let code = match &record {
        BoundsRecord::Gonality {
            verdict: prym_forge_core::bounds::GonalityVerdict::HypothesisFails { .. },
            ..
        } => EXIT_FAIL,
        _ => EXIT_OK,
    };
    Report::new(CMD, Body::Bounds(record), code)
}
