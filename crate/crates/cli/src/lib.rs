//! Command-line front end. Exit codes: 0 certified positive, 2 certified
//! negative, 3 inconclusive or out of budget, 1 usage, parse or internal
//! error.

pub mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use manifest::{with_suffix, write_atomic, FileDigest, RunManifest, Timing};
use troprank::geometry::{ProjectivePlane, WeightScheme};
use troprank::hall::{cnf_to_polys, reduce};
use troprank::lifting::{
    kapranov_bounds, verify_lift, BoundsOptions, IncidencePattern, LiftVerdict, RealizabilityVerdict, RealizeField,
    RealizeOptions,
};
use troprank::text::{
    parse_dimacs, parse_poly_system, parse_troplift, parse_tropmat, write_configuration, write_provenance,
    write_tropmat,
};
use troprank::tropical::{
    barvinok_rank, tropical_determinant, tropical_rank, BarvinokOptions, CertificateReport, RankOptions,
    TropicalError, TropicalMatrix,
};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "troprank", version, about = "Tropical, Barvinok and Kapranov rank tools")]
pub struct Cli {
    /// Seed for every random choice; one is drawn and printed when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print a single JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Run manifest path (default: <output>.manifest.json when --output is given).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RankKind {
    Tropical,
    Barvinok,
    Bounds,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Weights {
    Unit,
    Random,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tropical determinant of a square matrix.
    Det { file: PathBuf },
    /// Tropical or Barvinok rank, or Kapranov rank bounds.
    Rank {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "tropical")]
        kind: RankKind,
        /// Maximum number of search steps.
        #[arg(long)]
        budget: Option<u64>,
        /// With --kind bounds on a (0,1) matrix: search a rank-3 configuration over this field.
        #[arg(long)]
        realize: Option<String>,
        /// Prefix for witness files.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Incidence matrix of the projective plane over GF(q).
    GenPlane {
        #[arg(long)]
        order: u32,
        #[arg(long, value_enum, default_value = "unit")]
        weights: Weights,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile a CNF or polynomial system into an incidence pattern.
    Reduce {
        #[arg(long, conflicts_with = "polys", required_unless_present = "polys")]
        cnf: Option<PathBuf>,
        #[arg(long)]
        polys: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "on")]
        harden: Switch,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search points and lines with exactly the incidences of a (0,1) pattern.
    Realize {
        #[arg(long)]
        pattern: PathBuf,
        /// q, gf<p> or float.
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long)]
        budget: Option<u64>,
        /// Restarts of the floating-point search.
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a lift certificate against a tropical matrix and a rank bound.
    VerifyLift {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        lift: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// What a subcommand produced, before the manifest is finished.
struct Outcome {
    exit: i32,
    verdict: String,
    text: String,
    report: Value,
}

struct Run {
    manifest: RunManifest,
    pending: Vec<(PathBuf, Vec<u8>)>,
    seed: Option<u64>,
    drawn: bool,
}

impl Run {
    fn input(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.manifest.inputs.push(FileDigest::of(path, &bytes));
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    fn output(&mut self, path: PathBuf, contents: String) {
        self.manifest.outputs.push(FileDigest::of(&path, contents.as_bytes()));
        self.pending.push((path, contents.into_bytes()));
    }

    fn seed(&mut self) -> u64 {
        let seed = *self.seed.get_or_insert_with(|| {
            self.drawn = true;
            rand::random()
        });
        self.manifest.seed = Some(seed);
        seed
    }
}

/// Parses `args` (including the program name), runs, prints and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_POSITIVE };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": format!("{e:#}"), "exit_code": EXIT_ERROR }));
            } else {
                eprintln!("error: {e:#}");
            }
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let start = Instant::now();
    let (name, output) = match &cli.command {
        Command::Det { .. } => ("det", None),
        Command::Rank { output, .. } => ("rank", output.clone()),
        Command::GenPlane { output, .. } => ("gen-plane", output.clone()),
        Command::Reduce { output, .. } => ("reduce", output.clone()),
        Command::Realize { output, .. } => ("realize", output.clone()),
        Command::VerifyLift { output, .. } => ("verify-lift", output.clone()),
    };
    let mut run = Run { manifest: RunManifest::new(name), pending: Vec::new(), seed: cli.seed, drawn: false };
    let outcome = match &cli.command {
        Command::Det { file } => cmd_det(&mut run, file)?,
        Command::Rank { file, kind, budget, realize, output } => {
            cmd_rank(&mut run, file, *kind, *budget, realize.as_deref(), output.as_deref())?
        }
        Command::GenPlane { order, weights, output } => cmd_gen_plane(&mut run, *order, *weights, output.as_deref())?,
        Command::Reduce { cnf, polys, harden, output } => {
            cmd_reduce(&mut run, cnf.as_deref(), polys.as_deref(), *harden, output.as_deref())?
        }
        Command::Realize { pattern, field, budget, restarts, output } => {
            cmd_realize(&mut run, pattern, field, *budget, *restarts, output.as_deref())?
        }
        Command::VerifyLift { matrix, lift, rank, output } => cmd_verify_lift(&mut run, matrix, lift, *rank, output.as_deref())?,
    };
    if run.drawn {
        eprintln!("seed {}", run.seed.expect("drawn"));
    }
    run.manifest.exit_code = outcome.exit;
    run.manifest.verdict = outcome.verdict.clone();
    for (path, bytes) in &run.pending {
        write_atomic(path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    let manifest_path = cli.manifest.clone().or_else(|| output.map(|o| with_suffix(&o, ".manifest.json")));
    let timing = Timing { subcommand: name.to_string(), wall_clock_ms: start.elapsed().as_secs_f64() * 1e3 };
    if let Some(path) = &manifest_path {
        let text = serde_json::to_string_pretty(&run.manifest)? + "\n";
        write_atomic(path, text.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
        let timing_path = with_suffix(path, ".timing.json");
        write_atomic(&timing_path, (serde_json::to_string_pretty(&timing)? + "\n").as_bytes())?;
    }
    if cli.json {
        println!("{}", json!({ "manifest": run.manifest, "timing": timing, "report": outcome.report }));
    } else {
        print!("{}", outcome.text);
        if manifest_path.is_none() {
            eprintln!("manifest {}", serde_json::to_string(&run.manifest)?);
        }
    }
    Ok(outcome.exit)
}

fn read_matrix(run: &mut Run, path: &Path) -> Result<TropicalMatrix> {
    let text = run.input(path)?;
    parse_tropmat(&text).with_context(|| format!("parsing {}", path.display()))
}

fn witness_text(rows: &[usize], cols: &[usize]) -> String {
    let join = |v: &[usize]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    format!("rows {}\ncols {}\n", join(rows), join(cols))
}

fn cmd_det(run: &mut Run, file: &Path) -> Result<Outcome> {
    let m = read_matrix(run, file)?;
    let cert = tropical_determinant(&m)?;
    let report = CertificateReport::from(&cert);
    let mut text = format!("value {}, unique {}\n", report.value, report.unique);
    if let Some(w) = &report.witness {
        text.push_str(&format!("witness {}\n", w.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")));
    }
    Ok(Outcome {
        exit: EXIT_POSITIVE,
        verdict: format!("value {} unique {}", report.value, report.unique),
        text,
        report: serde_json::to_value(&report)?,
    })
}

fn cmd_rank(
    run: &mut Run,
    file: &Path,
    kind: RankKind,
    budget: Option<u64>,
    realize: Option<&str>,
    output: Option<&Path>,
) -> Result<Outcome> {
    let m = read_matrix(run, file)?;
    run.manifest.budget = budget;
    run.manifest.option("kind", format!("{kind:?}").to_lowercase());
    match kind {
        RankKind::Tropical => match tropical_rank(&m, RankOptions { limit: None, budget }) {
            Ok(r) => {
                let mut text = format!("{}\n", r.rank);
                text.push_str(&witness_text(&r.witness.rows, &r.witness.cols));
                if let Some(level) = r.refuted_level {
                    text.push_str(&format!("every {level}x{level} minor is singular ({} evaluations)\n", r.examined));
                }
                if let Some(o) = output {
                    run.output(with_suffix(o, ".witness"), format!("tropical rank {}\n{}", r.rank, witness_text(&r.witness.rows, &r.witness.cols)));
                }
                Ok(Outcome { exit: EXIT_POSITIVE, verdict: format!("tropical rank {}", r.rank), text, report: serde_json::to_value(&r)? })
            }
            Err(TropicalError::BudgetExhausted { level, examined, rank_at_least }) => {
                let mut text = format!("partial: budget exhausted at minor size {level} after {examined} evaluations\n");
                if let Some(k) = rank_at_least {
                    text.push_str(&format!("rank >= {k}\n"));
                }
                Ok(Outcome {
                    exit: EXIT_INCONCLUSIVE,
                    verdict: "budget exhausted".to_string(),
                    text,
                    report: json!({ "partial": true, "level": level, "examined": examined, "rank_at_least": rank_at_least }),
                })
            }
            Err(e) => Err(e.into()),
        },
        RankKind::Barvinok => {
            let kmax = m.rows().min(m.cols());
            match barvinok_rank(&m, BarvinokOptions { kmax, budget }) {
                Ok(b) => {
                    let text = format!("{}\ncertified by exhaustive covering search ({} nodes)\n", b.k, b.examined);
                    if let (Some(o), Some(f)) = (output, &b.factorization) {
                        run.output(with_suffix(o, ".left.tropmat"), write_tropmat(&f.left));
                        run.output(with_suffix(o, ".right.tropmat"), write_tropmat(&f.right));
                    }
                    Ok(Outcome {
                        exit: EXIT_POSITIVE,
                        verdict: format!("barvinok rank {}", b.k),
                        text,
                        report: json!({ "rank": b.k, "examined": b.examined, "certified": true }),
                    })
                }
                Err(TropicalError::BudgetExhausted { level, examined, .. }) => Ok(Outcome {
                    exit: EXIT_INCONCLUSIVE,
                    verdict: "budget exhausted".to_string(),
                    text: format!("partial: budget exhausted at k = {level} after {examined} nodes\nrank <= {kmax}\n"),
                    report: json!({ "partial": true, "level": level, "examined": examined, "rank_at_most": kmax }),
                }),
                Err(e) => Err(e.into()),
            }
        }
        RankKind::Bounds => {
            let mut options = BoundsOptions { budget, realize: None };
            if let Some(field) = realize {
                let field = RealizeField::parse(field).ok_or_else(|| anyhow!("unknown field `{field}`"))?;
                run.manifest.option("realize", field.tag());
                let seed = run.seed();
                options.realize = Some((field, RealizeOptions { seed, ..RealizeOptions::default() }));
            }
            let b = kapranov_bounds(&m, &options)?;
            let mut text = format!("lower {} upper {}{}\n", b.lower.value, b.upper.value, if b.tight { " tight" } else { "" });
            text.push_str(&format!("lower bound from {}{}\n", b.lower.source, if b.lower.exhausted { " (search out of budget)" } else { "" }));
            text.push_str(&format!("upper bound from {}{}\n", b.upper.source, if b.upper.exhausted { " (search out of budget)" } else { "" }));
            if let Some((field, verdict)) = &b.realizability {
                text.push_str(&format!("rank-3 configuration over {}: {}\n", field.tag(), verdict.kind()));
            }
            let exit = if b.lower.exhausted || b.upper.exhausted { EXIT_INCONCLUSIVE } else { EXIT_POSITIVE };
            Ok(Outcome {
                exit,
                verdict: format!("lower {} upper {}", b.lower.value, b.upper.value),
                text,
                report: json!({
                    "lower": b.lower.value,
                    "lower_source": b.lower.source.to_string(),
                    "upper": b.upper.value,
                    "upper_source": b.upper.source.to_string(),
                    "tight": b.tight,
                    "partial": exit == EXIT_INCONCLUSIVE,
                    "realizability": b.realizability.as_ref().map(|(f, v)| json!({ "field": f.tag(), "verdict": v.kind() })),
                }),
            })
        }
    }
}

fn cmd_gen_plane(run: &mut Run, order: u32, weights: Weights, output: Option<&Path>) -> Result<Outcome> {
    run.manifest.option("order", order);
    run.manifest.option("weights", format!("{weights:?}").to_lowercase());
    let plane = ProjectivePlane::new(order)?;
    let scheme = match weights {
        Weights::Unit => WeightScheme::Unit,
        Weights::Random => WeightScheme::random(run.seed()),
    };
    let matrix = write_tropmat(&plane.incidence_matrix(scheme)?);
    let n = plane.size();
    let summary = format!("# plane of order {order}: {n} points, {n} lines, {} incidences\n", plane.incidence_count());
    let text = match output {
        Some(o) => {
            run.output(with_suffix(o, ".tropmat"), matrix);
            run.output(with_suffix(o, ".plane"), plane.sidecar());
            summary
        }
        None => summary + &matrix,
    };
    Ok(Outcome {
        exit: EXIT_POSITIVE,
        verdict: format!("{n}x{n} plane matrix"),
        text,
        report: json!({ "order": order, "size": n, "incidences": plane.incidence_count() }),
    })
}

fn cmd_reduce(run: &mut Run, cnf: Option<&Path>, polys: Option<&Path>, harden: Switch, output: Option<&Path>) -> Result<Outcome> {
    let sys = match (cnf, polys) {
        (Some(path), None) => {
            let text = run.input(path)?;
            run.manifest.option("input", "cnf");
            let cnf = parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))?;
            cnf_to_polys(&cnf)?
        }
        (None, Some(path)) => {
            let text = run.input(path)?;
            run.manifest.option("input", "polys");
            parse_poly_system(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        _ => bail!("give exactly one of --cnf and --polys"),
    };
    run.manifest.option("harden", format!("{harden:?}").to_lowercase());
    let seed = run.seed();
    let compiled = reduce(&sys, seed, harden == Switch::On)?;
    let (rows, cols) = (compiled.pattern.rows(), compiled.pattern.cols());
    let ones = compiled.pattern.count_ones();
    let unsatisfiable = sys.equations.iter().any(|f| f.is_constant() && !f.is_zero());
    let mut summary = format!("# {} pattern: {rows} points, {cols} lines, {ones} incidences\n", compiled.label());
    if unsatisfiable {
        summary.push_str("# the system contains the equation 1 = 0\n");
    }
    let matrix = write_tropmat(&compiled.pattern.to_matrix());
    let text = match output {
        Some(o) => {
            run.output(with_suffix(o, ".tropmat"), matrix);
            run.output(with_suffix(o, ".prov"), write_provenance(&compiled));
            summary
        }
        None => summary + &matrix,
    };
    Ok(Outcome {
        exit: EXIT_POSITIVE,
        verdict: format!("{} pattern {rows}x{cols}", compiled.label()),
        text,
        report: json!({
            "label": compiled.label(),
            "rows": rows,
            "cols": cols,
            "incidences": ones,
            "asserted": compiled.asserted.len(),
            "contains_one_equals_zero": unsatisfiable,
        }),
    })
}

fn read_pattern(run: &mut Run, path: &Path) -> Result<IncidencePattern> {
    let m = read_matrix(run, path)?;
    IncidencePattern::from_matrix(&m).with_context(|| format!("{} is not a (0,1) pattern", path.display()))
}

fn cmd_realize(
    run: &mut Run,
    pattern: &Path,
    field: &str,
    budget: Option<u64>,
    restarts: Option<usize>,
    output: Option<&Path>,
) -> Result<Outcome> {
    let p = read_pattern(run, pattern)?;
    let field = RealizeField::parse(field).ok_or_else(|| anyhow!("unknown field `{field}`"))?;
    run.manifest.option("field", field.tag());
    let mut options = RealizeOptions { seed: run.seed(), ..RealizeOptions::default() };
    if let Some(b) = budget {
        options.budget = b;
    }
    if let Some(r) = restarts {
        options.restarts = r;
        run.manifest.option("restarts", r);
    }
    run.manifest.budget = Some(options.budget);
    let verdict = troprank::lifting::realize_rank3(&p, field, &options);
    let (exit, file, suffix) = match &verdict {
        RealizabilityVerdict::Realized(c) => (EXIT_POSITIVE, write_configuration(c), ".cert"),
        RealizabilityVerdict::ProvedInfeasible(trace) => {
            (EXIT_NEGATIVE, format!("infeasible over {}\n{}\n", field.tag(), trace.join("\n")), ".trace")
        }
        RealizabilityVerdict::Unknown(why) => (EXIT_INCONCLUSIVE, format!("unknown over {}\n{why}\n", field.tag()), ".trace"),
    };
    let mut text = format!("{} over {}\n", verdict.kind(), field.tag());
    match output {
        Some(o) => run.output(with_suffix(o, suffix), file.clone()),
        // traces already open with the verdict line
        None if suffix == ".trace" => text = file.clone(),
        None => text.push_str(&file),
    }
    let report = match &verdict {
        RealizabilityVerdict::Realized(_) => json!({ "verdict": "realized", "field": field.tag(), "certificate": file }),
        RealizabilityVerdict::ProvedInfeasible(trace) => json!({ "verdict": "infeasible", "field": field.tag(), "trace": trace }),
        RealizabilityVerdict::Unknown(why) => json!({ "verdict": "unknown", "field": field.tag(), "reason": why }),
    };
    Ok(Outcome { exit, verdict: format!("{} over {}", verdict.kind(), field.tag()), text, report })
}

fn cmd_verify_lift(run: &mut Run, matrix: &Path, lift: &Path, rank: usize, output: Option<&Path>) -> Result<Outcome> {
    let m = read_matrix(run, matrix)?;
    let text = run.input(lift)?;
    let l = parse_troplift(&text).with_context(|| format!("parsing {}", lift.display()))?;
    run.manifest.option("rank", rank);
    let verdict = verify_lift(&m, &l, rank)?;
    let (exit, line, report) = match &verdict {
        LiftVerdict::Accepted { rank: r, truncation_limited, precision_limited } => {
            let mut line = format!("accept: lift has rank {r} <= {rank}\n");
            if *truncation_limited {
                line.push_str("note: some valuations are confirmed only up to the truncation order\n");
            }
            if *precision_limited {
                line.push_str("note: some pivots were chosen next to truncated zeros\n");
            }
            let report = json!({ "verdict": "accept", "rank": r, "truncation_limited": truncation_limited, "precision_limited": precision_limited });
            (EXIT_POSITIVE, line, report)
        }
        LiftVerdict::Rejected(reason) => (EXIT_NEGATIVE, format!("reject: {reason}\n"), json!({ "verdict": "reject", "reason": reason.to_string() })),
    };
    if let Some(o) = output {
        run.output(with_suffix(o, ".report"), line.clone());
    }
    Ok(Outcome { exit, verdict: line.lines().next().unwrap_or_default().to_string(), text: line, report })
}
