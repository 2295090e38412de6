//! The `selfpolar` command line.
//!
//! Every subcommand prints its effective configuration as a `# config:` line first, then its
//! results. Exact values are printed as `p/q (float)`. Artifacts go to the path given on the
//! command line or, failing that, to the output directory (`--out-dir`, then
//! `$SELFPOLAR_OUT_DIR`, then the current directory).

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use selfpolar_core::exact::display_with_float;
use selfpolar_core::experiments::report::{batch_csv, volume_histogram_svg, write_clique_report};
use selfpolar_core::experiments::{self, SequenceKind};
use selfpolar_core::geometry::io::{read_polytope, write_atomic, write_polytope};
use selfpolar_core::suspension::power_suspend_filename;
use selfpolar_core::{
    c_j, check_subset_sympolar, ehz_brute_force, equal_weight_certificate, evaluate_certificate,
    f_vector, induction_certificate, is_self_polar, make_suspension_certificate, power_suspend,
    shadow_area, suspend_halfspaces, suspend_vertices, symplectic_polar, volume,
    volume_closed_form, CapacityCertificate, EhzOptions, Polytope, Rational,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Suspension chains beyond this index need hulls in dimension 8 and are not attempted.
const CHAIN_LIMIT: usize = 3;

pub const OUT_DIR_ENV: &str = "SELFPOLAR_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "selfpolar", version, about = "Exact computations on symplectically self-polar polytopes")]
pub struct Cli {
    /// Worker threads (0 = one per core). Results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Default directory for artifacts not given an explicit path.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the n-fold suspension of the hexagon and write it as JSON.
    PowerSuspend {
        n: usize,
        /// Output file [default: <out-dir>/p_ltimes_<n>.json].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Suspend a self-polar polytope over the hexagon.
    Suspend {
        file: PathBuf,
        /// Construction to use; both give the same polytope.
        #[arg(long, value_enum, default_value_t = Route::Vertices)]
        route: Route,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the symplectic polar J·K°.
    Sympolar {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a polytope equals its symplectic polar.
    SelfpolarCheck { file: PathBuf },
    /// Exact volume, optionally with the f-vector.
    Volume {
        file: PathBuf,
        #[arg(long)]
        f_vector: bool,
    },
    /// Ekeland–Hofer–Zehnder capacity by exhaustive search, with a certificate.
    Ehz {
        file: PathBuf,
        /// Generators: facet normals of K, or half the vertices (self-polar input only).
        #[arg(long, value_enum, default_value_t = Mode::Facets)]
        mode: Mode,
        /// Largest support size [default: all supports when that is at most 10^7
        /// configurations, otherwise min(m, dim + 1), which is flagged as heuristic].
        #[arg(long)]
        support_bound: Option<usize>,
        /// Maximum number of configurations to examine.
        #[arg(long, default_value_t = 200_000_000)]
        budget: u128,
        /// Skip the floating-point screening pass.
        #[arg(long)]
        exact_only: bool,
        /// Certificate output [default: <out-dir>/<stem>.ehz.json].
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Cylindrical capacity bound from the identity projection.
    Cj { file: PathBuf },
    /// Area of the projection to the first symplectic plane.
    Shadow { file: PathBuf },
    /// Random self-polar polytopes by repeated expansion.
    Generate(GenerateArgs),
    /// Self-polar polytopes with vertices in {-1, 0, 1}^dim, grouped by (vertices, volume).
    EnumeratePm1 {
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// Clique budget; required for dim 6.
        #[arg(long)]
        budget: Option<usize>,
        /// Write classes.json and class representatives here.
        #[arg(long)]
        report_dir: Option<PathBuf>,
    },
    /// Exact monotonicity and asymptotics of the comparison sequences.
    Sequences {
        #[arg(long, value_enum, default_value_t = SequenceChoice::Both)]
        kind: SequenceChoice,
        /// Largest index checked exactly.
        #[arg(long, default_value_t = 1000)]
        max_n: usize,
        /// Number of leading terms to print.
        #[arg(long, default_value_t = 4)]
        show: usize,
    },
    /// The (vertices, volume) classes of {-1, 0, 1}^4 self-polar polytopes.
    Table1,
    /// Capacity certificates for the suspension family, or verify a certificate file.
    Certify {
        /// Build and check certificates for n = 1..=N.
        n: Option<usize>,
        /// Polytope to verify against (with --cert).
        #[arg(long, requires = "cert")]
        polytope: Option<PathBuf>,
        /// Certificate to verify (with --polytope).
        #[arg(long, requires = "polytope")]
        cert: Option<PathBuf>,
        /// Write the generated certificates to <out-dir>.
        #[arg(long)]
        write: bool,
    },
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    /// Initial random points.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Seed of the first run; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = experiments::generate::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// CSV output [default: <out-dir>/generate_d<dim>_k<k>.csv].
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write a volume histogram (needs at least two runs).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Write each final polytope as JSON into this directory.
    #[arg(long)]
    pub json_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Route {
    Vertices,
    Halfspaces,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    Facets,
    Vertices,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SequenceChoice {
    Compare,
    Viterbo,
    Both,
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut out = std::io::stdout();
    match run_with(&cli, &mut out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error: malformed input, exhausted budget, or anything else.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    use selfpolar_core::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::Parse(_) | E::Json(_)) => EXIT_MALFORMED,
        Some(E::Budget { .. }) => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

pub fn run_with(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<()> {
    writeln!(out, "# config: {cli:?}")?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .context("building thread pool")?;
    pool.install(|| dispatch(cli, out))
}

fn load(path: &Path) -> Result<Polytope> {
    read_polytope(path).with_context(|| format!("reading {}", path.display()))
}

fn save(path: &Path, p: &Polytope, out: &mut (dyn Write + Send)) -> Result<()> {
    write_polytope(path, p).with_context(|| format!("writing {}", path.display()))?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn describe(p: &Polytope, out: &mut (dyn Write + Send)) -> Result<()> {
    writeln!(out, "dim {}", p.dim())?;
    writeln!(out, "vertices {}", p.vertex_count())?;
    writeln!(out, "facets {}", p.facets().len())?;
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "polytope".into())
}

fn dispatch(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<()> {
    let dir = &cli.out_dir;
    match &cli.command {
        Command::PowerSuspend { n, out: path } => {
            let p = power_suspend(*n)?;
            describe(&p, out)?;
            let path = path.clone().unwrap_or_else(|| dir.join(power_suspend_filename(*n)));
            save(&path, &p, out)?;
        }
        Command::Suspend { file, route, out: path } => {
            let x = load(file)?;
            let s = match route {
                Route::Vertices => suspend_vertices(&x)?,
                Route::Halfspaces => suspend_halfspaces(&x)?,
            };
            describe(&s, out)?;
            let path = path
                .clone()
                .unwrap_or_else(|| dir.join(format!("{}_suspended.json", stem(file))));
            save(&path, &s, out)?;
        }
        Command::Sympolar { file, out: path } => {
            let k = load(file)?;
            let polar = symplectic_polar(&k)?;
            describe(&polar, out)?;
            writeln!(out, "equal to input {}", polar == k)?;
            let path = path
                .clone()
                .unwrap_or_else(|| dir.join(format!("{}_sympolar.json", stem(file))));
            save(&path, &polar, out)?;
        }
        Command::SelfpolarCheck { file } => {
            let k = load(file)?;
            let inside = check_subset_sympolar(&k)?;
            writeln!(out, "K in K^w {}", inside.holds)?;
            if let Some((v, w, value)) = &inside.witness {
                writeln!(out, "witness w({v}, {w}) = {}", display_with_float(value))?;
            }
            writeln!(out, "self-polar {}", is_self_polar(&k)?)?;
        }
        Command::Volume { file, f_vector: fv } => {
            let k = load(file)?;
            writeln!(out, "volume {}", display_with_float(&volume(&k)?))?;
            if *fv {
                let f = f_vector(&k);
                let parts: Vec<String> = f.iter().map(ToString::to_string).collect();
                writeln!(out, "f-vector ({})", parts.join(", "))?;
            }
        }
        Command::Ehz { file, mode, support_bound, budget, exact_only, cert } => {
            let k = load(file)?;
            let mut opts = match mode {
                Mode::Facets => EhzOptions::default(),
                Mode::Vertices => EhzOptions::vertices(),
            };
            opts.support_bound = *support_bound;
            opts.budget = *budget;
            if *exact_only {
                opts = opts.exact_only();
            }
            let r = ehz_brute_force(&k, &opts)?;
            writeln!(out, "c_EHZ {}", display_with_float(&r.capacity))?;
            writeln!(
                out,
                "generators {} support-bound {} configurations {} exact-solves {} singular {}",
                r.stats.generators,
                r.stats.support_bound,
                r.stats.configurations,
                r.stats.exact_solves,
                r.stats.singular_skipped
            )?;
            if r.stats.heuristic_bound {
                writeln!(
                    out,
                    "WARNING: supports were limited to {} of {} generators; the value is an upper bound",
                    r.stats.support_bound, r.stats.generators
                )?;
            }
            let path = cert
                .clone()
                .unwrap_or_else(|| dir.join(format!("{}.ehz.json", stem(file))));
            write_atomic(&path, &r.certificate.to_json())?;
            writeln!(out, "wrote {}", path.display())?;
        }
        Command::Cj { file } => {
            writeln!(out, "c_J {}", display_with_float(&c_j(&load(file)?)?))?;
        }
        Command::Shadow { file } => {
            writeln!(out, "shadow {}", display_with_float(&shadow_area(&load(file)?)?))?;
        }
        Command::Generate(args) => generate(args, dir, out)?,
        Command::EnumeratePm1 { dim, budget, report_dir } => {
            let rep = experiments::enumerate_pm1(*dim, *budget)?;
            writeln!(
                out,
                "cliques {} self-polar {} rejected {} degenerate {} partial {}",
                rep.cliques, rep.self_polar, rep.rejected, rep.degenerate, rep.partial
            )?;
            print_classes(&rep, out)?;
            if let Some(d) = report_dir {
                let path = write_clique_report(&rep, d)?;
                writeln!(out, "wrote {}", path.display())?;
            }
        }
        Command::Sequences { kind, max_n, show } => {
            let kinds: &[SequenceKind] = match kind {
                SequenceChoice::Compare => &[SequenceKind::Compare],
                SequenceChoice::Viterbo => &[SequenceKind::Viterbo],
                SequenceChoice::Both => &[SequenceKind::Compare, SequenceKind::Viterbo],
            };
            let mut failed = Vec::new();
            for &k in kinds {
                sequence_report(k, *max_n, *show, out)?;
                if !experiments::monotonicity_check(k, *max_n)?.passed() {
                    failed.push(k.name());
                }
            }
            if !failed.is_empty() {
                anyhow::bail!("sequence checks failed: {}", failed.join(", "));
            }
        }
        Command::Table1 => {
            let rep = experiments::enumerate_pm1(4, None)?;
            writeln!(out, "vertices\tvolume\tcount")?;
            for c in &rep.classes {
                writeln!(out, "{}\t{}\t{}", c.vertex_count, display_with_float(&c.volume), c.count)?;
            }
            if rep.rejected > 0 {
                anyhow::bail!("{} maximal cliques were not self-polar", rep.rejected);
            }
        }
        Command::Certify { n, polytope, cert, write } => {
            if let (Some(p), Some(c)) = (polytope, cert) {
                let k = load(p)?;
                let text = std::fs::read_to_string(c)
                    .with_context(|| format!("reading {}", c.display()))?;
                let certificate = CapacityCertificate::from_json(&text)?;
                let obj = evaluate_certificate(&k, &certificate)?;
                writeln!(out, "objective {}", display_with_float(&obj))?;
                if let Some(b) = certificate.capacity_bound() {
                    writeln!(out, "c_EHZ <= {}", display_with_float(&b))?;
                }
            }
            if let Some(n) = n {
                certify_family(*n, write.then_some(dir.as_path()), out)?;
            } else if polytope.is_none() {
                anyhow::bail!("certify needs N or --polytope with --cert");
            }
        }
    }
    Ok(())
}

fn print_classes(rep: &experiments::EnumerationReport, out: &mut (dyn Write + Send)) -> Result<()> {
    for c in &rep.classes {
        writeln!(
            out,
            "class vertices {} volume {} count {}",
            c.vertex_count,
            display_with_float(&c.volume),
            c.count
        )?;
    }
    Ok(())
}

fn generate(args: &GenerateArgs, dir: &Path, out: &mut (dyn Write + Send)) -> Result<()> {
    let records =
        experiments::batch_generate(args.dim, args.k, args.runs, args.seed, args.max_iter)?;
    let csv_path = args
        .csv
        .clone()
        .unwrap_or_else(|| dir.join(format!("generate_d{}_k{}.csv", args.dim, args.k)));
    write_atomic(&csv_path, &batch_csv(args.k, &records)?)?;
    writeln!(out, "wrote {}", csv_path.display())?;
    for (seed, r) in &records {
        if let Err(e) = r {
            writeln!(out, "seed {seed} failed: {e}")?;
        }
    }
    let summary = experiments::summarize(&records);
    writeln!(
        out,
        "runs {} self-polar {} failed {}",
        summary.runs, summary.self_polar_runs, summary.failed_runs
    )?;
    if let Some(v) = &summary.min_volume {
        writeln!(out, "min volume {}", display_with_float(v))?;
        let reference = volume_closed_form(args.dim / 2);
        if *v < reference {
            writeln!(
                out,
                "WARNING: minimum volume is below the suspension family value {}",
                display_with_float(&reference)
            )?;
        }
    }
    if let Some(v) = &summary.mean_volume {
        writeln!(out, "mean volume {}", display_with_float(v))?;
    }
    if let Some(c) = summary.min_vertex_count {
        writeln!(out, "min vertex count {c}")?;
    }
    if let Some(svg_path) = &args.svg {
        let vols: Vec<f64> = records
            .iter()
            .filter_map(|(_, r)| r.as_ref().ok())
            .map(|r| selfpolar_core::exact::to_f64(&r.volume))
            .collect();
        let title = format!("dim {}, k = {}, {} runs", args.dim, args.k, vols.len());
        match volume_histogram_svg(&vols, &title) {
            Some(svg) => {
                write_atomic(svg_path, &svg)?;
                writeln!(out, "wrote {}", svg_path.display())?;
            }
            None => writeln!(out, "histogram skipped: fewer than two runs")?,
        }
    }
    if let Some(jd) = &args.json_dir {
        for (seed, r) in &records {
            if let Ok(r) = r {
                let path = jd.join(format!("generate_d{}_k{}_seed{seed}.json", args.dim, args.k));
                write_polytope(&path, &r.final_polytope)?;
            }
        }
        writeln!(out, "wrote polytopes to {}", jd.display())?;
    }
    Ok(())
}

fn sequence_report(kind: SequenceKind, max_n: usize, show: usize, out: &mut (dyn Write + Send)) -> Result<()> {
    let report = experiments::monotonicity_check(kind, max_n)?;
    writeln!(out, "sequence {}", kind.name())?;
    for n in 1..=show.min(max_n) {
        match kind {
            SequenceKind::Compare => {
                let a = experiments::sequence_compare(n);
                writeln!(out, "  a_{n} = {a} ({})", a.to_f64())?;
            }
            SequenceKind::Viterbo => {
                let a = experiments::sequence_viterbo_ratio(n);
                writeln!(out, "  a_{n} = {}", display_with_float(&a))?;
            }
        }
    }
    writeln!(
        out,
        "  strictly increasing through n = {}: {}",
        max_n,
        report.violations.is_empty()
    )?;
    if kind == SequenceKind::Compare {
        writeln!(
            out,
            "  ratio formula holds: {}; a_2 > a_1: {}",
            report.formula_mismatches.is_empty(),
            report.cross_parity == Some(true)
        )?;
    }
    writeln!(out, "  minimum a_{} = {}", report.minimum.0, report.minimum.1)?;
    writeln!(
        out,
        "  a_n / n^(1/4) at n = {}: {:.6} vs limit {:.6} (relative error {:.2e})",
        report.asymptotic_n,
        report.asymptotic_value,
        report.asymptotic_constant,
        report.relative_error()
    )?;
    Ok(())
}

fn certify_family(n_max: usize, dir: Option<&Path>, out: &mut (dyn Write + Send)) -> Result<()> {
    if n_max == 0 {
        anyhow::bail!("N must be at least 1");
    }
    for n in 1..=n_max {
        let ind = induction_certificate(n)?;
        ind.verify()?;
        let cert = equal_weight_certificate(n)?;
        let bound = cert.capacity_bound().context("nonpositive objective")?;
        writeln!(
            out,
            "n {n}: induction certificate of {} vectors verified; equal weights give objective {}, c_EHZ <= {}",
            ind.vertices.len(),
            display_with_float(&cert.objective),
            display_with_float(&bound)
        )?;
        if let Some(d) = dir {
            let path = d.join(format!("equal_weight_{n}.json"));
            write_atomic(&path, &cert.to_json())?;
            writeln!(out, "wrote {}", path.display())?;
        }
    }
    // Lift the hexagon certificate through successive suspensions.
    let mut k = power_suspend(1)?;
    let mut cert = equal_weight_certificate(1)?;
    let mut c: Rational = cert.capacity_bound().context("nonpositive objective")?;
    writeln!(out, "suspension chain n 1: c_EHZ <= {}", display_with_float(&c))?;
    if n_max > CHAIN_LIMIT {
        writeln!(out, "suspension chain stops at n {CHAIN_LIMIT}")?;
    }
    for n in 2..=n_max.min(CHAIN_LIMIT) {
        let (s, next) = make_suspension_certificate(&k, &cert, &c)?;
        c = next.capacity_bound().context("nonpositive objective")?;
        writeln!(out, "suspension chain n {n}: c_EHZ <= {}", display_with_float(&c))?;
        if let Some(d) = dir {
            let path = d.join(format!("suspension_{n}.json"));
            write_atomic(&path, &next.to_json())?;
            writeln!(out, "wrote {}", path.display())?;
        }
        k = s;
        cert = next;
    }
    Ok(())
}
