//! Command-line front end: named verification pipelines plus ad hoc
//! queries, JSON report output, witness re-verification and an a_p cache.
//!
//! Exit codes: 0 all checks pass, 1 some check fails, 2 no failures but a
//! required check stays inconclusive, 64 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use brauerkit::arith::{self, Place};
use brauerkit::cohomology;
use brauerkit::ec::{self, ApCache, WeierstrassCurve};
use brauerkit::local::{self, DiagonalForm};
use brauerkit::pipelines::{
    self, CohomologyParams, SurfaceParams, ThreefoldPadicParams, ThreefoldRealParams,
};
use brauerkit::rational::Rational;
use brauerkit::report::Report;

const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "brauerkit",
    about = "Verification pipelines for local-global arithmetic: Hilbert symbols, quadratic form isotropy, function-field residues, group cohomology and elliptic curve certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonFlags {
    /// Write the JSON report to this path.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Prime scan bound (witnesses, divisibility, integrality).
    #[arg(long, value_name = "N")]
    prime_bound: Option<u64>,
    /// Height bound of rational point searches.
    #[arg(long, value_name = "N")]
    height_bound: Option<u64>,
    /// Group order cap for cohomology computations.
    #[arg(long, value_name = "N")]
    coh_cap: Option<usize>,
    /// Re-verify every passing witness through the library before exit.
    #[arg(long)]
    recheck: bool,
    /// Trace cache file (defaults to the BRAUERKIT_CACHE variable).
    #[arg(long, value_name = "PATH")]
    cache: Option<PathBuf>,
    /// key = value configuration file overriding the defaults.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Quadric bundle threefold over a real field: local solubility suite.
    ThreefoldReal {
        #[command(flatten)]
        flags: CommonFlags,
        /// Coefficient n of the deformation term.
        #[arg(long, default_value_t = 7)]
        n: i64,
        /// Rank-3 base form coefficients, comma separated.
        #[arg(long, default_value = "1,1,1")]
        form: String,
    },
    /// Conic-in-a-quadric threefold over a p-adic pair of primes.
    ThreefoldPadic {
        #[command(flatten)]
        flags: CommonFlags,
        #[arg(long, default_value_t = 5)]
        p1: u64,
        #[arg(long, default_value_t = 17)]
        p2: u64,
        /// Discriminant of the gluing quadratic field.
        #[arg(long, default_value_t = -1)]
        field_disc: i64,
    },
    /// Conic bundle surface over the conductor-67 elliptic curve.
    Surface {
        #[command(flatten)]
        flags: CommonFlags,
        /// Discriminant of the real quadratic base field.
        #[arg(long, default_value_t = 10)]
        c: i64,
        /// Twist discriminant giving the biquadratic point field.
        #[arg(long, default_value_t = 2)]
        d: i64,
    },
    /// Fixed points and first cohomology of the finite matrix groups.
    Cohomology {
        #[command(flatten)]
        flags: CommonFlags,
        #[arg(long, default_value_t = 16)]
        max_n: u64,
        #[arg(long, default_value_t = 3)]
        max_r: u32,
    },
    /// Hilbert symbol table of (a, b) over the relevant places.
    Hilbert {
        a: String,
        b: String,
    },
    /// Isotropy of a diagonal form, globally or at one place.
    Isotropic {
        /// Coefficients, comma separated.
        coeffs: String,
        /// Restrict to one place: a prime or "oo".
        #[arg(long)]
        place: Option<String>,
    },
    /// First cohomology of an explicit group level.
    H1 {
        #[arg(long, default_value = "sl2plus")]
        group: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        coh_cap: Option<usize>,
    },
    /// Elliptic curve queries on a long Weierstrass model.
    Ec {
        #[command(subcommand)]
        action: EcAction,
    },
    /// Load a stored JSON report, summarize and optionally re-verify it.
    Report {
        #[arg(long, value_name = "PATH")]
        json: PathBuf,
        #[arg(long)]
        recheck: bool,
    },
}

#[derive(Subcommand)]
enum EcAction {
    /// b/c invariants, discriminant and the short model.
    Info {
        #[arg(long, default_value = "0,1,1,-12,-21")]
        curve: String,
    },
    /// Trace of Frobenius at one prime or a table up to a bound.
    Ap {
        #[arg(long, default_value = "0,1,1,-12,-21")]
        curve: String,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 100)]
        bound: u64,
        #[arg(long, value_name = "PATH")]
        cache: Option<PathBuf>,
    },
    /// Trivial-torsion certificate from reduction orders.
    Torsion {
        #[arg(long, default_value = "0,1,1,-12,-21")]
        curve: String,
        #[arg(long, default_value_t = 200)]
        prime_bound: u64,
    },
    /// Mod-l image witnesses.
    Galois {
        #[arg(long, default_value = "0,1,1,-12,-21")]
        curve: String,
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 10_000)]
        prime_bound: u64,
    },
    /// Quadratic twist model.
    Twist {
        #[arg(long, default_value = "0,1,1,-12,-21")]
        curve: String,
        #[arg(long)]
        d: i64,
    },
}

#[derive(Debug, Default, Clone)]
struct FileConfig {
    prime_bound: Option<u64>,
    height_bound: Option<u64>,
    coh_cap: Option<usize>,
    cache: Option<PathBuf>,
}

fn read_config(path: &PathBuf) -> Result<FileConfig, String> {
    let content =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {:?}: {}", path, e))?;
    let mut cfg = FileConfig::default();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("bad config line {}: {}", i + 1, line))?;
        let (key, value) = (key.trim(), value.trim());
        let parse_u64 =
            |v: &str| -> Result<u64, String> { v.parse().map_err(|_| format!("bad value {}", v)) };
        match key {
            "prime_bound" => cfg.prime_bound = Some(parse_u64(value)?),
            "height_bound" => cfg.height_bound = Some(parse_u64(value)?),
            "coh_cap" => cfg.coh_cap = Some(parse_u64(value)? as usize),
            "cache" => cfg.cache = Some(PathBuf::from(value)),
            other => return Err(format!("unknown config key: {}", other)),
        }
    }
    Ok(cfg)
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|_| format!("not a rational: {}", s))
}

fn parse_form_arg(s: &str) -> Result<DiagonalForm, String> {
    let coeffs: Result<Vec<Rational>, String> =
        s.split(',').map(|t| parse_rational(t.trim())).collect();
    let coeffs = coeffs?;
    if coeffs.is_empty() || coeffs.iter().any(|c| c.is_zero()) {
        return Err("form coefficients must be nonzero".into());
    }
    Ok(DiagonalForm::new(coeffs))
}

fn parse_curve_arg(s: &str) -> Result<WeierstrassCurve, String> {
    let parts: Result<Vec<Rational>, String> =
        s.split(',').map(|t| parse_rational(t.trim())).collect();
    let parts = parts?;
    if parts.len() != 5 {
        return Err("curve needs exactly five coefficients a1,a2,a3,a4,a6".into());
    }
    WeierstrassCurve::new(
        parts[0].clone(),
        parts[1].clone(),
        parts[2].clone(),
        parts[3].clone(),
        parts[4].clone(),
    )
    .map_err(|e| e.to_string())
}

fn parse_place_arg(s: &str) -> Result<Place, String> {
    if s == "oo" || s == "inf" || s == "real" {
        return Ok(Place::Real);
    }
    let p: BigInt = s.parse().map_err(|_| format!("not a place: {}", s))?;
    Place::finite(p).map_err(|e| e.to_string())
}

fn open_cache(flags: &CommonFlags, cfg: &FileConfig) -> Result<Option<ApCache>, String> {
    let path = flags
        .cache
        .clone()
        .or_else(|| cfg.cache.clone())
        .or_else(|| std::env::var_os("BRAUERKIT_CACHE").map(PathBuf::from));
    match path {
        Some(p) => ApCache::open(&p).map(Some).map_err(|e| e.to_string()),
        None => Ok(None),
    }
}

/// Emits the report: a summary table on stdout and optionally the JSON
/// file; returns the process exit code.
fn finish_report(report: &Report, flags: &CommonFlags) -> Result<u8, String> {
    for c in &report.checks {
        let status = match c.status {
            brauerkit::report::Status::Pass => "pass",
            brauerkit::report::Status::Fail => "FAIL",
            brauerkit::report::Status::Inconclusive => "inconclusive",
        };
        let class = if c.required { "REQUIRED" } else { "BOUNDED" };
        println!("{:<22} {:<12} {:<8} {}", c.check_id, status, class, c.statement);
    }
    println!(
        "overall: {}",
        match report.overall {
            brauerkit::report::Verdict::Pass => "pass",
            brauerkit::report::Verdict::Fail => "fail",
            brauerkit::report::Verdict::Inconclusive => "inconclusive (required check unresolved)",
        }
    );
    if let Some(path) = &flags.json {
        std::fs::write(path, report.to_json())
            .map_err(|e| format!("cannot write {:?}: {}", path, e))?;
        println!("report written to {}", path.display());
    }
    if flags.recheck {
        let results = pipelines::recheck_report(report);
        let bad: Vec<&String> = results
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(id, _)| id)
            .collect();
        if bad.is_empty() {
            println!("recheck: all passing witnesses re-verified");
        } else {
            println!("recheck: FAILED for {:?}", bad);
            return Ok(1);
        }
    }
    Ok(report.exit_code() as u8)
}

fn run() -> Result<u8, String> {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap help/version print to stdout with success
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion
            {
                print!("{}", e);
                return Ok(0);
            }
            eprint!("{}", e);
            return Ok(EXIT_USAGE);
        }
    };

    match cli.command {
        Command::ThreefoldReal { flags, n, form } => {
            let cfg = flags
                .config
                .as_ref()
                .map(read_config)
                .transpose()?
                .unwrap_or_default();
            let _ = cfg;
            let q_form: Result<Vec<i64>, String> = form
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| format!("bad form: {}", form)))
                .collect();
            let params = ThreefoldRealParams {
                n,
                q_form: q_form?,
                a: Rational::one(),
            };
            let report =
                pipelines::pipeline_threefold_real(&params).map_err(|e| e.to_string())?;
            finish_report(&report, &flags)
        }
        Command::ThreefoldPadic {
            flags,
            p1,
            p2,
            field_disc,
        } => {
            let params = ThreefoldPadicParams { p1, p2, field_disc };
            let report =
                pipelines::pipeline_threefold_padic(&params).map_err(|e| e.to_string())?;
            finish_report(&report, &flags)
        }
        Command::Surface { flags, c, d } => {
            let cfg = flags
                .config
                .as_ref()
                .map(read_config)
                .transpose()?
                .unwrap_or_default();
            let defaults = SurfaceParams::default();
            let params = SurfaceParams {
                c,
                d,
                prime_bound: flags
                    .prime_bound
                    .or(cfg.prime_bound)
                    .unwrap_or(defaults.prime_bound),
                height_bound: flags
                    .height_bound
                    .or(cfg.height_bound)
                    .unwrap_or(defaults.height_bound),
                ..defaults
            };
            let mut cache = open_cache(&flags, &cfg)?;
            let report = pipelines::pipeline_surface(&params, cache.as_mut())
                .map_err(|e| e.to_string())?;
            finish_report(&report, &flags)
        }
        Command::Cohomology { flags, max_n, max_r } => {
            let cfg = flags
                .config
                .as_ref()
                .map(read_config)
                .transpose()?
                .unwrap_or_default();
            let params = CohomologyParams {
                max_n,
                max_r,
                cap: flags
                    .coh_cap
                    .or(cfg.coh_cap)
                    .unwrap_or(cohomology::DEFAULT_GROUP_CAP),
            };
            let report = pipelines::pipeline_cohomology(&params).map_err(|e| e.to_string())?;
            finish_report(&report, &flags)
        }
        Command::Hilbert { a, b } => {
            let a = parse_rational(&a)?;
            let b = parse_rational(&b)?;
            let mut places: Vec<Place> = vec![Place::finite_u64(2)];
            for x in [&a, &b] {
                for part in [x.numer().clone(), x.denom().clone()] {
                    if let Ok(f) = arith::factorize(&part) {
                        for (p, _) in f.factors {
                            let pl = Place::Finite(p);
                            if !places.contains(&pl) {
                                places.push(pl);
                            }
                        }
                    }
                }
            }
            places.push(Place::Real);
            places.sort();
            println!("(a, b) = ({}, {})", a, b);
            for v in &places {
                println!("  ({}, {})_{} = {:+}", a, b, v, local::hilbert_symbol(&a, &b, v));
            }
            Ok(0)
        }
        Command::Isotropic { coeffs, place } => {
            let form = parse_form_arg(&coeffs)?;
            match place {
                Some(p) => {
                    let v = parse_place_arg(&p)?;
                    let iso = local::is_isotropic_local(&form, &v);
                    println!(
                        "{} is {} at {}",
                        form,
                        if iso { "isotropic" } else { "anisotropic" },
                        v
                    );
                }
                None => {
                    let places = local::anisotropic_places(&form).map_err(|e| e.to_string())?;
                    if places.is_empty() {
                        println!("{} is isotropic at every place (isotropic over Q)", form);
                    } else {
                        let names: Vec<String> =
                            places.iter().map(|p| p.to_string()).collect();
                        println!("{} is anisotropic exactly at {{{}}}", form, names.join(", "));
                    }
                }
            }
            Ok(0)
        }
        Command::H1 { group, n, coh_cap } => {
            let cap = coh_cap.unwrap_or(cohomology::DEFAULT_GROUP_CAP);
            let g = match group.as_str() {
                "sl2" => cohomology::sl2(n, cap),
                "sl2plus" => cohomology::sl2_plus(n, cap),
                "gl2" => cohomology::gl2(n, cap),
                other => return Err(format!("unknown group family: {}", other)),
            }
            .map_err(|e| e.to_string())?;
            let h = cohomology::h1(&g).map_err(|e| e.to_string())?;
            println!("group {} mod {}: order {}", group, n, g.order());
            if h.is_trivial() {
                println!("H^1 = 0");
            } else {
                println!(
                    "H^1 invariant factors {:?}, exponent {}",
                    h.invariant_factors, h.exponent
                );
            }
            Ok(0)
        }
        Command::Ec { action } => run_ec(action),
        Command::Report { json, recheck } => {
            let content = std::fs::read_to_string(&json)
                .map_err(|e| format!("cannot read {:?}: {}", json, e))?;
            let report = Report::from_json(&content).map_err(|e| e.to_string())?;
            let flags = CommonFlags {
                recheck,
                ..Default::default()
            };
            finish_report(&report, &flags)
        }
    }
}

fn run_ec(action: EcAction) -> Result<u8, String> {
    match action {
        EcAction::Info { curve } => {
            let e = parse_curve_arg(&curve)?;
            let inv = e.invariants();
            let s = e.short_model();
            println!("curve: {}", e);
            println!(
                "b2 = {}, b4 = {}, b6 = {}, b8 = {}",
                inv.b2, inv.b4, inv.b6, inv.b8
            );
            println!("c4 = {}, c6 = {}, disc = {}", inv.c4, inv.c6, inv.disc);
            println!("short model: y^2 = x^3 + ({}) x + ({})", s.p, s.q);
            println!("short disc: {}", s.discriminant());
            Ok(0)
        }
        EcAction::Ap {
            curve,
            p,
            bound,
            cache,
        } => {
            let e = parse_curve_arg(&curve)?;
            match p {
                Some(p) => {
                    let (order, ap) =
                        ec::count_points_mod_p(&e, p).map_err(|er| er.to_string())?;
                    println!("p = {}: order {} a_p = {}", p, order, ap);
                }
                None => {
                    let mut cache_handle = match cache {
                        Some(path) => Some(ApCache::open(&path).map_err(|e| e.to_string())?),
                        None => None,
                    };
                    let recs = ec::trace_scan_cached(&e, bound, cache_handle.as_mut())
                        .map_err(|er| er.to_string())?;
                    for r in recs {
                        println!("p = {:<6} order {:<7} a_p = {}", r.p, r.order, r.ap);
                    }
                    if let Some(mut c) = cache_handle {
                        c.flush().map_err(|e| e.to_string())?;
                    }
                }
            }
            Ok(0)
        }
        EcAction::Torsion { curve, prime_bound } => {
            let e = parse_curve_arg(&curve)?;
            match ec::torsion_trivial_certificate(&e, prime_bound) {
                Ok(cert) => {
                    println!("torsion-free certificate: {:?}", cert.prime_orders);
                    println!("verified: {}", cert.verify(&e));
                    Ok(0)
                }
                Err(ec::EcError::Inconclusive { bound, what }) => {
                    println!("inconclusive: no {} below {}", what, bound);
                    Ok(2)
                }
                Err(e) => Err(e.to_string()),
            }
        }
        EcAction::Galois {
            curve,
            ell,
            prime_bound,
        } => {
            let e = parse_curve_arg(&curve)?;
            if ell == 2 {
                let full = ec::mod2_image_full(&e).map_err(|er| er.to_string())?;
                println!(
                    "mod-2 image: {}",
                    if full {
                        "full (irreducible cubic, nonsquare discriminant)"
                    } else {
                        "not full"
                    }
                );
                return Ok(if full { 0 } else { 2 });
            }
            let rep = ec::mod_l_surjectivity_witnesses(&e, ell, prime_bound)
                .map_err(|er| er.to_string())?;
            println!(
                "l = {}: verdict {:?} (w1 = {:?}, w2 = {:?}, w3 = {:?})",
                rep.ell, rep.verdict, rep.w1, rep.w2, rep.w3
            );
            Ok(match rep.verdict {
                ec::SurjectivityVerdict::SurjectiveCertified => 0,
                ec::SurjectivityVerdict::Inconclusive => 2,
            })
        }
        EcAction::Twist { curve, d } => {
            let e = parse_curve_arg(&curve)?;
            let t = e
                .quadratic_twist(&BigInt::from(d))
                .map_err(|er| er.to_string())?;
            println!("twist by {}: {}", d, t);
            println!("disc = {}", t.discriminant());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(EXIT_USAGE)
        }
    }
}
