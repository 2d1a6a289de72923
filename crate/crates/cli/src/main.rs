//! `wpvol`: compute Weil-Petersson correlators, volumes and intersection
//! numbers from the topological recursion, and check the dilaton identities.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use wpvol::known::{reference_correlators, CLOSED_VOLUME_GENUS_2};
use wpvol::poly::{dim, is_stable, PolyJson, ShapedPoly};
use wpvol::render;
use wpvol::scalar::parse_rational;
use wpvol::transforms::{
    closed_volume, dilaton_check_v, dilaton_check_w, evaluate_volume, intersection_numbers, volume,
    volume_at, DilatonReport, IntersectionJson,
};
use wpvol::{
    Convention, CorrelatorPoly, Engine, EngineConfig, PiScalar, Rational, SpectralCurve, SymPoly,
    VolumePoly,
};

#[derive(Parser)]
#[command(
    name = "wpvol",
    version,
    about = "Weil-Petersson volumes via topological recursion"
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Directory for the persistent correlator cache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Built-in curve preset.
    #[arg(long, global = true, value_enum, default_value_t = CurveChoice::Wp, conflicts_with = "times")]
    curve: CurveChoice,
    /// JSON map from odd index to time, e.g. {"3":"3","5":"-2/3*pi^2"}.
    #[arg(long, global = true, value_name = "FILE")]
    times: Option<PathBuf>,
    /// Highest kernel coefficient s_N available to the recursion.
    #[arg(long, global = true, value_name = "N")]
    truncation: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Decimal places for numeric output.
    #[arg(long, global = true, default_value_t = 6)]
    digits: usize,
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveChoice {
    Wp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Latex,
}

#[derive(Subcommand)]
enum Command {
    /// Print W^g_n.
    Correlator { g: u32, n: usize },
    /// Print V_{g,n}, or its value at the given boundary lengths.
    Volume {
        g: u32,
        n: usize,
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        lengths: Option<Vec<String>>,
    },
    /// Print V_{g,0} for g >= 2.
    ClosedVolume { g: u32 },
    /// Print the kappa_1/psi intersection numbers of genus g with n points.
    Intersections { g: u32, n: usize },
    /// Check both dilaton identities relating (g, n) and (g, n+1).
    Check { g: u32, n: usize },
    /// Replay the published low-order correlators and V_{2,0}.
    Selftest,
}

/// Failure carrying its exit code.
struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn usage(msg: impl Into<String>) -> Self {
        Fail {
            code: 2,
            msg: msg.into(),
        }
    }

    fn identity(msg: impl Into<String>) -> Self {
        Fail {
            code: 3,
            msg: msg.into(),
        }
    }
}

impl From<wpvol::Error> for Fail {
    fn from(e: wpvol::Error) -> Self {
        Fail::usage(e.to_string())
    }
}

type CmdResult = Result<String, Fail>;

fn stable_or_fail(g: u32, n: usize) -> Result<(), Fail> {
    if is_stable(g, n) {
        Ok(())
    } else {
        Err(Fail::usage(format!(
            "(g, n) = ({g}, {n}) is unstable; need 2g - 2 + n > 0"
        )))
    }
}

fn read_times(path: &PathBuf) -> Result<SpectralCurve, Fail> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Fail::usage(format!("{}: {e}", path.display())))?;
    let raw: BTreeMap<String, PiScalar> =
        serde_json::from_str(&text).map_err(|e| Fail::usage(format!("{}: {e}", path.display())))?;
    let mut times = BTreeMap::new();
    for (k, v) in raw {
        let k: u32 = k
            .trim()
            .parse()
            .map_err(|_| Fail::usage(format!("time index {k:?} is not an integer")))?;
        times.insert(k, v);
    }
    Ok(SpectralCurve::from_times(&times)?)
}

/// Builds an engine able to reach correlators of dimension `need`.
fn engine(run: &RunArgs, need: u32) -> Result<Engine, Fail> {
    let need = need as usize;
    if let Some(t) = run.truncation {
        if t < need {
            return Err(Fail::usage(format!(
                "--truncation {t} is too short: this request needs kernel order {need}"
            )));
        }
    }
    let order = run.truncation.unwrap_or(need) + 1;
    let curve = match &run.times {
        Some(path) => {
            let c = read_times(path)?;
            if run.truncation.is_some() {
                c.truncated(order)
            } else {
                c
            }
        }
        None => match run.curve {
            CurveChoice::Wp => SpectralCurve::weil_petersson(order),
        },
    };
    let config = EngineConfig {
        threads: run.threads as usize,
        cache_dir: run.cache_dir.clone(),
        slot: 0,
    };
    Ok(Engine::new(curve, config)?)
}

fn json_text(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON value serializes")
}

fn parse_length(s: &str) -> Result<Rational, Fail> {
    let bad = || Fail::usage(format!("bad length {s:?}"));
    match s.split_once('.') {
        Some((int, frac)) => {
            let digits = format!("{int}{frac}");
            let den = format!("1{}", "0".repeat(frac.len()));
            parse_rational(&format!("{digits}/{den}")).map_err(|_| bad())
        }
        None => parse_rational(s).map_err(|_| bad()),
    }
}

fn cmd_correlator(run: &RunArgs, g: u32, n: usize) -> CmdResult {
    stable_or_fail(g, n)?;
    let w = engine(run, dim(g, n))?.correlator(g, n)?;
    Ok(match run.format {
        Format::Text => render::correlator_text(&w),
        Format::Latex => render::correlator_latex(&w),
        Format::Json => json_text(&serde_json::to_value(PolyJson::from(w.as_ref())).unwrap()),
    })
}

fn cmd_volume(run: &RunArgs, g: u32, n: usize, lengths: Option<&[String]>) -> CmdResult {
    stable_or_fail(g, n)?;
    let v = volume(&engine(run, dim(g, n))?, g, n)?;
    let Some(lengths) = lengths else {
        return Ok(match run.format {
            Format::Text => render::volume_text(&v),
            Format::Latex => render::volume_latex(&v),
            Format::Json => json_text(&serde_json::to_value(PolyJson::from(&v)).unwrap()),
        });
    };
    let ls = lengths
        .iter()
        .map(|s| parse_length(s))
        .collect::<Result<Vec<_>, _>>()?;
    let decimal = evaluate_volume(&v, &ls, run.digits)?;
    Ok(match run.format {
        Format::Text => decimal,
        Format::Latex => volume_at(&v, &ls)?.to_latex(),
        Format::Json => json_text(&json!({
            "g": g,
            "n": n,
            "lengths": lengths,
            "exact": volume_at(&v, &ls)?,
            "decimal": decimal,
        })),
    })
}

fn cmd_closed_volume(run: &RunArgs, g: u32) -> CmdResult {
    if g < 2 {
        return Err(Fail::usage(format!("closed volumes need g >= 2, got {g}")));
    }
    let v = closed_volume(&engine(run, dim(g, 1))?, g)?;
    Ok(match run.format {
        Format::Text => v.to_string(),
        Format::Latex => v.to_latex(),
        Format::Json => json_text(&json!({ "g": g, "n": 0, "value": v })),
    })
}

fn cmd_intersections(run: &RunArgs, g: u32, n: usize) -> CmdResult {
    stable_or_fail(g, n)?;
    let t = intersection_numbers(&engine(run, dim(g, n))?, g, n)?;
    Ok(match run.format {
        Format::Text => render::intersections_text(&t),
        Format::Latex => render::intersections_latex(&t),
        Format::Json => json_text(&serde_json::to_value(IntersectionJson::from(&t)).unwrap()),
    })
}

fn side_text(g: u32, p: &SymPoly, volume_form: bool) -> String {
    if p.nvars() == 0 {
        return p.get(&[]).to_string();
    }
    if volume_form {
        render::volume_text(&VolumePoly {
            g,
            convention: Convention::Identity,
            poly: p.clone(),
        })
    } else {
        render::correlator_text(&CorrelatorPoly { g, poly: p.clone() })
    }
}

fn side_json(p: &SymPoly) -> serde_json::Value {
    let terms: Vec<_> = p
        .iter()
        .map(|(k, c)| json!({ "d": k.as_slice(), "coeff": c }))
        .collect();
    json!(terms)
}

fn verdict(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "fails"
    }
}

fn cmd_check(run: &RunArgs, g: u32, n: usize) -> CmdResult {
    stable_or_fail(g, n)?;
    if n == 0 && g < 2 {
        return Err(Fail::usage(format!(
            "(g, n) = ({g}, 0) has no closed volume"
        )));
    }
    let e = engine(run, dim(g, n + 1))?;
    let v = dilaton_check_v(&e, g, n)?;
    let w = dilaton_check_w(&e, g, n)?;
    let summary = format!(
        "dilaton-V: {}; dilaton-W: {} (SIGN={})",
        verdict(v.holds),
        verdict(w.holds),
        w.sign
    );
    let out = match run.format {
        Format::Json => {
            let side = |r: &DilatonReport| json!({ "holds": r.holds, "sign": r.sign, "lhs": side_json(&r.lhs), "rhs": side_json(&r.rhs) });
            json_text(&json!({ "g": g, "n": n, "dilaton_v": side(&v), "dilaton_w": side(&w) }))
        }
        _ => {
            let mut lines = vec![summary.clone()];
            for (name, r, vol) in [("V", &v, true), ("W", &w, false)] {
                if !r.holds {
                    lines.push(format!("dilaton-{name} lhs: {}", side_text(g, &r.lhs, vol)));
                    lines.push(format!("dilaton-{name} rhs: {}", side_text(g, &r.rhs, vol)));
                }
            }
            lines.join("\n")
        }
    };
    if v.holds && w.holds {
        Ok(out)
    } else {
        Err(Fail::identity(out))
    }
}

fn cmd_selftest(run: &RunArgs) -> CmdResult {
    let refs = reference_correlators();
    let need = refs.iter().map(|w| dim(w.g, w.n())).max().unwrap_or(0);
    let plain = RunArgs {
        times: None,
        curve: CurveChoice::Wp,
        truncation: None,
        ..run.clone()
    };
    let e = engine(&plain, need.max(dim(2, 1)))?;
    let mut lines = Vec::new();
    let mut bad = 0;
    for want in &refs {
        let got = e.correlator(want.g, want.n())?;
        let ok = *got == *want;
        bad += usize::from(!ok);
        lines.push(format!(
            "W^{}_{}: {}",
            want.g,
            want.n(),
            if ok { "ok" } else { "MISMATCH" }
        ));
    }
    let v = closed_volume(&e, 2)?;
    let ok = v == CLOSED_VOLUME_GENUS_2.parse().expect("reference value");
    bad += usize::from(!ok);
    lines.push(format!(
        "V_2,0 = {v}: {}",
        if ok { "ok" } else { "MISMATCH" }
    ));
    let out = lines.join("\n");
    if bad == 0 {
        Ok(out)
    } else {
        Err(Fail::identity(out))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = &cli.run;
    let result = match &cli.cmd {
        Command::Correlator { g, n } => cmd_correlator(run, *g, *n),
        Command::Volume { g, n, lengths } => cmd_volume(run, *g, *n, lengths.as_deref()),
        Command::ClosedVolume { g } => cmd_closed_volume(run, *g),
        Command::Intersections { g, n } => cmd_intersections(run, *g, *n),
        Command::Check { g, n } => cmd_check(run, *g, *n),
        Command::Selftest => cmd_selftest(run),
    };
    match result {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Fail { code, msg }) => {
            if code == 3 {
                println!("{msg}");
            }
            eprintln!("wpvol: {}", msg.lines().next().unwrap_or_default());
            ExitCode::from(code)
        }
    }
}
