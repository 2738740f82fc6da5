//! Command-line front end. Exit codes: 0 success, 1 a recipe was refused,
//! 2 usage or input error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::exactfield::parse_decimal;
use crate::ingest::validate_config;
use crate::operators::{al_scalar_wl, al_scalar_wlprime, fricke_combined, fricke_factor, ALContext};
use crate::pipeline::run_plan;
use crate::quadform::{
    enumerate_determining, enumerate_determining_with, IndexForm, SendingMatrix, Threshold,
};
use crate::restrict::{vcount, vcount_oracle, OracleBounds};

#[derive(Parser, Debug)]
#[command(name = "siegel-restrict", version, about = "Dimension bounds for genus-2 Siegel cusp forms via restriction")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the determining set of reduced index forms.
    Determining {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        weight: u32,
        /// Cutoff on a + c - |b| (strict), replacing the default bound.
        #[arg(long)]
        threshold: Option<String>,
    },
    /// Count index forms in a class with a given pairing against s.
    Vcount {
        #[arg(long)]
        j: u32,
        /// Sending matrix as s1,s2,s4.
        #[arg(long, value_parser = parse_sending)]
        s: SendingMatrix,
        /// Index form as a,b,c.
        #[arg(long, value_parser = parse_form)]
        t: IndexForm,
        /// Also run the search-based oracle count.
        #[arg(long)]
        oracle: bool,
        /// Use the fixed legacy search box for the oracle.
        #[arg(long)]
        legacy_box: bool,
    },
    /// Print the restricted expansion for one sending matrix of a config.
    Restrict {
        #[arg(long)]
        config: PathBuf,
        /// Index into the config's sending matrices.
        #[arg(long)]
        s: usize,
        #[arg(long)]
        jmax: Option<u32>,
    },
    /// Print the operator scalars for one sending matrix of a config.
    AlScalar {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        s: usize,
    },
    /// Build and solve the full constraint system of a config.
    Bound {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_triple(s: &str) -> Result<[i64; 3], String> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    <[i64; 3]>::try_from(v).map_err(|_| "expected three comma-separated integers".to_string())
}

fn parse_sending(s: &str) -> Result<SendingMatrix, String> {
    SendingMatrix::try_from(parse_triple(s)?).map_err(|e| e.to_string())
}

fn parse_form(s: &str) -> Result<IndexForm, String> {
    IndexForm::try_from(parse_triple(s)?).map_err(|e| e.to_string())
}

#[derive(serde::Serialize)]
#[serde(untagged)]
enum ScalarOrError {
    Ok(crate::operators::OperatorScalar),
    Err { error: String },
}

/// Outcome of a command: text for stdout and the exit code.
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

fn ok(stdout: String) -> Result<Output, String> {
    Ok(Output { stdout, code: 0 })
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Executes a parsed command; errors map to exit code 2.
pub fn execute(cli: &Cli) -> Result<Output, String> {
    match &cli.command {
        Command::Determining { level, weight, threshold } => {
            let det = match threshold {
                None => enumerate_determining(*level, *weight),
                Some(t) => {
                    let x = parse_decimal(t).map_err(|e| e.to_string())?;
                    enumerate_determining_with(*level, *weight, Threshold::unhalved(x))
                }
            }
            .map_err(|e| e.to_string())?;
            if cli.json {
                return ok(pretty(&det));
            }
            let mut s = format!(
                "level {} weight {}: {} forms ({})\n",
                det.level,
                det.weight,
                det.forms.len(),
                det.threshold.describe()
            );
            for t in &det.forms {
                s.push_str(&format!("{t}  w = {}\n", t.dyadic_trace()));
            }
            ok(s)
        }
        Command::Vcount { j, s, t, oracle, legacy_box } => {
            let n = vcount(*j, s, t);
            let o = oracle.then(|| {
                let b = if *legacy_box { OracleBounds::LEGACY_BOX } else { OracleBounds::Derived };
                vcount_oracle(*j, s, t, b)
            });
            if cli.json {
                return ok(pretty(&json!({"j": j, "s": s, "t": t, "count": n, "oracle": o})));
            }
            let mut out = format!("vcount(j={j}, s={s}, t={t}) = {n}\n");
            if let Some(o) = o {
                out.push_str(&format!(
                    "oracle = {} over {} candidates (a <= {}, |b| <= {}, d <= {}, |U entries| <= {})\n",
                    o.count, o.candidates, o.a_max, o.b_max, o.d_max, o.u_max
                ));
            }
            ok(out)
        }
        Command::Restrict { config, s, jmax } => {
            let plan = validate_config(config).map_err(|e| e.to_string())?;
            let sm = *plan
                .config
                .sending_matrices
                .get(*s)
                .ok_or_else(|| format!("config has no sending matrix {s}"))?;
            let exp = crate::restrict::restrict_expansion(&plan.det, &sm, *jmax);
            if cli.json {
                return ok(pretty(&exp));
            }
            let mut out = format!("s = {sm}, level {} weight {}\n", exp.level, exp.weight);
            out.push_str(&exp.to_text());
            let tp = exp.truncated_powers();
            if !tp.is_empty() {
                out.push_str(&format!("classes outside the variable set also occur at q^j for j in {tp:?}\n"));
            }
            ok(out)
        }
        Command::AlScalar { config, s } => {
            let plan = validate_config(config).map_err(|e| e.to_string())?;
            let sm = *plan
                .config
                .sending_matrices
                .get(*s)
                .ok_or_else(|| format!("config has no sending matrix {s}"))?;
            let ctx = ALContext::new(plan.config.level, plan.config.weight, plan.character.clone(), sm)
                .map_err(|e| e.to_string())?;
            let fr = fricke_factor(&ctx);
            let res = vec![
                ("wl", al_scalar_wl(&ctx).map_err(|e| e.to_string())),
                ("wlprime", al_scalar_wlprime(&ctx).map_err(|e| e.to_string())),
                ("fricke", Ok(fr)),
                ("fricke_combined", fricke_combined(&ctx).map_err(|e| e.to_string())),
            ];
            if cli.json {
                let m: std::collections::BTreeMap<&str, ScalarOrError> = res
                    .iter()
                    .map(|(k, r)| {
                        let v = match r {
                            Ok(x) => ScalarOrError::Ok(x.clone()),
                            Err(e) => ScalarOrError::Err { error: e.clone() },
                        };
                        (*k, v)
                    })
                    .collect();
                return ok(pretty(&m));
            }
            let mut out = format!("l = {}, l' = {}, k = {}, s = {sm}\n", ctx.l, ctx.lprime, ctx.k);
            for (k, r) in res {
                match r {
                    Ok(x) => out.push_str(&format!("{k}: {}  witness {}\n", x.value, serde_json::to_string(&x.witness).unwrap())),
                    Err(e) => out.push_str(&format!("{k}: unavailable ({e})\n")),
                }
            }
            ok(out)
        }
        Command::Bound { config } => {
            let plan = validate_config(config).map_err(|e| e.to_string())?;
            let report = run_plan(&plan).map_err(|e| e.to_string())?;
            let code = if report.refusals.is_empty() { 0 } else { 1 };
            let stdout = if cli.json { pretty(&report) } else { report.to_text() };
            Ok(Output { stdout, code })
        }
    }
}

/// Reads `SIEGEL_RESTRICT_THREADS` and sizes the global worker pool.
pub fn configure_threads() -> Result<(), String> {
    match std::env::var("SIEGEL_RESTRICT_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("SIEGEL_RESTRICT_THREADS must be a positive integer, got {v:?}"))?;
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
        }
    }
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    match execute(&cli) {
        Ok(out) => {
            let _ = std::io::stdout().write_all(out.stdout.as_bytes());
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
