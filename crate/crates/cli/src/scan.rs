//! Batch certificates over parameter ranges.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde_json::{json, Value};

use wordmap_core::ff::numtheory::{factorize, gcd};
use wordmap_core::witness::{
    main2_certificate, main2_exponent, main2_group, main3_certificate, main3_rule, main4_certificate,
    main4_rule, q_minus_eps, sl2_certificate, squares_check, Evidence, Main4Variant, Variant,
};
use wordmap_core::{EnumLimits, Error, ExponentParams, Family, GroupData, GroupSpec};

use crate::{exit_code, CmdResult, Ctx, Failure, EXIT_CAP, EXIT_VERIFICATION};

pub const CSV_HEADER: &str = "family,n,q,p,variant,a,word,claim,verified,time_ms";

#[derive(Args, Debug)]
pub(crate) struct ScanArgs {
    /// SL, SU, GL, GU or Sp.
    family: String,
    /// Dimensions, e.g. `2..4` or `2,3,6`.
    #[arg(long, value_parser = parse_range)]
    n_range: NumList,
    /// Field sizes; non prime powers are skipped.
    #[arg(long, value_parser = parse_range)]
    q_range: NumList,
    /// sl2, main2, main3, main4 or squares.
    #[arg(long)]
    word_template: String,
    /// Variant for main2 (i, ii, iii) and main4 (i, ii).
    #[arg(long)]
    variant: Option<String>,
    /// Restrict to one prime.
    #[arg(long)]
    p: Option<u64>,
    /// CSV destination; printed in the report when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct NumList(Vec<u64>);

/// `a..b` (inclusive) or a comma list of numbers and ranges.
pub(crate) fn parse_range(s: &str) -> Result<NumList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty range {part}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err("empty range".into());
    }
    Ok(NumList(out))
}

struct Row {
    family: String,
    n: u64,
    q: u64,
    p: Option<u64>,
    variant: Option<String>,
    a: Option<u32>,
    word: String,
    claim: String,
    verified: bool,
    time_ms: u64,
}

impl Row {
    fn csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.q,
            opt(self.p.map(|p| p.to_string())),
            opt(self.variant.clone()),
            opt(self.a.map(|a| a.to_string())),
            self.word,
            self.claim,
            self.verified,
            self.time_ms
        )
    }
}

/// One scan job: the group to build and how to certify on it.
struct Job {
    spec: GroupSpec,
    p: Option<u64>,
    variant: Option<String>,
    kind: JobKind,
}

enum JobKind {
    Sl2,
    Main2(ExponentParams),
    Main3 { eps: i8, p: u64 },
    Main4 { variant: Main4Variant, n: u64, eps: i8 },
    Squares,
}

fn family_of(name: &str) -> Result<Family, Failure> {
    Ok(match name {
        "SL" => Family::SL,
        "SU" => Family::SU,
        "GL" => Family::GL,
        "GU" => Family::GU,
        "Sp" => Family::Sp,
        _ => return Err(Error::InvalidSpec(format!("unknown family {name:?}")).into()),
    })
}

fn primes_of(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Jobs for one `(n, q)`; parameter combinations violating a hypothesis are dropped.
fn jobs(args: &ScanArgs, family: Family, n: u64, q: u64) -> Result<Vec<Job>, Failure> {
    let eps: i8 = if family.is_unitary() { -1 } else { 1 };
    let Ok(spec) = GroupSpec::new(family, n as usize, q) else {
        return Ok(Vec::new());
    };
    let primes = |m: u64| -> Vec<u64> {
        primes_of(m).into_iter().filter(|&p| args.p.is_none_or(|only| only == p)).collect()
    };
    let mut out = Vec::new();
    match args.word_template.as_str() {
        "sl2" => {
            if family == Family::SL && n == 2 && q % 2 == 1 && q >= 5 {
                out.push(Job { spec, p: Some(2), variant: None, kind: JobKind::Sl2 });
            }
        }
        "main2" => {
            let variant: Variant = args.variant.as_deref().unwrap_or("i").parse()?;
            let wants_gl = variant == Variant::II;
            if wants_gl != matches!(family, Family::GL | Family::GU) || family == Family::Sp {
                return Ok(out);
            }
            for p in primes(gcd(n, q_minus_eps(q, eps))) {
                let params = ExponentParams { n, q, eps, p, variant };
                if main2_exponent(&params).is_ok() {
                    let spec = main2_group(&params)?;
                    out.push(Job { spec, p: Some(p), variant: Some(variant.to_string()), kind: JobKind::Main2(params) });
                }
            }
        }
        "main3" => {
            if matches!(family, Family::SL | Family::SU) {
                for p in primes(n) {
                    if main3_rule(n, q, eps, p).is_ok() {
                        out.push(Job { spec: spec.clone(), p: Some(p), variant: None, kind: JobKind::Main3 { eps, p } });
                    }
                }
            }
        }
        "main4" => {
            let variant: Main4Variant = args.variant.as_deref().unwrap_or("i").parse()?;
            let (name, p) = match variant {
                Main4Variant::I => ("i", 3),
                Main4Variant::II => ("ii", 2),
            };
            let ok_family = match variant {
                Main4Variant::I => matches!(family, Family::SL | Family::SU),
                Main4Variant::II => family == Family::Sp,
            };
            let half = if variant == Main4Variant::II { n / 2 } else { n };
            if ok_family && args.p.is_none_or(|only| only == p) && main4_rule(variant, half, q, eps).is_ok() {
                let eps = if variant == Main4Variant::II { 1 } else { eps };
                out.push(Job {
                    spec,
                    p: Some(p),
                    variant: Some(name.into()),
                    kind: JobKind::Main4 { variant, n: half, eps },
                });
            }
        }
        "squares" => out.push(Job { spec, p: None, variant: None, kind: JobKind::Squares }),
        t => return Err(Error::InvalidSpec(format!("unknown word template {t:?}")).into()),
    }
    Ok(out)
}

/// Runs one job; `Ok((claim, word, a, verified))`.
fn run_job(job: &Job, limits: EnumLimits, class_cap: usize) -> Result<(String, String, Option<u32>, bool), Error> {
    let data = GroupData::build(&job.spec, limits)?;
    let cert = match &job.kind {
        JobKind::Sl2 => sl2_certificate(&data, limits)?,
        JobKind::Main2(params) => main2_certificate(&data, params, limits)?,
        JobKind::Main3 { eps, p } => main3_certificate(&data, job.spec.n as u64, job.spec.q, *eps, *p, limits)?,
        JobKind::Main4 { variant, n, eps } => main4_certificate(&data, *variant, *n, job.spec.q, *eps, limits)?,
        JobKind::Squares => {
            let r = squares_check(&data, class_cap)?;
            if r.quasisimple && !r.all_products {
                return Err(Error::Verification(format!("{}: two-squares criterion fails", job.spec)));
            }
            let claim = if r.all_products { "surjective" } else { "not_surjective" };
            return Ok((claim.into(), "x^2 y^2".into(), None, true));
        }
    };
    let a = match &cert.evidence {
        Evidence::MissedElement { derivation, .. } => Some(derivation.a),
        _ => None,
    };
    Ok((cert.claim.to_string(), cert.word.clone(), a, cert.verified))
}

pub(crate) fn run(ctx: &mut Ctx, args: ScanArgs) -> CmdResult {
    let family = family_of(&args.family)?;
    let limits = ctx.limits();
    let class_cap = ctx.global.class_cap;
    let mut csv = format!("{CSV_HEADER}\n");
    let (mut rows, mut cap_failures) = (0usize, 0usize);
    let mut failure = None;
    let scan_start = Instant::now();
    'outer: for &n in &args.n_range.0 {
        for &q in &args.q_range.0 {
            for job in jobs(&args, family, n, q)? {
                let start = Instant::now();
                let outcome = run_job(&job, limits, class_cap);
                let time_ms = start.elapsed().as_millis() as u64;
                let mut row = Row {
                    family: job.spec.family.name().to_string(),
                    n: job.spec.n as u64,
                    q,
                    p: job.p,
                    variant: job.variant.clone(),
                    a: None,
                    word: String::new(),
                    claim: String::new(),
                    verified: false,
                    time_ms,
                };
                match outcome {
                    Ok((claim, word, a, verified)) => {
                        (row.claim, row.word, row.a) = (claim, word, a);
                        row.verified = verified;
                    }
                    Err(e) if exit_code(&e) == EXIT_CAP => {
                        row.claim = "cap_exceeded".into();
                        cap_failures += 1;
                        ctx.warn(format!("{}: {e}", job.spec));
                    }
                    Err(e) if exit_code(&e) == EXIT_VERIFICATION => {
                        row.claim = "verification_failure".into();
                        failure = Some(e);
                    }
                    Err(Error::Hypothesis(msg)) => {
                        ctx.warn(format!("{}: skipped, {msg}", job.spec));
                        continue;
                    }
                    Err(e) => return Err(e.into()),
                }
                let _ = writeln!(csv, "{}", row.csv());
                rows += 1;
                if failure.is_some() {
                    break 'outer;
                }
            }
        }
    }
    ctx.report.timings_ms.insert("scan".into(), scan_start.elapsed().as_millis() as u64);
    let mut result = json!({ "rows": rows, "cap_exceeded": cap_failures });
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            result["csv_path"] = Value::String(path.display().to_string());
        }
        None => result["csv"] = Value::String(csv),
    }
    if let Some(e) = failure {
        ctx.report.result = result;
        return Err(e.into());
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..4").unwrap().0, vec![2, 3, 4]);
        assert_eq!(parse_range("2..=3,7").unwrap().0, vec![2, 3, 7]);
        assert_eq!(parse_range("5").unwrap().0, vec![5]);
        assert!(parse_range("4..2").is_err());
        assert!(parse_range("x").is_err());
    }
}
