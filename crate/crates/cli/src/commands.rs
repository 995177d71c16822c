//! The subcommands. Each writes its artifacts and returns a status plus a
//! short human-readable summary.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde::Serialize;

use exactapprox_core::construct::{build_alpha, ConstructionParams};
use exactapprox_core::spectrum::{constants, lagrange_value, markoff_numbers, ConstantValue};
use exactapprox_core::surd::rational_to_decimal;
use exactapprox_core::verify::{recheck_certificate, Enumerator, Sign, SolutionReport};
use exactapprox_core::{represent_gamma, BigInt, CfExpansion, PadFunction, QuadraticSurd};

use crate::artifact::{
    read_json, solutions_csv, to_json, write_file, CertificateJson, CfJson, RepresentationJson, SolutionReportJson,
};
use crate::config::{Format, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// More digits or precision would be needed to decide something.
    Undecided,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Undecided => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub summary: String,
}

const DECIMALS: u32 = 30;

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    created_unix: u64,
}

fn write_metadata(out: &Path, command: &str) -> Result<()> {
    let created_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let meta = Metadata { command, version: env!("CARGO_PKG_VERSION"), created_unix };
    write_file(out, "metadata.json", &to_json(&meta)?)
}

fn finish(out: &Path, command: &str, status: Status, summary: String) -> Result<Outcome> {
    write_file(out, "summary.txt", &summary)?;
    write_metadata(out, command)?;
    Ok(Outcome { status, summary })
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    match config {
        RunConfig::Decompose { gamma, width, out } => decompose(gamma, width, out),
        RunConfig::Construct { gamma, pad, mode, blocks, max_block_digits, lookahead, out } => {
            let mut params = ConstructionParams::new(gamma.clone(), pad.clone(), *mode)?;
            let caps = (max_block_digits.unwrap_or(params.max_block_digits), lookahead.unwrap_or(params.lookahead));
            params = params.with_caps(caps.0, caps.1);
            construct(&params, *blocks, out)
        }
        RunConfig::Verify { alpha, gamma, pad, sign, bound, threads, format, certificate, out } => {
            let cf = read_json::<CfJson>(alpha)?.to_cf()?;
            let threshold = match certificate {
                Some(path) => Some(read_json::<CertificateJson>(path)?.to_cert()?.threshold_q),
                None => None,
            };
            verify(&cf, gamma, pad, *sign, *bound, *threads, *format, threshold, out)
        }
        RunConfig::Spectrum { limit, format, out } => spectrum(*limit, *format, out),
        RunConfig::Recheck { certificate, alpha, out } => {
            let cert = read_json::<CertificateJson>(certificate)?.to_cert()?;
            let cf = read_json::<CfJson>(alpha)?.to_cf()?;
            let report = recheck_certificate(&cert, &cf)?;
            let (status, summary) = match &report.failure {
                None => (Status::Pass, format!("recheck passed: {} entries re-verified\n", report.checked)),
                Some(f) => {
                    let at = f.n.map_or_else(|| "certificate".to_string(), |n| format!("index {n}"));
                    (Status::Fail, format!("recheck failed at {at}: {}\n", f.detail))
                }
            };
            finish(out, "recheck", status, summary)
        }
    }
}

fn decompose(gamma: &QuadraticSurd, width: &exactapprox_core::BigRational, out: &Path) -> Result<Outcome> {
    let mut rep = represent_gamma(gamma)?;
    rep.refine_to(width)?;
    let json = RepresentationJson::from_rep(&rep);
    write_file(out, "representation.json", &to_json(&json)?)?;
    let summary = format!(
        "gamma = {} = {} + mu + nu ({}, digits {})\nmu ~ {} digits, nu ~ {} digits, sum width {}\n",
        gamma,
        rep.c(),
        rep.regime(),
        rep.system().name(),
        json.mu.len(),
        json.nu.len(),
        rational_to_decimal(&rep.sum_interval().width(), 40).trim_end_matches('0'),
    );
    finish(out, "decompose", Status::Pass, summary)
}

/// Runs the construction and writes `alpha.json` and `certificate.json`.
pub fn construct(params: &ConstructionParams, blocks: usize, out: &Path) -> Result<Outcome> {
    let mut rep = represent_gamma(&params.gamma)?;
    let (cf, cert) = build_alpha(params, &mut rep, blocks)?;
    write_file(out, "alpha.json", &to_json(&CfJson::from_cf(&cf)?)?)?;
    write_file(out, "certificate.json", &to_json(&CertificateJson::from_cert(&cert))?)?;
    let mut summary = format!(
        "gamma = {} ({}, c = {}, n0 = {}, epsilon = {}), pad {}, mode {}\n{} digits, {} certified entries\n",
        params.gamma,
        params.regime,
        params.c,
        params.n0,
        cert.epsilon,
        params.pad,
        params.mode,
        cf.digits.len(),
        cert.entries.len()
    );
    for b in &cert.blocks {
        summary.push_str(&format!("block {}: m = {}, n = {}, marked index k = {}\n", b.block, b.m, b.n, b.k));
    }
    match &cert.threshold_q {
        Some(q) => summary.push_str(&format!("strengthened inequality possible only up to q = {q}\n")),
        None => summary.push_str("strengthened inequality ruled out at every convergent\n"),
    }
    let status = if cert.undecided.is_empty() {
        Status::Pass
    } else {
        summary.push_str(&format!("undecided indices: {:?}\n", cert.undecided));
        Status::Undecided
    };
    finish(out, "construct", status, summary)
}

/// Scans `1..=bound` split into contiguous ranges over `threads` workers.
pub fn enumerate_parallel(
    alpha: &CfExpansion,
    gamma: &QuadraticSurd,
    pad: &PadFunction,
    sign: Sign,
    bound: u64,
    threads: usize,
) -> Result<SolutionReport> {
    let e = Enumerator::new(alpha, gamma, pad, sign, bound)?;
    let threads = (threads as u64).clamp(1, bound.max(1));
    let chunk = bound.div_ceil(threads);
    let parts = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|i| {
                let e = &e;
                let lo = i * chunk + 1;
                let hi = ((i + 1) * chunk).min(bound);
                s.spawn(move || e.scan(lo, hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect::<Vec<_>>()
    });
    let parts = parts.into_iter().collect::<exactapprox_core::error::Result<Vec<_>>>()?;
    let mut report = SolutionReport::merge(parts).expect("at least one worker");
    report.bound = bound;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn verify(
    cf: &CfExpansion,
    gamma: &QuadraticSurd,
    pad: &PadFunction,
    sign: Sign,
    bound: u64,
    threads: usize,
    format: Format,
    threshold: Option<Option<BigInt>>,
    out: &Path,
) -> Result<Outcome> {
    let report = enumerate_parallel(cf, gamma, pad, sign, bound, threads)?;
    match format {
        Format::Json => write_file(out, "solutions.json", &to_json(&SolutionReportJson::from_report(&report))?)?,
        Format::Csv => write_file(out, "solutions.csv", &solutions_csv(&report)?)?,
    }
    let qs: Vec<String> = report.solutions.iter().map(|s| s.q.to_string()).collect();
    let mut summary = format!(
        "{} solutions with q <= {} (sign {}): {}\n",
        report.solutions.len(),
        bound,
        sign,
        if qs.is_empty() { "none".to_string() } else { qs.join(", ") }
    );
    let mut status = Status::Pass;
    if let Some(threshold) = threshold {
        let beyond: Vec<&String> = report
            .solutions
            .iter()
            .zip(&qs)
            .filter(|(s, _)| threshold.as_ref().is_none_or(|t| &s.q > t))
            .map(|(_, q)| q)
            .collect();
        let limit = threshold.as_ref().map_or("none".to_string(), |t| t.to_string());
        if sign == Sign::Minus && !beyond.is_empty() {
            status = Status::Fail;
            summary.push_str(&format!("solutions beyond the certificate threshold {limit}: {beyond:?}\n"));
        } else {
            summary.push_str(&format!("certificate threshold q: {limit}\n"));
        }
    }
    if !report.undecided.is_empty() && status == Status::Pass {
        status = Status::Undecided;
        summary.push_str(&format!("{} fractions undecided; supply more digits of alpha\n", report.undecided.len()));
    }
    finish(out, "verify", status, summary)
}

#[derive(Serialize)]
struct MarkoffJson {
    m: u64,
    lagrange: String,
    decimal: String,
}

#[derive(Serialize)]
struct ConstantJson {
    name: &'static str,
    exact: Option<String>,
    decimal: String,
    note: &'static str,
}

#[derive(Serialize)]
struct SpectrumJson {
    limit: u64,
    markoff: Vec<MarkoffJson>,
    constants: Vec<ConstantJson>,
}

fn spectrum(limit: u64, format: Format, out: &Path) -> Result<Outcome> {
    let ms = markoff_numbers(limit);
    let markoff = ms
        .iter()
        .map(|&m| {
            let l = lagrange_value(m)?;
            Ok(MarkoffJson { m, lagrange: l.to_string(), decimal: l.to_decimal(DECIMALS) })
        })
        .collect::<Result<Vec<_>>>()?;
    let consts = constants()
        .into_iter()
        .map(|c| ConstantJson {
            name: c.name,
            exact: match &c.value {
                ConstantValue::Exact(s) => Some(s.to_string()),
                ConstantValue::Approximate(_) => None,
            },
            decimal: c.value.to_decimal(DECIMALS),
            note: c.note,
        })
        .collect();
    match format {
        Format::Json => {
            write_file(out, "spectrum.json", &to_json(&SpectrumJson { limit, markoff, constants: consts })?)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["m", "lagrange", "decimal"])?;
            for row in &markoff {
                w.write_record([row.m.to_string(), row.lagrange.clone(), row.decimal.clone()])?;
            }
            write_file(out, "spectrum.csv", &String::from_utf8(w.into_inner()?)?)?;
        }
    }
    let summary = format!("Markoff numbers up to {limit}: {ms:?}\n");
    finish(out, "spectrum", Status::Pass, summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Options;
    use exactapprox_core::construct::Mode;
    use exactapprox_core::surd::parse_exact;

    fn resolve(command: &str, o: Options) -> RunConfig {
        RunConfig::resolve(command, o, None).unwrap()
    }

    fn opts(out: &Path) -> Options {
        Options { out: Some(out.to_path_buf()), ..Options::default() }
    }

    #[test]
    fn construct_then_recheck_and_verify() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("c");
        let o = Options { gamma: Some("28/5".into()), pad: Some("power:1/1".into()), blocks: Some(2), ..opts(&out) };
        assert_eq!(run(&resolve("construct", o)).unwrap().status, Status::Pass);
        for f in ["alpha.json", "certificate.json", "summary.txt", "metadata.json"] {
            assert!(out.join(f).exists(), "{f}");
        }

        let cert: CertificateJson = read_json(&out.join("certificate.json")).unwrap();
        assert_eq!(CertificateJson::from_cert(&cert.to_cert().unwrap()), cert);
        let alpha: CfJson = read_json(&out.join("alpha.json")).unwrap();
        assert_eq!(CfJson::from_cf(&alpha.to_cf().unwrap()).unwrap(), alpha);

        let o = Options { certificate: Some(out.join("certificate.json")), ..opts(&dir.path().join("r")) };
        assert_eq!(run(&resolve("recheck", o)).unwrap().status, Status::Pass);

        let o = Options {
            alpha: Some(out.join("alpha.json")),
            certificate: Some(out.join("certificate.json")),
            gamma: Some("28/5".into()),
            pad: Some("power:1/1".into()),
            sign: Some("minus".into()),
            bound: Some(3000),
            ..opts(&dir.path().join("v"))
        };
        assert_eq!(run(&resolve("verify", o)).unwrap().status, Status::Pass);
    }

    #[test]
    fn threads_do_not_change_the_report() {
        let gamma = parse_exact("21/4").unwrap();
        let pad = PadFunction::power(1, 1).unwrap();
        let params = ConstructionParams::new(gamma.clone(), pad.clone(), Mode::OneSided).unwrap();
        let (cf, _) = build_alpha(&params, &mut represent_gamma(&gamma).unwrap(), 1).unwrap();
        let one = enumerate_parallel(&cf, &gamma, &pad, Sign::Plus, 3000, 1).unwrap();
        let many = enumerate_parallel(&cf, &gamma, &pad, Sign::Plus, 3000, 7).unwrap();
        assert_eq!(one, many);
        assert!(!one.solutions.is_empty());
    }

    #[test]
    fn spectrum_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let o = Options { limit: Some(5), format: Some("csv".into()), ..opts(dir.path()) };
        let r = run(&resolve("spectrum", o)).unwrap();
        assert!(r.summary.contains("[1, 2, 5]"));
        let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.contains("surd:0,5525,25"));

        let o = Options { limit: Some(100), ..opts(dir.path()) };
        run(&resolve("spectrum", o)).unwrap();
        let json: serde_json::Value = read_json(&dir.path().join("spectrum.json")).unwrap();
        assert_eq!(json["markoff"].as_array().unwrap().len(), 7);
        assert!(json["constants"]
            .as_array()
            .unwrap()
            .iter()
            .any(|c| c["name"] == "mu0_reference" && c["exact"].is_null()));
    }

    #[test]
    fn decompose_writes_a_representation() {
        let dir = tempfile::tempdir().unwrap();
        let o = Options { gamma: Some("5.2".into()), width: Some("1e-20".into()), ..opts(dir.path()) };
        run(&resolve("decompose", o)).unwrap();
        let rep: RepresentationJson = read_json(&dir.path().join("representation.json")).unwrap();
        assert_eq!((rep.regime.as_str(), rep.c, rep.gamma.as_str()), ("repr4", 4, "26/5"));
        let o = Options { gamma: Some("4".into()), ..opts(dir.path()) };
        assert!(run(&resolve("decompose", o)).is_err());
    }
}
