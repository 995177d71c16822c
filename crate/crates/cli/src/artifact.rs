//! JSON and CSV file formats for expansions, representations, certificates
//! and solution reports.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use serde::{Deserialize, Serialize};

use exactapprox_core::cantor::GammaRepresentation;
use exactapprox_core::construct::{BlockRecord, Certificate, CertificateEntry, EntryClass, Mode};
use exactapprox_core::surd::{format_ratio, parse_exact, parse_rational};
use exactapprox_core::verify::{Solution, SolutionReport};
use exactapprox_core::{BigInt, BigRational, CfExpansion, DigitSystem, PadFunction, RationalInterval, Regime, Tail};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfJson {
    pub a0: i64,
    pub digits: Vec<u64>,
    pub tail: TailJson,
}

impl CfJson {
    pub fn from_cf(cf: &CfExpansion) -> Result<Self> {
        let a0 = i64::try_from(&cf.a0).map_err(|_| anyhow!("a0 does not fit in 64 bits"))?;
        let tail = match &cf.tail {
            Tail::Periodic(p) => TailJson { kind: "periodic".into(), period: Some(p.clone()), system: None },
            Tail::System(s) => TailJson { kind: "system".into(), period: None, system: Some(s.name().into()) },
            Tail::Terminated => TailJson { kind: "terminated".into(), period: None, system: None },
            Tail::Unbounded => TailJson { kind: "unbounded".into(), period: None, system: None },
        };
        Ok(CfJson { a0, digits: cf.digits.clone(), tail })
    }

    pub fn to_cf(&self) -> Result<CfExpansion> {
        let t = &self.tail;
        let tail = match t.kind.as_str() {
            "periodic" => Tail::Periodic(t.period.clone().context("periodic tail needs \"period\"")?),
            "system" => {
                Tail::System(DigitSystem::from_name(t.system.as_deref().context("system tail needs \"system\"")?)?)
            }
            "terminated" => Tail::Terminated,
            "unbounded" => Tail::Unbounded,
            other => bail!("unknown tail kind {other:?}"),
        };
        Ok(CfExpansion::new(self.a0, self.digits.clone(), tail)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationJson {
    pub gamma: String,
    pub regime: String,
    pub c: u64,
    pub mu: Vec<u64>,
    pub nu: Vec<u64>,
    pub sum_width: String,
}

impl RepresentationJson {
    pub fn from_rep(rep: &GammaRepresentation) -> Self {
        let (mu, nu) = rep.prefixes();
        RepresentationJson {
            gamma: rep.gamma().to_string(),
            regime: rep.regime().name().into(),
            c: rep.c(),
            mu,
            nu,
            sum_width: format_ratio(&rep.sum_interval().width()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockJson {
    pub block: usize,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub start: usize,
    pub q_k: String,
    pub diff_mu_lo: String,
    pub diff_mu_hi: String,
    pub diff_nu_hi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub n: usize,
    pub q_n: String,
    pub lambda_lo: String,
    pub lambda_hi: String,
    pub class: String,
    pub block: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub gamma: String,
    pub pad: String,
    pub mode: String,
    pub regime: String,
    pub c: u64,
    pub n0: usize,
    pub epsilon: String,
    pub tail_system: String,
    pub blocks: Vec<BlockJson>,
    pub entries: Vec<EntryJson>,
    pub undecided: Vec<usize>,
    pub threshold_q: Option<String>,
}

fn int(s: &str) -> Result<BigInt> {
    s.parse::<BigInt>().map_err(|_| anyhow!("malformed integer {s:?}"))
}

fn rat(s: &str) -> Result<BigRational> {
    Ok(parse_rational(s)?)
}

fn interval(lo: &str, hi: &str) -> Result<RationalInterval> {
    RationalInterval::new(rat(lo)?, rat(hi)?).ok_or_else(|| anyhow!("interval [{lo}, {hi}] is reversed"))
}

impl CertificateJson {
    pub fn from_cert(c: &Certificate) -> Self {
        CertificateJson {
            gamma: c.gamma.to_string(),
            pad: c.pad.to_string(),
            mode: c.mode.name().into(),
            regime: c.regime.name().into(),
            c: c.c,
            n0: c.n0,
            epsilon: format_ratio(&c.epsilon),
            tail_system: c.tail_system.clone(),
            blocks: c
                .blocks
                .iter()
                .map(|b| BlockJson {
                    block: b.block,
                    m: b.m,
                    n: b.n,
                    k: b.k,
                    start: b.start,
                    q_k: b.q_k.to_string(),
                    diff_mu_lo: format_ratio(b.diff_mu.lo()),
                    diff_mu_hi: format_ratio(b.diff_mu.hi()),
                    diff_nu_hi: format_ratio(&b.diff_nu_hi),
                })
                .collect(),
            entries: c
                .entries
                .iter()
                .map(|e| EntryJson {
                    n: e.n,
                    q_n: e.q_n.to_string(),
                    lambda_lo: format_ratio(e.lambda.lo()),
                    lambda_hi: format_ratio(e.lambda.hi()),
                    class: e.class.name().into(),
                    block: e.block,
                })
                .collect(),
            undecided: c.undecided.clone(),
            threshold_q: c.threshold_q.as_ref().map(|q| q.to_string()),
        }
    }

    pub fn to_cert(&self) -> Result<Certificate> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                Ok(BlockRecord {
                    block: b.block,
                    m: b.m,
                    n: b.n,
                    k: b.k,
                    start: b.start,
                    q_k: int(&b.q_k)?,
                    diff_mu: interval(&b.diff_mu_lo, &b.diff_mu_hi)?,
                    diff_nu_hi: rat(&b.diff_nu_hi)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let entries = self
            .entries
            .iter()
            .map(|e| {
                Ok(CertificateEntry {
                    n: e.n,
                    q_n: int(&e.q_n)?,
                    lambda: interval(&e.lambda_lo, &e.lambda_hi)?,
                    class: EntryClass::from_name(&e.class)?,
                    block: e.block,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Certificate {
            gamma: parse_exact(&self.gamma)?,
            pad: self.pad.parse::<PadFunction>()?,
            mode: Mode::from_name(&self.mode)?,
            regime: Regime::from_name(&self.regime)?,
            c: self.c,
            n0: self.n0,
            epsilon: rat(&self.epsilon)?,
            tail_system: self.tail_system.clone(),
            blocks,
            entries,
            undecided: self.undecided.clone(),
            threshold_q: self.threshold_q.as_deref().map(int).transpose()?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionJson {
    pub q: String,
    pub p: String,
    pub lhs_lo: String,
    pub lhs_hi: String,
    pub rhs_lo: String,
    pub rhs_hi: String,
}

impl SolutionJson {
    fn from_solution(s: &Solution) -> Self {
        SolutionJson {
            q: s.q.to_string(),
            p: s.p.to_string(),
            lhs_lo: format_ratio(s.lhs.lo()),
            lhs_hi: format_ratio(s.lhs.hi()),
            rhs_lo: format_ratio(s.rhs.lo()),
            rhs_hi: format_ratio(s.rhs.hi()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionReportJson {
    pub gamma: String,
    pub pad: String,
    pub sign: String,
    pub bound: u64,
    pub solutions: Vec<SolutionJson>,
    pub undecided: Vec<SolutionJson>,
}

impl SolutionReportJson {
    pub fn from_report(r: &SolutionReport) -> Self {
        SolutionReportJson {
            gamma: r.gamma.to_string(),
            pad: r.pad.to_string(),
            sign: r.sign.name().into(),
            bound: r.bound,
            solutions: r.solutions.iter().map(SolutionJson::from_solution).collect(),
            undecided: r.undecided.iter().map(SolutionJson::from_solution).collect(),
        }
    }
}

/// `q, p, lhs_hi, rhs_lo, verdict` rows, solutions and undecided fractions
/// merged in increasing `q`.
pub fn solutions_csv(r: &SolutionReport) -> Result<String> {
    let mut rows: Vec<(&Solution, &str)> = r.solutions.iter().map(|s| (s, "true")).collect();
    rows.extend(r.undecided.iter().map(|s| (s, "undecided")));
    rows.sort_by(|a, b| (&a.0.q, &a.0.p).cmp(&(&b.0.q, &b.0.p)));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["q", "p", "lhs_hi", "rhs_lo", "verdict"])?;
    for (s, verdict) in rows {
        w.write_record([
            s.q.to_string(),
            s.p.to_string(),
            format_ratio(s.lhs.hi()),
            format_ratio(s.rhs.lo()),
            verdict.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}
