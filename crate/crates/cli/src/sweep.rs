use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use itermap::dynamics::MapSpec;
use itermap::ffield::{is_prime, PrimeField};
use itermap::theory::{compare, ComparisonReport};

use crate::commands::{compare_rows, CompareSettings, GroupArgs};
use crate::output::{render, to_csv, to_json, write_file, Failure, Format, SCHEMA_VERSION};

/// Residue filter on the primes of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimeFilter {
    All,
    Residue { r: u64, m: u64 },
}

impl PrimeFilter {
    pub fn accepts(self, p: u64) -> bool {
        match self {
            PrimeFilter::All => true,
            PrimeFilter::Residue { r, m } => p % m == r,
        }
    }
}

impl FromStr for PrimeFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "all" {
            return Ok(PrimeFilter::All);
        }
        let bad = || format!("expected `all` or `r mod m`, got `{s}`");
        let (r, m) = s.split_once("mod").ok_or_else(bad)?;
        let r: u64 = r.trim().parse().map_err(|_| bad())?;
        let m: u64 = m.trim().parse().map_err(|_| bad())?;
        if m == 0 || r >= m {
            return Err(format!("residue filter needs 0 ≤ r < m, got `{s}`"));
        }
        Ok(PrimeFilter::Residue { r, m })
    }
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo = lo.trim().parse().map_err(|e| format!("`{lo}`: {e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("`{hi}`: {e}"))?;
    Ok((lo, hi))
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Integer coefficients without a prime, e.g. `num=1,0,1`.
    #[arg(long)]
    pub map_template: String,
    /// Inclusive prime range `LO..HI`.
    #[arg(long, value_parser = parse_range)]
    pub primes: (u64, u64),
    /// `all`, or `r mod m` to keep primes `p ≡ r (mod m)`.
    #[arg(long)]
    pub filter: PrimeFilter,
    #[arg(long, alias = "hypothesis")]
    pub family: Option<String>,
    #[arg(long)]
    pub coset: Option<String>,
    #[command(flatten)]
    pub settings: CompareSettings,
    /// Directory for the per-prime reports and the aggregate.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimeStatus {
    pub p: u64,
    pub ok: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub n: usize,
    pub primes: usize,
    pub fpp: String,
    pub mean_ratio: f64,
    pub mean_deviation: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub map_template: String,
    pub range: (u64, u64),
    pub filter: String,
    pub primes: Vec<PrimeStatus>,
    pub rows: Vec<AggregateRow>,
}

/// Per-`n` statistics over every prime whose comparison succeeded.
pub fn aggregate(reports: &[ComparisonReport], n_max: usize) -> Vec<AggregateRow> {
    (0..n_max)
        .filter_map(|i| {
            let rows: Vec<_> = reports.iter().filter_map(|r| r.rows.get(i)).collect();
            let first = rows.first()?;
            let k = rows.len() as f64;
            Some(AggregateRow {
                n: i + 1,
                primes: rows.len(),
                fpp: first.fpp.approx.clone(),
                mean_ratio: rows
                    .iter()
                    .map(|r| itermap::ratio::to_f64(&r.ratio))
                    .sum::<f64>()
                    / k,
                mean_deviation: rows.iter().map(|r| r.deviation).sum::<f64>() / k,
                max_deviation: rows.iter().map(|r| r.deviation).fold(0.0, f64::max),
            })
        })
        .collect()
}

pub fn sweep(args: &SweepArgs, bit_budget: u64) -> Result<(), Failure> {
    let spec: MapSpec = args.map_template.parse()?;
    if spec.p.is_some() {
        return Err(Failure::Spec("the map template must not fix `p=`".into()));
    }
    let options = args.settings.options(bit_budget)?;
    let (lo, hi) = args.primes;
    let primes: Vec<u64> = (lo..=hi)
        .filter(|&p| is_prime(p) && args.filter.accepts(p))
        .collect();
    if primes.is_empty() {
        return Err(Failure::Spec(format!(
            "no primes in {lo}..{hi} pass the filter"
        )));
    }
    let group = GroupArgs {
        family: args.family.clone(),
        generators: None,
        degree: None,
        coset: args.coset.clone(),
    };
    fs::create_dir_all(&args.out_dir)?;

    let results: Vec<Result<ComparisonReport, Failure>> = primes
        .par_iter()
        .map(|&p| {
            let map = spec
                .template
                .instantiate(PrimeField::new(p).map_err(|e| Failure::Spec(e.to_string()))?)?;
            let hypothesis = group.hypothesis(map.degree())?;
            let report = compare(&map, &hypothesis, args.settings.n, &options)?;
            let text = render(args.format, &report, compare_rows(&report))?;
            write_file(
                &args
                    .out_dir
                    .join(format!("p{p}.{}", args.format.extension())),
                &text,
            )?;
            Ok(report)
        })
        .collect();

    let mut statuses = Vec::with_capacity(primes.len());
    let mut reports = Vec::new();
    for (&p, result) in primes.iter().zip(results) {
        match result {
            Ok(r) => {
                statuses.push(PrimeStatus {
                    p,
                    ok: true,
                    error: None,
                });
                reports.push(r);
            }
            Err(e) => statuses.push(PrimeStatus {
                p,
                ok: false,
                error: Some(e.message().to_string()),
            }),
        }
    }
    let failed = statuses.iter().filter(|s| !s.ok).count();
    let summary = SweepSummary {
        schema_version: SCHEMA_VERSION,
        map_template: args.map_template.clone(),
        range: (lo, hi),
        filter: match args.filter {
            PrimeFilter::All => "all".into(),
            PrimeFilter::Residue { r, m } => format!("{r} mod {m}"),
        },
        primes: statuses,
        rows: aggregate(&reports, args.settings.n),
    };
    match args.format {
        Format::Json => write_file(&args.out_dir.join("aggregate.json"), &to_json(&summary)?)?,
        Format::Csv => {
            write_file(&args.out_dir.join("aggregate.csv"), &to_csv(&summary.rows)?)?;
            write_file(&args.out_dir.join("status.csv"), &to_csv(&summary.primes)?)?;
        }
    }
    if failed > 0 {
        return Err(Failure::Compute(format!(
            "{failed} of {} primes failed",
            primes.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters() {
        assert_eq!("all".parse::<PrimeFilter>(), Ok(PrimeFilter::All));
        let f: PrimeFilter = "3 mod 4".parse().unwrap();
        assert!(f.accepts(7) && !f.accepts(5));
        assert!("4 mod 4".parse::<PrimeFilter>().is_err());
        assert!("x".parse::<PrimeFilter>().is_err());
        assert_eq!(parse_range("10..20"), Ok((10, 20)));
    }
}
