use clap::{Args, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use itermap::dynamics::{
    build_graph, check_orbit_separation, fiber_histogram, FiberHistogram, FiberMode, MapSpec,
    OrbitReport, RationalMap,
};
use itermap::groups::{
    closed_form_indicatrix, default_grid_step, fpp_sequence, generate_from, indicatrix, make_coset,
    make_group, parse_family_degree, verify_domination, verify_fpp_bounds, BoundReport,
    DominationReport, Family, FppValue, IndicatrixPolynomial, Lemma, Permutation, PermutationSet,
};
use itermap::interval::Real;
use itermap::ratio;
use itermap::theory::{
    compare, exact_orbit_distinctness, family_threshold, height_constants, CompareOptions,
    ComparisonReport, ExampleFamily, FamilyThreshold, GroupHypothesis, HeightReport, Hypothesis,
    OrbitDistinctness, DEFAULT_ORBIT_BITS,
};

use crate::output::{emit, render, Failure, OutputArgs, SCHEMA_VERSION};

pub fn parse_map(spec: &str) -> Result<RationalMap, Failure> {
    Ok(spec.parse::<MapSpec>()?.build()?)
}

fn parse_rational(s: &str) -> Result<BigRational, Failure> {
    ratio::parse(s).ok_or_else(|| Failure::Spec(format!("`{s}` is not a rational number")))
}

/// A group given by family name or by generators, optionally with a coset
/// representative.
#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    /// Family and degree, e.g. `S3`, `A4`, `C5`, `D6`.
    #[arg(long, alias = "group", conflicts_with = "generators")]
    pub family: Option<String>,
    /// Generators in cycle notation separated by `;`, e.g. `(0 1 2);(0 1)`.
    #[arg(long, requires = "degree")]
    pub generators: Option<String>,
    /// Degree of the generated group.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Use the coset `τG` for this `τ` instead of `G`.
    #[arg(long)]
    pub coset: Option<String>,
}

impl GroupArgs {
    fn explicit(&self) -> Result<Option<PermutationSet>, Failure> {
        let Some(gens) = &self.generators else {
            return Ok(None);
        };
        let degree = self.degree.unwrap();
        let gens = gens
            .split(';')
            .filter(|g| !g.trim().is_empty())
            .map(|g| Permutation::parse(g, Some(degree)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(generate_from(degree, &gens)?))
    }

    fn family(&self) -> Result<Option<(Family, usize)>, Failure> {
        self.family
            .as_deref()
            .map(parse_family_degree)
            .transpose()
            .map_err(Failure::from)
    }

    /// The compare hypothesis, defaulting to `S_d` for the given map degree.
    pub fn hypothesis(&self, default_degree: usize) -> Result<Hypothesis, Failure> {
        let group = match (self.explicit()?, self.family()?) {
            (Some(set), _) => GroupHypothesis::Explicit(set),
            (None, Some((f, d))) => GroupHypothesis::Family(f, d),
            (None, None) => GroupHypothesis::Family(Family::Sd, default_degree),
        };
        let degree = match &group {
            GroupHypothesis::Family(_, d) => *d,
            GroupHypothesis::Explicit(set) => set.degree(),
        };
        let coset = self
            .coset
            .as_deref()
            .map(|t| Permutation::parse(t, Some(degree)))
            .transpose()?;
        Ok(Hypothesis { group, coset })
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Map description, e.g. `p=7; num=1,0,1` or `p=11; num=0,1; den=1,0,1`.
    #[arg(long)]
    pub map: String,
    /// Largest iterate to report.
    #[arg(long, short, default_value_t = 3)]
    pub n: usize,
    /// Iterate whose fiber distribution is reported.
    #[arg(long, default_value_t = 1)]
    pub fiber_n: usize,
    /// Estimate the fiber distribution from this many random targets.
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Serialize)]
struct AnalyzeReport {
    schema_version: u32,
    map: String,
    p: u64,
    n_max: usize,
    image_sizes: Vec<u64>,
    affine_image_sizes: Vec<u64>,
    periodic_count: u64,
    cycle_lengths: Vec<u64>,
    max_tail_length: u64,
    bijective: bool,
    fiber: FiberHistogram,
    orbit_separation: OrbitReport,
}

#[derive(Serialize)]
struct ImageRow {
    n: usize,
    image_size: u64,
    affine_image_size: u64,
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let map = parse_map(&args.map)?;
    let graph = build_graph(&map)?;
    let image_sizes = graph.image_sizes(args.n)?;
    let affine_image_sizes = graph.affine_image_sizes(args.n)?;
    let (periodic_count, cycles) = graph.periodic_count();
    let mode = match args.sample {
        Some(count) => FiberMode::Sample {
            count,
            seed: args.seed,
        },
        None => FiberMode::Exhaustive,
    };
    let report = AnalyzeReport {
        schema_version: SCHEMA_VERSION,
        map: map.to_spec(),
        p: map.field().modulus(),
        n_max: args.n,
        periodic_count,
        cycle_lengths: cycles.to_vec(),
        max_tail_length: graph.max_tail_length(),
        bijective: graph.is_bijection(),
        fiber: fiber_histogram(&map, args.fiber_n, mode)?,
        orbit_separation: check_orbit_separation(&map, args.n)?.with_graph(&graph),
        image_sizes,
        affine_image_sizes,
    };
    let rows = (0..args.n).map(|i| ImageRow {
        n: i + 1,
        image_size: report.image_sizes[i],
        affine_image_size: report.affine_image_sizes[i],
    });
    emit(&args.out, &render(args.out.format, &report, rows)?)
}

#[derive(Debug, Clone, Args)]
pub struct IndicatrixArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Enumerate the family instead of using its closed form.
    #[arg(long)]
    pub enumerate: bool,
    /// Length of the fixed-point-proportion table for the iterated wreath product.
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Serialize)]
struct IndicatrixReport {
    schema_version: u32,
    set: String,
    elements: Option<usize>,
    indicatrix: IndicatrixPolynomial,
    first_derivative_at_one: String,
    second_derivative_at_one: String,
    fixed_point_free_element: bool,
    fpp: Vec<FppValue>,
}

#[derive(Serialize)]
struct FppRow {
    n: usize,
    exact: Option<String>,
    approx: String,
}

pub fn indicatrix_cmd(args: &IndicatrixArgs, bit_budget: u64) -> Result<(), Failure> {
    let g = &args.group;
    let (label, elements, phi) = match (g.explicit()?, g.family()?) {
        (Some(set), _) => coset_or_group(format!("<{} generated>", set.len()), set, g)?,
        (None, Some((f, d))) if g.coset.is_none() && !args.enumerate => (
            format!("{}{d}", f.name()),
            None,
            closed_form_indicatrix(f, d)?,
        ),
        (None, Some((f, d))) => coset_or_group(format!("{}{d}", f.name()), make_group(f, d)?, g)?,
        (None, None) => return Err(Failure::Spec("give --family or --generators".into())),
    };
    let (first, second) = phi.derivative_invariants();
    let report = IndicatrixReport {
        schema_version: SCHEMA_VERSION,
        set: label,
        elements,
        first_derivative_at_one: ratio::to_text(&first),
        second_derivative_at_one: ratio::to_text(&second),
        fixed_point_free_element: phi.has_fixed_point_free_element(),
        fpp: fpp_sequence(&phi, args.n_max, bit_budget),
        indicatrix: phi,
    };
    let rows = report.fpp.iter().map(|v| FppRow {
        n: v.n,
        exact: v.exact.as_ref().map(ratio::to_text),
        approx: v.approx.clone(),
    });
    emit(&args.out, &render(args.out.format, &report, rows)?)
}

fn coset_or_group(
    label: String,
    group: PermutationSet,
    g: &GroupArgs,
) -> Result<(String, Option<usize>, IndicatrixPolynomial), Failure> {
    match &g.coset {
        None => Ok((label, Some(group.len()), indicatrix(&group)?)),
        Some(t) => {
            let tau = Permutation::parse(t, Some(group.degree()))?;
            let coset = make_coset(&tau, &group)?;
            Ok((
                format!("{tau}·{label}"),
                Some(coset.len()),
                indicatrix(&coset)?,
            ))
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// One of `S`, `A`, `C`, `D` (also `Sd`, `Ad`, `Cd`, `Dd`).
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    /// Also check the comparison lemma between degree `d` and this smaller degree.
    #[arg(long)]
    pub lemma_k: Option<usize>,
    /// Grid step for the comparison lemma.
    #[arg(long)]
    pub grid_step: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Serialize)]
struct BoundsReport {
    schema_version: u32,
    all_pass: bool,
    bounds: BoundReport,
    lemma: Option<DominationReport>,
}

#[derive(Serialize)]
struct BoundCsvRow {
    n: usize,
    fpp: Option<String>,
    fpp_decimal: String,
    lower: Option<String>,
    upper: String,
    pass: bool,
}

pub fn bounds(args: &BoundsArgs, bit_budget: u64) -> Result<(), Failure> {
    let family: Family = args.family.parse()?;
    let bounds = verify_fpp_bounds(family, args.d, args.n_max, bit_budget)?;
    let lemma = match args.lemma_k {
        None => None,
        Some(k) => {
            let (d, lemma) = (args.d, family);
            let lemma = match lemma {
                Family::Sd => Lemma::Scompare { d, k },
                Family::Ad => Lemma::Acompare { d, k },
                Family::Dd => Lemma::Dcompare { d, k },
                Family::Cd => {
                    return Err(Failure::Spec(
                        "no comparison lemma for the cyclic family".into(),
                    ))
                }
            };
            let step = args
                .grid_step
                .as_deref()
                .map(parse_rational)
                .transpose()?
                .unwrap_or_else(default_grid_step);
            Some(verify_domination(&lemma, &step)?)
        }
    };
    let report = BoundsReport {
        schema_version: SCHEMA_VERSION,
        all_pass: bounds.all_pass() && lemma.as_ref().is_none_or(|l| l.pass),
        bounds,
        lemma,
    };
    let rows = report.bounds.rows.iter().map(|r| BoundCsvRow {
        n: r.n,
        fpp: r.fpp.exact.as_ref().map(ratio::to_text),
        fpp_decimal: r.fpp.approx.clone(),
        lower: r.lower.as_ref().map(|b| b.value.clone()),
        upper: r.upper.value.clone(),
        pass: r.pass,
    });
    emit(&args.out, &render(args.out.format, &report, rows)?)
}

/// Options shared by `compare` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct CompareSettings {
    /// Largest iterate.
    #[arg(long, short, default_value_t = 4)]
    pub n: usize,
    /// Tolerance on `|#φⁿ(P¹)/(p+1) − FPP_n|`.
    #[arg(long, default_value_t = 0.02)]
    pub tolerance: f64,
    /// Error constant in the Chebotarev radius, as an integer or `a/b`.
    #[arg(long, default_value = "3")]
    pub m: String,
}

impl CompareSettings {
    pub fn options(&self, bit_budget: u64) -> Result<CompareOptions, Failure> {
        if self.n == 0 {
            return Err(Failure::Spec("--n must be at least 1".into()));
        }
        Ok(CompareOptions {
            tolerance: self.tolerance,
            m_const: parse_rational(&self.m)?,
            bit_budget,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub map: String,
    /// Group hypothesis such as `S2`; defaults to `S_d` for the map degree.
    #[arg(long, alias = "hypothesis")]
    pub family: Option<String>,
    #[arg(long, requires = "degree")]
    pub generators: Option<String>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub coset: Option<String>,
    #[command(flatten)]
    pub settings: CompareSettings,
    #[command(flatten)]
    pub out: OutputArgs,
}

impl CompareArgs {
    pub fn group_args(&self) -> GroupArgs {
        GroupArgs {
            family: self.family.clone(),
            generators: self.generators.clone(),
            degree: self.degree,
            coset: self.coset.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct CompareCsvRow {
    n: usize,
    image_size: u64,
    ratio: String,
    fpp: Option<String>,
    fpp_decimal: String,
    deviation: f64,
    center: Option<String>,
    radius: Option<String>,
    vacuous: bool,
    within_radius: Option<bool>,
    within_tolerance: bool,
    theory_applicable: bool,
}

fn real_text(r: &Real) -> String {
    match r {
        Real::Exact(x) => ratio::to_text(x),
        Real::Approx(iv) => iv.to_decimal(20),
    }
}

pub fn compare_rows(report: &ComparisonReport) -> Vec<CompareCsvRow> {
    report
        .rows
        .iter()
        .map(|r| CompareCsvRow {
            n: r.n,
            image_size: r.image_size,
            ratio: ratio::to_text(&r.ratio),
            fpp: r.fpp.exact.as_ref().map(ratio::to_text),
            fpp_decimal: r.fpp.approx.clone(),
            deviation: r.deviation,
            center: r.prediction.as_ref().map(|p| real_text(&p.center)),
            radius: r.prediction.as_ref().map(|p| real_text(&p.radius)),
            vacuous: r.vacuous,
            within_radius: r.within_radius,
            within_tolerance: r.within_tolerance,
            theory_applicable: r.theory_applicable,
        })
        .collect()
}

pub fn compare_cmd(args: &CompareArgs, bit_budget: u64) -> Result<(), Failure> {
    let map = parse_map(&args.map)?;
    let hypothesis = args.group_args().hypothesis(map.degree())?;
    let report = compare(
        &map,
        &hypothesis,
        args.settings.n,
        &args.settings.options(bit_budget)?,
    )?;
    emit(
        &args.out,
        &render(args.out.format, &report, compare_rows(&report))?,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// `a·x^d + c`
    AxdPlusC,
    /// `(d−1)·x^d + d·a·x^{d−1}`
    Odoni,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum, required_unless_present = "poly")]
    pub family: Option<FamilyKind>,
    /// Arbitrary integer polynomial, constant term first, e.g. `1,0,1`.
    #[arg(long, conflicts_with = "family")]
    pub poly: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub a: u64,
    #[arg(long, default_value_t = 1)]
    pub c: u64,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Largest iterate.
    #[arg(long, short, default_value_t = 3)]
    pub n: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Serialize)]
struct FamilyReport {
    schema_version: u32,
    coefficients: Vec<String>,
    family: Option<ExampleFamily>,
    characteristic_threshold: Option<FamilyThreshold>,
    heights: HeightReport,
    rows: Vec<FamilyRow>,
    orbits: OrbitDistinctness,
}

#[derive(Serialize)]
struct FamilyRow {
    n: u32,
    /// `⌈2B^{2dⁿ}⌉`; empty when beyond the bit budget.
    prime_threshold: Option<String>,
    orbit_spread: String,
    orbit_max_abs: String,
    dominates: Option<bool>,
}

pub fn family_cmd(args: &FamilyArgs, bit_budget: u64) -> Result<(), Failure> {
    let family = args.family.map(|kind| match kind {
        FamilyKind::AxdPlusC => ExampleFamily::AxdPlusC {
            a: args.a,
            c: args.c,
            d: args.d,
        },
        FamilyKind::Odoni => ExampleFamily::Odoni {
            a: args.a,
            d: args.d,
        },
    });
    let coeffs: Vec<i128> = match (&family, &args.poly) {
        (Some(f), _) => f.coefficients(),
        (None, Some(p)) => p
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i128>()
                    .map_err(|e| Failure::Spec(format!("bad coefficient `{c}`: {e}")))
            })
            .collect::<Result<_, _>>()?,
        (None, None) => unreachable!("clap requires one of --family, --poly"),
    };
    if args.n == 0 {
        return Err(Failure::Spec("--n must be at least 1".into()));
    }
    let characteristic_threshold = family
        .map(|f| family_threshold(f, args.n, bit_budget))
        .transpose()?;
    let heights = height_constants(&coeffs)?;
    let orbits = exact_orbit_distinctness(&coeffs, args.n as usize, DEFAULT_ORBIT_BITS)?;
    let mut rows = Vec::new();
    for n in 1..=args.n {
        let values = || orbits.orbits.iter().flat_map(|o| &o.values[..n as usize]);
        let max_abs = values().map(|v| v.abs()).max().unwrap_or_default();
        let spread = match (values().min(), values().max()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => BigInt::default(),
        };
        let threshold = heights.prime_threshold(n, bit_budget).ok();
        rows.push(FamilyRow {
            n,
            dominates: threshold.as_ref().map(|t| *t >= spread && *t >= max_abs),
            prime_threshold: threshold.map(|t| t.to_string()),
            orbit_spread: spread.to_string(),
            orbit_max_abs: max_abs.to_string(),
        });
    }
    let report = FamilyReport {
        schema_version: SCHEMA_VERSION,
        coefficients: coeffs.iter().map(i128::to_string).collect(),
        family,
        characteristic_threshold,
        heights,
        orbits,
        rows,
    };
    emit(&args.out, &render(args.out.format, &report, &report.rows)?)
}
