use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::str::FromStr;

use rainbow_coded::mapreduce::{
    cdc_bound, multicast_baseline, run_reduce, synthesize_shuffle, MapReduceInstance, PlanReport,
};
use rainbow_coded::rainbow3ap::{
    build_rainbow_ap, build_rainbow_scheme, exponent_sweep, RainbowApSet, Strategy,
};
use rainbow_coded::rational::{decimal, exact, Rational};
use rainbow_coded::schemes::{
    cutset_bound, man_rate, scheme_cyclic, scheme_linear_block, scheme_man, scheme_union_subsets,
    CachingScheme, Delivery, Pda, SchemeDoc,
};
use rainbow_coded::simulator::{compare_bounds, sweep, DemandPolicy, Library};
use rainbow_coded::universe::{
    validate_rainbow, CustomSigma, Element, RainbowReport, SigmaStructure, UniverseDoc,
};

use crate::error::CliError;
use crate::{
    exec, BuildArgs, BuildKind, MapReduceArgs, PolicyArg, SearchArgs, SimulateArgs, StrategyArg,
};

type CmdResult = Result<ExitCode, CliError>;

/// A structure to validate against; `None` skips the rainbow check and
/// leaves only the per-class decodability check.
#[derive(Clone, Debug)]
pub enum SigmaArg {
    None,
    Sigma(SigmaStructure),
}

impl SigmaArg {
    fn structure(&self) -> SigmaStructure {
        match self {
            SigmaArg::Sigma(s) => s.clone(),
            SigmaArg::None => SigmaStructure::Custom(
                CustomSigma::new("none", 2, |_: &[&Element]| false).expect("arity 2 is supported"),
            ),
        }
    }
}

/// `none`, `three-ap`, `pda-strong-edge` or `subset-rainbow:<a>`.
pub fn parse_sigma(s: &str) -> Result<SigmaArg, String> {
    match s {
        "none" => Ok(SigmaArg::None),
        "three-ap" => Ok(SigmaArg::Sigma(SigmaStructure::ThreeAp)),
        "pda-strong-edge" => Ok(SigmaArg::Sigma(SigmaStructure::PdaStrongEdge)),
        _ => match s.strip_prefix("subset-rainbow:").map(str::parse::<usize>) {
            Some(Ok(a)) => Ok(SigmaArg::Sigma(SigmaStructure::SubsetRainbow(a))),
            _ => Err(format!("unknown structure {s:?}; expected none, three-ap, pda-strong-edge or subset-rainbow:<a>")),
        },
    }
}

fn both(r: Rational) -> String {
    format!("{} ({})", decimal(r), exact(r))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_rational(s: &str) -> Result<Rational, CliError> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| CliError::Input(format!("not a number: {s:?}")))
}

fn parse_generator(s: &str) -> Result<Vec<Vec<u32>>, CliError> {
    s.split(';')
        .map(|row| {
            row.split([',', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| CliError::Input(format!("bad generator entry {t:?}")))
                })
                .collect()
        })
        .collect()
}

fn load_universe_scheme(
    path: &Path,
    sigma: &SigmaArg,
    delivery: Delivery,
) -> Result<CachingScheme, CliError> {
    let (universe, coloring) = UniverseDoc::from_str(&read(path)?)?.decode()?;
    Ok(CachingScheme::build(
        universe,
        coloring,
        &sigma.structure(),
        delivery,
    )?)
}

fn print_scheme(scheme: &CachingScheme) {
    println!("{}", scheme.params().summary());
    println!("{}", scheme.params().exact());
}

pub fn build(args: BuildArgs) -> CmdResult {
    let delivery: Delivery = args.field.into();
    let scheme = match args.kind {
        BuildKind::Man { users, t } => scheme_man(users, t, delivery)?,
        BuildKind::UnionSubsets { n, a, b } => scheme_union_subsets(n, a, b, delivery)?,
        BuildKind::LinearBlock { generator, q } => {
            scheme_linear_block(&parse_generator(&generator)?, q, delivery)?
        }
        BuildKind::Cyclic { n } => scheme_cyclic(n, delivery)?,
        BuildKind::Rainbow3ap {
            m,
            explicit,
            strategy,
            budget,
        } => {
            let set = match explicit {
                Some(path) => {
                    let set = RainbowApSet::from_json(&read(&path)?)?;
                    if m.is_some_and(|m| m != set.half()) {
                        return Err(CliError::Domain(format!(
                            "--m {} disagrees with n = {}",
                            m.unwrap(),
                            set.ground()
                        )));
                    }
                    set
                }
                None => {
                    let m =
                        m.ok_or_else(|| CliError::Input("--m or --explicit is required".into()))?;
                    build_rainbow_ap(m, strategy_of(strategy, budget, Vec::new()))?
                }
            };
            build_rainbow_scheme(&set, delivery)?
        }
        BuildKind::PdaImport { path } => Pda::parse(&read(&path)?)?.to_scheme(delivery)?,
        BuildKind::Universe { path, sigma } => load_universe_scheme(&path, &sigma, delivery)?,
    };
    print_scheme(&scheme);
    if let Some(out) = args.out {
        write(&out, &SchemeDoc::new(&scheme).to_string_pretty())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn strategy_of(strategy: StrategyArg, budget: Option<usize>, deletions: Vec<i64>) -> Strategy {
    match strategy {
        StrategyArg::Greedy => Strategy::Greedy { budget },
        StrategyArg::Exact => Strategy::Exact { budget, deletions },
    }
}

pub fn validate(path: &Path, sigma: &SigmaArg) -> CmdResult {
    let (_, coloring) = UniverseDoc::from_str(&read(path)?)?.decode()?;
    match validate_rainbow(&coloring, &sigma.structure())? {
        RainbowReport::Pass => {
            println!(
                "PASS elements={} colors={}",
                coloring.len(),
                coloring.num_colors()
            );
            Ok(ExitCode::SUCCESS)
        }
        RainbowReport::Fail { instance, colors } => {
            let shown: Vec<String> = instance.iter().map(Element::to_string).collect();
            println!("FAIL instance=({}) colors={colors:?}", shown.join(", "));
            Ok(ExitCode::from(1))
        }
    }
}

pub fn simulate(args: SimulateArgs) -> CmdResult {
    let doc = SchemeDoc::from_str(&read(&args.path)?)?;
    let scheme = match args.field {
        Some(d) => doc.to_scheme_with(d.into())?,
        None => doc.to_scheme()?,
    };
    let files = args.files.unwrap_or(scheme.params().k);
    let library = Library::synthesize(files, scheme.params().f, args.packet_size, args.seed);
    let policy = match args.policy {
        PolicyArg::Exhaustive => DemandPolicy::Exhaustive,
        PolicyArg::Random => DemandPolicy::Random {
            count: args.count,
            seed: args.seed,
        },
        PolicyArg::Worst => DemandPolicy::WorstCaseDistinct,
    };
    let report = sweep(&scheme, &library, &policy, exec(args.sequential))?;
    let bounds = compare_bounds(&report);
    let cutset = bounds
        .iter()
        .find(|b| b.name == "cut-set bound")
        .map(|b| b.value)
        .unwrap_or_default();
    println!(
        "R={} predicted={} cutset={} demands={} failures={}",
        decimal(report.realized_rate),
        decimal(report.predicted_rate),
        decimal(cutset),
        report.outcomes.len(),
        report.failures()
    );
    for b in &bounds {
        println!("{}: {} slack={}", b.name, both(b.value), both(b.slack));
    }
    if let Some(out) = args.out {
        write(&out.with_extension("json"), &report.to_json())?;
        write(&out.with_extension("csv"), &report.to_csv())?;
    }
    Ok(if report.all_decoded && report.rate_matches_prediction {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn mapreduce(args: MapReduceArgs) -> CmdResult {
    let delivery: Delivery = args.field.into();
    let scheme = match (&args.path, args.cyclic) {
        (_, Some(n)) => scheme_cyclic(n, delivery)?,
        (Some(path), None) => load_universe_scheme(path, &args.sigma, delivery)?,
        (None, None) => {
            return Err(CliError::Input(
                "give a universe file or --cyclic <n>".into(),
            ))
        }
    };
    let functions = args.functions.unwrap_or(scheme.params().k);
    let instance = MapReduceInstance::build(&scheme, functions, args.value_size, args.seed)?;
    let plan = synthesize_shuffle(&instance, &scheme)?;
    let reduce = run_reduce(&instance, &plan);
    let report = PlanReport::new(&scheme, &instance, &plan, &reduce);
    println!(
        "r={} L={} bound={} m_prime={} reduce={}",
        decimal(report.r),
        decimal(report.load),
        decimal(report.bound),
        report.m_prime,
        if reduce.pass { "PASS" } else { "FAIL" }
    );
    println!(
        "L={} bound={} r={} plan={}",
        both(report.load),
        both(report.bound),
        both(report.r),
        report.kind
    );
    if args.compare {
        match multicast_baseline(&scheme, functions) {
            Some(b) => println!("baseline={}", both(b)),
            None => println!("baseline=n/a"),
        }
    }
    for m in &report.messages {
        println!("node {} sends {}", m.sender, m.terms.join(" + "));
    }
    if let Some(out) = args.out {
        write(&out, &report.to_json())?;
    }
    Ok(if reduce.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

pub fn bounds(users: usize, files: usize, memory: &str, r: Option<&str>) -> CmdResult {
    let memory = parse_rational(memory)?;
    if users == 0
        || files == 0
        || memory < Rational::from_integer(0)
        || memory > Rational::from_integer(files as i64)
    {
        return Err(CliError::Domain("need K, N >= 1 and 0 <= M <= N".into()));
    }
    let mut line = format!("cutset={}", both(cutset_bound(users, files, memory)));
    let t = memory * Rational::from_integer(users as i64) / Rational::from_integer(files as i64);
    if t.is_integer() && *t.numer() > 0 && (*t.numer() as usize) < users {
        line.push_str(&format!(
            " subset={}",
            both(man_rate(users, *t.numer() as usize))
        ));
    }
    if let Some(r) = r {
        line.push_str(&format!(
            " cdc={}",
            both(cdc_bound(parse_rational(r)?, users)?)
        ));
    }
    println!("{line}");
    Ok(ExitCode::SUCCESS)
}

pub fn search_rainbow(args: SearchArgs) -> CmdResult {
    if args.sweep {
        let halves: Vec<usize> = (1..=args.m).collect();
        for row in exponent_sweep(&halves, args.budget, exec(false))? {
            println!(
                "m={} colored={} colors={} alpha={:.4} beta={:.4} psi_colors={} rate={} uniform={}",
                row.m,
                row.colored,
                row.colors,
                row.alpha,
                row.beta,
                row.psi_colors,
                both(row.rate),
                row.uniform
            );
        }
        return Ok(ExitCode::SUCCESS);
    }
    let set = build_rainbow_ap(
        args.m,
        strategy_of(args.strategy, args.budget, args.deletions),
    )?;
    let counts: std::collections::BTreeSet<usize> =
        (1..=args.m as i64).map(|x| set.cached_count(x)).collect();
    println!(
        "m={} colored={} colors={} alpha={:.4} beta={:.4} strict={} uniform={}",
        set.half(),
        set.members().len(),
        set.num_colors(),
        set.alpha_emp(),
        set.beta_emp(),
        set.strictly_rainbow(),
        counts.len() == 1
    );
    if let Some(out) = args.out {
        write(&out, &set.to_json())?;
    }
    Ok(ExitCode::SUCCESS)
}
