use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use paretomatch::caw::{caw_weak_stability_check, CawViolation};
use paretomatch::format::{
    emit_instance, emit_matching, emit_matching_set, parse_caw_matching, parse_instance,
    parse_smiw_matching, parse_utilities, Instance, ParseError,
};
use paretomatch::gen::{random_caw_with_capacity, random_smiw};
use paretomatch::oracles::{
    dominating_matching, manipulation_search, pareto_stable_set, two_phase_baseline,
    weakly_stable_set, ManipulationReport, Market,
};
use paretomatch::smiw::{excluded_man_threshold, solve_smiw_with};
use paretomatch::{solve_caw, solve_smiw, MatchingOutcome, SmiwInstance, UtilityAssignment};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FORMAT_HELP: &str = "\
Instance files start with SMIW or CAW. Indices are 1-based, `_` means
unmatched, `|` separates indifference tiers, `#` starts a comment.

  SMIW                      CAW
  men 3                     students 2
  women 3                   colleges 1
  man 1: 2 | 3 | 1 | _      mode additive
  woman 2: 1 2 3 | _        college 1 capacity: 2
                            student 1: 1 | _
                            college 1: 1 | 2 | _
                            college 1 utility: 1:5 2:1

In `college <j> utility:` lines, students that are not listed keep their
canonical utility. Utility lines imply additive mode.

Exit codes: 0 success, 1 failed verification or improving misreport found,
2 usage error, 3 parse error, 4 any other error.";

#[derive(Parser)]
#[command(name = "paretomatch", version, about = "Pareto-stable matching with weak preferences", after_help = FORMAT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the mechanism and print the matching.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// UTILITIES file overriding the canonical utilities (SMIW only).
        #[arg(long)]
        utilities: Option<PathBuf>,
    },
    /// Check a matching against an instance.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        matching: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        check: CheckKind,
    },
    /// Print every weakly stable or Pareto-stable matching (small instances).
    Enumerate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        set: SetKind,
    },
    /// Search all misreports of one man or student for an improvement.
    Manipulate {
        #[arg(long)]
        input: PathBuf,
        /// 1-based man or student index.
        #[arg(long)]
        agent: usize,
        #[arg(long, value_enum, default_value = "paper")]
        mechanism: Mechanism,
    },
    /// Threshold of an item in the auction without one man (SMIW only).
    Threshold {
        #[arg(long)]
        input: PathBuf,
        /// 1-based item index; items n+1..2n are the dummies.
        #[arg(long)]
        item: usize,
        /// 1-based man index.
        #[arg(long)]
        exclude_man: usize,
    },
    /// Run the two-phase tie-breaking baseline (SMIW only).
    Baseline {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print a random instance.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Men and women (SMIW) or students and total capacity (CAW).
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        tie_prob: f64,
        #[arg(long, default_value_t = 2)]
        max_cap: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Ir,
    Stable,
    Pareto,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetKind {
    Stable,
    Pareto,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mechanism {
    Paper,
    TwoPhase,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Smiw,
    Caw,
}

enum Failure {
    /// Verification failed or a manipulation exists; the report is on stdout.
    Negative,
    Parse(PathBuf, ParseError),
    Other(String),
}

impl From<paretomatch::Error> for Failure {
    fn from(e: paretomatch::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

type Run = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Parse(path, e)) => {
            eprintln!("{}: {e}", path.display());
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::Parse(path.to_owned(), e))
}

fn load_smiw(path: &Path, command: &str) -> Result<SmiwInstance, Failure> {
    match load(path)? {
        Instance::Smiw(x) => Ok(x),
        Instance::Caw(_) => Err(Failure::Other(format!("{command} needs an SMIW instance"))),
    }
}

fn run(command: Command) -> Run {
    match command {
        Command::Solve { input, utilities } => solve(&input, utilities.as_deref()),
        Command::Verify {
            input,
            matching,
            check,
        } => verify(&input, &matching, check),
        Command::Enumerate { input, set } => enumerate(&input, set),
        Command::Manipulate {
            input,
            agent,
            mechanism,
        } => manipulate(&input, agent, mechanism),
        Command::Threshold {
            input,
            item,
            exclude_man,
        } => {
            let x = load_smiw(&input, "threshold")?;
            if exclude_man == 0 {
                return Err(Failure::Other("--exclude-man is 1-based".into()));
            }
            println!("{}", excluded_man_threshold(&x, exclude_man - 1, item)?);
            Ok(())
        }
        Command::Baseline { input } => {
            let x = load_smiw(&input, "baseline")?;
            print!("{}", emit_matching(two_phase_baseline(&x)?.assignment()));
            Ok(())
        }
        Command::Gen {
            kind,
            n,
            seed,
            tie_prob,
            max_cap,
        } => {
            if !(0.0..=1.0).contains(&tie_prob) {
                return Err(Failure::Other("--tie-prob must lie in [0, 1]".into()));
            }
            if max_cap == 0 {
                return Err(Failure::Other("--max-cap must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let instance = match kind {
                Kind::Smiw => Instance::Smiw(random_smiw(&mut rng, n, n, tie_prob)),
                Kind::Caw => {
                    Instance::Caw(random_caw_with_capacity(&mut rng, n, n, max_cap, tie_prob))
                }
            };
            print!("{}", emit_instance(&instance));
            Ok(())
        }
    }
}

fn solve(input: &Path, utilities: Option<&Path>) -> Run {
    let assignment = match (load(input)?, utilities) {
        (Instance::Smiw(x), None) => solve_smiw(&x)?.assignment().to_vec(),
        (Instance::Smiw(x), Some(path)) => {
            let u: UtilityAssignment = parse_utilities(&read(path)?, &x)
                .map_err(|e| Failure::Parse(path.to_owned(), e))?;
            solve_smiw_with(&x, &u)?.assignment().to_vec()
        }
        (Instance::Caw(x), None) => solve_caw(&x)?.assignment().to_vec(),
        (Instance::Caw(_), Some(_)) => {
            return Err(Failure::Other(
                "--utilities is for SMIW; put CAW utilities in the instance file".into(),
            ))
        }
    };
    print!("{}", emit_matching(&assignment));
    Ok(())
}

fn alt(a: Option<usize>) -> String {
    a.map_or("_".into(), |j| (j + 1).to_string())
}

/// Prints one verdict line and returns whether it passed.
fn verdict(name: &str, problems: &[String]) -> bool {
    if problems.is_empty() {
        println!("{name}: ok");
    } else {
        println!("{name}: FAIL");
        for p in problems {
            println!("  {p}");
        }
    }
    problems.is_empty()
}

fn pareto_problems<M: Market>(
    x: &M,
    out: &M::Outcome,
    show: impl Fn(&M::Outcome) -> String,
) -> Result<Vec<String>, Failure> {
    if !weakly_stable_set(x)?.contains(out) {
        return Ok(vec!["not weakly stable".into()]);
    }
    Ok(dominating_matching(x, out)?
        .map(|better| format!("dominated by {}", show(&better)))
        .into_iter()
        .collect())
}

fn compact(assignment: &[Option<usize>]) -> String {
    let pairs: Vec<String> = assignment
        .iter()
        .enumerate()
        .map(|(i, a)| format!("{}-{}", i + 1, alt(*a)))
        .collect();
    pairs.join(" ")
}

fn verify(input: &Path, matching: &Path, check: CheckKind) -> Run {
    let text = read(matching)?;
    let parse_err = |e| Failure::Parse(matching.to_owned(), e);
    let wants = |k: CheckKind| check == k || check == CheckKind::All;
    let mut ok = true;
    match load(input)? {
        Instance::Smiw(x) => {
            let out = parse_smiw_matching(&text, &x).map_err(parse_err)?;
            if wants(CheckKind::Ir) {
                ok &= verdict("ir", &smiw_ir_problems(&x, &out));
            }
            if wants(CheckKind::Stable) {
                let pairs: Vec<String> = x
                    .blocking_pairs(&out)
                    .into_iter()
                    .map(|(p, q)| format!("blocking pair (man {}, woman {})", p + 1, q + 1))
                    .collect();
                ok &= verdict("stable", &[smiw_ir_problems(&x, &out), pairs].concat());
            }
            if wants(CheckKind::Pareto) {
                let problems =
                    pareto_problems(&x, &out, |m: &MatchingOutcome| compact(m.assignment()))?;
                ok &= verdict("pareto", &problems);
            }
        }
        Instance::Caw(x) => {
            let out = parse_caw_matching(&text, &x).map_err(parse_err)?;
            let violations = caw_weak_stability_check(&x, &out);
            let is_ir = |v: &&CawViolation| {
                matches!(
                    v,
                    CawViolation::StudentFindsUnacceptable { .. }
                        | CawViolation::CollegeFindsUnacceptable { .. }
                )
            };
            if wants(CheckKind::Ir) {
                let problems: Vec<String> = violations.iter().filter(is_ir).map(describe).collect();
                ok &= verdict("ir", &problems);
            }
            if wants(CheckKind::Stable) {
                ok &= verdict(
                    "stable",
                    &violations.iter().map(describe).collect::<Vec<_>>(),
                );
            }
            if wants(CheckKind::Pareto) {
                let problems = pareto_problems(&x, &out, |m| compact(m.assignment()))?;
                ok &= verdict("pareto", &problems);
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn smiw_ir_problems(x: &SmiwInstance, out: &MatchingOutcome) -> Vec<String> {
    let mut problems = Vec::new();
    for (p, q) in out.pairs() {
        if !x.men()[p].is_acceptable(q) {
            problems.push(format!("man {} finds woman {} unacceptable", p + 1, q + 1));
        }
        if !x.women()[q].is_acceptable(p) {
            problems.push(format!("woman {} finds man {} unacceptable", q + 1, p + 1));
        }
    }
    problems
}

fn describe(v: &CawViolation) -> String {
    match *v {
        CawViolation::OverCapacity { college, admitted } => {
            format!(
                "college {} admits {admitted} students, over capacity",
                college + 1
            )
        }
        CawViolation::StudentFindsUnacceptable { student, college } => {
            format!(
                "student {} finds college {} unacceptable",
                student + 1,
                college + 1
            )
        }
        CawViolation::CollegeFindsUnacceptable { student, college } => {
            format!(
                "college {} finds student {} unacceptable",
                college + 1,
                student + 1
            )
        }
        CawViolation::BlockingDisplace {
            student,
            college,
            displaced,
        } => format!(
            "student {} and college {} block, displacing student {}",
            student + 1,
            college + 1,
            displaced + 1
        ),
        CawViolation::BlockingVacancy { student, college } => format!(
            "student {} and college {} block with a free seat",
            student + 1,
            college + 1
        ),
    }
}

fn enumerate(input: &Path, set: SetKind) -> Run {
    let text = match load(input)? {
        Instance::Smiw(x) => {
            let s = match set {
                SetKind::Stable => weakly_stable_set(&x)?,
                SetKind::Pareto => pareto_stable_set(&x)?,
            };
            emit_matching_set(s.iter().map(|m| m.assignment()))
        }
        Instance::Caw(x) => {
            let s = match set {
                SetKind::Stable => weakly_stable_set(&x)?,
                SetKind::Pareto => pareto_stable_set(&x)?,
            };
            emit_matching_set(s.iter().map(|m| m.assignment()))
        }
    };
    print!("{text}");
    Ok(())
}

fn report_misreports(reports: &[ManipulationReport]) -> Run {
    let improving: Vec<&ManipulationReport> = reports.iter().filter(|r| r.improved).collect();
    if improving.is_empty() {
        println!("no improving misreport among {} reports", reports.len());
        return Ok(());
    }
    for r in improving {
        println!(
            "agent {} reports {}: gets {} instead of {}",
            r.agent + 1,
            r.misreport,
            alt(r.misreport_result),
            alt(r.truthful_result)
        );
    }
    Err(Failure::Negative)
}

fn manipulate(input: &Path, agent: usize, mechanism: Mechanism) -> Run {
    let agent = agent
        .checked_sub(1)
        .ok_or_else(|| Failure::Other("--agent is 1-based".into()))?;
    let reports = match (load(input)?, mechanism) {
        (Instance::Smiw(x), Mechanism::Paper) => manipulation_search(&x, agent, solve_smiw)?,
        (Instance::Smiw(x), Mechanism::TwoPhase) => {
            manipulation_search(&x, agent, two_phase_baseline)?
        }
        (Instance::Caw(x), Mechanism::Paper) => manipulation_search(&x, agent, solve_caw)?,
        (Instance::Caw(_), Mechanism::TwoPhase) => {
            return Err(Failure::Other(
                "the two-phase baseline takes SMIW instances".into(),
            ))
        }
    };
    report_misreports(&reports)
}
