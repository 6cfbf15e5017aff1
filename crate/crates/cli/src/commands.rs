use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use hindman_core::certificate::{
    format_set, read_certificate, verify_certificate, write_certificate, Certificate, CertificateError, Instance,
    InstanceColoring, Status, Witness,
};
use hindman_core::reductions::{
    chain_rt2_to_ipt2, reduce_aht_to_ipt2, reduce_aht_to_ipt2_supplied, reduce_rt2_to_aht, word_highest_letter,
    AhtSource, Outcome, PipelineOptions,
};
use hindman_core::solvers::{solve_aht, solve_hil, solve_ipt2, solve_rt2, Search, SearchBudget, MAX_HIL_BASE};
use hindman_core::{adjacent_sums, is_apart, lam, mu, BitBudget, Coloring, PairColoring, Word};

use crate::{Cli, ColoringArg, ColoringOpts, Command, Pipeline, Principle, ReduceArgs, SolveArgs, StageChoice, Util};

/// Process exit codes. These are a stable contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    /// No witness within the bound, or a certificate was rejected.
    None = 1,
    Usage = 2,
    Budget = 3,
}

/// Pair domain used for pipeline expressions when `--bound` is absent.
const DEFAULT_PAIR_BOUND: u64 = 12;
/// RT² exponent bound for `rt2-to-aht` when `--rt2-bound` is absent.
const DEFAULT_RT2_BOUND: u64 = 12;

pub fn run(cli: &Cli) -> Result<Exit> {
    let budget = BitBudget::new(cli.bit_budget)?;
    let ctx = Ctx {
        budget,
        threads: cli.threads.max(1),
    };
    match &cli.command {
        Command::Util(u) => util(u),
        Command::Solve(args) => ctx.solve(args),
        Command::Reduce(args) => ctx.reduce(args),
        Command::Verify { path } => verify(path),
    }
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn braces(xs: &[u64]) -> String {
    format!("{{{}}}", join(xs))
}

fn util(u: &Util) -> Result<Exit> {
    match u {
        Util::Lam { n } => println!("{}", lam(*n)?),
        Util::Mu { n } => println!("{}", mu(*n)?),
        Util::Apart { list } => println!("{}", is_apart(&list.0)?),
        Util::As { list, min, max } => {
            let runs = adjacent_sums(&list.0, *min, max.unwrap_or(list.0.len()))?;
            let sums: Vec<String> = runs.iter().map(|r| r.sum.to_string()).collect();
            println!("{}", sums.join(" "));
        }
    }
    Ok(Exit::Ok)
}

fn verify(path: &Path) -> Result<Exit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cert = read_certificate(&text).map_err(|e| match e {
        CertificateError::Parse { .. } => anyhow::anyhow!("{}: {e}", path.display()),
        other => anyhow::Error::new(other).context(path.display().to_string()),
    })?;
    let verdict = verify_certificate(&cert)?;
    println!("principle = {}", cert.principle());
    println!("verdict = {verdict}");
    Ok(if verdict.is_ok() { Exit::Ok } else { Exit::None })
}

struct Ctx {
    budget: BitBudget,
    threads: usize,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn check_colors(declared: Option<u32>, actual: u32) -> Result<()> {
    if let Some(k) = declared {
        ensure!(k == actual, "--colors {k} disagrees with the table's k = {actual}");
    }
    Ok(())
}

fn require_colors(opts: &ColoringOpts) -> Result<u32> {
    opts.colors.context("--colors is required for expression colorings")
}

fn require_coloring(opts: &ColoringOpts) -> Result<&ColoringArg> {
    opts.coloring.as_ref().context("--coloring is required")
}

impl Ctx {
    fn point(&self, opts: &ColoringOpts, domain: u64) -> Result<Coloring> {
        match require_coloring(opts)? {
            ColoringArg::Expr(src) => Ok(Coloring::parse_expr(src, require_colors(opts)?, domain)?),
            ColoringArg::Table(path) => {
                let c = Coloring::parse_table(&read(path)?).with_context(|| path.display().to_string())?;
                check_colors(opts.colors, c.colors())?;
                Ok(c)
            }
        }
    }

    fn pair(&self, opts: &ColoringOpts, domain: u64) -> Result<PairColoring> {
        match require_coloring(opts)? {
            ColoringArg::Expr(src) => Ok(PairColoring::parse_expr(src, require_colors(opts)?, domain)?),
            ColoringArg::Table(path) => {
                let f = PairColoring::parse_table(&read(path)?).with_context(|| path.display().to_string())?;
                check_colors(opts.colors, f.colors())?;
                Ok(f)
            }
        }
    }

    fn pipeline(&self, opts: &ColoringOpts) -> PipelineOptions {
        PipelineOptions {
            bit_budget: self.budget,
            node_limit: opts.node_limit,
            threads: self.threads,
        }
    }

    fn solve(&self, args: &SolveArgs) -> Result<Exit> {
        let o = &args.opts;
        let bound = o.bound.context("--bound is required")?;
        ensure!(o.size > 0, "--size must be at least 1");
        ensure!(
            !args.no_apart || args.principle == Principle::Aht,
            "--no-apart only applies to aht"
        );
        let search = SearchBudget::new(bound, o.size)
            .with_node_limit(o.node_limit)
            .with_threads(self.threads);
        let (coloring, found) = match args.principle {
            Principle::Aht => {
                let c = self.point(o, bound)?;
                let s = solve_aht(&c, &search.with_apart(!args.no_apart))?;
                (InstanceColoring::Point(c), s.map(|w| (Witness::Aht { h: w.h }, w.color)))
            }
            Principle::Rt2 => {
                let f = self.pair(o, bound)?;
                let s = solve_rt2(&f, &search)?;
                (InstanceColoring::Pair(f), s.map(|w| (Witness::Rt2 { j: w.j }, w.color)))
            }
            Principle::Ipt2 => {
                let f = self.pair(o, bound)?;
                let s = solve_ipt2(&f, &search)?;
                (InstanceColoring::Pair(f), s.map(|w| (Witness::Ipt2 { h1: w.h1, h2: w.h2 }, w.color)))
            }
            Principle::Hil => {
                ensure!(
                    (1..=MAX_HIL_BASE).contains(&bound),
                    "hil --bound is the base size and must lie in 1..={MAX_HIL_BASE}"
                );
                let c = self.point(o, (1 << bound) - 1)?;
                let s = solve_hil(&c, &search)?;
                (InstanceColoring::Point(c), s.map(|w| (Witness::Hil { sets: w.sets }, w.color)))
            }
        };
        let nodes = found.nodes();
        let (witness, color) = match found {
            Search::Found { witness, .. } => witness,
            Search::Exhausted { .. } => {
                println!("none within bound");
                println!("nodes = {nodes}");
                return Ok(Exit::None);
            }
            Search::BudgetExceeded { .. } => {
                println!("budget exceeded");
                println!("nodes = {nodes}");
                return Ok(Exit::Budget);
            }
        };
        let cert = Certificate {
            instance: Instance {
                coloring,
                size: o.size,
                bound,
                bit_budget: self.budget,
                require_apart: !args.no_apart && args.principle == Principle::Aht,
            },
            witness,
            color,
            exhaustive: true,
            status: Status::Unverified,
            stages: vec![],
        };
        let (cert, verdict) = cert.seal()?;
        ensure!(verdict.is_ok(), "internal error: solver witness rejected: {verdict}");
        print_witness(&cert.witness);
        println!("color = {}", cert.color);
        println!("nodes = {nodes}");
        write_out(&cert, o.out.as_deref())?;
        Ok(Exit::Ok)
    }

    fn reduce(&self, args: &ReduceArgs) -> Result<Exit> {
        let o = &args.opts;
        let opts = self.pipeline(o);
        ensure!(o.size > 0, "--size must be at least 1");
        let pipeline_only = |flag: &str, set: bool, allowed: &[Pipeline]| -> Result<()> {
            ensure!(!set || allowed.contains(&args.pipeline), "{flag} does not apply to this pipeline");
            Ok(())
        };
        pipeline_only("--word", args.word.is_some(), &[Pipeline::Word])?;
        pipeline_only("--witness", args.witness.is_some(), &[Pipeline::AhtToIpt2])?;
        pipeline_only("--aht-bound", args.aht_bound.is_some(), &[Pipeline::AhtToIpt2])?;
        pipeline_only(
            "--rt2-bound",
            args.rt2_bound.is_some(),
            &[Pipeline::Rt2ToAht, Pipeline::AhtToIpt2, Pipeline::Chain],
        )?;
        let outcome = match args.pipeline {
            Pipeline::Rt2ToAht => {
                let c = self.point(o, o.bound.unwrap_or(self.budget.max_value()))?;
                let rt2_bound = args.rt2_bound.unwrap_or(DEFAULT_RT2_BOUND);
                reduce_rt2_to_aht(&c, o.size, rt2_bound, &opts)?.map(|r| r.certificate)
            }
            Pipeline::AhtToIpt2 => {
                let f = self.pair(o, o.bound.unwrap_or(DEFAULT_PAIR_BOUND))?;
                if let Some(h) = &args.witness {
                    ensure!(
                        args.aht_bound.is_none() && args.rt2_bound.is_none(),
                        "--witness replaces the AHT search, so search bounds do not apply"
                    );
                    Outcome::Found(reduce_aht_to_ipt2_supplied(&f, &h.0, &opts)?.certificate)
                } else {
                    let source = match args.aht_stage {
                        StageChoice::Search => {
                            ensure!(args.rt2_bound.is_none(), "--rt2-bound needs --aht-stage chain");
                            AhtSource::Search { bound: args.aht_bound }
                        }
                        StageChoice::Chain => {
                            ensure!(args.aht_bound.is_none(), "--aht-bound needs --aht-stage search");
                            AhtSource::Chain {
                                rt2_bound: args.rt2_bound,
                            }
                        }
                    };
                    reduce_aht_to_ipt2(&f, o.size, source, &opts)?.map(|r| r.certificate)
                }
            }
            Pipeline::Chain => {
                let f = self.pair(o, o.bound.unwrap_or(DEFAULT_PAIR_BOUND))?;
                chain_rt2_to_ipt2(&f, o.size, args.rt2_bound, &opts)?.map(|r| r.certificate)
            }
            Pipeline::Word => {
                ensure!(o.coloring.is_none() && o.colors.is_none(), "the word pipeline takes --word, not a coloring");
                let path = args.word.as_deref().context("--word is required")?;
                let w = Word::parse(&read(path)?).with_context(|| path.display().to_string())?;
                word_highest_letter(&w, o.size, o.bound, &opts)?.map(|r| r.certificate)
            }
        };
        let cert = match outcome {
            Outcome::Found(cert) => cert,
            Outcome::NoWitness { stage, nodes } => {
                println!("none within bound");
                println!("stage = {stage}");
                println!("nodes = {nodes}");
                return Ok(Exit::None);
            }
            Outcome::BudgetExceeded { stage, nodes } => {
                println!("budget exceeded");
                println!("stage = {stage}");
                println!("nodes = {nodes}");
                return Ok(Exit::Budget);
            }
        };
        if cert.status != Status::Verified {
            bail!("internal error: pipeline certificate failed verification");
        }
        print_witness(&cert.witness);
        println!("color = {}", cert.color);
        println!("stages = {}", cert.stages.len());
        for (i, s) in cert.stages.iter().enumerate() {
            println!("stage.{} = {}", i + 1, s.principle());
        }
        write_out(&cert, o.out.as_deref())?;
        Ok(Exit::Ok)
    }
}

trait MapOutcome<T> {
    fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U>;
}

impl<T> MapOutcome<T> for Outcome<T> {
    fn map<U>(self, f: impl FnOnce(T) -> U) -> Outcome<U> {
        match self {
            Outcome::Found(t) => Outcome::Found(f(t)),
            Outcome::NoWitness { stage, nodes } => Outcome::NoWitness { stage, nodes },
            Outcome::BudgetExceeded { stage, nodes } => Outcome::BudgetExceeded { stage, nodes },
        }
    }
}

fn print_witness(w: &Witness) {
    println!("principle = {}", w.principle());
    match w {
        Witness::Aht { h } => println!("H = {}", braces(h)),
        Witness::Rt2 { j } => println!("J = {}", braces(j)),
        Witness::Ipt2 { h1, h2 } => {
            println!("H1 = {}", braces(h1));
            println!("H2 = {}", braces(h2));
        }
        Witness::Hil { sets } => {
            let sets: Vec<String> = sets.iter().map(|&s| format_set(s)).collect();
            println!("sets = {}", sets.join(" "));
        }
        Witness::Rt2ToAht { j, h } => {
            println!("J = {}", braces(j));
            println!("H = {}", braces(h));
        }
        Witness::AhtToIpt2 { stage, h, h1, h2 } => {
            println!("aht_stage = {}", stage.name());
            println!("H = {}", braces(h));
            println!("H1 = {}", braces(h1));
            println!("H2 = {}", braces(h2));
        }
        Witness::Chain { j, h, h1, h2 } => {
            println!("J = {}", braces(j));
            println!("H = {}", braces(h));
            println!("H1 = {}", braces(h1));
            println!("H2 = {}", braces(h2));
        }
        Witness::Word { h, letter } => {
            println!("H = {}", braces(h));
            match letter {
                Some(l) => println!("letter = {l}"),
                None => println!("letter = none"),
            }
        }
    }
}

fn write_out(cert: &Certificate, out: Option<&Path>) -> Result<()> {
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => PathBuf::from(format!(
            "{}-{}.cert",
            cert.principle().name().to_ascii_lowercase(),
            cert.digest()
        )),
    };
    fs::write(&path, write_certificate(cert)).with_context(|| format!("writing {}", path.display()))?;
    println!("certificate = {}", path.display());
    Ok(())
}
