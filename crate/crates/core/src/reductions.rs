//! Constructive reductions: RT² ⇒ AHT by block sums, AHT ⇒ IPT² by
//! projecting onto `lam`/`mu`, their composition, and the highest-letter
//! pipeline for word-block colorings.
//!
//! Every pipeline returns a sealed certificate whose stages can each be
//! rechecked on their own.

use thiserror::Error;

use crate::bits::{ApartSet, BitBudget, NumericError};
use crate::certificate::{
    verify_aht, AhtStage, Certificate, CertificateError, Instance, InstanceColoring, Status, Verdict, Witness,
};
use crate::coloring::{
    induced_pair_coloring, projected_point_coloring, word_block_coloring, Coloring, ColoringError, PairColoring, Word,
};
use crate::solvers::{solve_aht, solve_aht_constrained, solve_rt2, AhtConstraints, Search, SearchBudget, SolveError};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("J needs at least two elements, got {0}")]
    ShortJ(usize),
    #[error("J is not strictly increasing at position {position}: {prev} then {next}")]
    NotIncreasing { position: usize, prev: u64, next: u64 },
    #[error("size must be at least 1")]
    ZeroSize,
    #[error("{stage} stage: {message}")]
    Precondition { stage: &'static str, message: String },
    #[error("{stage} stage rejected the witness: {verdict}")]
    Rejected { stage: &'static str, verdict: Verdict },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
}

/// Result of a pipeline: a value, or the stage whose search came up empty or
/// ran out of nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<T> {
    Found(T),
    NoWitness { stage: &'static str, nodes: u64 },
    BudgetExceeded { stage: &'static str, nodes: u64 },
}

impl<T> Outcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            Outcome::Found(t) => Some(t),
            _ => None,
        }
    }

    fn from_search<W>(search: Search<W>, stage: &'static str) -> Result<W, Outcome<T>> {
        match search {
            Search::Found { witness, .. } => Ok(witness),
            Search::Exhausted { nodes } => Err(Outcome::NoWitness { stage, nodes }),
            Search::BudgetExceeded { nodes } => Err(Outcome::BudgetExceeded { stage, nodes }),
        }
    }

    fn forward<U>(self) -> Outcome<U> {
        match self {
            Outcome::Found(_) => unreachable!("forward on a found outcome"),
            Outcome::NoWitness { stage, nodes } => Outcome::NoWitness { stage, nodes },
            Outcome::BudgetExceeded { stage, nodes } => Outcome::BudgetExceeded { stage, nodes },
        }
    }
}

macro_rules! stage {
    ($search:expr, $name:expr) => {
        match Outcome::from_search($search, $name) {
            Ok(w) => w,
            Err(o) => return Ok(o),
        }
    };
}

/// Search settings shared by every stage of a pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineOptions {
    pub bit_budget: BitBudget,
    pub node_limit: Option<u64>,
    pub threads: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            bit_budget: BitBudget::default(),
            node_limit: None,
            threads: 1,
        }
    }
}

impl PipelineOptions {
    fn budget(&self, bound: u64, size: usize) -> SearchBudget {
        SearchBudget::new(bound, size)
            .with_node_limit(self.node_limit)
            .with_threads(self.threads)
    }
}

/// `h_n = 2^(j_n+1) + ... + 2^(j_(n+1)) = 2^(j_(n+1)+1) - 2^(j_n+1)`.
pub fn blocks_from_rt2(j: &[u64], budget: BitBudget) -> Result<ApartSet, ReductionError> {
    if j.len() < 2 {
        return Err(ReductionError::ShortJ(j.len()));
    }
    let mut h = Vec::with_capacity(j.len() - 1);
    for (p, w) in j.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(ReductionError::NotIncreasing {
                position: p + 1,
                prev: w[0],
                next: w[1],
            });
        }
        if w[1] >= budget.bits() as u64 {
            return Err(NumericError::OverBudget {
                value: u128::MAX,
                bits: budget.bits(),
            }
            .into());
        }
        let block = (1u128 << (w[1] + 1)) - (1u128 << (w[0] + 1));
        h.push(budget.check(block)?);
    }
    Ok(ApartSet::new(h)?)
}

/// `(lam(h) for h in H, mu(h) for h in H)`.
pub fn project_aht_witness(h: &ApartSet) -> (Vec<u64>, Vec<u64>) {
    h.elements()
        .iter()
        .map(|&x| (x.trailing_zeros() as u64, x.ilog2() as u64))
        .unzip()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rt2ToAht {
    pub j: Vec<u64>,
    pub h: ApartSet,
    pub color: u32,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AhtToIpt2 {
    pub h: ApartSet,
    pub h1: Vec<u64>,
    pub h2: Vec<u64>,
    pub color: u32,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordLetter {
    /// Largest letter occurring infinitely often; `None` for finite words.
    pub letter: Option<u32>,
    pub h: ApartSet,
    pub color: u32,
    pub certificate: Certificate,
}

fn cert(instance: Instance, witness: Witness, color: u32, exhaustive: bool, stages: Vec<Certificate>) -> Certificate {
    Certificate {
        instance,
        witness,
        color,
        exhaustive,
        status: Status::Unverified,
        stages,
    }
}

fn seal(c: Certificate, stage: &'static str) -> Result<Certificate, ReductionError> {
    let (sealed, verdict) = c.seal()?;
    if verdict.is_ok() {
        Ok(sealed)
    } else {
        Err(ReductionError::Rejected { stage, verdict })
    }
}

fn instance(coloring: InstanceColoring, size: usize, bound: u64, opts: &PipelineOptions, apart: bool) -> Instance {
    Instance {
        coloring,
        size,
        bound,
        bit_budget: opts.bit_budget,
        require_apart: apart,
    }
}

/// RT² ⇒ AHT: finds a homogeneous `J` of size `m + 1` for the induced pair
/// coloring with exponents below `rt2_bound`, then turns it into its block
/// set `H` of size `m`.
pub fn reduce_rt2_to_aht(
    c: &Coloring,
    m: usize,
    rt2_bound: u64,
    opts: &PipelineOptions,
) -> Result<Outcome<Rt2ToAht>, ReductionError> {
    if m == 0 {
        return Err(ReductionError::ZeroSize);
    }
    let f = induced_pair_coloring(c)?;
    if rt2_bound > f.bound() {
        return Err(ReductionError::Precondition {
            stage: "RT2",
            message: format!(
                "exponents below {rt2_bound} need block sums up to 2^{rt2_bound} - 2, but the coloring stops at {}",
                c.bound()
            ),
        });
    }
    let w = stage!(solve_rt2(&f, &opts.budget(rt2_bound, m + 1))?, "RT2");
    let h = blocks_from_rt2(&w.j, opts.bit_budget)?;
    let rt2 = cert(
        instance(InstanceColoring::Pair(f), m + 1, rt2_bound, opts, false),
        Witness::Rt2 { j: w.j.clone() },
        w.color,
        true,
        vec![],
    );
    let aht = cert(
        instance(InstanceColoring::Point(c.clone()), m, c.bound(), opts, true),
        Witness::Aht {
            h: h.elements().to_vec(),
        },
        w.color,
        false,
        vec![],
    );
    let top = cert(
        instance(InstanceColoring::Point(c.clone()), m, rt2_bound, opts, true),
        Witness::Rt2ToAht {
            j: w.j.clone(),
            h: h.elements().to_vec(),
        },
        w.color,
        true,
        vec![rt2, aht],
    );
    Ok(Outcome::Found(Rt2ToAht {
        j: w.j,
        h,
        color: w.color,
        certificate: seal(top, "RT2_TO_AHT")?,
    }))
}

/// How the AHT stage of [`reduce_aht_to_ipt2`] is discharged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AhtSource {
    /// Direct search with run sums up to `bound` (default: all of `g`).
    Search { bound: Option<u64> },
    /// RT² ⇒ AHT on `g` with exponents below `rt2_bound` (default: as many
    /// as `g`'s domain allows).
    Chain { rt2_bound: Option<u64> },
}

/// Largest RT² exponent bound usable on the projected coloring of `f`.
fn default_rt2_bound(g: &Coloring) -> Result<u64, ReductionError> {
    Ok(induced_pair_coloring(g)?.bound())
}

/// AHT ⇒ IPT²: an AHT witness `H` for `g(n) = f(lam(n), mu(n))` projects to
/// `(lam(H), mu(H))`, increasing p-homogeneous for `f`.
pub fn reduce_aht_to_ipt2(
    f: &PairColoring,
    m: usize,
    source: AhtSource,
    opts: &PipelineOptions,
) -> Result<Outcome<AhtToIpt2>, ReductionError> {
    if m == 0 {
        return Err(ReductionError::ZeroSize);
    }
    let g = projected_point_coloring(f, opts.bit_budget)?;
    let (h, color, stage_cert, kind, bound) = match source {
        AhtSource::Search { bound } => {
            let bound = bound.unwrap_or(g.bound());
            if bound > g.bound() {
                return Err(ReductionError::Precondition {
                    stage: "AHT",
                    message: format!("bound {bound} exceeds the projected coloring's domain {}", g.bound()),
                });
            }
            let w = stage!(solve_aht(&g, &opts.budget(bound, m))?, "AHT");
            let h = ApartSet::new(w.h)?;
            let c = cert(
                instance(InstanceColoring::Point(g.clone()), m, bound, opts, true),
                Witness::Aht {
                    h: h.elements().to_vec(),
                },
                w.color,
                true,
                vec![],
            );
            (h, w.color, c, AhtStage::Search, bound)
        }
        AhtSource::Chain { rt2_bound } => {
            let rt2_bound = match rt2_bound {
                Some(b) => b,
                None => default_rt2_bound(&g)?,
            };
            let r = match reduce_rt2_to_aht(&g, m, rt2_bound, opts)? {
                Outcome::Found(r) => r,
                other => return Ok(other.forward()),
            };
            (r.h, r.color, r.certificate, AhtStage::Chain, g.bound())
        }
    };
    finish_aht_to_ipt2(f, &g, h, color, stage_cert, kind, bound, opts).map(Outcome::Found)
}

/// AHT ⇒ IPT² on a caller-supplied `H`, which is first checked to be an apart
/// `g`-homogeneous set.
pub fn reduce_aht_to_ipt2_supplied(
    f: &PairColoring,
    h: &[u64],
    opts: &PipelineOptions,
) -> Result<AhtToIpt2, ReductionError> {
    let g = projected_point_coloring(f, opts.bit_budget)?;
    let Some(&first) = h.first() else {
        return Err(ReductionError::ZeroSize);
    };
    if first == 0 || first > g.bound() {
        return Err(ReductionError::Precondition {
            stage: "AHT",
            message: format!("{first} lies outside the projected coloring's domain"),
        });
    }
    let color = g.color(first)?;
    let verdict = verify_aht(&g, h, color, true)?;
    if !verdict.is_ok() {
        return Err(ReductionError::Rejected { stage: "AHT", verdict });
    }
    let h = ApartSet::new(h.to_vec())?;
    let m = h.elements().len();
    let stage_cert = cert(
        instance(InstanceColoring::Point(g.clone()), m, g.bound(), opts, true),
        Witness::Aht {
            h: h.elements().to_vec(),
        },
        color,
        false,
        vec![],
    );
    finish_aht_to_ipt2(f, &g, h, color, stage_cert, AhtStage::Supplied, g.bound(), opts)
}

#[allow(clippy::too_many_arguments)]
fn finish_aht_to_ipt2(
    f: &PairColoring,
    g: &Coloring,
    h: ApartSet,
    color: u32,
    stage_cert: Certificate,
    kind: AhtStage,
    bound: u64,
    opts: &PipelineOptions,
) -> Result<AhtToIpt2, ReductionError> {
    let _ = g;
    let m = h.elements().len();
    let (h1, h2) = project_aht_witness(&h);
    let ipt = cert(
        instance(InstanceColoring::Pair(f.clone()), m, f.bound(), opts, false),
        Witness::Ipt2 {
            h1: h1.clone(),
            h2: h2.clone(),
        },
        color,
        false,
        vec![],
    );
    let top = cert(
        instance(InstanceColoring::Pair(f.clone()), m, bound, opts, true),
        Witness::AhtToIpt2 {
            stage: kind,
            h: h.elements().to_vec(),
            h1: h1.clone(),
            h2: h2.clone(),
        },
        color,
        kind != AhtStage::Supplied,
        vec![stage_cert, ipt],
    );
    Ok(AhtToIpt2 {
        h,
        h1,
        h2,
        color,
        certificate: seal(top, "AHT_TO_IPT2")?,
    })
}

/// RT² ⇒ AHT ⇒ IPT² in one certificate with three flat stages: the RT²
/// witness `J` for the coloring induced by `g`, the AHT witness `H` for `g`,
/// and the IPT² witness for `f`.
pub fn chain_rt2_to_ipt2(
    f: &PairColoring,
    m: usize,
    rt2_bound: Option<u64>,
    opts: &PipelineOptions,
) -> Result<Outcome<AhtToIpt2>, ReductionError> {
    if m == 0 {
        return Err(ReductionError::ZeroSize);
    }
    let g = projected_point_coloring(f, opts.bit_budget)?;
    let rt2_bound = match rt2_bound {
        Some(b) => b,
        None => default_rt2_bound(&g)?,
    };
    let r = match reduce_rt2_to_aht(&g, m, rt2_bound, opts)? {
        Outcome::Found(r) => r,
        other => return Ok(other.forward()),
    };
    let (h1, h2) = project_aht_witness(&r.h);
    let mut inner = r.certificate.stages;
    let ipt = cert(
        instance(InstanceColoring::Pair(f.clone()), m, f.bound(), opts, false),
        Witness::Ipt2 {
            h1: h1.clone(),
            h2: h2.clone(),
        },
        r.color,
        false,
        vec![],
    );
    inner.push(ipt);
    let top = cert(
        instance(InstanceColoring::Pair(f.clone()), m, rt2_bound, opts, true),
        Witness::Chain {
            j: r.j,
            h: r.h.elements().to_vec(),
            h1: h1.clone(),
            h2: h2.clone(),
        },
        r.color,
        true,
        inner,
    );
    Ok(Outcome::Found(AhtToIpt2 {
        h: r.h,
        h1,
        h2,
        color: r.color,
        certificate: seal(top, "CHAIN")?,
    }))
}

/// Default search bound for the word pipeline: large enough for `m` windows
/// of one period each past the prefix, capped by the budget.
pub fn default_word_bound(w: &Word, m: usize, budget: BitBudget) -> u64 {
    let bits = w.prefix_len() + m * w.period().unwrap_or(w.letters().len());
    if bits >= budget.bits() as usize {
        budget.max_value()
    } else {
        (1u64 << bits) - 1
    }
}

/// Highest letter of a word via an AHT witness for its block coloring `D`.
///
/// For periodic words the search only accepts witnesses whose first element
/// starts past the prefix and whose overall window spans a full period, so
/// the witness color is the largest letter of the period. Finite words get
/// a plain search and no letter claim.
pub fn word_highest_letter(
    w: &Word,
    m: usize,
    bound: Option<u64>,
    opts: &PipelineOptions,
) -> Result<Outcome<WordLetter>, ReductionError> {
    if m == 0 {
        return Err(ReductionError::ZeroSize);
    }
    let d = word_block_coloring(w, opts.bit_budget)?;
    let bound = bound.unwrap_or_else(|| default_word_bound(w, m, opts.bit_budget).min(d.bound()));
    if bound > d.bound() {
        return Err(ReductionError::Precondition {
            stage: "AHT",
            message: format!("bound {bound} exceeds the word coloring's domain {}", d.bound()),
        });
    }
    let budget = opts.budget(bound, m);
    let search = match w.period() {
        Some(p) => {
            let constraints = AhtConstraints {
                min_first_lambda: w.prefix_len() as u32,
                min_span: p as u32,
            };
            solve_aht_constrained(&d, &budget, constraints)?
        }
        None => solve_aht(&d, &budget)?,
    };
    let found = stage!(search, "AHT");
    let letter = w.period().map(|_| found.color);
    let h = ApartSet::new(found.h)?;
    let aht = cert(
        instance(InstanceColoring::Point(d.clone()), m, bound, opts, true),
        Witness::Aht {
            h: h.elements().to_vec(),
        },
        found.color,
        true,
        vec![],
    );
    let top = cert(
        instance(InstanceColoring::Point(d), m, bound, opts, true),
        Witness::Word {
            h: h.elements().to_vec(),
            letter,
        },
        found.color,
        true,
        vec![aht],
    );
    Ok(Outcome::Found(WordLetter {
        letter,
        h,
        color: found.color,
        certificate: seal(top, "WORD")?,
    }))
}
