//! Exhaustive, pruned witness search for bounded instances of AHT, RT², IPT²
//! and HIL.
//!
//! Every solver walks candidates in increasing order depth first, so the
//! first complete candidate it meets is the lexicographically least witness.
//! A search either finds that witness, exhausts the space, or runs out of its
//! node allowance; the last two are never conflated.

mod fanout;

use thiserror::Error;

use crate::coloring::{Coloring, ColoringError, PairColoring};
use fanout::{fan_out, Branch, Counter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Search<W> {
    Found { witness: W, nodes: u64 },
    /// The whole space was searched and holds no witness.
    Exhausted { nodes: u64 },
    BudgetExceeded { nodes: u64 },
}

impl<W> Search<W> {
    pub fn witness(&self) -> Option<&W> {
        match self {
            Search::Found { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn into_witness(self) -> Option<W> {
        match self {
            Search::Found { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn nodes(&self) -> u64 {
        match *self {
            Search::Found { nodes, .. } | Search::Exhausted { nodes } | Search::BudgetExceeded { nodes } => nodes,
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Search<V> {
        match self {
            Search::Found { witness, nodes } => Search::Found {
                witness: f(witness),
                nodes,
            },
            Search::Exhausted { nodes } => Search::Exhausted { nodes },
            Search::BudgetExceeded { nodes } => Search::BudgetExceeded { nodes },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("invalid search budget: {0}")]
    InvalidBudget(String),
    #[error("search bound {bound} exceeds the coloring's domain ({domain})")]
    BoundExceedsDomain { bound: u64, domain: u64 },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

/// Finitization parameters for a search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    /// Universe `[1..bound]` for AHT, exponents `[0..bound)` for RT² and IPT²,
    /// and the base set size for HIL.
    pub bound: u64,
    pub target_size: usize,
    pub node_limit: Option<u64>,
    /// AHT only.
    pub require_apart: bool,
    pub threads: usize,
}

impl SearchBudget {
    pub fn new(bound: u64, target_size: usize) -> Self {
        Self {
            bound,
            target_size,
            node_limit: None,
            require_apart: true,
            threads: 1,
        }
    }

    pub fn with_node_limit(mut self, limit: Option<u64>) -> Self {
        self.node_limit = limit;
        self
    }

    pub fn with_apart(mut self, require_apart: bool) -> Self {
        self.require_apart = require_apart;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    fn validate(&self) -> Result<(), SolveError> {
        if self.target_size == 0 {
            return Err(SolveError::InvalidBudget("target size must be at least 1".into()));
        }
        if self.bound == 0 {
            return Err(SolveError::InvalidBudget("bound must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AhtWitness {
    pub h: Vec<u64>,
    pub color: u32,
    pub apart: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rt2Witness {
    pub j: Vec<u64>,
    pub color: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ipt2Witness {
    pub h1: Vec<u64>,
    pub h2: Vec<u64>,
    pub color: u32,
}

/// Sets are bitmasks over `[0..base)`, listed in increasing mask order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilWitness {
    pub sets: Vec<u64>,
    pub color: u32,
}

/// Extra shape requirements on AHT witnesses, used by the word pipeline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AhtConstraints {
    /// `lam(h_1)` must be at least this.
    pub min_first_lambda: u32,
    /// `mu(h_m) - lam(h_1) + 1` must be at least this.
    pub min_span: u32,
}

enum Step {
    Found,
    Exhausted,
    Cut,
}

fn finish<W>(step: Step, counter: &Counter, witness: impl FnOnce() -> W) -> Branch<W> {
    Branch {
        found: matches!(step, Step::Found).then(witness),
        nodes: counter.nodes,
        cut: matches!(step, Step::Cut),
    }
}

/// Least elements of each exponent window `[l, u]`: `2^l + 2^u` (or `2^l`).
fn canonical_window_elements(bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for u in 0..64u32 {
        for l in 0..=u {
            let x = (1u128 << u) | (1u128 << l);
            if x <= bound as u128 {
                out.push(x as u64);
            }
        }
    }
    out.sort_unstable();
    out
}

struct AhtSearch<'a> {
    coloring: &'a Coloring,
    bound: u64,
    size: usize,
    apart: bool,
    constraints: AhtConstraints,
    /// Present when candidates can be restricted to window representatives.
    canonical: Option<Vec<u64>>,
}

impl AhtSearch<'_> {
    fn branch(&self, first: u64, limit: Option<u64>) -> Result<Branch<AhtWitness>, SolveError> {
        let mut counter = Counter::new(limit);
        if !counter.tick() {
            return Ok(finish(Step::Cut, &counter, || unreachable!()));
        }
        let color = self.coloring.color(first)?;
        let mut elems = vec![first];
        let step = self.extend(&mut elems, &[first], color, &mut counter)?;
        Ok(finish(step, &counter, || AhtWitness {
            h: elems,
            color,
            apart: self.apart,
        }))
    }

    /// `tails[i]` is the sum of the run from element `i` to the last element.
    fn extend(&self, elems: &mut Vec<u64>, tails: &[u64], color: u32, counter: &mut Counter) -> Result<Step, SolveError> {
        if elems.len() == self.size {
            let span = elems.last().unwrap().ilog2() - elems[0].trailing_zeros() + 1;
            return Ok(if span >= self.constraints.min_span {
                Step::Found
            } else {
                Step::Exhausted
            });
        }
        let prev = *elems.last().unwrap();
        let total = tails[0];
        if total >= self.bound {
            return Ok(Step::Exhausted);
        }
        // Every new run sum is at most total + x.
        let max_x = self.bound - total;
        let try_candidate = |x: u64, elems: &mut Vec<u64>, counter: &mut Counter| -> Result<Option<Step>, SolveError> {
            if !counter.tick() {
                return Ok(Some(Step::Cut));
            }
            if self.coloring.color(x)? != color {
                return Ok(None);
            }
            let mut next_tails = Vec::with_capacity(tails.len() + 1);
            for &t in tails {
                let s = t + x;
                if self.coloring.color(s)? != color {
                    return Ok(None);
                }
                next_tails.push(s);
            }
            next_tails.push(x);
            elems.push(x);
            let step = self.extend(elems, &next_tails, color, counter)?;
            match step {
                Step::Exhausted => {
                    elems.pop();
                    Ok(None)
                }
                other => Ok(Some(other)),
            }
        };
        if let Some(canonical) = &self.canonical {
            let mu_prev = prev.ilog2();
            let start = canonical.partition_point(|&x| x <= prev);
            for &x in &canonical[start..] {
                if x > max_x {
                    break;
                }
                if x.trailing_zeros() <= mu_prev {
                    continue;
                }
                if let Some(step) = try_candidate(x, elems, counter)? {
                    return Ok(step);
                }
            }
        } else if self.apart {
            let stride = 1u64 << (prev.ilog2() + 1);
            let mut x = stride;
            while x <= max_x {
                if let Some(step) = try_candidate(x, elems, counter)? {
                    return Ok(step);
                }
                match x.checked_add(stride) {
                    Some(next) => x = next,
                    None => break,
                }
            }
        } else {
            for x in prev + 1..=max_x {
                if let Some(step) = try_candidate(x, elems, counter)? {
                    return Ok(step);
                }
            }
        }
        Ok(Step::Exhausted)
    }
}

/// Least `H` of the target size (apart unless disabled) whose adjacent sums
/// all lie in `[1..bound]` and share one color.
pub fn solve_aht(c: &Coloring, budget: &SearchBudget) -> Result<Search<AhtWitness>, SolveError> {
    solve_aht_constrained(c, budget, AhtConstraints::default())
}

pub fn solve_aht_constrained(
    c: &Coloring,
    budget: &SearchBudget,
    constraints: AhtConstraints,
) -> Result<Search<AhtWitness>, SolveError> {
    solve_aht_impl(c, budget, constraints, true)
}

pub(crate) fn solve_aht_impl(
    c: &Coloring,
    budget: &SearchBudget,
    constraints: AhtConstraints,
    allow_canonical: bool,
) -> Result<Search<AhtWitness>, SolveError> {
    budget.validate()?;
    if budget.bound > c.bound() {
        return Err(SolveError::BoundExceedsDomain {
            bound: budget.bound,
            domain: c.bound(),
        });
    }
    if constraints.min_first_lambda >= 64 {
        return Ok(Search::Exhausted { nodes: 0 });
    }
    // Colorings that only see (lam, mu) have their least witness among window
    // representatives when apartness is required.
    let canonical = (allow_canonical && budget.require_apart && c.is_window_determined())
        .then(|| canonical_window_elements(budget.bound));
    let search = AhtSearch {
        coloring: c,
        bound: budget.bound,
        size: budget.target_size,
        apart: budget.require_apart,
        constraints,
        canonical,
    };
    let min_lam = constraints.min_first_lambda;
    let branch = |first, limit| search.branch(first, limit);
    match &search.canonical {
        Some(list) => {
            let firsts = list.iter().copied().filter(|x| x.trailing_zeros() >= min_lam);
            fan_out(firsts, budget.threads, budget.node_limit, branch)
        }
        None => {
            let stride = 1u64 << min_lam;
            let firsts = (1..=budget.bound / stride).map(|t| t * stride);
            fan_out(firsts, budget.threads, budget.node_limit, branch)
        }
    }
}

struct Rt2Search<'a> {
    f: &'a PairColoring,
    /// Largest admissible element.
    top: u64,
    size: usize,
}

impl Rt2Search<'_> {
    fn branch(&self, first: u64, limit: Option<u64>) -> Result<Branch<Rt2Witness>, SolveError> {
        let mut counter = Counter::new(limit);
        if !counter.tick() {
            return Ok(finish(Step::Cut, &counter, || unreachable!()));
        }
        let mut elems = vec![first];
        let mut color = None;
        let step = self.extend(&mut elems, &mut color, &mut counter)?;
        Ok(finish(step, &counter, || Rt2Witness {
            j: elems,
            color: color.unwrap_or(0),
        }))
    }

    fn extend(&self, elems: &mut Vec<u64>, color: &mut Option<u32>, counter: &mut Counter) -> Result<Step, SolveError> {
        if elems.len() == self.size {
            return Ok(Step::Found);
        }
        let last = *elems.last().unwrap();
        let room = (self.size - elems.len()) as u64;
        'candidates: for x in last + 1..=self.top + 1 - room {
            if !counter.tick() {
                return Ok(Step::Cut);
            }
            let fixed = *color;
            for &y in elems.iter() {
                let cy = self.f.color(y, x)?;
                match *color {
                    None => *color = Some(cy),
                    Some(c) if c != cy => {
                        *color = fixed;
                        continue 'candidates;
                    }
                    Some(_) => {}
                }
            }
            elems.push(x);
            match self.extend(elems, color, counter)? {
                Step::Exhausted => {
                    elems.pop();
                    *color = fixed;
                }
                other => return Ok(other),
            }
        }
        Ok(Step::Exhausted)
    }
}

/// Least homogeneous `J ⊆ [0..bound)` of the target size. A single-element
/// `J` has no pairs and is reported with color 0.
pub fn solve_rt2(f: &PairColoring, budget: &SearchBudget) -> Result<Search<Rt2Witness>, SolveError> {
    budget.validate()?;
    if budget.bound > f.bound() {
        return Err(SolveError::BoundExceedsDomain {
            bound: budget.bound,
            domain: f.bound(),
        });
    }
    let search = Rt2Search {
        f,
        top: budget.bound - 1,
        size: budget.target_size,
    };
    let count = (budget.bound + 1).saturating_sub(budget.target_size as u64);
    fan_out(0..count, budget.threads, budget.node_limit, |first, limit| {
        search.branch(first, limit)
    })
}

struct Ipt2Search<'a> {
    f: &'a PairColoring,
    /// Largest admissible element.
    top: u64,
    size: usize,
}

impl Ipt2Search<'_> {
    fn branch(&self, first: u64, limit: Option<u64>) -> Result<Branch<Ipt2Witness>, SolveError> {
        let mut counter = Counter::new(limit);
        if !counter.tick() {
            return Ok(finish(Step::Cut, &counter, || unreachable!()));
        }
        let mut h1 = vec![first];
        let mut h2 = Vec::new();
        let mut color = None;
        let step = self.extend(&mut h1, &mut h2, &mut color, &mut counter)?;
        Ok(finish(step, &counter, || Ipt2Witness {
            h1,
            h2,
            color: color.unwrap_or(0),
        }))
    }

    fn extend(
        &self,
        h1: &mut Vec<u64>,
        h2: &mut Vec<u64>,
        color: &mut Option<u32>,
        counter: &mut Counter,
    ) -> Result<Step, SolveError> {
        if h2.len() == self.size {
            return Ok(Step::Found);
        }
        if h1.len() < self.size {
            let room = (self.size - h1.len()) as u64;
            for x in h1.last().unwrap() + 1..=self.top + 1 - room {
                if !counter.tick() {
                    return Ok(Step::Cut);
                }
                h1.push(x);
                match self.extend(h1, h2, color, counter)? {
                    Step::Exhausted => {
                        h1.pop();
                    }
                    other => return Ok(other),
                }
            }
            return Ok(Step::Exhausted);
        }
        let room = (self.size - h2.len()) as u64;
        let start = h2.last().map_or(0, |x| x + 1);
        let closing = room == 1;
        'candidates: for x in start..=self.top + 1 - room {
            if !counter.tick() {
                return Ok(Step::Cut);
            }
            // The final witness needs at least one increasing cross pair.
            if closing && x <= h1[0] {
                continue;
            }
            let fixed = *color;
            for &y in h1.iter().take_while(|&&y| y < x) {
                let cy = self.f.color(y, x)?;
                match *color {
                    None => *color = Some(cy),
                    Some(c) if c != cy => {
                        *color = fixed;
                        continue 'candidates;
                    }
                    Some(_) => {}
                }
            }
            h2.push(x);
            match self.extend(h1, h2, color, counter)? {
                Step::Exhausted => {
                    h2.pop();
                    *color = fixed;
                }
                other => return Ok(other),
            }
        }
        Ok(Step::Exhausted)
    }
}

/// Least `(H1, H2)`, compared on the concatenation `H1 ++ H2`, with both sets
/// of the target size inside `[0..bound)`, all increasing cross pairs of one
/// color, and at least one such pair.
pub fn solve_ipt2(f: &PairColoring, budget: &SearchBudget) -> Result<Search<Ipt2Witness>, SolveError> {
    budget.validate()?;
    if budget.bound > f.bound() {
        return Err(SolveError::BoundExceedsDomain {
            bound: budget.bound,
            domain: f.bound(),
        });
    }
    let search = Ipt2Search {
        f,
        top: budget.bound - 1,
        size: budget.target_size,
    };
    let count = (budget.bound + 1).saturating_sub(budget.target_size as u64);
    fan_out(0..count, budget.threads, budget.node_limit, |first, limit| {
        search.branch(first, limit)
    })
}

/// Largest base set size the HIL search accepts.
pub const MAX_HIL_BASE: u64 = 24;

struct HilSearch<'a> {
    f: &'a Coloring,
    top: u64,
    size: usize,
}

impl HilSearch<'_> {
    fn branch(&self, first: u64, limit: Option<u64>) -> Result<Branch<HilWitness>, SolveError> {
        let mut counter = Counter::new(limit);
        if !counter.tick() {
            return Ok(finish(Step::Cut, &counter, || unreachable!()));
        }
        let color = self.f.color(first)?;
        let mut seen = vec![false; self.top as usize + 1];
        seen[first as usize] = true;
        let mut unions = vec![first];
        let mut sets = vec![first];
        let step = self.extend(&mut sets, &mut unions, &mut seen, color, &mut counter)?;
        Ok(finish(step, &counter, || HilWitness { sets, color }))
    }

    fn extend(
        &self,
        sets: &mut Vec<u64>,
        unions: &mut Vec<u64>,
        seen: &mut [bool],
        color: u32,
        counter: &mut Counter,
    ) -> Result<Step, SolveError> {
        if sets.len() == self.size {
            return Ok(Step::Found);
        }
        let room = (self.size - sets.len()) as u64;
        for x in sets.last().unwrap() + 1..=self.top + 1 - room {
            if !counter.tick() {
                return Ok(Step::Cut);
            }
            let before = unions.len();
            let mut ok = true;
            // Unions of families containing x: x alone and x joined to each
            // union already reachable.
            for idx in 0..=before {
                let u = if idx == before { x } else { unions[idx] | x };
                if seen[u as usize] {
                    continue;
                }
                if self.f.color(u)? != color {
                    ok = false;
                    break;
                }
                seen[u as usize] = true;
                unions.push(u);
            }
            if ok {
                sets.push(x);
                match self.extend(sets, unions, seen, color, counter)? {
                    Step::Exhausted => {
                        sets.pop();
                    }
                    other => return Ok(other),
                }
            }
            for u in unions.drain(before..) {
                seen[u as usize] = false;
            }
        }
        Ok(Step::Exhausted)
    }
}

/// Least family of distinct nonempty subsets of `[0..base)` (as bitmasks,
/// increasing) whose nonempty subfamily unions share one color. The coloring
/// is read on bitmasks, so it must cover `[1..2^base - 1]`; `budget.bound` is
/// the base.
pub fn solve_hil(f: &Coloring, budget: &SearchBudget) -> Result<Search<HilWitness>, SolveError> {
    budget.validate()?;
    if budget.bound > MAX_HIL_BASE {
        return Err(SolveError::InvalidBudget(format!(
            "HIL base {} exceeds the supported maximum {MAX_HIL_BASE}",
            budget.bound
        )));
    }
    let top = (1u64 << budget.bound) - 1;
    if top > f.bound() {
        return Err(SolveError::BoundExceedsDomain {
            bound: top,
            domain: f.bound(),
        });
    }
    let search = HilSearch {
        f,
        top,
        size: budget.target_size,
    };
    let count = (top + 2).saturating_sub(budget.target_size as u64);
    fan_out(1..count, budget.threads, budget.node_limit, |first, limit| {
        search.branch(first, limit)
    })
}
