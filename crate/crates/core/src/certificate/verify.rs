//! Witness verifiers.
//!
//! Each verifier walks its constraints in a fixed order, takes the actual
//! color of the first constraint, and checks every later constraint against
//! it. The claimed color is compared only with that recomputed color, so a
//! mismatch reports both values.

use std::fmt;

use crate::bits::{adjacent_sums, first_apart_violation};
use crate::coloring::{Coloring, ColoringError, PairColoring};

/// One constraint of a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// Run `h_start + ... + h_end`, 1-based.
    Run { start: usize, end: usize, sum: u64 },
    Pair { i: u64, j: u64 },
    /// 1-based member indices of a family and the union of its sets.
    Family { members: Vec<usize>, union: u64 },
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Run { start, end, sum } => write!(f, "run ({start}, {end}) with sum {sum}"),
            Constraint::Pair { i, j } => write!(f, "pair ({i}, {j})"),
            Constraint::Family { members, union } => {
                let ms: Vec<String> = members.iter().map(|m| m.to_string()).collect();
                write!(f, "family {{{}}} with union {}", ms.join(","), format_set(*union))
            }
        }
    }
}

/// Renders a bitmask as `{a,b,...}`.
pub fn format_set(mask: u64) -> String {
    let items: Vec<String> = (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// A concrete reason a witness is rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Counterexample {
    EmptyWitness,
    NotPositive { position: usize },
    NotIncreasing { position: usize, prev: u64, next: u64 },
    NotApart { position: usize, prev: u64, next: u64, mu: u32, lam: u32 },
    ColorOutOfRange { claimed: u32, colors: u32 },
    /// The first constraint's actual color differs from the claim.
    ClaimedColor { constraint: Constraint, claimed: u32, actual: u32 },
    /// A later constraint disagrees with the first constraint's color.
    Constraint { constraint: Constraint, expected: u32, actual: u32 },
    EmptySet { index: usize },
    DuplicateSet { first: usize, second: usize },
    Size { what: &'static str, expected: usize, found: usize },
    OutOfBound { value: u64, bound: u64 },
    /// Two stages of a pipeline certificate do not fit together.
    Linkage(String),
    Stage { index: usize, principle: String, inner: Box<Counterexample> },
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::EmptyWitness => write!(f, "witness is empty"),
            Counterexample::NotPositive { position } => write!(f, "element {position} is not positive"),
            Counterexample::NotIncreasing { position, prev, next } => {
                write!(f, "not strictly increasing at position {position}: {prev} then {next}")
            }
            Counterexample::NotApart { position, prev, next, mu, lam } => write!(
                f,
                "apartness violated at position {position}: μ({prev}) = {mu} is not below λ({next}) = {lam}"
            ),
            Counterexample::ColorOutOfRange { claimed, colors } => {
                write!(f, "claimed color {claimed} is not below {colors}")
            }
            Counterexample::ClaimedColor { constraint, claimed, actual } => {
                write!(f, "{constraint} has color {actual}, claimed {claimed}")
            }
            Counterexample::Constraint { constraint, expected, actual } => {
                write!(f, "{constraint} has color {actual}, expected {expected}")
            }
            Counterexample::EmptySet { index } => write!(f, "set {index} is empty"),
            Counterexample::DuplicateSet { first, second } => write!(f, "sets {first} and {second} are equal"),
            Counterexample::Size { what, expected, found } => {
                write!(f, "{what} has {found} elements, instance requires {expected}")
            }
            Counterexample::OutOfBound { value, bound } => write!(f, "{value} lies outside the search bound {bound}"),
            Counterexample::Linkage(msg) => write!(f, "{msg}"),
            Counterexample::Stage { index, principle, inner } => write!(f, "stage {index} ({principle}): {inner}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Violation(Counterexample),
    /// Some constraint falls outside the coloring's domain.
    Undecidable(String),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Violation(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Ok => write!(f, "ok"),
            Verdict::Violation(c) => write!(f, "counterexample: {c}"),
            Verdict::Undecidable(msg) => write!(f, "undecidable at this bound: {msg}"),
        }
    }
}

/// Running state of the "first constraint fixes the color" check.
struct ColorCheck {
    claimed: u32,
    expected: Option<u32>,
}

impl ColorCheck {
    fn new(claimed: u32) -> Self {
        Self { claimed, expected: None }
    }

    fn observe(&mut self, constraint: impl FnOnce() -> Constraint, actual: u32) -> Option<Counterexample> {
        match self.expected {
            None => {
                self.expected = Some(actual);
                (actual != self.claimed).then(|| Counterexample::ClaimedColor {
                    constraint: constraint(),
                    claimed: self.claimed,
                    actual,
                })
            }
            Some(expected) => (actual != expected).then(|| Counterexample::Constraint {
                constraint: constraint(),
                expected,
                actual,
            }),
        }
    }
}

/// Evaluates a color, turning domain errors into an undecidable verdict.
fn lookup(result: Result<u32, ColoringError>) -> Result<Result<u32, Verdict>, ColoringError> {
    match result {
        Ok(c) => Ok(Ok(c)),
        Err(e) if e.is_domain() => Ok(Err(Verdict::Undecidable(e.to_string()))),
        Err(e) => Err(e),
    }
}

macro_rules! color_or_return {
    ($e:expr) => {
        match lookup($e)? {
            Ok(c) => c,
            Err(v) => return Ok(v),
        }
    };
}

fn check_increasing(xs: &[u64], positive: bool) -> Option<Counterexample> {
    if xs.is_empty() {
        return Some(Counterexample::EmptyWitness);
    }
    if positive && xs[0] == 0 {
        return Some(Counterexample::NotPositive { position: 1 });
    }
    xs.windows(2).enumerate().find(|(_, w)| w[0] >= w[1]).map(|(p, w)| Counterexample::NotIncreasing {
        position: p + 1,
        prev: w[0],
        next: w[1],
    })
}

/// Checks an AHT witness: optional apartness, then every adjacent run sum.
pub fn verify_aht(c: &Coloring, h: &[u64], color: u32, require_apart: bool) -> Result<Verdict, ColoringError> {
    if let Some(bad) = check_increasing(h, true) {
        return Ok(Verdict::Violation(bad));
    }
    if color >= c.colors() {
        return Ok(Verdict::Violation(Counterexample::ColorOutOfRange {
            claimed: color,
            colors: c.colors(),
        }));
    }
    if require_apart {
        if let Some(position) = first_apart_violation(h) {
            let (prev, next) = (h[position - 1], h[position]);
            return Ok(Verdict::Violation(Counterexample::NotApart {
                position,
                prev,
                next,
                mu: prev.ilog2(),
                lam: next.trailing_zeros(),
            }));
        }
    }
    let runs = match adjacent_sums(h, 1, h.len()) {
        Ok(r) => r,
        Err(e) => return Ok(Verdict::Undecidable(e.to_string())),
    };
    let mut check = ColorCheck::new(color);
    for run in runs {
        let actual = color_or_return!(c.color(run.sum));
        let constraint = || Constraint::Run {
            start: run.start,
            end: run.end,
            sum: run.sum,
        };
        if let Some(bad) = check.observe(constraint, actual) {
            return Ok(Verdict::Violation(bad));
        }
    }
    Ok(Verdict::Ok)
}

/// Checks that every increasing pair from `j` has one color.
pub fn verify_rt2(f: &PairColoring, j: &[u64], color: u32) -> Result<Verdict, ColoringError> {
    if let Some(bad) = check_increasing(j, false) {
        return Ok(Verdict::Violation(bad));
    }
    if color >= f.colors() {
        return Ok(Verdict::Violation(Counterexample::ColorOutOfRange {
            claimed: color,
            colors: f.colors(),
        }));
    }
    let mut check = ColorCheck::new(color);
    for (a, &x) in j.iter().enumerate() {
        for &y in &j[a + 1..] {
            let actual = color_or_return!(f.color(x, y));
            if let Some(bad) = check.observe(|| Constraint::Pair { i: x, j: y }, actual) {
                return Ok(Verdict::Violation(bad));
            }
        }
    }
    Ok(Verdict::Ok)
}

/// Checks that every `(x1, x2)` in `h1 × h2` with `x1 < x2` has one color;
/// other pairs impose nothing.
pub fn verify_ipt2(f: &PairColoring, h1: &[u64], h2: &[u64], color: u32) -> Result<Verdict, ColoringError> {
    for h in [h1, h2] {
        if let Some(bad) = check_increasing(h, false) {
            return Ok(Verdict::Violation(bad));
        }
    }
    if color >= f.colors() {
        return Ok(Verdict::Violation(Counterexample::ColorOutOfRange {
            claimed: color,
            colors: f.colors(),
        }));
    }
    let mut check = ColorCheck::new(color);
    for &x1 in h1 {
        for &x2 in h2.iter().filter(|&&x2| x1 < x2) {
            let actual = color_or_return!(f.color(x1, x2));
            if let Some(bad) = check.observe(|| Constraint::Pair { i: x1, j: x2 }, actual) {
                return Ok(Verdict::Violation(bad));
            }
        }
    }
    Ok(Verdict::Ok)
}

/// Largest family the HIL verifier will enumerate (`2^m - 1` unions).
pub const MAX_HIL_FAMILY: usize = 24;

/// Checks a HIL witness: sets (bitmasks) nonempty and distinct, and every
/// nonempty subfamily union of one color. Families are enumerated by the
/// bitmask of their member indices.
pub fn verify_hil(f: &Coloring, sets: &[u64], color: u32) -> Result<Verdict, ColoringError> {
    if sets.is_empty() {
        return Ok(Verdict::Violation(Counterexample::EmptyWitness));
    }
    if let Some(index) = sets.iter().position(|&s| s == 0) {
        return Ok(Verdict::Violation(Counterexample::EmptySet { index: index + 1 }));
    }
    for (a, x) in sets.iter().enumerate() {
        if let Some(b) = sets[a + 1..].iter().position(|y| y == x) {
            return Ok(Verdict::Violation(Counterexample::DuplicateSet {
                first: a + 1,
                second: a + b + 2,
            }));
        }
    }
    if color >= f.colors() {
        return Ok(Verdict::Violation(Counterexample::ColorOutOfRange {
            claimed: color,
            colors: f.colors(),
        }));
    }
    if sets.len() > MAX_HIL_FAMILY {
        return Ok(Verdict::Undecidable(format!(
            "families of more than {MAX_HIL_FAMILY} sets are not enumerated"
        )));
    }
    let mut check = ColorCheck::new(color);
    for family in 1u64..1 << sets.len() {
        let union = (0..sets.len())
            .filter(|b| family >> b & 1 == 1)
            .fold(0, |acc, b| acc | sets[b]);
        let actual = color_or_return!(f.color(union));
        let constraint = || Constraint::Family {
            members: (0..sets.len()).filter(|b| family >> b & 1 == 1).map(|b| b + 1).collect(),
            union,
        };
        if let Some(bad) = check.observe(constraint, actual) {
            return Ok(Verdict::Violation(bad));
        }
    }
    Ok(Verdict::Ok)
}
