//! Point colorings `c: [1..N] -> k`, pair colorings `f: {(i, j) : i < j < N} -> k`
//! and finite or eventually periodic words, together with the transformers
//! that turn one kind into another.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::{BitBudget, NumericError};
use crate::expr::{parse_expr, Env, EvalError, Expr, ParseError, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("{n} is outside the coloring domain [1..{bound}]")]
    PointDomain { n: u64, bound: u64 },
    #[error("({i}, {j}) is not an increasing pair below {bound}")]
    PairDomain { i: u64, j: u64, bound: u64 },
    #[error("({i}, {j}) lies outside the admissible region: block sum exceeds {bound}")]
    InducedBudget { i: u64, j: u64, bound: u64 },
    #[error("μ({n}) = {mu} is not below the pair bound {pair_bound}")]
    ProjectedBudget { n: u64, mu: u32, pair_bound: u64 },
    #[error("window [{lam}, {mu}] runs past the end of a word of length {len}")]
    WordWindow { lam: u32, mu: u32, len: usize },
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("number of colors must be at least 1")]
    NoColors,
    #[error("domain bound must be at least {min}, got {got}")]
    BoundTooSmall { min: u64, got: u64 },
    #[error("bound {0} exceeds the bit budget")]
    BoundOverBudget(u64),
    #[error("color {color} at entry {index} is not below {colors}")]
    ColorRange { index: usize, color: u32, colors: u32 },
    #[error("table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("coloring is too large to materialize ({0} entries)")]
    TooLarge(u64),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

impl ColoringError {
    /// True for errors that only say the argument fell outside the domain
    /// the coloring is defined on.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            ColoringError::PointDomain { .. }
                | ColoringError::PairDomain { .. }
                | ColoringError::InducedBudget { .. }
                | ColoringError::ProjectedBudget { .. }
                | ColoringError::WordWindow { .. }
        )
    }
}

/// Reduces an expression value into `[0, k)`.
fn reduce(value: i128, colors: u32) -> u32 {
    value.rem_euclid(colors as i128) as u32
}

/// A finite word over `{0, ..., a+1}`, optionally eventually periodic: when
/// `period` is `Some(p)` the last `p` letters repeat forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<u32>,
    alphabet: u32,
    period: Option<usize>,
}

impl Word {
    pub fn new(letters: Vec<u32>, alphabet: u32, period: Option<usize>) -> Result<Self, ColoringError> {
        if alphabet == 0 {
            return Err(ColoringError::NoColors);
        }
        if let Some((index, &color)) = letters.iter().enumerate().find(|(_, &c)| c >= alphabet) {
            return Err(ColoringError::ColorRange {
                index,
                color,
                colors: alphabet,
            });
        }
        if let Some(p) = period {
            if p == 0 || p > letters.len() {
                return Err(ColoringError::Format {
                    line: 1,
                    message: format!("period {p} must lie in 1..={}", letters.len()),
                });
            }
        }
        Ok(Self {
            letters,
            alphabet,
            period,
        })
    }

    /// Builds `prefix` followed by `cycle` repeated forever.
    pub fn eventually_periodic(prefix: &[u32], cycle: &[u32], alphabet: u32) -> Result<Self, ColoringError> {
        let mut letters = prefix.to_vec();
        letters.extend_from_slice(cycle);
        Self::new(letters, alphabet, Some(cycle.len()))
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    /// Alphabet size `a + 2`.
    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    /// Length of the part before the repeating tail.
    pub fn prefix_len(&self) -> usize {
        self.letters.len() - self.period.unwrap_or(0)
    }

    /// Largest letter of the repeating tail.
    pub fn period_max(&self) -> Option<u32> {
        self.period
            .map(|p| *self.letters[self.letters.len() - p..].iter().max().unwrap())
    }

    pub fn letter(&self, pos: usize) -> Option<u32> {
        if pos < self.letters.len() {
            return Some(self.letters[pos]);
        }
        let p = self.period?;
        let start = self.prefix_len();
        Some(self.letters[start + (pos - start) % p])
    }

    /// Parses the word file format: `a=<int> L=<int> [p=<int>]` followed by
    /// `L` letters, one per line.
    pub fn parse(text: &str) -> Result<Self, ColoringError> {
        let mut lines = content_lines(text);
        let (hline, header) = lines.next().ok_or_else(|| format_err(1, "missing header"))?;
        let fields = header_fields(hline, header, &["a", "L"], &["p"])?;
        let a = fields[0].unwrap();
        let len = usize::try_from(fields[1].unwrap()).map_err(|_| format_err(hline, "L must be nonnegative"))?;
        let period = fields[2].map(|p| p as usize);
        let alphabet = u32::try_from(a + 2).map_err(|_| format_err(hline, "a is too large"))?;
        let mut letters = Vec::with_capacity(len);
        for (line, body) in lines {
            if letters.len() == len {
                return Err(format_err(line, "more letters than L"));
            }
            let letter = parse_num::<u32>(line, body)?;
            if letter >= alphabet {
                return Err(format_err(line, format!("letter {letter} exceeds a+1 = {}", alphabet - 1)));
            }
            letters.push(letter);
        }
        if letters.len() != len {
            return Err(format_err(
                text.lines().count().max(1),
                format!("expected {len} letters, found {}", letters.len()),
            ));
        }
        Word::new(letters, alphabet, period).map_err(|e| match e {
            ColoringError::Format { message, .. } => format_err(hline, message),
            other => other,
        })
    }

    pub fn to_file_string(&self) -> String {
        let mut out = format!("a={} L={}", self.alphabet as i64 - 2, self.letters.len());
        if let Some(p) = self.period {
            let _ = write!(out, " p={p}");
        }
        out.push('\n');
        for l in &self.letters {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}

/// What a point coloring is computed from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PointBacking {
    /// `table[n - 1]` is the color of `n`.
    Table(Vec<u32>),
    Expr(Expr),
    /// `g(n) = f(lam(n), mu(n))`, or 0 on powers of two.
    Projected(Box<PairColoring>),
    /// `D(n)` = largest letter on positions `lam(n)..=mu(n)`.
    WordBlock(Word),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    colors: u32,
    bound: u64,
    backing: PointBacking,
}

impl Coloring {
    pub fn from_expr(expr: Expr, colors: u32, bound: u64) -> Result<Self, ColoringError> {
        check_colors(colors)?;
        if bound == 0 {
            return Err(ColoringError::BoundTooSmall { min: 1, got: 0 });
        }
        if bound > BitBudget::default().max_value() {
            return Err(ColoringError::BoundOverBudget(bound));
        }
        Ok(Self {
            colors,
            bound,
            backing: PointBacking::Expr(expr),
        })
    }

    pub fn parse_expr(src: &str, colors: u32, bound: u64) -> Result<Self, ColoringError> {
        Self::from_expr(parse_expr(src, VarSet::POINT)?, colors, bound)
    }

    pub fn from_table(table: Vec<u32>, colors: u32) -> Result<Self, ColoringError> {
        check_colors(colors)?;
        check_table(&table, colors)?;
        if table.is_empty() {
            return Err(ColoringError::BoundTooSmall { min: 1, got: 0 });
        }
        Ok(Self {
            colors,
            bound: table.len() as u64,
            backing: PointBacking::Table(table),
        })
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    /// Largest `n` in the domain `[1..N]`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn backing(&self) -> &PointBacking {
        &self.backing
    }

    /// Whether `c(n)` depends only on `(lam(n), mu(n))`.
    pub fn is_window_determined(&self) -> bool {
        matches!(
            self.backing,
            PointBacking::Projected(_) | PointBacking::WordBlock(_)
        )
    }

    pub fn color(&self, n: u64) -> Result<u32, ColoringError> {
        if n == 0 || n > self.bound {
            return Err(ColoringError::PointDomain { n, bound: self.bound });
        }
        match &self.backing {
            PointBacking::Table(t) => Ok(t[(n - 1) as usize]),
            PointBacking::Expr(e) => Ok(reduce(e.eval(&Env::point(n))?, self.colors)),
            PointBacking::Projected(f) => {
                let (lam, mu) = (n.trailing_zeros(), n.ilog2());
                if mu as u64 >= f.bound {
                    return Err(ColoringError::ProjectedBudget {
                        n,
                        mu,
                        pair_bound: f.bound,
                    });
                }
                if lam == mu {
                    Ok(0)
                } else {
                    f.color(lam as u64, mu as u64)
                }
            }
            PointBacking::WordBlock(w) => {
                let (lam, mu) = (n.trailing_zeros(), n.ilog2());
                (lam..=mu)
                    .map(|pos| w.letter(pos as usize))
                    .try_fold(0u32, |acc, l| l.map(|l| acc.max(l)))
                    .ok_or(ColoringError::WordWindow {
                        lam,
                        mu,
                        len: w.letters.len(),
                    })
            }
        }
    }

    /// Evaluates every point of the domain into a table coloring.
    pub fn materialize(&self) -> Result<Coloring, ColoringError> {
        if self.bound > MATERIALIZE_LIMIT {
            return Err(ColoringError::TooLarge(self.bound));
        }
        let table = (1..=self.bound).map(|n| self.color(n)).collect::<Result<Vec<_>, _>>()?;
        Coloring::from_table(table, self.colors)
    }

    /// Parses the point table format: `k=<int> N=<int>` then `N` colors.
    pub fn parse_table(text: &str) -> Result<Self, ColoringError> {
        let mut lines = content_lines(text);
        let (hline, header) = lines.next().ok_or_else(|| format_err(1, "missing header"))?;
        let fields = header_fields(hline, header, &["k", "N"], &[])?;
        let colors = u32::try_from(fields[0].unwrap()).map_err(|_| format_err(hline, "k out of range"))?;
        let n = fields[1].unwrap();
        if colors == 0 {
            return Err(format_err(hline, "k must be at least 1"));
        }
        if n == 0 {
            return Err(format_err(hline, "N must be at least 1"));
        }
        let mut table = Vec::new();
        let mut last_line = hline;
        for (line, body) in lines {
            last_line = line;
            if table.len() as i64 == n {
                return Err(format_err(line, "more entries than N"));
            }
            let c = parse_num::<u32>(line, body)?;
            if c >= colors {
                return Err(format_err(line, format!("color {c} is not below k = {colors}")));
            }
            table.push(c);
        }
        if table.len() as i64 != n {
            return Err(format_err(
                last_line,
                format!("expected {n} entries, found {}", table.len()),
            ));
        }
        Coloring::from_table(table, colors)
    }

    pub fn table_file_string(&self) -> Option<String> {
        match &self.backing {
            PointBacking::Table(t) => Some(point_table_text(t, self.colors)),
            _ => None,
        }
    }
}

const MATERIALIZE_LIMIT: u64 = 1 << 24;

fn point_table_text(table: &[u32], colors: u32) -> String {
    let mut out = format!("k={} N={}\n", colors, table.len());
    for c in table {
        let _ = writeln!(out, "{c}");
    }
    out
}

/// What a pair coloring is computed from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PairBacking {
    /// Colors of the increasing pairs in ascending `(i, j)` order.
    Table(Vec<u32>),
    Expr(Expr),
    /// `f(i, j) = c(2^(i+1) + ... + 2^j) = c(2^(j+1) - 2^(i+1))`.
    Induced(Box<Coloring>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairColoring {
    colors: u32,
    bound: u64,
    backing: PairBacking,
}

/// Position of `(i, j)`, `i < j < bound`, in ascending pair order.
fn pair_rank(i: u64, j: u64, bound: u64) -> usize {
    (i * (2 * bound - i - 1) / 2 + (j - i - 1)) as usize
}

fn pair_count(bound: u64) -> u64 {
    bound * bound.saturating_sub(1) / 2
}

impl PairColoring {
    pub fn from_expr(expr: Expr, colors: u32, bound: u64) -> Result<Self, ColoringError> {
        check_colors(colors)?;
        if bound > BitBudget::default().max_value() {
            return Err(ColoringError::BoundOverBudget(bound));
        }
        Ok(Self {
            colors,
            bound,
            backing: PairBacking::Expr(expr),
        })
    }

    pub fn parse_expr(src: &str, colors: u32, bound: u64) -> Result<Self, ColoringError> {
        Self::from_expr(parse_expr(src, VarSet::PAIR)?, colors, bound)
    }

    /// `table` lists the colors of all increasing pairs below `bound` in
    /// ascending `(i, j)` order.
    pub fn from_table(table: Vec<u32>, colors: u32, bound: u64) -> Result<Self, ColoringError> {
        check_colors(colors)?;
        check_table(&table, colors)?;
        let expected = pair_count(bound) as usize;
        if table.len() != expected {
            return Err(ColoringError::TableSize {
                got: table.len(),
                expected,
            });
        }
        Ok(Self {
            colors,
            bound,
            backing: PairBacking::Table(table),
        })
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    /// Pairs are drawn from `[0..bound)`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn backing(&self) -> &PairBacking {
        &self.backing
    }

    pub fn color(&self, i: u64, j: u64) -> Result<u32, ColoringError> {
        if i >= j || j >= self.bound {
            return Err(ColoringError::PairDomain { i, j, bound: self.bound });
        }
        match &self.backing {
            PairBacking::Table(t) => Ok(t[pair_rank(i, j, self.bound)]),
            PairBacking::Expr(e) => Ok(reduce(e.eval(&Env::pair(i, j))?, self.colors)),
            PairBacking::Induced(c) => {
                let sum = (1u128 << (j + 1)) - (1u128 << (i + 1));
                if sum > c.bound as u128 {
                    return Err(ColoringError::InducedBudget { i, j, bound: c.bound });
                }
                c.color(sum as u64)
            }
        }
    }

    pub fn materialize(&self) -> Result<PairColoring, ColoringError> {
        let count = pair_count(self.bound);
        if count > MATERIALIZE_LIMIT {
            return Err(ColoringError::TooLarge(count));
        }
        let mut table = Vec::with_capacity(count as usize);
        for i in 0..self.bound {
            for j in i + 1..self.bound {
                table.push(self.color(i, j)?);
            }
        }
        PairColoring::from_table(table, self.colors, self.bound)
    }

    /// Parses the pair table format: `k=<int> N=<int>` then one `i j color`
    /// line per increasing pair, ascending.
    pub fn parse_table(text: &str) -> Result<Self, ColoringError> {
        let mut lines = content_lines(text);
        let (hline, header) = lines.next().ok_or_else(|| format_err(1, "missing header"))?;
        let fields = header_fields(hline, header, &["k", "N"], &[])?;
        let colors = u32::try_from(fields[0].unwrap()).map_err(|_| format_err(hline, "k out of range"))?;
        let bound = u64::try_from(fields[1].unwrap()).map_err(|_| format_err(hline, "N out of range"))?;
        if colors == 0 {
            return Err(format_err(hline, "k must be at least 1"));
        }
        let mut expected = (0..bound).flat_map(|i| (i + 1..bound).map(move |j| (i, j)));
        let mut table = Vec::new();
        let mut last_line = hline;
        for (line, body) in lines {
            last_line = line;
            let parts: Vec<&str> = body.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(format_err(line, "expected 'i j color'"));
            }
            let i = parse_num::<u64>(line, parts[0])?;
            let j = parse_num::<u64>(line, parts[1])?;
            let c = parse_num::<u32>(line, parts[2])?;
            match expected.next() {
                Some(pair) if pair == (i, j) => {}
                Some((ei, ej)) => {
                    return Err(format_err(line, format!("expected pair ({ei}, {ej}), found ({i}, {j})")))
                }
                None => return Err(format_err(line, "more pairs than N allows")),
            }
            if c >= colors {
                return Err(format_err(line, format!("color {c} is not below k = {colors}")));
            }
            table.push(c);
        }
        if let Some((i, j)) = expected.next() {
            return Err(format_err(last_line, format!("missing pair ({i}, {j})")));
        }
        PairColoring::from_table(table, colors, bound)
    }

    pub fn table_file_string(&self) -> Option<String> {
        let PairBacking::Table(t) = &self.backing else {
            return None;
        };
        let mut out = format!("k={} N={}\n", self.colors, self.bound);
        let mut it = t.iter();
        for i in 0..self.bound {
            for j in i + 1..self.bound {
                let _ = writeln!(out, "{i} {j} {}", it.next().unwrap());
            }
        }
        Some(out)
    }
}

/// The pair coloring `f(i, j) = c(2^(i+1) + ... + 2^j)`.
///
/// The pair bound is the largest `P` with every block sum `2^(j+1) - 2^(i+1)`,
/// `i < j < P`, inside `c`'s domain, i.e. `2^P - 2 <= N`.
pub fn induced_pair_coloring(c: &Coloring) -> Result<PairColoring, ColoringError> {
    if c.bound < 2 {
        return Err(ColoringError::BoundTooSmall { min: 2, got: c.bound });
    }
    let pair_bound = (c.bound as u128 + 2).ilog2() as u64;
    Ok(PairColoring {
        colors: c.colors,
        bound: pair_bound,
        backing: PairBacking::Induced(Box::new(c.clone())),
    })
}

/// The point coloring `g(n) = f(lam(n), mu(n))` when `lam(n) != mu(n)` and
/// `g(n) = 0` on powers of two, defined on `[1..2^P - 1]` capped by the budget.
pub fn projected_point_coloring(f: &PairColoring, budget: BitBudget) -> Result<Coloring, ColoringError> {
    if f.bound == 0 {
        return Err(ColoringError::BoundTooSmall { min: 1, got: 0 });
    }
    let bound = if f.bound >= budget.bits() as u64 {
        budget.max_value()
    } else {
        (1u64 << f.bound) - 1
    };
    Ok(Coloring {
        colors: f.colors,
        bound,
        backing: PointBacking::Projected(Box::new(f.clone())),
    })
}

/// `D(n) = max{ w(t) : lam(n) <= t <= mu(n) }`, with `a + 2` colors.
///
/// Periodic words color the whole budget range; finite words stop at
/// `2^L - 1` so that every window lies inside the word.
pub fn word_block_coloring(w: &Word, budget: BitBudget) -> Result<Coloring, ColoringError> {
    let len = w.letters.len();
    if len == 0 {
        return Err(ColoringError::BoundTooSmall { min: 1, got: 0 });
    }
    let bound = if w.is_periodic() || len >= budget.bits() as usize {
        budget.max_value()
    } else {
        (1u64 << len) - 1
    };
    Ok(Coloring {
        colors: w.alphabet,
        bound,
        backing: PointBacking::WordBlock(w.clone()),
    })
}

fn check_colors(colors: u32) -> Result<(), ColoringError> {
    if colors == 0 {
        Err(ColoringError::NoColors)
    } else {
        Ok(())
    }
}

fn check_table(table: &[u32], colors: u32) -> Result<(), ColoringError> {
    match table.iter().enumerate().find(|(_, &c)| c >= colors) {
        Some((index, &color)) => Err(ColoringError::ColorRange { index, color, colors }),
        None => Ok(()),
    }
}

fn format_err(line: usize, message: impl Into<String>) -> ColoringError {
    ColoringError::Format {
        line,
        message: message.into(),
    }
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, ColoringError> {
    s.trim()
        .parse::<T>()
        .map_err(|_| format_err(line, format!("malformed integer '{}'", s.trim())))
}

/// Parses `key=value` header fields; returns required keys then optional keys
/// in the order given.
fn header_fields(
    line: usize,
    header: &str,
    required: &[&str],
    optional: &[&str],
) -> Result<Vec<Option<i64>>, ColoringError> {
    let keys: Vec<&str> = required.iter().chain(optional).copied().collect();
    let mut values = vec![None; keys.len()];
    for part in header.split_whitespace() {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format_err(line, format!("malformed header field '{part}'")))?;
        let slot = keys
            .iter()
            .position(|key| *key == k)
            .ok_or_else(|| format_err(line, format!("unknown header field '{k}'")))?;
        if values[slot].is_some() {
            return Err(format_err(line, format!("duplicate header field '{k}'")));
        }
        values[slot] = Some(parse_num::<i64>(line, v)?);
    }
    for (slot, key) in required.iter().enumerate() {
        if values[slot].is_none() {
            return Err(format_err(line, format!("header is missing '{key}'")));
        }
    }
    if values.iter().flatten().any(|&v| v < -1) {
        return Err(format_err(line, "header values must be nonnegative"));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn point(src: &str, k: u32, n: u64) -> Coloring {
        Coloring::parse_expr(src, k, n).unwrap()
    }

    #[test]
    fn eval_coloring_examples() {
        assert_eq!(point("lam(n) % 2", 2, 64).color(12), Ok(0));
        // μ(48) = 5 by bit scan
        assert_eq!(48u64.ilog2(), 5);
        assert_eq!(point("mu(n) % 2", 2, 64).color(48), Ok(1));
        let t = Coloring::from_table(vec![1, 0], 2).unwrap();
        assert_eq!(t.color(2), Ok(0));
        assert_eq!(t.color(3), Err(ColoringError::PointDomain { n: 3, bound: 2 }));
        assert_eq!(t.color(0), Err(ColoringError::PointDomain { n: 0, bound: 2 }));
    }

    #[test]
    fn expressions_reduce_mod_k() {
        let c = point("n - 10", 3, 20);
        assert_eq!(c.color(1), Ok(0)); // -9 mod 3
        assert_eq!(c.color(12), Ok(2));
        assert!(matches!(point("n / (n - 1)", 2, 5).color(1), Err(ColoringError::Eval(_))));
    }

    #[test]
    fn induced_pair_coloring_examples() {
        let c = Coloring::from_table((1..=30).collect(), 31).unwrap();
        let f = induced_pair_coloring(&c).unwrap();
        // 2^P - 2 <= 30 gives P = 5
        assert_eq!(f.bound(), 5);
        assert_eq!(f.color(0, 1), c.color(2));
        // oracle: 2^2 + 2^3 summed directly
        assert_eq!(f.color(1, 3), c.color(4 + 8));
        assert_eq!(f.color(1, 3), Ok(12));
        assert!(f.color(0, 5).unwrap_err().is_domain());
        let mu2 = induced_pair_coloring(&point("mu(n) % 2", 2, BitBudget::default().max_value())).unwrap();
        assert_eq!(mu2.bound(), 63);
        for i in 0..20 {
            for j in i + 1..21 {
                assert_eq!(mu2.color(i, j), Ok((j % 2) as u32));
            }
        }
        assert!(induced_pair_coloring(&Coloring::from_table(vec![0], 1).unwrap()).is_err());
    }

    #[test]
    fn projected_point_coloring_examples() {
        let f = PairColoring::parse_expr("(i + j) % 2", 2, 10).unwrap();
        let g = projected_point_coloring(&f, BitBudget::default()).unwrap();
        assert_eq!(g.bound(), 1023);
        for t in 0..10 {
            assert_eq!(g.color(1 << t), Ok(0));
        }
        assert_eq!(g.color(12), Ok(1));
        assert!(g.color(1024).unwrap_err().is_domain());
        let one = PairColoring::parse_expr("1", 2, 5).unwrap();
        assert_eq!(projected_point_coloring(&one, BitBudget::default()).unwrap().color(6), Ok(1));
        let wide = PairColoring::parse_expr("1", 2, 80).unwrap();
        let small = BitBudget::new(10).unwrap();
        let g = projected_point_coloring(&wide, small).unwrap();
        assert_eq!(g.bound(), 1023);
    }

    #[test]
    fn projected_depends_only_on_window() {
        let f = PairColoring::parse_expr("(3 * i + j * j) % 3", 3, 12).unwrap();
        let g = projected_point_coloring(&f, BitBudget::default()).unwrap();
        for n in 1..4096u64 {
            let (l, m) = (n.trailing_zeros(), n.ilog2());
            let canonical = (1u64 << l) | (1u64 << m);
            assert_eq!(g.color(n), g.color(canonical));
        }
    }

    #[test]
    fn word_block_examples() {
        let w = Word::eventually_periodic(&[], &[0, 1, 2], 3).unwrap();
        let d = word_block_coloring(&w, BitBudget::default()).unwrap();
        assert_eq!(d.colors(), 3);
        assert_eq!(d.color(12), Ok(2));
        for t in 0..62 {
            assert_eq!(d.color(1 << t), Ok(w.letter(t as usize).unwrap()));
        }
        let zero = Word::new(vec![0; 4], 1, Some(1)).unwrap();
        let d0 = word_block_coloring(&zero, BitBudget::default()).unwrap();
        assert!((1..500).all(|n| d0.color(n) == Ok(0)));
        let finite = Word::new(vec![0, 3, 1], 4, None).unwrap();
        let df = word_block_coloring(&finite, BitBudget::default()).unwrap();
        assert_eq!(df.bound(), 7);
        assert_eq!(df.color(5), Ok(3));
        assert!(df.color(8).unwrap_err().is_domain());
    }

    #[test]
    fn word_letters_and_period() {
        let w = Word::eventually_periodic(&[1, 1, 1], &[0], 2).unwrap();
        assert_eq!(w.prefix_len(), 3);
        assert_eq!(w.period_max(), Some(0));
        assert_eq!(w.letter(2), Some(1));
        assert_eq!(w.letter(100), Some(0));
        let w = Word::eventually_periodic(&[5], &[0, 2, 1], 6).unwrap();
        assert_eq!((4..10).map(|t| w.letter(t).unwrap()).collect::<Vec<_>>(), vec![0, 2, 1, 0, 2, 1]);
        assert!(Word::new(vec![0, 7], 3, None).is_err());
        assert!(Word::new(vec![0], 1, Some(2)).is_err());
    }

    #[test]
    fn table_files() {
        let c = Coloring::parse_table("k=2 N=3\n1\n0\n1\n").unwrap();
        assert_eq!(c.color(3), Ok(1));
        assert_eq!(c.table_file_string().unwrap(), "k=2 N=3\n1\n0\n1\n");
        let err = Coloring::parse_table("k=2 N=3\n1\n2\n1\n").unwrap_err();
        assert!(matches!(err, ColoringError::Format { line: 3, .. }));
        assert!(matches!(
            Coloring::parse_table("k=2 N=3\n1\n0\n"),
            Err(ColoringError::Format { line: 3, .. })
        ));
        assert!(Coloring::parse_table("k=2\n1\n").is_err());
        assert!(Coloring::parse_table("k=2 N=1 z=3\n1\n").is_err());

        let text = "k=2 N=3\n0 1 1\n0 2 0\n1 2 1\n";
        let f = PairColoring::parse_table(text).unwrap();
        assert_eq!(f.color(0, 2), Ok(0));
        assert_eq!(f.color(1, 2), Ok(1));
        assert_eq!(f.table_file_string().unwrap(), text);
        assert!(matches!(
            PairColoring::parse_table("k=2 N=3\n0 1 1\n1 2 0\n0 2 1\n"),
            Err(ColoringError::Format { line: 3, .. })
        ));
        assert!(PairColoring::parse_table("k=2 N=3\n0 1 1\n0 2 0\n").is_err());
    }

    #[test]
    fn word_files() {
        let w = Word::parse("a=1 L=4 p=3\n0\n1\n2\n0\n").unwrap();
        assert_eq!(w.alphabet(), 3);
        assert_eq!(w.prefix_len(), 1);
        assert_eq!(w.to_file_string(), "a=1 L=4 p=3\n0\n1\n2\n0\n");
        assert!(matches!(Word::parse("a=1 L=2\n0\n3\n"), Err(ColoringError::Format { line: 3, .. })));
        assert!(Word::parse("a=1 L=2 p=5\n0\n1\n").is_err());
        assert!(Word::parse("a=1 L=3\n0\n1\n").is_err());
        let unary = Word::parse("a=-1 L=2 p=1\n0\n0\n").unwrap();
        assert_eq!(unary.alphabet(), 1);
    }

    #[test]
    fn pair_rank_is_ascending_order() {
        let bound = 7;
        let mut expected = 0;
        for i in 0..bound {
            for j in i + 1..bound {
                assert_eq!(pair_rank(i, j, bound), expected);
                expected += 1;
            }
        }
        assert_eq!(expected as u64, pair_count(bound));
    }

    proptest! {
        #[test]
        fn block_sum_closed_form(i in 0u32..20, d in 1u32..20) {
            let j = i + d;
            let looped: u128 = (i + 1..=j).map(|t| 1u128 << t).sum();
            prop_assert_eq!(looped, (1u128 << (j + 1)) - (1u128 << (i + 1)));
        }

        #[test]
        fn expr_and_materialized_table_agree(a in 0u64..7, b in 1u64..5, k in 1u32..5) {
            let src = format!("(pop(n) * {a} + lam(n)) % {b} + mu(n)");
            let c = point(&src, k, 300);
            let t = c.materialize().unwrap();
            for n in 1..=300 {
                prop_assert_eq!(c.color(n), t.color(n));
            }
        }

        #[test]
        fn word_block_monotone(
            letters in proptest::collection::vec(0u32..5, 1..10),
            n in 1u64..(1 << 20),
            m in 1u64..(1 << 20),
        ) {
            let w = Word::new(letters.clone(), 5, Some(letters.len())).unwrap();
            let d = word_block_coloring(&w, BitBudget::default()).unwrap();
            let (ln, un) = (n.trailing_zeros(), n.ilog2());
            let (lm, um) = (m.trailing_zeros(), m.ilog2());
            if lm <= ln && un <= um {
                prop_assert!(d.color(n).unwrap() <= d.color(m).unwrap());
            }
        }
    }
}
