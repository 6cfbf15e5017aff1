//! Naive oracles and random instance generators shared by the integration
//! tests and the acceptance harness.
#![allow(dead_code)]

use hindman_core::bits::{ApartSet, BitBudget};
use hindman_core::certificate::{Certificate, Instance, InstanceColoring, Status, Witness};
use hindman_core::reductions::{
    chain_rt2_to_ipt2, reduce_aht_to_ipt2, reduce_rt2_to_aht, word_highest_letter, AhtSource, PipelineOptions,
};
use hindman_core::solvers::{solve_aht, solve_hil, solve_ipt2, solve_rt2, SearchBudget};
use hindman_core::coloring::{Coloring, PairColoring, Word};
use hindman_core::expr::{parse_expr, VarSet};
use itertools::Itertools;
use rand::rngs::StdRng;
use rand::Rng;

/// First size-`m` subset of `[1..bound]`, in lexicographic order, whose run
/// sums stay within `bound` and share one color. No pruning.
pub fn naive_aht(c: &Coloring, bound: u64, m: usize, apart: bool) -> Option<(Vec<u64>, u32)> {
    for h in (1..=bound).combinations(m) {
        if apart && h.windows(2).any(|w| w[0].ilog2() >= w[1].trailing_zeros()) {
            continue;
        }
        let mut colors = Vec::new();
        let mut in_range = true;
        for i in 0..m {
            for j in i..m {
                let s: u64 = h[i..=j].iter().sum();
                if s > bound {
                    in_range = false;
                }
                colors.push(s);
            }
        }
        if !in_range {
            continue;
        }
        let colors: Vec<u32> = colors.iter().map(|&s| c.color(s).unwrap()).collect();
        if colors.iter().all_equal() {
            return Some((h, colors[0]));
        }
    }
    None
}

/// First size-`m` subset of `[0..bound)` with every pair one color. A single
/// element has no pairs and reports color 0.
pub fn naive_rt2(f: &PairColoring, bound: u64, m: usize) -> Option<(Vec<u64>, u32)> {
    for j in (0..bound).combinations(m) {
        let colors: Vec<u32> = j.iter().tuple_combinations().map(|(&a, &b)| f.color(a, b).unwrap()).collect();
        if colors.iter().all_equal() {
            return Some((j, colors.first().copied().unwrap_or(0)));
        }
    }
    None
}

/// First `(H1, H2)` in lexicographic order of `H1 ++ H2` with at least one
/// increasing cross pair, all of them one color.
pub fn naive_ipt2(f: &PairColoring, bound: u64, m: usize) -> Option<(Vec<u64>, Vec<u64>, u32)> {
    let subsets: Vec<Vec<u64>> = (0..bound).combinations(m).collect();
    for h1 in &subsets {
        for h2 in &subsets {
            let colors: Vec<u32> = h1
                .iter()
                .cartesian_product(h2)
                .filter(|(a, b)| a < b)
                .map(|(&a, &b)| f.color(a, b).unwrap())
                .collect();
            if !colors.is_empty() && colors.iter().all_equal() {
                return Some((h1.clone(), h2.clone(), colors[0]));
            }
        }
    }
    None
}

/// First increasing list of `m` nonempty masks over `[0..base)` whose
/// nonempty subfamily unions share one color.
pub fn naive_hil(f: &Coloring, base: u64, m: usize) -> Option<(Vec<u64>, u32)> {
    for sets in (1..1u64 << base).combinations(m) {
        let colors: Vec<u32> = (1u64..1 << m)
            .map(|fam| {
                let u = (0..m).filter(|b| fam >> b & 1 == 1).fold(0, |acc, b| acc | sets[b]);
                f.color(u).unwrap()
            })
            .collect();
        if colors.iter().all_equal() {
            return Some((sets, colors[0]));
        }
    }
    None
}

fn atom(rng: &mut StdRng, vars: &[&str]) -> String {
    let v = vars[rng.random_range(0..vars.len())];
    match rng.random_range(0..6) {
        0 => rng.random_range(0..10u32).to_string(),
        1 => format!("lam({v} + 1)"),
        2 => format!("mu({v} + 1)"),
        3 => format!("pop({v})"),
        _ => v.to_string(),
    }
}

fn expr(rng: &mut StdRng, vars: &[&str], depth: u32) -> String {
    if depth == 0 {
        return atom(rng, vars);
    }
    let a = expr(rng, vars, depth - 1);
    match rng.random_range(0..8) {
        0 => atom(rng, vars),
        1 => format!("{a} + {}", expr(rng, vars, depth - 1)),
        2 => format!("{a} - {}", expr(rng, vars, depth - 1)),
        3 => format!("({a}) * {}", rng.random_range(0..8u32)),
        4 => format!("({a}) % {}", rng.random_range(1..8u32)),
        5 => format!("({a}) / {}", rng.random_range(1..5u32)),
        _ => {
            let ops = ["==", "!=", "<", "<=", ">", ">="];
            format!(
                "if({a} {} {}, {}, {})",
                ops[rng.random_range(0..ops.len())],
                expr(rng, vars, depth - 1),
                expr(rng, vars, depth - 1),
                expr(rng, vars, depth - 1)
            )
        }
    }
}

/// Source of a random point expression that evaluates without errors on
/// every `n >= 1`.
pub fn random_point_source(rng: &mut StdRng) -> String {
    let depth = rng.random_range(1..4);
    expr(rng, &["n"], depth)
}

/// Source of a random pair expression, error-free on every `i < j`.
pub fn random_pair_source(rng: &mut StdRng) -> String {
    let depth = rng.random_range(1..4);
    expr(rng, &["i", "j"], depth)
}

pub fn random_point_expr(rng: &mut StdRng, colors: u32, bound: u64) -> Coloring {
    let src = random_point_source(rng);
    Coloring::from_expr(parse_expr(&src, VarSet::POINT).unwrap(), colors, bound).unwrap()
}

pub fn random_pair_expr(rng: &mut StdRng, colors: u32, bound: u64) -> PairColoring {
    let src = random_pair_source(rng);
    PairColoring::from_expr(parse_expr(&src, VarSet::PAIR).unwrap(), colors, bound).unwrap()
}

pub fn random_point_table(rng: &mut StdRng, colors: u32, bound: u64) -> Coloring {
    let table = (0..bound).map(|_| rng.random_range(0..colors)).collect();
    Coloring::from_table(table, colors).unwrap()
}

pub fn random_pair_table(rng: &mut StdRng, colors: u32, bound: u64) -> PairColoring {
    let pairs = bound * bound.saturating_sub(1) / 2;
    let table = (0..pairs).map(|_| rng.random_range(0..colors)).collect();
    PairColoring::from_table(table, colors, bound).unwrap()
}

/// Random point coloring: an expression or a table, half the time each.
pub fn random_point(rng: &mut StdRng, colors: u32, bound: u64) -> Coloring {
    if rng.random_bool(0.5) {
        random_point_expr(rng, colors, bound)
    } else {
        random_point_table(rng, colors, bound)
    }
}

pub fn random_pair(rng: &mut StdRng, colors: u32, bound: u64) -> PairColoring {
    if rng.random_bool(0.5) {
        random_pair_expr(rng, colors, bound)
    } else {
        random_pair_table(rng, colors, bound)
    }
}

/// Random apart set of the given size inside the budget: disjoint ascending
/// bit windows, each with its end bits set and random middle bits.
pub fn random_apart_set(rng: &mut StdRng, size: usize, bits: u32) -> ApartSet {
    // distinct window starts; each window ends before the next one starts
    let mut cuts: Vec<u32> = (0..size).map(|_| rng.random_range(0..bits)).collect();
    cuts.sort_unstable();
    cuts.dedup();
    while cuts.len() < size {
        let c = rng.random_range(0..bits);
        if !cuts.contains(&c) {
            cuts.push(c);
            cuts.sort_unstable();
        }
    }
    let mut out = Vec::with_capacity(size);
    for (idx, &lo) in cuts.iter().enumerate() {
        let limit = cuts.get(idx + 1).map_or(bits, |&n| n);
        let hi = rng.random_range(lo..limit);
        let mut x = (1u64 << lo) | (1u64 << hi);
        for b in lo + 1..hi {
            if rng.random_bool(0.5) {
                x |= 1 << b;
            }
        }
        out.push(x);
    }
    ApartSet::new(out).unwrap()
}

/// Random eventually periodic word.
pub fn random_periodic_word(rng: &mut StdRng, max_alphabet: u32, max_prefix: usize, max_period: usize) -> Word {
    let alphabet = rng.random_range(1..=max_alphabet);
    let prefix: Vec<u32> = (0..rng.random_range(0..=max_prefix))
        .map(|_| rng.random_range(0..alphabet))
        .collect();
    let cycle: Vec<u32> = (0..rng.random_range(1..=max_period))
        .map(|_| rng.random_range(0..alphabet))
        .collect();
    Word::eventually_periodic(&prefix, &cycle, alphabet).unwrap()
}

fn basic_cert(coloring: InstanceColoring, size: usize, bound: u64, apart: bool, witness: Witness, color: u32) -> Certificate {
    let cert = Certificate {
        instance: Instance {
            coloring,
            size,
            bound,
            bit_budget: BitBudget::default(),
            require_apart: apart,
        },
        witness,
        color,
        exhaustive: true,
        status: Status::Unverified,
        stages: vec![],
    };
    let (sealed, verdict) = cert.seal().unwrap();
    assert!(verdict.is_ok(), "solver witness failed verification: {verdict}");
    sealed
}

pub fn aht_certificate(c: &Coloring, bound: u64, m: usize, apart: bool) -> Option<Certificate> {
    let w = solve_aht(c, &SearchBudget::new(bound, m).with_apart(apart)).unwrap().into_witness()?;
    Some(basic_cert(InstanceColoring::Point(c.clone()), m, bound, apart, Witness::Aht { h: w.h }, w.color))
}

pub fn rt2_certificate(f: &PairColoring, bound: u64, m: usize) -> Option<Certificate> {
    let w = solve_rt2(f, &SearchBudget::new(bound, m)).unwrap().into_witness()?;
    Some(basic_cert(InstanceColoring::Pair(f.clone()), m, bound, false, Witness::Rt2 { j: w.j }, w.color))
}

pub fn ipt2_certificate(f: &PairColoring, bound: u64, m: usize) -> Option<Certificate> {
    let w = solve_ipt2(f, &SearchBudget::new(bound, m)).unwrap().into_witness()?;
    Some(basic_cert(
        InstanceColoring::Pair(f.clone()),
        m,
        bound,
        false,
        Witness::Ipt2 { h1: w.h1, h2: w.h2 },
        w.color,
    ))
}

pub fn hil_certificate(c: &Coloring, base: u64, m: usize) -> Option<Certificate> {
    let w = solve_hil(c, &SearchBudget::new(base, m)).unwrap().into_witness()?;
    Some(basic_cert(InstanceColoring::Point(c.clone()), m, base, false, Witness::Hil { sets: w.sets }, w.color))
}

/// A mix of unstaged solver certificates and staged pipeline certificates.
pub fn certificate_corpus(rng: &mut StdRng, per_kind: usize) -> Vec<Certificate> {
    let opts = PipelineOptions::default();
    let mut out = Vec::new();
    let mut kinds = [0usize; 8];
    let mut attempts = 0;
    while kinds.iter().any(|&n| n < per_kind) && attempts < 200 * per_kind {
        attempts += 1;
        let k = rng.random_range(2..=3);
        let kind = rng.random_range(0..8);
        if kinds[kind] >= per_kind {
            continue;
        }
        let cert = match kind {
            0 => aht_certificate(&random_point(rng, k, 64), 64, rng.random_range(1..=3), rng.random_bool(0.8)),
            1 => rt2_certificate(&random_pair(rng, k, 10), 10, rng.random_range(2..=3)),
            2 => ipt2_certificate(&random_pair(rng, k, 8), 8, rng.random_range(1..=2)),
            3 => hil_certificate(&random_point(rng, k, 63), 6, rng.random_range(1..=2)),
            4 => reduce_rt2_to_aht(&random_point(rng, k, 1 << 10), 2, 10, &opts)
                .unwrap()
                .found()
                .map(|r| r.certificate),
            5 => {
                let source = if rng.random_bool(0.5) {
                    AhtSource::Search { bound: None }
                } else {
                    AhtSource::Chain { rt2_bound: None }
                };
                reduce_aht_to_ipt2(&random_pair(rng, k, 8), 2, source, &opts)
                    .unwrap()
                    .found()
                    .map(|r| r.certificate)
            }
            6 => chain_rt2_to_ipt2(&random_pair(rng, k, 8), 2, None, &opts)
                .unwrap()
                .found()
                .map(|r| r.certificate),
            _ => {
                let w = random_periodic_word(rng, 4, 4, 5);
                word_highest_letter(&w, 2, None, &opts).unwrap().found().map(|r| r.certificate)
            }
        };
        if let Some(c) = cert {
            kinds[kind] += 1;
            out.push(c);
        }
    }
    out
}

/// Single mutations of a basic (unstaged) certificate: a flipped color, a
/// dropped element, and an inserted element that breaks the witness shape
/// (a bit-overlapping element for AHT, a repeated element otherwise).
pub fn mutations(cert: &Certificate) -> Vec<(&'static str, Certificate)> {
    let k = cert.instance.coloring.colors();
    let mut flip = cert.clone();
    flip.color = if k == 1 { 1 } else { (cert.color + 1) % k };
    let mut drop = cert.clone();
    let mut insert = cert.clone();
    match (&mut drop.witness, &mut insert.witness) {
        (Witness::Aht { h: d }, Witness::Aht { h: i }) => {
            d.pop();
            let last = *i.last().unwrap();
            i.push(3 << last.ilog2());
        }
        (Witness::Rt2 { j: d }, Witness::Rt2 { j: i }) => {
            d.pop();
            i.insert(1, i[0]);
        }
        (Witness::Ipt2 { h1: d, .. }, Witness::Ipt2 { h2: i, .. }) => {
            d.pop();
            i.insert(1, i[0]);
        }
        (Witness::Hil { sets: d }, Witness::Hil { sets: i }) => {
            d.pop();
            i.push(i[0]);
        }
        _ => panic!("mutations apply to unstaged certificates"),
    }
    vec![("color flip", flip), ("element drop", drop), ("insertion", insert)]
}
