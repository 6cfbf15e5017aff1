mod common;

use common::*;
use hindman_core::bits::{ApartSet, BitBudget};
use hindman_core::certificate::{verify_certificate, AhtStage, Witness};
use hindman_core::coloring::{induced_pair_coloring, projected_point_coloring, Coloring, PairColoring, Word};
use hindman_core::reductions::{
    blocks_from_rt2, chain_rt2_to_ipt2, project_aht_witness, reduce_aht_to_ipt2, reduce_aht_to_ipt2_supplied,
    reduce_rt2_to_aht, word_highest_letter, AhtSource, Outcome, PipelineOptions,
};
use itertools::Itertools;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn opts() -> PipelineOptions {
    PipelineOptions::default()
}

/// All increasing cross pairs of `(h1, h2)` have color `color` under `f`.
fn ipt2_holds(f: &PairColoring, h1: &[u64], h2: &[u64], color: u32) -> bool {
    h1.iter()
        .cartesian_product(h2)
        .filter(|(a, b)| a < b)
        .all(|(&a, &b)| f.color(a, b).unwrap() == color)
}

fn run_sums(h: &[u64]) -> Vec<u64> {
    (0..h.len())
        .flat_map(|i| (i..h.len()).map(move |j| h[i..=j].iter().sum()))
        .collect()
}

#[test]
fn blocks_match_literal_power_sums() {
    let b = BitBudget::default();
    for size in 2..=6 {
        for j in (0..=20u64).combinations(size) {
            let literal: Vec<u64> = j
                .windows(2)
                .map(|w| (w[0] + 1..=w[1]).map(|e| 1u64 << e).sum())
                .collect();
            let h = blocks_from_rt2(&j, b).unwrap();
            assert_eq!(h.elements(), literal.as_slice());
            let (l, u) = project_aht_witness(&h);
            assert_eq!(l, j[..size - 1].iter().map(|x| x + 1).collect::<Vec<_>>());
            assert_eq!(u, j[1..]);
        }
    }
}

#[test]
fn blocks_respect_the_bit_budget() {
    let small = BitBudget::new(8).unwrap();
    assert!(blocks_from_rt2(&[0, 7], small).is_ok());
    assert!(blocks_from_rt2(&[0, 8], small).is_err());
}

#[test]
fn rt2_to_aht_mu_parity() {
    let c = Coloring::parse_expr("mu(n) % 2", 2, 1 << 12).unwrap();
    let f = induced_pair_coloring(&c).unwrap();
    let (j, color) = naive_rt2(&f, 10, 4).unwrap();
    assert_eq!((j.as_slice(), color), ([0, 1, 3, 5].as_slice(), 1));
    let r = reduce_rt2_to_aht(&c, 3, 10, &opts()).unwrap().found().unwrap();
    assert_eq!(r.j, j);
    assert_eq!(r.h.elements(), [2, 12, 48]);
    assert_eq!(r.color, 1);
    assert!(run_sums(r.h.elements()).iter().all(|&s| c.color(s).unwrap() == 1));
}

#[test]
fn rt2_to_aht_lam_parity() {
    let c = Coloring::parse_expr("lam(n) % 2", 2, 1 << 12).unwrap();
    let f = induced_pair_coloring(&c).unwrap();
    for i in 0..10 {
        for j in i + 1..11 {
            assert_eq!(f.color(i, j).unwrap(), ((i + 1) % 2) as u32);
        }
    }
    let (j, color) = naive_rt2(&f, 11, 3).unwrap();
    let r = reduce_rt2_to_aht(&c, 2, 11, &opts()).unwrap().found().unwrap();
    assert_eq!((r.j, r.color), (j, color));
}

#[test]
fn rt2_to_aht_random_colorings() {
    let mut rng = StdRng::seed_from_u64(21);
    let mut found = 0;
    for _ in 0..60 {
        let k = rng.random_range(2..=4);
        let c = random_point_expr(&mut rng, k, 1 << 10);
        let Outcome::Found(r) = reduce_rt2_to_aht(&c, 3, 10, &opts()).unwrap() else {
            continue;
        };
        found += 1;
        assert!(hindman_core::is_apart(r.h.elements()).unwrap());
        let expected = c.color((1 << (r.j[1] + 1)) - (1 << (r.j[0] + 1))).unwrap();
        assert_eq!(r.color, expected);
        assert!(run_sums(r.h.elements()).iter().all(|&s| c.color(s).unwrap() == r.color));
        assert!(verify_certificate(&r.certificate).unwrap().is_ok());
    }
    assert!(found > 30, "only {found} pipelines completed");
}

#[test]
fn aht_to_ipt2_constant_one() {
    let f = PairColoring::parse_expr("1", 2, 8).unwrap();
    let r = reduce_aht_to_ipt2(&f, 2, AhtSource::Search { bound: None }, &opts())
        .unwrap()
        .found()
        .unwrap();
    assert!(ipt2_holds(&f, &r.h1, &r.h2, r.color));
    let g = projected_point_coloring(&f, BitBudget::default()).unwrap();
    assert_eq!(Some((r.h.elements().to_vec(), r.color)), naive_aht(&g, g.bound(), 2, true));
}

#[test]
fn aht_to_ipt2_sum_parity() {
    let f = PairColoring::parse_expr("(i + j) % 2", 2, 12).unwrap();
    let g = projected_point_coloring(&f, BitBudget::default()).unwrap();
    assert_eq!(g.color(12).unwrap(), 1);
    let r = reduce_aht_to_ipt2(&f, 2, AhtSource::Search { bound: Some((1 << 12) - 1) }, &opts())
        .unwrap()
        .found()
        .unwrap();
    assert_eq!(Some((r.h.elements().to_vec(), r.color)), naive_aht(&g, (1 << 12) - 1, 2, true));
    assert!(ipt2_holds(&f, &r.h1, &r.h2, r.color));
}

#[test]
fn aht_to_ipt2_supplied_witness() {
    let f = PairColoring::parse_expr("i % 2", 2, 12).unwrap();
    let g = projected_point_coloring(&f, BitBudget::default()).unwrap();
    assert_eq!([12, 48, 60].map(|n| g.color(n).unwrap()), [0, 0, 0]);
    let r = reduce_aht_to_ipt2_supplied(&f, &[12, 48], &opts()).unwrap();
    assert_eq!((r.h1, r.h2, r.color), (vec![2, 4], vec![3, 5], 0));
    let Witness::AhtToIpt2 { stage, .. } = &r.certificate.witness else {
        panic!("wrong payload")
    };
    assert_eq!(*stage, AhtStage::Supplied);
}

#[test]
fn aht_stage_sources_both_verify() {
    let mut rng = StdRng::seed_from_u64(22);
    for _ in 0..40 {
        let f = random_pair(&mut rng, 2, 10);
        for source in [AhtSource::Search { bound: Some((1 << 10) - 1) }, AhtSource::Chain { rt2_bound: None }] {
            if let Outcome::Found(r) = reduce_aht_to_ipt2(&f, 2, source, &opts()).unwrap() {
                assert!(ipt2_holds(&f, &r.h1, &r.h2, r.color));
                assert!(verify_certificate(&r.certificate).unwrap().is_ok());
            }
        }
    }
}

#[test]
fn chain_examples() {
    for (src, k) in [("0", 1), ("(j - i) % 2", 2), ("if(i < 2, 0, 1)", 2)] {
        let f = PairColoring::parse_expr(src, k, 12).unwrap();
        let r = chain_rt2_to_ipt2(&f, 2, None, &opts()).unwrap().found().unwrap();
        assert!(ipt2_holds(&f, &r.h1, &r.h2, r.color), "{src}");
        assert_eq!(r.certificate.stages.len(), 3);
        for stage in &r.certificate.stages {
            assert!(verify_certificate(stage).unwrap().is_ok());
        }
        if src == "0" {
            assert_eq!(r.color, 0);
        }
    }
}

#[test]
fn pipeline_failures_name_the_stage() {
    let f = PairColoring::parse_expr("(i + j) % 2", 2, 6).unwrap();
    let out = chain_rt2_to_ipt2(&f, 6, None, &opts()).unwrap();
    assert!(matches!(out, Outcome::NoWitness { stage: "RT2", .. }), "{out:?}");
    let limited = PipelineOptions {
        node_limit: Some(3),
        ..opts()
    };
    let out = reduce_aht_to_ipt2(&f, 3, AhtSource::Search { bound: None }, &limited).unwrap();
    assert!(matches!(out, Outcome::BudgetExceeded { stage: "AHT", .. }), "{out:?}");
}

#[test]
fn word_examples() {
    let w = Word::eventually_periodic(&[], &[0, 1, 2], 3).unwrap();
    let r = word_highest_letter(&w, 2, None, &opts()).unwrap().found().unwrap();
    assert_eq!(r.letter, Some(2));

    let w = Word::eventually_periodic(&[], &[0], 1).unwrap();
    let r = word_highest_letter(&w, 3, None, &opts()).unwrap().found().unwrap();
    assert_eq!(r.letter, Some(0));

    let w = Word::eventually_periodic(&[1, 1, 1], &[0], 2).unwrap();
    let r = word_highest_letter(&w, 2, None, &opts()).unwrap().found().unwrap();
    assert_eq!(r.letter, Some(0));
    assert!(r.h.elements()[0].trailing_zeros() >= 3);
}

#[test]
fn word_letter_is_the_period_maximum() {
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..50 {
        let w = random_periodic_word(&mut rng, 6, 8, 12);
        let r = word_highest_letter(&w, 2, None, &opts()).unwrap().found().unwrap();
        let p = w.period().unwrap();
        let cycle_max = *w.letters()[w.letters().len() - p..].iter().max().unwrap();
        assert!(r.h.elements()[0].trailing_zeros() as usize >= w.prefix_len());
        assert_eq!(r.letter, Some(cycle_max));
    }
}

#[test]
fn finite_words_make_no_letter_claim() {
    let w = Word::new(vec![2, 0, 1, 0, 1], 3, None).unwrap();
    let r = word_highest_letter(&w, 2, None, &opts()).unwrap().found().unwrap();
    assert_eq!(r.letter, None);
    assert!(verify_certificate(&r.certificate).unwrap().is_ok());
}

#[test]
fn projection_interleaves() {
    let mut rng = StdRng::seed_from_u64(24);
    for _ in 0..500 {
        let size = rng.random_range(1..=8);
        let h = random_apart_set(&mut rng, size, 63);
        let (l, u) = project_aht_witness(&h);
        let mut chain = Vec::new();
        for (a, b) in l.iter().zip(&u) {
            assert!(a <= b);
            chain.push(*a);
            chain.push(*b);
        }
        assert!(chain.windows(2).enumerate().all(|(i, w)| if i % 2 == 0 { w[0] <= w[1] } else { w[0] < w[1] }));
        let _ = ApartSet::new(h.into_vec()).unwrap();
    }
}
