//! Certificates: a self-contained record of an instance, a witness and its
//! claimed color, checkable without the run that produced it.

mod format;
mod verify;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use format::{read_certificate, write_certificate};
pub use verify::{
    format_set, verify_aht, verify_hil, verify_ipt2, verify_rt2, Constraint, Counterexample, Verdict, MAX_HIL_FAMILY,
};

use crate::bits::{ApartSet, BitBudget, NumericError};
use crate::coloring::{induced_pair_coloring, projected_point_coloring, Coloring, ColoringError, PairColoring, PointBacking};
use crate::reductions::{blocks_from_rt2, project_aht_witness};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertificateError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Principle {
    Aht,
    Rt2,
    Ipt2,
    Hil,
    Rt2ToAht,
    AhtToIpt2,
    Chain,
    Word,
}

impl Principle {
    pub const ALL: [Principle; 8] = [
        Principle::Aht,
        Principle::Rt2,
        Principle::Ipt2,
        Principle::Hil,
        Principle::Rt2ToAht,
        Principle::AhtToIpt2,
        Principle::Chain,
        Principle::Word,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Principle::Aht => "AHT",
            Principle::Rt2 => "RT2",
            Principle::Ipt2 => "IPT2",
            Principle::Hil => "HIL",
            Principle::Rt2ToAht => "RT2_TO_AHT",
            Principle::AhtToIpt2 => "AHT_TO_IPT2",
            Principle::Chain => "CHAIN",
            Principle::Word => "WORD",
        }
    }

    /// Finitization convention recorded in certificates of this principle.
    pub fn convention(self) -> Option<&'static str> {
        match self {
            Principle::Hil => Some("sets are distinct nonempty bitmasks over [0..bound)"),
            Principle::Rt2ToAht | Principle::Chain => Some("|J| = m+1 yields |H| = m"),
            Principle::Word => Some("lam(h_1) >= prefix length and mu(h_m) - lam(h_1) + 1 >= period"),
            _ => None,
        }
    }

    /// Whether the instance coloring is a pair coloring.
    pub fn pair_instance(self) -> bool {
        matches!(
            self,
            Principle::Rt2 | Principle::Ipt2 | Principle::AhtToIpt2 | Principle::Chain
        )
    }
}

impl fmt::Display for Principle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Principle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Principle::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown principle {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InstanceColoring {
    Point(Coloring),
    Pair(PairColoring),
}

impl InstanceColoring {
    pub fn colors(&self) -> u32 {
        match self {
            InstanceColoring::Point(c) => c.colors(),
            InstanceColoring::Pair(f) => f.colors(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub coloring: InstanceColoring,
    /// Target witness size `m`.
    pub size: usize,
    /// Search bound: largest run sum for AHT, exclusive exponent bound for
    /// pair principles, base for HIL.
    pub bound: u64,
    pub bit_budget: BitBudget,
    pub require_apart: bool,
}

/// Where the AHT stage of an AHT-to-IPT² reduction came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AhtStage {
    Search,
    Chain,
    Supplied,
}

impl AhtStage {
    pub fn name(self) -> &'static str {
        match self {
            AhtStage::Search => "search",
            AhtStage::Chain => "chain",
            AhtStage::Supplied => "supplied",
        }
    }
}

impl FromStr for AhtStage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [AhtStage::Search, AhtStage::Chain, AhtStage::Supplied]
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown AHT stage {s:?}"))
    }
}

/// Principle-specific payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Witness {
    Aht { h: Vec<u64> },
    Rt2 { j: Vec<u64> },
    Ipt2 { h1: Vec<u64>, h2: Vec<u64> },
    /// Bitmasks in witness order.
    Hil { sets: Vec<u64> },
    Rt2ToAht { j: Vec<u64>, h: Vec<u64> },
    AhtToIpt2 { stage: AhtStage, h: Vec<u64>, h1: Vec<u64>, h2: Vec<u64> },
    Chain { j: Vec<u64>, h: Vec<u64>, h1: Vec<u64>, h2: Vec<u64> },
    /// `letter` is present only when the word is periodic.
    Word { h: Vec<u64>, letter: Option<u32> },
}

impl Witness {
    pub fn principle(&self) -> Principle {
        match self {
            Witness::Aht { .. } => Principle::Aht,
            Witness::Rt2 { .. } => Principle::Rt2,
            Witness::Ipt2 { .. } => Principle::Ipt2,
            Witness::Hil { .. } => Principle::Hil,
            Witness::Rt2ToAht { .. } => Principle::Rt2ToAht,
            Witness::AhtToIpt2 { .. } => Principle::AhtToIpt2,
            Witness::Chain { .. } => Principle::Chain,
            Witness::Word { .. } => Principle::Word,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Verified,
    Unverified,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Unverified => "unverified",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub instance: Instance,
    pub witness: Witness,
    pub color: u32,
    /// The producing search ran to completion, so the witness is the least one.
    pub exhaustive: bool,
    pub status: Status,
    pub stages: Vec<Certificate>,
}

impl Certificate {
    pub fn principle(&self) -> Principle {
        self.witness.principle()
    }

    /// Rechecks the certificate and sets its status accordingly. Nested
    /// stages are rechecked as part of the whole, so they share the status.
    pub fn seal(mut self) -> Result<(Self, Verdict), CertificateError> {
        let verdict = verify_certificate(&self)?;
        self.set_status(if verdict.is_ok() {
            Status::Verified
        } else {
            Status::Unverified
        });
        Ok((self, verdict))
    }

    fn set_status(&mut self, status: Status) {
        self.status = status;
        for stage in &mut self.stages {
            stage.set_status(status);
        }
    }

    /// Short digest of the canonical text, used for default file names.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let text = write_certificate(self);
        hex::encode(&Sha256::digest(text.as_bytes())[..6])
    }
}

fn violation(c: Counterexample) -> Verdict {
    Verdict::Violation(c)
}

fn link(msg: impl Into<String>) -> Verdict {
    violation(Counterexample::Linkage(msg.into()))
}

fn point(cert: &Certificate) -> Result<&Coloring, Verdict> {
    match &cert.instance.coloring {
        InstanceColoring::Point(c) => Ok(c),
        InstanceColoring::Pair(_) => Err(link(format!("{} needs a point coloring", cert.principle()))),
    }
}

fn pair(cert: &Certificate) -> Result<&PairColoring, Verdict> {
    match &cert.instance.coloring {
        InstanceColoring::Pair(f) => Ok(f),
        InstanceColoring::Point(_) => Err(link(format!("{} needs a pair coloring", cert.principle()))),
    }
}

fn size(what: &'static str, expected: usize, found: usize) -> Result<(), Verdict> {
    if expected == found {
        Ok(())
    } else {
        Err(violation(Counterexample::Size { what, expected, found }))
    }
}

fn within(values: &[u64], bound: u64) -> Result<(), Verdict> {
    match values.iter().find(|&&v| v >= bound) {
        Some(&value) => Err(violation(Counterexample::OutOfBound { value, bound })),
        None => Ok(()),
    }
}

fn ok_or(v: Verdict) -> Result<(), Verdict> {
    if v.is_ok() {
        Ok(())
    } else {
        Err(v)
    }
}

fn check_aht(c: &Coloring, inst: &Instance, h: &[u64], color: u32, apart: bool) -> Result<Result<(), Verdict>, CertificateError> {
    if inst.bound > c.bound() {
        return Ok(Err(Verdict::Undecidable(format!(
            "search bound {} exceeds the coloring domain {}",
            inst.bound,
            c.bound()
        ))));
    }
    let v = verify_aht(c, h, color, apart)?;
    if !v.is_ok() {
        return Ok(Err(v));
    }
    // the largest run sum is the sum of all elements
    let total: u128 = h.iter().map(|&x| x as u128).sum();
    if total > inst.bound as u128 {
        return Ok(Err(violation(Counterexample::OutOfBound {
            value: u64::try_from(total).unwrap_or(u64::MAX),
            bound: inst.bound,
        })));
    }
    Ok(Ok(()))
}

/// Rechecks a certificate: its own payload, then every stage recursively,
/// then the links between the stages and the payload.
pub fn verify_certificate(cert: &Certificate) -> Result<Verdict, CertificateError> {
    if let Err(v) = verify_payload(cert)? {
        return Ok(v);
    }
    for (index, stage) in cert.stages.iter().enumerate() {
        match verify_certificate(stage)? {
            Verdict::Ok => {}
            Verdict::Violation(inner) => {
                return Ok(violation(Counterexample::Stage {
                    index: index + 1,
                    principle: stage.principle().to_string(),
                    inner: Box::new(inner),
                }))
            }
            Verdict::Undecidable(msg) => return Ok(Verdict::Undecidable(format!("stage {}: {msg}", index + 1))),
        }
    }
    Ok(match verify_links(cert)? {
        Ok(()) => Verdict::Ok,
        Err(v) => v,
    })
}

macro_rules! tri {
    ($e:expr) => {
        if let Err(v) = $e {
            return Ok(Err(v));
        }
    };
}

macro_rules! get {
    ($e:expr) => {
        match $e {
            Ok(x) => x,
            Err(v) => return Ok(Err(v)),
        }
    };
}

fn verify_payload(cert: &Certificate) -> Result<Result<(), Verdict>, CertificateError> {
    let inst = &cert.instance;
    let color = cert.color;
    let m = inst.size;
    match &cert.witness {
        Witness::Aht { h } => {
            let c = get!(point(cert));
            tri!(check_aht(c, inst, h, color, inst.require_apart)?);
            tri!(size("H", m, h.len()));
        }
        Witness::Rt2 { j } => {
            let f = get!(pair(cert));
            tri!(ok_or(verify_rt2(f, j, color)?));
            tri!(within(j, inst.bound));
            tri!(size("J", m, j.len()));
        }
        Witness::Ipt2 { h1, h2 } => {
            let f = get!(pair(cert));
            tri!(ok_or(verify_ipt2(f, h1, h2, color)?));
            tri!(within(h1, inst.bound));
            tri!(within(h2, inst.bound));
            tri!(size("H1", m, h1.len()));
            tri!(size("H2", m, h2.len()));
        }
        Witness::Hil { sets } => {
            let c = get!(point(cert));
            tri!(ok_or(verify_hil(c, sets, color)?));
            let limit = if inst.bound >= 64 { u64::MAX } else { 1u64 << inst.bound };
            tri!(within(sets, limit));
            tri!(size("X", m, sets.len()));
        }
        Witness::Rt2ToAht { j, h } => {
            let c = get!(point(cert));
            tri!(size("J", m + 1, j.len()));
            tri!(size("H", m, h.len()));
            tri!(within(j, inst.bound));
            tri!(ok_or(verify_aht(c, h, color, true)?));
            tri!(check_blocks(j, h, inst.bit_budget));
        }
        Witness::AhtToIpt2 { h, h1, h2, .. } => {
            let f = get!(pair(cert));
            tri!(size("H", m, h.len()));
            let g = projected_point_coloring(f, inst.bit_budget)?;
            tri!(check_aht(&g, inst, h, color, true)?);
            tri!(check_projection(h, h1, h2));
            tri!(ok_or(verify_ipt2(f, h1, h2, color)?));
        }
        Witness::Chain { j, h, h1, h2 } => {
            let f = get!(pair(cert));
            tri!(size("J", m + 1, j.len()));
            tri!(size("H", m, h.len()));
            tri!(within(j, inst.bound));
            let g = projected_point_coloring(f, inst.bit_budget)?;
            tri!(ok_or(verify_aht(&g, h, color, true)?));
            tri!(check_blocks(j, h, inst.bit_budget));
            tri!(check_projection(h, h1, h2));
            tri!(ok_or(verify_ipt2(f, h1, h2, color)?));
        }
        Witness::Word { h, letter } => {
            let c = get!(point(cert));
            let PointBacking::WordBlock(w) = c.backing() else {
                return Ok(Err(link("WORD needs a word-block coloring")));
            };
            tri!(size("H", m, h.len()));
            tri!(check_aht(c, inst, h, color, true)?);
            if let Some(letter) = *letter {
                let (Some(p), Some(pmax)) = (w.period(), w.period_max()) else {
                    return Ok(Err(link("a highest letter is claimed for a non-periodic word")));
                };
                if letter != color {
                    return Ok(Err(link(format!("letter {letter} differs from the witness color {color}"))));
                }
                if letter != pmax {
                    return Ok(Err(link(format!(
                        "letter {letter} differs from the period's largest letter {pmax}"
                    ))));
                }
                let (first, last) = (h[0], h[h.len() - 1]);
                let (lo, hi) = (first.trailing_zeros(), last.ilog2());
                if (lo as usize) < w.prefix_len() || ((hi - lo + 1) as usize) < p {
                    return Ok(Err(link("the witness window does not cover a full period past the prefix")));
                }
            }
        }
    }
    Ok(Ok(()))
}

fn check_blocks(j: &[u64], h: &[u64], budget: BitBudget) -> Result<(), Verdict> {
    match blocks_from_rt2(j, budget) {
        Ok(blocks) if blocks.elements() == h => Ok(()),
        Ok(_) => Err(link("H is not the block set of J")),
        Err(e) => Err(link(format!("J has no block set: {e}"))),
    }
}

fn check_projection(h: &[u64], h1: &[u64], h2: &[u64]) -> Result<(), Verdict> {
    let projected = ApartSet::new(h.to_vec()).map(|a| project_aht_witness(&a));
    match projected {
        Ok((l, u)) if l == h1 && u == h2 => Ok(()),
        _ => Err(link("H1, H2 are not the lam and mu images of H")),
    }
}

/// Checks that `stage` is a certificate of `principle` over `coloring` with
/// the given color.
fn expect_stage<'a>(
    cert: &'a Certificate,
    index: usize,
    principle: Principle,
    coloring: &InstanceColoring,
) -> Result<&'a Certificate, Verdict> {
    let Some(stage) = cert.stages.get(index) else {
        return Err(link(format!("missing stage {} ({principle})", index + 1)));
    };
    if stage.principle() != principle {
        return Err(link(format!(
            "stage {} is {}, expected {principle}",
            index + 1,
            stage.principle()
        )));
    }
    if &stage.instance.coloring != coloring {
        return Err(link(format!("stage {} colors a different instance", index + 1)));
    }
    if stage.color != cert.color {
        return Err(link(format!(
            "stage {} has color {}, certificate claims {}",
            index + 1,
            stage.color,
            cert.color
        )));
    }
    Ok(stage)
}

fn stage_count(cert: &Certificate, n: usize) -> Result<(), Verdict> {
    if cert.stages.len() == n {
        Ok(())
    } else {
        Err(link(format!(
            "{} certificate has {} stages, expected {n}",
            cert.principle(),
            cert.stages.len()
        )))
    }
}

fn same(what: &str, stage: &[u64], own: &[u64]) -> Result<(), Verdict> {
    if stage == own {
        Ok(())
    } else {
        Err(link(format!("stage {what} differs from the certificate's {what}")))
    }
}

fn verify_links(cert: &Certificate) -> Result<Result<(), Verdict>, CertificateError> {
    let inst = &cert.instance;
    match &cert.witness {
        Witness::Aht { .. } | Witness::Rt2 { .. } | Witness::Ipt2 { .. } | Witness::Hil { .. } => {
            tri!(stage_count(cert, 0));
        }
        Witness::Rt2ToAht { j, h } => {
            let c = get!(point(cert));
            tri!(stage_count(cert, 2));
            let f = InstanceColoring::Pair(induced_pair_coloring(c)?);
            let rt2 = get!(expect_stage(cert, 0, Principle::Rt2, &f));
            tri!(same_rt2(rt2, j, inst));
            let aht = get!(expect_stage(cert, 1, Principle::Aht, &inst.coloring));
            tri!(same_aht(aht, h));
        }
        Witness::AhtToIpt2 { stage, h, h1, h2 } => {
            let f = get!(pair(cert));
            tri!(stage_count(cert, 2));
            let g = InstanceColoring::Point(projected_point_coloring(f, inst.bit_budget)?);
            match stage {
                AhtStage::Search | AhtStage::Supplied => {
                    let s = get!(expect_stage(cert, 0, Principle::Aht, &g));
                    tri!(same_aht(s, h));
                }
                AhtStage::Chain => {
                    let s = get!(expect_stage(cert, 0, Principle::Rt2ToAht, &g));
                    let Witness::Rt2ToAht { h: sh, .. } = &s.witness else { unreachable!() };
                    tri!(same("H", sh, h.as_slice()));
                }
            }
            let ipt = get!(expect_stage(cert, 1, Principle::Ipt2, &inst.coloring));
            tri!(same_ipt2(ipt, h1, h2));
        }
        Witness::Chain { j, h, h1, h2 } => {
            let f = get!(pair(cert));
            tri!(stage_count(cert, 3));
            let g = projected_point_coloring(f, inst.bit_budget)?;
            let induced = InstanceColoring::Pair(induced_pair_coloring(&g)?);
            let rt2 = get!(expect_stage(cert, 0, Principle::Rt2, &induced));
            tri!(same_rt2(rt2, j, inst));
            let aht = get!(expect_stage(cert, 1, Principle::Aht, &InstanceColoring::Point(g)));
            tri!(same_aht(aht, h));
            let ipt = get!(expect_stage(cert, 2, Principle::Ipt2, &inst.coloring));
            tri!(same_ipt2(ipt, h1, h2));
        }
        Witness::Word { h, .. } => {
            tri!(stage_count(cert, 1));
            let aht = get!(expect_stage(cert, 0, Principle::Aht, &inst.coloring));
            tri!(same_aht(aht, h));
        }
    }
    Ok(Ok(()))
}

fn same_rt2(stage: &Certificate, j: &[u64], inst: &Instance) -> Result<(), Verdict> {
    let Witness::Rt2 { j: sj } = &stage.witness else { unreachable!() };
    same("J", sj, j)?;
    if stage.instance.bound != inst.bound {
        return Err(link("RT2 stage bound differs from the certificate's bound"));
    }
    Ok(())
}

fn same_aht(stage: &Certificate, h: &[u64]) -> Result<(), Verdict> {
    let Witness::Aht { h: sh } = &stage.witness else { unreachable!() };
    same("H", sh, h)?;
    if !stage.instance.require_apart {
        return Err(link("AHT stage does not require apartness"));
    }
    Ok(())
}

fn same_ipt2(stage: &Certificate, h1: &[u64], h2: &[u64]) -> Result<(), Verdict> {
    let Witness::Ipt2 { h1: s1, h2: s2 } = &stage.witness else { unreachable!() };
    same("H1", s1, h1)?;
    same("H2", s2, h2)
}
