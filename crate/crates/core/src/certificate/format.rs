//! Line-oriented `key = value` certificate text.
//!
//! Keys appear in a fixed order and nested stages are indented by two spaces
//! per level, so every certificate has exactly one textual form.

use std::fmt::{Display, Write as _};

use sha2::{Digest, Sha256};

use super::{AhtStage, Certificate, CertificateError, Instance, InstanceColoring, Principle, Status, Witness};
use crate::bits::BitBudget;
use crate::coloring::{
    induced_pair_coloring, projected_point_coloring, word_block_coloring, Coloring, PairBacking, PairColoring,
    PointBacking, Word,
};
use crate::expr::{parse_expr, VarSet};

pub fn write_certificate(cert: &Certificate) -> String {
    let mut w = Writer {
        out: String::new(),
        indent: String::new(),
    };
    w.certificate(cert);
    w.out
}

struct Writer {
    out: String,
    indent: String,
}

fn list(values: &[u64]) -> String {
    if values.is_empty() {
        return "-".into();
    }
    let items: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    items.join(",")
}

fn mask_list(mask: u64) -> Vec<u64> {
    (0..64).filter(|b| mask >> b & 1 == 1).collect()
}

fn table_digest(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

impl Writer {
    fn kv(&mut self, key: &str, value: impl Display) {
        let _ = writeln!(self.out, "{}{key} = {value}", self.indent);
    }

    fn certificate(&mut self, cert: &Certificate) {
        let principle = cert.principle();
        self.kv("principle", principle);
        let inst = &cert.instance;
        self.kv("instance.size", inst.size);
        self.kv("instance.bound", inst.bound);
        self.kv("instance.bit_budget", inst.bit_budget);
        self.kv("instance.require_apart", inst.require_apart);
        if let Some(c) = principle.convention() {
            self.kv("instance.convention", c);
        }
        match &inst.coloring {
            InstanceColoring::Point(c) => self.point("instance.coloring", c),
            InstanceColoring::Pair(f) => self.pair("instance.coloring", f),
        }
        match &cert.witness {
            Witness::Aht { h } => self.kv("witness.h", list(h)),
            Witness::Rt2 { j } => self.kv("witness.j", list(j)),
            Witness::Ipt2 { h1, h2 } => {
                self.kv("witness.h1", list(h1));
                self.kv("witness.h2", list(h2));
            }
            Witness::Hil { sets } => {
                for (i, &s) in sets.iter().enumerate() {
                    self.kv(&format!("witness.set.{}", i + 1), list(&mask_list(s)));
                }
            }
            Witness::Rt2ToAht { j, h } => {
                self.kv("witness.j", list(j));
                self.kv("witness.h", list(h));
            }
            Witness::AhtToIpt2 { stage, h, h1, h2 } => {
                self.kv("witness.aht_stage", stage.name());
                self.kv("witness.h", list(h));
                self.kv("witness.h1", list(h1));
                self.kv("witness.h2", list(h2));
            }
            Witness::Chain { j, h, h1, h2 } => {
                self.kv("witness.j", list(j));
                self.kv("witness.h", list(h));
                self.kv("witness.h1", list(h1));
                self.kv("witness.h2", list(h2));
            }
            Witness::Word { h, letter } => {
                self.kv("witness.h", list(h));
                match letter {
                    Some(l) => self.kv("witness.letter", l),
                    None => self.kv("witness.letter", "none"),
                }
            }
        }
        self.kv("color", cert.color);
        self.kv("exhaustive", cert.exhaustive);
        self.kv("status", cert.status.name());
        self.kv("stages", cert.stages.len());
        self.indent.push_str("  ");
        for s in &cert.stages {
            self.certificate(s);
        }
        self.indent.truncate(self.indent.len() - 2);
    }

    fn point(&mut self, prefix: &str, c: &Coloring) {
        let kind = match c.backing() {
            PointBacking::Expr(_) => "point-expr",
            PointBacking::Table(_) => "point-table",
            PointBacking::Projected(_) => "projected",
            PointBacking::WordBlock(_) => "word-block",
        };
        self.kv(&format!("{prefix}.kind"), kind);
        self.kv(&format!("{prefix}.colors"), c.colors());
        self.kv(&format!("{prefix}.bound"), c.bound());
        match c.backing() {
            PointBacking::Expr(e) => self.kv(&format!("{prefix}.source"), e),
            PointBacking::Table(t) => {
                self.kv(&format!("{prefix}.table"), seq(t));
                let text = c.table_file_string().expect("table backing");
                self.kv(&format!("{prefix}.digest"), table_digest(&text));
            }
            PointBacking::Projected(f) => self.pair(&format!("{prefix}.inner"), f),
            PointBacking::WordBlock(w) => {
                self.kv(&format!("{prefix}.word.alphabet"), w.alphabet());
                match w.period() {
                    Some(p) => self.kv(&format!("{prefix}.word.period"), p),
                    None => self.kv(&format!("{prefix}.word.period"), "none"),
                }
                self.kv(&format!("{prefix}.word.letters"), seq(w.letters()));
            }
        }
    }

    fn pair(&mut self, prefix: &str, f: &PairColoring) {
        let kind = match f.backing() {
            PairBacking::Expr(_) => "pair-expr",
            PairBacking::Table(_) => "pair-table",
            PairBacking::Induced(_) => "induced",
        };
        self.kv(&format!("{prefix}.kind"), kind);
        self.kv(&format!("{prefix}.colors"), f.colors());
        self.kv(&format!("{prefix}.bound"), f.bound());
        match f.backing() {
            PairBacking::Expr(e) => self.kv(&format!("{prefix}.source"), e),
            PairBacking::Table(t) => {
                self.kv(&format!("{prefix}.table"), seq(t));
                let text = f.table_file_string().expect("table backing");
                self.kv(&format!("{prefix}.digest"), table_digest(&text));
            }
            PairBacking::Induced(c) => self.point(&format!("{prefix}.inner"), c),
        }
    }
}

/// A color sequence, in stored order.
fn seq(values: &[u32]) -> String {
    if values.is_empty() {
        return "-".into();
    }
    let items: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    items.join(",")
}

struct Line<'a> {
    number: usize,
    depth: usize,
    key: &'a str,
    value: &'a str,
}

struct Reader<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    end_line: usize,
}

fn perr(line: usize, message: impl Into<String>) -> CertificateError {
    CertificateError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses certificate text; errors carry 1-based line numbers.
pub fn read_certificate(text: &str) -> Result<Certificate, CertificateError> {
    let mut lines = Vec::new();
    let mut end_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        end_line = number + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let body = raw.trim_start_matches(' ');
        let spaces = raw.len() - body.len();
        if spaces % 2 != 0 {
            return Err(perr(number, "indentation must be a multiple of two spaces"));
        }
        let (key, value) = body
            .split_once(" = ")
            .ok_or_else(|| perr(number, "expected `key = value`"))?;
        lines.push(Line {
            number,
            depth: spaces / 2,
            key,
            value,
        });
    }
    let mut r = Reader { lines, pos: 0, end_line };
    let cert = r.certificate(0)?;
    if let Some(extra) = r.lines.get(r.pos) {
        return Err(perr(extra.number, format!("unexpected `{}` after the certificate", extra.key)));
    }
    Ok(cert)
}

fn num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, CertificateError> {
    // canonical base-10: no sign, no leading zeros
    let canonical = !v.is_empty() && v.bytes().all(|b| b.is_ascii_digit()) && (v == "0" || !v.starts_with('0'));
    if !canonical {
        return Err(perr(line, format!("`{key}` needs a base-10 integer, found `{v}`")));
    }
    v.parse()
        .map_err(|_| perr(line, format!("`{key}` value `{v}` is out of range")))
}

fn num_list<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>, CertificateError> {
    if v == "-" {
        return Ok(Vec::new());
    }
    v.split(',').map(|item| num(line, key, item)).collect()
}

fn boolean(line: usize, key: &str, v: &str) -> Result<bool, CertificateError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(perr(line, format!("`{key}` needs true or false, found `{v}`"))),
    }
}

impl<'a> Reader<'a> {
    fn take(&mut self, depth: usize, key: &str) -> Result<(usize, &'a str), CertificateError> {
        let Some(line) = self.lines.get(self.pos) else {
            return Err(perr(self.end_line, format!("unexpected end of input, expected `{key}`")));
        };
        if line.depth != depth || line.key != key {
            return Err(perr(
                line.number,
                format!("expected `{key}` at indentation {depth}, found `{}`", line.key),
            ));
        }
        self.pos += 1;
        Ok((line.number, line.value))
    }

    fn peek(&self, depth: usize, key: &str) -> bool {
        self.lines
            .get(self.pos)
            .is_some_and(|l| l.depth == depth && l.key == key)
    }

    fn num<T: std::str::FromStr>(&mut self, depth: usize, key: &str) -> Result<T, CertificateError> {
        let (line, v) = self.take(depth, key)?;
        num(line, key, v)
    }

    fn list(&mut self, depth: usize, key: &str) -> Result<Vec<u64>, CertificateError> {
        let (line, v) = self.take(depth, key)?;
        num_list(line, key, v)
    }

    fn certificate(&mut self, d: usize) -> Result<Certificate, CertificateError> {
        let (line, v) = self.take(d, "principle")?;
        let principle: Principle = v.parse().map_err(|e: String| perr(line, e))?;
        let size = self.num(d, "instance.size")?;
        let bound = self.num(d, "instance.bound")?;
        let (line, v) = self.take(d, "instance.bit_budget")?;
        let bit_budget = BitBudget::new(num(line, "instance.bit_budget", v)?).map_err(|e| perr(line, e.to_string()))?;
        let (line, v) = self.take(d, "instance.require_apart")?;
        let require_apart = boolean(line, "instance.require_apart", v)?;
        if let Some(expected) = principle.convention() {
            let (line, v) = self.take(d, "instance.convention")?;
            if v != expected {
                return Err(perr(line, format!("{principle} convention must read `{expected}`")));
            }
        }
        let coloring = if principle.pair_instance() {
            InstanceColoring::Pair(self.pair(d, "instance.coloring", bit_budget)?)
        } else {
            InstanceColoring::Point(self.point(d, "instance.coloring", bit_budget)?)
        };
        let witness = match principle {
            Principle::Aht => Witness::Aht {
                h: self.list(d, "witness.h")?,
            },
            Principle::Rt2 => Witness::Rt2 {
                j: self.list(d, "witness.j")?,
            },
            Principle::Ipt2 => Witness::Ipt2 {
                h1: self.list(d, "witness.h1")?,
                h2: self.list(d, "witness.h2")?,
            },
            Principle::Hil => {
                let mut sets = Vec::new();
                loop {
                    let key = format!("witness.set.{}", sets.len() + 1);
                    if !self.peek(d, &key) {
                        break;
                    }
                    let (line, v) = self.take(d, &key)?;
                    let mut mask = 0u64;
                    for b in num_list::<u32>(line, &key, v)? {
                        if b >= 64 {
                            return Err(perr(line, format!("set element {b} exceeds 63")));
                        }
                        mask |= 1 << b;
                    }
                    sets.push(mask);
                }
                Witness::Hil { sets }
            }
            Principle::Rt2ToAht => Witness::Rt2ToAht {
                j: self.list(d, "witness.j")?,
                h: self.list(d, "witness.h")?,
            },
            Principle::AhtToIpt2 => {
                let (line, v) = self.take(d, "witness.aht_stage")?;
                let stage: AhtStage = v.parse().map_err(|e: String| perr(line, e))?;
                Witness::AhtToIpt2 {
                    stage,
                    h: self.list(d, "witness.h")?,
                    h1: self.list(d, "witness.h1")?,
                    h2: self.list(d, "witness.h2")?,
                }
            }
            Principle::Chain => Witness::Chain {
                j: self.list(d, "witness.j")?,
                h: self.list(d, "witness.h")?,
                h1: self.list(d, "witness.h1")?,
                h2: self.list(d, "witness.h2")?,
            },
            Principle::Word => {
                let h = self.list(d, "witness.h")?;
                let (line, v) = self.take(d, "witness.letter")?;
                let letter = match v {
                    "none" => None,
                    _ => Some(num(line, "witness.letter", v)?),
                };
                Witness::Word { h, letter }
            }
        };
        let color = self.num(d, "color")?;
        let (line, v) = self.take(d, "exhaustive")?;
        let exhaustive = boolean(line, "exhaustive", v)?;
        let (line, v) = self.take(d, "status")?;
        let status = match v {
            "verified" => Status::Verified,
            "unverified" => Status::Unverified,
            _ => return Err(perr(line, format!("unknown status `{v}`"))),
        };
        let count: usize = self.num(d, "stages")?;
        let mut stages = Vec::with_capacity(count.min(16));
        for _ in 0..count {
            stages.push(self.certificate(d + 1)?);
        }
        Ok(Certificate {
            instance: Instance {
                coloring,
                size,
                bound,
                bit_budget,
                require_apart,
            },
            witness,
            color,
            exhaustive,
            status,
            stages,
        })
    }

    /// Reads `kind`, `colors` and `bound`, returning the kind and the line of
    /// the bound for later consistency errors.
    fn header(&mut self, d: usize, prefix: &str) -> Result<(usize, &'a str, u32, u64, usize), CertificateError> {
        let (kind_line, kind) = self.take(d, &format!("{prefix}.kind"))?;
        let colors = self.num(d, &format!("{prefix}.colors"))?;
        let key = format!("{prefix}.bound");
        let (bound_line, v) = self.take(d, &key)?;
        let bound = num(bound_line, &key, v)?;
        Ok((kind_line, kind, colors, bound, bound_line))
    }

    fn point(&mut self, d: usize, prefix: &str, budget: BitBudget) -> Result<Coloring, CertificateError> {
        let (kind_line, kind, colors, bound, bound_line) = self.header(d, prefix)?;
        let c = match kind {
            "point-expr" => {
                let key = format!("{prefix}.source");
                let (line, src) = self.take(d, &key)?;
                let e = parse_expr(src, VarSet::POINT).map_err(|e| perr(line, e.to_string()))?;
                Coloring::from_expr(e, colors, bound).map_err(|e| perr(line, e.to_string()))?
            }
            "point-table" => {
                let (line, table) = self.table(d, prefix)?;
                let c = Coloring::from_table(table, colors).map_err(|e| perr(line, e.to_string()))?;
                self.digest(d, prefix, &c.table_file_string().expect("table backing"))?;
                c
            }
            "projected" => {
                let inner = self.pair(d, &format!("{prefix}.inner"), budget)?;
                projected_point_coloring(&inner, budget).map_err(|e| perr(kind_line, e.to_string()))?
            }
            "word-block" => {
                let key = format!("{prefix}.word.alphabet");
                let (line, v) = self.take(d, &key)?;
                let alphabet: u32 = num(line, &key, v)?;
                let key = format!("{prefix}.word.period");
                let (line, v) = self.take(d, &key)?;
                let period = match v {
                    "none" => None,
                    _ => Some(num(line, &key, v)?),
                };
                let key = format!("{prefix}.word.letters");
                let (line, v) = self.take(d, &key)?;
                let letters = num_list(line, &key, v)?;
                let w = Word::new(letters, alphabet, period).map_err(|e| perr(line, e.to_string()))?;
                word_block_coloring(&w, budget).map_err(|e| perr(line, e.to_string()))?
            }
            other => return Err(perr(kind_line, format!("unknown point coloring kind `{other}`"))),
        };
        if c.colors() != colors || c.bound() != bound {
            return Err(perr(
                bound_line,
                format!(
                    "declared k={colors} N={bound} but the coloring has k={} N={}",
                    c.colors(),
                    c.bound()
                ),
            ));
        }
        Ok(c)
    }

    fn pair(&mut self, d: usize, prefix: &str, budget: BitBudget) -> Result<PairColoring, CertificateError> {
        let (kind_line, kind, colors, bound, bound_line) = self.header(d, prefix)?;
        let f = match kind {
            "pair-expr" => {
                let key = format!("{prefix}.source");
                let (line, src) = self.take(d, &key)?;
                let e = parse_expr(src, VarSet::PAIR).map_err(|e| perr(line, e.to_string()))?;
                PairColoring::from_expr(e, colors, bound).map_err(|e| perr(line, e.to_string()))?
            }
            "pair-table" => {
                let (line, table) = self.table(d, prefix)?;
                let f = PairColoring::from_table(table, colors, bound).map_err(|e| perr(line, e.to_string()))?;
                self.digest(d, prefix, &f.table_file_string().expect("table backing"))?;
                f
            }
            "induced" => {
                let inner = self.point(d, &format!("{prefix}.inner"), budget)?;
                induced_pair_coloring(&inner).map_err(|e| perr(kind_line, e.to_string()))?
            }
            other => return Err(perr(kind_line, format!("unknown pair coloring kind `{other}`"))),
        };
        if f.colors() != colors || f.bound() != bound {
            return Err(perr(
                bound_line,
                format!(
                    "declared k={colors} N={bound} but the coloring has k={} N={}",
                    f.colors(),
                    f.bound()
                ),
            ));
        }
        Ok(f)
    }

    fn table(&mut self, d: usize, prefix: &str) -> Result<(usize, Vec<u32>), CertificateError> {
        let key = format!("{prefix}.table");
        let (line, v) = self.take(d, &key)?;
        Ok((line, num_list(line, &key, v)?))
    }

    fn digest(&mut self, d: usize, prefix: &str, text: &str) -> Result<(), CertificateError> {
        let (line, v) = self.take(d, &format!("{prefix}.digest"))?;
        if v != table_digest(text) {
            return Err(perr(line, "table digest does not match the embedded table"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify_certificate;

    fn aht_cert() -> Certificate {
        Certificate {
            instance: Instance {
                coloring: InstanceColoring::Point(Coloring::parse_expr("lam(n) % 2", 2, 64).unwrap()),
                size: 3,
                bound: 64,
                bit_budget: BitBudget::default(),
                require_apart: true,
            },
            witness: Witness::Aht { h: vec![1, 4, 16] },
            color: 0,
            exhaustive: true,
            status: Status::Verified,
            stages: vec![],
        }
    }

    #[test]
    fn writes_fixed_key_order() {
        let text = write_certificate(&aht_cert());
        let keys: Vec<&str> = text.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        assert_eq!(
            keys,
            [
                "principle",
                "instance.size",
                "instance.bound",
                "instance.bit_budget",
                "instance.require_apart",
                "instance.coloring.kind",
                "instance.coloring.colors",
                "instance.coloring.bound",
                "instance.coloring.source",
                "witness.h",
                "color",
                "exhaustive",
                "status",
                "stages"
            ]
        );
        assert!(text.contains("witness.h = 1,4,16\n"));
    }

    #[test]
    fn round_trip_and_tamper() {
        let cert = aht_cert();
        let text = write_certificate(&cert);
        let back = read_certificate(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(write_certificate(&back), text);
        assert!(verify_certificate(&back).unwrap().is_ok());

        let tampered = read_certificate(&text.replace("color = 0", "color = 1")).unwrap();
        assert!(verify_certificate(&tampered).unwrap().counterexample().is_some());
    }

    #[test]
    fn table_round_trip_checks_digest() {
        let mut cert = aht_cert();
        cert.instance.coloring = InstanceColoring::Point(Coloring::from_table(vec![0, 1, 0, 0, 1], 2).unwrap());
        cert.instance.bound = 5;
        cert.witness = Witness::Aht { h: vec![1] };
        cert.instance.size = 1;
        let text = write_certificate(&cert);
        assert_eq!(read_certificate(&text).unwrap(), cert);
        let err = read_certificate(&text.replace("table = 0,1,0,0,1", "table = 1,1,0,0,1")).unwrap_err();
        assert!(matches!(err, CertificateError::Parse { line: 10, .. }), "{err}");
    }

    #[test]
    fn truncation_reports_line() {
        let text = write_certificate(&aht_cert());
        let cut: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert_eq!(
            read_certificate(&cut).unwrap_err(),
            CertificateError::Parse {
                line: 7,
                message: "unexpected end of input, expected `instance.coloring.colors`".into()
            }
        );
        let err = read_certificate("principle = AHT\ninstance.size 3\n").unwrap_err();
        assert!(matches!(err, CertificateError::Parse { line: 2, .. }));
    }

    #[test]
    fn rejects_noncanonical_integers() {
        let text = write_certificate(&aht_cert()).replace("instance.size = 3", "instance.size = 03");
        assert!(matches!(read_certificate(&text), Err(CertificateError::Parse { line: 2, .. })));
    }
}
