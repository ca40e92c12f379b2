//! Compact family literals.
//!
//! ```text
//! conf   := full | rigidstab:R | openrigidstab:R | orbitfix:R | nbhdorbitfix:R
//!         | lamplike:R,R,SET | nonlamplike:INTS[@R]
//!         | and(conf;conf) | conj(conf;INT) | split(conf;R)
//! lamp   := full | balls | nonsplit | machado:INT | subgroup:SUB
//!         | lsplit(lamp) | shift(lamp;INT) | and(lamp;lamp)
//! SUB    := trivial | whole | mult:INT | coords:SET
//! SET    := fin{INTS} | cof{INTS}
//! ```
//!
//! `nonlamplike` without `@τ₁` uses τ₁ = 1/n².

use fnconf::confining::{ConfFamily, IndexSet};
use fnconf::exactnum::{format_rational, parse_rational, rat, Rational};
use fnconf::lamplighter::{LampFamily, LampSubgroup};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("family literal {input:?}, position {pos}: {msg}")]
pub struct GrammarError {
    pub input: String,
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, GrammarError> {
        Err(GrammarError {
            input: self.src.into(),
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), GrammarError> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.err(format!("expected {lit:?}"))
        }
    }

    fn word(&mut self) -> &'a str {
        let rest = self.rest();
        let end = rest
            .find(|c: char| !c.is_ascii_alphanumeric())
            .unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn token(&mut self) -> &'a str {
        let rest = self.rest();
        let end = rest
            .find(|c: char| matches!(c, ',' | ';' | ')' | '}' | '@'))
            .unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    fn rational(&mut self) -> Result<Rational, GrammarError> {
        let start = self.pos;
        let tok = self.token();
        parse_rational(tok).or_else(|e| {
            self.pos = start;
            self.err(format!("bad rational {tok:?}: {e}"))
        })
    }

    fn int<T: std::str::FromStr>(&mut self) -> Result<T, GrammarError> {
        let start = self.pos;
        let tok = self.token();
        tok.parse().or_else(|_| {
            self.pos = start;
            self.err(format!("bad integer {tok:?}"))
        })
    }

    fn ints(&mut self, close: Option<&str>) -> Result<Vec<u64>, GrammarError> {
        let mut out = vec![];
        if let Some(c) = close {
            if self.rest().starts_with(c) {
                return Ok(out);
            }
        }
        loop {
            out.push(self.int()?);
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }

    fn set(&mut self) -> Result<IndexSet, GrammarError> {
        let kind = self.word();
        self.expect("{")?;
        let xs = self.ints(Some("}"))?;
        self.expect("}")?;
        match kind {
            "fin" => Ok(IndexSet::finite(xs)),
            "cof" => Ok(IndexSet::cofinite(xs)),
            other => self.err(format!("unknown set kind {other:?}")),
        }
    }

    fn done(&self) -> Result<(), GrammarError> {
        if self.pos == self.src.len() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }

    fn conf(&mut self, n: u32) -> Result<ConfFamily, GrammarError> {
        let start = self.pos;
        let head = self.word();
        let point = |p: &mut Self| -> Result<Rational, GrammarError> {
            p.expect(":")?;
            p.rational()
        };
        Ok(match head {
            "full" => ConfFamily::Full,
            "rigidstab" => ConfFamily::RigidStab { t: point(self)? },
            "openrigidstab" => ConfFamily::OpenRigidStab { t: point(self)? },
            "orbitfix" => ConfFamily::OrbitFixator { t: point(self)? },
            "nbhdorbitfix" => ConfFamily::NbhdOrbitFixator { t: point(self)? },
            "lamplike" => {
                let t = point(self)?;
                self.expect(",")?;
                let x = self.rational()?;
                self.expect(",")?;
                let set = self.set()?;
                ConfFamily::LamplikeProduct { t, x, set }
            }
            "nonlamplike" => {
                self.expect(":")?;
                let s = self.ints(None)?;
                let tau1 = if self.eat("@") {
                    self.rational()?
                } else {
                    rat(1, (n as i64) * (n as i64))
                };
                ConfFamily::NonLamplike { s, tau1 }
            }
            "and" | "conj" | "split" => {
                self.expect("(")?;
                let inner = self.conf(n)?;
                self.expect(";")?;
                let f = match head {
                    "and" => ConfFamily::Intersection {
                        left: Box::new(inner),
                        right: Box::new(self.conf(n)?),
                    },
                    "conj" => ConfFamily::Conjugate {
                        inner: Box::new(inner),
                        k: self.int()?,
                    },
                    _ => ConfFamily::SplitClosure {
                        inner: Box::new(inner),
                        t: self.rational()?,
                    },
                };
                self.expect(")")?;
                f
            }
            other => {
                self.pos = start;
                return self.err(format!("unknown constructor {other:?}"));
            }
        })
    }

    fn subgroup(&mut self) -> Result<LampSubgroup, GrammarError> {
        let start = self.pos;
        Ok(match self.word() {
            "trivial" => LampSubgroup::Trivial,
            "whole" => LampSubgroup::Whole,
            "mult" => {
                self.expect(":")?;
                LampSubgroup::Multiples { m: self.int()? }
            }
            "coords" => {
                self.expect(":")?;
                LampSubgroup::Coordinates { set: self.set()? }
            }
            other => {
                self.pos = start;
                return self.err(format!("unknown subgroup {other:?}"));
            }
        })
    }

    fn lamp(&mut self) -> Result<LampFamily, GrammarError> {
        let start = self.pos;
        let head = self.word();
        Ok(match head {
            "full" => LampFamily::FullL,
            "balls" => LampFamily::Balls,
            "nonsplit" => LampFamily::NonSplit,
            "machado" => {
                self.expect(":")?;
                LampFamily::Machado { c: self.int()? }
            }
            "subgroup" => {
                self.expect(":")?;
                LampFamily::Subgroup {
                    h: self.subgroup()?,
                }
            }
            "lsplit" => {
                self.expect("(")?;
                let inner = Box::new(self.lamp()?);
                self.expect(")")?;
                LampFamily::SplitClosureL { inner }
            }
            "shift" | "and" => {
                self.expect("(")?;
                let inner = Box::new(self.lamp()?);
                self.expect(";")?;
                let f = if head == "shift" {
                    LampFamily::ShiftConjugate {
                        inner,
                        k: self.int()?,
                    }
                } else {
                    LampFamily::IntersectionL {
                        left: inner,
                        right: Box::new(self.lamp()?),
                    }
                };
                self.expect(")")?;
                f
            }
            other => {
                self.pos = start;
                return self.err(format!("unknown constructor {other:?}"));
            }
        })
    }
}

pub fn parse_family(src: &str, n: u32) -> Result<ConfFamily, GrammarError> {
    let mut p = Parser::new(src.trim());
    let f = p.conf(n)?;
    p.done()?;
    Ok(f)
}

pub fn parse_lamp_family(src: &str) -> Result<LampFamily, GrammarError> {
    let mut p = Parser::new(src.trim());
    let f = p.lamp()?;
    p.done()?;
    Ok(f)
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn format_set(s: &IndexSet) -> String {
    match s {
        IndexSet::Finite { elements } => {
            format!("fin{{{}}}", join(&elements.iter().copied().collect::<Vec<_>>()))
        }
        IndexSet::Cofinite { missing } => {
            format!("cof{{{}}}", join(&missing.iter().copied().collect::<Vec<_>>()))
        }
    }
}

pub fn format_family(f: &ConfFamily) -> String {
    let q = format_rational;
    match f {
        ConfFamily::Full => "full".into(),
        ConfFamily::RigidStab { t } => format!("rigidstab:{}", q(t)),
        ConfFamily::OpenRigidStab { t } => format!("openrigidstab:{}", q(t)),
        ConfFamily::OrbitFixator { t } => format!("orbitfix:{}", q(t)),
        ConfFamily::NbhdOrbitFixator { t } => format!("nbhdorbitfix:{}", q(t)),
        ConfFamily::LamplikeProduct { t, x, set } => {
            format!("lamplike:{},{},{}", q(t), q(x), format_set(set))
        }
        ConfFamily::NonLamplike { s, tau1 } => format!("nonlamplike:{}@{}", join(s), q(tau1)),
        ConfFamily::Conjugate { inner, k } => format!("conj({};{k})", format_family(inner)),
        ConfFamily::Intersection { left, right } => {
            format!("and({};{})", format_family(left), format_family(right))
        }
        ConfFamily::SplitClosure { inner, t } => {
            format!("split({};{})", format_family(inner), q(t))
        }
    }
}

pub fn format_lamp_family(f: &LampFamily) -> String {
    match f {
        LampFamily::FullL => "full".into(),
        LampFamily::Balls => "balls".into(),
        LampFamily::NonSplit => "nonsplit".into(),
        LampFamily::Machado { c } => format!("machado:{c}"),
        LampFamily::Subgroup { h } => format!(
            "subgroup:{}",
            match h {
                LampSubgroup::Trivial => "trivial".into(),
                LampSubgroup::Whole => "whole".into(),
                LampSubgroup::Multiples { m } => format!("mult:{m}"),
                LampSubgroup::Coordinates { set } => format!("coords:{}", format_set(set)),
            }
        ),
        LampFamily::SplitClosureL { inner } => format!("lsplit({})", format_lamp_family(inner)),
        LampFamily::ShiftConjugate { inner, k } => {
            format!("shift({};{k})", format_lamp_family(inner))
        }
        LampFamily::IntersectionL { left, right } => format!(
            "and({};{})",
            format_lamp_family(left),
            format_lamp_family(right)
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(
            parse_family("rigidstab:1/4", 2).unwrap(),
            ConfFamily::RigidStab { t: rat(1, 4) }
        );
        let f = parse_family("and(orbitfix:1/4;nonlamplike:3)", 2).unwrap();
        assert_eq!(format_family(&f), "and(orbitfix:1/4;nonlamplike:3@1/4)");
        let f = parse_family("lamplike:1/4,1/8,cof{}", 2).unwrap();
        assert_eq!(format_family(&f), "lamplike:1/4,1/8,cof{}");
        let f = parse_family("split(conj(full;-2);1/3)", 3).unwrap();
        assert_eq!(parse_family(&format_family(&f), 3).unwrap(), f);
        let l = parse_lamp_family("and(lsplit(machado:1);shift(subgroup:coords:fin{1,3};2))").unwrap();
        assert_eq!(parse_lamp_family(&format_lamp_family(&l)).unwrap(), l);
    }

    #[test]
    fn errors_are_positioned() {
        let e = parse_family("rigidstab:1/x", 2).unwrap_err();
        assert_eq!(e.pos, 10);
        let e = parse_family("and(full;bogus:1)", 2).unwrap_err();
        assert_eq!(e.pos, 9);
        assert!(parse_family("full)", 2).is_err());
        assert!(parse_lamp_family("subgroup:mult:-1").is_err());
    }
}
