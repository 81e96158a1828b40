//! Reports as JSON or text.

use std::fmt::Write;

use orbispark_core::cochain::{Cochain, OrderedCochain};
use orbispark_core::homology::CohomologyGroup;
use orbispark_core::polyform::{format_rational, PolyForm, Polynomial, Rational};
use orbispark_core::report::{Check, Status, ValidationReport};
use serde::Serialize;

use crate::format::{form_spec, FormSpec};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub status: &'static str,
    pub probes: usize,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        CheckRecord {
            name: c.name.clone(),
            anchor: c.anchor.clone(),
            status: c.status.as_str(),
            probes: c.probes,
            detail: c.detail.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub checks: usize,
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
    pub declared_only: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GroupRecord {
    pub atlas: String,
    pub complex: String,
    pub degree: usize,
    pub group: String,
    pub free_rank: usize,
    pub torsion: Vec<String>,
}

impl GroupRecord {
    pub fn new(atlas: &str, complex: &str, degree: usize, g: &CohomologyGroup) -> Self {
        GroupRecord {
            atlas: atlas.to_string(),
            complex: complex.to_string(),
            degree,
            group: g.to_string(),
            free_rank: g.free_rank,
            torsion: g.torsion.iter().map(|t| t.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TermRecord {
    pub string: String,
    pub form: FormSpec,
    #[serde(skip)]
    text: String,
}

/// A named cochain in an answer, such as `e` and `r` of a decomposition.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CochainRecord {
    pub label: String,
    /// `alternating` when listed on canonical strings only, `ordered` otherwise.
    pub kind: &'static str,
    pub terms: Vec<TermRecord>,
}

impl CochainRecord {
    pub fn alternating(label: &str, c: &Cochain) -> Self {
        let v = c.atlas().vertices();
        CochainRecord {
            label: label.to_string(),
            kind: "alternating",
            terms: terms(c.terms().map(|(s, f)| (v.format_string(s), f))),
        }
    }

    /// Listed on canonical strings when `c` alternates.
    pub fn ordered(label: &str, c: &OrderedCochain) -> Self {
        if let Some(a) = c.to_alternating() {
            return CochainRecord::alternating(label, &a);
        }
        let v = c.atlas().vertices();
        CochainRecord {
            label: label.to_string(),
            kind: "ordered",
            terms: terms(c.terms().map(|(s, f)| (v.format_string(s), f))),
        }
    }
}

fn terms<'a>(it: impl Iterator<Item = (String, &'a PolyForm)>) -> Vec<TermRecord> {
    it.filter(|(_, f)| !f.is_zero())
        .map(|(string, f)| TermRecord { string, form: form_spec(f), text: format_form(f) })
        .collect()
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cohomology: Vec<GroupRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cochains: Vec<CochainRecord>,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), ..Report::default() }
    }

    pub fn add_checks(&mut self, r: &ValidationReport) {
        for c in &r.checks {
            self.add_check(c);
        }
    }

    pub fn add_check(&mut self, c: &Check) {
        let s = &mut self.summary;
        s.checks += 1;
        match c.status {
            Status::Pass => s.pass += 1,
            Status::Fail => s.fail += 1,
            Status::Unknown => s.unknown += 1,
            Status::DeclaredOnly => s.declared_only += 1,
        }
        self.checks.push(c.into());
    }

    /// 0 when clean, 1 on any FAIL, 3 on UNKNOWN under `strict_unknown`.
    pub fn exit_code(&self, strict_unknown: bool) -> i32 {
        if self.summary.fail > 0 {
            1
        } else if strict_unknown && self.summary.unknown > 0 {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.cohomology {
            let _ = writeln!(out, "H^{}({}, {}) = {}", g.degree, g.atlas, g.complex, g.group);
        }
        for c in &self.cochains {
            let _ = writeln!(out, "{} ({}):", c.label, c.kind);
            if c.terms.is_empty() {
                let _ = writeln!(out, "  0");
            }
            for t in &c.terms {
                let _ = writeln!(out, "  {}: {}", t.string, t.text);
            }
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(out, "{:<13} {:<width$}  {:>5} probes  {}", c.status, c.name, c.probes, c.anchor);
            if !c.detail.is_empty() {
                let _ = writeln!(out, "{:13}   {}", "", c.detail);
            }
        }
        let s = &self.summary;
        if s.checks == 0 {
            return out;
        }
        let _ = writeln!(
            out,
            "{} checks: {} pass, {} fail, {} unknown, {} declared-only",
            s.checks, s.pass, s.fail, s.unknown, s.declared_only
        );
        out
    }
}

pub fn format_poly(p: &Polynomial) -> String {
    let mut out = String::new();
    for (k, (e, c)) in p.terms().enumerate() {
        let mut c = c.clone();
        if k > 0 {
            if c < Rational::from_integer(0.into()) {
                out.push_str(" - ");
                c = -c;
            } else {
                out.push_str(" + ");
            }
        }
        let vars: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(i, &x)| if x == 1 { format!("x{i}") } else { format!("x{i}^{x}") })
            .collect();
        let coeff = format_rational(&c);
        if vars.is_empty() {
            out.push_str(&coeff);
        } else {
            match coeff.as_str() {
                "1" => {}
                "-1" => out.push('-'),
                _ => {
                    out.push_str(&coeff);
                    out.push('*');
                }
            }
            out.push_str(&vars.join("*"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn format_form(f: &PolyForm) -> String {
    let parts: Vec<String> = f
        .terms()
        .map(|(mask, p)| {
            let dx: Vec<String> = (0..32).filter(|i| mask & (1 << i) != 0).map(|i| format!("dx{i}")).collect();
            if dx.is_empty() {
                format_poly(p)
            } else if p.terms().count() > 1 {
                format!("({}) {}", format_poly(p), dx.join("^"))
            } else {
                format!("{} {}", format_poly(p), dx.join("^"))
            }
        })
        .collect();
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}
