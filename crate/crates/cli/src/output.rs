//! Output records and their text, JSON and CSV renderings.

use embnum_core::propagate::{Derivation, LimitBounds, Table};
use embnum_core::{Assumption, Bound, FormSummary};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// One bounded manifold. `exact` implies `upper == Some(lower)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub manifold: String,
    pub lower: u64,
    pub upper: Option<u64>,
    pub exact: bool,
    pub assumption: Assumption,
    pub lower_assumption: Assumption,
    pub upper_assumption: Option<Assumption>,
    pub citations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

impl OutputRecord {
    pub fn from_bound(manifold: impl Into<String>, b: &Bound) -> Self {
        let mut citations = vec![format!("lower: {}", b.lower.citation)];
        if let Some(u) = &b.upper {
            citations.push(format!("upper: {}", u.citation));
        }
        OutputRecord {
            manifold: manifold.into(),
            lower: b.lower.value,
            upper: b.upper_value(),
            exact: b.is_exact(),
            assumption: b.assumption(),
            lower_assumption: b.lower.assumption,
            upper_assumption: b.upper.as_ref().map(|u| u.assumption),
            citations,
            notes: b.notes.clone(),
            trace: None,
        }
    }

    fn interval(&self) -> String {
        match (self.upper, self.exact) {
            (Some(u), true) => format!("exact {u}"),
            (Some(u), false) => format!("{} <= eps <= {u}", self.lower),
            (None, _) => format!("eps >= {}", self.lower),
        }
    }

    fn tags(&self) -> String {
        match self.upper_assumption {
            Some(u) if u != self.lower_assumption => {
                format!("lower {}, upper {}", self.lower_assumption, u)
            }
            Some(_) => self.lower_assumption.to_string(),
            None => format!("lower {}", self.lower_assumption),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormRecord {
    pub rank: usize,
    pub signature: i64,
    /// Decimal, since determinants are unbounded.
    pub determinant: String,
    pub even: bool,
    pub unimodular: bool,
    pub definiteness: String,
    /// `aE8 ⊕ bH` when the form is even and unimodular.
    pub classification: Option<String>,
}

impl FormRecord {
    pub fn new(q: &FormSummary, classification: Option<String>) -> Self {
        FormRecord {
            rank: q.rank,
            signature: q.signature,
            determinant: q.determinant.to_string(),
            even: q.even,
            unimodular: q.unimodular,
            definiteness: serde_json::to_value(q.definiteness)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            classification,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRecord {
    pub table: String,
    pub n: Vec<u64>,
    pub eps: Vec<u64>,
    pub rows: Vec<TableRowRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRowRecord {
    pub n: u64,
    pub eps: u64,
    pub assumption: Assumption,
    pub lower: Derivation,
    pub upper: Derivation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<Derivation>>,
}

impl TableRecord {
    pub fn new(name: &str, table: &Table, chains: Option<Vec<Vec<Derivation>>>) -> Self {
        let mut chains = chains.map(|c| c.into_iter());
        let rows = table
            .rows
            .iter()
            .map(|r| TableRowRecord {
                n: r.n,
                eps: r.value,
                assumption: r.assumption,
                lower: r.lower.clone(),
                upper: r.upper.clone(),
                trace: chains.as_mut().and_then(|c| c.next()),
            })
            .collect();
        TableRecord {
            table: name.into(),
            n: table.rows.iter().map(|r| r.n).collect(),
            eps: table.rows.iter().map(|r| r.value).collect(),
            rows,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitRecord {
    pub lower: String,
    pub lower_assumption: Assumption,
    pub upper: Option<String>,
    pub upper_index: Option<u64>,
    pub upper_assumption: Option<Assumption>,
}

impl From<&LimitBounds> for LimitRecord {
    fn from(b: &LimitBounds) -> Self {
        LimitRecord {
            lower: b.lower.to_string(),
            lower_assumption: b.lower_assumption,
            upper: b.upper.map(|u| u.to_string()),
            upper_index: b.upper_index,
            upper_assumption: b.upper_assumption,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Output {
    Records(Vec<OutputRecord>),
    Form(FormRecord),
    Table(TableRecord),
    Limit(LimitRecord),
}

fn csv_string(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("output serializes");
                s.push('\n');
                s
            }
            Format::Text => self.text(),
            Format::Csv => self.csv(),
        }
    }

    fn text(&self) -> String {
        let mut s = String::new();
        match self {
            Output::Records(records) => {
                for r in records {
                    let _ = writeln!(s, "{}: {} [{}]", r.manifold, r.interval(), r.tags());
                    for c in &r.citations {
                        let _ = writeln!(s, "  {c}");
                    }
                    for n in &r.notes {
                        let _ = writeln!(s, "  note: {n}");
                    }
                    for t in r.trace.iter().flatten() {
                        let _ = writeln!(s, "  {t}");
                    }
                }
            }
            Output::Form(q) => {
                let _ = writeln!(s, "rank {}", q.rank);
                let _ = writeln!(s, "signature {}", q.signature);
                let _ = writeln!(s, "determinant {}", q.determinant);
                let _ = writeln!(s, "even {}", q.even);
                let _ = writeln!(s, "unimodular {}", q.unimodular);
                let _ = writeln!(s, "definiteness {}", q.definiteness);
                if let Some(c) = &q.classification {
                    let _ = writeln!(s, "classification {c}");
                }
            }
            Output::Table(t) => {
                let _ = writeln!(s, "{}", t.table);
                for r in &t.rows {
                    let _ = writeln!(s, "n = {:>2}: eps = {:>2} [{}]", r.n, r.eps, r.assumption);
                    let _ = writeln!(s, "    lower {}", r.lower);
                    let _ = writeln!(s, "    upper {}", r.upper);
                    for d in r.trace.iter().flatten() {
                        let _ = writeln!(s, "      {d}");
                    }
                }
            }
            Output::Limit(l) => {
                let _ = write!(s, "eps_L >= {} [{}]", l.lower, l.lower_assumption);
                if let (Some(u), Some(n), Some(a)) = (&l.upper, l.upper_index, l.upper_assumption) {
                    let _ = write!(s, ", eps_L <= {u} [{a}, attained at n = {n}]");
                }
                s.push('\n');
            }
        }
        s
    }

    fn csv(&self) -> String {
        match self {
            Output::Records(records) => {
                let mut rows = vec![[
                    "manifold",
                    "lower",
                    "upper",
                    "exact",
                    "assumption",
                    "lower_assumption",
                    "upper_assumption",
                ]
                .map(String::from)
                .to_vec()];
                for r in records {
                    rows.push(vec![
                        r.manifold.clone(),
                        r.lower.to_string(),
                        opt(r.upper),
                        r.exact.to_string(),
                        r.assumption.to_string(),
                        r.lower_assumption.to_string(),
                        opt(r.upper_assumption),
                    ]);
                }
                csv_string(rows)
            }
            Output::Form(q) => {
                csv_string(vec![
                    ["rank", "signature", "determinant", "even", "unimodular", "definiteness", "classification"]
                        .map(String::from)
                        .to_vec(),
                    vec![
                        q.rank.to_string(),
                        q.signature.to_string(),
                        q.determinant.clone(),
                        q.even.to_string(),
                        q.unimodular.to_string(),
                        q.definiteness.clone(),
                        q.classification.clone().unwrap_or_default(),
                    ],
                ])
            }
            // wide layout: a header row of n and one row of values
            Output::Table(t) => csv_string(vec![
                t.n.iter().map(|n| n.to_string()).collect(),
                t.eps.iter().map(|e| e.to_string()).collect(),
            ]),
            Output::Limit(l) => csv_string(vec![
                ["lower", "lower_assumption", "upper", "upper_index", "upper_assumption"]
                    .map(String::from)
                    .to_vec(),
                vec![
                    l.lower.clone(),
                    l.lower_assumption.to_string(),
                    opt(l.upper.clone()),
                    opt(l.upper_index),
                    opt(l.upper_assumption),
                ],
            ]),
        }
    }
}
