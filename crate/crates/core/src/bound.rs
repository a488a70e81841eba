//! Interval bounds on the embedding number, with the assumption each end rests on.

use serde::{Deserialize, Serialize};
use std::fmt;

/// What a bound depends on beyond standard theorems.
///
/// The derived `Ord` ranks assumptions by how much they cost: when two rules give
/// the same value the cheaper one is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Assumption {
    Unconditional,
    /// A smooth construction recorded in the facts registry.
    #[serde(rename = "PaperConstruction")]
    ExternalConstruction,
    Assumes11_8,
}

impl Assumption {
    /// The assumption carried by a value derived from several inputs.
    pub fn join(self, other: Assumption) -> Assumption {
        self.max(other)
    }
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assumption::Unconditional => "unconditional",
            Assumption::ExternalConstruction => "construction",
            Assumption::Assumes11_8 => "assumes 11/8",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lower,
    Upper,
    Exact,
}

/// One end of a bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: u64,
    pub assumption: Assumption,
    pub citation: String,
}

impl Estimate {
    pub fn new(value: u64, assumption: Assumption, citation: impl Into<String>) -> Self {
        Estimate {
            value,
            assumption,
            citation: citation.into(),
        }
    }

    pub fn unconditional(value: u64, citation: impl Into<String>) -> Self {
        Self::new(value, Assumption::Unconditional, citation)
    }
}

/// A closed interval `[lower, upper]` for ε(Y); `upper = None` means no upper bound is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    pub lower: Estimate,
    pub upper: Option<Estimate>,
    /// Rules that were consulted but did not end up tight, and other remarks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Default for Bound {
    fn default() -> Self {
        Bound::trivial()
    }
}

impl Bound {
    /// `[0, ∞)`.
    pub fn trivial() -> Self {
        Bound {
            lower: Estimate::unconditional(0, "trivial"),
            upper: None,
            notes: Vec::new(),
        }
    }

    pub fn lower(e: Estimate) -> Self {
        Bound {
            lower: e,
            ..Bound::trivial()
        }
    }

    pub fn upper(e: Estimate) -> Self {
        Bound {
            upper: Some(e),
            ..Bound::trivial()
        }
    }

    pub fn exact(e: Estimate) -> Self {
        Bound {
            lower: e.clone(),
            upper: Some(e),
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn lower_value(&self) -> u64 {
        self.lower.value
    }

    pub fn upper_value(&self) -> Option<u64> {
        self.upper.as_ref().map(|e| e.value)
    }

    pub fn is_exact(&self) -> bool {
        self.upper_value() == Some(self.lower.value)
    }

    pub fn exact_value(&self) -> Option<u64> {
        self.is_exact().then_some(self.lower.value)
    }

    /// Both ends consistent.
    pub fn is_consistent(&self) -> bool {
        self.upper_value().map_or(true, |u| self.lower.value <= u)
    }

    /// Replaces the lower end if `e` is larger, or equal and cheaper.
    pub fn raise_lower(&mut self, e: Estimate) {
        let better = e.value > self.lower.value
            || (e.value == self.lower.value && e.assumption < self.lower.assumption);
        if better {
            let old = std::mem::replace(&mut self.lower, e);
            if old.value > 0 {
                self.notes.push(format!("lower {} ({})", old.value, old.citation));
            }
        } else if e.value > 0 {
            self.notes.push(format!("lower {} ({})", e.value, e.citation));
        }
    }

    /// Replaces the upper end if `e` is smaller, or equal and cheaper.
    pub fn lower_upper(&mut self, e: Estimate) {
        let better = match &self.upper {
            None => true,
            Some(u) => e.value < u.value || (e.value == u.value && e.assumption < u.assumption),
        };
        if better {
            if let Some(old) = self.upper.replace(e) {
                self.notes.push(format!("upper {} ({})", old.value, old.citation));
            }
        } else {
            self.notes.push(format!("upper {} ({})", e.value, e.citation));
        }
    }

    /// Interval intersection; each end keeps the tighter estimate.
    pub fn intersect(mut self, other: Bound) -> Bound {
        self.raise_lower(other.lower);
        if let Some(u) = other.upper {
            self.lower_upper(u);
        }
        self.notes.extend(other.notes);
        self
    }

    /// The weakest assumption under which the whole interval holds.
    pub fn assumption(&self) -> Assumption {
        let up = self
            .upper
            .as_ref()
            .map_or(Assumption::Unconditional, |u| u.assumption);
        self.lower.assumption.join(up)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.upper, self.is_exact()) {
            (Some(u), true) => {
                write!(f, "exact {}", u.value)?;
                if self.lower.assumption == u.assumption {
                    write!(f, " [{}]", u.assumption)
                } else {
                    write!(
                        f,
                        " [lower {}, upper {}]",
                        self.lower.assumption, u.assumption
                    )
                }
            }
            (Some(u), false) => write!(
                f,
                "{} <= eps <= {} [lower {}, upper {}]",
                self.lower.value, u.value, self.lower.assumption, u.assumption
            ),
            (None, _) => write!(
                f,
                "eps >= {} [{}], no upper bound",
                self.lower.value, self.lower.assumption
            ),
        }
    }
}
