//! Interval propagation over the family `L_n = L(n, n-1)`, with every spin
//! structure for even `n` taken to be the one bounding the `-2` plumbing.
//!
//! Each tightening is a [`Derivation`] recording its rule and the derivations it
//! used, so any cell can be replayed from its seeds.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::bound::{Assumption, Bound, Direction, Estimate};
use crate::error::{Error, Result};
use crate::kirby::{even_framing_count, neg_cf, CharSublink};
use crate::obstruct::{engine_estimate, spin_filling_b2_parity, Mode, SpinFilling, SplitConstraints};

const BUNDLED_FACTS: &str = include_str!("../data/facts.json");

/// A bound the library cannot derive itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fact {
    pub index: u64,
    pub direction: Direction,
    pub value: u64,
    pub assumption: Assumption,
    pub citation: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactRegistry {
    pub facts: Vec<Fact>,
}

impl FactRegistry {
    pub fn new(facts: Vec<Fact>) -> Result<Self> {
        let r = FactRegistry { facts };
        r.validate()?;
        Ok(r)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let facts: Vec<Fact> =
            serde_json::from_str(text).map_err(|e| Error::InvalidRegistry(e.to_string()))?;
        Self::new(facts)
    }

    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_FACTS).expect("bundled registry is valid")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.facts).expect("facts serialize")
    }

    fn validate(&self) -> Result<()> {
        for (i, f) in self.facts.iter().enumerate() {
            if f.index < 2 {
                return Err(Error::InvalidRegistry(format!(
                    "fact {i}: index {} is below 2",
                    f.index
                )));
            }
            if f.assumption == Assumption::ExternalConstruction && f.citation.trim().is_empty() {
                return Err(Error::InvalidRegistry(format!(
                    "fact {i}: construction facts need a citation"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// Even-framed chain of `n - 1` unknots.
    ChainUpper,
    /// Spin splitting search with the plumbing as filling.
    EngineLower,
    /// No lens space embeds in `S⁴`.
    LensBasicLower,
    Registry { fact: usize },
    /// `ε(L_n) <= ε(L_from) + 1` for `from = n ± 1`.
    StepUpper { from: u64 },
    /// `ε(L_n) >= ε(L_from) - 1` for `from = n ± 1`.
    StepLower { from: u64 },
    /// `ε(L_{m+k}) <= ε(L_m) + ε(L_k) + 1`.
    Subadditive { m: u64, k: u64 },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::ChainUpper => write!(f, "chain"),
            Rule::EngineLower => write!(f, "splitting search"),
            Rule::LensBasicLower => write!(f, "lens space"),
            Rule::Registry { fact } => write!(f, "registry fact {fact}"),
            Rule::StepUpper { from } => write!(f, "step from L_{from} (upper + 1)"),
            Rule::StepLower { from } => write!(f, "step from L_{from} (lower - 1)"),
            Rule::Subadditive { m, k } => write!(f, "subadditivity L_{m} + L_{k} + 1"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub id: usize,
    pub index: u64,
    pub side: Side,
    pub value: u64,
    #[serde(flatten)]
    pub rule: Rule,
    pub inputs: Vec<usize>,
    pub assumption: Assumption,
    pub citation: String,
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.side {
            Side::Lower => ">=",
            Side::Upper => "<=",
        };
        write!(
            f,
            "#{}: eps(L_{}) {rel} {} by {} [{}]",
            self.id, self.index, self.value, self.rule, self.assumption
        )?;
        if !self.inputs.is_empty() {
            let ids: Vec<String> = self.inputs.iter().map(|i| format!("#{i}")).collect();
            write!(f, " from {}", ids.join(", "))?;
        }
        if !self.citation.is_empty() {
            write!(f, "; {}", self.citation)?;
        }
        Ok(())
    }
}

/// A cell whose lower end exceeds its upper end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contradiction {
    pub index: u64,
    pub lower: u64,
    pub upper: u64,
    pub lower_chain: Vec<Derivation>,
    pub upper_chain: Vec<Derivation>,
}

impl fmt::Display for Contradiction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "contradiction at L_{}: lower {} exceeds upper {}",
            self.index, self.lower, self.upper
        )?;
        writeln!(f, "lower derivation:")?;
        for d in &self.lower_chain {
            writeln!(f, "  {d}")?;
        }
        writeln!(f, "upper derivation:")?;
        for d in &self.upper_chain {
            writeln!(f, "  {d}")?;
        }
        Ok(())
    }
}

/// Best known interval for each `L_n`, `2 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundLedger {
    pub n_max: u64,
    pub mode: Mode,
    pub registry: FactRegistry,
    derivations: Vec<Derivation>,
    lower: BTreeMap<u64, usize>,
    upper: BTreeMap<u64, usize>,
}

impl BoundLedger {
    pub fn new(n_max: u64, mode: Mode) -> Self {
        BoundLedger {
            n_max,
            mode,
            registry: FactRegistry::default(),
            derivations: Vec::new(),
            lower: BTreeMap::new(),
            upper: BTreeMap::new(),
        }
    }

    pub fn derivations(&self) -> &[Derivation] {
        &self.derivations
    }

    pub fn derivation(&self, id: usize) -> Option<&Derivation> {
        self.derivations.get(id)
    }

    pub fn best(&self, index: u64, side: Side) -> Option<&Derivation> {
        let map = match side {
            Side::Lower => &self.lower,
            Side::Upper => &self.upper,
        };
        map.get(&index).map(|&id| &self.derivations[id])
    }

    pub fn lower(&self, index: u64) -> Option<u64> {
        self.best(index, Side::Lower).map(|d| d.value)
    }

    pub fn upper(&self, index: u64) -> Option<u64> {
        self.best(index, Side::Upper).map(|d| d.value)
    }

    pub fn indices(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.lower.keys().chain(self.upper.keys()).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The cell as a [`Bound`].
    pub fn cell(&self, index: u64) -> Bound {
        let mut b = Bound::trivial();
        if let Some(d) = self.best(index, Side::Lower) {
            b.raise_lower(Estimate::new(d.value, d.assumption, d.to_string()));
        }
        if let Some(d) = self.best(index, Side::Upper) {
            b.lower_upper(Estimate::new(d.value, d.assumption, d.to_string()));
        }
        b.notes.clear();
        b
    }

    /// The derivation and everything it depends on, inputs first.
    pub fn chain(&self, id: usize) -> Vec<Derivation> {
        let mut seen = vec![false; self.derivations.len()];
        let mut out = Vec::new();
        self.collect_chain(id, &mut seen, &mut out);
        out
    }

    fn collect_chain(&self, id: usize, seen: &mut [bool], out: &mut Vec<Derivation>) {
        if seen[id] {
            return;
        }
        seen[id] = true;
        for &i in &self.derivations[id].inputs {
            self.collect_chain(i, seen, out);
        }
        out.push(self.derivations[id].clone());
    }

    /// Records a derivation if it tightens the cell: smaller upper / larger
    /// lower, or the same value under a cheaper assumption.
    pub fn offer(
        &mut self,
        index: u64,
        side: Side,
        value: u64,
        rule: Rule,
        inputs: Vec<usize>,
        assumption: Assumption,
        citation: String,
    ) -> bool {
        let better = match self.best(index, side) {
            None => true,
            Some(d) => {
                let tighter = match side {
                    Side::Lower => value > d.value,
                    Side::Upper => value < d.value,
                };
                tighter || (value == d.value && assumption < d.assumption)
            }
        };
        if !better {
            return false;
        }
        let id = self.derivations.len();
        self.derivations.push(Derivation {
            id,
            index,
            side,
            value,
            rule,
            inputs,
            assumption,
            citation,
        });
        match side {
            Side::Lower => self.lower.insert(index, id),
            Side::Upper => self.upper.insert(index, id),
        };
        true
    }

    fn check(&self, index: u64) -> Result<()> {
        if let (Some(l), Some(u)) = (self.best(index, Side::Lower), self.best(index, Side::Upper)) {
            if l.value > u.value {
                return Err(Error::Contradiction(Box::new(Contradiction {
                    index,
                    lower: l.value,
                    upper: u.value,
                    lower_chain: self.chain(l.id),
                    upper_chain: self.chain(u.id),
                })));
            }
        }
        Ok(())
    }

    /// Errors with a [`Contradiction`] at the first inconsistent cell.
    pub fn check_consistent(&self) -> Result<()> {
        for n in self.indices() {
            self.check(n)?;
        }
        Ok(())
    }

    pub fn add_fact(&mut self, fact_id: usize, fact: &Fact) {
        let sides: &[Side] = match fact.direction {
            Direction::Lower => &[Side::Lower],
            Direction::Upper => &[Side::Upper],
            Direction::Exact => &[Side::Lower, Side::Upper],
        };
        for &side in sides {
            self.offer(
                fact.index,
                side,
                fact.value,
                Rule::Registry { fact: fact_id },
                Vec::new(),
                fact.assumption,
                fact.citation.clone(),
            );
        }
    }
}

fn chain_upper(n: u64) -> Result<u64> {
    let cf = neg_cf(n as i64, n as i64 - 1)?;
    even_framing_count(&cf, &CharSublink::zero(cf.len()))
}

fn engine_constraints(n: u64, mode: Mode) -> SplitConstraints {
    let parity = spin_filling_b2_parity(if n % 2 == 0 { 2 } else { 1 });
    SplitConstraints::new(mode)
        .with_filling(SpinFilling::negative_definite(n - 1))
        .with_b2_parity(parity)
}

fn engine_lower(n: u64, mode: Mode) -> Result<Estimate> {
    engine_estimate(
        &engine_constraints(n, mode),
        &format!("plumbing P_{n}: negative-definite spin filling of rank {}", n - 1),
    )
}

/// Machine-derived seeds for `2 <= n <= n_max` plus every registry fact in range.
pub fn seed_ledger(n_max: u64, mode: Mode, registry: &FactRegistry) -> Result<BoundLedger> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be at least 2".into()));
    }
    let mut ledger = BoundLedger::new(n_max, mode);
    ledger.registry = registry.clone();
    for n in 2..=n_max {
        ledger.offer(
            n,
            Side::Upper,
            chain_upper(n)?,
            Rule::ChainUpper,
            Vec::new(),
            Assumption::Unconditional,
            format!("chain of {} unknots framed -2, all even", n - 1),
        );
        ledger.offer(
            n,
            Side::Lower,
            1,
            Rule::LensBasicLower,
            Vec::new(),
            Assumption::Unconditional,
            format!("H_1 = Z/{n} is not of the form G ⊕ G"),
        );
        let e = engine_lower(n, mode)?;
        ledger.offer(n, Side::Lower, e.value, Rule::EngineLower, Vec::new(), e.assumption, e.citation);
    }
    for (i, f) in registry.facts.iter().enumerate() {
        if f.index <= n_max {
            ledger.add_fact(i, f);
        }
    }
    Ok(ledger)
}

/// One application site of a propagation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleInstance {
    StepUpper { n: u64, from: u64 },
    StepLower { n: u64, from: u64 },
    Subadditive { m: u64, k: u64 },
}

/// Every rule instance within the ledger's range, in natural order.
pub fn rule_instances(n_max: u64) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        for from in [n.wrapping_sub(1), n + 1] {
            if (2..=n_max).contains(&from) {
                out.push(RuleInstance::StepUpper { n, from });
                out.push(RuleInstance::StepLower { n, from });
            }
        }
        for m in 2..=n / 2 {
            if n - m >= 2 {
                out.push(RuleInstance::Subadditive { m, k: n - m });
            }
        }
    }
    out
}

fn apply(ledger: &mut BoundLedger, r: RuleInstance) -> Result<bool> {
    let (index, changed) = match r {
        RuleInstance::StepUpper { n, from } => {
            let Some(d) = ledger.best(from, Side::Upper).cloned() else {
                return Ok(false);
            };
            let c = ledger.offer(
                n,
                Side::Upper,
                d.value + 1,
                Rule::StepUpper { from },
                vec![d.id],
                d.assumption,
                String::new(),
            );
            (n, c)
        }
        RuleInstance::StepLower { n, from } => {
            let Some(d) = ledger.best(from, Side::Lower).cloned() else {
                return Ok(false);
            };
            if d.value < 2 {
                return Ok(false);
            }
            let c = ledger.offer(
                n,
                Side::Lower,
                d.value - 1,
                Rule::StepLower { from },
                vec![d.id],
                d.assumption,
                String::new(),
            );
            (n, c)
        }
        RuleInstance::Subadditive { m, k } => {
            let (Some(a), Some(b)) = (
                ledger.best(m, Side::Upper).cloned(),
                ledger.best(k, Side::Upper).cloned(),
            ) else {
                return Ok(false);
            };
            let c = ledger.offer(
                m + k,
                Side::Upper,
                a.value + b.value + 1,
                Rule::Subadditive { m, k },
                vec![a.id, b.id],
                a.assumption.join(b.assumption),
                String::new(),
            );
            (m + k, c)
        }
    };
    if changed {
        ledger.check(index)?;
    }
    Ok(changed)
}

/// Applies `order` repeatedly until nothing changes.
///
/// All rules are monotone on a finite lattice, so the fixpoint does not depend on `order`.
pub fn propagate_in_order(mut ledger: BoundLedger, order: &[RuleInstance]) -> Result<BoundLedger> {
    ledger.check_consistent()?;
    loop {
        let mut changed = false;
        for &r in order {
            changed |= apply(&mut ledger, r)?;
        }
        if !changed {
            return Ok(ledger);
        }
    }
}

pub fn propagate(ledger: BoundLedger) -> Result<BoundLedger> {
    let order = rule_instances(ledger.n_max);
    propagate_in_order(ledger, &order)
}

/// Seeds and propagates in one step.
pub fn build_ledger(n_max: u64, mode: Mode, registry: &FactRegistry) -> Result<BoundLedger> {
    propagate(seed_ledger(n_max, mode, registry)?)
}

/// Replays a derivation and all of its inputs.
pub fn verify_derivation(ledger: &BoundLedger, id: usize) -> Result<()> {
    let fail = |d: &Derivation, why: String| {
        Err(Error::InvalidArgument(format!("derivation #{} does not replay: {why}", d.id)))
    };
    for d in ledger.chain(id) {
        let input = |i: usize| &ledger.derivations[d.inputs[i]];
        let (value, assumption) = match &d.rule {
            Rule::ChainUpper => (chain_upper(d.index)?, Assumption::Unconditional),
            Rule::LensBasicLower => (1, Assumption::Unconditional),
            Rule::EngineLower => {
                let e = engine_lower(d.index, ledger.mode)?;
                (e.value, e.assumption)
            }
            Rule::Registry { fact } => match ledger.registry.facts.get(*fact) {
                Some(f) if f.index == d.index => (f.value, f.assumption),
                _ => return fail(&d, format!("no registry fact {fact} for L_{}", d.index)),
            },
            Rule::StepUpper { from } | Rule::StepLower { from } => {
                if d.inputs.len() != 1 || input(0).index != *from || from.abs_diff(d.index) != 1 {
                    return fail(&d, "step rule needs one adjacent input".into());
                }
                let i = input(0);
                let v = match d.rule {
                    Rule::StepUpper { .. } if i.side == Side::Upper => i.value + 1,
                    Rule::StepLower { .. } if i.side == Side::Lower => i.value - 1,
                    _ => return fail(&d, "input is on the wrong side".into()),
                };
                (v, i.assumption)
            }
            Rule::Subadditive { m, k } => {
                if d.inputs.len() != 2
                    || m + k != d.index
                    || (input(0).index, input(1).index) != (*m, *k)
                    || input(0).side != Side::Upper
                    || input(1).side != Side::Upper
                {
                    return fail(&d, "subadditivity needs the two summand uppers".into());
                }
                (
                    input(0).value + input(1).value + 1,
                    input(0).assumption.join(input(1).assumption),
                )
            }
        };
        if value != d.value || assumption != d.assumption {
            return fail(
                &d,
                format!("recomputed {value} [{assumption}], recorded {} [{}]", d.value, d.assumption),
            );
        }
    }
    Ok(())
}

/// `(lower, upper)` for `lim ε(L_n)/n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitBounds {
    pub lower: Ratio<u64>,
    pub lower_assumption: Assumption,
    pub upper: Option<Ratio<u64>>,
    /// The `n` attaining the upper bound.
    pub upper_index: Option<u64>,
    pub upper_assumption: Option<Assumption>,
}

/// Lower bound from the 10/8 (or 11/8) slope; upper bound
/// `min_n (upper(n) + 1) / n` since `ε(L_n) + 1` is subadditive.
pub fn epsilon_l_bounds(ledger: &BoundLedger) -> LimitBounds {
    let (lower, lower_assumption) = match ledger.mode {
        Mode::Assume11_8 => (Ratio::new(3, 19), Assumption::Assumes11_8),
        _ => (Ratio::new(1, 9), Assumption::Unconditional),
    };
    let mut best: Option<(Ratio<u64>, u64, Assumption)> = None;
    for n in ledger.indices() {
        if let Some(d) = ledger.best(n, Side::Upper) {
            let r = Ratio::new(d.value + 1, n);
            let better = match &best {
                None => true,
                Some((b, _, a)) => r < *b || (r == *b && d.assumption < *a),
            };
            if better {
                best = Some((r, n, d.assumption));
            }
        }
    }
    LimitBounds {
        lower,
        lower_assumption,
        upper: best.map(|b| b.0),
        upper_index: best.map(|b| b.1),
        upper_assumption: best.map(|b| b.2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// `ε(L(n, 1))` for odd `3 <= n <= 19`.
    #[serde(rename = "figure1")]
    OddLensN1,
    /// `ε(L_n)` for `2 <= n <= 19`.
    SmallLn,
}

impl TableKind {
    pub fn indices(self) -> Vec<u64> {
        match self {
            TableKind::OddLensN1 => (3..=19).step_by(2).collect(),
            TableKind::SmallLn => (2..=19).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u64,
    pub value: u64,
    pub assumption: Assumption,
    pub lower: Derivation,
    pub upper: Derivation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub rows: Vec<TableRow>,
}

/// Exact rows for the given indices; fails on any cell that is not exact.
pub fn emit_rows(ledger: &BoundLedger, indices: &[u64]) -> Result<Table> {
    let mut rows = Vec::new();
    for &n in indices {
        let (Some(l), Some(u)) = (ledger.best(n, Side::Lower), ledger.best(n, Side::Upper)) else {
            return Err(Error::NotExact {
                index: n,
                lower: ledger.lower(n).unwrap_or(0),
                upper: ledger.upper(n).map_or("∞".into(), |u| u.to_string()),
            });
        };
        if l.value != u.value {
            return Err(Error::NotExact {
                index: n,
                lower: l.value,
                upper: u.value.to_string(),
            });
        }
        rows.push(TableRow {
            n,
            value: l.value,
            assumption: l.assumption.join(u.assumption),
            lower: l.clone(),
            upper: u.clone(),
        });
    }
    Ok(Table { rows })
}

/// `ε(L(n,1)) = ε(L_n)` for odd `n`, since reversing orientation preserves ε.
pub fn emit_table(ledger: &BoundLedger, which: TableKind) -> Result<Table> {
    emit_rows(ledger, &which.indices())
}
