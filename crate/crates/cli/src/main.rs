mod output;

use clap::{Parser, Subcommand, ValueEnum};
use embnum_core::forms::describe_even_unimodular;
use embnum_core::kirby::chain_upper_bound;
use embnum_core::manifolds::{
    brieskorn_bounds, brieskorn_constraints, dbc_upper, lens_bounds, lens_spin_fillings,
    surgery_eps_bounds, Brieskorn, LensSpace,
};
use embnum_core::obstruct::explain;
use embnum_core::propagate::{
    build_ledger, emit_table, epsilon_l_bounds, BoundLedger, FactRegistry, Side, TableKind,
};
use embnum_core::splitcon::{yn_construction, zn_construction, SplitReport};
use embnum_core::{Error, FormSummary, Mode, QuadraticForm};
use output::{FormRecord, Format, LimitRecord, Output, OutputRecord, TableRecord};
use std::path::PathBuf;
use std::process::ExitCode;

/// Lens spaces with `p` up to this size are cross-checked against the `L_n` ledger.
const LEDGER_LIMIT: i64 = 200;
/// Indices the bundled tables need.
const TABLE_MAX: u64 = 19;

#[derive(Parser)]
#[command(name = "embnum", version, about = "Bounds on the least n with Y ⊂ #_n S²×S²")]
struct Cli {
    /// Use the 11/8 inequality; results that need it are tagged.
    #[arg(long = "assume-11-8", global = true)]
    assume_11_8: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Show derivations and rejected splittings.
    #[arg(long, global = true)]
    trace: bool,
    /// Facts registry (JSON array of facts); defaults to the bundled one.
    #[arg(long, global = true, value_name = "PATH")]
    facts: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The lens space L(P, Q).
    Lens { p: i64, q: i64 },
    /// Every lens space L(p, q) with p <= MAX, one per orientation class.
    LensTable {
        #[arg(long)]
        max: i64,
    },
    /// The Brieskorn sphere Σ(P, Q, R).
    Brieskorn {
        p: i64,
        q: i64,
        r: i64,
        /// Its correction term vanishes, so it bounds no definite spin manifold.
        #[arg(long)]
        d_zero: bool,
    },
    /// P/Q surgery on an arbitrary knot.
    #[command(allow_negative_numbers = true)]
    Surgery { p: i64, q: i64 },
    /// Branched double cover of a knot.
    Dbc {
        #[arg(long)]
        genus: u64,
        #[arg(long)]
        unknotting: u64,
    },
    /// Homology spheres splitting K3-type manifolds into definite pieces.
    Split { which: SplitKind, n: u64 },
    /// Invariants of a symmetric integer matrix {"n": .., "rows": [[..]]}.
    Form {
        #[arg(long)]
        file: PathBuf,
    },
    /// Exact tables for L(n, 1) and L(n, n-1).
    Table { which: TableArg },
    /// Bounds on lim ε(L(n, n-1))/n.
    Limit,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitKind {
    Yn,
    Zn,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    Figure1,
    SmallLn,
}

enum Failure {
    Invalid(String),
    Contradiction(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Contradiction(c) => Failure::Contradiction(c.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

struct Context {
    mode: Mode,
    trace: bool,
    registry: FactRegistry,
}

impl Context {
    fn ledger(&self, n_max: u64) -> Result<BoundLedger, Failure> {
        Ok(build_ledger(n_max.max(TABLE_MAX), self.mode, &self.registry)?)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            print!("{}", out.render(format));
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Contradiction(msg)) => {
            eprintln!("error: inconsistent fact registry\n{msg}");
            ExitCode::from(3)
        }
    }
}

fn load_registry(path: &Option<PathBuf>) -> Result<FactRegistry, Failure> {
    match path {
        None => Ok(FactRegistry::bundled()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", p.display())))?;
            Ok(FactRegistry::from_json(&text)?)
        }
    }
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let ctx = Context {
        mode: if cli.assume_11_8 {
            Mode::Assume11_8
        } else {
            Mode::Furuta10_8
        },
        trace: cli.trace,
        registry: load_registry(&cli.facts)?,
    };
    match cli.command {
        Command::Lens { p, q } => {
            let l = LensSpace::new(p, q)?;
            let ledger = if p <= LEDGER_LIMIT {
                Some(ctx.ledger(p as u64)?)
            } else {
                None
            };
            Ok(Output::Records(vec![lens_record(&ctx, &l, ledger.as_ref())?]))
        }
        Command::LensTable { max } => {
            if max < 2 {
                return Err(Failure::Invalid("--max must be at least 2".into()));
            }
            let ledger = if max <= LEDGER_LIMIT {
                Some(ctx.ledger(max as u64)?)
            } else {
                None
            };
            let mut records = Vec::new();
            for p in 2..=max {
                for q in 1..p {
                    let Ok(l) = LensSpace::new(p, q) else { continue };
                    if l.representatives()[0] != q {
                        continue;
                    }
                    records.push(lens_record(&ctx, &l, ledger.as_ref())?);
                }
            }
            Ok(Output::Records(records))
        }
        Command::Brieskorn { p, q, r, d_zero } => {
            let b = Brieskorn::new(p, q, r)?;
            let bound = brieskorn_bounds(&b, ctx.mode, d_zero)?;
            let mut rec = OutputRecord::from_bound(b.to_string(), &bound);
            if ctx.trace {
                let c = brieskorn_constraints(&b, ctx.mode, d_zero);
                let mut lines = Vec::new();
                for m in 0..=bound.lower_value() {
                    let level = explain(m, &c)?;
                    let verdict = if level.feasible { "feasible" } else { "infeasible" };
                    let shown: Vec<_> = level.candidates.iter().filter(|c| c.s_u.is_some()).collect();
                    if shown.is_empty() {
                        lines.push(format!("m = {m}: {verdict}, no signature ≡ {} (mod 16) fits", c.mu.unwrap_or(0)));
                        continue;
                    }
                    lines.push(format!("m = {m}: {verdict}"));
                    lines.extend(shown.iter().map(|c| format!("  {c}")));
                }
                rec.trace = Some(lines);
            }
            Ok(Output::Records(vec![rec]))
        }
        Command::Surgery { p, q } => {
            let b = surgery_eps_bounds(p, q)?;
            Ok(Output::Records(vec![OutputRecord::from_bound(
                format!("S³_{p}/{q}(K)"),
                &b,
            )]))
        }
        Command::Dbc { genus, unknotting } => Ok(Output::Records(vec![OutputRecord::from_bound(
            format!("Σ(K), g = {genus}, u = {unknotting}"),
            &dbc_upper(genus, unknotting),
        )])),
        Command::Split { which, n } => {
            let (name, report) = match which {
                SplitKind::Yn => (format!("Y_{n}"), yn_construction(n, ctx.mode)?),
                SplitKind::Zn => (format!("Z_{n}"), zn_construction(n, ctx.mode)?),
            };
            Ok(Output::Records(vec![split_record(&ctx, name, &report)]))
        }
        Command::Form { file } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", file.display())))?;
            let q = QuadraticForm::from_json(&text)?;
            let s = FormSummary::from(&q);
            let class = (s.even && s.unimodular)
                .then(|| describe_even_unimodular(s.rank as u64, s.signature))
                .flatten();
            Ok(Output::Form(FormRecord::new(&s, class)))
        }
        Command::Table { which } => {
            let (kind, name) = match which {
                TableArg::Figure1 => (TableKind::OddLensN1, "eps(L(n,1)), odd n"),
                TableArg::SmallLn => (TableKind::SmallLn, "eps(L(n,n-1)), plumbing spin structure"),
            };
            let ledger = ctx.ledger(TABLE_MAX)?;
            let table = emit_table(&ledger, kind)?;
            let chains = ctx.trace.then(|| {
                table
                    .rows
                    .iter()
                    .map(|r| {
                        let mut c = ledger.chain(r.lower.id);
                        for d in ledger.chain(r.upper.id) {
                            if !c.iter().any(|x| x.id == d.id) {
                                c.push(d);
                            }
                        }
                        c
                    })
                    .collect()
            });
            Ok(Output::Table(TableRecord::new(name, &table, chains)))
        }
        Command::Limit => {
            let ledger = ctx.ledger(TABLE_MAX)?;
            Ok(Output::Limit(LimitRecord::from(&epsilon_l_bounds(&ledger))))
        }
    }
}

fn lens_record(ctx: &Context, l: &LensSpace, ledger: Option<&BoundLedger>) -> Result<OutputRecord, Failure> {
    let (p, q) = (l.p(), l.q());
    let mut bound = lens_bounds(l, ctx.mode)?;
    let mut trace = Vec::new();
    // L(p, 1) and L(p, p-1) are ±L_p
    let family = q == 1 || q == p - 1;
    if let (true, Some(ledger)) = (family, ledger) {
        let cell = ledger.cell(p as u64);
        if p % 2 == 1 {
            bound = bound.intersect(cell);
            if ctx.trace {
                for side in [Side::Lower, Side::Upper] {
                    if let Some(d) = ledger.best(p as u64, side) {
                        trace.extend(ledger.chain(d.id).iter().map(|d| d.to_string()));
                    }
                }
            }
        } else {
            let upper = cell.upper_value().map_or("∞".into(), |u| u.to_string());
            bound = bound.with_note(format!(
                "with the spin structure bounding the -2 plumbing: {} <= eps <= {upper}",
                cell.lower_value()
            ));
        }
    }
    if ctx.trace {
        let chain = chain_upper_bound(p, q)?;
        let fillings = lens_spin_fillings(l)?;
        for (s, f) in chain.per_spin_structure.iter().zip(&fillings) {
            trace.push(format!(
                "characteristic sublink {}: {} even-framed components, spin filling b2 = {}, sigma = {}",
                s.sublink, s.components, f.b2, f.sigma
            ));
        }
    }
    let mut rec = OutputRecord::from_bound(l.to_string(), &bound);
    if ctx.trace {
        rec.trace = Some(trace);
    }
    Ok(rec)
}

fn split_record(ctx: &Context, name: String, r: &SplitReport) -> OutputRecord {
    let mut rec = OutputRecord::from_bound(name, &r.eps);
    rec.notes.push(format!(
        "definite piece: rank {}, signature {}, determinant {}, even {}",
        r.u_form.rank, r.u_form.signature, r.u_form.determinant, r.u_form.even
    ));
    rec.notes.push(format!("complementary piece: rank {}", r.v_rank));
    rec.notes.push(format!(
        "ambient: rank {}, signature {}",
        r.ambient_rank, r.ambient_signature
    ));
    if ctx.trace {
        rec.trace = Some(
            r.fillings
                .iter()
                .map(|f| format!("spin filling b2 = {}, sigma = {}", f.b2, f.sigma))
                .collect(),
        );
    }
    rec
}
