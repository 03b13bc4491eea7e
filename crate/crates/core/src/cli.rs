//! The `opcheck` front end. [`run`] never touches the process: it returns
//! the exit code and both streams so callers (and tests) decide what to do.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::builtin::{builtin_act, builtin_as};
use crate::algebra::modules::{
    check_bimodule_axioms, check_infbimodule_axioms, induced_infbimodule, BimoduleTables,
    InfBimoduleTables,
};
use crate::algebra::operad::{check_operad_axioms, FiniteOperad, OperadMap};
use crate::algebra::xcons::{as_pair, check_assumption_13, x_construction, XInput};
use crate::cells::{
    check_blacktriangle_relations, check_face_poset, check_penta, check_shadow,
    check_square_relations, check_tilde_relations, check_tilde_well_defined, subdivision_audit,
    subdivision_cells, wa_face_poset, FACE_CAP,
};
use crate::corpus::{bimodule_corpus, infbimodule_corpus, xcons_corpus};
use crate::cosimp::{
    box_product, check_box_module, check_box_monoid, check_module_map, check_semicosimplicial,
    check_structure_map, check_unit_laws, derive_monoid_from_bimodule,
    derive_pair_from_infbimodule, infbimodule_from_pair, loops_example, LoopData,
    SemiCosimplicialSet,
};
use crate::error::{Error, Result};
use crate::freecons::{adjunction_check_bimod, adjunction_check_ib, FreeBimod, FreeIb};
use crate::report::AxiomReport;
use crate::seqcore::{
    profile_closed, profile_open, Colour, FiniteSSequence, Profile, SSeqMap, DEFAULT_MAX_ARITY,
};
use crate::trees::{enumerate_trees, ptrees, Caps, Constraint, Tree};

/// What a run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(
    name = "opcheck",
    version,
    about = "Axiom checks for finite two-coloured operads and their modules"
)]
struct Cli {
    /// Truncation arity for generated structures.
    #[arg(long = "maxArity", global = true)]
    max_arity: Option<usize>,
    /// Top level for semi-cosimplicial data.
    #[arg(long = "maxLevel", global = true)]
    max_level: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Artifact path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check or emit an operad.
    #[command(subcommand)]
    Operad(OperadCmd),
    /// List elements of a free object at one profile.
    #[command(subcommand)]
    Free(FreeCmd),
    #[command(subcommand)]
    Cosimp(CosimpCmd),
    #[command(subcommand)]
    Trees(TreesCmd),
    #[command(subcommand)]
    Cells(CellsCmd),
    /// The seeded batch of every check.
    Suite {
        /// Run every section (the default).
        #[arg(long)]
        all: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Builtin {
    /// Unital monoid actions.
    Act,
    /// Non-unital monoid actions.
    Act0,
    /// Unital associative.
    As,
    /// Strict associative.
    As0,
}

impl Builtin {
    fn build(self, max: usize) -> FiniteOperad {
        match self {
            Builtin::Act => builtin_act(true, max),
            Builtin::Act0 => builtin_act(false, max),
            Builtin::As => builtin_as(false, max),
            Builtin::As0 => builtin_as(true, max),
        }
    }
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct OperadSource {
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// Operad JSON.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct ActingSource {
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// Operad JSON.
    #[arg(long)]
    operad: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum OperadCmd {
    Check(OperadSource),
    /// Write the operad JSON to --out (or stdout).
    Build(OperadSource),
}

#[derive(Args, Debug)]
struct FreeArgs {
    #[command(flatten)]
    source: ActingSource,
    /// Generators, as a sequence JSON.
    #[arg(long)]
    module: PathBuf,
    /// e.g. "(c,c;c)" or "(c,o;o)".
    #[arg(long)]
    profile: String,
}

#[derive(Subcommand, Debug)]
enum FreeCmd {
    Ib(FreeArgs),
    Bimod(FreeArgs),
}

#[derive(Subcommand, Debug)]
enum CosimpCmd {
    /// The box product of two semi-cosimplicial sets.
    Box {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Cosimplicial data read off a module.
    Derive {
        #[arg(
            long,
            conflicts_with = "bimodule",
            required_unless_present = "bimodule"
        )]
        infbimodule: Option<PathBuf>,
        #[arg(long, requires = "eta")]
        bimodule: Option<PathBuf>,
        /// Structure map from the unital operad, as a map JSON.
        #[arg(long)]
        eta: Option<PathBuf>,
    },
    /// Semi-cosimplicial identities and unit laws.
    Check {
        #[arg(long)]
        x: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum TreesCmd {
    /// One tree code per line.
    Enumerate {
        #[arg(long)]
        n: usize,
        /// all, closed, min_arity_2, binary, tree_o, pearl, section.
        #[arg(long)]
        constraint: String,
        #[arg(long)]
        profile: Option<String>,
        #[arg(long = "maxVertices", default_value_t = Caps::default().max_vertices)]
        max_vertices: usize,
    },
    /// Pearl trees with `m` leaves and a pearl of arity `n`, or the count table.
    Ptrees {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Print the table of counts up to this size instead.
        #[arg(long, conflicts_with_all = ["m", "n"])]
        table: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum CellsCmd {
    /// Face poset of the edge-length polytope.
    Wa {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_colour, default_value = "closed")]
        colour: Colour,
    },
    Fvector {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_colour, default_value = "closed")]
        colour: Colour,
    },
    /// Cells of the subdivision and their dimension audit.
    Subdiv {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_colour, default_value = "closed")]
        colour: Colour,
    },
}

fn parse_colour(s: &str) -> std::result::Result<Colour, String> {
    Colour::parse(s).ok_or_else(|| format!("unknown colour {s:?} (closed or open)"))
}

/// Flags shared by every command.
#[derive(Clone, Debug)]
struct Ctx {
    max_arity: Option<usize>,
    max_level: Option<usize>,
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
}

/// Either a finished outcome or an error that maps to exit status 2.
type CmdResult = Result<Outcome>;

/// Parse `argv` (program name first) and run the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome {
                        code: 0,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => Outcome::usage(text),
            };
        }
    };
    let ctx = Ctx {
        max_arity: cli.max_arity,
        max_level: cli.max_level,
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
    };
    let res = match cli.cmd {
        Cmd::Operad(c) => operad_cmd(&ctx, c),
        Cmd::Free(c) => free_cmd(&ctx, c),
        Cmd::Cosimp(c) => cosimp_cmd(&ctx, c),
        Cmd::Trees(c) => trees_cmd(&ctx, c),
        Cmd::Cells(c) => cells_cmd(&ctx, c),
        Cmd::Suite { .. } => suite_cmd(&ctx),
    };
    res.unwrap_or_else(|e| Outcome::usage(format!("error: {e}\n")))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::Precondition(format!("cannot write {}: {e}", path.display())))
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json renders");
    s.push('\n');
    s
}

/// Exit 0 or 1 by the report, rendered in the requested format.
fn report_outcome(
    ctx: &Ctx,
    title: &str,
    extra: Value,
    rep: &AxiomReport,
    text: String,
) -> Outcome {
    let stdout = match ctx.format {
        Format::Text => format!("{text}{title}: {rep}"),
        Format::Json => json_line(&json!({
            "command": title,
            "passed": rep.passed(),
            "result": extra,
            "report": rep,
        })),
    };
    Outcome {
        code: if rep.passed() { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    }
}

fn plain(ctx: &Ctx, text: String, v: Value) -> Outcome {
    Outcome {
        code: 0,
        stdout: match ctx.format {
            Format::Text => text,
            Format::Json => json_line(&v),
        },
        stderr: String::new(),
    }
}

fn operad_cmd(ctx: &Ctx, c: OperadCmd) -> CmdResult {
    let (src, build) = match c {
        OperadCmd::Check(s) => (s, false),
        OperadCmd::Build(s) => (s, true),
    };
    let max = ctx.max_arity.unwrap_or(DEFAULT_MAX_ARITY);
    let o = match (src.builtin, src.file) {
        (Some(b), _) => b.build(max),
        (None, Some(f)) => FiniteOperad::load(&read(&f)?)?,
        (None, None) => unreachable!("clap enforces the group"),
    };
    if build {
        let doc = o.store();
        return Ok(match &ctx.out {
            Some(p) => {
                write(p, &doc)?;
                plain(
                    ctx,
                    format!("wrote {}\n", p.display()),
                    json!({ "wrote": p.display().to_string() }),
                )
            }
            None => Outcome {
                code: 0,
                stdout: doc + "\n",
                stderr: String::new(),
            },
        });
    }
    let rep = check_operad_axioms(&o);
    let extra = json!({ "maxArity": o.max_arity(), "elements": o.carrier().total() });
    Ok(report_outcome(ctx, "operad", extra, &rep, String::new()))
}

fn acting(ctx: &Ctx, s: &ActingSource) -> Result<FiniteOperad> {
    let max = ctx.max_arity.unwrap_or(3);
    match (s.builtin, &s.operad) {
        (Some(b), _) => Ok(b.build(max)),
        (None, Some(f)) => FiniteOperad::load(&read(f)?),
        (None, None) => unreachable!("clap enforces the group"),
    }
}

fn free_cmd(ctx: &Ctx, c: FreeCmd) -> CmdResult {
    let (ib, a) = match c {
        FreeCmd::Ib(a) => (true, a),
        FreeCmd::Bimod(a) => (false, a),
    };
    let o = acting(ctx, &a.source)?;
    let m = FiniteSSequence::load(&read(&a.module)?)?;
    let p = Profile::parse(&a.profile)?;
    let max = ctx.max_arity.unwrap_or(o.max_arity()).min(o.max_arity());
    let mut rows: Vec<(String, String)> = Vec::new();
    let tables = if ib {
        let free = FreeIb::new(&o, &m, max)?;
        for x in free.elements(&p) {
            let (t, pearl) = free.tree(&x);
            rows.push((t.code_marked(&[pearl].into()), free.label(&x)));
        }
        ctx.out
            .as_ref()
            .map(|_| free.tables().map(|t| t.store()))
            .transpose()?
    } else {
        let free = FreeBimod::new(&o, &m, max)?;
        for x in free.elements(&p) {
            let (t, marks) = free.tree(&x);
            rows.push((t.code_marked(&marks), free.label(&x)));
        }
        ctx.out
            .as_ref()
            .map(|_| free.tables().map(|t| t.store()))
            .transpose()?
    };
    if let (Some(path), Some(doc)) = (&ctx.out, tables) {
        write(path, &doc)?;
    }
    let mut text = String::new();
    for (_, l) in &rows {
        writeln!(text, "{l}").unwrap();
    }
    let v = json!({
        "profile": p.to_string(),
        "elements": rows.iter().map(|(t, l)| json!({ "tree": t, "label": l })).collect::<Vec<_>>(),
    });
    Ok(plain(ctx, text, v))
}

fn levels_line(x: &SemiCosimplicialSet) -> String {
    (0..=x.max_level())
        .map(|n| x.size(n).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cosimp_cmd(ctx: &Ctx, c: CosimpCmd) -> CmdResult {
    match c {
        CosimpCmd::Box { x, y } => {
            let x = SemiCosimplicialSet::load(&read(&x)?)?;
            let y = SemiCosimplicialSet::load(&read(&y)?)?;
            let mut b = box_product(&x, &y)?.set;
            if let Some(l) = ctx.max_level {
                b = b.truncate(l.min(b.max_level()));
            }
            if let Some(p) = &ctx.out {
                write(p, &b.store())?;
            }
            let rep = check_semicosimplicial(&b);
            let text = format!("level sizes: {}\n", levels_line(&b));
            let sizes: Vec<usize> = (0..=b.max_level()).map(|n| b.size(n)).collect();
            Ok(report_outcome(
                ctx,
                "box",
                json!({ "sizes": sizes }),
                &rep,
                text,
            ))
        }
        CosimpCmd::Check { x } => {
            let mut x = SemiCosimplicialSet::load(&read(&x)?)?;
            if let Some(l) = ctx.max_level {
                x = x.truncate(l.min(x.max_level()));
            }
            let mut rep = check_semicosimplicial(&x);
            if rep.passed() {
                rep.merge(check_unit_laws(&x)?);
            }
            let rep = rep.finish();
            let text = format!("level sizes: {}\n", levels_line(&x));
            Ok(report_outcome(
                ctx,
                "cosimp",
                json!({ "levels": x.max_level() }),
                &rep,
                text,
            ))
        }
        CosimpCmd::Derive {
            infbimodule,
            bimodule,
            eta,
        } => {
            if let Some(f) = infbimodule {
                let m = InfBimoduleTables::load(&read(&f)?)?;
                let mut rep = check_infbimodule_axioms(&m);
                if !rep.passed() {
                    return Ok(report_outcome(
                        ctx,
                        "derive",
                        Value::Null,
                        &rep,
                        String::new(),
                    ));
                }
                let pair = derive_pair_from_infbimodule(&m)?;
                rep.merge(pair.check());
                let back = infbimodule_from_pair(&pair)?;
                rep.expect(back.same_tables(&m), "round-trip", || {
                    f.display().to_string()
                });
                let rep = rep.finish();
                if let Some(p) = &ctx.out {
                    let doc = json!({
                        "closed": pair.closed.to_doc(),
                        "open": pair.open.to_doc(),
                        "h": pair.h,
                    });
                    write(p, &json_line(&doc))?;
                }
                let text = format!(
                    "closed sizes: {}\nopen sizes: {}\n",
                    levels_line(&pair.closed),
                    levels_line(&pair.open)
                );
                return Ok(report_outcome(
                    ctx,
                    "derive",
                    json!({ "closed": pair.closed.max_level() }),
                    &rep,
                    text,
                ));
            }
            let f = bimodule.expect("clap requires one input");
            let m = BimoduleTables::load(&read(&f)?)?;
            let eta = SSeqMap::load(&read(&eta.expect("clap requires --eta"))?)?;
            let mut rep = check_bimodule_axioms(&m);
            rep.merge(check_structure_map(&m, &eta)?);
            if !rep.passed() {
                return Ok(report_outcome(
                    ctx,
                    "derive",
                    Value::Null,
                    &rep.finish(),
                    String::new(),
                ));
            }
            let (mo, md, h) = derive_monoid_from_bimodule(&m, &eta)?;
            rep.merge(check_box_monoid(&mo)?);
            rep.merge(check_box_module(&mo, &md)?);
            rep.merge(check_module_map(&mo, &md, &h));
            let rep = rep.finish();
            if let Some(p) = &ctx.out {
                let doc = json!({ "monoid": mo.x.to_doc(), "module": md.a.to_doc(), "unit": mo.unit, "h": h });
                write(p, &json_line(&doc))?;
            }
            let text = format!(
                "monoid sizes: {}\nmodule sizes: {}\n",
                levels_line(&mo.x),
                levels_line(&md.a)
            );
            Ok(report_outcome(
                ctx,
                "derive",
                json!({ "monoid": mo.x.max_level() }),
                &rep,
                text,
            ))
        }
    }
}

fn trees_cmd(ctx: &Ctx, c: TreesCmd) -> CmdResult {
    match c {
        TreesCmd::Enumerate {
            n,
            constraint,
            profile,
            max_vertices,
        } => {
            let con = Constraint::parse(&constraint, profile.as_deref())?;
            let caps = Caps {
                max_arity: ctx.max_arity.unwrap_or(Caps::default().max_arity),
                max_vertices,
                ..Caps::default()
            };
            let codes: Vec<String> = enumerate_trees(n, &con, caps)?
                .iter()
                .map(|t| t.code())
                .collect();
            let text: String = codes.iter().map(|c| format!("{c}\n")).collect();
            Ok(plain(
                ctx,
                text,
                json!({ "n": n, "constraint": constraint, "trees": codes }),
            ))
        }
        TreesCmd::Ptrees { m, n, table } => {
            if let Some(k) = table {
                let rows: Vec<Vec<usize>> = (0..=k)
                    .map(|m| (0..=k).map(|n| ptrees(m, n).len()).collect())
                    .collect();
                let mut text = String::new();
                for (m, r) in rows.iter().enumerate() {
                    let cells: Vec<String> = r.iter().map(|c| c.to_string()).collect();
                    writeln!(text, "{m}: {}", cells.join(" ")).unwrap();
                }
                return Ok(plain(ctx, text, json!({ "table": rows })));
            }
            let (Some(m), Some(n)) = (m, n) else {
                return Err(Error::Precondition(
                    "ptrees needs --m and --n, or --table".into(),
                ));
            };
            let codes: Vec<String> = ptrees(m, n).iter().map(|t| t.code()).collect();
            let text: String = codes.iter().map(|c| format!("{c}\n")).collect();
            Ok(plain(ctx, text, json!({ "m": m, "n": n, "trees": codes })))
        }
    }
}

fn cells_cmd(ctx: &Ctx, c: CellsCmd) -> CmdResult {
    match c {
        CellsCmd::Wa { n, colour } => {
            let p = wa_face_poset(n, colour)?;
            if let Some(path) = &ctx.out {
                write(path, &p.to_json())?;
                write(&path.with_extension("dot"), &p.to_dot())?;
            }
            let rep = check_face_poset(&p);
            let fv = p.f_vector();
            let text = format!(
                "faces: {}\nf-vector: {}\neuler characteristic: {}\n",
                p.faces.len(),
                join(&fv),
                p.euler_characteristic()
            );
            let extra = json!({ "n": n, "colour": colour.name(), "f_vector": fv, "euler_characteristic": p.euler_characteristic() });
            Ok(report_outcome(ctx, "cells wa", extra, &rep, text))
        }
        CellsCmd::Fvector { n, colour } => {
            let fv = wa_face_poset(n, colour)?.f_vector();
            Ok(plain(
                ctx,
                format!("{}\n", join(&fv)),
                json!({ "n": n, "colour": colour.name(), "f_vector": fv }),
            ))
        }
        CellsCmd::Subdiv { n, colour } => {
            let cells = subdivision_cells(n, colour)?;
            let audit = subdivision_audit(n, colour)?;
            let mut text = String::new();
            for c in &cells {
                writeln!(
                    text,
                    "{} {} {} {}",
                    c.code, c.dim_lambda, c.dim_chi, c.total
                )
                .unwrap();
            }
            writeln!(
                text,
                "cells: {}, full-dimensional: {}, max total: {}",
                audit.cells, audit.full_dimensional, audit.max_total
            )
            .unwrap();
            if let Some(path) = &ctx.out {
                write(
                    path,
                    &json_line(&json!({ "n": n, "colour": colour.name(), "cells": cells })),
                )?;
            }
            let extra = json!({ "cells": audit.cells, "full_dimensional": audit.full_dimensional, "max_total": audit.max_total });
            Ok(report_outcome(
                ctx,
                "cells subdiv",
                extra,
                &audit.report,
                text,
            ))
        }
    }
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn suite_cmd(ctx: &Ctx) -> CmdResult {
    let cfg = SuiteConfig {
        seed: ctx.seed,
        max_arity: ctx.max_arity.unwrap_or(DEFAULT_MAX_ARITY),
        max_level: ctx.max_level.unwrap_or(4),
    };
    let rep = suite(&cfg);
    let body = match ctx.format {
        Format::Text => rep.render_text(),
        Format::Json => rep.render_json(),
    };
    if let Some(p) = &ctx.out {
        write(p, &body)?;
    }
    Ok(Outcome {
        code: if rep.passed() { 0 } else { 1 },
        stdout: body,
        stderr: String::new(),
    })
}

/// Inputs of [`suite`]; every random choice derives from `seed`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Truncation for the builtin operads and the face posets.
    pub max_arity: usize,
    /// Top level for the box-product and loop checks.
    pub max_level: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 7,
            max_arity: DEFAULT_MAX_ARITY,
            max_level: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteItem {
    pub name: String,
    pub status: Status,
    pub checked: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub items: Vec<SuiteItem>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.status != Status::Fail)
    }

    pub fn count(&self, s: Status) -> usize {
        self.items.iter().filter(|i| i.status == s).count()
    }

    pub fn render_text(&self) -> String {
        let mut s = format!("suite seed {}\n", self.seed);
        for i in &self.items {
            let tag = match i.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            write!(s, "[{tag}] {} ({} checked)", i.name, i.checked).unwrap();
            if !i.detail.is_empty() {
                write!(s, " {}", i.detail).unwrap();
            }
            s.push('\n');
        }
        writeln!(
            s,
            "{} passed, {} failed, {} skipped",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        )
        .unwrap();
        s
    }

    pub fn render_json(&self) -> String {
        json_line(&serde_json::to_value(self).expect("report serializes"))
    }
}

struct Items(Vec<SuiteItem>);

impl Items {
    /// Record one check; a size cap turns into a listed skip, any other
    /// error into a failure.
    fn push(&mut self, name: impl Into<String>, res: Result<(AxiomReport, String)>) {
        let name = name.into();
        let item = match res {
            Ok((rep, detail)) => {
                let detail = if rep.passed() {
                    detail
                } else {
                    let first = &rep.violations[0];
                    format!(
                        "{detail} {} violations, first {}: {}",
                        rep.violations.len(),
                        first.axiom,
                        first.instance
                    )
                    .trim()
                    .to_string()
                };
                SuiteItem {
                    name,
                    status: if rep.passed() {
                        Status::Pass
                    } else {
                        Status::Fail
                    },
                    checked: rep.checked,
                    detail,
                }
            }
            Err(e @ Error::SizeCap { .. }) => SuiteItem {
                name,
                status: Status::Skipped,
                checked: 0,
                detail: e.to_string(),
            },
            Err(e) => SuiteItem {
                name,
                status: Status::Fail,
                checked: 0,
                detail: e.to_string(),
            },
        };
        self.0.push(item);
    }
}

fn sub_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(k)
}

/// Every module's checks in a fixed order. The rendering depends on the
/// configuration alone.
pub fn suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut it = Items(Vec::new());
    let seed = cfg.seed;
    let ma = cfg.max_arity;

    for b in [Builtin::Act, Builtin::Act0, Builtin::As, Builtin::As0] {
        let name = format!("operad {}", format!("{b:?}").to_lowercase());
        it.push(
            name,
            Ok((check_operad_axioms(&b.build(ma)), format!("maxArity {ma}"))),
        );
    }

    let corpus_arity = ma.min(4);
    it.push(
        "infbimodule corpus",
        (|| {
            let mut rep = AxiomReport::new();
            let corpus = infbimodule_corpus(8, sub_seed(seed, 1), 3, corpus_arity)?;
            for (k, m) in corpus.iter().enumerate() {
                rep.merge(check_infbimodule_axioms(m));
                let pair = derive_pair_from_infbimodule(m)?;
                rep.merge(pair.check());
                let back = infbimodule_from_pair(&pair)?;
                rep.expect(back.same_tables(m), "round-trip", || format!("entry {k}"));
            }
            Ok((
                rep.finish(),
                format!("{} modules, maxArity {corpus_arity}", corpus.len()),
            ))
        })(),
    );

    it.push(
        "bimodule corpus",
        (|| {
            let mut rep = AxiomReport::new();
            let corpus = bimodule_corpus(3, sub_seed(seed, 2), 2, 3)?;
            for (m, eta) in &corpus {
                rep.merge(check_bimodule_axioms(m));
                rep.merge(check_structure_map(m, eta)?);
                let (mo, md, h) = derive_monoid_from_bimodule(m, eta)?;
                rep.merge(check_box_monoid(&mo)?);
                rep.merge(check_box_module(&mo, &md)?);
                rep.merge(check_module_map(&mo, &md, &h));
            }
            Ok((
                rep.finish(),
                format!("{} modules, maxArity 3", corpus.len()),
            ))
        })(),
    );

    let ml = cfg.max_level;
    it.push(
        "loops",
        (|| {
            let (mo, md, h) = loops_example(&LoopData::new(3, &[0, 1])?, ml)?;
            let mut rep = check_box_monoid(&mo)?;
            rep.merge(check_box_module(&mo, &md)?);
            rep.merge(check_module_map(&mo, &md, &h));
            Ok((rep.finish(), format!("|x| = 3, |a| = 2, maxLevel {ml}")))
        })(),
    );

    it.push(
        "box unit laws",
        (|| {
            let mut rep = AxiomReport::new();
            let level = ml.min(corpus_arity);
            for m in infbimodule_corpus(4, sub_seed(seed, 3), 2, corpus_arity)? {
                let x = derive_pair_from_infbimodule(&m)?.closed;
                rep.merge(check_unit_laws(&x.truncate(level))?);
            }
            let e = SemiCosimplicialSet::point(ml);
            let ee = box_product(&e, &e)?.set;
            for n in 0..=ml {
                rep.expect(ee.size(n) == 1, "point-square", || {
                    format!("level {n}: {} classes", ee.size(n))
                });
            }
            Ok((rep.finish(), format!("maxLevel {level}")))
        })(),
    );

    it.push(
        "adjunction",
        (|| {
            let act = builtin_act(false, 3);
            let mut m = FiniteSSequence::two_coloured(3);
            m.insert(profile_closed(1), "m")?;
            m.insert(profile_open(1), "w")?;
            let mut rep = AxiomReport::new();
            let mut pairs = 0;
            for k in 0..2 {
                let n = infbimodule_corpus(1, sub_seed(seed, 10 + k), 2, 3)?.remove(0);
                let r = adjunction_check_ib(&act, &m, &n)?;
                rep.expect(r.free_maps == r.sequence_maps, "ib-count", || {
                    format!("target {k}: {} vs {}", r.free_maps, r.sequence_maps)
                });
                rep.merge(r.triangle);
                let (nb, _) = bimodule_corpus(1, sub_seed(seed, 20 + k), 2, 3)?.remove(0);
                let r = adjunction_check_bimod(&act, &m, &nb)?;
                rep.expect(r.free_maps == r.sequence_maps, "bimod-count", || {
                    format!("target {k}: {} vs {}", r.free_maps, r.sequence_maps)
                });
                rep.merge(r.triangle);
                pairs += 2;
            }
            let free = induced_infbimodule(&OperadMap::identity(&act));
            rep.merge(check_infbimodule_axioms(&free));
            Ok((
                rep.finish(),
                format!("{pairs} targets over the non-unital operad, arity 3"),
            ))
        })(),
    );

    let constraints = ["all", "closed", "min_arity_2", "binary", "tree_o"];
    for con in constraints {
        // unrestricted colourings and unary chains grow fastest
        let top = if matches!(con, "all" | "closed") {
            3
        } else {
            5
        };
        it.push(
            format!("trees {con}"),
            (|| {
                let c = Constraint::parse(con, None)?;
                let mut rep = AxiomReport::new();
                let mut counts = Vec::new();
                for n in 1..=top {
                    let ts = enumerate_trees(n, &c, Caps::default())?;
                    counts.push(ts.len());
                    for t in &ts {
                        let back = Tree::parse(&t.code()).map(|(tree, _)| tree);
                        rep.expect(back.as_ref() == Ok(&t.tree), "code-round-trip", || t.code());
                        rep.expect(t.tree.leaves() == n, "leaf-count", || t.code());
                    }
                }
                Ok((
                    rep.finish(),
                    format!("counts n=1..{top}: {}", join(&counts)),
                ))
            })(),
        );
    }
    {
        let mut rep = AxiomReport::new();
        let mut rows = Vec::new();
        for m in 0..=5 {
            let mut row = Vec::new();
            for n in 0..=5 {
                let ts = ptrees(m, n);
                for t in &ts {
                    rep.expect(
                        t.tree.leaves() == m && t.marks.len() == 1,
                        "pearl-shape",
                        || t.code(),
                    );
                }
                row.push(ts.len());
            }
            rows.push(join(&row));
        }
        let detail = format!("table m,n<=5: {}", rows.join(" / "));
        it.push("pearl trees", Ok((rep.finish(), detail)));
    }

    for colour in Colour::ALL {
        for n in 2..=ma.max(2) {
            it.push(
                format!("face poset n={n} {}", colour.name()),
                (|| {
                    if n > FACE_CAP {
                        return Err(Error::SizeCap {
                            what: "face poset leaves".into(),
                            needed: n as u128,
                            cap: FACE_CAP as u128,
                        });
                    }
                    let p = wa_face_poset(n, colour)?;
                    let mut rep = check_face_poset(&p);
                    let chi = p.euler_characteristic();
                    rep.expect(chi == 1, "euler", || format!("n={n}: {chi}"));
                    Ok((rep.finish(), format!("f-vector {}", join(&p.f_vector()))))
                })(),
            );
        }
    }
    for colour in Colour::ALL {
        for n in 2..=5 {
            it.push(
                format!("subdivision n={n} {}", colour.name()),
                subdivision_audit(n, colour).map(|a| (a.report, format!("{} cells", a.cells))),
            );
        }
    }

    it.push(
        "shadow cofaces",
        check_shadow(4, 50, sub_seed(seed, 30)).map(|r| (r, String::new())),
    );
    it.push(
        "quotient cube well-defined",
        check_tilde_well_defined(5, 200, sub_seed(seed, 31)).map(|r| (r, String::new())),
    );
    it.push(
        "simplex relations",
        check_blacktriangle_relations(2, 50, sub_seed(seed, 32)).map(|r| (r, String::new())),
    );
    it.push(
        "quotient cube relations",
        check_tilde_relations(2, 50, sub_seed(seed, 33)).map(|r| (r, String::new())),
    );
    it.push(
        "cube relations",
        check_square_relations(3, 50, sub_seed(seed, 34), false).map(|r| (r, String::new())),
    );
    it.push(
        "penta quotient",
        check_penta(4, 200, sub_seed(seed, 35)).map(|r| (r, String::new())),
    );

    it.push(
        "x-construction on As",
        (|| {
            let (o, b, alpha, beta) = as_pair(4);
            let input = XInput {
                o: &o,
                b: &b,
                alpha: &alpha,
                beta: &beta,
            };
            let mut rep = check_assumption_13(&input);
            let (x, eta) = x_construction(&input)?;
            rep.merge(check_operad_axioms(&x));
            let act = builtin_act(true, 4);
            rep.expect(OperadMap::verify(&act, &x, &eta).is_ok(), "act-map", || {
                "eta".into()
            });
            rep.expect(x.table_len() == act.table_len(), "act-tables", || {
                format!("{} vs {}", x.table_len(), act.table_len())
            });
            Ok((rep.finish(), "maxArity 4".to_string()))
        })(),
    );
    it.push(
        "x-construction corpus",
        (|| {
            let mut rep = AxiomReport::new();
            let corpus = xcons_corpus(3, sub_seed(seed, 40), 2, 3)?;
            for (o, b, alpha, beta) in &corpus {
                let input = XInput { o, b, alpha, beta };
                rep.merge(check_assumption_13(&input));
                let (x, _) = x_construction(&input)?;
                rep.merge(check_operad_axioms(&x));
            }
            Ok((rep.finish(), format!("{} inputs", corpus.len())))
        })(),
    );

    SuiteReport { seed, items: it.0 }
}
