//! Command-line front end: exact JSON in and out, plus the acceptance harness.

pub mod grammar;
pub mod harness;
pub mod manifest;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fnconf::confining::{catalog, ConfCtx, ConfError};
use fnconf::exactnum::{parse_rational, rat, NumError, Rational};
use fnconf::lamplighter::{
    lamp_axiom_check, lamp_compare, lamp_member, nonsplit_certificate, xi_section, xi_t,
    FreeAbelianLamp, IntLamp, LampElt, LampError, LampGroup,
};
use fnconf::nonlamplike::{
    good_odd_set, moving_witness, qs_check, qs_compare, stilde, NlError, TauSequence,
};
use fnconf::plmap::{compose, standard_generators, PLMap, PlError};
use fnconf::treesim::{tree_ball, HNNData, TreeError};
use fnconf::verdict::{Budget, Verdict};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use grammar::{format_family, format_lamp_family, parse_family, parse_lamp_family, GrammarError};
use manifest::{sha256_hex, Manifest, Report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error("{path}: line {line}, column {column}: {msg}")]
    Json {
        path: String,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{path}: invalid value: {msg}")]
    Invalid { path: String, msg: String },
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("invalid rational {0:?}: {1}")]
    Rational(String, NumError),
    #[error(transparent)]
    Pl(#[from] PlError),
    #[error(transparent)]
    Conf(#[from] ConfError),
    #[error(transparent)]
    Lamp(#[from] LampError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Nl(#[from] NlError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "fnconf", version, about = "Confining subsets of F_n, lamplighters and tree actions")]
pub struct Cli {
    /// Base n of F_n.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: u32,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Exit with 2 when a verdict is not Dominates or a harness criterion fails.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Number of samples per check.
    #[arg(long, global = true, default_value_t = 200)]
    pub budget: usize,
    #[arg(long, global = true, default_value_t = 32)]
    pub k_max: u64,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// PL maps. ELT is a JSON file, `id`, `alpha` or `gen:i`.
    #[command(subcommand)]
    Elt(EltCmd),
    /// Confining families, given as literals such as `rigidstab:1/4`.
    #[command(subcommand)]
    Conf(ConfCmd),
    /// Lamplighter families such as `machado:1` or `subgroup:coords:fin{1,3}`.
    #[command(subcommand)]
    Lamp(LampCmd),
    /// The Bass–Serre tree with base F_n[t,1].
    #[command(subcommand)]
    Tree(TreeCmd),
    #[command(subcommand)]
    Nonlamplike(NlCmd),
    #[command(subcommand)]
    Harness(HarnessCmd),
}

#[derive(Debug, Subcommand)]
pub enum EltCmd {
    Compose { f: String, g: String },
    Invert { f: String },
    Eval { f: String, x: String },
    Chars { f: String },
    Canonical { f: String },
    Generators,
}

#[derive(Debug, Subcommand)]
pub enum ConfCmd {
    Parse { family: String },
    Member { family: String, elt: String },
    Axioms { family: String },
    Compare { f1: String, f2: String },
    Largest { family: String },
    Fixed {
        family: String,
        #[arg(long, default_value_t = -8, allow_hyphen_values = true)]
        k_min: i64,
    },
    Catalog,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GroupArg {
    Int,
    Free,
}

#[derive(Debug, Args)]
pub struct GroupOpt {
    #[arg(long, value_enum, default_value = "int")]
    pub group: GroupArg,
}

#[derive(Debug, Subcommand)]
pub enum LampCmd {
    Parse { family: String },
    Member {
        family: String,
        elt: String,
        #[command(flatten)]
        g: GroupOpt,
    },
    Axioms {
        family: String,
        #[command(flatten)]
        g: GroupOpt,
    },
    Compare {
        f1: String,
        f2: String,
        #[command(flatten)]
        g: GroupOpt,
    },
    Nonsplit {
        #[arg(long, default_value_t = 16)]
        p_max: u64,
    },
    /// ξ^t of an element fixing the a-orbit of t.
    Xi {
        elt: String,
        #[arg(long, default_value = "1/3")]
        t: String,
    },
    /// An element with ξ^t equal to the given `k:c,k:c` vector.
    Section {
        vector: String,
        #[arg(long, default_value = "1/3")]
        t: String,
    },
}

#[derive(Debug, Args)]
pub struct TreeOpt {
    /// Base point; defaults to 1/n².
    #[arg(long)]
    pub t: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum TreeCmd {
    Dist {
        elt: String,
        #[command(flatten)]
        o: TreeOpt,
    },
    Type {
        elt: String,
        #[arg(long, default_value_t = 4)]
        m: u64,
        #[command(flatten)]
        o: TreeOpt,
    },
    Busemann {
        elt: String,
        #[arg(long, default_value_t = 16)]
        m: u64,
        #[command(flatten)]
        o: TreeOpt,
    },
    Ball {
        #[arg(long, default_value_t = 3)]
        depth: u64,
        #[command(flatten)]
        o: TreeOpt,
    },
}

#[derive(Debug, Subcommand)]
pub enum NlCmd {
    OddSet {
        #[arg(long, default_value_t = 4)]
        count: usize,
    },
    Stilde {
        #[arg(long, default_value = "3")]
        s: String,
        #[arg(long, default_value_t = 200)]
        bound: u64,
    },
    Member {
        elt: String,
        #[arg(long, default_value = "3")]
        s: String,
    },
    Witness {
        t: String,
    },
    Compare {
        s: String,
        r: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum HarnessCmd {
    All,
    /// A single criterion, 1 to 12.
    Only { id: u8 },
    /// Reruns the manifest of a saved report and compares bytes.
    Replay { report: String },
}

struct Outcome {
    command: &'static str,
    result: Value,
    /// False when --strict should turn the run into exit code 2.
    affirmative: bool,
}

impl Outcome {
    fn plain(command: &'static str, result: impl Serialize) -> Result<Self, CliError> {
        Ok(Outcome {
            command,
            result: to_value(result),
            affirmative: true,
        })
    }

    fn verdict<W: Serialize>(command: &'static str, v: &Verdict<W>) -> Result<Self, CliError> {
        Ok(Outcome {
            command,
            result: to_value(v),
            affirmative: v.dominates().is_some(),
        })
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

struct Ctx {
    n: u32,
    budget: Budget,
    inputs: BTreeMap<String, String>,
}

impl Ctx {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.into(),
            msg: e.to_string(),
        })?;
        self.inputs.insert(path.into(), sha256_hex(text.as_bytes()));
        Ok(text)
    }

    fn json<T: DeserializeOwned>(&mut self, path: &str) -> Result<T, CliError> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| json_error(path, e))
    }

    fn elt(&mut self, spec: &str) -> Result<PLMap, CliError> {
        match spec {
            "id" => Ok(PLMap::identity(self.n)),
            "alpha" => Ok(PLMap::alpha(self.n)),
            _ => {
                if let Some(i) = spec.strip_prefix("gen:") {
                    let gens = standard_generators(self.n)?;
                    let i: usize = i
                        .parse()
                        .map_err(|_| CliError::Usage(format!("bad generator index {i:?}")))?;
                    return gens
                        .maps
                        .get(i)
                        .cloned()
                        .ok_or_else(|| CliError::Usage(format!("no generator a_{i} for n = {}", self.n)));
                }
                let g: PLMap = self.json(spec)?;
                if g.n() != self.n {
                    return Err(CliError::Usage(format!(
                        "{spec} has base {}, --n is {}",
                        g.n(),
                        self.n
                    )));
                }
                Ok(g)
            }
        }
    }

    fn tree(&self, o: &TreeOpt) -> Result<HNNData, CliError> {
        let t = match &o.t {
            Some(s) => rational(s)?,
            None => rat(1, (self.n * self.n) as i64),
        };
        Ok(HNNData::new(self.n, &t)?)
    }
}

/// Syntax errors carry a position; values rejected by a type's invariants do not.
fn json_error(path: &str, e: serde_json::Error) -> CliError {
    if e.line() == 0 {
        CliError::Invalid {
            path: path.into(),
            msg: e.to_string(),
        }
    } else {
        CliError::Json {
            path: path.into(),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }
}

fn rational(s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::Rational(s.into(), e))
}

fn int_list(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad integer {x:?} in {s:?}")))
        })
        .collect()
}

fn vector(s: &str) -> Result<BTreeMap<i64, i64>, CliError> {
    let bad = || CliError::Usage(format!("vector {s:?} should look like -2:1,0:3"));
    let mut v = BTreeMap::new();
    for part in s.split(',').filter(|x| !x.is_empty()) {
        let (k, c) = part.split_once(':').ok_or_else(bad)?;
        v.insert(k.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?);
    }
    Ok(v)
}

fn lamp_cmd<G: LampGroup>(g: &G, cmd: &LampCmd, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    match cmd {
        LampCmd::Member { family, elt, .. } => {
            let f = parse_lamp_family(family)?;
            let u: LampElt<G::Elt> = ctx.json(elt)?;
            Outcome::plain("lamp member", json!({ "member": lamp_member(g, &u, &f)? }))
        }
        LampCmd::Axioms { family, .. } => {
            let f = parse_lamp_family(family)?;
            let r = lamp_axiom_check(g, &f, &ctx.budget)?;
            Ok(Outcome {
                command: "lamp axioms",
                affirmative: r.passed(),
                result: json!({ "passed": r.passed(), "report": r }),
            })
        }
        LampCmd::Compare { f1, f2, .. } => {
            let (a, b) = (parse_lamp_family(f1)?, parse_lamp_family(f2)?);
            Outcome::verdict("lamp compare", &lamp_compare(g, &a, &b, &ctx.budget)?)
        }
        _ => unreachable!("group-free lamp commands are handled by the caller"),
    }
}

fn execute(cli: &Cli, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let n = cli.n;
    let budget = ctx.budget;
    match &cli.cmd {
        Cmd::Elt(c) => match c {
            EltCmd::Compose { f, g } => {
                let (f, g) = (ctx.elt(f)?, ctx.elt(g)?);
                Outcome::plain("elt compose", compose(&f, &g)?)
            }
            EltCmd::Invert { f } => Outcome::plain("elt invert", ctx.elt(f)?.invert()),
            EltCmd::Eval { f, x } => {
                let g = ctx.elt(f)?;
                let y = g.evaluate(&rational(x)?)?;
                Outcome::plain("elt eval", json!({ "value": y.to_string() }))
            }
            EltCmd::Chars { f } => {
                let g = ctx.elt(f)?;
                let chars = if g.orientation() == 1 {
                    json!({ "chi0": g.chi0()?, "chi1": g.chi1()?, "epsilon": 1 })
                } else {
                    json!({ "epsilon": -1 })
                };
                Outcome::plain("elt chars", chars)
            }
            EltCmd::Canonical { f } => Outcome::plain("elt canonical", ctx.elt(f)?),
            EltCmd::Generators => Outcome::plain("elt generators", standard_generators(n)?),
        },
        Cmd::Conf(c) => {
            let cc = ConfCtx::new(n)?;
            match c {
                ConfCmd::Parse { family } => {
                    let f = parse_family(family, n)?;
                    Outcome::plain("conf parse", json!({ "literal": format_family(&f), "family": f }))
                }
                ConfCmd::Member { family, elt } => {
                    let f = parse_family(family, n)?;
                    let g = ctx.elt(elt)?;
                    Outcome::plain("conf member", json!({ "member": cc.member(&g, &f)? }))
                }
                ConfCmd::Axioms { family } => {
                    let r = cc.axiom_check(&parse_family(family, n)?, &budget)?;
                    Ok(Outcome {
                        command: "conf axioms",
                        affirmative: r.passed(),
                        result: json!({ "passed": r.passed(), "report": r }),
                    })
                }
                ConfCmd::Compare { f1, f2 } => {
                    let (a, b) = (parse_family(f1, n)?, parse_family(f2, n)?);
                    let v = cc.compare(&a, &b, &budget)?;
                    let back = cc.compare(&b, &a, &budget)?;
                    Ok(Outcome {
                        command: "conf compare",
                        affirmative: v.dominates().is_some(),
                        result: json!({ "forward": v, "backward": back }),
                    })
                }
                ConfCmd::Largest { family } => Outcome::plain(
                    "conf largest",
                    cc.largest_element_witness(&parse_family(family, n)?, &budget)?,
                ),
                ConfCmd::Fixed { family, k_min } => Outcome::plain(
                    "conf fixed",
                    cc.global_fixed_points(&parse_family(family, n)?, *k_min, &budget)?,
                ),
                ConfCmd::Catalog => {
                    let names: Vec<String> = catalog(n).iter().map(format_family).collect();
                    Outcome::plain("conf catalog", names)
                }
            }
        }
        Cmd::Lamp(c) => match c {
            LampCmd::Parse { family } => {
                let f = parse_lamp_family(family)?;
                Outcome::plain(
                    "lamp parse",
                    json!({ "literal": format_lamp_family(&f), "family": f }),
                )
            }
            LampCmd::Nonsplit { p_max } => {
                let cert = nonsplit_certificate(*p_max, &budget)?;
                Ok(Outcome {
                    command: "lamp nonsplit",
                    affirmative: cert.holds,
                    result: to_value(cert),
                })
            }
            LampCmd::Xi { elt, t } => {
                let g = ctx.elt(elt)?;
                let v = xi_t(&g, &rational(t)?, None)?;
                Outcome::plain("lamp xi", json!({ "xi": v }))
            }
            LampCmd::Section { vector: v, t } => {
                Outcome::plain("lamp section", xi_section(&vector(v)?, &rational(t)?, n)?)
            }
            LampCmd::Member { g, .. } | LampCmd::Axioms { g, .. } | LampCmd::Compare { g, .. } => {
                match g.group {
                    GroupArg::Int => lamp_cmd(&IntLamp, c, ctx),
                    GroupArg::Free => lamp_cmd(&FreeAbelianLamp, c, ctx),
                }
            }
        },
        Cmd::Tree(c) => match c {
            TreeCmd::Dist { elt, o } => {
                let h = ctx.tree(o)?;
                let g = ctx.elt(elt)?;
                let mut ball = tree_ball(&h, 2)?;
                Outcome::plain("tree dist", h.tree_distance_checked(&g, &mut ball)?)
            }
            TreeCmd::Type { elt, m, o } => {
                let h = ctx.tree(o)?;
                let g = ctx.elt(elt)?;
                Outcome::plain("tree type", h.translation_length(&g, *m)?)
            }
            TreeCmd::Busemann { elt, m, o } => {
                let h = ctx.tree(o)?;
                let g = ctx.elt(elt)?;
                let r = h.busemann_estimate(&g, *m)?;
                Ok(Outcome {
                    command: "tree busemann",
                    affirmative: r.stabilized,
                    result: json!({ "ray_direction": h.ray_direction(), "report": r }),
                })
            }
            TreeCmd::Ball { depth, o } => {
                let h = ctx.tree(o)?;
                Outcome::plain("tree ball", tree_ball(&h, *depth)?.summary())
            }
        },
        Cmd::Nonlamplike(c) => {
            let tau = TauSequence::new(n);
            match c {
                NlCmd::OddSet { count } => {
                    Outcome::plain("nonlamplike odd-set", good_odd_set(*count)?.elements)
                }
                NlCmd::Stilde { s, bound } => {
                    Outcome::plain("nonlamplike stilde", stilde(&int_list(s)?, *bound))
                }
                NlCmd::Member { elt, s } => {
                    let g = ctx.elt(elt)?;
                    let r = qs_check(&g, &int_list(s)?, &tau)?;
                    Outcome::plain("nonlamplike member", r)
                }
                NlCmd::Witness { t } => {
                    let t = rational(t)?;
                    let g = moving_witness(&t, &tau);
                    Outcome::plain("nonlamplike witness", json!({ "witness": g, "image": g.apply(&t).to_string() }))
                }
                NlCmd::Compare { s, r } => Outcome::verdict(
                    "nonlamplike compare",
                    &qs_compare(&int_list(s)?, &int_list(r)?, &tau, &budget)?,
                ),
            }
        }
        Cmd::Harness(c) => match c {
            HarnessCmd::All => {
                let crit = harness::run_all(cli.seed);
                let all = crit.iter().all(|c| c.passed);
                Ok(Outcome {
                    command: "harness all",
                    affirmative: all,
                    result: json!({ "passed": all, "criteria": crit }),
                })
            }
            HarnessCmd::Only { id } => {
                let c = harness::run_criterion(*id, cli.seed)
                    .ok_or_else(|| CliError::Usage(format!("no criterion {id}")))?;
                Ok(Outcome {
                    command: "harness only",
                    affirmative: c.passed,
                    result: to_value(c),
                })
            }
            HarnessCmd::Replay { report } => {
                let text = ctx.read(report)?;
                let old: Report<Value> =
                    serde_json::from_str(&text).map_err(|e| json_error(report, e))?;
                let mut argv = vec!["fnconf".to_string()];
                argv.extend(old.manifest.argv.iter().cloned());
                let mut out = Vec::new();
                let mut err = Vec::new();
                let code = run_with(argv, &mut out, &mut err);
                let identical = out == text.as_bytes();
                Ok(Outcome {
                    command: "harness replay",
                    affirmative: identical,
                    result: json!({ "replayed": old.manifest.command, "exit_code": code, "identical": identical }),
                })
            }
        },
    }
}

/// Parses `args` (program name first), writes JSON to `out` and diagnostics to `err`, and
/// returns the exit code: 0 on success, 1 on errors, 2 for a negative answer under --strict.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                0
            } else {
                let _ = write!(err, "{e}");
                1
            };
        }
    };
    let budget = Budget {
        samples: cli.budget,
        k_max: cli.k_max,
        seed: cli.seed,
        ..Budget::default()
    };
    let mut ctx = Ctx {
        n: cli.n,
        budget,
        inputs: BTreeMap::new(),
    };
    match execute(&cli, &mut ctx) {
        Ok(o) => {
            let manifest = Manifest {
                command: o.command.into(),
                argv: args[1..].iter().map(|a| a.to_string_lossy().into_owned()).collect(),
                n: cli.n,
                seed: cli.seed,
                strict: cli.strict,
                budget,
                version: env!("CARGO_PKG_VERSION").into(),
                inputs: ctx.inputs,
            };
            let report = Report {
                manifest,
                result: o.result,
            };
            let text = serde_json::to_string_pretty(&report).expect("reports serialize");
            let _ = writeln!(out, "{text}");
            if cli.strict && !o.affirmative {
                2
            } else {
                0
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
