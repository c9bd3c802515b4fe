//! The `odta` command line. Commands return an exit code and a report so
//! they can be driven in-process as well as from the binary.
//!
//! Exit codes: 0 positive verdict (member, nonempty, sat) or success,
//! 1 negative verdict, 2 unknown or empty within caps, 3 invalid input,
//! 4 I/O failure, 5 usage error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::automata::format::{parse_tree_automaton, write_tree_automaton};
use crate::data::{
    parse_tree, profile, string_representation, value_classes, write_tree, zonal_string_representation, zones, Alphabet, DataTree,
    OrderedDataTree,
};
use crate::data::profile::profile_symbol_name;
use crate::error::Error;
use crate::frontends::{dtd_sat, parse_constraints, parse_dtd, setlin_sat, write_constraints, SatVerdict};
use crate::gen;
use crate::odta::{
    brute_force_odta, brute_force_weak, empty_odta, empty_weak, empty_weak_ext, member_odta, member_weak, member_weak_ext, parse_bundle,
    write_bundle, Bundle, EmptinessCaps, EmptinessReport, EmptinessVerdict, Membership, DEFAULT_MEMBER_BUDGET,
};
use crate::presburger::{Budget, Stats};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_USAGE: i32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One `key: value` line per field.
    Text,
    /// A single tab-separated `key=value` line.
    Record,
}

#[derive(Debug, Parser)]
#[command(name = "odta", version, about = "Ordered-data tree automata: membership, emptiness and frontends")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Seed for generated instances; reported by every command.
    #[arg(long, env = "ODTA_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// LP relaxations per Presburger solve.
    #[arg(long, env = "ODTA_SOLVER_BUDGET", default_value_t = crate::presburger::solver::DEFAULT_BUDGET, global = true)]
    pub solver_budget: u64,
    /// Witness or instance output file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Tree,
    Weak,
    Odta,
    Dtd,
    Automaton,
    Constraints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FmtKind {
    Tree,
    Bundle,
    Automaton,
    Dtd,
    Constraints,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profile tree of a data tree.
    Profile { tree: PathBuf },
    /// Value classes and string representation.
    Strrep { tree: PathBuf },
    /// Zones and zonal string representation.
    Zones { tree: PathBuf },
    /// Membership of a tree in an ODTA bundle.
    Member {
        bundle: PathBuf,
        tree: PathBuf,
        /// Node assignments tried before answering unknown.
        #[arg(long, default_value_t = DEFAULT_MEMBER_BUDGET)]
        member_budget: u64,
    },
    /// Emptiness of an ODTA bundle.
    Empty {
        bundle: PathBuf,
        #[command(flatten)]
        caps: CapFlags,
    },
    /// Satisfiability of a DTD with key, inclusion and set constraints.
    Dtdsat {
        dtd: PathBuf,
        constraints: PathBuf,
        #[command(flatten)]
        caps: CapFlags,
        #[arg(long, default_value_t = crate::frontends::dtd::DEFAULT_MAX_CHAINS)]
        max_chains: usize,
    },
    /// Satisfiability of a tree automaton with set and linear constraints.
    Setlin {
        automaton: PathBuf,
        constraints: PathBuf,
        #[command(flatten)]
        caps: CapFlags,
    },
    /// Random instance, deterministic in --seed.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 4)]
        size: usize,
    },
    /// Parses a file and writes it back in canonical form.
    Fmt {
        #[arg(value_enum)]
        kind: FmtKind,
        file: PathBuf,
        /// Alphabet of a constraints file, comma separated.
        #[arg(long, value_delimiter = ',')]
        alphabet: Vec<String>,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct CapFlags {
    /// Size bound of the fallback exhaustive search (0 disables it).
    #[arg(long, default_value_t = 0)]
    pub max_nodes: usize,
    /// Distinct values in the fallback search; defaults to --max-nodes.
    #[arg(long)]
    pub max_values: Option<usize>,
    #[arg(long, default_value_t = crate::odta::DEFAULT_ZONE_CAP)]
    pub zone_cap: usize,
    /// Largest constant pool guessed by full ODTA emptiness.
    #[arg(long, default_value_t = EmptinessCaps::default().max_constants)]
    pub constant_cap: usize,
}

impl CapFlags {
    fn caps(&self, solver_budget: u64) -> EmptinessCaps {
        EmptinessCaps { solver: Budget::new(solver_budget), zone_cap: self.zone_cap, max_constants: self.constant_cap, ..EmptinessCaps::default() }
    }

    fn max_values(&self) -> usize {
        self.max_values.unwrap_or(self.max_nodes)
    }
}

/// Result of one command: exit code, report, and diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Fields of a command's report, in output order. `wall-time-ms` is the
/// only field that varies between identical runs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunReport {
    pub fields: Vec<(String, String)>,
}

impl RunReport {
    fn push(&mut self, k: &str, v: impl ToString) {
        self.fields.push((k.to_string(), v.to_string()));
    }

    pub fn get(&self, k: &str) -> Option<&str> {
        self.fields.iter().find(|(a, _)| a == k).map(|(_, b)| b.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.fields.iter().map(|(k, v)| format!("{k}: {v}\n")).collect(),
            Format::Record => {
                let parts: Vec<String> = self.fields.iter().map(|(k, v)| format!("{k}={}", v.replace(['\t', '\n'], " "))).collect();
                parts.join("\t") + "\n"
            }
        }
    }

    /// Parses the text form back.
    pub fn parse(text: &str) -> RunReport {
        let fields = text
            .lines()
            .filter_map(|l| l.split_once(": ").map(|(k, v)| (k.to_string(), v.to_string())))
            .collect();
        RunReport { fields }
    }
}

enum Failure {
    Input(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn read(p: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))
}

fn write_out(p: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match p {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => Ok(()),
    }
}

fn stats_field(s: &Stats) -> String {
    format!(
        "lp-solves={} bb-nodes={} disjunctions={} conflicts={}",
        s.lp_solves, s.bb_nodes, s.disjunction_branches, s.propagation_conflicts
    )
}

fn caps_field(c: &EmptinessCaps, flags: &CapFlags) -> String {
    format!(
        "solver-budget={} zone-cap={} constant-cap={} max-class-size={} max-zones={} max-free-children={} max-bundles={} max-nodes={} max-values={}",
        c.solver.lp_solves,
        c.zone_cap,
        c.max_constants,
        c.max_class_size,
        c.max_zones,
        c.max_free_children,
        c.max_bundles,
        flags.max_nodes,
        flags.max_values()
    )
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let mut report = RunReport::default();
    match dispatch(cli, &mut report) {
        Ok((code, extra)) => {
            report.push("seed", cli.seed);
            report.push("wall-time-ms", start.elapsed().as_millis());
            let stdout = match extra {
                Some(body) => body,
                None => report.render(cli.format),
            };
            Outcome { code, stdout, stderr: String::new() }
        }
        Err(Failure::Input(e)) => Outcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {e}\nerror-code: {}\n", e.code()) },
        Err(Failure::Io(m)) => Outcome { code: EXIT_IO, stdout: String::new(), stderr: format!("error: {m}\n") },
    }
}

/// Exit code, and a body that replaces the report (gen and fmt).
fn dispatch(cli: &Cli, r: &mut RunReport) -> Result<(i32, Option<String>), Failure> {
    match &cli.command {
        Command::Profile { tree } => {
            let t = parse_tree(&read(tree)?, None)?;
            let p = profile(&t);
            r.push("command", "profile");
            r.push("nodes", t.len());
            let names: Vec<String> = (0..t.len()).map(|u| profile_symbol_name(t.label_name(u), p.triples[u])).collect();
            let prof = Alphabet::new(dedup(&names))?;
            let labels = names.iter().map(|n| prof.lookup(n)).collect::<crate::Result<Vec<_>>>()?;
            let shown = DataTree::new(prof, t.shape().clone(), labels, t.values().to_vec())?;
            r.push("profile", write_tree(&shown));
            Ok((0, None))
        }
        Command::Strrep { tree } => {
            let t = parse_tree(&read(tree)?, None)?;
            r.push("command", "strrep");
            let parts: Vec<String> = value_classes(&t)
                .iter()
                .map(|(s, vs)| {
                    let vs: Vec<String> = vs.iter().map(u64::to_string).collect();
                    format!("{}={}", t.alphabet().render_set(*s), vs.join(","))
                })
                .collect();
            r.push("classes", parts.join("; "));
            r.push("word", string_representation(&t).render());
            Ok((0, None))
        }
        Command::Zones { tree } => {
            let t = parse_tree(&read(tree)?, None)?;
            let zp = zones(&t);
            r.push("command", "zones");
            r.push("zones", zp.zones.len());
            for (i, z) in zp.zones.iter().enumerate() {
                let nodes: Vec<String> = z.members.iter().map(usize::to_string).collect();
                r.push(
                    "zone",
                    format!("id={i} value={} labels={} nodes={} outdegree={}", z.value, t.alphabet().render_set(z.labels), nodes.join(","), z.outdegree),
                );
            }
            r.push("zonal-word", zonal_string_representation(&t).render());
            Ok((0, None))
        }
        Command::Member { bundle, tree, member_budget } => {
            let b = parse_bundle(&read(bundle)?)?;
            let sigma = input_alphabet(&b);
            let t = parse_tree(&read(tree)?, Some(&sigma))?;
            let solver = Budget::new(cli.solver_budget);
            let m = match &b {
                Bundle::Weak(w) => member_weak(w, &t, *member_budget)?,
                Bundle::Extended(e) => member_weak_ext(e, &t, *member_budget, solver)?,
                Bundle::Odta(o) => member_odta(o, &t, *member_budget)?,
            };
            r.push("command", "member");
            r.push("kind", b.kind());
            r.push("verdict", m.name());
            if let Membership::Member(out) = &m {
                let shown = DataTree::new(b.output().clone(), t.shape().clone(), out.clone(), t.values().to_vec())?;
                r.push("witness", write_tree(&shown));
            }
            r.push("caps", format!("member-budget={member_budget} solver-budget={}", cli.solver_budget));
            Ok((
                match m {
                    Membership::Member(_) => EXIT_POSITIVE,
                    Membership::NonMember => EXIT_NEGATIVE,
                    Membership::Unknown => EXIT_UNKNOWN,
                },
                None,
            ))
        }
        Command::Empty { bundle, caps } => {
            let b = parse_bundle(&read(bundle)?)?;
            let c = caps.caps(cli.solver_budget);
            let mut rep = match &b {
                Bundle::Weak(w) => empty_weak(w, &c)?,
                Bundle::Extended(e) => empty_weak_ext(e, &c)?,
                Bundle::Odta(o) => empty_odta(o, &c)?,
            };
            let mut source = "decision-procedure";
            if rep.verdict == EmptinessVerdict::EmptyWithinCaps && caps.max_nodes > 0 {
                if let Some(w) = fallback_search(&b, caps)? {
                    rep.verdict = EmptinessVerdict::Nonempty { witness: w, certificate: empty_certificate(&b) };
                    source = "bounded-search";
                }
            }
            r.push("command", "empty");
            r.push("kind", b.kind());
            emptiness_fields(r, &rep, source, &cli.out)?;
            r.push("caps", caps_field(&c, caps));
            r.push("stats", stats_field(&rep.stats));
            Ok((emptiness_code(&rep.verdict), None))
        }
        Command::Dtdsat { dtd, constraints, caps, max_chains } => {
            let d = parse_dtd(&read(dtd)?)?;
            let cs = parse_constraints(&read(constraints)?, d.alphabet())?;
            let c = caps.caps(cli.solver_budget);
            let rep = dtd_sat(&d, &cs, &c, *max_chains)?;
            r.push("command", "dtdsat");
            r.push("verdict", rep.verdict.name());
            let code = match &rep.verdict {
                SatVerdict::Sat { witness, chain } => {
                    let w = write_tree(witness);
                    r.push("witness", &w);
                    let parts: Vec<String> = chain.iter().map(|s| d.alphabet().render_set(*s)).collect();
                    r.push("chain", parts.join(" "));
                    write_out(&cli.out, &(w + "\n"))?;
                    EXIT_POSITIVE
                }
                SatVerdict::Unsat => EXIT_NEGATIVE,
                SatVerdict::Unknown => EXIT_UNKNOWN,
            };
            r.push("chains-tried", rep.chains_tried);
            r.push("chains-total", rep.chains_total);
            r.push("caps", format!("{} max-chains={max_chains}", caps_field(&c, caps)));
            r.push("stats", stats_field(&rep.stats));
            Ok((code, None))
        }
        Command::Setlin { automaton, constraints, caps } => {
            let a = parse_tree_automaton(&read(automaton)?)?;
            let cs = parse_constraints(&read(constraints)?, a.alphabet())?;
            let c = caps.caps(cli.solver_budget);
            let mut rep = setlin_sat(&a, &cs, &c)?;
            let mut source = "decision-procedure";
            if rep.verdict == EmptinessVerdict::EmptyWithinCaps && caps.max_nodes > 0 {
                if let Some(w) = crate::frontends::oracle::brute_force_setlin(&a, &cs, caps.max_nodes, caps.max_values()) {
                    rep.verdict = EmptinessVerdict::Nonempty { witness: w, certificate: plain_certificate(a.alphabet()) };
                    source = "bounded-search";
                }
            }
            r.push("command", "setlin");
            emptiness_fields(r, &rep, source, &cli.out)?;
            r.push("caps", caps_field(&c, caps));
            r.push("stats", stats_field(&rep.stats));
            Ok((emptiness_code(&rep.verdict), None))
        }
        Command::Gen { kind, size } => {
            let text = generate(*kind, *size, cli.seed)?;
            match &cli.out {
                Some(_) => {
                    write_out(&cli.out, &text)?;
                    r.push("command", "gen");
                    r.push("kind", format!("{kind:?}").to_lowercase());
                    r.push("size", size);
                    Ok((0, None))
                }
                None => Ok((0, Some(text))),
            }
        }
        Command::Fmt { kind, file, alphabet } => {
            let text = canonical(*kind, &read(file)?, alphabet)?;
            match &cli.out {
                Some(_) => {
                    write_out(&cli.out, &text)?;
                    r.push("command", "fmt");
                    Ok((0, None))
                }
                None => Ok((0, Some(text))),
            }
        }
    }
}

fn dedup(names: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for n in names {
        if !out.contains(n) {
            out.push(n.clone());
        }
    }
    out
}

fn input_alphabet(b: &Bundle) -> Alphabet {
    match b {
        Bundle::Weak(w) => w.input().clone(),
        Bundle::Extended(e) => e.base.input().clone(),
        Bundle::Odta(o) => o.sigma().clone(),
    }
}

fn fallback_search(b: &Bundle, caps: &CapFlags) -> Result<Option<OrderedDataTree>, Failure> {
    Ok(match b {
        Bundle::Weak(w) => brute_force_weak(w, caps.max_nodes, caps.max_values()),
        Bundle::Odta(o) => brute_force_odta(o, caps.max_nodes, caps.max_values()),
        // no exhaustive search over Presburger side conditions
        Bundle::Extended(_) => None,
    })
}

fn plain_certificate(a: &Alphabet) -> crate::odta::Certificate {
    crate::odta::Certificate { output_alphabet: a.clone(), output: Vec::new(), run: Vec::new(), value_word: Vec::new() }
}

fn empty_certificate(b: &Bundle) -> crate::odta::Certificate {
    plain_certificate(b.output())
}

fn emptiness_fields(r: &mut RunReport, rep: &EmptinessReport, source: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    r.push("verdict", rep.verdict.name());
    if let EmptinessVerdict::Nonempty { witness, certificate } = &rep.verdict {
        let w = write_tree(witness);
        r.push("witness", &w);
        r.push("witness-source", source);
        if !certificate.value_word.is_empty() {
            r.push("value-word", certificate.render_value_word());
        }
        write_out(out, &(w + "\n"))?;
    }
    for (k, v) in &rep.notes {
        r.push(k, v);
    }
    Ok(())
}

fn emptiness_code(v: &EmptinessVerdict) -> i32 {
    match v {
        EmptinessVerdict::Nonempty { .. } => EXIT_POSITIVE,
        EmptinessVerdict::Empty => EXIT_NEGATIVE,
        EmptinessVerdict::EmptyWithinCaps => EXIT_UNKNOWN,
    }
}

/// Generated instance text; already in canonical form.
pub fn generate(kind: GenKind, size: usize, seed: u64) -> crate::Result<String> {
    let mut rng = gen::rng(seed);
    let size = size.max(1);
    let sigma = gen::symbols("s", 2);
    let mut text = match kind {
        GenKind::Tree => write_tree(&gen::random_tree(&mut rng, &gen::symbols("s", 3), size, size as u64)),
        GenKind::Weak => write_bundle(&Bundle::Weak(gen::random_weak_odta(&mut rng, size.min(4), &sigma, 2)))?,
        GenKind::Odta => write_bundle(&Bundle::Odta(gen::random_odta(&mut rng, size.min(4), &sigma, 2)))?,
        GenKind::Dtd => gen::random_dtd(&mut rng, size.min(8)).render(),
        GenKind::Automaton => write_tree_automaton(&gen::random_tree_automaton(&mut rng, size.min(6), &sigma)),
        GenKind::Constraints => {
            let n = size.min(4);
            write_constraints(&gen::random_setlin(&mut rng, n), &gen::symbols("s", n))
        }
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    Ok(text)
}

/// Parses `text` as `kind` and serializes it again.
pub fn canonical(kind: FmtKind, text: &str, alphabet: &[String]) -> crate::Result<String> {
    let mut out = match kind {
        FmtKind::Tree => write_tree(&parse_tree(text, None)?),
        FmtKind::Bundle => write_bundle(&parse_bundle(text)?)?,
        FmtKind::Automaton => write_tree_automaton(&parse_tree_automaton(text)?),
        FmtKind::Dtd => parse_dtd(text)?.render(),
        FmtKind::Constraints => {
            if alphabet.is_empty() {
                return Err(Error::Invalid("constraints need --alphabet".into()));
            }
            let sigma = Alphabet::new(alphabet.iter().cloned())?;
            write_constraints(&parse_constraints(text, &sigma)?, &sigma)
        }
    };
    if !out.ends_with('\n') {
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_formats() {
        let mut r = RunReport::default();
        r.push("verdict", "member");
        r.push("witness", "(a@1 (b@2))");
        assert_eq!(r.render(Format::Text), "verdict: member\nwitness: (a@1 (b@2))\n");
        assert_eq!(r.render(Format::Record), "verdict=member\twitness=(a@1 (b@2))\n");
        assert_eq!(RunReport::parse(&r.render(Format::Text)), r);
    }

    #[test]
    fn usage_errors_do_not_collide_with_verdicts() {
        assert_eq!(run(["odta", "frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run(["odta", "member", "only-one-file"]).code, EXIT_USAGE);
        assert_eq!(run(["odta", "--help"]).code, 0);
        assert_eq!(run(["odta", "member", "/nonexistent/a", "/nonexistent/b"]).code, EXIT_IO);
    }

    #[test]
    fn generated_text_is_canonical() {
        for kind in [GenKind::Tree, GenKind::Weak, GenKind::Odta, GenKind::Dtd, GenKind::Automaton] {
            let fk = match kind {
                GenKind::Tree => FmtKind::Tree,
                GenKind::Weak | GenKind::Odta => FmtKind::Bundle,
                GenKind::Dtd => FmtKind::Dtd,
                _ => FmtKind::Automaton,
            };
            for seed in 0..5 {
                let g = generate(kind, 3, seed).unwrap();
                assert_eq!(canonical(fk, &g, &[]).unwrap(), g);
                assert_eq!(generate(kind, 3, seed).unwrap(), g);
            }
        }
        assert!(matches!(canonical(FmtKind::Constraints, "key(s0)", &[]), Err(Error::Invalid(_))));
    }
}
