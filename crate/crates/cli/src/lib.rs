//! The `cfcoalg` command line: parsing, dispatch and output formatting.
//!
//! [`run`] takes the argument list and returns the exit code together with
//! everything that would be written to stdout and stderr, so the binary is a
//! thin wrapper and tests can drive the whole front end in process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cfcoalg::equivalence::bisim_search;
use cfcoalg::muexpr::{alpha_unique, canonical_assignment, close, deconstruct, term_to_mu};
use cfcoalg::powerset_ext::{check_semiring_agreement, WeakGnfSystem};
use cfcoalg::syntax::{
    detect, parse_grammar, parse_mu, parse_polynomial_over, parse_term, parse_terms, print_grammar, print_mu,
    print_terms,
};
use cfcoalg::terms::{induced_grammar_system, translate_f, translate_g};
use cfcoalg::{
    word_equiv, Boolean, EquivResult, Error, Evidence, FileKind, GrammarFile, MuFile, Natural, Semiring, SemiringKind,
    State, TermSystem, TermsFile,
};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod builtin;

/// Exit code for malformed input, usage errors and domain errors.
pub const EXIT_ERROR: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cfcoalg",
    version,
    about = "Derivatives, membership and equivalence for context-free coalgebras"
)]
pub struct Cli {
    /// Coefficient semiring. Defaults to the input file's header, then `bool`.
    #[arg(long, global = true, value_enum)]
    pub semiring: Option<SemiringArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum SemiringArg {
    Bool,
    Nat,
}

impl From<SemiringArg> for SemiringKind {
    fn from(s: SemiringArg) -> Self {
        match s {
            SemiringArg::Bool => SemiringKind::Bool,
            SemiringArg::Nat => SemiringKind::Nat,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Grammar,
    Terms,
    Mu,
}

impl From<Format> for FileKind {
    fn from(f: Format) -> Self {
        match f {
            Format::Grammar => FileKind::Grammar,
            Format::Terms => FileKind::Terms,
            Format::Mu => FileKind::Mu,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Mode {
    /// Compare coefficients of all words up to `--bound`.
    Word,
    /// Search for a bisimulation up to `+` with at most `--bound` pairs.
    Bisim,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Demo {
    /// First `n` coefficients of `x` with `o(x) = 1`, `x_a = x x`.
    Catalan,
    /// The language `{aⁿbⁿ}` up to length `n`.
    Anbn,
    /// The language `{aⁿ bᵐ aᵐ⁺ⁿ}` up to length `n`.
    #[value(name = "anbmam+n")]
    Anbmamn,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the derivative of the start state by a word.
    Derive {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        word: String,
        /// Start state, in the syntax of the input file.
        #[arg(long)]
        start: Option<String>,
    },
    /// Print the coefficient of a word.
    Member {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(long)]
        start: Option<String>,
    },
    /// Print the words up to a length with their coefficients.
    Series {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
        #[arg(long)]
        start: Option<String>,
        /// Also list words with coefficient zero.
        #[arg(long)]
        all: bool,
    },
    /// Convert a file to another representation.
    Translate {
        /// Expected format of the input; checked against its header.
        #[arg(long, value_enum)]
        from: Option<Format>,
        #[arg(long, value_enum)]
        to: Format,
        #[arg(long)]
        start: Option<String>,
        input: PathBuf,
    },
    /// Decide or bound the equivalence of two start states.
    Equiv {
        input1: PathBuf,
        input2: PathBuf,
        #[arg(long, value_enum, default_value = "word")]
        mode: Mode,
        /// Word length for `word` (default 8), pair budget for `bisim` (default 1000).
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        start1: Option<String>,
        #[arg(long)]
        start2: Option<String>,
    },
    /// Check the idempotent semiring of behaviour pairs on random samples.
    CheckSemiring {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Boolean grammar to lift; the built-in `{aⁿ bᵐ aᵐ⁺ⁿ}` grammar by default.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Run a built-in example.
    Demo {
        #[arg(value_enum)]
        name: Demo,
        #[arg(long)]
        n: Option<usize>,
    },
}

/// Result of one invocation.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome::ok(text),
                _ => Outcome {
                    code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    execute(&cli)
}

/// Runs an already parsed command line.
pub fn execute(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(o) => o,
        Err(e) => Outcome::error(e),
    }
}

/// Failure of a command, rendered on stderr.
#[derive(Debug)]
pub enum Failure {
    Io(PathBuf, std::io::Error),
    Domain(Error),
    Usage(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(p, e) => write!(f, "{}: {e}", p.display()),
            Failure::Domain(e) => e.fmt(f),
            Failure::Usage(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn with_path<T>(path: &Path, r: cfcoalg::Result<T>) -> Res<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => Failure::Usage(format!("{}:{e}", path.display())),
        e => Failure::Domain(e),
    })
}

fn dispatch(cli: &Cli) -> Res<Outcome> {
    let flag = cli.semiring.map(SemiringKind::from);
    let primary = match &cli.command {
        Command::Derive { input, .. }
        | Command::Member { input, .. }
        | Command::Series { input, .. }
        | Command::Translate { input, .. } => Some(input.clone()),
        Command::Equiv { input1, .. } => Some(input1.clone()),
        Command::CheckSemiring { .. } => None,
        Command::Demo { name, .. } => {
            let kind = flag.unwrap_or(match name {
                Demo::Catalan => SemiringKind::Nat,
                _ => SemiringKind::Bool,
            });
            return Ok(match kind {
                SemiringKind::Bool => demo::<Boolean>(*name, cli_n(&cli.command)),
                SemiringKind::Nat => demo::<Natural>(*name, cli_n(&cli.command)),
            });
        }
    };
    let kind = match (flag, primary) {
        (Some(k), _) => k,
        (None, Some(path)) => with_path(&path, detect(&read(&path)?))?
            .semiring
            .unwrap_or(SemiringKind::Bool),
        (None, None) => SemiringKind::Bool,
    };
    match kind {
        SemiringKind::Bool => execute_in::<Boolean>(&cli.command),
        SemiringKind::Nat => execute_in::<Natural>(&cli.command),
    }
}

fn cli_n(cmd: &Command) -> Option<usize> {
    match cmd {
        Command::Demo { n, .. } => *n,
        _ => None,
    }
}

/// A parsed input file of any kind.
pub enum Source<K> {
    Grammar(GrammarFile<K>),
    Terms(TermsFile<K>),
    Mu(MuFile<K>),
}

impl<K: Semiring> Source<K> {
    pub fn parse(text: &str) -> cfcoalg::Result<Self> {
        Ok(match detect(text)?.kind {
            FileKind::Grammar => Source::Grammar(parse_grammar(text)?),
            FileKind::Terms => Source::Terms(parse_terms(text)?),
            FileKind::Mu => Source::Mu(parse_mu(text)?),
        })
    }

    pub fn kind(&self) -> FileKind {
        match self {
            Source::Grammar(_) => FileKind::Grammar,
            Source::Terms(_) => FileKind::Terms,
            Source::Mu(_) => FileKind::Mu,
        }
    }

    /// The start state: `start` if given, else the file's `start:` field,
    /// else the first nonterminal.
    pub fn state(&self, start: Option<&str>) -> cfcoalg::Result<State<K>> {
        match self {
            Source::Grammar(f) => {
                let sys = Arc::new(f.system.clone());
                let p = match start {
                    Some(text) => parse_polynomial_over(text, &sys)?,
                    None => f.start.clone().map_or_else(|| first_var(sys.num_nonterminals()), Ok)?,
                };
                State::grammar(sys, p)
            }
            Source::Terms(f) => {
                let sys = Arc::new(f.system.clone());
                let t = match start {
                    Some(text) => parse_term(text, &sys)?,
                    None => f.start.clone().map_or_else(|| first_var(sys.num_nonterminals()), Ok)?,
                };
                State::terms(sys, t)
            }
            Source::Mu(f) => {
                if start.is_some() {
                    return Err(Error::InvalidSystem("a mu file is its own start state".into()));
                }
                State::mu(Arc::new(f.alphabet.clone()), f.expr.clone())
            }
        }
    }
}

fn first_var<T: VarLike>(n: usize) -> cfcoalg::Result<T> {
    if n == 0 {
        return Err(Error::InvalidSystem("no nonterminals and no start given".into()));
    }
    Ok(T::var0())
}

trait VarLike {
    fn var0() -> Self;
}

impl<K: Semiring> VarLike for cfcoalg::Polynomial<K> {
    fn var0() -> Self {
        cfcoalg::Polynomial::var(0)
    }
}

impl<K: Semiring> VarLike for cfcoalg::Term<K> {
    fn var0() -> Self {
        cfcoalg::Term::var(0)
    }
}

fn load<K: Semiring>(path: &Path) -> Res<Source<K>> {
    let text = read(path)?;
    with_path(path, Source::parse(&text))
}

/// Renders a state in the syntax of its representation.
pub fn format_state<K: Semiring>(s: &State<K>) -> String {
    match s {
        State::Grammar(sys, p) => sys.format_polynomial(p),
        State::Terms(sys, t) => sys.format_term(t),
        State::Mu(al, e) => e.format(al.names()),
    }
}

fn execute_in<K: Semiring>(cmd: &Command) -> Res<Outcome> {
    match cmd {
        Command::Derive { input, word, start } => {
            let s = load::<K>(input)?.state(start.as_deref())?;
            let w = s.alphabet().parse_word(word)?;
            let d = s.word_derivative(&w);
            Ok(Outcome::ok(format!("{}\n", format_state(&d))))
        }
        Command::Member { input, word, start } => {
            let s = load::<K>(input)?.state(start.as_deref())?;
            let w = s.alphabet().parse_word(word)?;
            Ok(Outcome::ok(format!("{}\n", s.coefficient(&w)?)))
        }
        Command::Series {
            input,
            maxlen,
            start,
            all,
        } => {
            let s = load::<K>(input)?.state(start.as_deref())?;
            Ok(Outcome::ok(format_series(&s, *maxlen, *all)))
        }
        Command::Translate { from, to, start, input } => {
            let src = load::<K>(input)?;
            if let Some(from) = from {
                if FileKind::from(*from) != src.kind() {
                    return Err(Failure::Usage(format!(
                        "{} is a {} file, not {}",
                        input.display(),
                        src.kind().name(),
                        FileKind::from(*from).name()
                    )));
                }
            }
            Ok(Outcome::ok(translate(&src, (*to).into(), start.as_deref())?))
        }
        Command::Equiv {
            input1,
            input2,
            mode,
            bound,
            start1,
            start2,
        } => {
            let s1 = load::<K>(input1)?.state(start1.as_deref())?;
            let s2 = load::<K>(input2)?.state(start2.as_deref())?;
            Ok(equiv(&s1, &s2, *mode, *bound)?)
        }
        Command::CheckSemiring { seed, samples, input } => {
            if K::NAME != Boolean::NAME {
                return Err(Error::NonBooleanSemiring.into());
            }
            let system = match input {
                Some(path) => match load::<Boolean>(path)? {
                    Source::Grammar(f) => f.system,
                    other => {
                        return Err(Failure::Usage(format!(
                            "check-semiring needs a grammar file, got {}",
                            other.kind().name()
                        )))
                    }
                },
                None => builtin::running::<Boolean>(),
            };
            let lifted = WeakGnfSystem::from_grammar(&system);
            let report = check_semiring_agreement(&lifted, &mut ChaCha8Rng::seed_from_u64(*seed), *samples);
            Ok(Outcome {
                code: if report.passed() { 0 } else { 1 },
                stdout: report.to_string(),
                stderr: String::new(),
            })
        }
        Command::Demo { .. } => unreachable!("demos are dispatched before loading"),
    }
}

/// One `word coefficient` line per word in length-then-alphabet order.
pub fn format_series<K: Semiring>(s: &State<K>, maxlen: usize, all: bool) -> String {
    let mut out = String::new();
    for (w, k) in s.series(maxlen) {
        if all || !k.is_zero() {
            let _ = writeln!(out, "{} {k}", s.alphabet().format_word(&w));
        }
    }
    out
}

fn equiv<K: Semiring>(s1: &State<K>, s2: &State<K>, mode: Mode, bound: Option<usize>) -> Res<Outcome> {
    let (result, bound) = match mode {
        Mode::Word => {
            let b = bound.unwrap_or(8);
            (word_equiv(s1, s2, b)?, b)
        }
        Mode::Bisim => {
            let b = bound.unwrap_or(1000);
            (bisim_search(s1, s2, b)?.result, b)
        }
    };
    let text = match &result {
        EquivResult::Equivalent(Evidence::Bounded(n)) => format!("equivalent up to length {n}\n"),
        EquivResult::Equivalent(Evidence::Relation(n)) => {
            format!("equivalent: bisimulation up to + with {n} pairs\n")
        }
        EquivResult::Inequivalent(w) => format!(
            "inequivalent\nwitness: {}\nleft: {}\nright: {}\n",
            s1.alphabet().format_word(w),
            s1.coefficient(w)?,
            s2.coefficient(w)?
        ),
        EquivResult::Unknown => format!("unknown: no bisimulation within {bound} pairs\n"),
    };
    Ok(Outcome {
        code: result.exit_code(),
        stdout: text,
        stderr: String::new(),
    })
}

/// Terms with the start state of `src`, converting through the
/// representations as needed.
fn to_terms<K: Semiring>(src: &Source<K>, start: Option<&str>) -> cfcoalg::Result<TermsFile<K>> {
    Ok(match src.state(start)? {
        State::Grammar(sys, p) => {
            let n = sys.num_nonterminals();
            TermsFile {
                system: TermSystem::from_grammar(&sys),
                start: Some(translate_g(&p, n)),
            }
        }
        State::Terms(sys, t) => TermsFile {
            system: (*sys).clone(),
            start: Some(t),
        },
        State::Mu(al, e) => {
            let (system, t) = deconstruct(&alpha_unique(&e), &al)?;
            TermsFile { system, start: Some(t) }
        }
    })
}

/// Renders the input with its start state in the target representation.
pub fn translate<K: Semiring>(src: &Source<K>, to: FileKind, start: Option<&str>) -> cfcoalg::Result<String> {
    Ok(match (src, to) {
        (Source::Grammar(f), FileKind::Grammar) if start.is_none() => print_grammar(f),
        (Source::Terms(f), FileKind::Terms) if start.is_none() => print_terms(f),
        (Source::Mu(f), FileKind::Mu) => print_mu(f),
        (Source::Grammar(_), FileKind::Grammar) => {
            let State::Grammar(sys, p) = src.state(start)? else {
                unreachable!()
            };
            print_grammar(&GrammarFile {
                system: (*sys).clone(),
                start: Some(p),
            })
        }
        (_, FileKind::Terms) => print_terms(&to_terms(src, start)?),
        (_, FileKind::Grammar) => {
            let f = to_terms(src, start)?;
            let n = f.system.num_nonterminals();
            print_grammar(&GrammarFile {
                system: induced_grammar_system(&f.system),
                start: f.start.map(|t| translate_f(&t, n)),
            })
        }
        (_, FileKind::Mu) => {
            let f = to_terms(src, start)?;
            let t = f.start.expect("to_terms sets a start");
            let e = close(
                &term_to_mu(&t, f.system.nonterminals()),
                &canonical_assignment(&f.system),
            )?;
            print_mu(&MuFile {
                alphabet: f.system.alphabet().clone(),
                expr: e,
            })
        }
    })
}

fn demo<K: Semiring>(name: Demo, n: Option<usize>) -> Outcome {
    match name {
        Demo::Catalan => {
            let n = n.unwrap_or(9);
            let s = builtin::catalan::<K>();
            let coeffs: Vec<String> = s
                .series(n.saturating_sub(1))
                .into_iter()
                .take(n)
                .map(|(_, k)| k.to_string())
                .collect();
            Outcome::ok(format!("{}\n", coeffs.join(" ")))
        }
        Demo::Anbn => Outcome::ok(format_series(&builtin::anbn_state::<K>(), n.unwrap_or(8), false)),
        Demo::Anbmamn => Outcome::ok(format_series(&builtin::running_state::<K>(), n.unwrap_or(8), false)),
    }
}
