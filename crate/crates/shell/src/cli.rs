//! The `lawmap` command line.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use lawmap_core::diagnostic::has_errors;
use lawmap_core::dsl::{from_json, parse_set, print_canonical, print_set};
use lawmap_core::outline::{compile_outline, parse_outline};
use lawmap_core::render::{emit_dot, emit_svg, layout};
use lawmap_core::traverse::batch_route_withheld;
use lawmap_core::validate::{analyze_set, ResolvedSet};
use lawmap_core::{Assignment, Diagnostic, LawmapSet, Mode, Route};

use crate::catalog::Catalog;
use crate::server::{router, AppState};
use crate::session::SessionStore;

/// Exit status for validation failures.
pub const EXIT_INVALID: i32 = 1;
/// Exit status for bad arguments or unreadable input.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lawmap", version, about = "Check, format, render and trace legal flowchart maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Dot,
    Svg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a map and report diagnostics.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print a map in canonical form.
    Fmt {
        file: PathBuf,
        /// Exit 1 instead of printing when the file is not canonical.
        #[arg(long)]
        check: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw a map as Graphviz DOT or SVG.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "svg")]
        to: Target,
        /// Answers (JSON object or file) whose route is highlighted.
        #[arg(long, alias = "answers")]
        route: Option<String>,
        #[arg(long, default_value = "atomic")]
        mode: Mode,
        /// Render this document of the set instead of the root.
        #[arg(long)]
        doc: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute the route for a set of answers.
    Trace {
        file: PathBuf,
        /// Answers as a JSON object of decision path-id to label, inline or in a file.
        #[arg(long)]
        answers: Option<String>,
        #[arg(long, default_value = "atomic")]
        mode: Mode,
        /// Hold a node back from completing (path-id, repeatable).
        #[arg(long = "withhold")]
        withheld: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Compile a plain-language listing into a draft map.
    Outline {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Document id; defaults to the file stem.
        #[arg(long)]
        id: Option<String>,
        #[arg(long)]
        title: Option<String>,
    },
    /// Serve maps and walkthrough sessions over HTTP.
    Serve {
        /// Listening port; LAWMAP_PORT takes precedence.
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Directory of additional .lawmap files.
        #[arg(long)]
        maps: Vec<PathBuf>,
        /// Directory for session snapshots.
        #[arg(long)]
        state_dir: Option<PathBuf>,
        /// Allowed CORS origin (repeatable); any origin when omitted.
        #[arg(long = "cors-origin")]
        cors_origins: Vec<String>,
    },
}

/// A failure carrying its exit status.
struct Fail(i32, String);

impl From<anyhow::Error> for Fail {
    fn from(e: anyhow::Error) -> Self {
        Fail(EXIT_USAGE, format!("{e:#}"))
    }
}

type Outcome = Result<i32, Fail>;

/// Runs the CLI and returns the process exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Check { file, format } => check(&file, format, out, err),
        Command::Fmt { file, check, output } => fmt(&file, check, output.as_deref(), out, err),
        Command::Render {
            file,
            to,
            route,
            mode,
            doc,
            output,
        } => render(&file, to, route.as_deref(), mode, doc.as_deref(), output.as_deref(), out, err),
        Command::Trace {
            file,
            answers,
            mode,
            withheld,
            format,
        } => trace(&file, answers.as_deref(), mode, withheld, format, out, err),
        Command::Outline { file, output, id, title } => outline(&file, output.as_deref(), id, title, out, err),
        Command::Serve {
            port,
            host,
            maps,
            state_dir,
            cors_origins,
        } => serve(port, host, &maps, state_dir, &cors_origins, err),
    };
    match result {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// Parses a `.lawmap` or `.json` file into a set.
fn read_set(path: &Path) -> Result<(Option<LawmapSet>, Vec<Diagnostic>), Fail> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", display(path)))?;
    if path.extension().is_some_and(|x| x == "json") {
        return Ok(match from_json(&text) {
            Ok(set) => (Some(set), Vec::new()),
            Err(diags) => (None, diags),
        });
    }
    let parsed = parse_set(&text, &display(path));
    Ok((parsed.set, parsed.diagnostics))
}

fn report(diags: &[Diagnostic], path: &Path, err: &mut dyn Write) {
    for d in diags {
        let _ = writeln!(err, "{}", d.render(&display(path)));
    }
}

/// Reads and validates a file. Diagnostics go to `err`; the set is
/// returned only when it has no errors.
fn load_valid(path: &Path, err: &mut dyn Write) -> Result<ResolvedSet, Fail> {
    let (set, diags) = read_set(path)?;
    let (rs, diags) = match set {
        Some(set) => analyze_set(set, diags),
        None => (None, diags),
    };
    report(&diags, path, err);
    match rs {
        Some(rs) if !has_errors(&diags) => Ok(rs),
        _ => Err(Fail(EXIT_INVALID, format!("{} has errors", display(path)))),
    }
}

fn check(path: &Path, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let (set, diags) = read_set(path)?;
    let (_, diags) = match set {
        Some(set) => analyze_set(set, diags),
        None => (None, diags),
    };
    match format {
        Format::Text => report(&diags, path, err),
        Format::Json => {
            let json = serde_json::to_string_pretty(&diags).map_err(anyhow::Error::from)?;
            let _ = writeln!(out, "{json}");
        }
    }
    Ok(if has_errors(&diags) { EXIT_INVALID } else { 0 })
}

fn write_output(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Fail> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", display(p)))?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn fmt(path: &Path, check: bool, output: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let (set, diags) = read_set(path)?;
    let Some(set) = set else {
        report(&diags, path, err);
        return Ok(EXIT_INVALID);
    };
    let text = print_set(&set);
    if check {
        let current = std::fs::read_to_string(path).unwrap_or_default();
        if current != text {
            let _ = writeln!(err, "{} is not in canonical form", display(path));
            return Ok(EXIT_INVALID);
        }
        return Ok(0);
    }
    write_output(output, &text, out)?;
    Ok(0)
}

/// Reads answers given inline as a JSON object or as a path to one.
fn read_answers(arg: &str) -> Result<Assignment, Fail> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("cannot read answers file {arg}"))?
    };
    serde_json::from_str(&text).map_err(|e| Fail(EXIT_USAGE, format!("answers must be a JSON object of decision to label: {e}")))
}

fn route_for(rs: &ResolvedSet, answers: &Assignment, mode: Mode, withheld: &BTreeSet<String>) -> Result<Route, Fail> {
    batch_route_withheld(rs, answers, mode, withheld).map_err(|e| Fail(EXIT_USAGE, e.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn render(
    path: &Path,
    to: Target,
    route: Option<&str>,
    mode: Mode,
    doc: Option<&str>,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    if route.is_some() && (to == Target::Dot || doc.is_some()) {
        return Err(Fail(EXIT_USAGE, "--route applies to SVG output of the root map only".into()));
    }
    let (set, diags) = read_set(path)?;
    let Some(set) = set else {
        report(&diags, path, err);
        return Ok(EXIT_INVALID);
    };
    let d = match doc {
        Some(id) => set.doc(id).ok_or_else(|| Fail(EXIT_USAGE, format!("no document '{id}' in {}", display(path))))?,
        None => set.root_doc(),
    };
    let text = match to {
        Target::Dot => emit_dot(d),
        Target::Svg => {
            let highlight = match route {
                Some(arg) => {
                    let answers = read_answers(arg)?;
                    let rs = load_valid(path, err)?;
                    Some(route_for(&rs, &answers, mode, &BTreeSet::new())?)
                }
                None => None,
            };
            emit_svg(&layout(d), highlight.as_ref()).map_err(|e| Fail(EXIT_USAGE, e.to_string()))?
        }
    };
    write_output(output, &text, out)?;
    Ok(0)
}

fn trace(
    path: &Path,
    answers: Option<&str>,
    mode: Mode,
    withheld: Vec<String>,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let answers = match answers {
        Some(a) => read_answers(a)?,
        None => Assignment::new(),
    };
    let rs = load_valid(path, err)?;
    let withheld: BTreeSet<String> = withheld.into_iter().collect();
    let route = route_for(&rs, &answers, mode, &withheld)?;
    match format {
        Format::Json => {
            let json = serde_json::to_string_pretty(&route).map_err(anyhow::Error::from)?;
            let _ = writeln!(out, "{json}");
        }
        Format::Text => {
            let _ = write!(out, "{}", route_text(&route));
        }
    }
    Ok(0)
}

fn route_text(r: &Route) -> String {
    let mut s = format!("status: {:?}\n", r.status);
    for step in &r.completed {
        s.push_str(&format!("  done    {}\n", step.node));
    }
    for p in &r.pending {
        s.push_str(&format!("  ask     {} [{}] {}\n", p.decision, p.options.join(" | "), p.prompt));
    }
    for b in &r.blocked {
        if b.waiting_on.is_empty() {
            s.push_str(&format!("  held    {}\n", b.node));
        } else {
            s.push_str(&format!("  blocked {} (waiting on {})\n", b.node, b.waiting_on.join(", ")));
        }
    }
    for x in &r.reached_exits {
        match &x.outcome_label {
            Some(o) => s.push_str(&format!("  exit    {} ({o})\n", x.exit)),
            None => s.push_str(&format!("  exit    {}\n", x.exit)),
        }
    }
    s
}

fn outline(path: &Path, output: Option<&Path>, id: Option<String>, title: Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", display(path)))?;
    let parsed = parse_outline(&text, &display(path));
    report(&parsed.diagnostics, path, err);
    let Some(o) = parsed.outline.filter(|_| !has_errors(&parsed.diagnostics)) else {
        return Ok(EXIT_INVALID);
    };
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "outline".into());
    let id = id.unwrap_or_else(|| {
        let cleaned: String = stem.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
        if cleaned.starts_with(|c: char| c.is_ascii_alphabetic()) {
            cleaned
        } else {
            format!("m_{cleaned}")
        }
    });
    let title = title.unwrap_or(stem);
    let doc = compile_outline(&o, &id, &title).map_err(|e| Fail(EXIT_INVALID, e.to_string()))?;
    write_output(output, &print_canonical(&doc), out)?;
    Ok(0)
}

fn serve(port: u16, host: std::net::IpAddr, maps: &[PathBuf], state_dir: Option<PathBuf>, origins: &[String], err: &mut dyn Write) -> Outcome {
    let port = match std::env::var("LAWMAP_PORT") {
        Ok(v) => v.parse().map_err(|_| Fail(EXIT_USAGE, format!("LAWMAP_PORT '{v}' is not a port number")))?,
        Err(_) => port,
    };
    let _ = tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .try_init();

    let mut catalog = Catalog::bundled();
    for dir in maps {
        let refused = catalog.load_dir(dir).with_context(|| format!("cannot read map directory {}", display(dir)))?;
        for (file, diags) in refused {
            let _ = writeln!(err, "skipping {file}: {} error(s)", diags.iter().filter(|d| d.is_error()).count());
            report(&diags, Path::new(&file), err);
        }
    }
    let sessions = SessionStore::new(state_dir);
    let restored = sessions.restore(&catalog).context("cannot restore sessions")?;
    let state = AppState::new(catalog, sessions);
    let app = router(state.clone(), origins);
    let addr = SocketAddr::new(host, port);

    let runtime = tokio::runtime::Runtime::new().context("cannot start runtime")?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("cannot listen on {addr}"))?;
        tracing::info!(%addr, maps = state.catalog.len(), restored, "serving");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .context("server failed")
    })?;
    Ok(0)
}
