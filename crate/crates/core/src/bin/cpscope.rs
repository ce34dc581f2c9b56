use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::parser::ValueSource;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use cpscope::compare::compare;
use cpscope::constraints::FilterLevel;
use cpscope::debug::{Command, GuiServer, SessionState};
use cpscope::models::{self, ModelConfig};
use cpscope::run::{self, RunSpec};
use cpscope::search::{NodePath, Strategy, TaskOrder};
use cpscope::trace::TraceFile;

#[derive(Parser)]
#[command(name = "cpscope", version, about = "Run, trace and debug finite-domain search")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a built-in model or a JSON model file.
    Run(RunArgs),
    /// Compare two trace files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// List the built-in models.
    ListModels,
    /// Listen as a minimal GUI: accept one solver, run it to the end and
    /// save what was received.
    Serve(ServeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Built-in model name or path to a JSON model.
    model: String,
    /// dfs, lds or lds(k). Defaults to dfs.
    #[arg(long)]
    strategy: Option<Strategy>,
    /// Discrepancy limit; implies `--strategy lds`.
    #[arg(long)]
    max_discrepancies: Option<u32>,
    /// Alldifferent filter level: basic, bounds or extended.
    #[arg(long, default_value = "basic")]
    filter_level: FilterLevel,
    /// Ranking order for scheduling models: increasing, decreasing or sequential.
    #[arg(long, default_value = "increasing")]
    order: TaskOrder,
    /// Connect to a GUI listening on this port.
    #[arg(long, env = "CPSCOPE_PORT")]
    port: Option<u16>,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Run free without a GUI, even if CPSCOPE_PORT is set.
    #[arg(long)]
    no_ui: bool,
    /// Write the trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Pause at this node path, e.g. `[0,1]`. Needs a GUI.
    #[arg(long = "breakpoint", value_name = "PATH")]
    breakpoints: Vec<NodePath>,
    /// Record propagation events from the start.
    #[arg(long)]
    spy: bool,
    /// Enumerate every solution of a satisfaction model.
    #[arg(long)]
    all_solutions: bool,
    #[arg(long)]
    node_limit: Option<u64>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "CPSCOPE_PORT", default_value_t = 7654)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long = "breakpoint", value_name = "PATH")]
    breakpoints: Vec<NodePath>,
    /// Save the mirrored trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn failure(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    // The env var supplies a default port; only an explicit --port clashes with --no-ui.
    let explicit_port = matches
        .subcommand_matches("run")
        .is_some_and(|m| m.value_source("port") == Some(ValueSource::CommandLine));
    match cli.cmd {
        Cmd::Run(args) if args.no_ui && explicit_port => usage("--port and --no-ui are mutually exclusive"),
        Cmd::Run(args) => cmd_run(args),
        Cmd::Compare { a, b, json } => cmd_compare(&a, &b, json),
        Cmd::ListModels => {
            for (name, about) in models::list() {
                println!("{name:<10} {about}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Serve(args) => cmd_serve(args),
    }
}

fn cmd_run(args: RunArgs) -> ExitCode {
    let strategy = match (args.strategy, args.max_discrepancies) {
        (None, None) => Strategy::Dfs,
        (Some(s), None) => s,
        (None | Some(Strategy::Lds { .. }), Some(k)) => Strategy::Lds { max_discrepancies: k },
        (Some(Strategy::Dfs), Some(_)) => return usage("--max-discrepancies only applies to --strategy lds"),
    };
    let ui = if args.no_ui { None } else { args.port };
    if ui.is_none() && !args.breakpoints.is_empty() {
        return usage("--breakpoint needs a GUI; pass --port or set CPSCOPE_PORT");
    }
    let spec = RunSpec {
        model: args.model.clone(),
        config: ModelConfig {
            filter_level: args.filter_level,
            order: args.order,
        },
        strategy,
        spy: args.spy,
        decision_only: true,
        all_solutions: args.all_solutions,
        node_limit: args.node_limit,
    };
    // Resolve the model up front so a bad reference is a usage error.
    if let Err(e) = models::load(&spec.model, &spec.config) {
        return match e {
            models::ModelError::Unknown(_) | models::ModelError::Unsupported(_) => usage(e),
            _ => failure(e),
        };
    }

    if let Some(port) = ui {
        let addr = format!("{}:{port}", args.host);
        return match run::run_attached(&spec, &addr, &args.breakpoints, args.trace.clone()) {
            Ok(out) => {
                println!("session over: {} run(s), {} completed", out.runs, out.completed);
                if let Some(t) = &out.trace {
                    print_summary(t);
                }
                if out.completed > 0 {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::FAILURE
                }
            }
            Err(e) => failure(e),
        };
    }

    let started = Instant::now();
    let out = match run::run_headless(&spec) {
        Ok(o) => o,
        Err(e) => return failure(e),
    };
    print_summary(&out.trace);
    println!("time: {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
    if let Some(p) = &args.trace {
        if let Err(e) = out.trace.write(p) {
            return failure(format!("cannot write {}: {e}", p.display()));
        }
        println!("trace: {}", p.display());
    }
    let s = &out.result.summary;
    if s.stopped && s.solutions == 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn print_summary(t: &TraceFile) {
    let tree = t.tree();
    let h = &t.header;
    println!("model: {} ({})", h.model, h.strategy);
    if let Some(s) = t.summary() {
        let s = &s.run;
        println!(
            "nodes: {} (visited {}), solutions: {}, events: {}",
            s.nodes, s.visited, s.solutions, s.events
        );
        match s.best_objective {
            Some(b) => println!("best objective: {b}{}", if s.proven { " (proven optimal)" } else { "" }),
            None if s.solutions == 0 && s.proven => println!("no solution (search exhausted)"),
            None => {}
        }
        if s.stopped {
            println!("stopped before the search was exhausted");
        }
    }
    if let Some(last) = t.solutions().last() {
        let vals: Vec<String> = last.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("last solution: {}", vals.join(" "));
    }
    println!("right subtrees: {}", tree.right_subtree_report().len());
}

fn cmd_compare(a: &PathBuf, b: &PathBuf, json: bool) -> ExitCode {
    let load = |p: &PathBuf| TraceFile::load(p).map_err(|e| format!("{}: {e}", p.display()));
    let (ta, tb) = match (load(a), load(b)) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return failure(e),
    };
    let report = compare(&ta, &tb);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{report}");
    }
    ExitCode::SUCCESS
}

fn cmd_serve(args: ServeArgs) -> ExitCode {
    let server = match GuiServer::bind((args.host.as_str(), args.port)) {
        Ok(s) => s,
        Err(e) => return failure(e),
    };
    match server.local_addr() {
        Ok(a) => println!("listening on {a}"),
        Err(e) => return failure(e),
    }
    let mut gui = match server.accept() {
        Ok(g) => g,
        Err(e) => return failure(e),
    };
    println!("solver connected: {}", gui.model);
    let t = Duration::from_secs(3600);
    let result = (|| -> std::io::Result<()> {
        for bp in &args.breakpoints {
            gui.call(&Command::SetBreakpoint(bp.clone()), t)?;
        }
        gui.call(&Command::Run, t)?;
        loop {
            let state = gui.wait_for_pause(t)?;
            println!("{state}");
            if state == SessionState::Finished {
                break;
            }
            gui.call(&Command::Continue, t)?;
        }
        gui.send(&Command::Quit)?;
        Ok(())
    })();
    if let Err(e) = result {
        return failure(e);
    }
    if let (Some(p), Some(trace)) = (&args.trace, gui.mirror.trace()) {
        if let Err(e) = trace.write(p) {
            return failure(e);
        }
        println!("trace: {}", p.display());
    }
    ExitCode::SUCCESS
}
