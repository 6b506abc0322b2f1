//! The `gamesolve` command line. [`run`] takes the argument list and the
//! standard streams and returns the exit code: 0 on success or accept, 1 on
//! reject or when no witness exists, 2 on usage, input or parse errors.

use std::fmt::Display;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use gamesolve::certificates::{make_np_witness, verify_conp, verify_np};
use gamesolve::gen::{gen_game, GenParams};
use gamesolve::io::{
    format_strategy, format_values, format_witness, parse_multi, parse_strategy, parse_strategy_of,
    parse_witness,
};
use gamesolve::mp::{eval_p1_memoryless_mp, eval_p2_memoryless_mp, extract_optimal_memoryless_mp, solve_mp};
use gamesolve::mpp::{eval_p1_memoryless_mpp, eval_p2_memoryless_mpp, extract_p2_optimal, solve_mpp};
use gamesolve::oracle::{
    oracle_mpp_value_with, oracle_penalty_value_with, DEFAULT_DEGREE_BOUND,
    DEFAULT_MAX_ENUM,
};
use gamesolve::penalty::{
    eval_multi_strategy, reduce_exponential, reduce_polynomial, solve_penalty, ssolve_mp,
    MultiStrategy,
};
use gamesolve::play::{
    penalty_rounds_strategy, rounds_strategy, simulate, simulate_penalty, FirstAllowed,
    FirstSuccessor, MultiPlayer, Player, Resolver,
};
use gamesolve::{parse_game, serialize_game, Game, GameKind, Owner, Rat, StateId, StateSet};

/// Environment variable overriding the oracle's strategy-count bound.
pub const MAX_ENUM_VAR: &str = "GAMESOLVE_MAX_ENUM";

#[derive(Parser, Debug)]
#[command(name = "gamesolve", version, about = "Solve mean-payoff parity and mean-penalty parity games")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Engine {
    /// The recursive algorithm
    Recursive,
    /// Brute-force enumeration of Player 2 strategies (small games only)
    Oracle,
    /// Priorities ignored
    Mp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Reduction {
    Exp,
    Poly,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Mpp,
    Penalty,
}

#[derive(clap::Args, Debug)]
struct Input {
    /// Game file, `-` for standard input
    #[arg(long, short)]
    input: PathBuf,
}

#[derive(clap::Args, Debug)]
struct Output {
    /// Write the result here instead of standard output
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the value of every state
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "recursive")]
        engine: Engine,
        #[command(flatten)]
        output: Output,
    },
    /// Check a witness for `val(state) >= threshold`
    VerifyNp {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        witness: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        threshold: String,
    },
    /// Check a Player 2 strategy certifying `val(state) < threshold`
    VerifyConp {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        threshold: String,
    },
    /// Build a witness for `val >= threshold`
    Witness {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        threshold: String,
        #[command(flatten)]
        output: Output,
    },
    /// Print an optimal memoryless strategy (Player 2, or either player with
    /// `--engine mp`)
    Strategy {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        player: u8,
        #[arg(long, value_enum, default_value = "recursive")]
        engine: Engine,
        #[command(flatten)]
        output: Output,
    },
    /// Turn a mean-penalty parity game into a mean-payoff parity game
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        kind: Reduction,
        #[command(flatten)]
        output: Output,
    },
    /// Play a finite prefix and print it with running statistics
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        start: String,
        #[arg(long)]
        horizon: usize,
        /// Player 1 strategy file (multi-strategy for penalty games);
        /// first successor / allow everything when absent
        #[arg(long, conflicts_with = "rounds")]
        p1: Option<PathBuf>,
        /// Play in rounds with this target state
        #[arg(long)]
        rounds: Option<String>,
        /// Component for `--rounds`, comma separated; all states by default
        #[arg(long, requires = "rounds", value_delimiter = ',')]
        component: Vec<String>,
        /// Player 2 strategy file; first successor / first allowed when absent
        #[arg(long)]
        p2: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Generate a random game
    Gen {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        max_weight: i64,
        #[arg(long)]
        priorities: u32,
        #[arg(long, value_enum, default_value = "mpp")]
        kind: KindArg,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Worst-case value of a memoryless strategy of either player
    EvalStrategy {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        strategy: PathBuf,
        /// Ignore priorities
        #[arg(long)]
        mp: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Worst-case penalty of a memoryless multi-strategy
    EvalMulti {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        strategy: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

/// A failure with its exit code.
struct Fail(i32, String);

fn usage(e: impl Display) -> Fail {
    Fail(2, e.to_string())
}

type Res<T> = Result<T, Fail>;

struct Ctx<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn read(&mut self, path: &Path) -> Res<String> {
        if path == Path::new("-") {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(usage)?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
    }

    fn game(&mut self, input: &Input) -> Res<Game> {
        let text = self.read(&input.input)?;
        parse_game(&text).map_err(|e| usage(format!("{}: {e}", input.input.display())))
    }

    fn emit(&mut self, output: &Output, text: &str) -> Res<()> {
        match &output.out {
            Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
            None => self.stdout.write_all(text.as_bytes()).map_err(usage),
        }
    }

    fn say(&mut self, text: &str) -> Res<()> {
        writeln!(self.stdout, "{text}").map_err(usage)
    }
}

fn state(g: &Game, name: &str) -> Res<StateId> {
    g.state_by_name(name)
        .ok_or_else(|| usage(format!("unknown state `{name}`")))
}

fn threshold(s: &str) -> Res<Rat> {
    s.parse().map_err(usage)
}

fn max_enum() -> Res<u128> {
    match std::env::var(MAX_ENUM_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{MAX_ENUM_VAR} must be a nonnegative integer"))),
        Err(_) => Ok(DEFAULT_MAX_ENUM),
    }
}

fn expect_kind(g: &Game, kind: GameKind) -> Res<()> {
    if g.kind() == kind {
        Ok(())
    } else {
        Err(usage(format!("expected a {} game", kind.keyword())))
    }
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut ctx = Ctx { stdin, stdout };
    match dispatch(cli.cmd, &mut ctx) {
        Ok(()) => 0,
        Err(Fail(code, msg)) => {
            if !msg.is_empty() {
                let _ = writeln!(stderr, "{msg}");
            }
            code
        }
    }
}

fn dispatch(cmd: Cmd, ctx: &mut Ctx) -> Res<()> {
    match cmd {
        Cmd::Solve { input, engine, output } => {
            let g = ctx.game(&input)?;
            let bound = max_enum()?;
            let vals = match (g.kind(), engine) {
                (GameKind::MeanPayoffParity, Engine::Recursive) => solve_mpp(&g),
                (GameKind::MeanPayoffParity, Engine::Oracle) => {
                    oracle_mpp_value_with(&g, bound).map_err(usage)?
                }
                (GameKind::MeanPayoffParity, Engine::Mp) => solve_mp(&g),
                (GameKind::MeanPenaltyParity, Engine::Recursive) => solve_penalty(&g),
                (GameKind::MeanPenaltyParity, Engine::Oracle) => {
                    oracle_penalty_value_with(&g, bound, DEFAULT_DEGREE_BOUND).map_err(usage)?
                }
                (GameKind::MeanPenaltyParity, Engine::Mp) => ssolve_mp(&g),
            };
            ctx.emit(&output, &format_values(&g, &vals))
        }
        Cmd::VerifyNp {
            input,
            witness,
            state: q,
            threshold: x,
        } => {
            let g = ctx.game(&input)?;
            expect_kind(&g, GameKind::MeanPayoffParity)?;
            let q0 = state(&g, &q)?;
            let x = threshold(&x)?;
            let text = ctx.read(&witness)?;
            let w = parse_witness(&g, &text).map_err(usage)?;
            match verify_np(&g, q0, x, &w) {
                Ok(()) => ctx.say("accept"),
                Err(reason) => {
                    ctx.say(&format!("reject: {reason}"))?;
                    Err(Fail(1, String::new()))
                }
            }
        }
        Cmd::VerifyConp {
            input,
            strategy,
            state: q,
            threshold: x,
        } => {
            let g = ctx.game(&input)?;
            expect_kind(&g, GameKind::MeanPayoffParity)?;
            let q0 = state(&g, &q)?;
            let x = threshold(&x)?;
            let text = ctx.read(&strategy)?;
            let tau = parse_strategy_of(&g, Owner::P2, &text).map_err(usage)?;
            if verify_conp(&g, q0, x, &tau).map_err(usage)? {
                ctx.say("accept")
            } else {
                ctx.say("reject: the strategy concedes at least the threshold")?;
                Err(Fail(1, String::new()))
            }
        }
        Cmd::Witness {
            input,
            threshold: x,
            output,
        } => {
            let g = ctx.game(&input)?;
            expect_kind(&g, GameKind::MeanPayoffParity)?;
            let x = threshold(&x)?;
            let w = make_np_witness(&g, x).map_err(|e| Fail(1, e.to_string()))?;
            ctx.emit(&output, &format_witness(&g, &w))
        }
        Cmd::Strategy {
            input,
            player,
            engine,
            output,
        } => {
            let g = ctx.game(&input)?;
            expect_kind(&g, GameKind::MeanPayoffParity)?;
            let s = match (engine, player) {
                (Engine::Mp, 1) => extract_optimal_memoryless_mp(&g).0,
                (Engine::Mp, _) => extract_optimal_memoryless_mp(&g).1,
                (Engine::Recursive, 2) => extract_p2_optimal(&g),
                _ => {
                    return Err(usage(
                        "memoryless optimal strategies exist for Player 2, or for both players with --engine mp",
                    ))
                }
            };
            ctx.emit(&output, &format_strategy(&g, &s))
        }
        Cmd::Reduce { input, kind, output } => {
            let g = ctx.game(&input)?;
            let h = match kind {
                Reduction::Exp => reduce_exponential(&g),
                Reduction::Poly => reduce_polynomial(&g),
            }
            .map_err(usage)?;
            ctx.emit(&output, &serialize_game(&h))
        }
        Cmd::Simulate {
            input,
            start,
            horizon,
            p1,
            rounds,
            component,
            p2,
            output,
        } => {
            let g = ctx.game(&input)?;
            let start = state(&g, &start)?;
            let doc = simulate_cmd(ctx, &g, start, horizon, p1, rounds, component, p2)?;
            ctx.emit(&output, &format!("{doc}\n"))
        }
        Cmd::Gen {
            states,
            degree,
            max_weight,
            priorities,
            kind,
            seed,
            output,
        } => {
            let p = GenParams {
                states,
                max_degree: degree,
                max_weight,
                priorities,
                kind: match kind {
                    KindArg::Mpp => GameKind::MeanPayoffParity,
                    KindArg::Penalty => GameKind::MeanPenaltyParity,
                },
            };
            let g = gen_game(&p, seed).map_err(usage)?;
            ctx.emit(&output, &serialize_game(&g))
        }
        Cmd::EvalStrategy {
            input,
            strategy,
            mp,
            output,
        } => {
            let g = ctx.game(&input)?;
            expect_kind(&g, GameKind::MeanPayoffParity)?;
            let text = ctx.read(&strategy)?;
            let s = parse_strategy(&g, &text).map_err(usage)?;
            let vals = match (s.owner(), mp) {
                (Owner::P1, false) => eval_p1_memoryless_mpp(&g, &s),
                (Owner::P2, false) => eval_p2_memoryless_mpp(&g, &s),
                (Owner::P1, true) => eval_p1_memoryless_mp(&g, &s),
                (Owner::P2, true) => eval_p2_memoryless_mp(&g, &s),
            }
            .map_err(usage)?;
            ctx.emit(&output, &format_values(&g, &vals))
        }
        Cmd::EvalMulti {
            input,
            strategy,
            output,
        } => {
            let g = ctx.game(&input)?;
            expect_kind(&g, GameKind::MeanPenaltyParity)?;
            let text = ctx.read(&strategy)?;
            let s = parse_multi(&g, &text).map_err(usage)?;
            ctx.emit(&output, &format_values(&g, &eval_multi_strategy(&g, &s)))
        }
    }
}

fn rats(xs: &[Rat]) -> Vec<String> {
    xs.iter().map(Rat::to_string).collect()
}

#[allow(clippy::too_many_arguments)]
fn simulate_cmd(
    ctx: &mut Ctx,
    g: &Game,
    start: StateId,
    horizon: usize,
    p1: Option<PathBuf>,
    rounds: Option<String>,
    component: Vec<String>,
    p2: Option<PathBuf>,
) -> Res<Json> {
    let component = if component.is_empty() {
        StateSet::full(g.num_states())
    } else {
        let mut s = StateSet::new(g.num_states());
        for n in &component {
            s.insert(state(g, n)?);
        }
        s
    };
    let p2 = match p2 {
        Some(p) => {
            let text = ctx.read(&p)?;
            Some(parse_strategy_of(g, Owner::P2, &text).map_err(usage)?)
        }
        None => None,
    };
    let names = |states: &[StateId]| -> Vec<String> {
        states.iter().map(|&q| g.name(q).to_string()).collect()
    };
    match g.kind() {
        GameKind::MeanPayoffParity => {
            let mut s2: Box<dyn Player> = match p2 {
                Some(s) => Box::new(s),
                None => Box::new(FirstSuccessor),
            };
            let mut round_ends = None;
            let trace = if let Some(t) = rounds {
                let mut s = rounds_strategy(g, &component, state(g, &t)?).map_err(usage)?;
                let trace = simulate(g, &mut s, s2.as_mut(), horizon, start).map_err(usage)?;
                round_ends = Some(s.round_ends().to_vec());
                trace
            } else {
                let mut s1: Box<dyn Player> = match p1 {
                    Some(p) => {
                        let text = ctx.read(&p)?;
                        Box::new(parse_strategy_of(g, Owner::P1, &text).map_err(usage)?)
                    }
                    None => Box::new(FirstSuccessor),
                };
                simulate(g, s1.as_mut(), s2.as_mut(), horizon, start).map_err(usage)?
            };
            let mut doc = json!({
                "states": names(&trace.states),
                "sums": trace.sums,
                "means": rats(&trace.means),
                "window_min_priority": trace.window_min_priority,
            });
            if let Some(r) = round_ends {
                doc["round_ends"] = json!(r);
            }
            Ok(doc)
        }
        GameKind::MeanPenaltyParity => {
            let mut s2: Box<dyn Resolver> = match p2 {
                Some(s) => Box::new(s),
                None => Box::new(FirstAllowed),
            };
            let mut round_ends = None;
            let trace = if let Some(t) = rounds {
                let mut s = penalty_rounds_strategy(g, &component, state(g, &t)?).map_err(usage)?;
                let trace = simulate_penalty(g, &mut s, s2.as_mut(), horizon, start).map_err(usage)?;
                round_ends = Some(s.round_ends().to_vec());
                trace
            } else {
                let mut s1: Box<dyn MultiPlayer> = match p1 {
                    Some(p) => {
                        let text = ctx.read(&p)?;
                        Box::new(parse_multi(g, &text).map_err(usage)?)
                    }
                    None => Box::new(MultiStrategy::permissive(g)),
                };
                simulate_penalty(g, s1.as_mut(), s2.as_mut(), horizon, start).map_err(usage)?
            };
            let mut doc = json!({
                "states": names(&trace.states),
                "blocked": trace.blocked,
                "sums": trace.sums,
                "means": rats(&trace.means),
            });
            if let Some(r) = round_ends {
                doc["round_ends"] = json!(r);
            }
            Ok(doc)
        }
    }
}
