//! Plain-text scenario files for the simulator.
//!
//! ```text
//! # comments start with '#'
//! scenario flip-c2
//! seed 7
//! world toy            # or default256
//! flip 1 300           # message, bit
//! end
//! ```
//!
//! Actions: `pass`, `flip M B`, `replay M PRIOR_SEED`, `drop M`,
//! `impersonate-agt SEED`, `impersonate-ev PASSWORD [bypass]`. A replay
//! source is an honest session in the same world run with `PRIOR_SEED`.

use std::io::Write;

use super::{
    run_session, AdversaryAction, HarnessError, MemoryTransport, SessionOutcome, World, WorldConfig,
};
use crate::protocol::{Party, Password};

pub const CSV_HEADER: [&str; 11] = [
    "scenario",
    "seed",
    "result",
    "failing_party",
    "failing_check",
    "failing_message",
    "ev_cheb",
    "ev_hash",
    "agt_cheb",
    "agt_hash_online",
    "agt_hash_total",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorldKind {
    Toy,
    Default256,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionSpec {
    Pass,
    Flip { message: u8, bit: usize },
    Replay { message: u8, prior_seed: u64 },
    Drop { message: u8 },
    ImpersonateAgt { seed: u64 },
    ImpersonateEv { password: String, bypass: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub name: String,
    pub seed: Option<u64>,
    pub world: WorldKind,
    pub actions: Vec<ActionSpec>,
}

#[derive(Clone, Debug)]
pub struct ScenarioResult {
    pub name: String,
    pub seed: u64,
    pub outcome: SessionOutcome,
}

fn err(line: usize, msg: impl Into<String>) -> HarnessError {
    HarnessError::Scenario {
        line,
        msg: msg.into(),
    }
}

fn num<T: std::str::FromStr>(
    line: usize,
    tok: Option<&str>,
    what: &str,
) -> Result<T, HarnessError> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| err(line, format!("bad {what} {tok:?}")))
}

fn message(line: usize, tok: Option<&str>) -> Result<u8, HarnessError> {
    let m: u8 = num(line, tok, "message number")?;
    if !(1..=3).contains(&m) {
        return Err(err(line, format!("message number {m} not in 1..=3")));
    }
    Ok(m)
}

pub fn parse_scenarios(text: &str) -> Result<Vec<ScenarioSpec>, HarnessError> {
    let mut out = Vec::new();
    let mut cur: Option<ScenarioSpec> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let kw = toks.next().expect("non-empty line");
        if kw == "scenario" {
            if cur.is_some() {
                return Err(err(line, "previous scenario not closed with 'end'"));
            }
            let name = toks
                .next()
                .ok_or_else(|| err(line, "missing scenario name"))?;
            if name.contains(',') || name.contains('"') {
                return Err(err(line, "scenario name may not contain ',' or '\"'"));
            }
            cur = Some(ScenarioSpec {
                name: name.to_string(),
                seed: None,
                world: WorldKind::Toy,
                actions: Vec::new(),
            });
            continue;
        }
        let spec = cur
            .as_mut()
            .ok_or_else(|| err(line, format!("'{kw}' outside a scenario block")))?;
        match kw {
            "end" => {
                out.push(cur.take().expect("checked above"));
                continue;
            }
            "seed" => spec.seed = Some(num(line, toks.next(), "seed")?),
            "world" => {
                spec.world = match toks.next() {
                    Some("toy") => WorldKind::Toy,
                    Some("default256") => WorldKind::Default256,
                    other => return Err(err(line, format!("unknown world {other:?}"))),
                }
            }
            "pass" => spec.actions.push(ActionSpec::Pass),
            "flip" => {
                let message = message(line, toks.next())?;
                let bit = num(line, toks.next(), "bit index")?;
                spec.actions.push(ActionSpec::Flip { message, bit });
            }
            "replay" => {
                let message = message(line, toks.next())?;
                let prior_seed = num(line, toks.next(), "prior seed")?;
                spec.actions.push(ActionSpec::Replay {
                    message,
                    prior_seed,
                });
            }
            "drop" => {
                let message = message(line, toks.next())?;
                spec.actions.push(ActionSpec::Drop { message });
            }
            "impersonate-agt" => {
                let seed = num(line, toks.next(), "seed")?;
                spec.actions.push(ActionSpec::ImpersonateAgt { seed });
            }
            "impersonate-ev" => {
                let password = toks
                    .next()
                    .ok_or_else(|| err(line, "missing password"))?
                    .to_string();
                let bypass = match toks.next() {
                    None => false,
                    Some("bypass") => true,
                    Some(other) => return Err(err(line, format!("unexpected {other:?}"))),
                };
                spec.actions
                    .push(ActionSpec::ImpersonateEv { password, bypass });
            }
            other => return Err(err(line, format!("unknown keyword {other:?}"))),
        }
        if let Some(extra) = toks.next() {
            return Err(err(line, format!("unexpected {extra:?}")));
        }
    }
    if let Some(spec) = cur {
        return Err(err(
            text.lines().count(),
            format!("scenario {} not closed with 'end'", spec.name),
        ));
    }
    Ok(out)
}

/// Builds the world for `spec` and runs one session in it. `default_seed`
/// applies when the scenario has no `seed` line.
pub fn run_scenario(
    spec: &ScenarioSpec,
    default_seed: u64,
) -> Result<ScenarioResult, HarnessError> {
    let seed = spec.seed.unwrap_or(default_seed);
    let config = match spec.world {
        WorldKind::Toy => WorldConfig::toy(),
        WorldKind::Default256 => WorldConfig::default_256(),
    };
    let world = World::build(&config, seed)?;
    let mut actions = Vec::with_capacity(spec.actions.len());
    for a in &spec.actions {
        actions.push(match a {
            ActionSpec::Pass => AdversaryAction::PassThrough,
            ActionSpec::Flip { message, bit } => AdversaryAction::FlipBit {
                message: *message,
                bit: *bit,
            },
            ActionSpec::Replay {
                message,
                prior_seed,
            } => {
                let prior = run_session(&world, *prior_seed, &[], &mut MemoryTransport::new())?;
                AdversaryAction::Replay {
                    message: *message,
                    from: prior.transcript,
                }
            }
            ActionSpec::Drop { message } => AdversaryAction::Drop { message: *message },
            ActionSpec::ImpersonateAgt { seed } => {
                AdversaryAction::ImpersonateAgt(Box::new(world.rogue_agt(*seed)?))
            }
            ActionSpec::ImpersonateEv { password, bypass } => AdversaryAction::ImpersonateEv {
                password: Password::new(password.clone())?,
                bypass_local_check: *bypass,
            },
        });
    }
    let outcome = run_session(&world, seed, &actions, &mut MemoryTransport::new())?;
    Ok(ScenarioResult {
        name: spec.name.clone(),
        seed,
        outcome,
    })
}

fn party_name(p: Party) -> &'static str {
    match p {
        Party::Ev => "EV",
        Party::Agt => "AGT",
    }
}

pub fn write_outcomes_csv<W: Write>(out: W, results: &[ScenarioResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in results {
        let o = &r.outcome;
        let (party, check, message) = match o.rejection {
            Some(rej) => (
                party_name(rej.party).to_string(),
                rej.check.name().to_string(),
                rej.message.to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        w.write_record([
            r.name.clone(),
            r.seed.to_string(),
            o.status().name().to_string(),
            party,
            check,
            message,
            o.ev_ops.chebyshev_evals.to_string(),
            o.ev_ops.hash_calls.to_string(),
            o.agt_ops.chebyshev_evals.to_string(),
            o.agt_ops.online_hashes().to_string(),
            o.agt_ops.total_hashes().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
