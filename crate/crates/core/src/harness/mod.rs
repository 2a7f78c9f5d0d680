//! Deterministic simulation of honest and adversarial protocol sessions.
//!
//! A [`World`] holds registered parties (TA, one aggregator, one vehicle
//! with its card). [`run_session`] drives one login and authentication over
//! a [`Transport`], letting a Dolev-Yao style adversary flip bits in,
//! replay, or drop frames, or stand in for either party. Every failed
//! verification is recorded with the party and the check that caught it.

mod offline;
mod scenario;
mod transport;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cheb::{default_factor_bits, gen_modulus, ChebError, Modulus, ModulusCertificate};
use crate::protocol::{
    agt_confirm, agt_handle_login, agt_register, agt_respond_unchecked, ev_handle_response,
    ev_login, ev_login_unchecked, ev_register, ta_setup_with, AgtState, Digest, Identity,
    OpCounter, Party, Password, ProtocolError, SmartCard, SystemParams, TaState,
};
use crate::wire::{decode, encode, Message};

pub use offline::{offline_guess_experiment, GuessCheck, GuessReport, GuessRow, TOY_MAX_BITS};
pub use scenario::{
    parse_scenarios, run_scenario, write_outcomes_csv, ActionSpec, ScenarioResult, ScenarioSpec,
    WorldKind, CSV_HEADER,
};
pub use transport::{
    Direction, LoopbackTransport, MemoryTransport, Transcript, TranscriptEntry, Transport,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Cheb(#[from] ChebError),
    #[error("invalid adversary action: {0}")]
    InvalidAction(String),
    #[error("transport: {0}")]
    Transport(#[from] std::io::Error),
    #[error("scenario line {line}: {msg}")]
    Scenario { line: usize, msg: String },
    #[error("{0}")]
    Unsupported(String),
}

/// How the world's modulus is obtained.
#[derive(Clone, Debug)]
pub enum ModulusChoice {
    Generate { bits: u64, factor_bits: u64 },
    Fixed(Modulus),
}

#[derive(Clone, Debug)]
pub struct WorldConfig {
    pub modulus: ModulusChoice,
    pub ev_id: String,
    pub agt_id: String,
    pub password: String,
}

impl WorldConfig {
    fn with_modulus(modulus: ModulusChoice) -> Self {
        WorldConfig {
            modulus,
            ev_id: "EV-0001".into(),
            agt_id: "AGT-01".into(),
            password: "charge-me-2024".into(),
        }
    }

    /// Fresh 64-bit modulus per world.
    pub fn toy() -> Self {
        Self::with_bits(64)
    }

    /// Fresh modulus of `bits` bits per world. At 24 bits or fewer the
    /// brute-force discrete-log oracle applies.
    pub fn with_bits(bits: u64) -> Self {
        Self::with_modulus(ModulusChoice::Generate {
            bits,
            factor_bits: default_factor_bits(bits),
        })
    }

    /// The built-in 256-bit modulus.
    pub fn default_256() -> Self {
        let m = ModulusCertificate::default_256()
            .to_modulus()
            .expect("embedded certificate verifies");
        Self::with_modulus(ModulusChoice::Fixed(m))
    }
}

/// Registered parties sharing one set of system parameters.
#[derive(Clone, Debug)]
pub struct World {
    pub params: SystemParams,
    pub ta: TaState,
    pub agt: AgtState,
    pub card: SmartCard,
    pub ev_id: Identity,
    pub password: Password,
}

impl World {
    /// Runs setup and both registrations from `seed`.
    pub fn build(config: &WorldConfig, seed: u64) -> Result<World, HarnessError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let modulus = match &config.modulus {
            ModulusChoice::Fixed(m) => m.clone(),
            ModulusChoice::Generate { bits, factor_bits } => {
                gen_modulus(*bits, *factor_bits, &mut rng)?.to_modulus()?
            }
        };
        let (params, ta) = ta_setup_with(&modulus, Identity::new("TA")?, &mut rng)?;
        let agt = agt_register(Identity::new(&config.agt_id)?, &ta, &params, &mut rng)?;
        let ev_id = Identity::new(&config.ev_id)?;
        let password = Password::new(config.password.clone())?;
        let card = ev_register(&ev_id, &password, &ta, &agt, &params, &mut rng)?;
        Ok(World {
            params,
            ta,
            agt,
            card,
            ev_id,
            password,
        })
    }

    pub fn toy(seed: u64) -> Result<World, HarnessError> {
        Self::build(&WorldConfig::toy(), seed)
    }

    /// A second aggregator, legitimately registered with the same TA, that
    /// the vehicle never enrolled with.
    pub fn rogue_agt(&self, seed: u64) -> Result<AgtState, HarnessError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2);
        Ok(agt_register(
            Identity::new("ROGUE-AGT")?,
            &self.ta,
            &self.params,
            &mut rng,
        )?)
    }
}

/// What the adversary does to one session.
#[derive(Clone, Debug)]
pub enum AdversaryAction {
    PassThrough,
    /// Flip one bit of frame `message` (1-based); bit 0 is the most
    /// significant bit of the type byte.
    FlipBit {
        message: u8,
        bit: usize,
    },
    /// Substitute frame `message` with the same message from an earlier transcript.
    Replay {
        message: u8,
        from: Transcript,
    },
    Drop {
        message: u8,
    },
    /// A different aggregator answers the vehicle.
    ImpersonateAgt(Box<AgtState>),
    /// Someone holding the card but not the password logs in, optionally
    /// from a terminal that skips the local `I_0` check.
    ImpersonateEv {
        password: Password,
        bypass_local_check: bool,
    },
}

/// The verification that stopped a session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Check {
    /// Local credential check on the vehicle (`I_0 == I`).
    I0,
    /// Aggregator check of the login request.
    C2,
    /// Vehicle check of the aggregator response.
    AuthS,
    /// Aggregator check of the confirmation.
    AuthU,
    /// The frame itself failed to decode (bad type byte, or a field
    /// element not below `N`).
    Frame,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::I0 => "I0",
            Check::C2 => "C2",
            Check::AuthS => "Auth_s",
            Check::AuthU => "Auth_u",
            Check::Frame => "frame",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rejection {
    pub party: Party,
    pub check: Check,
    /// The message being processed when the check failed.
    pub message: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Both parties hold a session key.
    Agreed,
    Rejected,
    /// A frame was dropped before anyone rejected.
    Incomplete,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Agreed => "agreed",
            Status::Rejected => "rejected",
            Status::Incomplete => "incomplete",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SessionOutcome {
    pub sk_ev: Option<Digest>,
    pub sk_agt: Option<Digest>,
    pub transcript: Transcript,
    pub ev_ops: OpCounter,
    pub agt_ops: OpCounter,
    pub rejection: Option<Rejection>,
}

impl SessionOutcome {
    pub fn status(&self) -> Status {
        if self.rejection.is_some() {
            Status::Rejected
        } else if self.sk_ev.is_some() && self.sk_agt.is_some() {
            Status::Agreed
        } else {
            Status::Incomplete
        }
    }

    /// Both keys present and equal.
    pub fn keys_agree(&self) -> bool {
        matches!((&self.sk_ev, &self.sk_agt), (Some(a), Some(b)) if a == b)
    }

    /// Both parties finished with different keys.
    pub fn keys_conflict(&self) -> bool {
        matches!((&self.sk_ev, &self.sk_agt), (Some(a), Some(b)) if a != b)
    }
}

fn session_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Builds a toy world from `seed` and runs one honest session in it.
pub fn run_honest(seed: u64) -> Result<SessionOutcome, HarnessError> {
    run_with_adversary(seed, &[])
}

/// Builds a toy world from `seed` and runs one session under `actions`.
pub fn run_with_adversary(
    seed: u64,
    actions: &[AdversaryAction],
) -> Result<SessionOutcome, HarnessError> {
    let world = World::toy(seed)?;
    run_session(&world, seed, actions, &mut MemoryTransport::new())
}

/// One login and authentication in `world`, with session randomness from
/// `session_seed`.
pub fn run_session(
    world: &World,
    session_seed: u64,
    actions: &[AdversaryAction],
    transport: &mut dyn Transport,
) -> Result<SessionOutcome, HarnessError> {
    Session::new(world, session_seed, actions)?.run(transport)
}

struct Session<'a> {
    world: &'a World,
    actions: &'a [AdversaryAction],
    rng: ChaCha8Rng,
    ev_ops: OpCounter,
    agt_ops: OpCounter,
    transcript: Transcript,
    sk_ev: Option<Digest>,
}

enum Step<T> {
    Continue(T),
    Stop(Option<Rejection>),
}

impl<'a> Session<'a> {
    fn new(
        world: &'a World,
        seed: u64,
        actions: &'a [AdversaryAction],
    ) -> Result<Self, HarnessError> {
        for a in actions {
            let message = match a {
                AdversaryAction::FlipBit { message, .. }
                | AdversaryAction::Replay { message, .. }
                | AdversaryAction::Drop { message } => *message,
                _ => continue,
            };
            if !(1..=3).contains(&message) {
                return Err(HarnessError::InvalidAction(format!(
                    "message {message} out of range 1..=3"
                )));
            }
            if let AdversaryAction::Replay { from, .. } = a {
                if from.frame(message).is_none() {
                    return Err(HarnessError::InvalidAction(format!(
                        "replay source has no message {message}"
                    )));
                }
            }
        }
        Ok(Session {
            world,
            actions,
            rng: session_rng(seed),
            ev_ops: OpCounter::new(Party::Ev),
            agt_ops: OpCounter::new(Party::Agt),
            transcript: Transcript::new(),
            sk_ev: None,
        })
    }

    fn finish(self, sk_agt: Option<Digest>, rejection: Option<Rejection>) -> SessionOutcome {
        SessionOutcome {
            sk_ev: self.sk_ev,
            sk_agt,
            transcript: self.transcript,
            ev_ops: self.ev_ops,
            agt_ops: self.agt_ops,
            rejection,
        }
    }

    /// Passes a frame through the adversary and the transport.
    fn deliver(
        &mut self,
        message: u8,
        direction: Direction,
        frame: Vec<u8>,
        transport: &mut dyn Transport,
    ) -> Result<Option<Vec<u8>>, HarnessError> {
        let mut frame = Some(frame);
        for action in self.actions {
            match action {
                AdversaryAction::Replay { message: m, from } if *m == message => {
                    frame = from.frame(message).map(<[u8]>::to_vec);
                }
                AdversaryAction::FlipBit { message: m, bit } if *m == message => {
                    if let Some(f) = frame.as_mut() {
                        let byte = bit / 8;
                        if byte >= f.len() {
                            return Err(HarnessError::InvalidAction(format!(
                                "bit {bit} outside {}-byte frame",
                                f.len()
                            )));
                        }
                        f[byte] ^= 0x80 >> (bit % 8);
                    }
                }
                AdversaryAction::Drop { message: m } if *m == message => frame = None,
                _ => {}
            }
        }
        let Some(frame) = frame else {
            return Ok(None);
        };
        transport.send(&frame)?;
        let received = transport.recv()?;
        self.transcript.push(message, direction, received.clone());
        Ok(Some(received))
    }

    fn receive(&self, party: Party, message: u8, frame: &[u8]) -> Step<Message> {
        match decode(frame, &self.world.params.modulus) {
            Ok(m) if m.msg_type() as u8 == message => Step::Continue(m),
            _ => Step::Stop(Some(Rejection {
                party,
                check: Check::Frame,
                message,
            })),
        }
    }

    fn run(mut self, transport: &mut dyn Transport) -> Result<SessionOutcome, HarnessError> {
        let world = self.world;
        let params = &world.params;
        let reject = |party, check, message| {
            Some(Rejection {
                party,
                check,
                message,
            })
        };

        let (password, bypass) = self
            .actions
            .iter()
            .find_map(|a| match a {
                AdversaryAction::ImpersonateEv {
                    password,
                    bypass_local_check,
                } => Some((password, *bypass_local_check)),
                _ => None,
            })
            .unwrap_or((&world.password, false));
        let mut agt = self.actions.iter().find_map(|a| match a {
            AdversaryAction::ImpersonateAgt(rogue) => Some((**rogue).clone()),
            _ => None,
        });
        let rogue = agt.is_some();
        let mut agt = agt.take().unwrap_or_else(|| world.agt.clone());

        // Message 1: login request.
        let login = if bypass { ev_login_unchecked } else { ev_login };
        let (mut ev_session, m1) = match login(
            &world.card,
            &world.ev_id,
            password,
            params,
            &mut self.rng,
            &mut self.ev_ops,
        ) {
            Ok(v) => v,
            Err(ProtocolError::BadCredentials) => {
                return Ok(self.finish(None, reject(Party::Ev, Check::I0, 1)))
            }
            Err(e) => return Err(e.into()),
        };
        let Some(f1) = self.deliver(1, Direction::EvToAgt, encode(&m1.into()), transport)? else {
            return Ok(self.finish(None, None));
        };
        let Message::Login(m1) = (match self.receive(Party::Agt, 1, &f1) {
            Step::Continue(m) => m,
            Step::Stop(r) => return Ok(self.finish(None, r)),
        }) else {
            unreachable!("type checked in receive")
        };

        // Message 2: aggregator response.
        let handled = if rogue {
            agt_respond_unchecked(&mut agt, &m1, params, &mut self.rng, &mut self.agt_ops)
        } else {
            agt_handle_login(&mut agt, &m1, params, &mut self.rng, &mut self.agt_ops)
        };
        let m2 = match handled {
            Ok(m) => m,
            Err(ProtocolError::C2Mismatch) => {
                return Ok(self.finish(None, reject(Party::Agt, Check::C2, 1)))
            }
            Err(e) => return Err(e.into()),
        };
        let Some(f2) = self.deliver(2, Direction::AgtToEv, encode(&m2.into()), transport)? else {
            return Ok(self.finish(None, None));
        };
        let Message::Response(m2) = (match self.receive(Party::Ev, 2, &f2) {
            Step::Continue(m) => m,
            Step::Stop(r) => return Ok(self.finish(None, r)),
        }) else {
            unreachable!("type checked in receive")
        };

        // Message 3: vehicle confirmation.
        let m3 = match ev_handle_response(
            &mut ev_session,
            &world.card,
            &world.ev_id,
            &m2,
            params,
            &mut self.ev_ops,
        ) {
            Ok((m3, sk)) => {
                self.sk_ev = Some(sk);
                m3
            }
            Err(ProtocolError::AuthSMismatch) => {
                return Ok(self.finish(None, reject(Party::Ev, Check::AuthS, 2)))
            }
            Err(e) => return Err(e.into()),
        };
        let Some(f3) = self.deliver(3, Direction::EvToAgt, encode(&m3.into()), transport)? else {
            return Ok(self.finish(None, None));
        };
        let Message::Confirm(m3) = (match self.receive(Party::Agt, 3, &f3) {
            Step::Continue(m) => m,
            Step::Stop(r) => return Ok(self.finish(None, r)),
        }) else {
            unreachable!("type checked in receive")
        };
        match agt_confirm(&mut agt, &m3, &mut self.agt_ops) {
            Ok(sk) => Ok(self.finish(Some(sk), None)),
            Err(ProtocolError::AuthUMismatch) => {
                Ok(self.finish(None, reject(Party::Agt, Check::AuthU, 3)))
            }
            Err(e) => Err(e.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honest_session() {
        let out = run_honest(1).unwrap();
        assert_eq!(out.status(), Status::Agreed);
        assert!(out.keys_agree());
        assert_eq!(out.transcript.len(), 3);
        assert_eq!((out.ev_ops.chebyshev_evals, out.ev_ops.hash_calls), (5, 7));
        assert_eq!(
            (out.agt_ops.chebyshev_evals, out.agt_ops.online_hashes()),
            (2, 5)
        );
        assert_eq!(out.agt_ops.total_hashes(), 6);
    }

    #[test]
    fn honest_is_deterministic() {
        let a = run_honest(9).unwrap();
        let b = run_honest(9).unwrap();
        assert_eq!(a.transcript, b.transcript);
        assert_eq!(a.sk_ev, b.sk_ev);
        let c = run_honest(10).unwrap();
        assert_ne!(a.sk_ev, c.sk_ev);
    }

    #[test]
    fn loopback_matches_memory() {
        let world = World::toy(4).unwrap();
        let a = run_session(&world, 11, &[], &mut MemoryTransport::new()).unwrap();
        let mut lo = LoopbackTransport::new();
        let b = run_session(&world, 11, &[], &mut lo).unwrap();
        assert_eq!(a.transcript, b.transcript);
        assert_eq!(a.sk_ev, b.sk_ev);
        assert_eq!(lo.buffered(), 0);
    }

    #[test]
    fn wrong_password_stops_at_i0() {
        let out = run_with_adversary(
            2,
            &[AdversaryAction::ImpersonateEv {
                password: Password::new("guess").unwrap(),
                bypass_local_check: false,
            }],
        )
        .unwrap();
        assert_eq!(
            out.rejection,
            Some(Rejection {
                party: Party::Ev,
                check: Check::I0,
                message: 1
            })
        );
        assert!(out.transcript.is_empty());
    }

    #[test]
    fn bypassed_terminal_stops_at_c2() {
        let out = run_with_adversary(
            2,
            &[AdversaryAction::ImpersonateEv {
                password: Password::new("guess").unwrap(),
                bypass_local_check: true,
            }],
        )
        .unwrap();
        assert_eq!(out.rejection.map(|r| r.check), Some(Check::C2));
        assert!(out.sk_ev.is_none() && out.sk_agt.is_none());
    }

    #[test]
    fn rogue_aggregator_fails_auth_s() {
        let world = World::toy(3).unwrap();
        let rogue = world.rogue_agt(3).unwrap();
        let out = run_session(
            &world,
            5,
            &[AdversaryAction::ImpersonateAgt(Box::new(rogue))],
            &mut MemoryTransport::new(),
        )
        .unwrap();
        assert_eq!(
            out.rejection,
            Some(Rejection {
                party: Party::Ev,
                check: Check::AuthS,
                message: 2
            })
        );
    }

    #[test]
    fn dropped_confirmation_leaves_one_key() {
        let out = run_with_adversary(6, &[AdversaryAction::Drop { message: 3 }]).unwrap();
        assert_eq!(out.status(), Status::Incomplete);
        assert!(out.sk_ev.is_some() && out.sk_agt.is_none());
        assert!(!out.keys_conflict());
        assert_eq!(out.transcript.len(), 2);
    }

    #[test]
    fn replays() {
        let world = World::toy(8).unwrap();
        let old = run_session(&world, 100, &[], &mut MemoryTransport::new()).unwrap();
        // Old confirmation into a fresh session.
        let out = run_session(
            &world,
            101,
            &[AdversaryAction::Replay {
                message: 3,
                from: old.transcript.clone(),
            }],
            &mut MemoryTransport::new(),
        )
        .unwrap();
        assert_eq!(
            out.rejection.map(|r| (r.party, r.check)),
            Some((Party::Agt, Check::AuthU))
        );
        // Old login request: the aggregator answers, the vehicle does not accept.
        let out = run_session(
            &world,
            102,
            &[AdversaryAction::Replay {
                message: 1,
                from: old.transcript,
            }],
            &mut MemoryTransport::new(),
        )
        .unwrap();
        assert_eq!(out.transcript.len(), 2);
        assert_eq!(
            out.rejection.map(|r| (r.party, r.check)),
            Some((Party::Ev, Check::AuthS))
        );
    }

    #[test]
    fn invalid_actions() {
        let world = World::toy(1).unwrap();
        let mut t = MemoryTransport::new();
        assert!(matches!(
            run_session(&world, 1, &[AdversaryAction::Drop { message: 4 }], &mut t),
            Err(HarnessError::InvalidAction(_))
        ));
        assert!(matches!(
            run_session(
                &world,
                1,
                &[AdversaryAction::FlipBit {
                    message: 1,
                    bit: 100_000
                }],
                &mut t
            ),
            Err(HarnessError::InvalidAction(_))
        ));
        assert!(matches!(
            run_session(
                &world,
                1,
                &[AdversaryAction::Replay {
                    message: 2,
                    from: Transcript::new()
                }],
                &mut t
            ),
            Err(HarnessError::InvalidAction(_))
        ));
    }

    #[test]
    fn type_byte_flip_is_a_frame_rejection() {
        let out =
            run_with_adversary(1, &[AdversaryAction::FlipBit { message: 2, bit: 7 }]).unwrap();
        assert_eq!(
            out.rejection,
            Some(Rejection {
                party: Party::Ev,
                check: Check::Frame,
                message: 2
            })
        );
    }
}
