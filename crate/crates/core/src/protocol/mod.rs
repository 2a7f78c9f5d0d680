//! The trusted-authority / aggregator / electric-vehicle protocol.
//!
//! Setup and registration live in [`setup`]; login and the three-message
//! authentication in [`session`]. Online operations take an [`OpCounter`]
//! that records Chebyshev evaluations and hash calls per party.

mod hash;
pub mod session;
pub mod setup;
mod types;

use thiserror::Error;

use crate::cheb::ChebError;

pub use hash::{h, hash, tag, OpCounter, Party};
pub use session::{
    agt_confirm, agt_handle_login, agt_respond_unchecked, ev_handle_response, ev_login,
    ev_login_unchecked, AgtResponse, EvConfirm, EvPhase, EvSession, LoginRequest, PendingSession,
};
pub use setup::{
    agt_register, ev_register, ta_setup, ta_setup_with, AgtState, SmartCard, SystemParams, TaState,
    DEFAULT_EXPONENT_BITS, HASH_BITS, SUPPORTED_MODULUS_BITS,
};
pub use types::{xor_operand, Canonical, Digest, Identity, Password, DIGEST_LEN};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("identity payload is {0} bytes, at most 20 allowed")]
    IdentityTooLong(usize),
    #[error("identity payload is empty")]
    EmptyIdentity,
    #[error("password is empty")]
    EmptyPassword,
    #[error("hash output read as a degenerate degree (0 or 1)")]
    DegenerateDegree,
    #[error("unsupported modulus size {0} bits (expected 64, 128 or 256)")]
    UnsupportedModulusBits(u64),
    #[error("modulus too small for key generation")]
    ModulusTooSmall,
    #[error("message element belongs to a different modulus")]
    WrongModulus,
    #[error("bad credentials: I_0 does not match the card")]
    BadCredentials,
    #[error("C2 mismatch: login request modified or user unknown")]
    C2Mismatch,
    #[error("Auth_s mismatch: aggregator not authenticated")]
    AuthSMismatch,
    #[error("Auth_u mismatch: vehicle not authenticated")]
    AuthUMismatch,
    #[error("no pending session")]
    NoPendingSession,
    #[error("session is {0:?}, not awaiting a response")]
    SessionState(EvPhase),
    #[error(transparent)]
    Cheb(#[from] ChebError),
}
