//! Login, mutual authentication and key agreement.
//!
//! ```text
//!   EV                                        AGT
//!   I_0 == I ?  C1 = T_r1(x)
//!   C2 = h(ID_i || RID_j || A_i || C1)
//!            ---- {C1, C2, M_i} ---->
//!                                             ID_i = M_i ^ h(k_j), check C2
//!                                             C3 = T_r2(Q_j), X = T_{r2 k_j}(C1)
//!            <---- {C3, Auth_s} -----
//!   X' = T_r1(T_{h(RID_j||Q_j)}(C3)), check Auth_s
//!            ---- {C4, Auth_u} ---->
//!   SK_ij = h(RID_TA || X' || A_i)            check Auth_u, SK_ji = h(RID_TA || X || A_i')
//! ```

use rand::RngCore;

use crate::cheb::{gen_exponent, Exponent, FieldElement};

use super::hash::OpCounter;
use super::setup::{AgtState, SmartCard, SystemParams};
use super::types::{Digest, Identity, Password};
use super::ProtocolError;

/// Message 1, `{C1, C2, M_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoginRequest {
    pub c1: FieldElement,
    pub c2: Digest,
    pub m_i: Digest,
}

/// Message 2, `{C3, Auth_s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgtResponse {
    pub c3: FieldElement,
    pub auth_s: Digest,
}

/// Message 3, `{C4, Auth_u}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvConfirm {
    pub c4: Digest,
    pub auth_u: Digest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvPhase {
    AwaitingResponse,
    Established,
    Aborted,
}

/// EV-side state of one login attempt.
#[derive(Clone, Debug)]
pub struct EvSession {
    r_1: Exponent,
    rpw: Digest,
    a_i: Digest,
    x_prime: Option<FieldElement>,
    session_key: Option<Digest>,
    phase: EvPhase,
}

impl EvSession {
    pub fn phase(&self) -> EvPhase {
        self.phase
    }

    pub fn rpw(&self) -> &Digest {
        &self.rpw
    }

    pub fn a_i(&self) -> &Digest {
        &self.a_i
    }

    /// `X'`, available once the aggregator's response verified.
    pub fn x_prime(&self) -> Option<&FieldElement> {
        self.x_prime.as_ref()
    }

    pub fn session_key(&self) -> Option<&Digest> {
        self.session_key.as_ref()
    }
}

/// Aggregator record held between messages 1 and 3.
#[derive(Clone, Debug)]
pub struct PendingSession {
    id_i: Identity,
    a_i: Digest,
    c1: FieldElement,
    r_2: Exponent,
    x: FieldElement,
}

impl PendingSession {
    pub fn id_i(&self) -> &Identity {
        &self.id_i
    }

    pub fn a_i(&self) -> &Digest {
        &self.a_i
    }

    pub fn c1(&self) -> &FieldElement {
        &self.c1
    }

    pub fn r_2(&self) -> &Exponent {
        &self.r_2
    }

    pub fn x(&self) -> &FieldElement {
        &self.x
    }
}

fn check_modulus(e: &FieldElement, params: &SystemParams) -> Result<(), ProtocolError> {
    if e.modulus() != &params.modulus {
        return Err(ProtocolError::WrongModulus);
    }
    Ok(())
}

/// Login: checks the typed credentials against the card, then emits
/// `{C1, C2, M_i}`. Three Chebyshev evaluations and two hashes.
pub fn ev_login<R: RngCore + ?Sized>(
    card: &SmartCard,
    id_i: &Identity,
    pw_i: &Password,
    params: &SystemParams,
    rng: &mut R,
    ops: &mut OpCounter,
) -> Result<(EvSession, LoginRequest), ProtocolError> {
    let rpw = ops.h(&[&id_i.xor(&pw_i.canonical())]);
    let rpw_degree = rpw.as_degree().map_err(|_| ProtocolError::BadCredentials)?;
    let y = ops.cheb(&rpw_degree, &params.pub_ta);
    let i_0 = ops.cheb(&id_i.as_degree(), &y);
    if i_0 != card.i {
        return Err(ProtocolError::BadCredentials);
    }
    emit_login(card, id_i, rpw, params, rng, ops)
}

/// Builds `{C1, C2, M_i}` without the local `I_0 == I` gate, as a modified
/// terminal holding a stolen card would.
pub fn ev_login_unchecked<R: RngCore + ?Sized>(
    card: &SmartCard,
    id_i: &Identity,
    pw_i: &Password,
    params: &SystemParams,
    rng: &mut R,
    ops: &mut OpCounter,
) -> Result<(EvSession, LoginRequest), ProtocolError> {
    let rpw = ops.h(&[&id_i.xor(&pw_i.canonical())]);
    emit_login(card, id_i, rpw, params, rng, ops)
}

fn emit_login<R: RngCore + ?Sized>(
    card: &SmartCard,
    id_i: &Identity,
    rpw: Digest,
    params: &SystemParams,
    rng: &mut R,
    ops: &mut OpCounter,
) -> Result<(EvSession, LoginRequest), ProtocolError> {
    let r_1 = gen_exponent(params.exponent_bits, rng)?;
    let c1 = ops.cheb(&r_1, &params.seed);
    let a_i = card.z.xor(rpw.as_bytes());
    let c2 = ops.h(&[id_i, &card.rid_j, &a_i, &c1]);

    let session = EvSession {
        r_1,
        rpw,
        a_i,
        x_prime: None,
        session_key: None,
        phase: EvPhase::AwaitingResponse,
    };
    Ok((
        session,
        LoginRequest {
            c1,
            c2,
            m_i: card.m_i,
        },
    ))
}

/// Aggregator step 1: recovers `ID_i`, verifies `C2`, and answers with
/// `{C3, Auth_s}`. On success the session is parked in the aggregator's
/// single pending slot, replacing any earlier one.
pub fn agt_handle_login<R: RngCore + ?Sized>(
    agt: &mut AgtState,
    msg: &LoginRequest,
    params: &SystemParams,
    rng: &mut R,
    ops: &mut OpCounter,
) -> Result<AgtResponse, ProtocolError> {
    check_modulus(&msg.c1, params)?;
    let (id_i, a_i) = recover_identity(agt, msg, ops);
    let c2 = ops.h(&[&id_i, &agt.rid_j, &a_i, &msg.c1]);
    if c2 != msg.c2 {
        return Err(ProtocolError::C2Mismatch);
    }
    respond(agt, id_i, a_i, msg, params, rng, ops)
}

fn recover_identity(agt: &AgtState, msg: &LoginRequest, ops: &mut OpCounter) -> (Identity, Digest) {
    ops.cache_hit();
    let id_i = Identity::from_bytes(msg.m_i.xor(agt.h_kj.as_bytes()).0);
    let a_i = ops.h(&[&id_i, &agt.k_j]);
    (id_i, a_i)
}

fn respond<R: RngCore + ?Sized>(
    agt: &mut AgtState,
    id_i: Identity,
    a_i: Digest,
    msg: &LoginRequest,
    params: &SystemParams,
    rng: &mut R,
    ops: &mut OpCounter,
) -> Result<AgtResponse, ProtocolError> {
    let r_2 = gen_exponent(params.exponent_bits, rng)?;
    let c3 = ops.cheb(&r_2, &agt.q_j);
    let x = ops.cheb(&r_2.mul(&agt.k_j), &msg.c1);
    let auth_s = ops.h(&[&x, &a_i, &id_i, &agt.rid_j, &c3]);
    agt.pending = Some(PendingSession {
        id_i,
        a_i,
        c1: msg.c1.clone(),
        r_2,
        x,
    });
    Ok(AgtResponse { c3, auth_s })
}

/// An aggregator that skips the `C2` check and answers anyway, as a
/// rogue or impersonating aggregator would.
pub fn agt_respond_unchecked<R: RngCore + ?Sized>(
    agt: &mut AgtState,
    msg: &LoginRequest,
    params: &SystemParams,
    rng: &mut R,
    ops: &mut OpCounter,
) -> Result<AgtResponse, ProtocolError> {
    check_modulus(&msg.c1, params)?;
    let (id_i, a_i) = recover_identity(agt, msg, ops);
    respond(agt, id_i, a_i, msg, params, rng, ops)
}

/// EV step 2: derives `X'`, verifies `Auth_s`, and returns `{C4, Auth_u}`
/// together with `SK_ij`. Two Chebyshev evaluations and five hashes.
///
/// A failed check aborts the session for good.
pub fn ev_handle_response(
    session: &mut EvSession,
    card: &SmartCard,
    id_i: &Identity,
    msg: &AgtResponse,
    params: &SystemParams,
    ops: &mut OpCounter,
) -> Result<(EvConfirm, Digest), ProtocolError> {
    if session.phase != EvPhase::AwaitingResponse {
        return Err(ProtocolError::SessionState(session.phase));
    }
    check_modulus(&msg.c3, params)?;
    let binding = ops.h(&[&card.rid_j, &card.q_j]).as_degree()?;
    let inner = ops.cheb(&binding, &msg.c3);
    let x_prime = ops.cheb(&session.r_1, &inner);
    let auth_s = ops.h(&[&x_prime, &session.a_i, id_i, &card.rid_j, &msg.c3]);
    if auth_s != msg.auth_s {
        session.phase = EvPhase::Aborted;
        return Err(ProtocolError::AuthSMismatch);
    }
    let c4 = ops.h(&[&session.a_i, &x_prime]);
    let auth_u = ops.h(&[&x_prime, &c4]);
    let sk = ops.h(&[&card.rid_ta, &x_prime, &session.a_i]);
    session.x_prime = Some(x_prime);
    session.session_key = Some(sk);
    session.phase = EvPhase::Established;
    Ok((EvConfirm { c4, auth_u }, sk))
}

/// Aggregator step 3: verifies `Auth_u` and returns `SK_ji`. The pending
/// record is consumed whether or not the check passes.
pub fn agt_confirm(
    agt: &mut AgtState,
    msg: &EvConfirm,
    ops: &mut OpCounter,
) -> Result<Digest, ProtocolError> {
    let pending = agt.pending.take().ok_or(ProtocolError::NoPendingSession)?;
    let auth_u = ops.h(&[&pending.x, &msg.c4]);
    if auth_u != msg.auth_u {
        return Err(ProtocolError::AuthUMismatch);
    }
    Ok(ops.h(&[&agt.rid_ta, &pending.x, &pending.a_i]))
}
