//! Bit-exact framing of the three authentication messages.
//!
//! A frame is one type byte followed by a fixed-width payload. Field
//! elements take `ceil(bits(N) / 8)` bytes, big-endian; digests take 20.
//!
//! | type | message        | payload                  | bytes at 256-bit N |
//! |------|----------------|--------------------------|--------------------|
//! | 0x01 | `LoginRequest` | `C1 ‖ C2 ‖ M_i`          | 32 + 20 + 20 = 72  |
//! | 0x02 | `AgtResponse`  | `C3 ‖ Auth_s`            | 32 + 20 = 52       |
//! | 0x03 | `EvConfirm`    | `C4 ‖ Auth_u`            | 20 + 20 = 40       |
//!
//! The type byte is framing overhead and is left out of the communication
//! cost figures.

use thiserror::Error;

use crate::cheb::{FieldElement, Modulus};
use crate::protocol::{AgtResponse, Digest, EvConfirm, LoginRequest, DIGEST_LEN, HASH_BITS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("truncated frame: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("frame too long: expected {expected} bytes, got {actual}")]
    TrailingBytes { expected: usize, actual: usize },
    #[error("unknown message type 0x{0:02x}")]
    UnknownType(u8),
    #[error("field element out of range")]
    FieldOutOfRange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum MsgType {
    LoginRequest = 0x01,
    AgtResponse = 0x02,
    EvConfirm = 0x03,
}

impl MsgType {
    pub const ALL: [MsgType; 3] = [
        MsgType::LoginRequest,
        MsgType::AgtResponse,
        MsgType::EvConfirm,
    ];

    pub fn from_byte(b: u8) -> Result<Self, WireError> {
        match b {
            0x01 => Ok(MsgType::LoginRequest),
            0x02 => Ok(MsgType::AgtResponse),
            0x03 => Ok(MsgType::EvConfirm),
            other => Err(WireError::UnknownType(other)),
        }
    }

    pub fn byte(self) -> u8 {
        self as u8
    }

    /// Payload length in bytes for field elements of `field_len` bytes.
    pub fn payload_len(self, field_len: usize) -> usize {
        match self {
            MsgType::LoginRequest => field_len + 2 * DIGEST_LEN,
            MsgType::AgtResponse => field_len + DIGEST_LEN,
            MsgType::EvConfirm => 2 * DIGEST_LEN,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MsgType::LoginRequest => "LoginRequest",
            MsgType::AgtResponse => "AgtResponse",
            MsgType::EvConfirm => "EvConfirm",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Login(LoginRequest),
    Response(AgtResponse),
    Confirm(EvConfirm),
}

impl Message {
    pub fn msg_type(&self) -> MsgType {
        match self {
            Message::Login(_) => MsgType::LoginRequest,
            Message::Response(_) => MsgType::AgtResponse,
            Message::Confirm(_) => MsgType::EvConfirm,
        }
    }
}

impl From<LoginRequest> for Message {
    fn from(m: LoginRequest) -> Self {
        Message::Login(m)
    }
}

impl From<AgtResponse> for Message {
    fn from(m: AgtResponse) -> Self {
        Message::Response(m)
    }
}

impl From<EvConfirm> for Message {
    fn from(m: EvConfirm) -> Self {
        Message::Confirm(m)
    }
}

/// A type byte plus its payload, before field decoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame<'a> {
    pub msg_type: MsgType,
    pub payload: &'a [u8],
}

impl<'a> Frame<'a> {
    /// Splits off the type byte and checks the payload length for `modulus`.
    pub fn parse(bytes: &'a [u8], modulus: &Modulus) -> Result<Self, WireError> {
        let (&first, payload) = bytes.split_first().ok_or(WireError::Truncated {
            expected: 1,
            actual: 0,
        })?;
        let msg_type = MsgType::from_byte(first)?;
        let expected = msg_type.payload_len(modulus.byte_len());
        if payload.len() < expected {
            return Err(WireError::Truncated {
                expected: expected + 1,
                actual: bytes.len(),
            });
        }
        if payload.len() > expected {
            return Err(WireError::TrailingBytes {
                expected: expected + 1,
                actual: bytes.len(),
            });
        }
        Ok(Frame { msg_type, payload })
    }
}

pub fn encode(msg: &Message) -> Vec<u8> {
    let mut out = vec![msg.msg_type().byte()];
    match msg {
        Message::Login(m) => {
            out.extend_from_slice(&m.c1.to_bytes_be());
            out.extend_from_slice(m.c2.as_bytes());
            out.extend_from_slice(m.m_i.as_bytes());
        }
        Message::Response(m) => {
            out.extend_from_slice(&m.c3.to_bytes_be());
            out.extend_from_slice(m.auth_s.as_bytes());
        }
        Message::Confirm(m) => {
            out.extend_from_slice(m.c4.as_bytes());
            out.extend_from_slice(m.auth_u.as_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8], modulus: &Modulus) -> Result<Message, WireError> {
    let frame = Frame::parse(bytes, modulus)?;
    let mut r = Reader {
        buf: frame.payload,
        modulus,
    };
    let msg = match frame.msg_type {
        MsgType::LoginRequest => Message::Login(LoginRequest {
            c1: r.field()?,
            c2: r.digest(),
            m_i: r.digest(),
        }),
        MsgType::AgtResponse => Message::Response(AgtResponse {
            c3: r.field()?,
            auth_s: r.digest(),
        }),
        MsgType::EvConfirm => Message::Confirm(EvConfirm {
            c4: r.digest(),
            auth_u: r.digest(),
        }),
    };
    debug_assert!(r.buf.is_empty());
    Ok(msg)
}

// Lengths are validated by Frame::parse before any read.
struct Reader<'a> {
    buf: &'a [u8],
    modulus: &'a Modulus,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> &[u8] {
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        head
    }

    fn field(&mut self) -> Result<FieldElement, WireError> {
        let modulus = self.modulus;
        let bytes = self.take(modulus.byte_len());
        FieldElement::from_bytes_be(bytes, modulus).map_err(|_| WireError::FieldOutOfRange)
    }

    fn digest(&mut self) -> Digest {
        Digest::from_slice(self.take(DIGEST_LEN)).expect("fixed width")
    }
}

/// Widths used for communication-cost accounting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    /// Bits per field element on the wire.
    pub field_bits: u64,
    /// Bits per digest (`l`).
    pub digest_bits: u64,
}

impl Default for CostModel {
    /// 256-bit field elements and 160-bit digests.
    fn default() -> Self {
        CostModel {
            field_bits: 256,
            digest_bits: HASH_BITS as u64,
        }
    }
}

impl CostModel {
    /// Field width as actually encoded for `modulus`.
    pub fn for_modulus(modulus: &Modulus) -> Self {
        CostModel {
            field_bits: modulus.byte_len() as u64 * 8,
            ..Self::default()
        }
    }

    pub fn message_bits(&self, t: MsgType) -> u64 {
        match t {
            MsgType::LoginRequest => self.field_bits + 2 * self.digest_bits,
            MsgType::AgtResponse => self.field_bits + self.digest_bits,
            MsgType::EvConfirm => 2 * self.digest_bits,
        }
    }

    /// `2 |F| + 5 l`: two field elements (`C1`, `C3`) and five digests.
    pub fn session_bits(&self) -> u64 {
        MsgType::ALL.iter().map(|&t| self.message_bits(t)).sum()
    }
}

/// Payload bits exchanged by one login and authentication at the default widths.
pub fn session_cost_bits() -> u64 {
    CostModel::default().session_bits()
}
