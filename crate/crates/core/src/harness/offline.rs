//! Offline password guessing against a stolen card and recorded transcripts.

use num_bigint::BigUint;

use super::{HarnessError, Transcript};
use crate::cheb::{cheb_eval, dlog_scan, Exponent, DLOG_MAX};
use crate::protocol::{h, Identity, Password, SmartCard, SystemParams};
use crate::wire::{decode, Message};

/// Largest modulus the experiment accepts.
pub const TOY_MAX_BITS: u64 = 64;

/// Card or transcript value a guess was tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuessCheck {
    /// `I = T_ID(T_RPW(pub_TA))`; needs the identity.
    I,
    /// `Z = RPW XOR A_i`; needs `A_i = h(ID || k_j)`.
    Z,
    /// `C2 = h(ID || RID_j || A_i || C1)`; needs `A_i` as well.
    C2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessRow {
    pub password: String,
    /// Checks the attacker could evaluate for this guess.
    pub testable: Vec<GuessCheck>,
    /// The first evaluable check that matched, if any.
    pub confirmed_by: Option<GuessCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessReport {
    pub rows: Vec<GuessRow>,
    /// Login requests found in the transcripts.
    pub login_requests: usize,
    /// Chebyshev evaluations spent by the brute-force inversion of `I`
    /// over `pub_TA`; `None` when the identity was known or the modulus is
    /// beyond the oracle's range.
    pub dlog_evaluations: Option<u64>,
    /// A degree `d` with `T_d(pub_TA) = I`. It fixes only the product
    /// `ID * RPW` up to the orbit of `pub_TA`, so on its own it confirms no
    /// guess.
    pub dlog_degree: Option<Exponent>,
    /// Upper bound on evaluations for that inversion (`N + 1`).
    pub dlog_cost_bound: BigUint,
}

impl GuessReport {
    pub fn confirmed(&self) -> impl Iterator<Item = &GuessRow> {
        self.rows.iter().filter(|r| r.confirmed_by.is_some())
    }
}

/// Tests every dictionary entry against what a card thief with recorded
/// traffic can evaluate. With `known_id` the `I` check from the login gate
/// applies; without it no card or transcript value is computable from a
/// guess, and the report instead records the cost of inverting `I`.
pub fn offline_guess_experiment(
    card: &SmartCard,
    params: &SystemParams,
    transcripts: &[Transcript],
    dictionary: &[String],
    known_id: Option<&Identity>,
) -> Result<GuessReport, HarnessError> {
    let bits = params.modulus.bits();
    if bits > TOY_MAX_BITS {
        return Err(HarnessError::Unsupported(format!(
            "offline experiment needs a toy modulus (at most {TOY_MAX_BITS} bits), got {bits}"
        )));
    }
    let login_requests = transcripts
        .iter()
        .filter_map(|t| t.frame(1))
        .filter(|f| matches!(decode(f, &params.modulus), Ok(Message::Login(_))))
        .count();

    let mut rows = Vec::with_capacity(dictionary.len());
    for guess in dictionary {
        let pw = Password::new(guess.clone())?;
        let mut row = GuessRow {
            password: guess.clone(),
            testable: Vec::new(),
            confirmed_by: None,
        };
        // Z and C2 both hide the guess behind A_i, which needs k_j.
        if let Some(id) = known_id {
            row.testable.push(GuessCheck::I);
            let rpw = h(&[&id.xor(&pw.canonical())]);
            if let Ok(d) = rpw.as_degree() {
                let y = cheb_eval(&d, &params.pub_ta);
                if cheb_eval(&id.as_degree(), &y) == card.i {
                    row.confirmed_by = Some(GuessCheck::I);
                }
            }
        }
        rows.push(row);
    }

    let mut report = GuessReport {
        rows,
        login_requests,
        dlog_evaluations: None,
        dlog_degree: None,
        dlog_cost_bound: params.modulus.value() + 1u32,
    };
    if known_id.is_none() && params.modulus.value() <= &BigUint::from(DLOG_MAX) {
        let max_n = u64::try_from(params.modulus.value()).expect("bounded above") + 1;
        let scan = dlog_scan(&params.pub_ta, &card.i, max_n.min(DLOG_MAX))?;
        report.dlog_evaluations = Some(scan.evaluations);
        report.dlog_degree = scan.solution;
    }
    Ok(report)
}
