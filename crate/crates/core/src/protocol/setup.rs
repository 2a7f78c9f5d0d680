//! System setup and the registration phase. Everything here runs over the
//! secure registration channel and is excluded from operation counts.

use num_bigint::BigUint;
use rand::RngCore;

use crate::cheb::{
    cheb_eval, default_factor_bits, gen_exponent, gen_modulus, random_below, Exponent,
    FieldElement, Modulus,
};

use super::hash::h;
use super::session::PendingSession;
use super::types::{xor20, xor_operand, Digest, Identity, Password, DIGEST_LEN};
use super::ProtocolError;

/// Bit length of every random exponent (`k`, `r_*`).
pub const DEFAULT_EXPONENT_BITS: u64 = 160;

/// Hash output length `l`, in bits.
pub const HASH_BITS: u32 = (DIGEST_LEN * 8) as u32;

/// Modulus sizes accepted by [`ta_setup`].
pub const SUPPORTED_MODULUS_BITS: [u64; 3] = [64, 128, 256];

/// Public parameters `{N, x, pub_TA, h}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemParams {
    pub modulus: Modulus,
    /// The public seed `x`.
    pub seed: FieldElement,
    /// `pub_TA = T_k(x)`.
    pub pub_ta: FieldElement,
    pub hash_bits: u32,
    pub exponent_bits: u64,
}

/// The trusted authority's secrets.
#[derive(Clone, Debug)]
pub struct TaState {
    pub(crate) k: Exponent,
    pub(crate) id: Identity,
    pub(crate) rid_ta: Digest,
}

impl TaState {
    pub fn id(&self) -> &Identity {
        &self.id
    }

    pub fn rid_ta(&self) -> &Digest {
        &self.rid_ta
    }

    pub fn private_key(&self) -> &Exponent {
        &self.k
    }
}

/// Aggregator memory after registration.
#[derive(Clone, Debug)]
pub struct AgtState {
    pub(crate) id: Identity,
    pub(crate) r_j: Exponent,
    pub(crate) rid_j: Digest,
    pub(crate) q_j: FieldElement,
    pub(crate) s_j: Exponent,
    pub(crate) k_j: Exponent,
    pub(crate) h_kj: Digest,
    pub(crate) rid_ta: Digest,
    pub(crate) pending: Option<PendingSession>,
}

impl AgtState {
    pub fn id(&self) -> &Identity {
        &self.id
    }

    pub fn rid_j(&self) -> &Digest {
        &self.rid_j
    }

    pub fn q_j(&self) -> &FieldElement {
        &self.q_j
    }

    pub fn private_key(&self) -> &Exponent {
        &self.k_j
    }

    /// The TA signature `s_j` received at registration.
    pub fn signature(&self) -> &Exponent {
        &self.s_j
    }

    pub fn random_secret(&self) -> &Exponent {
        &self.r_j
    }

    /// `h(k_j)`, cached at registration.
    pub fn h_kj(&self) -> &Digest {
        &self.h_kj
    }

    pub fn pending(&self) -> Option<&PendingSession> {
        self.pending.as_ref()
    }
}

/// Contents of an issued smartcard, `{RID_TA, I, k_i, Z, M_i, RID_j, Q_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmartCard {
    pub rid_ta: Digest,
    /// `I = T_{ID_i}(T_{RPW_i}(pub_TA))`.
    pub i: FieldElement,
    /// EV private key; stored but not used by login or authentication.
    pub k_i: Exponent,
    /// `Z = RPW_i XOR A_i`.
    pub z: Digest,
    /// `M_i = ID_i XOR h(k_j)`.
    pub m_i: Digest,
    pub rid_j: Digest,
    pub q_j: FieldElement,
}

/// Generates a fresh modulus of `bits` bits and runs [`ta_setup_with`].
pub fn ta_setup<R: RngCore + ?Sized>(
    bits: u64,
    rng: &mut R,
) -> Result<(SystemParams, TaState), ProtocolError> {
    if !SUPPORTED_MODULUS_BITS.contains(&bits) {
        return Err(ProtocolError::UnsupportedModulusBits(bits));
    }
    let cert = gen_modulus(bits, default_factor_bits(bits), rng)?;
    let modulus = cert.to_modulus()?;
    ta_setup_with(&modulus, Identity::new("TA")?, rng)
}

/// TA key generation over a given modulus: draws `x` and `k`, publishes
/// `pub_TA = T_k(x)` and derives `RID_TA = h(ID_TA || k)`.
pub fn ta_setup_with<R: RngCore + ?Sized>(
    modulus: &Modulus,
    id_ta: Identity,
    rng: &mut R,
) -> Result<(SystemParams, TaState), ProtocolError> {
    // x is drawn from [2, N-2]; 0 and +-1 are fixed points of every T_n.
    if modulus.value() < &BigUint::from(5u8) {
        return Err(ProtocolError::ModulusTooSmall);
    }
    let span = modulus.value() - 3u32;
    let seed = modulus.element(random_below(&span, rng) + 2u32)?;
    let k = gen_exponent(DEFAULT_EXPONENT_BITS, rng)?;
    let pub_ta = cheb_eval(&k, &seed);
    let rid_ta = h(&[&id_ta, &k]);
    let params = SystemParams {
        modulus: modulus.clone(),
        seed,
        pub_ta,
        hash_bits: HASH_BITS,
        exponent_bits: DEFAULT_EXPONENT_BITS,
    };
    Ok((
        params,
        TaState {
            k,
            id: id_ta,
            rid_ta,
        },
    ))
}

/// Output of the TA's half of a registration: `Q = T_{RID}(T_{h(r XOR k)}(pub_TA))`
/// and `s = h(RID || Q) h(r XOR k) k`.
struct Issued {
    q: FieldElement,
    s: Exponent,
}

fn ta_issue<R: RngCore + ?Sized>(
    rid: &Digest,
    rid_degree: &Exponent,
    ta: &TaState,
    params: &SystemParams,
    rng: &mut R,
) -> Result<Issued, ProtocolError> {
    loop {
        let r = gen_exponent(params.exponent_bits, rng)?;
        let masked = h(&[&xor20(&xor_operand(&r), &xor_operand(&ta.k))]);
        let Ok(masked_degree) = masked.as_degree() else {
            continue;
        };
        let q = cheb_eval(rid_degree, &cheb_eval(&masked_degree, &params.pub_ta));
        let Ok(binding) = h(&[rid, &q]).as_degree() else {
            continue;
        };
        let s = binding.mul(&masked_degree).mul(&ta.k);
        return Ok(Issued { q, s });
    }
}

/// Registers an aggregator: `RID_j = h(ID_j XOR r_j)`, the TA issues
/// `(Q_j, s_j)`, and the aggregator derives `k_j = RID_j * s_j`.
pub fn agt_register<R: RngCore + ?Sized>(
    id_j: Identity,
    ta: &TaState,
    params: &SystemParams,
    rng: &mut R,
) -> Result<AgtState, ProtocolError> {
    let (r_j, rid_j, rid_degree) = loop {
        let r_j = gen_exponent(params.exponent_bits, rng)?;
        let rid_j = h(&[&id_j.xor(&xor_operand(&r_j))]);
        if let Ok(deg) = rid_j.as_degree() {
            break (r_j, rid_j, deg);
        }
    };
    let Issued { q: q_j, s: s_j } = ta_issue(&rid_j, &rid_degree, ta, params, rng)?;
    let k_j = rid_degree.mul(&s_j);
    let h_kj = h(&[&k_j]);
    Ok(AgtState {
        id: id_j,
        r_j,
        rid_j,
        q_j,
        s_j,
        k_j,
        h_kj,
        rid_ta: ta.rid_ta,
        pending: None,
    })
}

/// Registers an electric vehicle with aggregator `agt` and returns its card.
///
/// `Q_i`, `s_i`, `RID_i` and `Y` are computed along the way and dropped once
/// `k_i` and `I` are derived.
pub fn ev_register<R: RngCore + ?Sized>(
    id_i: &Identity,
    pw_i: &Password,
    ta: &TaState,
    agt: &AgtState,
    params: &SystemParams,
    rng: &mut R,
) -> Result<SmartCard, ProtocolError> {
    let pw = pw_i.canonical();

    // EV owner: RID_i = h(r_i XOR ID_i), RPW_i = h(ID_i XOR PW_i).
    let (r_i, rid_i, rid_degree) = loop {
        let r_i = gen_exponent(params.exponent_bits, rng)?;
        let rid_i = h(&[&id_i.xor(&xor_operand(&r_i))]);
        if let Ok(deg) = rid_i.as_degree() {
            break (r_i, rid_i, deg);
        }
    };
    let rpw = h(&[&id_i.xor(&pw)]);
    let rpw_degree = rpw.as_degree()?;

    // TA: (Q_i, s_i) and Y = T_{RPW_i}(T_k(x)).
    let Issued { q: _q_i, s: s_i } = ta_issue(&rid_i, &rid_degree, ta, params, rng)?;
    let y = cheb_eval(&rpw_degree, &params.pub_ta);

    // Aggregator: A_i = h(ID_i || k_j), Z = RPW_i XOR A_i, M_i = ID_i XOR h(k_j).
    let a_i = h(&[id_i, &agt.k_j]);
    let z = rpw.xor(a_i.as_bytes());
    let m_i = Digest(id_i.xor(agt.h_kj.as_bytes()));

    // EV owner: I = T_{ID_i}(Y), k_i = h((r_i XOR ID_i) || PW_i) s_i.
    let i = cheb_eval(&id_i.as_degree(), &y);
    let k_i = h(&[&id_i.xor(&xor_operand(&r_i)), &pw])
        .as_degree()?
        .mul(&s_i);

    Ok(SmartCard {
        rid_ta: ta.rid_ta,
        i,
        k_i,
        z,
        m_i,
        rid_j: agt.rid_j,
        q_j: agt.q_j.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::ModulusCertificate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> (SystemParams, TaState, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (params, ta) = ta_setup(64, &mut rng).unwrap();
        (params, ta, rng)
    }

    #[test]
    fn setup_publishes_consistent_key() {
        let (params, ta, _) = toy();
        assert_eq!(params.modulus.bits(), 64);
        assert_eq!(cheb_eval(&ta.k, &params.seed), params.pub_ta);
        assert_eq!(ta.rid_ta, h(&[&ta.id, &ta.k]));
        assert_eq!(ta.k.bits(), 160);
    }

    #[test]
    fn setup_is_deterministic() {
        let a = ta_setup(64, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
        let b = ta_setup(64, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.k, b.1.k);
    }

    #[test]
    fn setup_rejects_unsupported_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            ta_setup(96, &mut rng),
            Err(ProtocolError::UnsupportedModulusBits(96))
        ));
        let tiny = Modulus::new(BigUint::from(3u8)).unwrap();
        assert!(matches!(
            ta_setup_with(&tiny, Identity::new("TA").unwrap(), &mut rng),
            Err(ProtocolError::ModulusTooSmall)
        ));
    }

    #[test]
    fn agt_key_matches_issued_chain() {
        let (params, ta, mut rng) = toy();
        let agt = agt_register(Identity::new("agt-1").unwrap(), &ta, &params, &mut rng).unwrap();
        assert_eq!(agt.rid_j, h(&[&agt.id.xor(&xor_operand(&agt.r_j))]));
        assert_eq!(agt.h_kj, h(&[&agt.k_j]));
        // T_{k_j}(x) = T_{h(RID_j || Q_j)}(Q_j)
        let binding = h(&[&agt.rid_j, &agt.q_j]).as_degree().unwrap();
        assert_eq!(
            cheb_eval(&agt.k_j, &params.seed),
            cheb_eval(&binding, &agt.q_j)
        );
    }

    #[test]
    fn fresh_randomness_changes_pseudo_identity() {
        let (params, ta, mut rng) = toy();
        let id = Identity::new("agt-1").unwrap();
        let a = agt_register(id, &ta, &params, &mut rng).unwrap();
        let b = agt_register(id, &ta, &params, &mut rng).unwrap();
        assert_ne!(a.rid_j, b.rid_j);
    }

    #[test]
    fn card_contents() {
        let (params, ta, mut rng) = toy();
        let agt = agt_register(Identity::new("agt-1").unwrap(), &ta, &params, &mut rng).unwrap();
        let id = Identity::new("ev-7").unwrap();
        let pw = Password::new("correct horse").unwrap();
        let card = ev_register(&id, &pw, &ta, &agt, &params, &mut rng).unwrap();

        let rpw = h(&[&id.xor(&pw.canonical())]);
        let inner = cheb_eval(&rpw.as_degree().unwrap(), &params.pub_ta);
        assert_eq!(card.i, cheb_eval(&id.as_degree(), &inner));
        assert_eq!(
            Identity::from_bytes(card.m_i.xor(agt.h_kj.as_bytes()).0),
            id
        );
        assert_eq!(card.z.xor(rpw.as_bytes()), h(&[&id, &agt.k_j]));
        assert_eq!(card.rid_ta, ta.rid_ta);
        assert_eq!(card.rid_j, agt.rid_j);
        assert_eq!(card.q_j, agt.q_j);
        assert!(card.k_i.bits() > 160);
    }

    #[test]
    fn works_over_default_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = ModulusCertificate::default_256().to_modulus().unwrap();
        let (params, ta) = ta_setup_with(&m, Identity::new("TA").unwrap(), &mut rng).unwrap();
        assert_eq!(params.pub_ta.to_bytes_be().len(), 32);
        assert_eq!(cheb_eval(&ta.k, &params.seed), params.pub_ta);
    }
}
