//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any fails.
//!
//! cargo test -p chebyshev-auth --test acceptance

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chebyshev_auth::bench::{bench_cheb, report_sizes};
use chebyshev_auth::cheb::{
    cheb_eval, cheb_eval_recursive, Exponent, FieldElement, Modulus, ModulusCertificate,
};
use chebyshev_auth::harness::{
    run_session, AdversaryAction, Check, MemoryTransport, Status, World, WorldConfig,
};
use chebyshev_auth::protocol::{AgtResponse, Digest, EvConfirm, LoginRequest, Party, Password};
use chebyshev_auth::wire::{decode, encode, CostModel, Message, MsgType};
use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < budget, || format!("took {t:.1?}, budget {budget:?}"))?;
    Ok(t)
}

fn m256() -> Modulus {
    ModulusCertificate::default_256().to_modulus().unwrap()
}

fn random_below(n: &BigUint, rng: &mut ChaCha8Rng) -> BigUint {
    let mut buf = vec![0u8; (n.bits() as usize).div_ceil(8) + 8];
    rng.fill_bytes(&mut buf);
    BigUint::from_bytes_be(&buf) % n
}

fn random_element(m: &Modulus, rng: &mut ChaCha8Rng) -> FieldElement {
    m.element(random_below(m.value(), rng)).unwrap()
}

/// Plain three-term recurrence over u128, independent of the library.
fn recurrence(n: u64, x: u64, p: u64) -> u64 {
    let (p, x) = (p as u128, x as u128);
    let (mut t0, mut t1) = (1 % p, x % p);
    if n == 0 {
        return t0 as u64;
    }
    for _ in 1..n {
        let t2 = (2 * x % p * t1 % p + p - t0) % p;
        t0 = t1;
        t1 = t2;
    }
    t1 as u64
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let small_primes = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31];
    let mut checked = 0u64;
    for &p in &small_primes {
        let m = Modulus::new(BigUint::from(p)).unwrap();
        for x in 0..p {
            let fe = FieldElement::from_u64(x, &m).unwrap();
            for n in 0..=256u64 {
                let e = Exponent::from(n);
                let fast = cheb_eval(&e, &fe);
                let slow = cheb_eval_recursive(&e, &fe).unwrap();
                let plain = recurrence(n, x, p);
                ensure(
                    fast == slow && fast.value() == &BigUint::from(plain),
                    || format!("mismatch at N={p} x={x} n={n}"),
                )?;
                checked += 1;
            }
        }
    }
    // 2^64 - 59, the largest 64-bit prime.
    let p = u64::MAX - 58;
    let m = Modulus::new(BigUint::from(p)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let n = rng.gen_range(0..=1u64 << 12);
        let x = rng.gen_range(0..p);
        let fe = FieldElement::from_u64(x, &m).unwrap();
        let e = Exponent::from(n);
        let fast = cheb_eval(&e, &fe);
        ensure(fast == cheb_eval_recursive(&e, &fe).unwrap(), || {
            format!("mismatch at 64-bit N, x={x} n={n}")
        })?;
        ensure(fast.value() == &BigUint::from(recurrence(n, x, p)), || {
            format!("recurrence mismatch at 64-bit N, x={x} n={n}")
        })?;
        checked += 1;
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("{checked} evaluations, 0 mismatches, {t:.1?}"))
}

fn semigroup() -> Outcome {
    let start = Instant::now();
    let m = m256();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let bound = BigUint::from(1u8) << 256u32;
    for i in 0..1000 {
        let u = Exponent::new(random_below(&bound, &mut rng));
        let v = Exponent::new(random_below(&bound, &mut rng));
        let x = random_element(&m, &mut rng);
        let uv = cheb_eval(&u, &cheb_eval(&v, &x));
        let prod = cheb_eval(&u.mul(&v), &x);
        let vu = cheb_eval(&v, &cheb_eval(&u, &x));
        ensure(uv == prod && prod == vu, || {
            format!("failure at triple {i}")
        })?;
    }
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!("1000 triples at 256-bit N, 0 failures, {t:.1?}"))
}

fn key_agreement() -> Outcome {
    let start = Instant::now();
    for seed in 0..1000u64 {
        let world = World::toy(seed).map_err(|e| e.to_string())?;
        let out = run_session(&world, seed, &[], &mut MemoryTransport::new())
            .map_err(|e| e.to_string())?;
        ensure(out.keys_agree(), || {
            format!("64-bit seed {seed}: keys differ or missing")
        })?;
    }
    let config = WorldConfig::default_256();
    for seed in 0..100u64 {
        let world = World::build(&config, seed).map_err(|e| e.to_string())?;
        let out = run_session(&world, seed, &[], &mut MemoryTransport::new())
            .map_err(|e| e.to_string())?;
        ensure(out.keys_agree(), || {
            format!("256-bit seed {seed}: keys differ or missing")
        })?;
    }
    Ok(format!(
        "1000 runs at 64 bits, 100 at 256 bits, all SK_ij == SK_ji, {:.1?}",
        start.elapsed()
    ))
}

fn communication_cost() -> Outcome {
    let report = report_sizes();
    let bits: Vec<u64> = report.rows.iter().filter_map(|r| r.bits).collect();
    ensure(bits == [576, 416, 320, 1312], || {
        format!("report_sizes gave {bits:?}")
    })?;
    // The encoder must agree with the cost model.
    let world = World::build(&WorldConfig::default_256(), 7).map_err(|e| e.to_string())?;
    let out =
        run_session(&world, 7, &[], &mut MemoryTransport::new()).map_err(|e| e.to_string())?;
    let on_wire: Vec<u64> = out
        .transcript
        .entries()
        .iter()
        .map(|e| (e.frame.len() as u64 - 1) * 8)
        .collect();
    ensure(on_wire == bits[..3], || {
        format!("encoded payloads are {on_wire:?} bits")
    })?;
    ensure(
        CostModel::for_modulus(&world.params.modulus).session_bits() == 1312,
        || "cost model for the default modulus is not 1312".into(),
    )?;
    Ok("576 + 416 + 320 = 1312 bits; encoded frames agree".into())
}

fn operation_counts() -> Outcome {
    let world = World::build(&WorldConfig::default_256(), 11).map_err(|e| e.to_string())?;
    let out =
        run_session(&world, 11, &[], &mut MemoryTransport::new()).map_err(|e| e.to_string())?;
    let ev = (out.ev_ops.chebyshev_evals, out.ev_ops.hash_calls);
    let agt = (out.agt_ops.chebyshev_evals, out.agt_ops.online_hashes());
    ensure(ev == (5, 7), || format!("EV counted {ev:?}"))?;
    ensure(agt == (2, 5), || format!("AGT counted {agt:?}"))?;
    let agt_total = out.agt_ops.total_hashes();
    ensure(agt_total == 6, || format!("AGT total hashes {agt_total}"))?;
    Ok(format!(
        "EV 5 T_c + 7 T_h, AGT 2 T_c + 5 T_h online ({agt_total} with cached h(k_j))"
    ))
}

fn timing_scaling() -> Outcome {
    let sizes = [128u64, 160, 256, 512];
    let report = bench_cheb(&sizes, 1000, 256, 3).map_err(|e| e.to_string())?;
    let ms: Vec<f64> = report.rows.iter().map(|r| r.median_ms().unwrap()).collect();
    let summary = sizes
        .iter()
        .zip(&ms)
        .map(|(b, t)| format!("{b}:{t:.4}ms"))
        .collect::<Vec<_>>()
        .join(" ");
    ensure(ms.windows(2).all(|w| w[0] < w[1]), || {
        format!("not strictly increasing: {summary}")
    })?;
    let ratio = ms[3] / ms[0];
    ensure((3.0..=6.0).contains(&ratio), || {
        format!("t(512)/t(128) = {ratio:.2} outside [3, 6]: {summary}")
    })?;
    Ok(format!("{summary}, t(512)/t(128) = {ratio:.2}"))
}

/// Designated receiver and verifier for each message.
fn designated(message: u8) -> (Party, Check) {
    match message {
        1 => (Party::Agt, Check::C2),
        2 => (Party::Ev, Check::AuthS),
        _ => (Party::Agt, Check::AuthU),
    }
}

fn tamper_rejection() -> Outcome {
    let start = Instant::now();
    let world = World::toy(12).map_err(|e| e.to_string())?;
    let honest =
        run_session(&world, 12, &[], &mut MemoryTransport::new()).map_err(|e| e.to_string())?;
    let (mut flips, mut by_verifier, mut by_frame) = (0u64, 0u64, 0u64);
    for message in 1..=3u8 {
        let len = honest.transcript.frame(message).unwrap().len();
        let (party, verifier) = designated(message);
        for bit in 0..len * 8 {
            let out = run_session(
                &world,
                12,
                &[AdversaryAction::FlipBit { message, bit }],
                &mut MemoryTransport::new(),
            )
            .map_err(|e| e.to_string())?;
            flips += 1;
            let rej = out
                .rejection
                .ok_or_else(|| format!("message {message} bit {bit}: accepted"))?;
            ensure(rej.party == party && rej.message == message, || {
                format!("message {message} bit {bit}: rejected by {rej:?}")
            })?;
            match rej.check {
                c if c == verifier => by_verifier += 1,
                Check::Frame => by_frame += 1,
                other => return Err(format!("message {message} bit {bit}: check {other:?}")),
            }
            // The receiver must not hold a key; for message 3 the vehicle
            // already finished before the flip.
            ensure(out.sk_agt.is_none(), || {
                format!("message {message} bit {bit}: AGT key")
            })?;
            if message < 3 {
                ensure(out.sk_ev.is_none(), || {
                    format!("message {message} bit {bit}: EV key")
                })?;
            }
            ensure(!out.keys_conflict(), || {
                format!("message {message} bit {bit}: key conflict")
            })?;
        }
    }
    let t = within(start, Duration::from_secs(600))?;
    Ok(format!(
        "{flips}/{flips} flips rejected by the receiver: {by_verifier} at C2/Auth_s/Auth_u, \
         {by_frame} at frame decoding (type byte or field >= N), {t:.1?}"
    ))
}

fn replay() -> Outcome {
    let mut rejected = 0;
    for trial in 0..100u64 {
        let world = World::toy(1000 + trial).map_err(|e| e.to_string())?;
        let prior = run_session(&world, 2 * trial, &[], &mut MemoryTransport::new())
            .map_err(|e| e.to_string())?;
        let out = run_session(
            &world,
            2 * trial + 1,
            &[AdversaryAction::Replay {
                message: 3,
                from: prior.transcript.clone(),
            }],
            &mut MemoryTransport::new(),
        )
        .map_err(|e| e.to_string())?;
        let rej = out.rejection;
        if rej.map(|r| (r.party, r.check, r.message)) == Some((Party::Agt, Check::AuthU, 3))
            && out.sk_agt.is_none()
        {
            rejected += 1;
        }
    }
    ensure(rejected == 100, || {
        format!("{rejected}/100 rejected at Auth_u")
    })?;
    Ok("100/100 replayed confirmations rejected at Auth_u".into())
}

fn credential_gate() -> Outcome {
    let world = World::toy(13).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut gated = 0;
    for i in 0..100u64 {
        let guess = format!("guess-{i}-{:08x}", rng.next_u32());
        assert_ne!(guess, world.password.as_str());
        let out = run_session(
            &world,
            i,
            &[AdversaryAction::ImpersonateEv {
                password: Password::new(guess).unwrap(),
                bypass_local_check: false,
            }],
            &mut MemoryTransport::new(),
        )
        .map_err(|e| e.to_string())?;
        let at_gate = out.rejection.map(|r| (r.party, r.check)) == Some((Party::Ev, Check::I0));
        if at_gate && out.transcript.is_empty() && out.status() == Status::Rejected {
            gated += 1;
        }
    }
    ensure(gated == 100, || {
        format!("{gated}/100 stopped at I_0 with no message")
    })?;
    Ok("100/100 wrong passwords stopped at I_0 == I, no message emitted".into())
}

fn random_digest(rng: &mut ChaCha8Rng) -> Digest {
    let mut d = [0u8; 20];
    rng.fill_bytes(&mut d);
    Digest(d)
}

fn read_hex(path: &Path) -> Result<Vec<u8>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let joined: String = text.split_whitespace().collect();
    hex::decode(joined).map_err(|e| format!("{}: {e}", path.display()))
}

fn wire_round_trip() -> Outcome {
    let m = m256();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for i in 0..1000 {
        let msg: Message = match i % 3 {
            0 => LoginRequest {
                c1: random_element(&m, &mut rng),
                c2: random_digest(&mut rng),
                m_i: random_digest(&mut rng),
            }
            .into(),
            1 => AgtResponse {
                c3: random_element(&m, &mut rng),
                auth_s: random_digest(&mut rng),
            }
            .into(),
            _ => EvConfirm {
                c4: random_digest(&mut rng),
                auth_u: random_digest(&mut rng),
            }
            .into(),
        };
        let bytes = encode(&msg);
        ensure(bytes.len() == 1 + msg.msg_type().payload_len(32), || {
            format!("message {i}: {} bytes", bytes.len())
        })?;
        ensure(decode(&bytes, &m).as_ref() == Ok(&msg), || {
            format!("message {i} did not round-trip")
        })?;
    }

    let world = World::build(&WorldConfig::default_256(), 2024).map_err(|e| e.to_string())?;
    let out =
        run_session(&world, 2024, &[], &mut MemoryTransport::new()).map_err(|e| e.to_string())?;
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let names = ["login_request", "agt_response", "ev_confirm"];
    for (t, name) in MsgType::ALL.iter().zip(names) {
        let golden = read_hex(&dir.join(format!("{name}.hex")))?;
        let fresh = out.transcript.frame(t.byte()).ok_or("missing frame")?;
        ensure(golden == fresh, || {
            format!("{name}.hex differs from a fresh run")
        })?;
        let decoded = decode(&golden, &world.params.modulus).map_err(|e| format!("{name}: {e}"))?;
        ensure(encode(&decoded) == golden, || {
            format!("{name}.hex does not re-encode")
        })?;
    }
    Ok("1000 random messages round-trip; 3 golden frames match bit-exactly".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("semigroup property", semigroup),
        ("key agreement", key_agreement),
        ("communication cost", communication_cost),
        ("operation counts", operation_counts),
        ("timing scaling", timing_scaling),
        ("tamper rejection", tamper_rejection),
        ("replay", replay),
        ("credential gate", credential_gate),
        ("wire round-trip", wire_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
