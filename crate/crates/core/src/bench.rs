//! Timing and size reports.
//!
//! Times are medians over at least [`MIN_ITERATIONS`] samples after a
//! short warm-up. Everything except the time columns is a function of the
//! seed.

use std::fmt;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cheb::{
    cheb_eval, default_factor_bits, gen_exponent, gen_modulus, random_below, ChebError, Modulus,
    ModulusCertificate,
};
use crate::harness::{HarnessError, World, WorldConfig};
use crate::protocol::{
    agt_confirm, agt_handle_login, ev_handle_response, ev_login, hash, tag, OpCounter, Party,
    ProtocolError, DEFAULT_EXPONENT_BITS,
};
use crate::wire::{CostModel, MsgType};

pub const MIN_ITERATIONS: usize = 100;
pub const DEGREE_BITS_RANGE: std::ops::RangeInclusive<u64> = 64..=4096;
const WARMUP: usize = 10;

pub const EXPECTED_EV_OPS: (u64, u64) = (5, 7);
/// Chebyshev evaluations, online hashes, hashes including the cached `h(k_j)`.
pub const EXPECTED_AGT_OPS: (u64, u64, u64) = (2, 5, 6);

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("iterations must be at least {MIN_ITERATIONS}, got {0}")]
    Iterations(usize),
    #[error("degree size {0} bits outside 64..=4096")]
    DegreeBits(u64),
    #[error("no degree sizes given")]
    NoSizes,
    #[error("operation counts {party:?}: expected {expected}, measured {actual}")]
    OpCountMismatch {
        party: Party,
        expected: String,
        actual: String,
    },
    #[error("honest session failed: {0}")]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Cheb(#[from] ChebError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    Cheb,
    Party,
    Isolated,
    Size,
}

impl RowKind {
    fn name(self) -> &'static str {
        match self {
            RowKind::Cheb => "cheb",
            RowKind::Party => "party",
            RowKind::Isolated => "isolated",
            RowKind::Size => "size",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub kind: RowKind,
    pub label: String,
    pub median: Option<Duration>,
    pub iterations: usize,
    /// Median relative to the 128-bit row.
    pub ratio: Option<f64>,
    pub cheb_ops: Option<u64>,
    pub hash_ops: Option<u64>,
    pub hash_total: Option<u64>,
    /// Message or session size, in bits.
    pub bits: Option<u64>,
}

impl BenchRow {
    fn new(kind: RowKind, label: impl Into<String>) -> Self {
        BenchRow {
            kind,
            label: label.into(),
            median: None,
            iterations: 0,
            ratio: None,
            cheb_ops: None,
            hash_ops: None,
            hash_total: None,
            bits: None,
        }
    }

    pub fn median_ms(&self) -> Option<f64> {
        self.median.map(|d| d.as_secs_f64() * 1e3)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub title: String,
    pub modulus_bits: Option<u64>,
    pub rows: Vec<BenchRow>,
}

pub const REPORT_CSV_HEADER: [&str; 9] = [
    "kind",
    "label",
    "median_ms",
    "iterations",
    "ratio_to_128",
    "cheb",
    "hash",
    "hash_total",
    "bits",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl BenchReport {
    pub fn row(&self, label: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(REPORT_CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.kind.name().to_string(),
                r.label.clone(),
                opt(r.median_ms().map(|ms| format!("{ms:.6}"))),
                r.iterations.to_string(),
                opt(r.ratio.map(|x| format!("{x:.3}"))),
                opt(r.cheb_ops),
                opt(r.hash_ops),
                opt(r.hash_total),
                opt(r.bits),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.title)?;
        if let Some(b) = self.modulus_bits {
            write!(f, " (modulus {b} bits)")?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "{:<18} {:>12} {:>7} {:>7} {:>5} {:>5} {:>6} {:>6}",
            "label", "median ms", "iters", "ratio", "cheb", "hash", "h+cache", "bits"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<18} {:>12} {:>7} {:>7} {:>5} {:>5} {:>6} {:>6}",
                r.label,
                opt(r.median_ms().map(|ms| format!("{ms:.6}"))),
                if r.iterations == 0 {
                    String::new()
                } else {
                    r.iterations.to_string()
                },
                opt(r.ratio.map(|x| format!("{x:.2}"))),
                opt(r.cheb_ops),
                opt(r.hash_ops),
                opt(r.hash_total),
                opt(r.bits),
            )?;
        }
        Ok(())
    }
}

fn median(samples: &mut [Duration]) -> Duration {
    samples.sort_unstable();
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2
    }
}

fn check_iters(iters: usize) -> Result<(), BenchError> {
    if iters < MIN_ITERATIONS {
        return Err(BenchError::Iterations(iters));
    }
    Ok(())
}

/// The built-in certificate at 256 bits, a freshly searched modulus otherwise.
pub fn bench_modulus(bits: u64, rng: &mut ChaCha8Rng) -> Result<Modulus, BenchError> {
    if bits == 256 {
        return Ok(ModulusCertificate::default_256().to_modulus()?);
    }
    Ok(gen_modulus(bits, default_factor_bits(bits), rng)?.to_modulus()?)
}

/// Median `cheb_eval` time per degree size over one fixed modulus.
///
/// Sizes are interleaved within each round so drift affects all rows alike.
pub fn bench_cheb(
    bit_sizes: &[u64],
    iters: usize,
    modulus_bits: u64,
    seed: u64,
) -> Result<BenchReport, BenchError> {
    check_iters(iters)?;
    if bit_sizes.is_empty() {
        return Err(BenchError::NoSizes);
    }
    if let Some(&b) = bit_sizes.iter().find(|b| !DEGREE_BITS_RANGE.contains(b)) {
        return Err(BenchError::DegreeBits(b));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modulus = bench_modulus(modulus_bits, &mut rng)?;

    let mut inputs = Vec::with_capacity(bit_sizes.len());
    for &bits in bit_sizes {
        let mut pairs = Vec::with_capacity(WARMUP + iters);
        for _ in 0..WARMUP + iters {
            let n = gen_exponent(bits, &mut rng)?;
            let x = modulus.element(random_below(modulus.value(), &mut rng))?;
            pairs.push((n, x));
        }
        inputs.push(pairs);
    }

    let mut samples = vec![Vec::with_capacity(iters); bit_sizes.len()];
    for round in 0..WARMUP + iters {
        for (s, pairs) in inputs.iter().enumerate() {
            let (n, x) = &pairs[round];
            let start = Instant::now();
            let y = cheb_eval(n, x);
            let elapsed = start.elapsed();
            std::hint::black_box(y);
            if round >= WARMUP {
                samples[s].push(elapsed);
            }
        }
    }

    let mut rows: Vec<BenchRow> = bit_sizes
        .iter()
        .zip(samples.iter_mut())
        .map(|(&bits, s)| {
            let mut row = BenchRow::new(RowKind::Cheb, format!("{bits}"));
            row.median = Some(median(s));
            row.iterations = iters;
            row
        })
        .collect();
    if let Some(base) = bit_sizes.iter().position(|&b| b == 128) {
        let base = rows[base].median.expect("set above").as_secs_f64();
        for r in &mut rows {
            r.ratio = r.median.map(|m| m.as_secs_f64() / base);
        }
    }
    Ok(BenchReport {
        title: "Chebyshev evaluation by degree size".into(),
        modulus_bits: Some(modulus.bits()),
        rows,
    })
}

fn check_ops(ev: &OpCounter, agt: &OpCounter) -> Result<(), BenchError> {
    let ev_ops = (ev.chebyshev_evals, ev.hash_calls);
    if ev_ops != EXPECTED_EV_OPS {
        return Err(BenchError::OpCountMismatch {
            party: Party::Ev,
            expected: format!("{EXPECTED_EV_OPS:?}"),
            actual: format!("{ev_ops:?}"),
        });
    }
    let agt_ops = (agt.chebyshev_evals, agt.online_hashes(), agt.total_hashes());
    if agt_ops != EXPECTED_AGT_OPS {
        return Err(BenchError::OpCountMismatch {
            party: Party::Agt,
            expected: format!("{EXPECTED_AGT_OPS:?}"),
            actual: format!("{agt_ops:?}"),
        });
    }
    Ok(())
}

/// Per-party median time for login plus authentication, with operation
/// counts checked on every run. Key material is generated once, outside
/// the timed region.
///
/// Two extra rows set the measured session total next to the sum of
/// isolated primitive timings (`7 T_c + 12 T_h`).
pub fn bench_protocol(
    iters: usize,
    modulus_bits: u64,
    seed: u64,
) -> Result<BenchReport, BenchError> {
    check_iters(iters)?;
    let config = if modulus_bits == 256 {
        WorldConfig::default_256()
    } else {
        WorldConfig::with_bits(modulus_bits)
    };
    let world = World::build(&config, seed)?;
    let params = &world.params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);

    let mut ev_t = Vec::with_capacity(iters);
    let mut agt_t = Vec::with_capacity(iters);
    let mut ops = (OpCounter::new(Party::Ev), OpCounter::new(Party::Agt));
    for i in 0..WARMUP + iters {
        let mut agt = world.agt.clone();
        let mut ev_ops = OpCounter::new(Party::Ev);
        let mut agt_ops = OpCounter::new(Party::Agt);

        let t0 = Instant::now();
        let (mut session, m1) = ev_login(
            &world.card,
            &world.ev_id,
            &world.password,
            params,
            &mut rng,
            &mut ev_ops,
        )?;
        let t1 = Instant::now();
        let m2 = agt_handle_login(&mut agt, &m1, params, &mut rng, &mut agt_ops)?;
        let t2 = Instant::now();
        let (m3, sk_ev) = ev_handle_response(
            &mut session,
            &world.card,
            &world.ev_id,
            &m2,
            params,
            &mut ev_ops,
        )?;
        let t3 = Instant::now();
        let sk_agt = agt_confirm(&mut agt, &m3, &mut agt_ops)?;
        let t4 = Instant::now();

        if sk_ev != sk_agt {
            return Err(ProtocolError::AuthUMismatch.into());
        }
        check_ops(&ev_ops, &agt_ops)?;
        if i >= WARMUP {
            ev_t.push((t1 - t0) + (t3 - t2));
            agt_t.push((t2 - t1) + (t4 - t3));
        }
        ops = (ev_ops, agt_ops);
    }

    let mut cheb_t = Vec::with_capacity(iters);
    let mut hash_t = Vec::with_capacity(iters);
    for i in 0..WARMUP + iters {
        let n = gen_exponent(DEFAULT_EXPONENT_BITS, &mut rng)?;
        let x = &params.pub_ta;
        let t0 = Instant::now();
        std::hint::black_box(cheb_eval(&n, x));
        let t1 = Instant::now();
        std::hint::black_box(hash(tag::PROTOCOL, &[&x.to_bytes_be(), &n.to_bytes_be()]));
        let t2 = Instant::now();
        if i >= WARMUP {
            cheb_t.push(t1 - t0);
            hash_t.push(t2 - t1);
        }
    }

    let (ev_ops, agt_ops) = ops;
    let ev_med = median(&mut ev_t);
    let agt_med = median(&mut agt_t);
    let t_c = median(&mut cheb_t);
    let t_h = median(&mut hash_t);

    let mut ev = BenchRow::new(RowKind::Party, "EV");
    ev.median = Some(ev_med);
    ev.iterations = iters;
    ev.cheb_ops = Some(ev_ops.chebyshev_evals);
    ev.hash_ops = Some(ev_ops.hash_calls);
    ev.hash_total = Some(ev_ops.total_hashes());

    let mut agt = BenchRow::new(RowKind::Party, "AGT");
    agt.median = Some(agt_med);
    agt.iterations = iters;
    agt.cheb_ops = Some(agt_ops.chebyshev_evals);
    agt.hash_ops = Some(agt_ops.online_hashes());
    agt.hash_total = Some(agt_ops.total_hashes());

    let mut total = BenchRow::new(RowKind::Party, "session-total");
    total.median = Some(ev_med + agt_med);
    total.iterations = iters;
    total.cheb_ops = Some(ev_ops.chebyshev_evals + agt_ops.chebyshev_evals);
    total.hash_ops = Some(ev_ops.hash_calls + agt_ops.online_hashes());

    let mut tc = BenchRow::new(RowKind::Isolated, "T_c");
    tc.median = Some(t_c);
    tc.iterations = iters;
    tc.cheb_ops = Some(1);

    let mut th = BenchRow::new(RowKind::Isolated, "T_h");
    th.median = Some(t_h);
    th.iterations = iters;
    th.hash_ops = Some(1);

    let cheb_n = total.cheb_ops.expect("set above");
    let hash_n = total.hash_ops.expect("set above");
    let mut sum = BenchRow::new(RowKind::Isolated, "isolated-sum");
    sum.median = Some(t_c * cheb_n as u32 + t_h * hash_n as u32);
    sum.iterations = iters;
    sum.cheb_ops = Some(cheb_n);
    sum.hash_ops = Some(hash_n);

    Ok(BenchReport {
        title: "Login and authentication per party".into(),
        modulus_bits: Some(params.modulus.bits()),
        rows: vec![ev, agt, total, tc, th, sum],
    })
}

/// Message and session sizes at the default widths.
pub fn report_sizes() -> BenchReport {
    let model = CostModel::default();
    let mut rows: Vec<BenchRow> = MsgType::ALL
        .iter()
        .map(|&t| {
            let mut r = BenchRow::new(RowKind::Size, t.name());
            r.bits = Some(model.message_bits(t));
            r
        })
        .collect();
    let mut total = BenchRow::new(RowKind::Size, "total");
    total.bits = Some(model.session_bits());
    rows.push(total);
    BenchReport {
        title: "Communication cost".into(),
        modulus_bits: Some(model.field_bits),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        let ms = Duration::from_millis;
        assert_eq!(median(&mut [ms(3), ms(1), ms(2)]), ms(2));
        assert_eq!(
            median(&mut [ms(4), ms(1), ms(2), ms(3)]),
            Duration::from_micros(2500)
        );
    }

    #[test]
    fn sizes() {
        let r = report_sizes();
        let bits: Vec<u64> = r.rows.iter().map(|r| r.bits.unwrap()).collect();
        assert_eq!(bits, vec![576, 416, 320, 1312]);
        assert_eq!(bits[..3].iter().sum::<u64>(), bits[3]);
    }

    #[test]
    fn flag_validation() {
        assert!(matches!(
            bench_cheb(&[128], 0, 256, 0),
            Err(BenchError::Iterations(0))
        ));
        assert!(matches!(
            bench_cheb(&[128], 99, 256, 0),
            Err(BenchError::Iterations(99))
        ));
        assert!(matches!(
            bench_cheb(&[32], 100, 256, 0),
            Err(BenchError::DegreeBits(32))
        ));
        assert!(matches!(
            bench_cheb(&[], 100, 256, 0),
            Err(BenchError::NoSizes)
        ));
        assert!(matches!(
            bench_protocol(10, 256, 0),
            Err(BenchError::Iterations(10))
        ));
    }

    #[test]
    fn cheb_report_shape() {
        let r = bench_cheb(&[128, 256], 100, 64, 1).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.modulus_bits, Some(64));
        assert!((r.rows[0].ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.rows.iter().all(|row| row.iterations == 100));
    }

    #[test]
    fn protocol_report_counts() {
        let r = bench_protocol(100, 64, 2).unwrap();
        let ev = r.row("EV").unwrap();
        assert_eq!((ev.cheb_ops, ev.hash_ops), (Some(5), Some(7)));
        let agt = r.row("AGT").unwrap();
        assert_eq!(
            (agt.cheb_ops, agt.hash_ops, agt.hash_total),
            (Some(2), Some(5), Some(6))
        );
        assert_eq!(r.row("isolated-sum").unwrap().hash_ops, Some(12));
    }

    #[test]
    fn csv_round_trip() {
        let r = report_sizes();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(rd.headers().unwrap(), REPORT_CSV_HEADER.as_slice());
        let bits: Vec<String> = rd
            .records()
            .map(|rec| rec.unwrap()[8].to_string())
            .collect();
        assert_eq!(bits, ["576", "416", "320", "1312"]);
    }
}
