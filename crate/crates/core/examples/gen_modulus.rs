//! Prints a modulus certificate: `gen_modulus BITS FACTOR_BITS SEED`.

use chebyshev_auth::cheb::gen_modulus;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer argument"))
        .collect();
    let [bits, factor_bits, seed] = args[..] else {
        eprintln!("usage: gen_modulus BITS FACTOR_BITS SEED");
        std::process::exit(2);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = std::time::Instant::now();
    let cert = gen_modulus(bits, factor_bits, &mut rng).expect("search");
    eprintln!("found in {:?}", start.elapsed());
    print!("{cert}");
}
