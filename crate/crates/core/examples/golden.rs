//! Regenerates the golden frames in `tests/fixtures/` from a seeded
//! session over the built-in 256-bit modulus.
//!
//! cargo run -p chebyshev-auth --example golden

use std::fs;
use std::path::Path;

use chebyshev_auth::harness::{run_session, MemoryTransport, World, WorldConfig};

const SEED: u64 = 2024;
const NAMES: [&str; 3] = ["login_request", "agt_response", "ev_confirm"];

fn main() {
    let world = World::build(&WorldConfig::default_256(), SEED).expect("world");
    let out = run_session(&world, SEED, &[], &mut MemoryTransport::new()).expect("session");
    assert!(out.keys_agree());
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    fs::create_dir_all(&dir).expect("fixture dir");
    for (entry, name) in out.transcript.entries().iter().zip(NAMES) {
        let mut text = String::new();
        for chunk in entry.frame.chunks(16) {
            for b in chunk {
                text.push_str(&format!("{b:02x}"));
            }
            text.push('\n');
        }
        let path = dir.join(format!("{name}.hex"));
        fs::write(&path, text).expect("write fixture");
        println!("{} ({} bytes)", path.display(), entry.frame.len());
    }
}
