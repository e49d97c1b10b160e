//! File formats end to end: a network with its little-endian weight
//! blob, and a bit-packed spike trace, both round-tripped from disk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skydiver::cli::build_network;
use skydiver::io;
use skydiver::snn::SpikeTrain;

fn main() -> skydiver::Result<()> {
    let dir = std::env::temp_dir().join("skydiver-formats");
    std::fs::create_dir_all(&dir)?;

    let net = build_network("8x8-4C3-2C3", 1, 0.5, "roundtrip")?;
    let net_path = dir.join("net.json");
    io::save_network(&net, &net_path)?;
    let back = io::load_network(&net_path)?;
    println!(
        "network: {} layers, weights identical: {}",
        back.layers.len(),
        back == net
    );

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut train = SpikeTrain::zeros(20, 1, 8, 8);
    for b in train.bits.iter_mut() {
        *b = u8::from(rng.random_bool(0.1));
    }
    let trace_path = dir.join("input.spk");
    io::save_trace(&train, &trace_path)?;
    let size = std::fs::metadata(&trace_path)?.len();
    println!(
        "trace: {} spikes in {size} bytes ({} raw bits), lossless: {}",
        train.nnz(),
        20 * 64,
        io::load_trace(&trace_path)? == train
    );

    // Corrupt the trace and watch the loader fail closed.
    let mut bytes = std::fs::read(&trace_path)?;
    bytes.truncate(bytes.len() - 1);
    std::fs::write(&trace_path, &bytes)?;
    println!("truncated trace: {:?}", io::load_trace(&trace_path).unwrap_err());
    Ok(())
}
