//! Single integrate-and-fire neuron under a fixed drive: watch the
//! membrane ramp, cross threshold, and reset by subtraction.

fn main() -> skydiver::Result<()> {
    let v_th = 1.0;
    let mut vmem = 0.0;
    println!("t    z      vmem   spike");
    for t in 0..12 {
        let z = 0.3;
        let (next, fired) = skydiver::snn::lif_step(vmem, z, v_th)?;
        println!("{t:<4} {z:<6.2} {next:<6.2} {}", if fired { "*" } else { "" });
        vmem = next;
    }

    // Residual charge above threshold carries over instead of being
    // discarded, so a 2.5 jolt against v_th = 1.0 leaves 1.5 behind.
    let (after, fired) = skydiver::snn::lif_step(0.0, 2.5, v_th)?;
    println!("\nbig jolt: fired={fired}, residual vmem={after}");
    Ok(())
}
