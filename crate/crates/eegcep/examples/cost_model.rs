//! The multiplication-count model of per-frame feature extraction.
//!
//! Run with `cargo run --example cost_model`.

use eegcep::cost::{estimate_cost, CostParams};

fn main() -> eegcep::Result<()> {
    let reference = CostParams {
        channels: 7,
        frame_len: 2048,
        num_filters: 40,
        retained: 12,
    };
    println!(
        "reference configuration (7ch, N=2048, M=40, L=12): {} multiplications",
        estimate_cost(&reference)?
    );

    println!("\n   N      total     per-channel");
    for frame_len in [256u64, 512, 1024, 2048, 4096] {
        let p = CostParams {
            frame_len,
            ..reference
        };
        let total = estimate_cost(&p)?;
        println!("{frame_len:>6} {total:>10} {:>12}", total / p.channels);
    }

    println!("\nthe mel filtering term M*N dominates; halving the frame");
    println!("roughly halves the budget while the DCT term M*L stays fixed");
    Ok(())
}
