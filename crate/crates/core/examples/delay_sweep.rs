//! CSV of delay statistics over generated instances, as `dnfenum sweep` prints.

use std::io;

use dnfenum::cli::{sweep, Algo, AlgoSpec, Kind};

fn main() {
    let spec = AlgoSpec::new(Algo::Avg);
    sweep(Kind::Random, 12, Some(4), &[64, 256, 1024], 0, &spec, true, &mut io::stdout().lock())
        .expect("sweep succeeds");
}
