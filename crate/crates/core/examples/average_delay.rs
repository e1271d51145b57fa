//! Average delay of the trie flashlight grows sublinearly in m.

use dnfenum::avg::{enum_avg, AvgMode};
use dnfenum::generate::{generate_dnf, GenKind};
use dnfenum::stats::log_log_slope;
use dnfenum::drive;

fn main() {
    let n = 16;
    let (mut ms, mut avgs) = (Vec::new(), Vec::new());
    println!("{:>5} {:>8} {:>10} {:>10}", "m", "models", "avg t10", "avg t11");
    for m in [64, 256, 1024, 4096] {
        let d = generate_dnf(GenKind::Random, n, m, n, 3).expect("feasible");
        let t10 = drive(&mut enum_avg(&d, AvgMode::MergeAlways), None, |_| {});
        let t11 = drive(&mut enum_avg(&d, AvgMode::SmallerSide), None, |_| {});
        println!("{m:>5} {:>8} {:>10.1} {:>10.1}", t11.n_models, t10.avg_delay_steps, t11.avg_delay_steps);
        ms.push(m as f64);
        avgs.push(t11.avg_delay_steps);
    }
    println!("log-log slope of the t11 average delay: {:.3}", log_log_slope(&ms, &avgs));
}
