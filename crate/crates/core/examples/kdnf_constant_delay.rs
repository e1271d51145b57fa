//! For a fixed width bound the worst delay of the k-DNF enumerator does
//! not grow with the number of terms.

use dnfenum::generate::{generate_dnf, GenKind};
use dnfenum::kdnf::{enum_kdnf, KdnfConfig};
use dnfenum::drive;

fn main() {
    let (n, k) = (30, 3);
    println!("{:>6} {:>10} {:>10} {:>8}", "m", "models", "max_delay", "guard");
    for m in [100, 1_000, 10_000] {
        let d = generate_dnf(GenKind::Kdnf, n, m, k, 1).expect("feasible");
        let mut e = enum_kdnf(&d, KdnfConfig::new(k)).expect("width <= k");
        let s = drive(&mut e, Some(200_000), |_| {});
        println!("{m:>6} {:>10} {:>10} {:>8}", s.n_models, s.max_delay_steps, e.guard_violations());
    }
}
