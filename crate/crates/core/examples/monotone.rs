//! The three monotone enumerators on the family of all terms of size n-1.

use dnfenum::monotone::{enum_monotone_avg, enum_monotone_log, enum_monotone_rs, MonotoneDnf};
use dnfenum::{drive, Dnf, Lit, ModelEnumerator, Term};

fn all_but_one(n: usize) -> MonotoneDnf {
    let terms = (1..=n).map(|skip| {
        Term::new((1..=n).filter(|&v| v != skip).map(|v| Lit::new(v, true)).collect()).expect("positive term")
    });
    MonotoneDnf::new(Dnf::new(n, terms).expect("valid")).expect("monotone")
}

fn main() {
    println!("{:>3} {:>8} {:>10} {:>10} {:>10}", "n", "models", "rs max", "avg avg", "log avg");
    for n in [8, 12, 16, 20] {
        let d = all_but_one(n);
        let run = |e: &mut dyn ModelEnumerator| drive(e, None, |_| {});
        let rs = run(&mut enum_monotone_rs(&d));
        let av = run(&mut enum_monotone_avg(&d));
        let lg = run(&mut enum_monotone_log(&d));
        assert_eq!(rs.n_models, lg.n_models);
        println!(
            "{n:>3} {:>8} {:>10} {:>10.2} {:>10.2}",
            rs.n_models, rs.max_delay_steps, av.avg_delay_steps, lg.avg_delay_steps
        );
    }
}
