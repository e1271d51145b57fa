//! Distinct unions of a set family.

use dnfenum::setunion::{enum_unions, SetFamily};
use dnfenum::drive;

fn main() {
    let f = SetFamily::new(5, [vec![1, 2], vec![2, 3], vec![5], vec![1, 2, 3]]).expect("elements in range");
    let s = drive(&mut enum_unions(&f), None, |u| {
        let elems: Vec<String> = u.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| (i + 1).to_string()).collect();
        println!("{{{}}}", elems.join(", "));
    });
    println!("{} distinct unions, average delay {:.1} steps", s.n_models, s.avg_delay_steps);
}
