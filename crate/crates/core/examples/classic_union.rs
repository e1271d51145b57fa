//! The three baseline enumerators on the same formula, with their delays.

use dnfenum::classic::{enum_flashlight, enum_union_ordered, enum_union_priority};
use dnfenum::{drive, parse_dnf, ModelEnumerator};

fn main() {
    let d = parse_dnf("c x1 x2 or not x3\np dnf 3 2\n1 2 0\n-3 0\n").expect("valid input");
    let runs: [(&str, Box<dyn ModelEnumerator>); 3] = [
        ("union-priority", Box::new(enum_union_priority(&d))),
        ("union-ordered", Box::new(enum_union_ordered(&d))),
        ("flashlight", Box::new(enum_flashlight(&d))),
    ];
    for (name, mut e) in runs {
        let mut models = Vec::new();
        let s = drive(&mut e, None, |m| models.push(m.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>()));
        println!("{name:15} {}  (max delay {}, avg {:.1})", models.join(" "), s.max_delay_steps, s.avg_delay_steps);
    }
}
