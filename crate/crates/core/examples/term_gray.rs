//! Models of a single term in Gray order: each output flips one variable.

use dnfenum::graycode::enum_term_models;
use dnfenum::{drive, Term};

fn main() {
    let n = 5;
    let term = Term::from_dimacs(&[1, -4]).expect("consistent term");
    let mut e = enum_term_models(&term, n);
    let mut prev: Option<Vec<bool>> = None;
    let stats = drive(&mut e, None, |m| {
        let bits: String = m.iter().map(|&b| if b { '1' } else { '0' }).collect();
        match &prev {
            None => println!("{bits}"),
            Some(p) => {
                let flip = p.iter().zip(m).position(|(a, b)| a != b).expect("distinct") + 1;
                println!("{bits}  flip x{flip}");
            }
        }
        prev = Some(m.to_vec());
    });
    println!("{} models, max delay {} steps", stats.n_models, stats.max_delay_steps);
}
