//! Recursion frames of the k-DNF enumerator: each model is output by
//! exactly one frame, and frames partition the model set.

use std::collections::BTreeMap;

use dnfenum::kdnf::{enum_kdnf, KdnfConfig};
use dnfenum::{ModelEnumerator, parse_dnf};

fn main() {
    let d = parse_dnf("p dnf 6 4\n1 2 0\n-1 3 0\n4 -5 0\n2 6 0\n").expect("valid input");
    let mut e = enum_kdnf(&d, KdnfConfig::new(2)).expect("width <= 2").with_frame_log();
    let mut per_frame: BTreeMap<u32, usize> = BTreeMap::new();
    while e.next_model().is_some() {
        *per_frame.entry(e.last_frame().expect("a frame produced it")).or_default() += 1;
    }
    for f in e.frames() {
        let n = per_frame.get(&f.id).copied().unwrap_or(0);
        println!("frame {:>2} parent {:>4} prefix {:?} term {:?}: {n} models", f.id, format!("{:?}", f.parent), f.prefix, f.chosen);
    }
}
