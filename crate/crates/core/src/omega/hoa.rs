//! HOA-flavoured text dumps of the tracking automaton and the reached
//! fragment of the determinized automaton. The alphabet is indexed by
//! closure formulas rather than atomic propositions, so letters are printed
//! symbolically; the dumps are meant for inspection and cross-checking, not
//! for strict HOA consumers.

use std::fmt::Write;

use crate::tracking::TrackingNpa;

use super::Dpa;

pub fn dump_npa(npa: &TrackingNpa) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "HOA: v1");
    let _ = writeln!(out, "name: \"tracking automaton\"");
    let _ = writeln!(out, "States: {}", npa.num_states());
    let _ = writeln!(out, "Start: {}", npa.initial());
    let _ = writeln!(out, "acc-name: parity max even {}", npa.max_priority());
    let _ = writeln!(out, "properties: trans-acc symbolic-alphabet");
    let _ = writeln!(out, "--BODY--");
    for id in 0..npa.num_states() as u32 {
        let _ = writeln!(out, "State: {} \"{}\"", id, npa.display(id));
        let label = [id].into_iter().collect();
        for letter in npa.letters_for(&label).letters() {
            for succ in npa.delta(id, &letter) {
                let prio = npa.priority(id, &letter, succ);
                let _ = writeln!(out, "  [{}] {} {{{}}}", letter, succ, prio);
            }
        }
    }
    let _ = writeln!(out, "--END--");
    out
}

pub fn dump_dpa(dpa: &Dpa) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "HOA: v1");
    let _ = writeln!(out, "name: \"determinized complemented tracking automaton (reached fragment)\"");
    let _ = writeln!(out, "States: {}", dpa.num_states());
    let _ = writeln!(out, "Start: {}", dpa.initial());
    let _ = writeln!(out, "acc-name: parity max even {}", dpa.priority_bound());
    let _ = writeln!(out, "properties: deterministic trans-acc symbolic-alphabet");
    let _ = writeln!(out, "--BODY--");
    for id in 0..dpa.num_states() as u32 {
        let label: Vec<String> = dpa.label(id).iter().map(|f| f.to_string()).collect();
        let _ = writeln!(out, "State: {} \"{{{}}}\"", id, label.join(","));
        for (letter, succ, prio) in dpa.reached_transitions_from(id) {
            let _ = writeln!(out, "  [{}] {} {{{}}}", letter, succ, prio);
        }
    }
    let _ = writeln!(out, "--END--");
    out
}
