//! Shared inputs for the benchmarks.

use ddrs_core::{builtin_system, parse, RewriteSystem, SystemId, Term, Variant};

pub fn system(id: SystemId) -> RewriteSystem {
    builtin_system(id, Variant::Edited).expect("built-in system")
}

pub fn term(text: &str) -> Term {
    parse(text).expect("benchmark term")
}

/// A sum of products whose normal form is a multi-digit numeral.
pub fn arithmetic_workload(id: SystemId) -> Term {
    match id {
        SystemId::NBud | SystemId::ZBud => term("((1 :b1 :b0 :b1) * (1 :b1 :b1)) + ((1 :b0 :b1) * (1 :b1 :b0 :b1))"),
        SystemId::NDub | SystemId::ZDub => term("((4 :d7) * (3 :d9)) + ((1 :d2 :d5) * 8)"),
        SystemId::NBt | SystemId::ZBt => term("((1 ^b 1) ^b 0) * ((1 ^b 0) ^b 1)"),
        SystemId::NDt | SystemId::ZDt => term("((4 ^d 7) * (3 ^d 9)) + 8"),
        SystemId::ZR => term("((1 + 1) + 1) * ((1 + 1) + -(1))"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ddrs_core::rewrite::DEFAULT_MAX_STEPS;
    use ddrs_core::{canonical, eval, normalize, Representation, Strategy};

    #[test]
    fn workloads_reach_their_numerals() {
        for id in SystemId::ALL {
            let sys = system(id);
            let t = arithmetic_workload(id);
            let expected = canonical(&eval(&t).unwrap(), Representation::for_system(&sys));
            let out = normalize(&sys, &t, Strategy::LeftmostInnermost, DEFAULT_MAX_STEPS);
            assert_eq!(out.normal_form(), Some(&expected), "{}", sys.label());
        }
    }
}
