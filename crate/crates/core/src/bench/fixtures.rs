use crate::kb::{Assertion, Concept, Weight, WeightedKB};

/// The visa KB: two hard disjointness axioms, a soft default, and two
/// conflicting soft assertions about `p`.
pub fn visa_fixture() -> WeightedKB {
    WeightedKB::new()
        .with_inclusion(Concept::and(Concept::name("Visa"), Concept::name("NoVisa")), Concept::Bot, Weight::Infinite)
        .with_inclusion(
            Concept::and(
                Concept::exists("hasNat", Concept::nominal("c")),
                Concept::exists("hasNat", Concept::nominal("b")),
            ),
            Concept::Bot,
            Weight::Infinite,
        )
        .with_inclusion(
            Concept::forall("hasNat", Concept::not(Concept::nominal("c"))),
            Concept::name("Visa"),
            Weight::Finite(1),
        )
        .with_assertion(Assertion::role("hasNat", "p", "b"), Weight::Finite(1))
        .with_assertion(Assertion::concept("NoVisa", "p"), Weight::Finite(2))
}
