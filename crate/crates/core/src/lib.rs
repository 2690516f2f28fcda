//! Mealy automata and the (semi)groups they generate.
//!
//! The crate models complete letter-to-letter transducers, the action of
//! their state words on finite and eventually periodic infinite words, and
//! the combinatorial machinery built on top of that action:
//!
//! * structural transforms: dual, inverse, enrichment, sink-identified
//!   union, minimization ([`automaton`]);
//! * boundary dynamics — stabilizers, orbit and level graphs, singular
//!   points and one-point surgeries on orbital graphs ([`group`]);
//! * helix graphs and the commuting state/letter word pairs they encode
//!   ([`helix`]);
//! * nuclei of contracting actions, stable automata and the Büchi view of
//!   singular sets ([`contracting`]);
//! * the tile view: every transducer is a Wang tileset, and the bridges run
//!   both ways ([`tilings`]).
//!
//! Words compose right to left: in `u = h g`, state `g` touches the word
//! first.  All searches that are only semi-decidable take explicit budgets
//! and report exhaustion instead of guessing.

pub mod automaton;
pub mod contracting;
pub mod error;
pub mod format;
pub mod graph;
pub mod group;
pub mod helix;
pub mod tilings;
pub mod words;

pub use automaton::{ClassReport, ComponentReport, MealyAutomaton, PartialMealy};
pub use error::{Error, Result};
pub use words::{Epw, LetterWord, SignedState, StateWord};

#[cfg(test)]
pub(crate) mod testkit {
    use crate::automaton::MealyAutomaton;
    use crate::format::parse_automaton;

    macro_rules! corpus_fn {
        ($name:ident, $file:literal) => {
            pub(crate) fn $name() -> MealyAutomaton {
                parse_automaton(include_str!(concat!("../../../corpus/", $file))).unwrap()
            }
        };
    }

    corpus_fn!(lamplighter, "lamplighter.mealy");
    corpus_fn!(basilica, "basilica.mealy");
    corpus_fn!(hanoi, "hanoi3.mealy");
    corpus_fn!(grigorchuk_twisted, "grigorchuk_twisted.mealy");
    corpus_fn!(identity2, "identity.mealy");
    corpus_fn!(swaponce, "swaponce.mealy");
    corpus_fn!(persist3, "persist3.mealy");
    corpus_fn!(bireversible2, "bireversible2.mealy");
    corpus_fn!(reset, "reset.mealy");
    corpus_fn!(twosinks, "twosinks.mealy");
}
