//! Context-free languages and algebraic power series as coalgebras.
//!
//! Three interconvertible representations share one derivative interface:
//! GNF grammar coalgebras over polynomials ([`grammar`]), syntactic systems
//! of behavioural differential equations over terms ([`terms`]), and closed
//! guarded μ-expressions ([`muexpr`]). [`equivalence`] compares states of any
//! of them; [`powerset_ext`] implements the idempotent semiring on
//! behaviour pairs of weak-GNF systems.

pub mod alphabet;
pub mod equivalence;
pub mod error;
pub mod grammar;
pub mod muexpr;
pub mod powerset_ext;
pub mod semiring;
pub mod syntax;
pub mod terms;

pub use alphabet::{Alphabet, Letter, Word};
pub use equivalence::{bisim_upto, word_equiv, EquivResult, Evidence, State, Stepper};
pub use error::{Error, Result};
pub use grammar::{CFGrammar, GrammarSystem, Monomial, Polynomial, Symbol};
pub use muexpr::{ClosedMuExpr, MuAssignment, MuExpr, MuKind};
pub use semiring::{embed_indicator, Boolean, Natural, Semiring, SemiringKind};
pub use syntax::{FileKind, GrammarFile, Header, MuFile, TermsFile};
pub use terms::{ExtendedNonterminal, Term, TermKind, TermSystem};
