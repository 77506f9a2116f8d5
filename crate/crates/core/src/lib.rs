//! Robust, dynamic and prompt linear temporal logics on ultimately periodic
//! traces, their automata, model checking and games.

pub mod alphabet;
pub mod apa;
pub mod games;
pub mod gen;
pub mod graph;
pub mod guards;
pub mod lasso;
pub mod mc;
pub mod omega;
pub mod oracle;
pub mod prompt;
pub mod syntax;
pub mod translate;
pub mod truth4;

pub use alphabet::{Alphabet, Letter};
pub use lasso::LassoTrace;
pub use syntax::{Formula, Guard, LogicId, PropFormula};
pub use truth4::TruthValue4;
