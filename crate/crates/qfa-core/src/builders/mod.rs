//! Machine constructions.

pub(crate) mod compile;
pub mod cores;
pub mod corpus;
pub mod eps;
pub mod fragments;
pub mod interp;
pub mod pppal;
pub mod rpal;
pub mod view;
pub mod zoo;

pub use cores::{eq_core, pal_core, rw_gate};
pub use corpus::{format_regex, negative_corpus, DefectClass, NegativeCase};
pub use eps::{Epsilon, EpsilonError};
pub use fragments::{
    build_eq_core, build_pal_check, build_pal_core, build_rw_gate, build_same_length,
    build_twice_as_long, tokenize, BuildError, MachineFragment, TokenView,
};
pub use interp::{interpret, Call, InterpError, InterpMode, Interpreter, Plan, Template};
pub use pppal::{compile_pppal, compile_pppal_with};
pub use rpal::{compile_rpal, compile_rpal_with};
pub use view::{LeftMode, Pred, Token, VSym, View};
pub use zoo::{regression_zoo, ZooEntry};
