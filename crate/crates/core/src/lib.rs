//! Knowledge compilation by recording exhaustive DPLL search as a reduced NNF DAG:
//! free, ordered and decomposed search yield FBDD, OBDD and decision-DNNF circuits.

pub mod cnf;
pub mod compiler;
pub mod lang_check;
pub mod nnf;
pub mod queries;
