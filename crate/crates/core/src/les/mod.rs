//! Deduction over exact triangles of graded abelian groups: split the long
//! exact sequence at the unknown corner, run named rules with a replayable
//! trace, and check candidates independently.

pub mod corollary;
pub mod family;
pub mod poincare;
pub mod puzzle;
pub mod rules;
pub mod solve;
pub mod verify;

pub use corollary::{corollary_check, Corollary, CorollaryReport};
pub use family::{embeds, Assignment, Component, Ext, Family, GradedKey, Term, Truth, VarInfo};
pub use poincare::{run_poincare, PoincareFacts, PoincareReport, Verdict};
pub use puzzle::{split_les, RankBound, SesSchema, Slot, TrianglePuzzle};
pub use rules::{check_step, Fact, Obj, Rule, Step, Trace};
pub use solve::{apply_rules, given_facts, replay, solution_set, Deduction, Pruned, Solution};
pub use verify::{hom_ker_coker, ses_exists, verify_solution, MapWitness, Verification, VerifyOptions, Witness};
