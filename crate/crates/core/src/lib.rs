//! Graph-controlled permutation mixers for flexible job-shop scheduling.
//!
//! A schedule is encoded as a bit string over assignments
//! `(job, operation, machine, start)`. The constraint graph joins every
//! pair of assignments that cannot both be selected, so feasible schedules
//! are exactly the independent sets with one mark per operation. Mixers
//! built from that graph move amplitude only between feasible schedules.
//!
//! ```
//! use fjsp_mixer::{fixtures, graph::{build_graph, enumerate_feasible}, instance::build_index};
//!
//! let inst = fixtures::two_jobs();
//! let index = build_index(&inst);
//! let g = build_graph(&inst, &index);
//! assert_eq!(g.vertex_count(), 10);
//! assert_eq!(enumerate_feasible(&g).unwrap().len(), 4);
//! ```

pub mod bits;
pub mod circuit;
pub mod cli;
pub mod control;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod instance;
pub mod qaoa;
pub mod resources;
pub mod sim;

pub use bits::BitString;
pub use error::{Error, Result};
