//! Two-block oriented Hamiltonian cycles in decomposable regular bipartite
//! tournaments.
//!
//! A *decomposable* `k`-regular bipartite tournament on `4k` vertices is built
//! by repeatedly attaching a directed 4-cycle to a smaller decomposable host
//! and orienting every new cross pair so that the result stays regular. The
//! crate generates these hosts ([`gen`]), searches them for spanning copies
//! of `D(n, p)` ([`search`]), builds such copies constructively by inserting
//! 4-cycles into smaller witnesses ([`construct`]), and runs whole
//! verification campaigns over the family ([`harness`]).
//!
//! ```
//! use bt_cycles::{gen, search};
//!
//! let host = gen::exceptional(2).unwrap();
//! let found = search::find_all_p(&host, &search::SearchBudget::unbounded()).unwrap();
//! assert_eq!(found.present, vec![5]);
//! ```

pub mod construct;
pub mod digraph;
pub mod format;
pub mod gen;
pub mod harness;
pub mod iso;
pub mod patterns;
pub mod search;

pub use digraph::{Digraph, GraphError, Part, Vertex};
pub use gen::{Decomposition, ExtensionChoice};
pub use iso::{are_isomorphic, canonical_form, find_isomorphism, CanonicalForm};
pub use patterns::{TwoBlockSpec, WitnessCycle};
pub use search::{find_all_p, find_two_block, verify_witness, SearchBudget};
