//! The cash management scheduling problem: instance data, the two-bit cell
//! encoding, transaction cost, hard constraints and penalties, random
//! instance generation and the satisfiability cap.

pub mod generate;
pub mod instance;
pub mod schedule;
pub mod score;

pub use generate::{default_daily_limit, generate_instance, max_satisfiable, DEFAULT_SEARCH_LIMIT};
pub use instance::{CmpInstance, LEVELS, V_HIGH, V_LOW};
pub use schedule::{CashSchedule, ConstraintReport};
pub use score::{score_words, Score, Scorer, TABLE_LIMIT};
