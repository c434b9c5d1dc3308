//! NSGA-II: non-dominated sorting, crowding distance, real-coded variation
//! operators and an elitist generational loop. All objectives are minimized.

pub mod crowding;
pub mod engine;
pub mod operators;
pub mod sort;

pub use crowding::{crowding_distance, INFINITE_CROWDING};
pub use engine::{
    evolve, rank_and_crowd, select_survivors, Evolution, GaConfig, GenerationRecord, Individual,
    Population,
};
pub use operators::{
    polynomial_mutate_gene, polynomial_mutation, sbx_beta, sbx_crossover, sbx_pair,
    tournament_select, GeneBounds, Ranked,
};
pub use sort::{dominates, nondominated_sort};
