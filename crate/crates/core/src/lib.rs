//! Numerical engine for iterated weighted sieve bounds.

pub mod classical;
pub mod constants;
pub mod empirical;
pub mod numerics;
pub mod part1;
pub mod part2;
pub mod reference;
pub mod table;
