//! Shared inputs for the benchmarks.

use sl2kirby::chord::generate_all;
use sl2kirby::ChordDiagram;

/// All diagrams of the given degree on one and two circles.
pub fn diagrams(degree: usize) -> Vec<ChordDiagram> {
    (1..=2).flat_map(|c| generate_all(degree, c)).collect()
}
