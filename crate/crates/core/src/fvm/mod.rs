//! Full-view state-space decoder block.
