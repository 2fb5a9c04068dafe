//! Enumerations and the prime-power pairing that schedule strategy
//! bookkeeping.
//!
//! The pairing assigns each (row, column) pair a distinct natural number so a
//! single game clock can interleave countably many sub-games: row `n` holds
//! the rounds `β(n, 0) < β(n, 1) < …`, and decoding a round number back to
//! its (row, column) pair is exact integer arithmetic (factor the round
//! number).  Rows are relabeled through `γ` so that row `n`'s first round
//! already exceeds every entry of the `n`-th enumerated finite sequence —
//! the property the product and power strategies lean on when they replay
//! recorded history positions.

mod enumeration;
mod pairing;

pub use enumeration::{
    cantor_pair, cantor_tuple, cantor_unpair, enum_finseq, enum_split_pairs, finseq_grade,
    range_of, FinSeq, RangeConstraint,
};
pub use pairing::{beta_star, is_prime_power, nth_prime, PairingFamily};
