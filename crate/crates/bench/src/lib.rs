//! Fixed inputs shared by the benchmarks.

/// Semiprimes `p * q` where `p - 1` is 13-smooth, with their totients.
pub const SMOOTH_SEMIPRIMES: [(u64, u64, u64); 3] = [
    (2_311 * 10_007, 2_311, 10_007),
    (30_241 * 1_000_003, 30_241, 1_000_003),
    (180_181 * 998_244_353, 180_181, 998_244_353),
];

/// Products whose prime factors are all `1 mod A`, as `(d, A, k)`.
pub const BASE_A_CASES: [(u64, u64, u32); 3] = [(91, 6, 2), (1_891, 30, 2), (61 * 181 * 241, 60, 3)];

pub fn totient(p: u64, q: u64) -> u64 {
    (p - 1) * (q - 1)
}
