//! Fixed enumeration of ℕ×ℕ along anti-diagonals:
//! (1,1), (1,2), (2,1), (1,3), (2,2), (3,1), ...

/// The `i`-th pair (1-based).
pub fn pair(i: u64) -> (u64, u64) {
    assert!(i >= 1, "enumeration is 1-based");
    // diagonal d holds the pairs with a + b = d + 1, d >= 1
    let mut d = 1u64;
    let mut before = 0u64;
    while before + d < i {
        before += d;
        d += 1;
    }
    let a = i - before;
    (a, d + 1 - a)
}

/// Inverse of [`pair`].
pub fn index(a: u64, b: u64) -> u64 {
    assert!(a >= 1 && b >= 1);
    let d = a + b - 1;
    d * (d - 1) / 2 + a
}

pub const TAG: &str = "cantor-diagonal";
