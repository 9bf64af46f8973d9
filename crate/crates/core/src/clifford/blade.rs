//! Sign bookkeeping for basis monomials indexed by bitmask.

/// Sign of reordering `e_A e_B` into increasing generator order.
#[inline]
pub(crate) fn reorder_sign(a: usize, b: usize) -> i32 {
    let mut swaps = 0u32;
    let mut rest = a >> 1;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[inline]
pub(crate) fn grade(a: usize) -> u32 {
    a.count_ones()
}

/// `(−1)^{k(k−1)/2}` for a grade-`k` monomial.
#[inline]
pub(crate) fn reversal_sign(a: usize) -> i32 {
    let k = grade(a);
    if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[inline]
pub(crate) fn parity_sign(a: usize) -> i32 {
    if grade(a).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Number of set bits strictly below position `i`.
#[inline]
pub(crate) fn bits_below(a: usize, i: usize) -> u32 {
    (a & ((1usize << i) - 1)).count_ones()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs() {
        // e2 e1 = −e1 e2
        assert_eq!(reorder_sign(0b10, 0b01), -1);
        assert_eq!(reorder_sign(0b01, 0b10), 1);
        // (e1e2)(e1e2): e2 passes e1 once
        assert_eq!(reorder_sign(0b11, 0b11), -1);
        assert_eq!(reversal_sign(0b11), -1);
        assert_eq!(reversal_sign(0b111), -1);
        assert_eq!(reversal_sign(0b1111), 1);
        assert_eq!(bits_below(0b1011, 3), 2);
    }
}
