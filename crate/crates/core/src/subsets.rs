//! Bitmask subset enumeration in canonical order.

/// Nonempty submasks of `universe`, ordered by cardinality and then
/// lexicographically by their sorted member lists.
pub(crate) fn canonical_submasks(universe: u64) -> CanonicalSubmasks {
    let positions: Vec<u32> = (0..64).filter(|b| universe & (1u64 << b) != 0).collect();
    CanonicalSubmasks { positions, combo: Vec::new(), size: 0 }
}

pub(crate) struct CanonicalSubmasks {
    positions: Vec<u32>,
    // Indices into `positions` of the current combination.
    combo: Vec<usize>,
    size: usize,
}

impl CanonicalSubmasks {
    fn advance(&mut self) -> bool {
        let len = self.positions.len();
        let k = self.size;
        if k == 0 || k > len {
            return false;
        }
        // Rightmost index that can still move right.
        let mut idx = k;
        while idx > 0 {
            idx -= 1;
            if self.combo[idx] < len - k + idx {
                self.combo[idx] += 1;
                for t in idx + 1..k {
                    self.combo[t] = self.combo[t - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for CanonicalSubmasks {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let len = self.positions.len();
        if self.size == 0 || !self.advance() {
            self.size += 1;
            if self.size > len {
                return None;
            }
            self.combo = (0..self.size).collect();
        }
        Some(self.combo.iter().fold(0u64, |m, &c| m | (1u64 << self.positions[c])))
    }
}

/// Mask with the low `n` bits set.
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Nonempty submasks of `universe` in an unspecified but fixed order.
pub(crate) fn submasks(universe: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(universe);
    std::iter::from_fn(move || {
        let cur = next?;
        if cur == 0 {
            next = None;
            return None;
        }
        next = Some((cur - 1) & universe);
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn members(mask: u64) -> Vec<u32> {
        (0..64).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
    }

    #[test]
    fn canonical_order_on_three() {
        let got: Vec<Vec<u32>> = canonical_submasks(0b111).map(members).collect();
        let want = vec![vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]];
        assert_eq!(got, want);
    }

    #[test]
    fn canonical_order_respects_gaps() {
        let got: Vec<Vec<u32>> = canonical_submasks(0b10110).map(members).collect();
        assert_eq!(got[0], vec![2]);
        assert_eq!(got[3], vec![2, 3]);
        assert_eq!(got.len(), 7);
        assert_eq!(canonical_submasks(0).count(), 0);
    }

    #[test]
    fn counts_match_binomials() {
        for n in 0..12usize {
            assert_eq!(canonical_submasks(full_mask(n)).count(), (1usize << n) - 1);
            assert_eq!(submasks(full_mask(n)).count(), (1usize << n) - 1);
        }
    }
}
