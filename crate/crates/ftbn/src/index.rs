//! Mixed-radix indexing shared by CPT expansion and factor arithmetic.
//!
//! A table over variables with cardinalities `cards` is stored row-major
//! with the *last* variable varying fastest, so the linear index of an
//! assignment is its mixed-radix value in declared order.

/// Stride of each position: `strides[i]` = product of `cards[i + 1..]`.
pub(crate) fn strides(cards: &[usize]) -> Vec<usize> {
    let mut out = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * cards[i + 1];
    }
    out
}

/// Total number of assignments; `None` on overflow.
pub(crate) fn table_len(cards: &[usize]) -> Option<usize> {
    cards.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c))
}

/// Decodes a linear index into one state per position.
#[cfg(test)]
pub(crate) fn decode(mut linear: usize, cards: &[usize]) -> Vec<usize> {
    let mut out = vec![0; cards.len()];
    for i in (0..cards.len()).rev() {
        out[i] = linear % cards[i];
        linear /= cards[i];
    }
    out
}

/// Iterates all assignments in linear-index order, reusing one buffer.
pub(crate) struct Odometer {
    cards: Vec<usize>,
    state: Vec<usize>,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(cards: &[usize]) -> Self {
        Odometer {
            cards: cards.to_vec(),
            state: vec![0; cards.len()],
            done: cards.contains(&0),
        }
    }

    /// Current assignment, or `None` once exhausted.
    pub(crate) fn current(&self) -> Option<&[usize]> {
        if self.done {
            None
        } else {
            Some(&self.state)
        }
    }

    /// Advances to the next assignment.
    pub(crate) fn advance(&mut self) {
        if self.done {
            return;
        }
        for i in (0..self.cards.len()).rev() {
            self.state[i] += 1;
            if self.state[i] < self.cards[i] {
                return;
            }
            self.state[i] = 0;
        }
        self.done = true;
    }
}
