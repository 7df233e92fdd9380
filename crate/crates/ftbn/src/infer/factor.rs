//! Factor tables and the arithmetic behind variable elimination.
//!
//! A factor is a nonnegative table over a scope of variables, identified
//! here by dense indices into the network's node list. Scopes are kept
//! sorted and tables row-major (last scope variable fastest), so every
//! operation visits cells in one fixed order and results are bitwise
//! reproducible.

use crate::index;

#[derive(Debug, Clone)]
pub(crate) struct Factor {
    /// Scope as strictly ascending node indices.
    pub scope: Vec<usize>,
    pub cards: Vec<usize>,
    pub data: Vec<f64>,
}

impl Factor {
    pub fn scalar(value: f64) -> Self {
        Factor {
            scope: Vec::new(),
            cards: Vec::new(),
            data: vec![value],
        }
    }

    /// Builds the factor for one CPT: scope = parents ∪ {child}, data
    /// permuted from the row layout into sorted-scope layout.
    pub fn from_cpt(
        child: usize,
        child_card: usize,
        parents: &[usize],
        parent_cards: &[usize],
        rows: &[Vec<f64>],
    ) -> Self {
        let mut scope: Vec<usize> = parents.iter().copied().chain([child]).collect();
        scope.sort_unstable();
        scope.dedup();
        debug_assert_eq!(scope.len(), parents.len() + 1, "child repeated in parents");

        let cards: Vec<usize> = scope
            .iter()
            .map(|&v| {
                if v == child {
                    child_card
                } else {
                    let i = parents.iter().position(|&p| p == v).unwrap();
                    parent_cards[i]
                }
            })
            .collect();

        let parent_strides = index::strides(parent_cards);
        let mut data = vec![0.0; index::table_len(&cards).expect("factor fits in memory")];
        let mut odo = index::Odometer::new(&cards);
        let mut linear = 0;
        while let Some(states) = odo.current() {
            let mut row = 0;
            let mut child_state = 0;
            for (slot, &v) in scope.iter().enumerate() {
                if v == child {
                    child_state = states[slot];
                } else {
                    let i = parents.iter().position(|&p| p == v).unwrap();
                    row += parent_strides[i] * states[slot];
                }
            }
            data[linear] = rows[row][child_state];
            linear += 1;
            odo.advance();
        }
        Factor { scope, cards, data }
    }

    pub fn card_of(&self, var: usize) -> Option<usize> {
        self.scope
            .iter()
            .position(|&v| v == var)
            .map(|i| self.cards[i])
    }

    pub fn contains(&self, var: usize) -> bool {
        self.scope.contains(&var)
    }

    /// Pointwise product over the union scope.
    pub fn product(&self, other: &Factor) -> Factor {
        let mut scope: Vec<usize> = self.scope.iter().chain(&other.scope).copied().collect();
        scope.sort_unstable();
        scope.dedup();
        let cards: Vec<usize> = scope
            .iter()
            .map(|&v| self.card_of(v).or_else(|| other.card_of(v)).unwrap())
            .collect();

        let stride_into = |f: &Factor| -> Vec<usize> {
            let own = index::strides(&f.cards);
            scope
                .iter()
                .map(|&v| f.scope.iter().position(|&w| w == v).map_or(0, |i| own[i]))
                .collect()
        };
        let sa = stride_into(self);
        let sb = stride_into(other);

        let mut data = vec![0.0; index::table_len(&cards).expect("factor fits in memory")];
        let mut odo = index::Odometer::new(&cards);
        let mut linear = 0;
        while let Some(states) = odo.current() {
            let mut ia = 0;
            let mut ib = 0;
            for (slot, &s) in states.iter().enumerate() {
                ia += sa[slot] * s;
                ib += sb[slot] * s;
            }
            data[linear] = self.data[ia] * other.data[ib];
            linear += 1;
            odo.advance();
        }
        Factor { scope, cards, data }
    }

    /// Sums the variable out of the scope. Summation follows table order,
    /// so results do not depend on any schedule.
    pub fn sum_out(&self, var: usize) -> Factor {
        let Some(pos) = self.scope.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let scope: Vec<usize> = self.scope.iter().copied().filter(|&v| v != var).collect();
        let cards: Vec<usize> = self
            .scope
            .iter()
            .zip(&self.cards)
            .filter(|(&v, _)| v != var)
            .map(|(_, &c)| c)
            .collect();
        let out_strides = index::strides(&cards);
        let mut data = vec![0.0; index::table_len(&cards).expect("factor fits in memory")];

        let mut odo = index::Odometer::new(&self.cards);
        let mut linear = 0;
        while let Some(states) = odo.current() {
            let mut out = 0;
            let mut slot_out = 0;
            for (slot, &s) in states.iter().enumerate() {
                if slot != pos {
                    out += out_strides[slot_out] * s;
                    slot_out += 1;
                }
            }
            data[out] += self.data[linear];
            linear += 1;
            odo.advance();
        }
        Factor { scope, cards, data }
    }

    /// Fixes a variable to one state, dropping it from the scope.
    pub fn reduce(&self, var: usize, state: usize) -> Factor {
        let Some(pos) = self.scope.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let scope: Vec<usize> = self.scope.iter().copied().filter(|&v| v != var).collect();
        let cards: Vec<usize> = self
            .scope
            .iter()
            .zip(&self.cards)
            .filter(|(&v, _)| v != var)
            .map(|(_, &c)| c)
            .collect();
        let mut data = Vec::with_capacity(index::table_len(&cards).expect("fits"));
        let mut odo = index::Odometer::new(&self.cards);
        let mut linear = 0;
        while let Some(states) = odo.current() {
            if states[pos] == state {
                data.push(self.data[linear]);
            }
            linear += 1;
            odo.advance();
        }
        Factor { scope, cards, data }
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cpt_factor_permutes_into_sorted_scope() {
        // child index 0, parent index 2: scope must be [0, 2]
        let rows = vec![vec![0.9, 0.1], vec![0.2, 0.8]];
        let f = Factor::from_cpt(0, 2, &[2], &[2], &rows);
        assert_eq!(f.scope, vec![0, 2]);
        // entry (child=1, parent=0) = rows[0][1]
        assert_eq!(f.data[2], 0.1);
        // entry (child=0, parent=1) = rows[1][0]
        assert_eq!(f.data[1], 0.2);
    }

    #[test]
    fn product_and_sum_out() {
        // f(a) * g(a, b), then sum out a = marginal over b
        let f = Factor {
            scope: vec![0],
            cards: vec![2],
            data: vec![0.6, 0.4],
        };
        let g = Factor {
            scope: vec![0, 1],
            cards: vec![2, 2],
            data: vec![0.9, 0.1, 0.2, 0.8],
        };
        let joint = f.product(&g);
        assert_eq!(joint.scope, vec![0, 1]);
        let expected = [0.6 * 0.9, 0.6 * 0.1, 0.4 * 0.2, 0.4 * 0.8];
        for (a, b) in joint.data.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let m = joint.sum_out(0);
        assert_eq!(m.scope, vec![1]);
        assert!((m.data[0] - (0.54 + 0.08)).abs() < 1e-15);
        assert!((m.data[1] - (0.06 + 0.32)).abs() < 1e-15);
        assert!((m.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduce_slices_one_state() {
        let g = Factor {
            scope: vec![0, 1],
            cards: vec![2, 3],
            data: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
        };
        let r = g.reduce(1, 2);
        assert_eq!(r.scope, vec![0]);
        assert_eq!(r.data, vec![3.0, 6.0]);
        let r0 = g.reduce(0, 0);
        assert_eq!(r0.data, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn scalar_factors_multiply() {
        let s = Factor::scalar(0.5);
        let t = Factor::scalar(0.25);
        let p = s.product(&t);
        assert!(p.scope.is_empty());
        assert_eq!(p.data, vec![0.125]);
        assert_eq!(p.total(), 0.125);
    }
}
