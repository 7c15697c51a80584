//! Ultimately periodic words `stem · cycle^ω`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UpWord<T> {
    pub stem: Vec<T>,
    pub cycle: Vec<T>,
}

impl<T: Clone + PartialEq> UpWord<T> {
    /// Panics if `cycle` is empty.
    pub fn new(stem: Vec<T>, cycle: Vec<T>) -> Self {
        assert!(!cycle.is_empty(), "ultimately periodic word needs a nonempty cycle");
        UpWord { stem, cycle }
    }

    pub fn constant(letter: T) -> Self {
        UpWord::new(Vec::new(), vec![letter])
    }

    pub fn at(&self, i: usize) -> &T {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// Number of positions before the word becomes periodic plus one period.
    pub fn span(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn map<U: Clone + PartialEq>(&self, f: impl Fn(&T) -> U) -> UpWord<U> {
        UpWord {
            stem: self.stem.iter().map(&f).collect(),
            cycle: self.cycle.iter().map(&f).collect(),
        }
    }

    /// Unique representation: primitive cycle, shortest stem.
    pub fn canonical(&self) -> Self {
        let n = self.cycle.len();
        let mut p = n;
        for d in 1..n {
            if n % d == 0 && (0..n).all(|i| self.cycle[i] == self.cycle[i % d]) {
                p = d;
                break;
            }
        }
        let mut stem = self.stem.clone();
        let mut cycle: Vec<T> = self.cycle[..p].to_vec();
        while let Some(last) = stem.last() {
            if *last == cycle[cycle.len() - 1] {
                stem.pop();
                cycle.rotate_right(1);
            } else {
                break;
            }
        }
        UpWord { stem, cycle }
    }

    /// Same word presented with the given stem length and period, which must be
    /// at least the current stem length and a multiple of the current period.
    pub fn unrolled(&self, stem_len: usize, period: usize) -> Self {
        debug_assert!(stem_len >= self.stem.len() && period % self.cycle.len() == 0);
        UpWord {
            stem: (0..stem_len).map(|i| self.at(i).clone()).collect(),
            cycle: (0..period).map(|i| self.at(stem_len + i).clone()).collect(),
        }
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Zip several words position-wise into one word over tuples combined by `f`.
pub fn zip_with<T: Clone + PartialEq, U: Clone + PartialEq>(
    words: &[&UpWord<T>],
    f: impl Fn(&[&T]) -> U,
) -> UpWord<U> {
    let stem_len = words.iter().map(|w| w.stem.len()).max().unwrap_or(0);
    let period = words.iter().map(|w| w.cycle.len()).fold(1, lcm);
    let letter = |i: usize| {
        let xs: Vec<&T> = words.iter().map(|w| w.at(i)).collect();
        f(&xs)
    };
    UpWord {
        stem: (0..stem_len).map(letter).collect(),
        cycle: (stem_len..stem_len + period).map(letter).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_rolls_stem_into_cycle() {
        let w = UpWord::new(vec![0, 1, 0, 1], vec![0, 1, 0, 1]);
        let c = w.canonical();
        assert_eq!(c.stem, Vec::<i32>::new());
        assert_eq!(c.cycle, vec![0, 1]);
    }

    #[test]
    fn zip_aligns_stems_and_periods() {
        let a = UpWord::new(vec![1], vec![2, 3]);
        let b = UpWord::new(vec![], vec![10, 20, 30]);
        let z = zip_with(&[&a, &b], |xs| xs[0] + xs[1]);
        assert_eq!(z.stem.len(), 1);
        assert_eq!(z.cycle.len(), 6);
        for i in 0..20 {
            assert_eq!(*z.at(i), a.at(i) + b.at(i));
        }
    }

    proptest! {
        #[test]
        fn canonical_preserves_letters(stem in proptest::collection::vec(0u8..3, 0..5),
                                       cycle in proptest::collection::vec(0u8..3, 1..5)) {
            let w = UpWord::new(stem, cycle);
            let c = w.canonical();
            for i in 0..40 {
                prop_assert_eq!(w.at(i), c.at(i));
            }
            prop_assert_eq!(c.canonical(), c);
        }
    }
}
