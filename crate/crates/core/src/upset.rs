//! Upward-closed sets of markings, represented by their finite antichain of
//! minimal elements.

use crate::net::{Marking, MarkingOrder, NetError};

/// A finite antichain `B` standing for the upward-closed set `↑B`.
///
/// Elements are kept in insertion order. The empty basis denotes the empty
/// set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Basis {
    elements: Vec<Marking>,
}

fn check_same_domain<'a>(ms: impl IntoIterator<Item = &'a Marking>) -> Result<(), NetError> {
    let mut dim = None;
    for m in ms {
        match dim {
            None => dim = Some(m.len()),
            Some(d) if d != m.len() => {
                return Err(NetError::DomainMismatch {
                    expected: d,
                    found: m.len(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

impl Basis {
    pub fn empty() -> Self {
        Basis::default()
    }

    /// The minimal elements of `ms`.
    pub fn minimize(ms: impl IntoIterator<Item = Marking>) -> Result<Basis, NetError> {
        let ms: Vec<Marking> = ms.into_iter().collect();
        check_same_domain(&ms)?;
        let mut b = Basis::empty();
        for m in ms {
            b.insert_unchecked(m);
        }
        Ok(b)
    }

    pub fn elements(&self) -> &[Marking] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in lexicographic order, for reproducible output.
    pub fn sorted_elements(&self) -> Vec<Marking> {
        let mut v = self.elements.clone();
        v.sort();
        v
    }

    fn check_marking(&self, m: &Marking) -> Result<(), NetError> {
        match self.elements.first() {
            Some(x) if x.len() != m.len() => Err(NetError::DomainMismatch {
                expected: x.len(),
                found: m.len(),
            }),
            _ => Ok(()),
        }
    }

    /// `m ∈ ↑B`.
    pub fn contains_upward(&self, m: &Marking) -> Result<bool, NetError> {
        self.check_marking(m)?;
        Ok(self.covers_unchecked(m))
    }

    pub(crate) fn covers_unchecked(&self, m: &Marking) -> bool {
        self.elements.iter().any(|x| x.le_unchecked(m))
    }

    /// The element of `B` below `m`, if any.
    pub fn find_below(&self, m: &Marking) -> Result<Option<&Marking>, NetError> {
        self.check_marking(m)?;
        Ok(self.elements.iter().find(|x| x.le_unchecked(m)))
    }

    /// Adds `m` unless it is already covered; drops elements it dominates.
    /// Returns whether `m` was added.
    pub fn insert(&mut self, m: Marking) -> Result<bool, NetError> {
        self.check_marking(&m)?;
        Ok(self.insert_unchecked(m))
    }

    fn insert_unchecked(&mut self, m: Marking) -> bool {
        let mut dominated = Vec::new();
        for (i, x) in self.elements.iter().enumerate() {
            match x.compare_unchecked(&m) {
                MarkingOrder::Less | MarkingOrder::Equal => return false,
                MarkingOrder::Greater => dominated.push(i),
                MarkingOrder::Incomparable => {}
            }
        }
        if !dominated.is_empty() {
            let mut idx = 0;
            self.elements.retain(|_| {
                let keep = dominated.binary_search(&idx).is_err();
                idx += 1;
                keep
            });
        }
        self.elements.push(m);
        true
    }

    /// Antichain basis of `↑B ∪ ↑new`.
    pub fn union_minimized(
        &self,
        new: impl IntoIterator<Item = Marking>,
    ) -> Result<Basis, NetError> {
        let new: Vec<Marking> = new.into_iter().collect();
        check_same_domain(self.elements.iter().chain(&new))?;
        let mut b = self.clone();
        for m in new {
            b.insert_unchecked(m);
        }
        Ok(b)
    }

    /// Candidates not already in `↑B`, in their original order.
    pub fn filter_not_covered(
        &self,
        cands: impl IntoIterator<Item = Marking>,
    ) -> Result<Vec<Marking>, NetError> {
        let mut out = Vec::new();
        for c in cands {
            if !self.contains_upward(&c)? {
                out.push(c);
            }
        }
        Ok(out)
    }

    /// No two distinct elements are comparable.
    pub fn is_antichain(&self) -> bool {
        self.elements.iter().enumerate().all(|(i, a)| {
            self.elements[i + 1..]
                .iter()
                .all(|b| a.compare_unchecked(b) == MarkingOrder::Incomparable)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn m(v: &[u64]) -> Marking {
        Marking::from_u64s(v)
    }

    fn set(b: &Basis) -> HashSet<Marking> {
        b.elements().iter().cloned().collect()
    }

    #[test]
    fn minimize_examples() {
        let b = Basis::minimize(vec![m(&[1, 0]), m(&[0, 1]), m(&[1, 1])]).unwrap();
        assert_eq!(set(&b), [m(&[1, 0]), m(&[0, 1])].into_iter().collect());
        assert!(Basis::minimize(Vec::new()).unwrap().is_empty());
        let b = Basis::minimize(vec![m(&[0, 2, 1]), m(&[0, 2, 1])]).unwrap();
        assert_eq!(b.elements(), &[m(&[0, 2, 1])]);
        assert!(Basis::minimize(vec![m(&[1]), m(&[1, 2])]).is_err());
    }

    #[test]
    fn contains_upward_examples() {
        let b = Basis::minimize(vec![m(&[0, 1, 0])]).unwrap();
        assert!(b.contains_upward(&m(&[0, 2, 1])).unwrap());
        assert!(!Basis::empty().contains_upward(&m(&[5, 5, 5])).unwrap());
        let b = Basis::minimize(vec![m(&[1, 0, 0])]).unwrap();
        assert!(!b.contains_upward(&m(&[0, 2, 1])).unwrap());
        assert!(b.contains_upward(&m(&[1, 0])).is_err());
    }

    #[test]
    fn union_examples() {
        let b = Basis::minimize(vec![m(&[1, 0])]).unwrap();
        assert_eq!(set(&b.union_minimized(vec![m(&[0, 1])]).unwrap()), [m(&[1, 0]), m(&[0, 1])].into_iter().collect());
        assert_eq!(b.union_minimized(vec![m(&[2, 0])]).unwrap().elements(), &[m(&[1, 0])]);
        let b = Basis::minimize(vec![m(&[2, 0])]).unwrap();
        assert_eq!(b.union_minimized(vec![m(&[1, 0])]).unwrap().elements(), &[m(&[1, 0])]);
    }

    #[test]
    fn filter_examples() {
        let b = Basis::minimize(vec![m(&[0, 2, 1])]).unwrap();
        assert_eq!(
            b.filter_not_covered(vec![m(&[0, 1, 0]), m(&[0, 2, 1])]).unwrap(),
            vec![m(&[0, 1, 0])]
        );
        assert!(b.filter_not_covered(Vec::new()).unwrap().is_empty());
        assert_eq!(Basis::empty().filter_not_covered(vec![m(&[1, 1])]).unwrap(), vec![m(&[1, 1])]);
    }

    fn markings(dim: usize) -> impl Strategy<Value = Vec<Marking>> {
        prop::collection::vec(prop::collection::vec(0u64..=4, dim), 0..8)
            .prop_map(|vs| vs.iter().map(|v| m(v)).collect())
    }

    fn sized_markings() -> impl Strategy<Value = (usize, Vec<Marking>, Vec<Marking>, Vec<Marking>)> {
        (1usize..=4).prop_flat_map(|d| (Just(d), markings(d), markings(d), markings(d)))
    }

    proptest! {
        #[test]
        fn minimize_is_idempotent_antichain((_d, s, _, _) in sized_markings()) {
            let b = Basis::minimize(s.clone()).unwrap();
            prop_assert!(b.is_antichain());
            let again = Basis::minimize(b.elements().to_vec()).unwrap();
            prop_assert_eq!(set(&again), set(&b));
        }

        #[test]
        fn membership_matches_brute_force((d, s, probes, _) in sized_markings()) {
            let b = Basis::minimize(s.clone()).unwrap();
            let mut all = probes.clone();
            all.push(Marking::zero(d));
            for p in &all {
                let brute = s.iter().any(|x| x.leq(p).unwrap());
                prop_assert_eq!(b.contains_upward(p).unwrap(), brute);
            }
        }

        #[test]
        fn union_commutes_and_associates((_d, x, y, z) in sized_markings()) {
            let bx = Basis::minimize(x.clone()).unwrap();
            let by = Basis::minimize(y.clone()).unwrap();
            let xy = bx.union_minimized(y.clone()).unwrap();
            let yx = by.union_minimized(x.clone()).unwrap();
            prop_assert_eq!(set(&xy), set(&yx));
            let left = xy.union_minimized(z.clone()).unwrap();
            let yz = by.union_minimized(z.clone()).unwrap();
            let right = bx.union_minimized(yz.elements().to_vec()).unwrap();
            prop_assert_eq!(set(&left), set(&right));
            prop_assert!(left.is_antichain());
        }
    }
}
