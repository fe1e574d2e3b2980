use std::fmt;

/// A set of domain element ids backed by a bit vector.
#[derive(Clone, Default)]
pub struct ElementSet {
    words: Vec<u64>,
}

impl ElementSet {
    fn trimmed(&self) -> &[u64] {
        let end = self.words.iter().rposition(|w| *w != 0).map_or(0, |i| i + 1);
        &self.words[..end]
    }
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed() == other.trimmed()
    }
}

impl Eq for ElementSet {}

impl std::hash::Hash for ElementSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.trimmed().hash(state);
    }
}

impl ElementSet {
    pub fn empty() -> Self {
        ElementSet { words: Vec::new() }
    }

    /// `{0, …, n-1}`
    pub fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; n / 64];
        if n % 64 != 0 {
            words.push((1u64 << (n % 64)) - 1);
        }
        ElementSet { words }
    }

    pub fn singleton(e: usize) -> Self {
        let mut s = Self::empty();
        s.insert(e);
        s
    }

    pub fn insert(&mut self, e: usize) -> bool {
        let (w, b) = (e / 64, e % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !was
    }

    pub fn remove(&mut self, e: usize) -> bool {
        let (w, b) = (e / 64, e % 64);
        if w >= self.words.len() {
            return false;
        }
        let was = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        was
    }

    pub fn set(&mut self, e: usize, value: bool) {
        if value {
            self.insert(e);
        } else {
            self.remove(e);
        }
    }

    pub fn contains(&self, e: usize) -> bool {
        self.words.get(e / 64).is_some_and(|w| w >> (e % 64) & 1 == 1)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersects(&self, other: &ElementSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0))
            .collect();
        ElementSet { words }
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        ElementSet { words }
    }

    /// `{0, …, n-1} \ self`
    pub fn complement(&self, n: usize) -> ElementSet {
        let mut out = ElementSet::full(n);
        for (i, w) in out.words.iter_mut().enumerate() {
            *w &= !self.words.get(i).copied().unwrap_or(0);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElementSet::empty();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a: ElementSet = [1, 3, 70].into_iter().collect();
        let b: ElementSet = [3, 4].into_iter().collect();
        assert_eq!(a.len(), 3);
        assert!(a.contains(70) && !a.contains(2));
        assert!(a.intersects(&b));
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![3]);
        assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), vec![1, 3, 4, 70]);
        assert_eq!(b.complement(6).iter().collect::<Vec<_>>(), vec![0, 1, 2, 5]);
        assert!(ElementSet::singleton(3).is_subset(&b));
        assert!(!a.is_subset(&b));
        assert_eq!(ElementSet::full(65).len(), 65);
        assert_eq!(ElementSet::full(64).complement(64), ElementSet::empty());
    }
}
