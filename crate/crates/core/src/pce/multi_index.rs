use serde::{Deserialize, Serialize};

/// All exponent tuples of total degree at most `order`, graded (degree
/// ascending) and, within a degree, lexicographically descending, so the
/// zero tuple comes first and `e_1, e_2, …` follow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiIndexSet {
    dimension: usize,
    order: usize,
    indices: Vec<Vec<usize>>,
}

impl MultiIndexSet {
    pub fn new(dimension: usize, order: usize) -> Self {
        let mut indices = Vec::with_capacity(cardinality(dimension, order));
        let mut current = vec![0; dimension];
        for degree in 0..=order {
            fill(&mut current, 0, degree, &mut indices);
        }
        Self { dimension, order, indices }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<usize>] {
        &self.indices
    }

    pub fn total_degree(&self, i: usize) -> usize {
        self.indices[i].iter().sum()
    }
}

fn fill(current: &mut [usize], pos: usize, remaining: usize, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.to_vec());
        current[pos] = 0;
        return;
    }
    if current.is_empty() {
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k;
        fill(current, pos + 1, remaining - k, out);
    }
    current[pos] = 0;
}

/// `(d + p)! / (d! p!)`, computed without overflow for practical sizes.
pub fn cardinality(dimension: usize, order: usize) -> usize {
    let (d, p) = (dimension as u128, order as u128);
    let k = d.min(p);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (d + p + 1 - i) / i;
    }
    c as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_binomial() {
        assert_eq!(MultiIndexSet::new(3, 2).len(), 10);
        assert_eq!(MultiIndexSet::new(2, 3).len(), 10);
        assert_eq!(MultiIndexSet::new(1, 0).len(), 1);
        assert_eq!(cardinality(5, 2), 21);
        for d in 1..6 {
            for p in 0..5 {
                assert_eq!(MultiIndexSet::new(d, p).len(), cardinality(d, p));
            }
        }
    }

    #[test]
    fn graded_order() {
        let s = MultiIndexSet::new(2, 2);
        let expected: Vec<Vec<usize>> =
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]];
        assert_eq!(s.indices(), expected.as_slice());
    }
}
