use crate::{Error, Result};

/// Mixed-radix indexing over an ordered list of tensor factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorLayout {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl FactorLayout {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        Self {
            dims: dims.to_vec(),
            strides,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Sorted, deduplicated factor selection; rejects empty or out-of-range sets.
    pub fn normalize_selection(&self, factors: &[usize]) -> Result<Vec<usize>> {
        if factors.is_empty() {
            return Err(Error::EmptyInput("factor selection"));
        }
        let mut sel = factors.to_vec();
        sel.sort_unstable();
        sel.dedup();
        if let Some(&bad) = sel.iter().find(|&&f| f >= self.dims.len()) {
            return Err(Error::InvalidFactor {
                index: bad,
                count: self.dims.len(),
            });
        }
        Ok(sel)
    }

    /// Full indices grouped by the configuration of the factors outside
    /// `selected`. `groups[r][t]` is the full index whose selected factors
    /// read `t` and whose remaining factors read `r`, both big-endian in
    /// the given factor order.
    pub fn grouped_indices(&self, selected: &[usize]) -> Vec<Vec<usize>> {
        let rest: Vec<usize> = (0..self.dims.len()).filter(|k| !selected.contains(k)).collect();
        let sel_offsets = self.offsets(selected);
        let rest_offsets = self.offsets(&rest);
        rest_offsets
            .iter()
            .map(|&r| sel_offsets.iter().map(|&t| r + t).collect())
            .collect()
    }

    // Full-index contribution of every configuration of `factors`.
    fn offsets(&self, factors: &[usize]) -> Vec<usize> {
        let mut out = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(out.len() * self.dims[f]);
            for &base in &out {
                for digit in 0..self.dims[f] {
                    next.push(base + digit * self.strides[f]);
                }
            }
            out = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouped_indices_three_qubits() {
        let layout = FactorLayout::new(&[2, 2, 2]);
        // keep the middle qubit: rest = (q0, q2)
        let g = layout.grouped_indices(&[1]);
        assert_eq!(g, vec![vec![0, 2], vec![1, 3], vec![4, 6], vec![5, 7]]);
    }

    #[test]
    fn selection_validation() {
        let layout = FactorLayout::new(&[2, 3]);
        assert_eq!(layout.normalize_selection(&[1, 0, 1]).unwrap(), vec![0, 1]);
        assert!(matches!(
            layout.normalize_selection(&[2]),
            Err(Error::InvalidFactor { index: 2, count: 2 })
        ));
        assert!(layout.normalize_selection(&[]).is_err());
    }
}
