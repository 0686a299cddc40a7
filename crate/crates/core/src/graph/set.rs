use super::VertexId;

/// A subset of the vertices of a finite realization, stored as a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    mask: Vec<bool>,
    len: usize,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            mask: vec![false; universe],
            len: 0,
        }
    }

    pub fn full(universe: usize) -> Self {
        Self {
            mask: vec![true; universe],
            len: universe,
        }
    }

    /// Builds a set from vertex ids; ids outside `0..universe` are ignored.
    pub fn from_vertices(universe: usize, vertices: impl IntoIterator<Item = VertexId>) -> Self {
        let mut set = Self::empty(universe);
        for v in vertices {
            if v < universe {
                set.insert(v);
            }
        }
        set
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let len = mask.iter().filter(|&&b| b).count();
        Self { mask, len }
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, v: VertexId) -> bool {
        if self.mask[v] {
            false
        } else {
            self.mask[v] = true;
            self.len += 1;
            true
        }
    }

    pub fn remove(&mut self, v: VertexId) -> bool {
        if self.mask[v] {
            self.mask[v] = false;
            self.len -= 1;
            true
        } else {
            false
        }
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(v, &inside)| inside.then_some(v))
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            mask: self.mask.iter().map(|b| !b).collect(),
            len: self.mask.len() - self.len,
        }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
}
