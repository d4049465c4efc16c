/// Set of site indices with O(1) insert, remove and uniform indexing.
#[derive(Debug, Clone)]
pub(crate) struct SiteSet {
    items: Vec<u32>,
    pos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl SiteSet {
    pub(crate) fn new(n_sites: usize) -> Self {
        Self {
            items: Vec::new(),
            pos: vec![ABSENT; n_sites],
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.items.len()
    }

    pub(crate) fn insert(&mut self, site: usize) {
        debug_assert_eq!(self.pos[site], ABSENT);
        self.pos[site] = self.items.len() as u32;
        self.items.push(site as u32);
    }

    pub(crate) fn remove(&mut self, site: usize) {
        let p = self.pos[site];
        debug_assert_ne!(p, ABSENT);
        let last = *self.items.last().expect("remove from empty set");
        self.items.swap_remove(p as usize);
        if last as usize != site {
            self.pos[last as usize] = p;
        }
        self.pos[site] = ABSENT;
    }

    pub(crate) fn get(&self, i: usize) -> usize {
        self.items[i] as usize
    }
}
