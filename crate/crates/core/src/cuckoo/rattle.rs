use crate::hashing::{cell_of, KeyClass, MasterHash};

const EMPTY: u32 = u32::MAX;

/// Cuckoo table under construction with rattle-kicking insertion.
#[derive(Debug, Clone)]
pub struct RattleTable {
    m: u64,
    seed: u64,
    hashes: Vec<MasterHash>,
    degrees: Vec<u8>,
    counters: Vec<u32>,
    chosen: Vec<u8>,
    cells: Vec<u32>,
    steps: u64,
}

impl RattleTable {
    pub fn new(m: u64, seed: u64) -> Self {
        assert!(m < EMPTY as u64, "table too large");
        Self {
            m,
            seed,
            hashes: Vec::new(),
            degrees: Vec::new(),
            counters: Vec::new(),
            chosen: Vec::new(),
            cells: vec![EMPTY; m as usize],
            steps: 0,
        }
    }

    /// Registers an entry without placing it. Returns its index.
    pub fn push_entry(&mut self, h: MasterHash, class: KeyClass) -> usize {
        self.hashes.push(h);
        self.degrees.push(class.degree() as u8);
        self.counters.push(0);
        self.chosen.push(0);
        self.hashes.len() - 1
    }

    /// Empties the table and switches to `seed`; entries stay registered.
    pub fn reset(&mut self, seed: u64) {
        self.seed = seed;
        self.cells.fill(EMPTY);
        self.counters.fill(0);
        self.chosen.fill(0);
        self.steps = 0;
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Probe steps performed since the last reset.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.hashes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hashes.is_empty()
    }

    /// Function index per entry; meaningful for placed entries only.
    pub fn assignments(&self) -> &[u8] {
        &self.chosen
    }

    /// Entry occupying each cell, if any.
    pub fn occupant(&self, cell: u64) -> Option<usize> {
        match self.cells[cell as usize] {
            EMPTY => None,
            e => Some(e as usize),
        }
    }

    /// Inserts a not yet placed `entry`, displacing others as needed.
    ///
    /// Each step targets cell `counter mod degree` of the current entry. An
    /// empty cell ends the insertion. An occupant with a strictly lower
    /// counter is evicted and continues with its counter incremented;
    /// otherwise the current entry increments its own counter and tries its
    /// next cell. Returns false once `budget` steps are used up, leaving one
    /// entry homeless.
    pub fn insert(&mut self, entry: usize, budget: u64) -> bool {
        let mut current = entry;
        for _ in 0..budget {
            self.steps += 1;
            let counter = self.counters[current];
            let f = counter % self.degrees[current] as u32;
            let cell = cell_of(self.hashes[current], self.seed, f, self.m) as usize;
            let occupant = self.cells[cell];
            if occupant == EMPTY {
                self.cells[cell] = current as u32;
                self.chosen[current] = f as u8;
                return true;
            }
            let occupant = occupant as usize;
            if self.counters[occupant] < counter {
                self.cells[cell] = current as u32;
                self.chosen[current] = f as u8;
                self.counters[occupant] += 1;
                current = occupant;
            } else {
                self.counters[current] += 1;
            }
        }
        false
    }
}
