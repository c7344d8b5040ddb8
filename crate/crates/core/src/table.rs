//! Triangular chart indexed by 1-based inclusive spans `(i, j)`, `i <= j`.
//! Shared by morpheme enrollment and the relaxation parser.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularTable<T> {
    n: usize,
    cells: Vec<T>,
}

impl<T: Default> TriangularTable<T> {
    pub fn new(n: usize) -> Self {
        let mut cells = Vec::with_capacity(n * (n + 1) / 2);
        cells.resize_with(n * (n + 1) / 2, T::default);
        TriangularTable { n, cells }
    }
}

impl<T> TriangularTable<T> {
    pub fn size(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        assert!(
            1 <= i && i <= j && j <= self.n,
            "span ({i},{j}) outside table of size {}",
            self.n
        );
        // rows by start position, each row holding spans (i, i..=n)
        let before = (i - 1) * (2 * self.n + 2 - i) / 2;
        before + (j - i)
    }

    pub fn cell(&self, i: usize, j: usize) -> &T {
        &self.cells[self.slot(i, j)]
    }

    pub fn cell_mut(&mut self, i: usize, j: usize) -> &mut T {
        let s = self.slot(i, j);
        &mut self.cells[s]
    }

    /// All spans in row-major order: by start, then by end.
    pub fn spans(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (1..=n).flat_map(move |i| (i..=n).map(move |j| (i, j)))
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &T)> {
        self.spans().map(move |(i, j)| ((i, j), self.cell(i, j)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slots_are_a_bijection() {
        for n in 0..8 {
            let t: TriangularTable<u8> = TriangularTable::new(n);
            let slots: Vec<usize> = t.spans().map(|(i, j)| t.slot(i, j)).collect();
            assert_eq!(slots, (0..n * (n + 1) / 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn cells_hold_values() {
        let mut t: TriangularTable<Vec<&str>> = TriangularTable::new(3);
        t.cell_mut(1, 3).push("x");
        t.cell_mut(2, 2).push("y");
        assert_eq!(t.cell(1, 3), &["x"]);
        assert_eq!(t.iter().filter(|(_, c)| !c.is_empty()).count(), 2);
    }

    #[test]
    #[should_panic]
    fn reversed_span_panics() {
        let t: TriangularTable<u8> = TriangularTable::new(3);
        t.cell(3, 2);
    }
}
