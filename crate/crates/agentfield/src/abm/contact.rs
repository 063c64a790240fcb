//! Contact detection with a uniform cell grid.

use crate::error::{Error, Result};
use crate::model::Domain1D;

/// Symmetric contact lists: `j ∈ neighbors(i)` iff `i ≠ j` and
/// `|x_i − x_j| ≤ d_int`. Lists are sorted by agent index.
#[derive(Debug, Clone, Default)]
pub struct ContactNetwork {
    lists: Vec<Vec<usize>>,
    // cell-grid scratch, reused across rebuilds
    cell_of: Vec<usize>,
    starts: Vec<usize>,
    cursor: Vec<usize>,
    order: Vec<usize>,
}

impl ContactNetwork {
    pub fn new(n_agents: usize) -> Self {
        Self { lists: vec![Vec::new(); n_agents], ..Self::default() }
    }

    pub fn n_agents(&self) -> usize {
        self.lists.len()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.lists[i]
    }

    pub fn n_contacts(&self) -> usize {
        self.lists.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Recompute all contact lists for the given positions.
    ///
    /// Cells are at least `d_int` wide (and at least `L / 4096`, so near-empty
    /// grids don't blow up the cell count), hence only same-cell and adjacent
    /// pairs can be in contact.
    pub fn rebuild(&mut self, positions: &[f64], d_int: f64, domain: &Domain1D) -> Result<()> {
        if !(d_int > 0.0 && d_int.is_finite()) {
            return Err(Error::Config(format!("d_int must be positive, got {d_int}")));
        }
        let n = positions.len();
        self.lists.resize(n, Vec::new());
        for list in &mut self.lists {
            list.clear();
        }

        let l = domain.length();
        let width = d_int.max(l / 4096.0);
        let n_cells = ((l / width).floor() as usize).max(1);
        let cell_w = l / n_cells as f64;

        self.cell_of.clear();
        self.cell_of.extend(positions.iter().map(|&x| {
            debug_assert!(domain.contains(x), "position {x} outside domain");
            (((x - domain.lower) / cell_w) as usize).min(n_cells - 1)
        }));

        self.starts.clear();
        self.starts.resize(n_cells + 1, 0);
        for &c in &self.cell_of {
            self.starts[c + 1] += 1;
        }
        for c in 0..n_cells {
            self.starts[c + 1] += self.starts[c];
        }
        self.cursor.clear();
        self.cursor.extend_from_slice(&self.starts[..n_cells]);
        self.order.resize(n, 0);
        for i in 0..n {
            let c = self.cell_of[i];
            self.order[self.cursor[c]] = i;
            self.cursor[c] += 1;
        }

        for c in 0..n_cells {
            let own = self.starts[c]..self.starts[c + 1];
            for p in own.clone() {
                let i = self.order[p];
                for q in p + 1..own.end {
                    let j = self.order[q];
                    if (positions[i] - positions[j]).abs() <= d_int {
                        self.lists[i].push(j);
                        self.lists[j].push(i);
                    }
                }
                if c + 1 < n_cells {
                    for q in self.starts[c + 1]..self.starts[c + 2] {
                        let j = self.order[q];
                        if (positions[i] - positions[j]).abs() <= d_int {
                            self.lists[i].push(j);
                            self.lists[j].push(i);
                        }
                    }
                }
            }
        }

        for list in &mut self.lists {
            list.sort_unstable();
        }
        Ok(())
    }
}

/// One-shot construction of the contact network.
pub fn build_contact_network(
    positions: &[f64],
    d_int: f64,
    domain: &Domain1D,
) -> Result<ContactNetwork> {
    let mut network = ContactNetwork::new(positions.len());
    network.rebuild(positions, d_int, domain)?;
    Ok(network)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Quadratic reference implementation for cross-checking.
    fn brute_force(positions: &[f64], d_int: f64) -> Vec<Vec<usize>> {
        let n = positions.len();
        let mut lists = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if i != j && (positions[i] - positions[j]).abs() <= d_int {
                    lists[i].push(j);
                }
            }
        }
        lists
    }

    #[test]
    fn small_cluster() {
        let d = Domain1D::unit();
        let pos = [0.1, 0.1015, 0.104, 0.5];
        let net = build_contact_network(&pos, 0.002, &d).unwrap();
        assert_eq!(net.neighbors(0), &[1]);
        assert_eq!(net.neighbors(1), &[0]);
        assert!(net.neighbors(2).is_empty());
        assert!(net.neighbors(3).is_empty());
        assert_eq!(net.n_contacts(), 1);
    }

    #[test]
    fn contact_distance_is_inclusive() {
        // exactly representable distances to pin the <= comparison
        let d = Domain1D::unit();
        let pos = [0.25, 0.5, 0.8125];
        let net = build_contact_network(&pos, 0.25, &d).unwrap();
        assert_eq!(net.neighbors(0), &[1]);
        assert_eq!(net.neighbors(1), &[0]);
        assert!(net.neighbors(2).is_empty());
    }

    #[test]
    fn radius_larger_than_domain() {
        let d = Domain1D::unit();
        let pos = [0.0, 0.3, 0.99];
        let net = build_contact_network(&pos, 2.0, &d).unwrap();
        assert_eq!(net.neighbors(0), &[1, 2]);
        assert_eq!(net.neighbors(1), &[0, 2]);
        assert_eq!(net.neighbors(2), &[0, 1]);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let d = Domain1D::unit();
        assert!(build_contact_network(&[0.5], 0.0, &d).is_err());
        assert!(build_contact_network(&[0.5], -1.0, &d).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            positions in prop::collection::vec(0.0f64..=1.0, 1..200),
            d_exp in -4.0f64..0.0,
        ) {
            let d_int = 10f64.powf(d_exp);
            let domain = Domain1D::unit();
            let net = build_contact_network(&positions, d_int, &domain).unwrap();
            let reference = brute_force(&positions, d_int);
            for i in 0..positions.len() {
                prop_assert_eq!(net.neighbors(i), &reference[i][..], "agent {}", i);
            }
        }
    }
}
