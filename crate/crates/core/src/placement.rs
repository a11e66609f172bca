//! Probabilistic block placement of objects into transmitter caches.
//!
//! Segments of length `b_j` are laid end to end, in descending object index,
//! over `K` unit rows; a segment running past the end of a row continues on
//! the next. A single uniform `u ∈ [0, 1)` then selects, in each row, the
//! object whose segment covers `u`. Object `j` is selected with probability
//! exactly `b_j` and a cache never holds more than `K` distinct objects.

use std::io::Write;

use rand::Rng;

use crate::content::PopularityLaw;
use crate::error::{check, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementPolicy {
    marginals: Vec<f64>,
    capacity: usize,
    /// `bounds[p]..bounds[p + 1]` is the segment of the object at packing position `p`.
    bounds: Vec<f64>,
}

/// Object indices (0-based, ascending) held by one transmitter.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CacheInventory(Vec<usize>);

impl CacheInventory {
    pub fn contains(&self, object: usize) -> bool {
        self.0.binary_search(&object).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn objects(&self) -> &[usize] {
        &self.0
    }
}

impl PlacementPolicy {
    pub fn new(marginals: Vec<f64>, capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::invalid("cache_capacity", "must be at least 1"));
        }
        for &b in &marginals {
            check("placement.b", b, |v| (0.0..=1.0).contains(&v), "in [0, 1]")?;
        }
        let total: f64 = marginals.iter().sum();
        // tolerate rounding in Σ b_j = K
        if total > capacity as f64 * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "placement.b",
                format!("sum {total} exceeds cache capacity {capacity}"),
            ));
        }
        let mut bounds = Vec::with_capacity(marginals.len() + 1);
        let mut acc = 0.0;
        bounds.push(acc);
        for &b in marginals.iter().rev() {
            acc += b;
            bounds.push(acc);
        }
        if acc > capacity as f64 {
            // rescale rounding excess away so no segment leaves the last row
            let s = capacity as f64 / acc;
            bounds.iter_mut().for_each(|x| *x *= s);
        }
        Ok(PlacementPolicy {
            marginals,
            capacity,
            bounds,
        })
    }

    /// `b_j = min(K a_j / Σ_{k ≤ 2K} a_k, 1)` for the `2K` most popular objects, 0 otherwise.
    pub fn normalized_popularity(popularity: &PopularityLaw, capacity: usize) -> Result<Self> {
        let f = popularity.len();
        if capacity == 0 || 2 * capacity > f {
            return Err(Error::invalid(
                "cache_capacity",
                format!("need 1 ≤ K and 2K ≤ F; got K = {capacity}, F = {f}"),
            ));
        }
        let head = popularity.head_mass(2 * capacity);
        let k = capacity as f64;
        let marginals = popularity
            .probabilities()
            .iter()
            .enumerate()
            .map(|(j, &a)| if j < 2 * capacity { (k * a / head).min(1.0) } else { 0.0 })
            .collect();
        Self::new(marginals, capacity)
    }

    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    pub fn marginal(&self, object: usize) -> f64 {
        self.marginals[object]
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.marginals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marginals.is_empty()
    }

    fn position(&self, object: usize) -> usize {
        self.marginals.len() - 1 - object
    }

    /// Whether the inventory selected by `u` holds `object`; agrees with
    /// [`inventory_at`](Self::inventory_at) but costs O(1).
    pub fn caches(&self, object: usize, u: f64) -> bool {
        let p = self.position(object);
        let (lo, hi) = (self.bounds[p], self.bounds[p + 1]);
        if hi <= lo {
            return false;
        }
        let row = (lo - u).ceil();
        [row - 1.0, row].into_iter().any(|m| {
            if m < 0.0 || m >= self.capacity as f64 {
                return false;
            }
            let x = m + u;
            lo <= x && x < hi
        })
    }

    /// Inventory selected by `u ∈ [0, 1)`.
    pub fn inventory_at(&self, u: f64) -> CacheInventory {
        let end = *self.bounds.last().expect("bounds has F + 1 entries");
        let n = self.marginals.len();
        let mut objects: Vec<usize> = (0..self.capacity)
            .filter_map(|m| {
                let x = m as f64 + u;
                if x >= end {
                    return None;
                }
                // first bound strictly above x closes the covering segment
                let p = self.bounds.partition_point(|&b| b <= x) - 1;
                Some(n - 1 - p)
            })
            .collect();
        objects.sort_unstable();
        objects.dedup();
        CacheInventory(objects)
    }

    pub fn sample_inventory<R: Rng + ?Sized>(&self, rng: &mut R) -> CacheInventory {
        self.inventory_at(rng.random())
    }

    /// Writes `j,a_j,b_j` rows with 1-based indices.
    pub fn write_csv<W: Write>(&self, popularity: &PopularityLaw, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["j", "a_j", "b_j"])?;
        for (j, (a, b)) in popularity.probabilities().iter().zip(&self.marginals).enumerate() {
            w.write_record([(j + 1).to_string(), a.to_string(), b.to_string()])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
