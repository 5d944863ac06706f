//! Frontier-based synchronous threshold propagation.

use crate::network::VillageNetwork;

/// Reusable scratch state for repeated runs on one network. Arrays are reset
/// lazily through a run stamp, so a run costs only the edges it touches.
pub(crate) struct Propagator {
    informed: Vec<u32>,
    count: Vec<u16>,
    count_stamp: Vec<u32>,
    stamp: u32,
    newly: Vec<u32>,
    crossed: Vec<u32>,
}

impl Propagator {
    pub(crate) fn new(n: usize) -> Self {
        Propagator {
            informed: vec![0; n],
            count: vec![0; n],
            count_stamp: vec![0; n],
            stamp: 0,
            newly: Vec::with_capacity(n),
            crossed: Vec::with_capacity(n),
        }
    }

    #[inline]
    pub(crate) fn is_informed(&self, node: usize) -> bool {
        self.informed[node] == self.stamp
    }

    /// Runs one replication. `required[v]` is the smallest integer count of
    /// informed neighbours that meets node `v`'s threshold. Writes the number
    /// of informed individuals after each period `0..=periods` into `totals`
    /// and reports each newly informed node with its period to `on_inform`.
    #[inline]
    pub(crate) fn run<F: FnMut(usize, usize)>(
        &mut self,
        net: &VillageNetwork,
        seed_households: &[usize],
        required: &[u16],
        totals: &mut [u32],
        mut on_inform: F,
    ) {
        debug_assert_eq!(required.len(), net.len());
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.informed.fill(0);
            self.count_stamp.fill(0);
            self.stamp = 1;
        }
        let stamp = self.stamp;
        let mut newly = std::mem::take(&mut self.newly);
        let mut crossed = std::mem::take(&mut self.crossed);
        newly.clear();

        let mut total = 0u32;
        for &h in seed_households {
            for &m in net.household_slice(h) {
                let m = m as usize;
                if self.informed[m] != stamp {
                    self.informed[m] = stamp;
                    newly.push(m as u32);
                    total += 1;
                    on_inform(0, m);
                }
            }
        }
        totals[0] = total;

        for t in 1..totals.len() {
            if newly.is_empty() {
                totals[t..].fill(total);
                break;
            }
            // Counts only see nodes informed before this period began.
            crossed.clear();
            for &v in &newly {
                for &u in net.neighbor_slice(v as usize) {
                    let u = u as usize;
                    if self.informed[u] == stamp {
                        continue;
                    }
                    if self.count_stamp[u] != stamp {
                        self.count_stamp[u] = stamp;
                        self.count[u] = 0;
                    }
                    self.count[u] += 1;
                    if self.count[u] == required[u] {
                        crossed.push(u as u32);
                    }
                }
            }
            newly.clear();
            for &u in &crossed {
                for &m in net.household_slice(net.household_of(u as usize)) {
                    let m = m as usize;
                    if self.informed[m] != stamp {
                        self.informed[m] = stamp;
                        newly.push(m as u32);
                        total += 1;
                        on_inform(t, m);
                    }
                }
            }
            totals[t] = total;
        }

        self.newly = newly;
        self.crossed = crossed;
    }
}
