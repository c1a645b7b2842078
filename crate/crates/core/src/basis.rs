//! Excitation-number basis bookkeeping.
//!
//! Configurations are N-bit integers with bit i−1 set when site i carries an
//! excitation (site 1 is the least significant bit). Within a sector,
//! configurations are ordered by ascending integer value, which fixes every
//! matrix representation in the crate.
//!
//! Receiver configurations are labelled in mirror order: receiver slot j is
//! chain site N+1−j, so the sender label and the receiver label of a
//! transfer-paired pattern are the same integer. This is the identification
//! under which restored receiver elements are compared with sender elements.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct ExcitationBasis {
    n: usize,
    kmax: usize,
    sectors: Vec<Vec<u64>>,
    index: HashMap<u64, (usize, usize)>,
}

impl ExcitationBasis {
    /// Enumerate all configurations with at most `kmax` excitations.
    pub fn new(n: usize, kmax: usize) -> Result<Arc<Self>> {
        if kmax > n {
            return Err(Error::Parameter(format!("kmax = {kmax} exceeds N = {n}")));
        }
        if n > 63 {
            return Err(Error::TooLarge(format!("N = {n} does not fit a u64 configuration")));
        }
        let mut sectors = Vec::with_capacity(kmax + 1);
        let mut index = HashMap::new();
        for k in 0..=kmax {
            let configs = combinations(n, k);
            for (pos, &c) in configs.iter().enumerate() {
                index.insert(c, (k, pos));
            }
            sectors.push(configs);
        }
        Ok(Arc::new(Self { n, kmax, sectors, index }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// Configurations of sector k, ascending.
    pub fn sector(&self, k: usize) -> &[u64] {
        &self.sectors[k]
    }

    pub fn sector_dim(&self, k: usize) -> usize {
        self.sectors[k].len()
    }

    /// (sector, position) of a configuration.
    pub fn position(&self, config: u64) -> Option<(usize, usize)> {
        self.index.get(&config).copied()
    }

    /// Position within the sector the configuration belongs to.
    pub fn position_in_sector(&self, config: u64) -> Result<usize> {
        self.index
            .get(&config)
            .map(|&(_, pos)| pos)
            .ok_or_else(|| Error::SectorUnavailable {
                needed: config.count_ones() as usize,
                kmax: self.kmax,
            })
    }
}

/// All n-bit integers with popcount k, in ascending order.
pub fn combinations(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k == 0 {
        out.push(0);
        return out;
    }
    if k > n {
        return out;
    }
    // Gosper's hack walks same-popcount integers in ascending order.
    let limit = 1u64 << n;
    let mut c = (1u64 << k) - 1;
    while c < limit {
        out.push(c);
        let lowest = c & c.wrapping_neg();
        let ripple = c + lowest;
        c = ripple | (((c ^ ripple) >> 2) / lowest);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Z eigenvalue of site `site` (1-based) in a configuration: +1/2 for
/// ground, −1/2 for excited.
#[inline]
pub fn z_value(config: u64, site: usize) -> f64 {
    if config >> (site - 1) & 1 == 1 {
        -0.5
    } else {
        0.5
    }
}

/// Sender/transmission-line/receiver split of a chain of N sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    pub n_s: usize,
    pub n_tl: usize,
    pub n_r: usize,
    pub n_er: usize,
    pub n_omega: usize,
}

impl Partition {
    pub fn new(n_s: usize, n_tl: usize, n_r: usize, n_er: usize, n_omega: usize) -> Result<Self> {
        let p = Self { n_s, n_tl, n_r, n_er, n_omega };
        let n = p.n();
        if n_r != n_s {
            return Err(Error::Partition(format!(
                "receiver and sender must have equal size, got {n_r} vs {n_s}"
            )));
        }
        if n_er < n_r || n_er > n_r + n_tl {
            return Err(Error::Partition(format!(
                "extended receiver size {n_er} outside [{n_r}, {}]",
                n_r + n_tl
            )));
        }
        if n_omega > n {
            return Err(Error::Partition(format!("{n_omega} controlled sites exceed N = {n}")));
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n_s + self.n_tl + self.n_r
    }

    /// Chain site (1-based) of receiver slot j = 1..=N_R, counting inward
    /// from the chain end.
    pub fn receiver_site(&self, slot: usize) -> usize {
        self.n() + 1 - slot
    }

    /// Controlled chain sites, ascending.
    pub fn controlled_sites(&self) -> Vec<usize> {
        let n = self.n();
        (n - self.n_omega + 1..=n).collect()
    }

    /// Mirror-ordered receiver label of a chain configuration.
    pub fn receiver_label(&self, config: u64) -> u64 {
        let n = self.n();
        let mut label = 0u64;
        for slot in 1..=self.n_r {
            if config >> (n - slot) & 1 == 1 {
                label |= 1 << (slot - 1);
            }
        }
        label
    }

    /// Chain configuration with the receiver in `label` and all other
    /// sites in the ground state.
    pub fn embed_receiver(&self, label: u64) -> u64 {
        let n = self.n();
        let mut config = 0u64;
        for slot in 1..=self.n_r {
            if label >> (slot - 1) & 1 == 1 {
                config |= 1 << (n - slot);
            }
        }
        config
    }

    /// Sender label (chain order) of a chain configuration.
    pub fn sender_label(&self, config: u64) -> u64 {
        config & ((1 << self.n_s) - 1)
    }

    /// Chain configuration with the sender in `label`, rest ground.
    pub fn embed_sender(&self, label: u64) -> u64 {
        label
    }

    /// Bits of a configuration outside the receiver.
    pub fn non_receiver_part(&self, config: u64) -> u64 {
        config & !(self.receiver_mask())
    }

    pub fn receiver_mask(&self) -> u64 {
        let n = self.n();
        ((1u64 << self.n_r) - 1) << (n - self.n_r)
    }

    /// Extended-receiver chain sites, ascending.
    pub fn er_sites(&self) -> Vec<usize> {
        let n = self.n();
        (n - self.n_er + 1..=n).collect()
    }

    /// Mirror-ordered extended-receiver label (slot j = chain site N+1−j).
    pub fn er_label(&self, config: u64) -> u64 {
        let n = self.n();
        let mut label = 0u64;
        for slot in 1..=self.n_er {
            if config >> (n - slot) & 1 == 1 {
                label |= 1 << (slot - 1);
            }
        }
        label
    }

    pub fn er_mask(&self) -> u64 {
        let n = self.n();
        ((1u64 << self.n_er) - 1) << (n - self.n_er)
    }
}
