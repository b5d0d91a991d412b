//! Hierarchy-preserving state encoding over ternary bit vectors.
//!
//! Every hierarchy level owns a contiguous segment of the vector. A region
//! stores the local code of its active state in a slot of the segment that
//! belongs to the level of its states; parallel regions of one composite get
//! adjacent slots, and exclusive composites reuse the same bits.
//!
//! Segment widths come from a recursive requirement: at `k` levels below a
//! container, parallel regions add up while alternative states inside one
//! region take the maximum. On every chart where at most one composite per
//! level can be active at once this equals the per-level maximum of summed
//! region widths. A composite's block sits right-aligned inside the interval
//! its region owns at that level.

mod ternary;

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::model::{ModelError, RegionId, Scope, StateId, Statechart};

pub use ternary::{Tern, TernaryBitVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("bit vectors have different lengths ({left} and {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("conflicting bits at position {position}")]
    Conflict { position: usize },
    #[error("invalid ternary digit `{0}`")]
    Syntax(char),
    #[error("no legal active-state set matches the vector: {0}")]
    Decode(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Half-open bit interval `[start, start + width)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub start: usize,
    pub width: usize,
}

impl Slot {
    pub fn positions(self) -> std::ops::Range<usize> {
        self.start..self.start + self.width
    }
}

/// `⌈log2 n⌉`, with zero for `n <= 1`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Bits needed for the local codes of a region.
pub fn region_bits(sc: &Statechart, r: RegionId) -> Result<usize, ModelError> {
    if r.0 >= sc.regions().len() {
        return Err(ModelError::UnknownRegion(r.0));
    }
    let region = sc.region(r);
    if region.states.is_empty() {
        return Err(ModelError::EmptyRegion(region.name.clone()));
    }
    Ok(ceil_log2(region.states.len()))
}

struct Needs<'a> {
    sc: &'a Statechart,
    memo: std::collections::HashMap<(Option<StateId>, usize), usize>,
}

impl Needs<'_> {
    /// Bits a container needs `k` levels below it (k = 0: its regions' codes).
    fn container(&mut self, c: Option<StateId>, k: usize) -> usize {
        if let Some(&n) = self.memo.get(&(c, k)) {
            return n;
        }
        let regions = self.sc.container_regions(c).to_vec();
        let n = regions.iter().map(|&r| self.region(r, k)).sum();
        self.memo.insert((c, k), n);
        n
    }

    fn region(&mut self, r: RegionId, k: usize) -> usize {
        if k == 0 {
            return ceil_log2(self.sc.region(r).states.len());
        }
        let states = self.sc.region(r).states.clone();
        states
            .iter()
            .map(|&s| self.container(Some(s), k - 1))
            .max()
            .unwrap_or(0)
    }
}

/// Width of level `i` (level 0 holds the codes of top-level states). Levels
/// at or below the maximum depth have width zero.
pub fn level_bits(sc: &Statechart, i: usize) -> usize {
    Needs {
        sc,
        memo: Default::default(),
    }
    .container(None, i)
}

/// Bit positions assigned to every region and state of one statechart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingLayout {
    width: usize,
    level_bits: Vec<usize>,
    level_offsets: Vec<usize>,
    /// Slot holding each region's local code.
    region_slot: Vec<Slot>,
    /// Intervals owned by each region, from its code level downwards.
    region_intervals: Vec<Vec<Slot>>,
    /// Intervals owned by each state's subtree, from its children's level down.
    state_blocks: Vec<Vec<Slot>>,
    local_code: Vec<u64>,
    names: Vec<String>,
    state_regions: Vec<Vec<RegionId>>,
    region_states: Vec<Vec<StateId>>,
    top_regions: Vec<RegionId>,
    ancestors: Vec<Vec<StateId>>,
    state_region: Vec<RegionId>,
}

impl EncodingLayout {
    pub fn build(sc: &Statechart) -> Self {
        let d = sc.max_depth();
        let mut needs = Needs {
            sc,
            memo: Default::default(),
        };
        let level_bits: Vec<usize> = (0..d).map(|i| needs.container(None, i)).collect();
        let mut level_offsets = Vec::with_capacity(d);
        let mut acc = 0;
        for &b in &level_bits {
            level_offsets.push(acc);
            acc += b;
        }
        let mut local_code = vec![0u64; sc.states().len()];
        for r in sc.regions() {
            let mut next = 1;
            for &s in &r.states {
                if s == r.initial {
                    local_code[s.0] = 0;
                } else {
                    local_code[s.0] = next;
                    next += 1;
                }
            }
        }
        let mut layout = EncodingLayout {
            width: acc,
            level_bits,
            level_offsets: level_offsets.clone(),
            region_slot: vec![Slot { start: 0, width: 0 }; sc.regions().len()],
            region_intervals: vec![Vec::new(); sc.regions().len()],
            state_blocks: vec![Vec::new(); sc.states().len()],
            local_code,
            names: sc.states().iter().map(|s| s.name.clone()).collect(),
            state_regions: sc.states().iter().map(|s| s.regions.clone()).collect(),
            region_states: sc.regions().iter().map(|r| r.states.clone()).collect(),
            top_regions: sc.top_regions().to_vec(),
            ancestors: sc
                .state_ids()
                .map(|s| sc.ancestors(s).map(|a| a.to_vec()).unwrap_or_default())
                .collect(),
            state_region: sc.states().iter().map(|s| s.region).collect(),
        };
        layout.place(&mut needs, None, &level_offsets);
        layout
    }

    /// Lays out the regions of `c`, whose block `k` levels below `c` starts
    /// at `starts[k]`.
    fn place(&mut self, needs: &mut Needs, c: Option<StateId>, starts: &[usize]) {
        let mut cursor = starts.to_vec();
        for &r in needs.sc.container_regions(c).to_vec().iter() {
            let mut intervals = Vec::with_capacity(cursor.len());
            for (k, cur) in cursor.iter_mut().enumerate() {
                let w = needs.region(r, k);
                intervals.push(Slot {
                    start: *cur,
                    width: w,
                });
                *cur += w;
            }
            self.region_slot[r.0] = intervals[0];
            for &s in &needs.sc.region(r).states.clone() {
                let mut sub = Vec::new();
                for k in 0..intervals.len().saturating_sub(1) {
                    let outer = intervals[k + 1];
                    let w = needs.container(Some(s), k);
                    sub.push(outer.start + outer.width - w);
                }
                self.state_blocks[s.0] = sub
                    .iter()
                    .enumerate()
                    .map(|(k, &start)| Slot {
                        start,
                        width: needs.container(Some(s), k),
                    })
                    .collect();
                if !sub.is_empty() {
                    self.place(needs, Some(s), &sub);
                }
            }
            self.region_intervals[r.0] = intervals;
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Widths of levels `0..d`; level `d` (and deeper) has width zero.
    pub fn level_bits(&self) -> &[usize] {
        &self.level_bits
    }

    pub fn level_width(&self, i: usize) -> usize {
        self.level_bits.get(i).copied().unwrap_or(0)
    }

    pub fn level_offset(&self, i: usize) -> usize {
        self.level_offsets.get(i).copied().unwrap_or(self.width)
    }

    pub fn region_slot(&self, r: RegionId) -> Slot {
        self.region_slot[r.0]
    }

    pub fn local_code(&self, s: StateId) -> u64 {
        self.local_code[s.0]
    }

    fn write_code(&self, v: &mut TernaryBitVector, s: StateId) {
        let slot = self.region_slot[self.state_region[s.0].0];
        let code = self.local_code[s.0];
        for (i, p) in slot.positions().enumerate() {
            let bit = (code >> (slot.width - 1 - i)) & 1 == 1;
            v.set(p, Tern::from_bool(bit));
        }
    }

    /// Codes of the state and all its ancestors, `X` elsewhere.
    pub fn encode_state(&self, s: StateId) -> TernaryBitVector {
        let mut v = TernaryBitVector::all_x(self.width);
        self.write_code(&mut v, s);
        for &a in &self.ancestors[s.0] {
            self.write_code(&mut v, a);
        }
        v
    }

    pub fn encode_active_set<'a>(
        &self,
        active: impl IntoIterator<Item = &'a StateId>,
    ) -> Result<TernaryBitVector, EncodingError> {
        let mut acc = TernaryBitVector::all_x(self.width);
        for s in active {
            acc = acc.combine(&self.encode_state(*s))?;
        }
        Ok(acc)
    }

    /// Positions owned by the subtree below `s`.
    pub fn subtree_positions(&self, s: StateId) -> impl Iterator<Item = usize> + '_ {
        self.state_blocks[s.0].iter().flat_map(|b| b.positions())
    }

    /// Positions owned by a region at its own level and below.
    pub fn region_positions(&self, r: RegionId) -> impl Iterator<Item = usize> + '_ {
        self.region_intervals[r.0].iter().flat_map(|b| b.positions())
    }

    pub fn scope_positions(&self, scope: Scope) -> Vec<usize> {
        match scope {
            Scope::Root => (0..self.width).collect(),
            Scope::Region(r) => self.region_positions(r).collect(),
        }
    }

    /// `encode_state(s)` with the positions of its own subtree forced to `0`,
    /// denoting the recursive initial states.
    pub fn encode_target(&self, s: StateId) -> TernaryBitVector {
        let mut v = self.encode_state(s);
        v.zero_x_at(self.subtree_positions(s).collect::<Vec<_>>());
        v
    }

    /// `encode_state(s)` with every `X` replaced by `0`. Overwrites the slots
    /// of parallel sibling regions.
    pub fn encode_target_literal(&self, s: StateId) -> TernaryBitVector {
        self.encode_state(s).zero_all_x()
    }

    /// Code slots of the regions that are live under `active`.
    pub fn live_positions(&self, active: &BTreeSet<StateId>) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<RegionId> = self.top_regions.clone();
        while let Some(r) = stack.pop() {
            out.extend(self.region_slot[r.0].positions());
            for s in &self.region_states[r.0] {
                if active.contains(s) {
                    stack.extend(self.state_regions[s.0].iter().copied());
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Active states denoted by a vector. Only the code slots of live regions
    /// are read; padding is ignored.
    pub fn decode(&self, v: &TernaryBitVector) -> Result<BTreeSet<StateId>, EncodingError> {
        if v.len() != self.width {
            return Err(EncodingError::LengthMismatch {
                left: v.len(),
                right: self.width,
            });
        }
        let mut out = BTreeSet::new();
        let mut stack: Vec<RegionId> = self.top_regions.clone();
        while let Some(r) = stack.pop() {
            let slot = self.region_slot[r.0];
            let mut code = 0u64;
            for p in slot.positions() {
                let bit = v.get(p).as_bool().ok_or_else(|| {
                    EncodingError::Decode(format!("position {} is unassigned", p + 1))
                })?;
                code = (code << 1) | bit as u64;
            }
            let s = self.region_states[r.0]
                .iter()
                .find(|s| self.local_code[s.0] == code)
                .ok_or_else(|| {
                    EncodingError::Decode(format!("code {code} is unused in its region"))
                })?;
            out.insert(*s);
            stack.extend(self.state_regions[s.0].iter().copied());
        }
        Ok(out)
    }

    /// Vector split into level segments, e.g. `0.10X.XX`.
    pub fn format(&self, v: &TernaryBitVector) -> String {
        v.segmented(&self.level_bits)
    }

    /// One line per state: `name = 0.10X.XX`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, name) in self.names.iter().enumerate() {
            let _ = writeln!(out, "{name} = {}", self.format(&self.encode_state(StateId(i))));
        }
        out
    }
}

#[cfg(test)]
mod tests;
