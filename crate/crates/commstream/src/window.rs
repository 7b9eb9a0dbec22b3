//! Landmark and sliding ingestion windows over edge-event streams.
//!
//! A window turns one incoming event into the list of graph edits that keep
//! a graph consistent with the window's contents: the admitted event first,
//! then one removal per evicted edge. Evictions are checked every `stride`
//! events, so a stride above one yields overlapping hops where the window
//! is only trimmed at hop boundaries.
//!
//! Contents hold live ADD entries keyed by the unordered edge; re-adding an
//! edge refreshes its position and timestamp instead of duplicating it.
//! REMOVE events pass through and drop the entry so a later slide does not
//! re-evict a dead edge. Event timestamps must be non-decreasing.

use crate::error::{Error, Result};
use crate::graph::{Timestamp, VertexId, Weight};
use crate::temporal::EdgeEvent;
use std::collections::VecDeque;

/// What the sliding length counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowMode {
    /// Keep the newest `length` edges.
    Count,
    /// Keep edges with timestamps inside `(t_now - length, t_now]`.
    Time,
}

/// Window policy for stream ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowPolicy {
    /// Everything since the start of the stream; nothing is evicted.
    Landmark,
    /// Fixed-extent window trimmed every `stride` events.
    Sliding { length: u64, mode: WindowMode, stride: u64 },
}

impl WindowPolicy {
    /// Checks length and stride ranges; stride must not exceed length.
    pub fn validate(&self) -> Result<()> {
        match *self {
            WindowPolicy::Landmark => Ok(()),
            WindowPolicy::Sliding { length, stride, .. } => {
                if length == 0 {
                    Err(Error::InvalidConfig("window length must be at least 1".into()))
                } else if stride == 0 {
                    Err(Error::InvalidConfig("window stride must be at least 1".into()))
                } else if stride > length {
                    Err(Error::InvalidConfig(format!(
                        "stride {stride} exceeds window length {length}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// A live edge held by the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEntry {
    pub src: VertexId,
    pub dst: VertexId,
    pub weight: Weight,
    pub time: Timestamp,
}

/// Ingestion window state: admitted edges in arrival order.
#[derive(Debug, Clone)]
pub struct Window {
    policy: WindowPolicy,
    /// Live entries, oldest first; timestamps are non-decreasing.
    contents: VecDeque<WindowEntry>,
    seen: u64,
    last_time: Option<Timestamp>,
}

impl Window {
    /// Creates a window after validating the policy.
    pub fn new(policy: WindowPolicy) -> Result<Self> {
        policy.validate()?;
        Ok(Window { policy, contents: VecDeque::new(), seen: 0, last_time: None })
    }

    /// The policy this window runs under.
    pub fn policy(&self) -> WindowPolicy {
        self.policy
    }

    /// Live entries, oldest first.
    pub fn contents(&self) -> impl Iterator<Item = &WindowEntry> + '_ {
        self.contents.iter()
    }

    /// Number of live entries.
    pub fn len(&self) -> usize {
        self.contents.len()
    }

    /// Whether the window holds no edges.
    pub fn is_empty(&self) -> bool {
        self.contents.is_empty()
    }

    /// Admits one event and returns the graph edits it implies: the event
    /// itself followed by a REMOVE per evicted edge.
    pub fn advance(&mut self, event: &EdgeEvent) -> Result<Vec<EdgeEvent>> {
        let t = event.time();
        if let Some(prev) = self.last_time {
            if t < prev {
                return Err(Error::OutOfOrder { prev, now: t });
            }
        }
        self.last_time = Some(t);
        self.seen += 1;

        let (u, v) = normalize(event.endpoints());
        let mut edits = vec![*event];
        match *event {
            EdgeEvent::Add { weight, .. } => {
                // Refresh moves the entry to the newest position.
                self.drop_entry(u, v);
                self.contents.push_back(WindowEntry { src: u, dst: v, weight, time: t });
            }
            EdgeEvent::Remove { .. } => {
                self.drop_entry(u, v);
            }
        }

        if let WindowPolicy::Sliding { length, mode, stride } = self.policy {
            if self.seen % stride == 0 {
                match mode {
                    WindowMode::Count => {
                        while self.contents.len() as u64 > length {
                            let old = self.contents.pop_front().expect("len checked");
                            edits.push(EdgeEvent::Remove { src: old.src, dst: old.dst, time: t });
                        }
                    }
                    WindowMode::Time => {
                        if let Some(cutoff) = t.checked_sub(length) {
                            while self.contents.front().is_some_and(|e| e.time <= cutoff) {
                                let old = self.contents.pop_front().expect("front checked");
                                edits.push(EdgeEvent::Remove {
                                    src: old.src,
                                    dst: old.dst,
                                    time: t,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(edits)
    }

    fn drop_entry(&mut self, u: VertexId, v: VertexId) {
        if let Some(pos) = self.contents.iter().position(|e| e.src == u && e.dst == v) {
            self.contents.remove(pos);
        }
    }
}

fn normalize((a, b): (VertexId, VertexId)) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn add(u: VertexId, v: VertexId, t: Timestamp) -> EdgeEvent {
        EdgeEvent::Add { src: u, dst: v, weight: 1.0, time: t }
    }

    fn removes(edits: &[EdgeEvent]) -> Vec<(VertexId, VertexId)> {
        edits
            .iter()
            .filter_map(|e| match *e {
                EdgeEvent::Remove { src, dst, .. } => Some((src, dst)),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn policy_validation() {
        assert!(WindowPolicy::Landmark.validate().is_ok());
        let bad = WindowPolicy::Sliding { length: 2, mode: WindowMode::Count, stride: 3 };
        assert!(bad.validate().is_err());
        assert!(Window::new(bad).is_err());
        let zero = WindowPolicy::Sliding { length: 0, mode: WindowMode::Count, stride: 1 };
        assert!(zero.validate().is_err());
    }

    #[test]
    fn landmark_never_evicts() {
        let mut w = Window::new(WindowPolicy::Landmark).unwrap();
        for i in 0..5 {
            let edits = w.advance(&add(i, i + 1, i)).unwrap();
            assert_eq!(edits.len(), 1);
        }
        assert_eq!(w.len(), 5);
    }

    #[test]
    fn landmark_remove_passes_through_and_forgets() {
        let mut w = Window::new(WindowPolicy::Landmark).unwrap();
        w.advance(&add(1, 2, 0)).unwrap();
        let edits = w.advance(&EdgeEvent::Remove { src: 2, dst: 1, time: 1 }).unwrap();
        assert_eq!(edits.len(), 1);
        assert!(w.is_empty());
    }

    #[test]
    fn count_window_evicts_oldest_beyond_length() {
        let policy = WindowPolicy::Sliding { length: 3, mode: WindowMode::Count, stride: 1 };
        let mut w = Window::new(policy).unwrap();
        assert_eq!(w.advance(&add(1, 2, 0)).unwrap().len(), 1);
        assert_eq!(w.advance(&add(2, 3, 1)).unwrap().len(), 1);
        assert_eq!(w.advance(&add(3, 4, 2)).unwrap().len(), 1);
        let edits = w.advance(&add(4, 5, 3)).unwrap();
        assert_eq!(removes(&edits), vec![(1, 2)]);
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn time_window_evicts_boundary_ties() {
        let policy = WindowPolicy::Sliding { length: 2, mode: WindowMode::Time, stride: 1 };
        let mut w = Window::new(policy).unwrap();
        w.advance(&add(1, 2, 0)).unwrap();
        w.advance(&add(2, 3, 1)).unwrap();
        let edits = w.advance(&add(3, 4, 3)).unwrap();
        // Cutoff is t <= 1: both earlier adds leave.
        assert_eq!(removes(&edits), vec![(1, 2), (2, 3)]);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn duplicate_add_refreshes_position() {
        let policy = WindowPolicy::Sliding { length: 2, mode: WindowMode::Count, stride: 1 };
        let mut w = Window::new(policy).unwrap();
        w.advance(&add(1, 2, 0)).unwrap();
        w.advance(&add(2, 3, 1)).unwrap();
        // Re-adding (1,2) makes it the newest entry; (2,3) is now oldest.
        w.advance(&add(2, 1, 2)).unwrap();
        let edits = w.advance(&add(4, 5, 3)).unwrap();
        assert_eq!(removes(&edits), vec![(2, 3)]);
    }

    #[test]
    fn stride_defers_eviction_to_hops() {
        let policy = WindowPolicy::Sliding { length: 3, mode: WindowMode::Count, stride: 3 };
        let mut w = Window::new(policy).unwrap();
        for i in 0..5 {
            let edits = w.advance(&add(i, i + 1, i)).unwrap();
            assert_eq!(edits.len(), 1, "no eviction before the hop (event {i})");
        }
        // Sixth event lands on a hop: trim down to length.
        let edits = w.advance(&add(5, 6, 5)).unwrap();
        assert_eq!(removes(&edits), vec![(0, 1), (1, 2), (2, 3)]);
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn out_of_order_events_are_rejected() {
        let mut w = Window::new(WindowPolicy::Landmark).unwrap();
        w.advance(&add(1, 2, 5)).unwrap();
        let got = w.advance(&add(2, 3, 4));
        assert_eq!(got, Err(Error::OutOfOrder { prev: 5, now: 4 }));
    }
}
