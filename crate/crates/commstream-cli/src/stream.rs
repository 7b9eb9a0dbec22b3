//! Event-stream file format.
//!
//! One event per line, `op,src,dst,weight,timestamp` with op `+` or `-`.
//! Weight (additions only) defaults to 1; the timestamp defaults to the
//! 0-based physical line index, so a file without explicit timestamps is
//! simply ordered by position. Blank lines and `#` comments are skipped
//! but still advance the line index. Timestamps must never decrease.

use anyhow::{bail, Context, Result};
use commstream::graph::Timestamp;
use commstream::temporal::EdgeEvent;
use std::path::Path;

pub fn parse_stream(path: &Path) -> Result<Vec<EdgeEvent>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_stream_text(&text)
}

pub fn parse_stream_text(text: &str) -> Result<Vec<EdgeEvent>> {
    let mut events = Vec::new();
    let mut last: Option<Timestamp> = None;
    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let event =
            parse_line(line, index as Timestamp).with_context(|| format!("line {}", index + 1))?;
        if let Some(prev) = last {
            if event.time() < prev {
                bail!("line {}: timestamp {} is before {}", index + 1, event.time(), prev);
            }
        }
        last = Some(event.time());
        events.push(event);
    }
    Ok(events)
}

fn parse_line(line: &str, default_time: Timestamp) -> Result<EdgeEvent> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if !(3..=5).contains(&fields.len()) {
        bail!("expected 3 to 5 fields, found {}", fields.len());
    }
    let src = fields[1].parse().context("source vertex")?;
    let dst = fields[2].parse().context("destination vertex")?;
    let weight_field = fields.get(3).copied().unwrap_or("");
    let time = match fields.get(4).copied().filter(|f| !f.is_empty()) {
        Some(f) => f.parse().context("timestamp")?,
        None => default_time,
    };
    match fields[0] {
        "+" => {
            let weight = if weight_field.is_empty() {
                1.0
            } else {
                weight_field.parse().context("weight")?
            };
            if !(weight > 0.0 && f64::is_finite(weight)) {
                bail!("weight must be positive and finite, found {weight_field}");
            }
            Ok(EdgeEvent::Add { src, dst, weight, time })
        }
        "-" => {
            if !weight_field.is_empty() {
                bail!("removal lines take no weight field");
            }
            Ok(EdgeEvent::Remove { src, dst, time })
        }
        op => bail!("unknown operation {op:?}, expected + or -"),
    }
}

/// One stream-file line for `event`, without the trailing newline.
pub fn format_event(event: &EdgeEvent) -> String {
    match *event {
        EdgeEvent::Add { src, dst, weight, time } => format!("+,{src},{dst},{weight},{time}"),
        EdgeEvent::Remove { src, dst, time } => format!("-,{src},{dst},,{time}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_weight_and_line_index() {
        let events = parse_stream_text("+,1,2\n").unwrap();
        assert_eq!(events, vec![EdgeEvent::Add { src: 1, dst: 2, weight: 1.0, time: 0 }]);
    }

    #[test]
    fn removal_carries_explicit_timestamp() {
        let events = parse_stream_text("-,1,2,,5\n").unwrap();
        assert_eq!(events, vec![EdgeEvent::Remove { src: 1, dst: 2, time: 5 }]);
    }

    #[test]
    fn comments_and_blanks_advance_the_default_clock() {
        let text = "# header\n+,1,2\n\n+,2,3\n";
        let events = parse_stream_text(text).unwrap();
        assert_eq!(events[0].time(), 1);
        assert_eq!(events[1].time(), 3);
    }

    #[test]
    fn eight_additions_reconstruct_the_example_network() {
        let text = "+,1,2\n+,1,3\n+,2,3\n+,3,5\n+,4,5\n+,4,7\n+,5,6\n+,6,7\n";
        let events = parse_stream_text(text).unwrap();
        assert_eq!(events.len(), 8);
        assert!(events.iter().all(|e| matches!(e, EdgeEvent::Add { weight, .. } if *weight == 1.0)));
        let mut g = commstream::graph::DynGraph::new();
        for e in &events {
            if let EdgeEvent::Add { src, dst, weight, .. } = *e {
                g.add_edge(src, dst, weight).unwrap();
            }
        }
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.edge_count(), 8);
    }

    #[test]
    fn malformed_lines_report_their_number() {
        for text in ["+,1\n", "*,1,2\n", "+,1,2,zero\n", "-,1,2,3\n", "+,1,2,1,4,9\n"] {
            let err = format!("{:#}", parse_stream_text(text).unwrap_err());
            assert!(err.contains("line 1"), "{err}");
        }
        let err = format!("{:#}", parse_stream_text("+,1,2,,9\n+,2,3,,4\n").unwrap_err());
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn format_round_trips() {
        let events = vec![
            EdgeEvent::Add { src: 1, dst: 2, weight: 1.0, time: 0 },
            EdgeEvent::Add { src: 2, dst: 3, weight: 2.5, time: 1 },
            EdgeEvent::Remove { src: 1, dst: 2, time: 4 },
        ];
        let text: String = events.iter().map(|e| format_event(e) + "\n").collect();
        assert_eq!(parse_stream_text(&text).unwrap(), events);
    }
}
