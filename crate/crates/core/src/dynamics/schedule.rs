use sha2::{Digest, Sha256};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Continuous-time flow `ẋ = −L x`.
    Ct,
    /// Discrete-time map `x⁺ = (I − hL) x`.
    Dt,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Ct => "CT",
            Mode::Dt => "DT",
        }
    }
}

/// One interval of the switching signal: a subsystem and a topology.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Ct { duration: f64, topology: String },
    Dt { steps: u64, topology: String },
}

impl Segment {
    pub fn mode(&self) -> Mode {
        match self {
            Segment::Ct { .. } => Mode::Ct,
            Segment::Dt { .. } => Mode::Dt,
        }
    }

    pub fn topology(&self) -> &str {
        match self {
            Segment::Ct { topology, .. } | Segment::Dt { topology, .. } => topology,
        }
    }

    /// Logical time spent in the segment; a DT step counts as one unit.
    pub fn span(&self) -> f64 {
        match self {
            Segment::Ct { duration, .. } => *duration,
            Segment::Dt { steps, .. } => *steps as f64,
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let topology = self.topology();
        if topology.is_empty() || topology.chars().any(char::is_whitespace) {
            return Err(format!("invalid topology id `{topology}`"));
        }
        match self {
            Segment::Ct { duration, .. } if !(duration.is_finite() && *duration > 0.0) => {
                Err(format!("CT duration must be positive and finite, got {duration}"))
            }
            Segment::Dt { steps: 0, .. } => Err("DT segment needs at least one step".into()),
            _ => Ok(()),
        }
    }
}

/// An explicit switching signal: an ordered, nonempty list of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    segments: Vec<Segment>,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("schedule has no segments".into()));
        }
        for (index, s) in segments.iter().enumerate() {
            s.validate().map_err(|m| Error::Segment {
                index,
                source: Box::new(Error::InvalidParameter(m)),
            })?;
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Total CT time `t_c`.
    pub fn ct_time(&self) -> f64 {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Ct { duration, .. } => Some(*duration),
                _ => None,
            })
            .sum()
    }

    /// Total DT steps `t_d`.
    pub fn dt_steps(&self) -> u64 {
        self.segments
            .iter()
            .filter_map(|s| match s {
                Segment::Dt { steps, .. } => Some(*steps),
                _ => None,
            })
            .sum()
    }

    /// `t = t_c + t_d`.
    pub fn total_time(&self) -> f64 {
        self.ct_time() + self.dt_steps() as f64
    }

    /// Distinct topology ids in order of first use.
    pub fn topology_ids(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for s in &self.segments {
            if !out.contains(&s.topology()) {
                out.push(s.topology());
            }
        }
        out
    }

    /// Hex SHA-256 of the canonical text form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    /// Parses `ct <duration> <topology_id>` / `dt <steps> <topology_id>`
    /// lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut segments = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err("expected `<ct|dt> <length> <topology_id>`".into()));
            }
            let topology = fields[2].to_string();
            let seg = match fields[0] {
                "ct" => Segment::Ct {
                    duration: fields[1]
                        .parse()
                        .map_err(|_| err(format!("bad duration `{}`", fields[1])))?,
                    topology,
                },
                "dt" => Segment::Dt {
                    steps: fields[1]
                        .parse()
                        .map_err(|_| err(format!("bad step count `{}`", fields[1])))?,
                    topology,
                },
                other => return Err(err(format!("unknown segment kind `{other}`"))),
            };
            seg.validate().map_err(err)?;
            segments.push(seg);
        }
        if segments.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "schedule has no segments".into(),
            });
        }
        Ok(Self { segments })
    }

    /// Canonical text; durations use the shortest round-tripping form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.segments {
            match s {
                Segment::Ct { duration, topology } => {
                    out.push_str(&format!("ct {duration:?} {topology}\n"))
                }
                Segment::Dt { steps, topology } => out.push_str(&format!("dt {steps} {topology}\n")),
            }
        }
        out
    }
}
