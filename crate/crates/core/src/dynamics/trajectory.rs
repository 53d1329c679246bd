use std::io::{self, Write};

use nalgebra::DVector;

use super::Mode;
use crate::fmt::sig;

/// Digits used for every float in the trajectory CSV.
pub const CSV_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x: DVector<f64>,
    pub mode: Mode,
    pub topology: String,
}

/// Time-stamped agent states of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub(super) samples: Vec<Sample>,
    pub(super) h: f64,
    pub(super) schedule_digest: String,
}

impl Trajectory {
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn schedule_digest(&self) -> &str {
        &self.schedule_digest
    }

    pub fn initial_state(&self) -> &DVector<f64> {
        &self.samples[0].x
    }

    pub fn final_state(&self) -> &DVector<f64> {
        &self.samples.last().expect("trajectory holds x(0)").x
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().expect("trajectory holds x(0)").t
    }

    pub fn n(&self) -> usize {
        self.samples[0].x.len()
    }

    /// `t,mode,topology,x1,...,xn` with 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "t,mode,topology")?;
        for i in 1..=self.n() {
            write!(w, ",x{i}")?;
        }
        writeln!(w)?;
        for s in &self.samples {
            write!(w, "{},{},{}", sig(s.t, CSV_DIGITS), s.mode.as_str(), s.topology)?;
            for v in s.x.iter() {
                write!(w, ",{}", sig(*v, CSV_DIGITS))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}
