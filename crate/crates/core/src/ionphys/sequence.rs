use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Piecewise-constant amplitudes on equal segments, one vector per ion.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    pub n_seg: usize,
    pub tau: f64,
    pub mu: f64,
    pub ions: Vec<usize>,
    pub amplitudes: Vec<Vec<f64>>,
}

impl PulseSequence {
    pub fn new(
        n_seg: usize,
        tau: f64,
        mu: f64,
        ions: Vec<usize>,
        amplitudes: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let p = PulseSequence {
            n_seg,
            tau,
            mu,
            ions,
            amplitudes,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_seg == 0 || !(self.tau > 0.0) {
            return Err(Error::invalid("pulse needs n_seg >= 1 and tau > 0"));
        }
        if self.ions.len() != self.amplitudes.len()
            || self.amplitudes.iter().any(|a| a.len() != self.n_seg)
        {
            return Err(Error::invalid("every addressed ion needs n_seg amplitudes"));
        }
        Ok(())
    }

    pub fn segment_duration(&self) -> f64 {
        self.tau / self.n_seg as f64
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amplitudes
            .iter()
            .flatten()
            .fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn scaled(&self, s: f64) -> PulseSequence {
        PulseSequence {
            amplitudes: self
                .amplitudes
                .iter()
                .map(|a| a.iter().map(|x| x * s).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// Header `n_seg tau mu`, then `ion amp...` per addressed ion. Lines
    /// starting with `#` are comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {:e} {:e}", self.n_seg, self.tau, self.mu);
        for (ion, amps) in self.ions.iter().zip(&self.amplitudes) {
            let _ = write!(out, "{ion}");
            for a in amps {
                let _ = write!(out, " {a:e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PulseSequence> {
        let bad = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        });
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty pulse file"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(bad(1, "header must be `n_seg tau mu`"));
        }
        let n_seg = h[0].parse().map_err(|_| bad(1, "bad n_seg"))?;
        let tau = h[1].parse().map_err(|_| bad(1, "bad tau"))?;
        let mu = h[2].parse().map_err(|_| bad(1, "bad mu"))?;
        let mut ions = Vec::new();
        let mut amplitudes = Vec::new();
        for (n, line) in lines {
            let mut fields = line.split_whitespace();
            let ion = fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| bad(n + 1, "bad ion id"))?;
            let amps = fields
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(n + 1, "bad amplitude"))?;
            ions.push(ion);
            amplitudes.push(amps);
        }
        PulseSequence::new(n_seg, tau, mu, ions, amplitudes)
    }
}
