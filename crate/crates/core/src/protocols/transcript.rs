//! Message transcripts: one line per message, tab-separated
//! `step sender value...`.

use std::fmt;

use super::{ProtocolError, Result};
use crate::bigreal::{render_fixed, Real};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptLine {
    pub step: String,
    pub sender: String,
    pub values: Vec<String>,
}

impl fmt::Display for TranscriptLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.step, self.sender)?;
        for v in &self.values {
            write!(f, "\t{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    pub lines: Vec<TranscriptLine>,
}

impl Transcript {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Transcript> {
        let mut lines = Vec::new();
        for raw in text.lines().filter(|l| !l.is_empty()) {
            let mut fields = raw.split('\t');
            let (Some(step), Some(sender)) = (fields.next(), fields.next()) else {
                return Err(ProtocolError::Malformed {
                    step: raw.to_string(),
                    reason: "transcript line needs a step and a sender".into(),
                });
            };
            lines.push(TranscriptLine {
                step: step.to_string(),
                sender: sender.to_string(),
                values: fields.map(str::to_string).collect(),
            });
        }
        Ok(Transcript { lines })
    }
}

type Tamper = Box<dyn FnMut(&str, &mut Vec<String>) + Send>;

/// In-process message path. Every value is rendered to text, optionally
/// altered by a tamper hook, recorded, and handed to the receiver.
#[derive(Default)]
pub struct Channel {
    transcript: Transcript,
    tamper: Option<Tamper>,
}

impl Channel {
    pub fn new() -> Channel {
        Channel::default()
    }

    /// A channel whose hook may rewrite the rendered fields of any message
    /// before delivery; the hook receives the step name.
    pub fn with_tamper<F>(hook: F) -> Channel
    where
        F: FnMut(&str, &mut Vec<String>) + Send + 'static,
    {
        Channel {
            transcript: Transcript::default(),
            tamper: Some(Box::new(hook)),
        }
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    pub fn send(&mut self, step: &str, sender: &str, mut values: Vec<String>) -> Vec<String> {
        if let Some(hook) = self.tamper.as_mut() {
            hook(step, &mut values);
        }
        self.transcript.lines.push(TranscriptLine {
            step: step.to_string(),
            sender: sender.to_string(),
            values: values.clone(),
        });
        values
    }

    /// Sends reals in fixed rendering with `digits` fractional digits and
    /// parses them back at that precision.
    pub fn send_reals(
        &mut self,
        step: &str,
        sender: &str,
        reals: &[&Real],
        digits: u32,
    ) -> Result<Vec<Real>> {
        let rendered = reals.iter().map(|r| render_fixed(r, digits)).collect();
        let received = self.send(step, sender, rendered);
        received
            .iter()
            .map(|s| parse_real(step, s, digits))
            .collect()
    }

    pub fn send_real(
        &mut self,
        step: &str,
        sender: &str,
        real: &Real,
        digits: u32,
    ) -> Result<Real> {
        let mut v = self.send_reals(step, sender, &[real], digits)?;
        match v.pop() {
            Some(r) if v.is_empty() => Ok(r),
            _ => Err(ProtocolError::Malformed {
                step: step.to_string(),
                reason: "expected exactly one value".into(),
            }),
        }
    }

    pub fn send_hex(&mut self, step: &str, sender: &str, bytes: &[&[u8]]) -> Result<Vec<Vec<u8>>> {
        let rendered = bytes.iter().map(hex::encode).collect();
        self.send(step, sender, rendered)
            .iter()
            .map(|s| {
                hex::decode(s).map_err(|e| ProtocolError::Malformed {
                    step: step.to_string(),
                    reason: e.to_string(),
                })
            })
            .collect()
    }
}

pub(crate) fn parse_real(step: &str, s: &str, digits: u32) -> Result<Real> {
    Real::from_decimal(s, digits).map_err(|e| ProtocolError::Malformed {
        step: step.to_string(),
        reason: e.to_string(),
    })
}

/// Replaces the `pos`-th fractional digit (1-based) of the first value of a
/// message with a different digit. Used by the adversarial tests.
pub fn flip_digit(values: &mut [String], pos: usize) {
    let Some(v) = values.first_mut() else { return };
    let Some(point) = v.find('.') else { return };
    let idx = point + pos;
    if let Some(d) = v.as_bytes().get(idx).filter(|b| b.is_ascii_digit()) {
        let flipped = (b'0' + (d - b'0' + 5) % 10) as char;
        v.replace_range(idx..idx + 1, &flipped.to_string());
    }
}
