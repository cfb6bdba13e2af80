//! Accuracy and latency sweeps over synthetic footage.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::Result;
use crate::ocr::TemplateSet;
use crate::pipeline::{recognize_sequence_with, PipelineConfig};
use crate::synth::{render_sequence, SynthParams};

#[derive(Debug, Clone, PartialEq)]
pub struct LetterAccuracy {
    pub label: char,
    pub trials: usize,
    pub correct: usize,
}

impl LetterAccuracy {
    pub fn percent(&self) -> f64 {
        100.0 * self.correct as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyTable {
    pub jitter_sigma: f64,
    pub rows: Vec<LetterAccuracy>,
}

impl AccuracyTable {
    /// Mean of the per-letter percentages.
    pub fn average_percent(&self) -> f64 {
        self.rows.iter().map(LetterAccuracy::percent).sum::<f64>() / self.rows.len() as f64
    }
}

impl fmt::Display for AccuracyTable {
    /// Two-column layout: serial number, letter, accuracy.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Accuracy rate for each alphabet (jitter sigma = {} px)",
            self.jitter_sigma
        )?;
        writeln!(
            f,
            "{:<4}{:<11}{:<12}{:<4}{:<11}{:<12}",
            "Sr.", "Alphabets", "Accuracy %", "Sr.", "Alphabets", "Accuracy %"
        )?;
        let half = self.rows.len().div_ceil(2);
        for i in 0..half {
            let left = &self.rows[i];
            write!(f, "{:<4}{:<11}{:<12.0}", i + 1, left.label, left.percent())?;
            if let Some(right) = self.rows.get(i + half) {
                write!(
                    f,
                    "{:<4}{:<11}{:<12.0}",
                    i + half + 1,
                    right.label,
                    right.percent()
                )?;
            }
            writeln!(f)?;
        }
        writeln!(f, "AVERAGE Accuracy {:.3}", self.average_percent())
    }
}

/// Renders each letter once per seed with positional jitter and counts how
/// often the pipeline reads it back exactly.
pub fn jitter_accuracy(
    letters: &[char],
    jitter_sigma: f64,
    seeds: std::ops::Range<u64>,
    cfg: &PipelineConfig,
    templates: Arc<TemplateSet>,
) -> Result<AccuracyTable> {
    let trials: Vec<(char, u64)> = letters
        .iter()
        .flat_map(|&c| seeds.clone().map(move |s| (c, s)))
        .collect();
    let outcomes = trials
        .par_iter()
        .map(|&(c, seed)| {
            let params = SynthParams {
                jitter_sigma,
                seed,
                ..SynthParams::default()
            };
            let frames = render_sequence(&c.to_string(), &params)?;
            let report = recognize_sequence_with::<f64>(&frames, cfg, templates.clone())?;
            Ok((c, report.text == c.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = letters
        .iter()
        .map(|&c| {
            let mine: Vec<bool> = outcomes.iter().filter(|o| o.0 == c).map(|o| o.1).collect();
            LetterAccuracy {
                label: c,
                trials: mine.len(),
                correct: mine.iter().filter(|&&ok| ok).count(),
            }
        })
        .collect();
    Ok(AccuracyTable { jitter_sigma, rows })
}
