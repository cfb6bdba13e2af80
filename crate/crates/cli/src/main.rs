mod config;

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;

use airwrite_core::harness::jitter_accuracy;
use airwrite_core::ocr::{TemplateSet, DEFAULT_TEMPLATE_SIZE};
use airwrite_core::pipeline::recognize_sequence_with;
use airwrite_core::pnm::{encode_mask_pgm, read_frame_dir, write_file, write_frame_dir};
use airwrite_core::synth::{
    default_templates, render_sequence, render_template, SynthParams, TEMPLATE_THICKNESSES,
};
use airwrite_core::Real;
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::config::PipelineFlags;

#[derive(Parser)]
#[command(
    name = "airwrite",
    version,
    about = "Recognize letters written in the air with a red fingertip"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic fingertip video for some text as numbered PPM frames
    Synth {
        #[arg(long)]
        text: String,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        /// Standard deviation of per-point jitter in pixels
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recognize the text written in a directory of PPM frames
    Recognize {
        #[arg(long, value_name = "DIR")]
        frames: PathBuf,
        /// Text file the result is appended to
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Write a JSON report with per-character scores and timings
        #[arg(long, value_name = "FILE")]
        report: Option<PathBuf>,
        /// Write each fitted glyph as a PGM image
        #[arg(long, value_name = "DIR")]
        dump_glyphs: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineFlags,
    },
    /// Serve live sessions over WebSocket
    Serve {
        #[arg(long, default_value_t = 8765)]
        port: u16,
        #[command(flatten)]
        pipeline: PipelineFlags,
    },
    /// Export the built-in template set as <label>/<variant>.pgm
    Templates {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TEMPLATE_SIZE)]
        size: usize,
    },
    /// Per-letter accuracy on jittered synthetic strokes
    Eval {
        #[arg(long, default_value_t = 2.0)]
        jitter: f64,
        /// Number of seeds per letter, starting at 0
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value = "ABCDEFGHIJKLMNOPQRSTUVWXYZ")]
        letters: String,
        #[command(flatten)]
        pipeline: PipelineFlags,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Synth {
            text,
            out,
            jitter,
            seed,
        } => {
            let params = SynthParams {
                jitter_sigma: jitter,
                seed,
                ..SynthParams::default()
            };
            let frames = render_sequence(&text, &params)?;
            std::fs::create_dir_all(&out)?;
            write_frame_dir(&out, &frames)?;
            println!("wrote {} frames to {}", frames.len(), out.display());
        }
        Command::Recognize {
            frames,
            out,
            report,
            dump_glyphs,
            pipeline,
        } => {
            let cfg = pipeline.resolve()?;
            let templates = cfg.load_templates()?;
            let frames = read_frame_dir(&frames)?;
            let result = recognize_sequence_with::<Real>(&frames, &cfg, templates)?;
            println!("{}", result.text);
            if let Some(path) = out {
                let mut f = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&path)
                    .with_context(|| format!("opening {}", path.display()))?;
                writeln!(f, "{}", result.text)?;
            }
            if let Some(path) = report {
                std::fs::write(&path, serde_json::to_string_pretty(&result.to_json())?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            if let Some(dir) = dump_glyphs {
                std::fs::create_dir_all(&dir)?;
                for (i, c) in result.per_char.iter().enumerate() {
                    write_file(
                        &dir.join(format!("{i:03}_{}.pgm", c.label)),
                        &encode_mask_pgm(&c.glyph),
                    )?;
                }
            }
        }
        Command::Serve { port, pipeline } => {
            let cfg = pipeline.resolve()?;
            let runtime = tokio::runtime::Runtime::new()?;
            eprintln!("listening on ws://0.0.0.0:{port}");
            runtime.block_on(airwrite_server::serve(port, cfg))?;
        }
        Command::Templates { out, size } => {
            let set = if size == DEFAULT_TEMPLATE_SIZE {
                (*default_templates()).clone()
            } else {
                let mut templates = Vec::new();
                for label in 'A'..='Z' {
                    for &t in &TEMPLATE_THICKNESSES {
                        templates.push(render_template(label, t, size)?);
                    }
                }
                TemplateSet::new(templates)?
            };
            set.save(&out)?;
            println!("wrote {} templates to {}", set.len(), out.display());
        }
        Command::Eval {
            jitter,
            seeds,
            letters,
            pipeline,
        } => {
            let cfg = pipeline.resolve()?;
            let templates = cfg.load_templates()?;
            let letters: Vec<char> = letters.chars().filter(|c| !c.is_whitespace()).collect();
            let table = jitter_accuracy(&letters, jitter, 0..seeds, &cfg, templates)?;
            println!("{table}");
        }
    }
    Ok(())
}
