//! Acceptance criteria for the recognition engine. Each test prints one
//! `[PASS]`/`[FAIL]` line; run with `--nocapture` to see them.

use std::collections::VecDeque;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use airwrite_core::blobs::{label, Connectivity};
use airwrite_core::edge::{
    enhance, gaussian_sigma, gaussian_smooth, normalize_edges, sobel_gradient, threshold_edges,
    EdgeMaps, GaussianKernel, Grid,
};
use airwrite_core::harness::jitter_accuracy;
use airwrite_core::ocr::recognize;
use airwrite_core::pipeline::{recognize_sequence, recognize_sequence_with, PipelineConfig};
use airwrite_core::raster::{BinaryRaster, GrayRaster, Point};
use airwrite_core::synth::{default_templates, render_sequence, SynthParams};
use airwrite_core::tracker::{mirror_x, step, TrackerConfig, TrackerEvent, TrackerState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Criteria run one at a time so the latency figure is not taken while the
// accuracy sweep occupies the cores.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(name: &str, ok: bool, detail: impl AsRef<str>) {
    println!(
        "[{}] {name}: {}",
        if ok { "PASS" } else { "FAIL" },
        detail.as_ref()
    );
    assert!(ok, "{name}: {}", detail.as_ref());
}

// ---------------------------------------------------------------- oracles

/// Direct 2-D convolution with replicated borders.
fn brute_smooth(img: &GrayRaster<f64>, k: &GaussianKernel<f64>) -> Vec<f64> {
    let (w, h) = img.dims();
    let r = (k.window() / 2) as i64;
    let mut out = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut acc = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let sx = (x + dx).clamp(0, w as i64 - 1) as usize;
                    let sy = (y + dy).clamp(0, h as i64 - 1) as usize;
                    acc += k.weight((dx + r) as usize, (dy + r) as usize) * img.get(sx, sy);
                }
            }
            out[y as usize * w + x as usize] = acc;
        }
    }
    out
}

/// Textbook Sobel masks applied cell by cell; border cells stay 0.
fn brute_sobel(img: &GrayRaster<f64>) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    const GX: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
    const GY: [[f64; 3]; 3] = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
    let (w, h) = img.dims();
    let (mut eh, mut ev, mut e) = (vec![0.0; w * h], vec![0.0; w * h], vec![0.0; w * h]);
    for i in 1..h - 1 {
        for j in 1..w - 1 {
            let (mut gx, mut gy) = (0.0, 0.0);
            for (r, (rx, ry)) in GX.iter().zip(GY.iter()).enumerate() {
                for c in 0..3 {
                    let v = img.get(j + c - 1, i + r - 1);
                    gx += rx[c] * v;
                    gy += ry[c] * v;
                }
            }
            eh[i * w + j] = gx;
            ev[i * w + j] = gy;
            e[i * w + j] = (gx * gx + gy * gy).sqrt();
        }
    }
    (eh, ev, e)
}

/// BFS labeling, regions numbered by their first pixel in row-major order.
fn flood_fill_labels(mask: &BinaryRaster, conn: Connectivity) -> (Vec<u32>, u32) {
    let (w, h) = mask.dims();
    let mut labels = vec![0u32; w * h];
    let mut next = 0;
    let offsets: &[(i64, i64)] = match conn {
        Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Connectivity::Eight => &[
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ],
    };
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || labels[y * w + x] != 0 {
                continue;
            }
            next += 1;
            labels[y * w + x] = next;
            let mut queue = VecDeque::from([(x, y)]);
            while let Some((cx, cy)) = queue.pop_front() {
                for &(dx, dy) in offsets {
                    let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as usize, ny as usize);
                    if mask.get(nx, ny) && labels[ny * w + nx] == 0 {
                        labels[ny * w + nx] = next;
                        queue.push_back((nx, ny));
                    }
                }
            }
        }
    }
    (labels, next)
}

fn random_gray(rng: &mut ChaCha8Rng, w: usize, h: usize) -> GrayRaster<f64> {
    GrayRaster::new(
        w,
        h,
        (0..w * h).map(|_| rng.gen_range(0..=255) as f64).collect(),
    )
    .unwrap()
}

fn row_maps(values: Vec<f64>) -> EdgeMaps<f64> {
    let w = values.len();
    EdgeMaps::from_magnitude(Grid::from_vec(w, 1, values).unwrap())
}

// --------------------------------------------------------------- criteria

#[test]
fn edge_chain_laws() {
    let _serial = serial();
    let sig: Vec<f64> = [3, 5, 7]
        .iter()
        .map(|&w| gaussian_sigma::<f64>(w).unwrap())
        .collect();
    let sigma_ok = sig == vec![0.95, 1.25, 1.55];

    // 3-4-5: a plane whose Sobel responses are exactly (3, 4)
    let plane = GrayRaster::new(
        5,
        5,
        (0..25)
            .map(|i| 50.0 + 0.375 * (i % 5) as f64 + 0.5 * (i / 5) as f64)
            .collect(),
    )
    .unwrap();
    let m = sobel_gradient(&plane).unwrap();
    let triple_ok = m.e_h.get(2, 2) == 3.0 && m.e_v.get(2, 2) == 4.0 && m.e.get(2, 2) == 5.0;

    let mut rng = ChaCha8Rng::seed_from_u64(0xE06E);
    let mut sobel_dev: f64 = 0.0;
    let mut smooth_dev: f64 = 0.0;
    for _ in 0..50 {
        let img = random_gray(&mut rng, 16, 16);
        let (eh, ev, e) = brute_sobel(&img);
        let fast = sobel_gradient(&img).unwrap();
        for i in 0..256 {
            sobel_dev = sobel_dev
                .max((fast.e_h.data()[i] - eh[i]).abs())
                .max((fast.e_v.data()[i] - ev[i]).abs())
                .max((fast.e.data()[i] - e[i]).abs());
        }
        let k = GaussianKernel::new(3).unwrap();
        let oracle = brute_smooth(&img, &k);
        for (a, b) in gaussian_smooth(&img, &k).pixels().iter().zip(&oracle) {
            smooth_dev = smooth_dev.max((a - b).abs());
        }
    }
    let oracle_ok = sobel_dev <= 1e-6 && smooth_dev <= 0.5;

    // endpoint law on a real chain and on a hand-built magnitude field
    let mut endpoint_ok = true;
    for _ in 0..10 {
        let img = random_gray(&mut rng, 16, 16);
        let maps = enhance(&img, &GaussianKernel::new(3).unwrap(), 50.0).unwrap();
        let (lo, hi) = maps.extrema.unwrap();
        for (e, n) in maps
            .e
            .data()
            .iter()
            .zip(maps.e_n.as_ref().unwrap().pixels())
        {
            if *e == lo {
                endpoint_ok &= *n == 0.0;
            }
            if *e == hi {
                endpoint_ok &= *n == 255.0;
            }
        }
    }
    let hand = normalize_edges(row_maps(vec![10.0, 60.0, 110.0]));
    let hand_n = hand.e_n.as_ref().unwrap();
    endpoint_ok &= hand_n.pixels() == [0.0, 128.0, 255.0];

    let mut b = row_maps(vec![0.0; 3]);
    b.e_n = Some(GrayRaster::new(3, 1, vec![49.0, 50.0, 255.0]).unwrap());
    let boundary_ok = threshold_edges(b, 50.0).e_nt.unwrap().pixels() == [0.0, 50.0, 255.0];

    verdict(
        "edge chain laws",
        sigma_ok && triple_ok && oracle_ok && endpoint_ok && boundary_ok,
        format!(
            "sigma {sig:?}, 3-4-5 {triple_ok}, max sobel dev {sobel_dev:.2e}, max smooth dev {smooth_dev:.2e}, \
             endpoints {endpoint_ok}, 49/50 boundary {boundary_ok}"
        ),
    );
}

#[test]
fn labeling_matches_flood_fill() {
    let _serial = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ABE1);
    let mut mismatches = 0;
    for trial in 0..200 {
        let (w, h) = (rng.gen_range(1..=32), rng.gen_range(1..=32));
        let density = rng.gen_range(0.1..0.7);
        let mask = BinaryRaster::from_fn(w, h, |_, _| rng.gen_bool(density));
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let got = label(&mask, conn);
            let (expected, count) = flood_fill_labels(&mask, conn);
            if got.labels() != expected.as_slice() || got.count() != count {
                mismatches += 1;
                eprintln!("trial {trial} {conn:?} {w}x{h} differs");
            }
        }
    }
    verdict(
        "labeling oracle",
        mismatches == 0,
        format!("{mismatches} mismatches over 400 labelings"),
    );
}

#[test]
fn self_recognition_floor() {
    let _serial = serial();
    let set = default_templates();
    let mut labels_ok = std::collections::BTreeSet::new();
    let mut failures = Vec::new();
    for t in set.templates() {
        let m = recognize::<f64>(&t.image, &set).unwrap();
        if m.label == t.label && m.score == 1.0 {
            labels_ok.insert(t.label);
        } else {
            failures.push(format!(
                "{}/{} -> {} ({:.3})",
                t.label, t.variant, m.label, m.score
            ));
        }
    }
    verdict(
        "self-recognition floor",
        failures.is_empty() && labels_ok.len() == 26,
        format!(
            "{}/26 labels, {} templates, failures {failures:?}",
            labels_ok.len(),
            set.len()
        ),
    );
}

#[test]
fn zero_jitter_round_trip() {
    let _serial = serial();
    let cfg = PipelineConfig::default();
    let params = SynthParams::default();
    let mut wrong = Vec::new();
    for c in 'A'..='Z' {
        let text = c.to_string();
        let report =
            recognize_sequence::<f64>(&render_sequence(&text, &params).unwrap(), &cfg).unwrap();
        if report.text != text {
            wrong.push(format!("{c}->{:?}", report.text));
        }
    }
    let hello =
        recognize_sequence::<f64>(&render_sequence("HELLO WORLD", &params).unwrap(), &cfg).unwrap();
    verdict(
        "zero-jitter round trip",
        wrong.is_empty() && hello.text == "HELLO WORLD",
        format!("letters wrong {wrong:?}, HELLO WORLD -> {:?}", hello.text),
    );
}

#[test]
fn jittered_accuracy() {
    let _serial = serial();
    let start = Instant::now();
    let letters: Vec<char> = ('A'..='Z').collect();
    let table = jitter_accuracy(
        &letters,
        2.0,
        0..10,
        &PipelineConfig::default(),
        default_templates(),
    )
    .unwrap();
    let trials: usize = table.rows.iter().map(|r| r.trials).sum();
    println!("{table}");
    verdict(
        "jittered accuracy",
        trials == 260 && table.average_percent() >= 80.0,
        format!(
            "average {:.3}% over {trials} trials (gate 80%), {:.1}s",
            table.average_percent(),
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn segmentation_rules() {
    let _serial = serial();
    let cfg = TrackerConfig::<f64>::default();
    let run = |inputs: &[Option<Point<f64>>]| {
        let mut state = TrackerState::new();
        let mut events = Vec::new();
        for &d in inputs {
            let (s, e) = step(state, d, &cfg);
            state = s;
            events.push(e);
        }
        events
    };
    let stroke: Vec<Option<Point<f64>>> = (0..20)
        .map(|i| Some(Point::new(100.0 + 8.0 * i as f64, 200.0)))
        .collect();
    let rest = Some(Point::new(252.0, 200.0));
    let count = |ev: &[TrackerEvent<f64>], space: bool| {
        ev.iter()
            .filter(|e| {
                if space {
                    matches!(e, TrackerEvent::SpaceEmitted)
                } else {
                    matches!(e, TrackerEvent::CharacterComplete(_))
                }
            })
            .count()
    };

    // dwell boundary
    let mut exact = stroke.clone();
    exact.extend(std::iter::repeat_n(rest, cfg.dwell_frames));
    let ev = run(&exact);
    let dwell_ok = matches!(ev.last(), Some(TrackerEvent::CharacterComplete(s)) if s.len() == 20)
        && count(&run(&exact[..exact.len() - 1]), false) == 0;

    // absence boundary, after a dwell-completed character and after a pending stroke
    let mut space_ok = true;
    for completed_by_dwell in [true, false] {
        for run_len in [
            cfg.absence_frames - 1,
            cfg.absence_frames,
            cfg.absence_frames + 1,
            5 * cfg.absence_frames,
        ] {
            let mut inputs = stroke.clone();
            if completed_by_dwell {
                inputs.extend(std::iter::repeat_n(rest, cfg.dwell_frames));
            }
            inputs.extend(std::iter::repeat_n(None, run_len));
            inputs.extend(
                stroke
                    .iter()
                    .map(|p| p.map(|p| Point::new(p.x, p.y + 50.0))),
            );
            let ev = run(&inputs);
            let expected = usize::from(run_len >= cfg.absence_frames);
            space_ok &= count(&ev, true) == expected;
        }
    }

    // the same rules through the full pipeline on rendered frames
    let pcfg = PipelineConfig::default();
    let short_gap = SynthParams {
        absence_pad: cfg.absence_frames - 1,
        ..SynthParams::default()
    };
    let exact_gap = SynthParams {
        absence_pad: cfg.absence_frames,
        ..SynthParams::default()
    };
    let t_short = recognize_sequence::<f64>(&render_sequence("L L", &short_gap).unwrap(), &pcfg)
        .unwrap()
        .text;
    let t_exact = recognize_sequence::<f64>(&render_sequence("L L", &exact_gap).unwrap(), &pcfg)
        .unwrap()
        .text;
    let exact_dwell = SynthParams {
        dwell_pad: cfg.dwell_frames,
        ..SynthParams::default()
    };
    let t_dwell = recognize_sequence::<f64>(&render_sequence("LV", &exact_dwell).unwrap(), &pcfg)
        .unwrap()
        .text;
    let pipeline_ok = t_short == "LL" && t_exact == "L L" && t_dwell == "LV";

    verdict(
        "segmentation rules",
        dwell_ok && space_ok && pipeline_ok,
        format!("dwell {dwell_ok}, spaces {space_ok}, pipeline short/exact/dwell {t_short:?}/{t_exact:?}/{t_dwell:?}"),
    );
}

#[test]
fn latency() {
    let _serial = serial();
    let frames = render_sequence("NEW", &SynthParams::default()).unwrap();
    let cfg = PipelineConfig::default();
    let templates = default_templates();
    // warm caches and the template set once
    let _ = recognize_sequence_with::<f64>(&frames[..10], &cfg, templates.clone());
    let start = Instant::now();
    let report = recognize_sequence_with::<f64>(&frames, &cfg, templates).unwrap();
    let wall = start.elapsed().as_secs_f64();
    let mut per_char = report.per_char_seconds();
    per_char.sort_by(f64::total_cmp);
    let median = per_char
        .get(per_char.len() / 2)
        .copied()
        .unwrap_or(f64::INFINITY);
    verdict(
        "latency",
        report.text == "NEW" && wall < 1.0 && median < 0.25,
        format!(
            "{:?} in {wall:.3}s over {} frames (gate 1.0s), median per-char recognition {:.2}ms (gate 250ms)",
            report.text,
            frames.len(),
            median * 1e3
        ),
    );
}

#[test]
fn mirror_involution() {
    let _serial = serial();
    let anchor = mirror_x(&[Point::new(207.0, 186.0)], 640);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let stroke: Vec<Point<f64>> = (0..100)
        .map(|_| Point::new(rng.gen_range(0..640) as f64, rng.gen_range(0..480) as f64))
        .collect();
    let twice = mirror_x(&mirror_x(&stroke, 640), 640);
    verdict(
        "mirror involution",
        anchor == vec![Point::new(432.0, 186.0)] && twice == stroke,
        format!(
            "207 -> {}, double mirror identity {}",
            anchor[0].x,
            twice == stroke
        ),
    );
}
