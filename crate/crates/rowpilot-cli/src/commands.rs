//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use rayon::prelude::*;

use rowpilot::io::{
    read_depth_pgm, write_depth_pgm, write_episode_csv, write_manifest_csv, Config,
};
use rowpilot::sim::{box_blur, depth_to_rgb, project_opening_center};
use rowpilot::{
    angular_velocity, arbiter_step_detailed, heuristic_classify, linear_velocity, metrics,
    normalize_depth, run_episode, run_episode_observed, threshold_far_field, ArbiterState,
    ControllerParams, EpisodeLog, EpisodeOutcome, LabeledSample, Pose, SampleHarvester, Scenario,
};

pub struct Context {
    pub config: Config,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub quiet: bool,
}

impl Context {
    fn base_seed(&self) -> u64 {
        self.seed.unwrap_or(self.config.corruption_seed)
    }

    fn say(&self, msg: &str) {
        if !self.quiet {
            println!("{msg}");
        }
    }
}

fn outcome_str(outcome: EpisodeOutcome) -> &'static str {
    match outcome {
        EpisodeOutcome::Completed => "Completed",
        EpisodeOutcome::Collision => "Collision",
        EpisodeOutcome::Stopped => "Stopped",
        EpisodeOutcome::MaxSteps => "MaxSteps",
        EpisodeOutcome::ClassifierUnavailable => "ClassifierUnavailable",
    }
}

/// Stops count as success (the platform protected itself); collisions and
/// aborted episodes do not.
fn is_success(outcome: EpisodeOutcome) -> bool {
    matches!(outcome, EpisodeOutcome::Completed | EpisodeOutcome::Stopped)
}

fn scenario_for_episode(ctx: &Context, index: u32) -> Scenario {
    let mut sc = ctx.config.scenario();
    let seed = ctx.base_seed().wrapping_add(index as u64);
    for window in &mut sc.episode.corruption {
        window.params.seed = seed;
    }
    sc
}

pub fn run_sim(ctx: &Context, dump_frames: bool) -> Result<bool> {
    let n = ctx.config.episode_count;
    let logs: Vec<Result<EpisodeLog>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let sc = scenario_for_episode(ctx, i);
            let log = if dump_frames {
                let dir = ctx.out.join(format!("frames_{i:03}"));
                fs::create_dir_all(&dir)?;
                run_episode_observed(&sc, |obs| {
                    let path = dir.join(format!("frame_{:05}.pgm", obs.step));
                    fs::write(path, write_depth_pgm(obs.frame)).expect("write frame dump");
                })
            } else {
                run_episode(&sc)
            };
            fs::write(
                ctx.out.join(format!("episode_{i:03}.csv")),
                write_episode_csv(&log.steps),
            )?;
            Ok(log)
        })
        .collect();

    let mut summary = String::new();
    let mut completed = 0u32;
    let mut stopped = 0u32;
    let mut collisions = 0u32;
    let mut failed = 0u32;
    let mut mean_abs_y_sum = 0.0;
    let mut fallback_sum = 0.0;
    let mut max_abs_y: f64 = 0.0;
    let mut with_metrics = 0u32;
    let mut all_ok = true;

    writeln!(summary, "episodes = {n}")?;
    for (i, log) in logs.iter().enumerate() {
        let log = match log {
            Ok(log) => log,
            Err(e) => bail!("episode {i}: {e}"),
        };
        match log.outcome {
            EpisodeOutcome::Completed => completed += 1,
            EpisodeOutcome::Stopped => stopped += 1,
            EpisodeOutcome::Collision => collisions += 1,
            _ => failed += 1,
        }
        all_ok &= is_success(log.outcome);
        writeln!(summary, "episode_{i:03} = {}", outcome_str(log.outcome))?;
        if let Ok(m) = metrics(log) {
            mean_abs_y_sum += m.mean_abs_y;
            fallback_sum += m.fallback_fraction;
            max_abs_y = max_abs_y.max(m.max_abs_y);
            with_metrics += 1;
        }
    }
    writeln!(summary, "completed = {completed}")?;
    writeln!(summary, "stopped = {stopped}")?;
    writeln!(summary, "collisions = {collisions}")?;
    writeln!(summary, "failed = {failed}")?;
    if with_metrics > 0 {
        writeln!(summary, "mean_abs_y = {}", mean_abs_y_sum / with_metrics as f64)?;
        writeln!(summary, "max_abs_y = {max_abs_y}")?;
        writeln!(
            summary,
            "mean_fallback_fraction = {}",
            fallback_sum / with_metrics as f64
        )?;
    }
    writeln!(summary, "success = {all_ok}")?;
    fs::write(ctx.out.join("summary.txt"), &summary)?;
    ctx.say(summary.trim_end());
    Ok(all_ok)
}

pub fn process_frames(ctx: &Context, dir: &Path) -> Result<bool> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read frame directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "pgm"))
        .collect();
    if paths.is_empty() {
        bail!("no .pgm frames in {}", dir.display());
    }
    paths.sort_by_key(|p| p.file_name().map(|n| n.to_os_string()));

    let sc = ctx.config.scenario();
    let mut state = ArbiterState::default();
    let mut csv = String::from("frame,detected,x_w,d,v,omega,source\n");
    for path in &paths {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let frame = match fs::read(path).ok().map(|b| read_depth_pgm(&b)) {
            Some(Ok(frame)) => frame,
            // Unreadable frame: record the error and keep the arbiter state
            // untouched, as if the frame had never been captured.
            _ => {
                writeln!(csv, "{name},error,,,,,")?;
                continue;
            }
        };
        let controller = ControllerParams {
            frame_width: frame.width(),
            ..sc.controller.clone()
        };
        let view = normalize_depth(&frame).ok().and_then(|nd| {
            let mask = threshold_far_field(&nd, sc.pipeline.t_distance);
            heuristic_classify(&mask, &sc.fallback).ok().map(|(c, _)| c)
        });
        match arbiter_step_detailed(&frame, view, state, &controller, &sc.pipeline, &sc.fallback) {
            Ok(step) => {
                state = step.state;
                let (detected, x_w, d) = match step.offset {
                    Some(d) => (
                        "true",
                        (d + frame.width() as f64 / 2.0).to_string(),
                        d.to_string(),
                    ),
                    None => ("false", String::new(), String::new()),
                };
                writeln!(
                    csv,
                    "{name},{detected},{x_w},{d},{},{},{}",
                    step.command.linear,
                    step.command.angular,
                    step.command.source.as_str()
                )?;
            }
            Err(_) => writeln!(csv, "{name},false,,,,,Unavailable")?,
        }
    }
    let out_path = ctx.out.join("process.csv");
    fs::write(&out_path, &csv)?;
    ctx.say(&format!("{} frames -> {}", paths.len(), out_path.display()));
    Ok(true)
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| anyhow::anyhow!("invalid {what} value '{s}'"))
        })
        .collect()
}

pub fn calibrate(
    ctx: &Context,
    t_distances: Option<&str>,
    t_areas: Option<&str>,
) -> Result<bool> {
    let distances: Vec<f64> = match t_distances {
        Some(spec) => parse_list(spec, "t_distance")?,
        None => vec![ctx.config.t_distance],
    };
    let areas: Vec<u32> = match t_areas {
        Some(spec) => parse_list(spec, "t_area")?,
        None => vec![ctx.config.pipeline_params().t_area as u32],
    };
    let grid: Vec<(f64, u32)> = distances
        .iter()
        .flat_map(|&td| areas.iter().map(move |&ta| (td, ta)))
        .collect();

    let n = ctx.config.episode_count;
    let width = ctx.config.camera_width as f64;
    let rows: Vec<String> = grid
        .par_iter()
        .map(|&(td, ta)| {
            let mut completions = 0u32;
            let mut false_windows = 0usize;
            let mut steps_total = 0usize;
            for i in 0..n {
                let mut sc = scenario_for_episode(ctx, i);
                sc.pipeline.t_distance = td as f32;
                sc.pipeline.t_area = ta as usize;
                let log = run_episode(&sc);
                if log.outcome == EpisodeOutcome::Completed {
                    completions += 1;
                }
                steps_total += log.steps.len();
                for s in &log.steps {
                    let Some(d) = s.offset else { continue };
                    let pose = Pose::new(s.x, s.y, s.theta);
                    let x_w = d + width / 2.0;
                    let truth = project_opening_center(&sc.world, &pose, &sc.intrinsics);
                    let is_false = match truth {
                        Some(u) => (x_w - u).abs() > 0.15 * width,
                        None => true,
                    };
                    if is_false {
                        false_windows += 1;
                    }
                }
            }
            let completion_rate = completions as f64 / n as f64;
            let false_rate = if steps_total == 0 {
                0.0
            } else {
                false_windows as f64 / steps_total as f64
            };
            format!("{td},{ta},{n},{completion_rate},{false_rate}")
        })
        .collect();

    let mut csv = String::from("t_distance,t_area,episodes,completion_rate,false_window_rate\n");
    for row in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    let out_path = ctx.out.join("calibration.csv");
    fs::write(&out_path, &csv)?;
    ctx.say(&format!("{} grid points -> {}", grid.len(), out_path.display()));
    Ok(true)
}

pub fn curves(ctx: &Context, samples: usize) -> Result<bool> {
    if samples < 2 {
        bail!("--samples must be at least 2");
    }
    let params = ctx.config.controller_params();
    let w = params.frame_width as f64;
    let mut csv = String::from("d,v,omega\n");
    for i in 0..samples {
        let d = -w / 2.0 + i as f64 * (w / (samples as f64 - 1.0));
        writeln!(
            csv,
            "{d},{},{}",
            linear_velocity(d, &params),
            angular_velocity(d, &params)
        )?;
    }
    let out_path = ctx.out.join("curves.csv");
    fs::write(&out_path, &csv)?;
    ctx.say(&format!("{samples} samples -> {}", out_path.display()));
    Ok(true)
}

pub fn harvest(ctx: &Context) -> Result<bool> {
    let n = ctx.config.episode_count;
    let window = ctx.config.harvest_window as usize;
    let frames_dir = ctx.out.join("frames");
    fs::create_dir_all(&frames_dir)?;

    struct EpisodeHarvest {
        outcome: EpisodeOutcome,
        samples: Vec<(u32, rowpilot::fallback::HarvestedSample)>,
    }

    let harvests: Vec<EpisodeHarvest> = (0..n)
        .into_par_iter()
        .map(|i| {
            let sc = scenario_for_episode(ctx, i);
            let mut harvester = SampleHarvester::new(&sc.fallback, window);
            let mut samples = Vec::new();
            let dt = sc.episode.dt;
            let log = run_episode_observed(&sc, |obs| {
                let rgb = box_blur(
                    &depth_to_rgb(obs.frame, sc.intrinsics.max_range_mm),
                    (obs.step % 3) as usize,
                );
                if let Some(sample) = harvester.push(rgb, obs.offset, obs.t) {
                    let step = (sample.timestamp / dt).round() as u32;
                    samples.push((step, sample));
                }
            });
            EpisodeHarvest {
                outcome: log.outcome,
                samples,
            }
        })
        .collect();

    let mut manifest = Vec::new();
    let mut all_ok = true;
    for (i, harvest) in harvests.iter().enumerate() {
        all_ok &= is_success(harvest.outcome);
        for (step, sample) in &harvest.samples {
            let rel = format!("frames/ep{i:03}_t{step:05}.ppm");
            fs::write(
                ctx.out.join(&rel),
                rowpilot::io::write_rgb_ppm(&sample.rgb),
            )?;
            manifest.push(LabeledSample {
                path: rel,
                label: sample.label,
                offset_px: sample.offset_px,
                sharpness: sample.sharpness,
                timestamp: sample.timestamp,
            });
        }
    }
    let manifest_path = ctx.out.join("manifest.csv");
    fs::write(&manifest_path, write_manifest_csv(&manifest))?;
    ctx.say(&format!(
        "{} samples from {n} episodes -> {}",
        manifest.len(),
        manifest_path.display()
    ));
    Ok(all_ok)
}
